//! Monte-Carlo sweeps: configuration, parallel execution and CSV reports.

mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{schedule_baseline, BaselineKind};
use crate::channel::{ChannelParams, FrameConfig};
use crate::error::{Error, Result};
use crate::relay_decision::decide_all;
use crate::scenario::{build_scenario, ScenarioConfig};
use crate::scheduler::{
    schedule_frame, validate_schedule, Metrics, ScheduleResult, SchedulerParams,
};
use crate::world::{SimParams, World};

pub use report::{format_number, runs_csv, summary_csv, write_report, RUNS_FILE, SUMMARY_FILE};

/// Environment variable capping sweep parallelism; 0 or unset means one
/// worker per core.
pub const THREADS_ENV: &str = "HSR_SCHED_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    UavAssisted,
    QosConcurrent,
    Mqis,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::UavAssisted, Scheme::QosConcurrent, Scheme::Mqis];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::UavAssisted => "uav_assisted",
            Scheme::QosConcurrent => "qos_concurrent",
            Scheme::Mqis => "mqis",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig {
                field: "schemes".into(),
                reason: format!(
                    "unknown scheme {s:?}; expected uav_assisted, qos_concurrent or mqis"
                ),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    FlowCount,
    SlotCount,
    UavDistance,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::FlowCount => "flow_count",
            SweepVariable::SlotCount => "slot_count",
            SweepVariable::UavDistance => "uav_distance",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepVariable::FlowCount,
            SweepVariable::SlotCount,
            SweepVariable::UavDistance,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| Error::InvalidConfig {
            field: "sweep.variable".into(),
            reason: format!(
                "unknown sweep variable {s:?}; expected flow_count, slot_count or uav_distance"
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            variable: SweepVariable::FlowCount,
            values: vec![6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub channel: ChannelParams,
    pub frame: FrameConfig,
    pub scheduler: SchedulerParams,
    pub sweep: SweepConfig,
    pub schemes: Vec<Scheme>,
    pub seeds: Vec<u64>,
    /// Directory the CSV files are written to.
    pub output: PathBuf,
    /// Count only completed flows towards system throughput.
    pub completed_only: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            channel: ChannelParams::default(),
            frame: FrameConfig::default(),
            scheduler: SchedulerParams::default(),
            sweep: SweepConfig::default(),
            schemes: Scheme::ALL.to_vec(),
            seeds: (0..20).collect(),
            output: PathBuf::from("results"),
            completed_only: false,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn sim_params(&self) -> SimParams {
        SimParams {
            channel: self.channel.clone(),
            frame: self.frame.clone(),
            scheduler: self.scheduler.clone(),
        }
    }

    /// Copy of this configuration with the sweep variable set to `value`.
    pub fn at_point(&self, value: f64) -> ExperimentConfig {
        let mut c = self.clone();
        match self.sweep.variable {
            SweepVariable::FlowCount => c.scenario.flow_count = value as usize,
            SweepVariable::SlotCount => c.frame.slot_count = value as u64,
            SweepVariable::UavDistance => c.scenario.uav_distance_m = value,
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.values.is_empty() {
            return Err(invalid("sweep.values", "must not be empty"));
        }
        for &v in &self.sweep.values {
            let ok = match self.sweep.variable {
                SweepVariable::FlowCount => v >= 0.0 && v.fract() == 0.0,
                SweepVariable::SlotCount => v > 0.0 && v.fract() == 0.0,
                SweepVariable::UavDistance => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(invalid(
                    "sweep.values",
                    format!("{v} is not a valid {}", self.sweep.variable),
                ));
            }
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "must not be empty"));
        }
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "must not be empty"));
        }
        for &v in &self.sweep.values {
            let point = self.at_point(v);
            point.scenario.validate()?;
            point.sim_params().validate()?;
        }
        self.scenario.validate()?;
        self.sim_params().validate()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serialises")
    }
}

/// Parses a configuration from TOML text. Omitted keys take their defaults.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// One (sweep value, scheme, seed) simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub metrics: Metrics,
}

/// Mean and sample standard deviation of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        if xs.is_empty() {
            return Stat::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub runs: usize,
    pub completed_flows: Stat,
    pub system_throughput_mbps: Stat,
    pub total_slots_used: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub variable: SweepVariable,
    /// Ordered by sweep value (in configuration order), scheme, seed.
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

impl SweepReport {
    pub fn row(&self, sweep_value: f64, scheme: Scheme) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.scheme == scheme)
    }
}

/// Schedules one frame with `scheme` for the scenario drawn from `seed`.
pub fn run_scheme(world: &World, scheme: Scheme, completed_only: bool) -> Result<ScheduleResult> {
    match scheme {
        Scheme::UavAssisted => {
            let sets = decide_all(&world.scenario.flows, world)?;
            schedule_frame(&sets, world, completed_only)
        }
        Scheme::QosConcurrent => {
            schedule_baseline(BaselineKind::QosConcurrent, world, completed_only)
        }
        Scheme::Mqis => schedule_baseline(BaselineKind::Mqis, world, completed_only),
    }
}

/// Builds, schedules and validates one run. Any constraint violation is an error.
pub fn run_one(config: &ExperimentConfig, scheme: Scheme, seed: u64) -> Result<Metrics> {
    let scenario = build_scenario(&config.scenario, seed)?;
    let world = World::new(scenario, config.sim_params())?;
    let result = run_scheme(&world, scheme, config.completed_only)?;
    let violations = validate_schedule(&result, &world)?;
    if !violations.is_empty() {
        let report = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Error::InvalidSchedule {
            scheme: scheme.to_string(),
            seed,
            report,
        });
    }
    Ok(result.metrics)
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs every (sweep value, scheme, seed) combination in parallel and
/// aggregates per (value, scheme). The result does not depend on thread count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let mut jobs = Vec::new();
    for (vi, &value) in config.sweep.values.iter().enumerate() {
        for (si, &scheme) in config.schemes.iter().enumerate() {
            for &seed in &config.seeds {
                jobs.push((vi, si, value, scheme, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<((usize, usize, u64), RunRecord)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(vi, si, value, scheme, seed)| {
                let metrics = run_one(&config.at_point(value), scheme, seed)?;
                Ok((
                    (vi, si, seed),
                    RunRecord {
                        sweep_value: value,
                        scheme,
                        seed,
                        metrics,
                    },
                ))
            })
            .collect()
    });
    let mut keyed = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    keyed.sort_by_key(|(k, _)| *k);
    let runs: Vec<RunRecord> = keyed.into_iter().map(|(_, r)| r).collect();
    let summary = summarize(config, &runs);
    Ok(SweepReport {
        variable: config.sweep.variable,
        runs,
        summary,
    })
}

fn summarize(config: &ExperimentConfig, runs: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &value in &config.sweep.values {
        for &scheme in &config.schemes {
            let group: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.sweep_value == value && r.scheme == scheme)
                .collect();
            let col = |f: fn(&Metrics) -> f64| {
                Stat::of(&group.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>())
            };
            rows.push(SummaryRow {
                sweep_value: value,
                scheme,
                runs: group.len(),
                completed_flows: col(|m| m.completed_flows as f64),
                system_throughput_mbps: col(|m| m.system_throughput_bps / 1e6),
                total_slots_used: col(|m| m.total_slots_used as f64),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("", Path::new("empty.toml")).unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.channel.f1.carrier_ghz, 28.0);
        assert_eq!(c.channel.f1.bandwidth_mhz, 850.0);
        assert_eq!(c.frame.slot_count, 8000);
        assert_eq!(c.frame.slot_duration_us, 18.0);
        assert_eq!(c.frame.scheduling_phase_us, 850.0);
        assert_eq!(c.scheduler.bs_antennas, 3);
        assert_eq!(c.scheduler.uav_antennas, 3);
        assert_eq!(c.channel.f1.noise_density_dbm_per_mhz, -134.0);
        assert_eq!(c.channel.f1.efficiency, 0.5);
        assert_eq!(c.seeds.len(), 20);
    }

    #[test]
    fn negative_bandwidth_names_field() {
        let err =
            parse_config("[channel.f1]\nbandwidth_mhz = -5.0\n", Path::new("x.toml")).unwrap_err();
        assert!(
            err.to_string().contains("channel.f1.bandwidth_mhz"),
            "{err}"
        );
    }

    #[test]
    fn parse_error_reports_line() {
        let err = parse_config(
            "seeds = [1, 2]\n[frame]\nslot_count = \"many\"\n",
            Path::new("bad.toml"),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.toml") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_config("[frame]\nslots = 5\n", Path::new("x.toml")).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig {
            sweep: SweepConfig {
                variable: SweepVariable::UavDistance,
                values: vec![50.0, 100.0],
            },
            schemes: vec![Scheme::Mqis],
            ..ExperimentConfig::default()
        };
        c.channel.antenna.side_lobe_gain_dbi = Some(-10.0);
        let back = parse_config(&c.to_toml(), Path::new("rt.toml")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empty_sweep_and_seeds_rejected() {
        let mut c = ExperimentConfig::default();
        c.seeds.clear();
        assert!(c.validate().unwrap_err().to_string().contains("seeds"));
        let mut c = ExperimentConfig::default();
        c.sweep.values.clear();
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("sweep.values"));
        let mut c = ExperimentConfig::default();
        c.sweep.values = vec![30.0];
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("scenario.flow_count"));
    }

    #[test]
    fn sample_std() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.2909944487358056).abs() < 1e-12);
        assert_eq!(Stat::of(&[7.0]).std, 0.0);
    }

    #[test]
    fn zero_flows_all_zero() {
        let mut c = ExperimentConfig::default();
        c.sweep.values = vec![0.0];
        c.seeds = vec![3];
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.runs.len(), 3);
        for run in &r.runs {
            assert_eq!(run.metrics, Metrics::default());
        }
    }

    #[test]
    fn scheme_names_parse() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("greedy".parse::<Scheme>().is_err());
    }
}
