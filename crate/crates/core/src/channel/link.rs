use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scenario::{distance, Geometry, NodeId};

use super::{
    antenna_gain, db_to_linear, noise_floor_dbm, off_boresight_deg, received_power_dbm,
    shannon_rate, Band, ChannelParams, EavesdropperAntenna,
};

pub type LinkId = usize;

/// Which hop of a flow a link carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkRole {
    /// BS -> MR.
    Direct,
    /// BS -> UAV, first hop of a relayed flow.
    BsToUav,
    /// UAV -> MR, second hop of a relayed flow.
    UavToMr,
}

/// A directed single-hop transmission on one band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub flow: usize,
    pub tx: NodeId,
    pub rx: NodeId,
    pub band: Band,
    pub role: LinkRole,
    /// Bits this link has to carry within the frame.
    pub demand_bits: f64,
}

impl Link {
    pub fn new(
        id: LinkId,
        flow: usize,
        role: LinkRole,
        destination: NodeId,
        demand_bits: f64,
    ) -> Self {
        let (tx, rx, band) = match role {
            LinkRole::Direct => (NodeId::Bs, destination, Band::F1),
            LinkRole::BsToUav => (NodeId::Bs, NodeId::Uav, Band::F1),
            LinkRole::UavToMr => (NodeId::Uav, destination, Band::F2),
        };
        Self {
            id,
            flow,
            tx,
            rx,
            band,
            role,
            demand_bits,
        }
    }

    /// True when the pair cannot be active together under half-duplex
    /// operation (one link's receiver is the other's transmitter).
    pub fn half_duplex_clash(&self, other: &Link) -> bool {
        self.tx == other.rx || self.rx == other.tx
    }

    /// True when the link ends a flow (its completion completes the flow).
    pub fn is_final_hop(&self) -> bool {
        self.role != LinkRole::BsToUav
    }
}

/// Frame-constant log-normal shadowing draws, one per unordered node pair,
/// stored as unit normals and scaled by the pair's sigma on use.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowMap {
    nodes: usize,
    unit: Vec<f64>,
}

impl ShadowMap {
    pub fn disabled(nodes: usize) -> Self {
        Self {
            nodes,
            unit: vec![0.0; nodes * nodes],
        }
    }

    pub fn sample(nodes: usize, seed: u64) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rng::stream(seed, Stream::Shadowing);
        let mut unit = vec![0.0; nodes * nodes];
        for a in 0..nodes {
            for b in (a + 1)..nodes {
                let z: f64 = StandardNormal.sample(&mut rng);
                unit[a * nodes + b] = z;
                unit[b * nodes + a] = z;
            }
        }
        Self { nodes, unit }
    }

    pub fn unit(&self, a: NodeId, b: NodeId) -> f64 {
        self.unit[a.dense_index() * self.nodes + b.dense_index()]
    }
}

/// Geometry-aware link budget: every beam is steered at its intended partner
/// and the eavesdropper's beam (if directional) at the BS.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget<'a> {
    pub params: &'a ChannelParams,
    pub geometry: &'a Geometry,
    pub shadow: &'a ShadowMap,
}

impl<'a> LinkBudget<'a> {
    pub fn new(params: &'a ChannelParams, geometry: &'a Geometry, shadow: &'a ShadowMap) -> Self {
        Self {
            params,
            geometry,
            shadow,
        }
    }

    fn gain(&self, node: NodeId, steered_at: NodeId, toward: NodeId) -> Result<f64> {
        if node == NodeId::Eavesdropper
            && self.params.eavesdropper_antenna == EavesdropperAntenna::Omni
        {
            return Ok(0.0);
        }
        let g = self.geometry;
        let angle = off_boresight_deg(
            &g.position(node),
            &g.position(steered_at),
            &g.position(toward),
        );
        antenna_gain(angle, &self.params.antenna)
    }

    /// Power at `rx` from `tx` given where each of them points.
    fn power_dbm(
        &self,
        tx: NodeId,
        tx_steered_at: NodeId,
        rx: NodeId,
        rx_steered_at: NodeId,
    ) -> Result<f64> {
        let band = Band::of_transmitter(tx)
            .ok_or_else(|| Error::Domain(format!("{tx} never transmits")))?;
        let gt = self.gain(tx, tx_steered_at, rx)?;
        let gr = self.gain(rx, rx_steered_at, tx)?;
        let d = distance(&self.geometry.position(tx), &self.geometry.position(rx));
        let pl = self.params.path_loss_for(tx, rx);
        let shadow = pl.shadowing_sigma_db * self.shadow.unit(tx, rx);
        received_power_dbm(gt, gr, self.params.radio(band), d, pl, shadow)
    }

    /// Wanted power at the link's receiver, dBm.
    pub fn signal_dbm(&self, link: &Link) -> Result<f64> {
        self.power_dbm(link.tx, link.rx, link.rx, link.tx)
    }

    /// Power leaking from `interferer`'s transmitter into `victim`'s receiver, dBm.
    pub fn interference_dbm(&self, interferer: &Link, victim: &Link) -> Result<f64> {
        if interferer.band != victim.band {
            return Err(Error::Domain(format!(
                "links {} and {} are on different bands and do not interfere",
                interferer.id, victim.id
            )));
        }
        if interferer.id == victim.id || (interferer.tx == victim.tx && interferer.rx == victim.rx)
        {
            return Err(Error::Domain(format!(
                "link {} cannot interfere with itself",
                victim.id
            )));
        }
        self.power_dbm(interferer.tx, interferer.rx, victim.rx, victim.tx)
    }

    /// Shannon rate of `link` while every link in `active` transmits.
    /// Cross-band members and `link` itself are ignored.
    pub fn rate(&self, link: &Link, active: &[&Link]) -> Result<f64> {
        let mut interference_mw = 0.0;
        for other in active {
            if other.id == link.id || other.band != link.band {
                continue;
            }
            interference_mw += db_to_linear(self.interference_dbm(other, link)?);
        }
        Ok(shannon_rate(
            self.signal_dbm(link)?,
            interference_mw,
            self.params.radio(link.band),
        ))
    }

    /// Capacity of the eavesdropper's channel when it overhears `link`.
    ///
    /// The eavesdropper is treated as interference-free: concurrent BS beams
    /// never help secrecy.
    pub fn eavesdrop_rate(&self, link: &Link) -> Result<f64> {
        if link.band != Band::F1 {
            return Err(Error::Domain(format!(
                "link {} is on F2, which the eavesdropper cannot hear",
                link.id
            )));
        }
        let p = self.power_dbm(link.tx, link.rx, NodeId::Eavesdropper, NodeId::Bs)?;
        Ok(shannon_rate(p, 0.0, &self.params.f1))
    }

    /// Whether `link` keeps `C_E < ratio * C_M` while `active` transmits.
    pub fn secrecy_admissible(&self, link: &Link, active: &[&Link], ratio: f64) -> Result<bool> {
        let ce = self.eavesdrop_rate(link)?;
        let cm = self.rate(link, active)?;
        Ok(ce < ratio * cm)
    }
}

/// Link budget precomputed for a fixed geometry: wanted and cross-link powers
/// in milliwatts so that set rates reduce to a handful of additions.
#[derive(Debug, Clone)]
pub struct LinkGainTable {
    n: usize,
    signal_mw: Vec<f64>,
    noise_mw: Vec<f64>,
    /// `cross_mw[j * n + i]`: power from link j's transmitter at link i's receiver.
    cross_mw: Vec<f64>,
    scale: Vec<f64>,
    eavesdrop_bps: Vec<Option<f64>>,
}

impl LinkGainTable {
    pub fn build(budget: &LinkBudget<'_>, links: &[Link]) -> Result<Self> {
        let n = links.len();
        let mut t = Self {
            n,
            signal_mw: Vec::with_capacity(n),
            noise_mw: Vec::with_capacity(n),
            cross_mw: vec![0.0; n * n],
            scale: Vec::with_capacity(n),
            eavesdrop_bps: Vec::with_capacity(n),
        };
        for (i, link) in links.iter().enumerate() {
            debug_assert_eq!(link.id, i);
            let radio = budget.params.radio(link.band);
            t.signal_mw.push(db_to_linear(budget.signal_dbm(link)?));
            t.noise_mw.push(db_to_linear(noise_floor_dbm(radio)));
            t.scale
                .push(radio.efficiency * radio.bandwidth_hz() / std::f64::consts::LN_2);
            t.eavesdrop_bps.push(match link.band {
                Band::F1 => Some(budget.eavesdrop_rate(link)?),
                Band::F2 => None,
            });
        }
        for (j, src) in links.iter().enumerate() {
            for (i, dst) in links.iter().enumerate() {
                // Parallel links share a receiver and are never on the air together.
                let parallel = src.tx == dst.tx && src.rx == dst.rx;
                if i != j && src.band == dst.band && !parallel {
                    t.cross_mw[j * n + i] = db_to_linear(budget.interference_dbm(src, dst)?);
                }
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Rate of link `i` with every link of `set` transmitting.
    pub fn rate_in_set(&self, i: LinkId, set: &[LinkId]) -> f64 {
        let interference: f64 = set
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| self.cross_mw[j * self.n + i])
            .sum();
        self.scale[i] * (self.signal_mw[i] / (self.noise_mw[i] + interference)).ln_1p()
    }

    pub fn standalone_rate(&self, i: LinkId) -> f64 {
        self.rate_in_set(i, &[])
    }

    /// Eavesdropper capacity for F1 links, `None` for F2.
    pub fn eavesdrop_rate(&self, i: LinkId) -> Option<f64> {
        self.eavesdrop_bps[i]
    }
}
