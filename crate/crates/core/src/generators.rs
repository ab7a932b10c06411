//! Seeded synthetic contact sequences: Erdős–Rényi, activity-driven and bursty.
//!
//! Every unordered pair (ER, bursty) or node (AD) draws from its own ChaCha
//! stream derived from the master seed, so the output does not depend on the
//! order in which pairs are visited.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Weibull};
use serde::{Deserialize, Serialize};

use crate::contact_stream::{ContactEvent, ContactSequence, NodeId};
use crate::error::{Error, Result};

/// Synthetic model and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Er { lambda: f64 },
    Ad { a_min: f64, a_max: f64, alpha: f64, m: u32 },
    Bursty { shape: f64, scale: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Er { .. } => "er",
            Model::Ad { .. } => "ad",
            Model::Bursty { .. } => "bursty",
        }
    }

    /// Model defaults used in the experiments: λ = 0.01; a ∈ [0.05, 0.5],
    /// α = 2.5, m = 2; Weibull shape 0.5 with scale 50.
    pub fn default_for(name: &str) -> Result<Self> {
        match name {
            "er" => Ok(Model::Er { lambda: 0.01 }),
            "ad" => Ok(Model::Ad { a_min: 0.05, a_max: 0.5, alpha: 2.5, m: 2 }),
            "bursty" => Ok(Model::Bursty { shape: 0.5, scale: 50.0 }),
            other => Err(Error::Usage(format!("unknown model `{other}` (expected er, ad or bursty)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_nodes: u32,
    /// Horizon T. For the AD model this is the number of integer steps.
    pub horizon: f64,
    pub model: Model,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn generate(&self) -> Result<ContactSequence> {
        let (n, t, seed) = (self.n_nodes, self.horizon, self.seed);
        match self.model {
            Model::Er { lambda } => gen_er(n, t, lambda, seed),
            Model::Ad { a_min, a_max, alpha, m } => {
                if t < 0.0 || t.fract() != 0.0 || t > u32::MAX as f64 {
                    return Err(Error::domain(format!("AD horizon must be a whole number of steps, got {t}")));
                }
                gen_ad(n, t as u32, a_min, a_max, alpha, m, seed)
            }
            Model::Bursty { shape, scale } => gen_bursty(n, t, shape, scale, seed),
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn pair_stream(seed: u64, i: NodeId, j: NodeId) -> ChaCha8Rng {
    stream(seed, (u64::from(i) << 32) | u64::from(j))
}

fn check_nodes(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 nodes, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

fn pairs(n: u32) -> impl Iterator<Item = (NodeId, NodeId)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn event(i: NodeId, j: NodeId, t: f64) -> ContactEvent {
    ContactEvent::new(i, j, t).expect("generated events are valid")
}

/// Independent homogeneous Poisson processes of rate `lambda` on `[0, T)` per pair.
pub fn gen_er(n: u32, horizon: f64, lambda: f64, seed: u64) -> Result<ContactSequence> {
    check_nodes(n)?;
    check_positive("horizon", horizon)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!("rate must be non-negative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(ContactSequence::default());
    }
    let gap = Exp::new(lambda).map_err(|e| Error::domain(e.to_string()))?;
    let mut events = Vec::new();
    for (i, j) in pairs(n) {
        let mut rng = pair_stream(seed, i, j);
        let mut t = gap.sample(&mut rng);
        while t < horizon {
            events.push(event(i, j, t));
            t += gap.sample(&mut rng);
        }
    }
    Ok(ContactSequence::from_events(events))
}

/// One node activation of the AD model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Activation {
    pub node: NodeId,
    pub step: u32,
    pub partners: Vec<NodeId>,
}

/// Activity `a_i` for each node, by inverse-CDF sampling of `p(a) ∝ a^{-alpha}` on `[a_min, a_max]`.
pub fn ad_activities(n: u32, a_min: f64, a_max: f64, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    check_ad(n, a_min, a_max, alpha, 1)?;
    Ok((0..n).map(|i| activity(&mut stream(seed, u64::from(i)), a_min, a_max, alpha)).collect())
}

fn activity(rng: &mut ChaCha8Rng, a_min: f64, a_max: f64, alpha: f64) -> f64 {
    let u: f64 = rng.random();
    let e = 1.0 - alpha;
    let lo = a_min.powf(e);
    let a = (lo + u * (a_max.powf(e) - lo)).powf(1.0 / e);
    a.clamp(a_min, a_max)
}

fn check_ad(n: u32, a_min: f64, a_max: f64, alpha: f64, m: u32) -> Result<()> {
    check_nodes(n)?;
    if !(a_min > 0.0 && a_min <= a_max && a_max <= 1.0) {
        return Err(Error::domain(format!(
            "activity bounds must satisfy 0 < a_min <= a_max <= 1, got [{a_min}, {a_max}]"
        )));
    }
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::domain(format!("activity exponent must exceed 1, got {alpha}")));
    }
    if m == 0 || m >= n {
        return Err(Error::domain(format!("cannot choose m = {m} distinct partners among {n} nodes")));
    }
    Ok(())
}

/// Activity-driven model over integer steps `0..steps`, with its activation log.
pub fn gen_ad_activations(
    n: u32,
    steps: u32,
    a_min: f64,
    a_max: f64,
    alpha: f64,
    m: u32,
    seed: u64,
) -> Result<(ContactSequence, Vec<Activation>)> {
    check_ad(n, a_min, a_max, alpha, m)?;
    let mut log = Vec::new();
    for i in 0..n {
        let mut rng = stream(seed, u64::from(i));
        let a = activity(&mut rng, a_min, a_max, alpha);
        for step in 0..steps {
            if rng.random::<f64>() < a {
                // sample from V \ {i} by skipping over i
                let partners = sample(&mut rng, n as usize - 1, m as usize)
                    .into_iter()
                    .map(|k| if (k as u32) < i { k as u32 } else { k as u32 + 1 })
                    .collect();
                log.push(Activation { node: i, step, partners });
            }
        }
    }
    log.sort_by_key(|a| (a.step, a.node));
    let events = log.iter().flat_map(|act| {
        act.partners.iter().map(move |&p| {
            let (lo, hi) = if act.node < p { (act.node, p) } else { (p, act.node) };
            event(lo, hi, f64::from(act.step))
        })
    });
    Ok((ContactSequence::from_events(events.collect::<Vec<_>>()), log))
}

pub fn gen_ad(
    n: u32,
    steps: u32,
    a_min: f64,
    a_max: f64,
    alpha: f64,
    m: u32,
    seed: u64,
) -> Result<ContactSequence> {
    gen_ad_activations(n, steps, a_min, a_max, alpha, m, seed).map(|(seq, _)| seq)
}

/// Per-pair stationary renewal process on `[0, T)` with Weibull(shape, scale) inter-event times.
///
/// The process is started in equilibrium: the first event falls uniformly inside a
/// length-biased interval, so the expected count per pair is exactly `T / mean`.
pub fn gen_bursty(n: u32, horizon: f64, shape: f64, scale: f64, seed: u64) -> Result<ContactSequence> {
    check_nodes(n)?;
    check_positive("Weibull shape", shape)?;
    check_positive("Weibull scale", scale)?;
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::domain(format!("horizon must be non-negative, got {horizon}")));
    }
    let gap = Weibull::new(scale, shape).map_err(|e| Error::domain(e.to_string()))?;
    // length-biased Weibull interval is scale * G^(1/k) with G ~ Gamma(1 + 1/k, 1)
    let biased = Gamma::new(1.0 + 1.0 / shape, 1.0).map_err(|e| Error::domain(e.to_string()))?;
    let mut events = Vec::new();
    for (i, j) in pairs(n) {
        let mut rng = pair_stream(seed, i, j);
        let first_interval = scale * biased.sample(&mut rng).powf(1.0 / shape);
        let mut t = rng.random::<f64>() * first_interval;
        while t < horizon {
            events.push(event(i, j, t));
            t += gap.sample(&mut rng);
        }
    }
    Ok(ContactSequence::from_events(events))
}

/// `n` Weibull inter-event times `scale·(−ln u)^{1/shape}` from a seeded stream.
pub fn weibull_intervals(shape: f64, scale: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_positive("Weibull shape", shape)?;
    check_positive("Weibull scale", scale)?;
    let gap = Weibull::new(scale, shape).map_err(|e| Error::domain(e.to_string()))?;
    let mut rng = stream(seed, u64::MAX);
    Ok((0..n).map(|_| gap.sample(&mut rng)).collect())
}
