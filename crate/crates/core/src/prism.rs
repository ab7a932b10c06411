//! Spatiotemporal prism complex construction.
//!
//! Every active slice contributes the flag complex of its contact graph. For
//! every slice pair `(t, t')` with `0 < t' - t <= K`, each simplex whose node set
//! is present in both snapshots is thickened into `σ × [t, t']` and
//! triangulated by the prism operator. Vertices inside a prism are ordered by
//! ascending node id, the same global order for every prism, so prisms over
//! faces are sub-complexes of prisms over cofaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{
    flag_complex, node_set, persistent_complex, ComplexBuilder, SimplexId, SpacetimeVertex,
    WeightedComplex,
};
use crate::contact_stream::{ContactSequence, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeClass {
    Spatial,
    Temporal,
    Diagonal,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 3] = [EdgeClass::Spatial, EdgeClass::Temporal, EdgeClass::Diagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Spatial => "spatial",
            EdgeClass::Temporal => "temporal",
            EdgeClass::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class and slice gap of the edge between two spacetime vertices.
pub fn classify_vertices(a: SpacetimeVertex, b: SpacetimeVertex) -> (EdgeClass, u32) {
    let gap = a.slice.abs_diff(b.slice) as u32;
    let class = if gap == 0 {
        EdgeClass::Spatial
    } else if a.node == b.node {
        EdgeClass::Temporal
    } else {
        EdgeClass::Diagonal
    };
    (class, gap)
}

/// Monotone-decreasing weight of a slice gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightFn {
    /// `g ≡ 1`
    Unit,
    /// `g(τ) = 1 / (1 + τ)`
    Reciprocal,
    /// `g(τ) = exp(−λτ)`
    Exponential(f64),
}

impl WeightFn {
    pub fn eval(self, gap: f64) -> f64 {
        match self {
            WeightFn::Unit => 1.0,
            WeightFn::Reciprocal => 1.0 / (1.0 + gap),
            WeightFn::Exponential(lambda) => (-lambda * gap).exp(),
        }
    }
}

impl FromStr for WeightFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightFn::Unit),
            "reciprocal" => Ok(WeightFn::Reciprocal),
            _ => {
                let lambda = s
                    .strip_prefix("exp:")
                    .and_then(|l| l.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Usage(format!(
                            "unknown weight function `{s}` (expected unit, reciprocal or exp:LAMBDA)"
                        ))
                    })?;
                if !(lambda.is_finite() && lambda >= 0.0) {
                    return Err(Error::domain(format!(
                        "exponential rate must be finite and non-negative, got {lambda}"
                    )));
                }
                Ok(WeightFn::Exponential(lambda))
            }
        }
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFn::Unit => f.write_str("unit"),
            WeightFn::Reciprocal => f.write_str("reciprocal"),
            WeightFn::Exponential(l) => write!(f, "exp:{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub g: WeightFn,
    /// Multiplier applied to `g(Δt)` on diagonal edges.
    pub diagonal_factor: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            g: WeightFn::Reciprocal,
            diagonal_factor: 0.5,
        }
    }
}

impl WeightConfig {
    /// `g ≡ 1` with no diagonal attenuation: every weight is 1.
    pub fn unit() -> Self {
        WeightConfig {
            g: WeightFn::Unit,
            diagonal_factor: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diagonal_factor > 0.0 && self.diagonal_factor <= 1.0) {
            return Err(Error::domain(format!(
                "diagonal factor must lie in (0, 1], got {}",
                self.diagonal_factor
            )));
        }
        if let WeightFn::Exponential(l) = self.g {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::domain("exponential rate must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn edge_weight(&self, class: EdgeClass, gap: u32) -> f64 {
        match class {
            EdgeClass::Spatial => 1.0,
            EdgeClass::Temporal => self.g.eval(gap as f64),
            EdgeClass::Diagonal => self.diagonal_factor * self.g.eval(gap as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Maximum slice gap `K`.
    pub slice_gap: u32,
    /// Cap on clique dimension inside each snapshot.
    pub max_dim: Option<usize>,
    /// Only pair each active slice with the next one (still subject to `K`).
    pub consecutive_only: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            slice_gap: 3,
            max_dim: None,
            consecutive_only: false,
        }
    }
}

/// Spatial flag complex of one active slice.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub slice: i64,
    pub complex: WeightedComplex,
}

/// The prism complex together with its per-slice ingredients.
#[derive(Debug, Clone)]
pub struct PrismComplex {
    complex: WeightedComplex,
    snapshots: Vec<Snapshot>,
    pairs: Vec<(i64, i64)>,
    edge_info: Vec<(EdgeClass, u32)>,
    options: BuildOptions,
    weights: WeightConfig,
}

/// Top-dimensional simplices `S_i = {v̂_0..v̂_i, w_i..w_n}` of the prism over `sigma`.
pub fn prism_top_simplices(sigma: &[NodeId], t: i64, t2: i64) -> Vec<Vec<SpacetimeVertex>> {
    let mut nodes = sigma.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    (0..nodes.len())
        .map(|i| {
            let bottom = nodes[..=i].iter().map(|&v| SpacetimeVertex::new(v, t));
            let top = nodes[i..].iter().map(|&v| SpacetimeVertex::new(v, t2));
            bottom.chain(top).collect()
        })
        .collect()
}

/// The simplicial complex triangulating `sigma × [t, t2]`.
pub fn prism(sigma: &[NodeId], t: i64, t2: i64) -> Result<WeightedComplex> {
    if t >= t2 {
        return Err(Error::domain(format!(
            "prism needs t < t', got t = {t}, t' = {t2}"
        )));
    }
    if sigma.is_empty() {
        return Err(Error::domain("prism over an empty simplex"));
    }
    let mut builder = ComplexBuilder::new();
    for top in prism_top_simplices(sigma, t, t2) {
        builder.insert(&top);
    }
    Ok(builder.build())
}

/// Builds the prism complex of a binned contact sequence with default options.
pub fn build_kst(seq: &ContactSequence, slice_gap: u32, wcfg: WeightConfig) -> Result<PrismComplex> {
    PrismComplex::build(
        seq,
        BuildOptions {
            slice_gap,
            ..BuildOptions::default()
        },
        wcfg,
    )
}

impl PrismComplex {
    pub fn build(seq: &ContactSequence, options: BuildOptions, wcfg: WeightConfig) -> Result<Self> {
        if options.slice_gap < 1 {
            return Err(Error::domain("slice gap K must be at least 1"));
        }
        wcfg.validate()?;
        if !seq.is_sliced() {
            return Err(Error::domain(
                "contact times are not integer slice indices; bin the sequence first",
            ));
        }

        let mut by_slice: BTreeMap<i64, Vec<(SpacetimeVertex, SpacetimeVertex)>> = BTreeMap::new();
        for e in seq.events() {
            let s = e.t as i64;
            by_slice
                .entry(s)
                .or_default()
                .push((SpacetimeVertex::new(e.i, s), SpacetimeVertex::new(e.j, s)));
        }
        let snapshots: Vec<Snapshot> = by_slice
            .into_iter()
            .map(|(slice, edges)| Snapshot {
                slice,
                complex: flag_complex(&edges, options.max_dim),
            })
            .collect();

        let mut pairs = Vec::new();
        for (a, lo) in snapshots.iter().enumerate() {
            for hi in &snapshots[a + 1..] {
                let gap = hi.slice - lo.slice;
                if gap > options.slice_gap as i64 {
                    break;
                }
                pairs.push((lo.slice, hi.slice));
                if options.consecutive_only {
                    break;
                }
            }
        }

        let mut builder = ComplexBuilder::new();
        for snap in &snapshots {
            insert_complex(&mut builder, &snap.complex);
        }
        let slice_pos: BTreeMap<i64, usize> = snapshots
            .iter()
            .enumerate()
            .map(|(k, s)| (s.slice, k))
            .collect();
        for &(lo, hi) in &pairs {
            let shared = persistent_complex(
                &snapshots[slice_pos[&lo]].complex,
                &snapshots[slice_pos[&hi]].complex,
            );
            insert_prisms(&mut builder, &shared, lo, hi);
        }

        let complex = builder.build();
        let edge_info = complex
            .ids_of_dim(1)
            .map(|e| {
                let v = complex.vertex_indices(e);
                classify_vertices(complex.label(v[0]), complex.label(v[1]))
            })
            .collect();
        let mut pc = PrismComplex {
            complex,
            snapshots,
            pairs,
            edge_info,
            options,
            weights: WeightConfig::unit(),
        };
        pc.assign_weights(wcfg)?;
        Ok(pc)
    }

    /// Re-weights in place: vertices and spatial edges 1, temporal edges `g(Δt)`,
    /// diagonal edges `factor · g(Δt)`, higher simplices the geometric mean of
    /// their edge weights.
    pub fn assign_weights(&mut self, wcfg: WeightConfig) -> Result<()> {
        wcfg.validate()?;
        let c = &self.complex;
        let first_edge = c.ids_of_dim(1).next().map_or(0, |e| e.index());
        let edge_weight = |id: SimplexId| {
            let (class, gap) = self.edge_info[id.index() - first_edge];
            wcfg.edge_weight(class, gap)
        };
        let weights: Vec<f64> = c
            .ids()
            .map(|id| match c.dim(id) {
                0 => 1.0,
                1 => edge_weight(id),
                _ => {
                    let v = c.vertex_indices(id);
                    let mut log_sum = 0.0;
                    let mut n = 0usize;
                    for a in 0..v.len() {
                        for b in a + 1..v.len() {
                            let e = c.find_indices(&[v[a], v[b]]).expect("edge of stored simplex");
                            log_sum += edge_weight(e).ln();
                            n += 1;
                        }
                    }
                    (log_sum / n as f64).exp()
                }
            })
            .collect();
        self.complex = self.complex.clone().with_weights(weights)?;
        self.weights = wcfg;
        Ok(())
    }

    /// Copy carrying a different weight configuration.
    pub fn reweighted(&self, wcfg: WeightConfig) -> Result<Self> {
        let mut pc = self.clone();
        pc.assign_weights(wcfg)?;
        Ok(pc)
    }

    pub fn complex(&self) -> &WeightedComplex {
        &self.complex
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, slice: i64) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&slice, |s| s.slice)
            .ok()
            .map(|k| &self.snapshots[k])
    }

    /// Slice pairs `(t, t')` across which prisms were built.
    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn slice_gap(&self) -> u32 {
        self.options.slice_gap
    }

    pub fn options(&self) -> BuildOptions {
        self.options
    }

    pub fn weight_config(&self) -> WeightConfig {
        self.weights
    }

    /// Class and slice gap of a 1-simplex.
    pub fn classify_edge(&self, e: SimplexId) -> Result<(EdgeClass, u32)> {
        if e.index() >= self.complex.len() || self.complex.dim(e) != 1 {
            return Err(Error::Lookup(format!("{e:?} is not a 1-simplex")));
        }
        let first = self.complex.ids_of_dim(1).next().expect("has edges").index();
        Ok(self.edge_info[e.index() - first])
    }

    /// The snapshot at `slice` as a sub-complex of the prism complex (weights kept).
    pub fn slice_subcomplex(&self, slice: i64) -> WeightedComplex {
        self.complex
            .restrict(|c, id| c.labels_of(id).all(|v| v.slice == slice))
    }

    /// Persistent simplices shared by the snapshots at `lo` and `hi`.
    pub fn persistent(&self, lo: i64, hi: i64) -> WeightedComplex {
        match (self.snapshot(lo), self.snapshot(hi)) {
            (Some(a), Some(b)) => persistent_complex(&a.complex, &b.complex),
            _ => WeightedComplex::empty(),
        }
    }

    /// All simplex ids of the union of prisms between slices `lo` and `hi`.
    pub fn prism_stack(&self, lo: i64, hi: i64) -> BTreeSet<SimplexId> {
        stack_simplices(&self.persistent(lo, hi), lo, hi)
            .iter()
            .map(|s| self.complex.find(s).expect("prism simplex stored in complex"))
            .collect()
    }

    /// Ids of the simplices of one prism `Pr(σ; lo, hi)` inside the complex.
    pub fn prism_ids(&self, sigma: &[NodeId], lo: i64, hi: i64) -> Result<BTreeSet<SimplexId>> {
        let p = prism(sigma, lo, hi)?;
        p.ids()
            .map(|id| {
                let s: Vec<_> = p.labels_of(id).collect();
                self.complex
                    .find(&s)
                    .ok_or_else(|| Error::Lookup(p.simplex(id).to_string()))
            })
            .collect()
    }
}

fn insert_complex(builder: &mut ComplexBuilder, c: &WeightedComplex) {
    // largest first so face insertions short-circuit
    for id in c.ids().collect::<Vec<_>>().into_iter().rev() {
        let s: Vec<_> = c.labels_of(id).collect();
        builder.insert(&s);
    }
}

fn insert_prisms(builder: &mut ComplexBuilder, shared: &WeightedComplex, lo: i64, hi: i64) {
    for id in shared.ids().collect::<Vec<_>>().into_iter().rev() {
        for top in prism_top_simplices(&node_set(shared, id), lo, hi) {
            builder.insert(&top);
        }
    }
}

fn stack_simplices(shared: &WeightedComplex, lo: i64, hi: i64) -> Vec<Vec<SpacetimeVertex>> {
    let mut builder = ComplexBuilder::new();
    insert_prisms(&mut builder, shared, lo, hi);
    let c = builder.build();
    c.ids().map(|id| c.labels_of(id).collect()).collect()
}
