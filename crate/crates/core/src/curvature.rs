//! Original and augmented Forman–Ricci curvature.
//!
//! [`forman_general`] evaluates the original weighted CW-complex formula
//! literally for a cell of any dimension and is the reference value for every
//! other routine here. The 1-simplex shortcuts, the closed-form discrepancy
//! and the prism coupling decomposition are cross-checked against it.

use serde::Serialize;

use crate::complex::{parallels_1, parallels_p, shared_neighbourhood, SimplexId, SpacetimeVertex, WeightedComplex};
use crate::error::{Error, Result};
use crate::prism::{EdgeClass, PrismComplex};

/// Original Forman–Ricci curvature of a cell of any dimension.
pub fn forman_general(complex: &WeightedComplex, alpha: SimplexId) -> f64 {
    let wa = complex.weight(alpha);
    let mut bracket = 0.0;
    for &beta in complex.cofaces(alpha) {
        bracket += wa / complex.weight(beta);
    }
    for &gamma in complex.faces(alpha) {
        bracket += complex.weight(gamma) / wa;
    }
    for other in parallels_p(complex, alpha) {
        let (common_cofaces, common_faces) = shared_neighbourhood(complex, alpha, other);
        let mean = (wa * complex.weight(other)).sqrt();
        let up: f64 = common_cofaces.iter().map(|&b| mean / complex.weight(b)).sum();
        let down: f64 = common_faces.iter().map(|&g| complex.weight(g) / mean).sum();
        bracket -= (up - down).abs();
    }
    wa * bracket
}

fn require_edge(complex: &WeightedComplex, e: SimplexId) -> Result<()> {
    if e.index() >= complex.len() || complex.dim(e) != 1 {
        return Err(Error::Lookup(format!("{e:?} is not a 1-simplex")));
    }
    Ok(())
}

/// Parallel edges of `e` paired with the vertex they share with `e`.
fn parallels_with_common_vertex(
    complex: &WeightedComplex,
    e: SimplexId,
) -> Result<Vec<(SimplexId, SimplexId)>> {
    let ends = complex.faces(e);
    Ok(parallels_1(complex, e)?
        .into_iter()
        .map(|p| {
            let common = *ends
                .iter()
                .find(|v| complex.faces(p).contains(v))
                .expect("parallel edges share exactly one vertex");
            (p, common)
        })
        .collect())
}

/// Terms shared by both curvature forms: `Σ_T w(e)/w(T) + w(v1)/w(e) + w(v2)/w(e)`.
fn trivial_terms(complex: &WeightedComplex, e: SimplexId) -> f64 {
    let we = complex.weight(e);
    let up: f64 = complex.cofaces(e).iter().map(|&t| we / complex.weight(t)).sum();
    let down: f64 = complex.faces(e).iter().map(|&v| complex.weight(v) / we).sum();
    up + down
}

/// Original curvature of an edge via the reduced simplicial form.
pub fn forman_orig_1(complex: &WeightedComplex, e: SimplexId) -> Result<f64> {
    require_edge(complex, e)?;
    let we = complex.weight(e);
    let parallel: f64 = parallels_with_common_vertex(complex, e)?
        .into_iter()
        .map(|(p, v)| complex.weight(v) / (we * complex.weight(p)).sqrt())
        .sum();
    Ok(we * (trivial_terms(complex, e) - parallel))
}

/// Augmented Forman–Ricci curvature of an edge.
pub fn forman_aug(complex: &WeightedComplex, e: SimplexId) -> Result<f64> {
    require_edge(complex, e)?;
    let we = complex.weight(e);
    let parallel: f64 = parallels_1(complex, e)?
        .into_iter()
        .map(|p| (we / complex.weight(p)).sqrt())
        .sum();
    Ok(we * (trivial_terms(complex, e) - parallel))
}

/// `Σ_{ê ∥ e} √(w(e)/w(ê)) · (w(v(ê)) − w(e))`. Its magnitude equals `|F − F_aug|`.
pub fn discrepancy_closed_form(complex: &WeightedComplex, e: SimplexId) -> Result<f64> {
    require_edge(complex, e)?;
    let we = complex.weight(e);
    Ok(parallels_with_common_vertex(complex, e)?
        .into_iter()
        .map(|(p, v)| (we / complex.weight(p)).sqrt() * (complex.weight(v) - we))
        .sum())
}

/// `Σ_{ê ∥ e} √(w(e)/w(ê)) · |w(v(ê)) − w(e)|`, an upper bound on `|F − F_aug|`.
pub fn discrepancy_bound(complex: &WeightedComplex, e: SimplexId) -> Result<f64> {
    require_edge(complex, e)?;
    let we = complex.weight(e);
    Ok(parallels_with_common_vertex(complex, e)?
        .into_iter()
        .map(|(p, v)| (we / complex.weight(p)).sqrt() * (complex.weight(v) - we).abs())
        .sum())
}

/// `Σ_p (−1)^p Σ_{α ∈ K^(p)} F(α)`.
pub fn alternating_sum(complex: &WeightedComplex) -> f64 {
    complex
        .ids()
        .map(|id| {
            let f = forman_general(complex, id);
            if complex.dim(id).is_multiple_of(2) {
                f
            } else {
                -f
            }
        })
        .sum()
}

/// Per-edge curvature row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureRecord {
    pub edge: SimplexId,
    pub u: SpacetimeVertex,
    pub v: SpacetimeVertex,
    pub class: EdgeClass,
    pub dt: u32,
    pub weight: f64,
    pub forman: f64,
    pub forman_aug: f64,
    /// `forman − forman_aug`
    pub diff: f64,
    /// Signed closed-form discrepancy.
    pub closed_form: f64,
    pub pred_abs_diff: f64,
    pub n_tri: usize,
    pub n_par: usize,
}

/// Curvature records for every 1-simplex, ordered by edge id.
pub fn curvature_records(pc: &PrismComplex) -> Vec<CurvatureRecord> {
    let c = pc.complex();
    c.ids_of_dim(1)
        .map(|e| {
            let (class, dt) = pc.classify_edge(e).expect("edge of the complex");
            let ends = c.vertex_indices(e);
            let forman = forman_general(c, e);
            let aug = forman_aug(c, e).expect("edge of the complex");
            let closed = discrepancy_closed_form(c, e).expect("edge of the complex");
            CurvatureRecord {
                edge: e,
                u: c.label(ends[0]),
                v: c.label(ends[1]),
                class,
                dt,
                weight: c.weight(e),
                forman,
                forman_aug: aug,
                diff: forman - aug,
                closed_form: closed,
                pred_abs_diff: closed.abs(),
                n_tri: c.cofaces(e).len(),
                n_par: parallels_1(c, e).expect("edge of the complex").len(),
            }
        })
        .collect()
}

/// Header of [`records_csv`].
pub const CURVATURE_CSV_HEADER: &str =
    "edge_id,u_node,u_slice,v_node,v_slice,class,dt,w,F,F_aug,diff,pred_abs_diff,n_tri,n_par";

pub fn records_csv(records: &[CurvatureRecord]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(CURVATURE_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.edge.0,
            r.u.node,
            r.u.slice,
            r.v.node,
            r.v.slice,
            r.class,
            r.dt,
            r.weight,
            r.forman,
            r.forman_aug,
            r.diff,
            r.pred_abs_diff,
            r.n_tri,
            r.n_par
        );
    }
    out
}

/// Split of a spatial edge's curvature into its snapshot part and the prism correction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub edge: SimplexId,
    pub slice: i64,
    /// Curvature in the prism complex.
    pub f_kst: f64,
    /// Curvature inside the snapshot alone.
    pub f_static: f64,
    pub delta_prism: f64,
    pub omega: f64,
    /// 2-cofaces of the edge that leave its slice.
    pub prism_cofaces: Vec<SimplexId>,
    /// Parallel edges that leave its slice.
    pub prism_parallels: Vec<SimplexId>,
}

/// Coupling decomposition for one spatial edge.
pub fn coupling_decomposition(pc: &PrismComplex, e: SimplexId) -> Result<Coupling> {
    let (class, _) = pc.classify_edge(e)?;
    if class != EdgeClass::Spatial {
        return Err(Error::domain(format!(
            "coupling decomposition needs a spatial edge, got a {class} edge"
        )));
    }
    let slice = pc.complex().label(pc.complex().vertex_indices(e)[0]).slice;
    Ok(coupling_in_slice(pc.complex(), &pc.slice_subcomplex(slice), e, slice))
}

/// Coupling decomposition for every spatial edge, ordered by edge id.
pub fn coupling_table(pc: &PrismComplex) -> Vec<Coupling> {
    let c = pc.complex();
    let mut by_slice: std::collections::BTreeMap<i64, Vec<SimplexId>> = Default::default();
    for e in c.ids_of_dim(1) {
        if pc.classify_edge(e).map(|(k, _)| k) == Ok(EdgeClass::Spatial) {
            by_slice
                .entry(c.label(c.vertex_indices(e)[0]).slice)
                .or_default()
                .push(e);
        }
    }
    let mut out = Vec::new();
    for (slice, edges) in by_slice {
        let snap = pc.slice_subcomplex(slice);
        out.extend(edges.into_iter().map(|e| coupling_in_slice(c, &snap, e, slice)));
    }
    out.sort_by_key(|k| k.edge);
    out
}

fn coupling_in_slice(
    kst: &WeightedComplex,
    snapshot: &WeightedComplex,
    e: SimplexId,
    slice: i64,
) -> Coupling {
    let labels: Vec<SpacetimeVertex> = kst.labels_of(e).collect();
    let local = snapshot.find(&labels).expect("spatial edge lies in its snapshot");
    let in_slice = |id: SimplexId| kst.labels_of(id).all(|v| v.slice == slice);

    let we = kst.weight(e);
    let prism_cofaces: Vec<SimplexId> =
        kst.cofaces(e).iter().copied().filter(|&t| !in_slice(t)).collect();
    let parallels = parallels_with_common_vertex(kst, e).expect("edge of the complex");
    let mut prism_parallels = Vec::new();
    let mut omega = 0.0;
    for (p, v) in parallels {
        if !in_slice(p) {
            prism_parallels.push(p);
            omega += kst.weight(v) / (we * kst.weight(p)).sqrt();
        }
    }
    let upward: f64 = prism_cofaces.iter().map(|&t| we / kst.weight(t)).sum();
    Coupling {
        edge: e,
        slice,
        f_kst: forman_general(kst, e),
        f_static: forman_general(snapshot, local),
        delta_prism: we * upward - we * omega,
        omega,
        prism_cofaces,
        prism_parallels,
    }
}
