//! Identity suite run against a built prism complex.
//!
//! Every check is evaluated per simplex and summarised as a [`CheckRecord`].
//! Hard checks must have zero violations; report-only checks are informational.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{euler_of, SimplexId};
use crate::contact_stream::NodeId;
use crate::curvature::{
    alternating_sum, coupling_table, curvature_records, discrepancy_bound, forman_orig_1, Coupling,
    CurvatureRecord,
};
use crate::prism::{EdgeClass, PrismComplex, WeightConfig};
use crate::{EXACT_TOL, WEIGHTED_TOL};

/// Default simplex-count cap for [`inclusion_exclusion_oracle`].
pub const ORACLE_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub hard: bool,
    pub population: usize,
    pub violations: usize,
    pub max_error: f64,
    pub notes: String,
}

impl CheckRecord {
    fn new(name: &str, hard: bool) -> Self {
        CheckRecord {
            name: name.to_string(),
            hard,
            population: 0,
            violations: 0,
            max_error: 0.0,
            notes: String::new(),
        }
    }

    /// Records one sample whose error must not exceed `tol`.
    fn observe(&mut self, error: f64, tol: f64) {
        self.population += 1;
        if error.is_nan() || error > tol {
            self.violations += 1;
        }
        if error > self.max_error || error.is_nan() {
            self.max_error = error;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussBonnetReport {
    /// Alternating curvature sum under unit weights.
    pub total_curvature: f64,
    pub chi_kst: i64,
    pub sum_chi_snapshots: i64,
    pub sum_chi_pairs: i64,
    pub residual_c1: i64,
    pub residual_c2: i64,
    pub oracle_chi: Option<i64>,
    pub notes: String,
}

/// Outcome of the monotonicity screening for one spatial edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCase {
    pub edge: SimplexId,
    pub a1: bool,
    pub a2: bool,
    pub n_prism_cofaces: usize,
    pub n_prism_parallels: usize,
    /// `F_KST − F_static` under unit weights.
    pub shift: f64,
}

impl MonotonicityCase {
    pub fn qualifies(&self) -> bool {
        self.a1 && self.a2
    }

    pub fn excess(&self) -> i64 {
        self.n_prism_cofaces as i64 - self.n_prism_parallels as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n_simplices: usize,
    pub counts_by_dim: Vec<usize>,
    pub checks: Vec<CheckRecord>,
    pub gauss_bonnet: GaussBonnetReport,
}

impl VerificationReport {
    /// True iff every hard check has zero violations.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.hard || c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_hard(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.hard && !c.passed()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Runs every check on `pc` (as weighted) and on a unit-weight copy of it.
pub fn run_suite(pc: &PrismComplex) -> VerificationReport {
    let unit = pc.reweighted(WeightConfig::unit()).expect("unit weights are valid");
    let records = curvature_records(pc);
    let mut checks = vec![
        uniform_agreement(&unit),
        spatial_agreement(&records),
        closed_form_magnitude(&records),
        bound_inequality(pc, &records),
        discrepancy_sign(&records),
        reduced_form(pc, &records),
    ];
    let weighted_coupling = coupling_table(pc);
    let unit_coupling = coupling_table(&unit);
    checks.push(coupling_identity(&weighted_coupling, &unit_coupling));
    let cases = monotonicity_cases(&unit, &unit_coupling);
    checks.push(monotonicity_identity(&cases));
    checks.push(monotonicity(&cases));
    checks.extend(prism_euler_checks(pc));
    let gauss_bonnet = gauss_bonnet_report(&unit);
    let mut gb = CheckRecord::new("inclusion_exclusion_oracle", true);
    match gauss_bonnet.oracle_chi {
        Some(o) => gb.observe((o - gauss_bonnet.chi_kst).abs() as f64, 0.0),
        None => gb.notes = gauss_bonnet.notes.clone(),
    }
    checks.push(gb);
    let mut total = CheckRecord::new("total_curvature_equals_euler", false);
    total.observe(
        (gauss_bonnet.total_curvature - gauss_bonnet.chi_kst as f64).abs(),
        WEIGHTED_TOL,
    );
    total.notes = format!(
        "alternating curvature sum {} vs chi {}",
        gauss_bonnet.total_curvature, gauss_bonnet.chi_kst
    );
    checks.push(total);

    let c = pc.complex();
    VerificationReport {
        n_simplices: c.len(),
        counts_by_dim: (0..=c.max_dim().unwrap_or(0)).map(|p| c.count(p)).collect(),
        checks,
        gauss_bonnet,
    }
}

fn uniform_agreement(unit: &PrismComplex) -> CheckRecord {
    let mut check = CheckRecord::new("uniform_agreement", true);
    for r in curvature_records(unit) {
        let closed = 2.0 + r.n_tri as f64 - r.n_par as f64;
        check.observe((r.forman - r.forman_aug).abs().max((r.forman - closed).abs()), EXACT_TOL);
    }
    check.notes = "unit weights: F = F_aug = 2 + |cof2| - |P|".into();
    check
}

fn spatial_agreement(records: &[CurvatureRecord]) -> CheckRecord {
    let mut check = CheckRecord::new("spatial_agreement", true);
    for r in records.iter().filter(|r| r.class == EdgeClass::Spatial) {
        check.observe(r.diff.abs(), WEIGHTED_TOL);
    }
    check
}

fn closed_form_magnitude(records: &[CurvatureRecord]) -> CheckRecord {
    let mut check = CheckRecord::new("closed_form_magnitude", true);
    for r in records {
        check.observe((r.diff.abs() - r.pred_abs_diff).abs(), WEIGHTED_TOL);
    }
    check
}

fn bound_inequality(pc: &PrismComplex, records: &[CurvatureRecord]) -> CheckRecord {
    let mut check = CheckRecord::new("discrepancy_bound", true);
    let mut min_slack = f64::INFINITY;
    for r in records {
        let bound = discrepancy_bound(pc.complex(), r.edge).expect("edge of the complex");
        let slack = bound - r.diff.abs();
        min_slack = min_slack.min(slack);
        check.observe((-slack).max(0.0), WEIGHTED_TOL);
    }
    if min_slack.is_finite() {
        check.notes = format!("minimum slack {min_slack:e}");
    }
    check
}

/// Report-only: which sign relation links `F − F_aug` to the signed closed form.
fn discrepancy_sign(records: &[CurvatureRecord]) -> CheckRecord {
    let mut check = CheckRecord::new("discrepancy_sign", false);
    let mut negated = 0usize;
    let mut same = 0usize;
    for r in records.iter().filter(|r| r.class != EdgeClass::Spatial && r.diff.abs() > WEIGHTED_TOL) {
        let err_neg = (r.diff + r.closed_form).abs();
        let err_same = (r.diff - r.closed_form).abs();
        if err_neg <= WEIGHTED_TOL {
            negated += 1;
        }
        if err_same <= WEIGHTED_TOL {
            same += 1;
        }
        check.observe(err_same, WEIGHTED_TOL);
    }
    let n = check.population;
    check.notes = format!(
        "non-spatial disagreeing edges: {negated}/{n} satisfy F - F_aug = -(closed form), \
         {same}/{n} satisfy F - F_aug = +(closed form)"
    );
    check
}

fn reduced_form(pc: &PrismComplex, records: &[CurvatureRecord]) -> CheckRecord {
    let mut check = CheckRecord::new("reduced_edge_form", true);
    for r in records {
        let reduced = forman_orig_1(pc.complex(), r.edge).expect("edge of the complex");
        check.observe((reduced - r.forman).abs(), WEIGHTED_TOL);
    }
    check
}

fn coupling_identity(weighted: &[Coupling], unit: &[Coupling]) -> CheckRecord {
    let mut check = CheckRecord::new("coupling_identity", true);
    for k in weighted.iter().chain(unit) {
        check.observe((k.f_kst - (k.f_static + k.delta_prism)).abs(), WEIGHTED_TOL);
    }
    check.notes = "spatial edges under the run weights and under unit weights".into();
    check
}

/// Screens every spatial edge of a unit-weight complex for the monotonicity hypotheses.
///
/// (A1): the node pair is an edge of the previous and the next active snapshot.
/// (A2): for every prism-origin parallel edge sharing `(x, t)` with `e` and ending
/// at `(y, s)`, the node set `e ∪ {y}` is a simplex of both `F_t` and `F_s`.
pub fn monotonicity_cases(unit: &PrismComplex, couplings: &[Coupling]) -> Vec<MonotonicityCase> {
    let c = unit.complex();
    let slices: Vec<i64> = unit.snapshots().iter().map(|s| s.slice).collect();
    let has = |slice: i64, nodes: &[NodeId]| -> bool {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let labels: Vec<_> = nodes.iter().map(|&n| crate::SpacetimeVertex::new(n, slice)).collect();
        unit.snapshot(slice).is_some_and(|s| s.complex.find(&labels).is_some())
    };
    couplings
        .iter()
        .map(|k| {
            let ends: Vec<_> = c.labels_of(k.edge).collect();
            let pair = [ends[0].node, ends[1].node];
            let rank = slices.binary_search(&k.slice).expect("active slice");
            let a1 = rank > 0
                && rank + 1 < slices.len()
                && has(slices[rank - 1], &pair)
                && has(slices[rank + 1], &pair);
            let a2 = k.prism_parallels.iter().all(|&p| {
                let far = c
                    .labels_of(p)
                    .find(|v| !ends.contains(v))
                    .expect("parallel edge has one endpoint off e");
                let nodes = [pair[0], pair[1], far.node];
                has(k.slice, &nodes) && has(far.slice, &nodes)
            });
            MonotonicityCase {
                edge: k.edge,
                a1,
                a2,
                n_prism_cofaces: k.prism_cofaces.len(),
                n_prism_parallels: k.prism_parallels.len(),
                shift: k.f_kst - k.f_static,
            }
        })
        .collect()
}

fn monotonicity_identity(cases: &[MonotonicityCase]) -> CheckRecord {
    let mut check = CheckRecord::new("monotonicity_identity", true);
    for m in cases {
        check.observe((m.shift - m.excess() as f64).abs(), 0.0);
    }
    check.notes = "unit weights: F_KST - F_static = |cof2_prism| - |P_prism| on every spatial edge".into();
    check
}

fn monotonicity(cases: &[MonotonicityCase]) -> CheckRecord {
    let mut check = CheckRecord::new("monotonicity", true);
    let mut worst = 0i64;
    for m in cases.iter().filter(|m| m.qualifies()) {
        check.observe((-m.excess()).max(0) as f64, 0.0);
        worst = worst.min(m.excess());
    }
    let a1_fail = cases.iter().filter(|m| !m.a1).count();
    let a2_fail = cases.iter().filter(|m| m.a1 && !m.a2).count();
    check.notes = format!(
        "{} qualifying of {} spatial edges; excluded: {a1_fail} fail A1, {a2_fail} pass A1 but fail A2; \
         smallest excess among qualifying {worst}",
        check.population,
        cases.len()
    );
    check
}

fn prism_euler_checks(pc: &PrismComplex) -> [CheckRecord; 2] {
    let c = pc.complex();
    let mut euler = CheckRecord::new("prism_euler", true);
    let mut ends = CheckRecord::new("prism_snapshot_euler", true);
    for &(lo, hi) in pc.pairs() {
        let shared = pc.persistent(lo, hi);
        for id in shared.ids() {
            let sigma: Vec<NodeId> = shared.labels_of(id).map(|v| v.node).collect();
            let ids = pc.prism_ids(&sigma, lo, hi).expect("prism stored in complex");
            euler.observe((euler_of(c, ids.iter().copied()) - 1).abs() as f64, 0.0);

            let mut by_slice: BTreeMap<i64, Vec<SimplexId>> = BTreeMap::new();
            for &s in &ids {
                let first = c.label(c.vertex_indices(s)[0]).slice;
                if c.labels_of(s).all(|v| v.slice == first) {
                    by_slice.entry(first).or_default().push(s);
                }
            }
            for slice in pc.snapshots().iter().map(|s| s.slice) {
                let chi = by_slice.get(&slice).map_or(0, |v| euler_of(c, v.iter().copied()));
                let expect = i64::from(slice == lo || slice == hi);
                ends.observe((chi - expect).abs() as f64, 0.0);
            }
        }
    }
    ends.notes = "chi of prism ∩ snapshot is 1 at the two end slices and 0 elsewhere".into();
    [euler, ends]
}

/// Gauss–Bonnet bookkeeping. `pc` should carry unit weights.
pub fn gauss_bonnet_report(pc: &PrismComplex) -> GaussBonnetReport {
    let c = pc.complex();
    let chi_kst = c.euler_characteristic();
    let sum_chi_snapshots: i64 = pc.snapshots().iter().map(|s| s.complex.euler_characteristic()).sum();
    let sum_chi_pairs: i64 = pc
        .pairs()
        .iter()
        .map(|&(lo, hi)| pc.persistent(lo, hi).euler_characteristic())
        .sum();
    let oracle = inclusion_exclusion_oracle(pc, ORACLE_CAP);
    let notes = match oracle {
        Some(_) => String::new(),
        None => format!("oracle skipped: {} simplices exceed the cap of {ORACLE_CAP}", c.len()),
    };
    GaussBonnetReport {
        total_curvature: alternating_sum(c),
        chi_kst,
        sum_chi_snapshots,
        sum_chi_pairs,
        residual_c1: chi_kst - sum_chi_snapshots + sum_chi_pairs,
        residual_c2: chi_kst - sum_chi_snapshots + 2 * sum_chi_pairs,
        oracle_chi: oracle,
        notes,
    }
}

/// Euler characteristic of the prism complex by inclusion–exclusion over the cover
/// made of the snapshots and the prism stacks. `None` when the complex exceeds `cap`.
pub fn inclusion_exclusion_oracle(pc: &PrismComplex, cap: usize) -> Option<i64> {
    let c = pc.complex();
    if c.len() > cap {
        return None;
    }
    let mut cover: Vec<Vec<SimplexId>> = Vec::new();
    for snap in pc.snapshots() {
        let ids: Vec<SimplexId> = c
            .ids()
            .filter(|&id| c.labels_of(id).all(|v| v.slice == snap.slice))
            .collect();
        cover.push(ids);
    }
    for &(lo, hi) in pc.pairs() {
        cover.push(pc.prism_stack(lo, hi).into_iter().collect());
    }
    let dims: Vec<usize> = c.ids().map(|id| c.dim(id)).collect();
    let chi = |ids: &[SimplexId]| -> i64 {
        ids.iter().map(|id| if dims[id.index()].is_multiple_of(2) { 1 } else { -1 }).sum()
    };
    let mut total = 0i64;
    // pruned walk: subsets are extended only while their intersection is nonempty
    let mut stack: Vec<(usize, Vec<SimplexId>, usize)> = cover
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(k, s)| (k, s.clone(), 1))
        .collect();
    while let Some((last, inter, size)) = stack.pop() {
        let sign = if size % 2 == 1 { 1 } else { -1 };
        total += sign * chi(&inter);
        for (k, set) in cover.iter().enumerate().skip(last + 1) {
            let next = intersect(&inter, set);
            if !next.is_empty() {
                stack.push((k, next, size + 1));
            }
        }
    }
    Some(total)
}

fn intersect(a: &[SimplexId], b: &[SimplexId]) -> Vec<SimplexId> {
    let bs: BTreeSet<_> = b.iter().collect();
    a.iter().copied().filter(|x| bs.contains(x)).collect()
}
