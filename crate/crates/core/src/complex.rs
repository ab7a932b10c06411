//! Weighted abstract simplicial complexes with face/coface adjacency.
//!
//! Simplices are canonical sorted vertex lists. A finished [`WeightedComplex`]
//! is immutable: ids are assigned in `(dimension, lexicographic)` order, so
//! iteration order and every derived output are deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::clique::maximal_cliques;
use crate::contact_stream::NodeId;
use crate::error::{Error, Result};

/// A node copy living in one time slice.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SpacetimeVertex {
    pub node: NodeId,
    pub slice: i64,
}

impl SpacetimeVertex {
    pub fn new(node: NodeId, slice: i64) -> Self {
        SpacetimeVertex { node, slice }
    }
}

impl fmt::Display for SpacetimeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.slice)
    }
}

/// A simplex as a strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<SpacetimeVertex>);

impl Simplex {
    /// Sorts the vertices; fails on an empty or repeated vertex list.
    pub fn new(mut vertices: Vec<SpacetimeVertex>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(
                "a simplex needs at least one vertex and no repeats",
            ));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[SpacetimeVertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimplexId(pub u32);

impl SimplexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Collects simplices and closes them under faces.
#[derive(Debug, Default, Clone)]
pub struct ComplexBuilder {
    simplices: HashSet<Vec<SpacetimeVertex>>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `vertices` (any order, no repeats) together with all of its faces.
    pub fn insert(&mut self, vertices: &[SpacetimeVertex]) {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !sorted.is_empty() {
            self.insert_sorted(sorted);
        }
    }

    fn insert_sorted(&mut self, simplex: Vec<SpacetimeVertex>) {
        if self.simplices.contains(&simplex) {
            // already present, so are all its faces
            return;
        }
        if simplex.len() > 1 {
            for skip in 0..simplex.len() {
                let face: Vec<_> = simplex
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, v)| *v)
                    .collect();
                self.insert_sorted(face);
            }
        }
        self.simplices.insert(simplex);
    }

    pub fn contains(&self, vertices: &[SpacetimeVertex]) -> bool {
        self.simplices.contains(vertices)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn build(self) -> WeightedComplex {
        WeightedComplex::from_closed_set(self.simplices)
    }
}

/// Immutable weighted simplicial complex.
#[derive(Debug, Clone)]
pub struct WeightedComplex {
    labels: Vec<SpacetimeVertex>,
    simplices: Vec<Box<[u32]>>,
    dim_offsets: Vec<usize>,
    index: HashMap<Box<[u32]>, SimplexId>,
    weights: Vec<f64>,
    faces: Vec<Vec<SimplexId>>,
    cofaces: Vec<Vec<SimplexId>>,
}

impl WeightedComplex {
    pub fn empty() -> Self {
        ComplexBuilder::new().build()
    }

    fn from_closed_set(set: HashSet<Vec<SpacetimeVertex>>) -> Self {
        let mut labels: Vec<SpacetimeVertex> = set
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| s[0])
            .collect();
        labels.sort_unstable();
        let label_index: HashMap<SpacetimeVertex, u32> = labels
            .iter()
            .enumerate()
            .map(|(k, v)| (*v, k as u32))
            .collect();

        let mut simplices: Vec<Box<[u32]>> = set
            .iter()
            .map(|s| s.iter().map(|v| label_index[v]).collect())
            .collect();
        simplices.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        let max_len = simplices.last().map_or(0, |s| s.len());
        let mut dim_offsets = vec![0usize; max_len + 1];
        for (p, off) in dim_offsets.iter_mut().enumerate() {
            *off = simplices.partition_point(|s| s.len() < p + 1);
        }

        let index: HashMap<Box<[u32]>, SimplexId> = simplices
            .iter()
            .enumerate()
            .map(|(k, s)| (s.clone(), SimplexId(k as u32)))
            .collect();

        let mut faces = vec![Vec::new(); simplices.len()];
        let mut cofaces = vec![Vec::new(); simplices.len()];
        let mut buf = Vec::new();
        for (k, s) in simplices.iter().enumerate() {
            if s.len() < 2 {
                continue;
            }
            for skip in 0..s.len() {
                buf.clear();
                buf.extend(s.iter().enumerate().filter(|&(q, _)| q != skip).map(|(_, v)| *v));
                let f = *index
                    .get(buf.as_slice())
                    .expect("builder guarantees face closure");
                faces[k].push(f);
                cofaces[f.index()].push(SimplexId(k as u32));
            }
            faces[k].sort_unstable();
        }

        WeightedComplex {
            labels,
            weights: vec![1.0; simplices.len()],
            simplices,
            dim_offsets,
            index,
            faces,
            cofaces,
        }
    }

    /// Number of simplices of every dimension.
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Highest simplex dimension, `None` for the empty complex.
    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.last().map(|s| s.len() - 1)
    }

    /// Simplex count in dimension `p`.
    pub fn count(&self, p: usize) -> usize {
        let r = self.dim_range(p);
        r.end - r.start
    }

    fn dim_range(&self, p: usize) -> std::ops::Range<usize> {
        if p + 1 >= self.dim_offsets.len() {
            return self.simplices.len()..self.simplices.len();
        }
        self.dim_offsets[p]..self.dim_offsets[p + 1]
    }

    pub fn ids(&self) -> impl Iterator<Item = SimplexId> + '_ {
        (0..self.simplices.len() as u32).map(SimplexId)
    }

    pub fn ids_of_dim(&self, p: usize) -> impl Iterator<Item = SimplexId> + '_ {
        self.dim_range(p).map(|k| SimplexId(k as u32))
    }

    pub fn dim(&self, id: SimplexId) -> usize {
        self.simplices[id.index()].len() - 1
    }

    /// Vertex indices of a simplex (indices into [`Self::vertex_labels`]).
    pub fn vertex_indices(&self, id: SimplexId) -> &[u32] {
        &self.simplices[id.index()]
    }

    pub fn vertex_labels(&self) -> &[SpacetimeVertex] {
        &self.labels
    }

    pub fn label(&self, vertex_index: u32) -> SpacetimeVertex {
        self.labels[vertex_index as usize]
    }

    pub fn labels_of(&self, id: SimplexId) -> impl Iterator<Item = SpacetimeVertex> + '_ {
        self.simplices[id.index()].iter().map(|&v| self.labels[v as usize])
    }

    pub fn simplex(&self, id: SimplexId) -> Simplex {
        Simplex(self.labels_of(id).collect())
    }

    pub fn vertex_index(&self, v: SpacetimeVertex) -> Option<u32> {
        self.labels.binary_search(&v).ok().map(|k| k as u32)
    }

    /// Looks up a simplex by its sorted vertex indices.
    pub fn find_indices(&self, sorted: &[u32]) -> Option<SimplexId> {
        self.index.get(sorted).copied()
    }

    /// Looks up a simplex by its vertex labels (any order).
    pub fn find(&self, vertices: &[SpacetimeVertex]) -> Option<SimplexId> {
        let mut idx: Vec<u32> = vertices
            .iter()
            .map(|v| self.vertex_index(*v))
            .collect::<Option<_>>()?;
        idx.sort_unstable();
        self.find_indices(&idx)
    }

    pub fn id_of(&self, simplex: &Simplex) -> Result<SimplexId> {
        self.find(simplex.vertices())
            .ok_or_else(|| Error::Lookup(simplex.to_string()))
    }

    pub fn contains(&self, simplex: &Simplex) -> bool {
        self.find(simplex.vertices()).is_some()
    }

    pub fn weight(&self, id: SimplexId) -> f64 {
        self.weights[id.index()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Codimension-1 faces, ascending id.
    pub fn faces(&self, id: SimplexId) -> &[SimplexId] {
        &self.faces[id.index()]
    }

    /// Codimension-1 cofaces, ascending id.
    pub fn cofaces(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofaces[id.index()]
    }

    /// Replaces all weights; every weight must be positive and finite.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.simplices.len() {
            return Err(Error::domain(format!(
                "expected {} weights, got {}",
                self.simplices.len(),
                weights.len()
            )));
        }
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::domain(format!(
                "weight of simplex {} must be positive, got {w}",
                self.simplex(SimplexId(k as u32))
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Copy with every weight set to 1.
    pub fn unit_weighted(&self) -> Self {
        let mut c = self.clone();
        c.weights.iter_mut().for_each(|w| *w = 1.0);
        c
    }

    /// Copy with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let w = self.weights.iter().map(|w| w * factor).collect();
        self.clone().with_weights(w)
    }

    /// Sub-complex of the simplices satisfying `keep`, weights preserved.
    /// `keep` must be closed under taking faces.
    pub fn restrict(&self, mut keep: impl FnMut(&Self, SimplexId) -> bool) -> Self {
        let mut set = HashSet::new();
        let mut weights = HashMap::new();
        for id in self.ids() {
            if keep(self, id) {
                let s: Vec<_> = self.labels_of(id).collect();
                weights.insert(s.clone(), self.weight(id));
                set.insert(s);
            }
        }
        debug_assert!(set.iter().all(|s| s.len() < 2
            || (0..s.len()).all(|k| {
                let mut f = s.clone();
                f.remove(k);
                set.contains(&f)
            })));
        let mut sub = Self::from_closed_set(set);
        let w: Vec<f64> = sub
            .ids()
            .map(|id| weights[&sub.labels_of(id).collect::<Vec<_>>()])
            .collect();
        sub.weights = w;
        sub
    }

    /// `Σ_p (−1)^p |K^(p)|`.
    pub fn euler_characteristic(&self) -> i64 {
        euler_of_dims(self.simplices.iter().map(|s| s.len() - 1))
    }

    /// True when every face of every simplex is present.
    pub fn is_face_closed(&self) -> bool {
        self.ids().all(|id| {
            let s = self.vertex_indices(id);
            s.len() < 2
                || (0..s.len()).all(|skip| {
                    let f: Vec<u32> = s
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, v)| *v)
                        .collect();
                    self.index.contains_key(f.as_slice())
                })
        })
    }

    /// True when face and coface lists mirror each other.
    pub fn adjacency_consistent(&self) -> bool {
        self.ids().all(|id| {
            self.faces(id)
                .iter()
                .all(|f| self.cofaces(*f).contains(&id))
                && self
                    .cofaces(id)
                    .iter()
                    .all(|c| self.faces(*c).contains(&id))
                && self.faces(id).len() == if self.dim(id) == 0 { 0 } else { self.dim(id) + 1 }
        })
    }

    /// One simplex per line: `dim  v0 v1 ...  weight` with vertices as `node:slice`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in self.ids() {
            let _ = write!(out, "{} ", self.dim(id));
            for v in self.labels_of(id) {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, "  {}", self.weight(id));
        }
        out
    }

    /// Node sets of all simplices (slice coordinates dropped).
    pub fn node_sets(&self) -> BTreeSet<Vec<NodeId>> {
        self.ids().map(|id| node_set(self, id)).collect()
    }
}

pub(crate) fn node_set(c: &WeightedComplex, id: SimplexId) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = c.labels_of(id).map(|v| v.node).collect();
    nodes.sort_unstable();
    nodes
}

/// Euler characteristic of a collection of simplices given by dimension.
pub fn euler_of_dims(dims: impl IntoIterator<Item = usize>) -> i64 {
    dims.into_iter()
        .map(|d| if d % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// Euler characteristic of a selection of simplices of `complex`.
pub fn euler_of(complex: &WeightedComplex, ids: impl IntoIterator<Item = SimplexId>) -> i64 {
    euler_of_dims(ids.into_iter().map(|id| complex.dim(id)))
}

/// Flag (clique) complex of an undirected edge set, optionally truncated at `max_dim`.
pub fn flag_complex(
    edges: &[(SpacetimeVertex, SpacetimeVertex)],
    max_dim: Option<usize>,
) -> WeightedComplex {
    let mut vertices: Vec<SpacetimeVertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let pos: BTreeMap<SpacetimeVertex, usize> =
        vertices.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let mut adj = vec![BTreeSet::new(); vertices.len()];
    for &(a, b) in edges {
        if a != b {
            adj[pos[&a]].insert(pos[&b]);
            adj[pos[&b]].insert(pos[&a]);
        }
    }

    let mut builder = ComplexBuilder::new();
    for clique in maximal_cliques(&adj) {
        let labels: Vec<SpacetimeVertex> = clique.iter().map(|&k| vertices[k]).collect();
        match max_dim {
            Some(d) if labels.len() > d + 1 => {
                for_each_combination(labels.len(), d + 1, |pick| {
                    let sub: Vec<_> = pick.iter().map(|&k| labels[k]).collect();
                    builder.insert(&sub);
                });
            }
            _ => builder.insert(&labels),
        }
    }
    builder.build()
}

pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        f(&pick);
        let Some(pos) = (0..k).rev().find(|&q| pick[q] != q + n - k) else {
            return;
        };
        pick[pos] += 1;
        for q in pos + 1..k {
            pick[q] = pick[q - 1] + 1;
        }
    }
}

/// Simplices of `a` whose node set also occurs in `b`, embedded at `a`'s vertices.
pub fn persistent_complex(a: &WeightedComplex, b: &WeightedComplex) -> WeightedComplex {
    let in_b = b.node_sets();
    a.restrict(|c, id| in_b.contains(&node_set(c, id)))
}

/// Edges parallel to the 1-simplex `e`: sharing a vertex but no 2-simplex.
pub fn parallels_1(complex: &WeightedComplex, e: SimplexId) -> Result<Vec<SimplexId>> {
    if complex.dim(e) != 1 {
        return Err(Error::domain("parallels_1 expects a 1-simplex"));
    }
    let ends = complex.vertex_indices(e);
    let (a, b) = (ends[0], ends[1]);
    let mut out = Vec::new();
    for shared in [a, b] {
        let vid = complex
            .find_indices(&[shared])
            .expect("endpoint of a stored edge");
        for &f in complex.cofaces(vid) {
            if f == e {
                continue;
            }
            let fv = complex.vertex_indices(f);
            let x = if fv[0] == shared { fv[1] } else { fv[0] };
            let mut tri = [a, b, x];
            tri.sort_unstable();
            if complex.find_indices(&tri).is_none() {
                out.push(f);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Same-dimension simplices satisfying exactly one of: a shared codimension-1
/// coface (A) or a shared codimension-1 face (B).
pub fn parallels_p(complex: &WeightedComplex, alpha: SimplexId) -> Vec<SimplexId> {
    let mut candidates = BTreeSet::new();
    for &beta in complex.cofaces(alpha) {
        candidates.extend(complex.faces(beta).iter().copied());
    }
    for &gamma in complex.faces(alpha) {
        candidates.extend(complex.cofaces(gamma).iter().copied());
    }
    candidates.remove(&alpha);
    candidates
        .into_iter()
        .filter(|&other| {
            let (a, b) = shared_neighbourhood(complex, alpha, other);
            a.is_empty() != b.is_empty()
        })
        .collect()
}

/// Common codimension-1 cofaces and common codimension-1 faces of two same-dimension simplices.
pub(crate) fn shared_neighbourhood(
    complex: &WeightedComplex,
    alpha: SimplexId,
    other: SimplexId,
) -> (Vec<SimplexId>, Vec<SimplexId>) {
    let other_cofaces = complex.cofaces(other);
    let common_cofaces = complex
        .cofaces(alpha)
        .iter()
        .filter(|c| other_cofaces.contains(c))
        .copied()
        .collect();
    let other_faces = complex.faces(other);
    let common_faces = complex
        .faces(alpha)
        .iter()
        .filter(|f| other_faces.contains(f))
        .copied()
        .collect();
    (common_cofaces, common_faces)
}
