//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting).

use std::collections::BTreeSet;

/// Enumerates the maximal cliques of an undirected graph given as adjacency
/// sets over vertices `0..adj.len()`. Isolated vertices are reported as
/// singleton cliques. Each clique is sorted; the outer list is sorted too.
pub fn maximal_cliques(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: BTreeSet<usize> = (0..adj.len()).collect();
    expand(adj, &mut r, p, BTreeSet::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn expand(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    // pivot maximizing |P ∩ N(u)|
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| (p.intersection(&adj[u]).count(), std::cmp::Reverse(u)))
        .expect("P is non-empty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        r.push(v);
        expand(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}
