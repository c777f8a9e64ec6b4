//! Slow, literal evaluators of the subset indicator and the objective.
//!
//! These try every vertex permutation of the pattern and read coloring bits
//! directly, with no canonical forms or lookup tables. They exist as an
//! independent oracle for the fast paths and are only practical for patterns
//! of order 7 or less.

use crate::error::{Error, Result};
use crate::graph::{Coloring, SmallGraph, VertexSubset};

/// Calls `f` on every permutation of `0..n` (Heap's algorithm) until it
/// returns true.
pub fn any_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut perm: Vec<usize> = (0..n).collect();
    if f(&perm) {
        return true;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if f(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Disjunction over all `pi` of the conjunction over pattern edges `{i, j}`
/// of `host` having edge `{pi(i), pi(j)}`.
pub fn contains_by_permutations(host: &SmallGraph, pattern: &SmallGraph) -> bool {
    if host.order() != pattern.order() {
        return false;
    }
    let edges = pattern.edges();
    any_permutation(pattern.order(), |pi| {
        edges.iter().all(|&(i, j)| host.has_edge(pi[i], pi[j]))
    })
}

fn indicator(e: &Coloring, s: &VertexSubset, pattern: &SmallGraph, want: bool) -> Result<bool> {
    if s.len() != pattern.order() {
        return Err(Error::SizeMismatch {
            expected: pattern.order(),
            actual: s.len(),
        });
    }
    if s.parent_order() != e.order() {
        return Err(Error::SizeMismatch {
            expected: e.order(),
            actual: s.parent_order(),
        });
    }
    let members: Vec<usize> = s.members().collect();
    let edges = pattern.edges();
    Ok(any_permutation(pattern.order(), |pi| {
        edges.iter().all(|&(i, j)| {
            let (a, b) = (members[pi[i]], members[pi[j]]);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            e.edge(a, b).expect("members are in range") == want
        })
    }))
}

/// Red indicator: some relabelling of `g` lands on red edges only.
pub fn red_indicator(e: &Coloring, s: &VertexSubset, g: &SmallGraph) -> Result<bool> {
    indicator(e, s, g, true)
}

/// Blue indicator: the same test on the complemented bits.
pub fn blue_indicator(e: &Coloring, s: &VertexSubset, h: &SmallGraph) -> Result<bool> {
    indicator(e, s, h, false)
}

/// Every `k`-subset of `1..=n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i + 1 {
                cur[i] += 1;
                for t in (i + 1)..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// (red, blue) subset counts by summing the literal indicators.
pub fn objective_literal(e: &Coloring, g: &SmallGraph, h: &SmallGraph) -> Result<(u64, u64)> {
    let n = e.order();
    let mut red = 0;
    for m in subsets(n, g.order()) {
        red += red_indicator(e, &VertexSubset::new(n, &m)?, g)? as u64;
    }
    let mut blue = 0;
    for m in subsets(n, h.order()) {
        blue += blue_indicator(e, &VertexSubset::new(n, &m)?, h)? as u64;
    }
    Ok((red, blue))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_listing() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(5, 3)[0], vec![1, 2, 3]);
        assert_eq!(subsets(5, 3).last().unwrap(), &vec![3, 4, 5]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn pentagon_is_triangle_free_in_both_colors() {
        let c5 = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let e = Coloring::from_red_graph(&c5);
        let k3 = SmallGraph::complete(3).unwrap();
        assert_eq!(objective_literal(&e, &k3, &k3).unwrap(), (0, 0));
    }
}
