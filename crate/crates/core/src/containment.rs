//! Spanning-subgraph containment between graphs of equal order.

use crate::error::{Error, Result};
use crate::graph::{SmallGraph, MAX_ORDER};

/// True iff some bijection maps every edge of `pattern` onto an edge of
/// `host`. Extra host edges are allowed.
pub fn contains_spanning(host: &SmallGraph, pattern: &SmallGraph) -> Result<bool> {
    let n = host.order();
    if pattern.order() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: pattern.order(),
        });
    }
    Ok(contains_unchecked(host, pattern))
}

/// Sorted degree sequences: pattern must be dominated entry by entry.
fn degree_dominated(host: &SmallGraph, pattern: &SmallGraph) -> bool {
    host.degree_sequence()
        .iter()
        .zip(pattern.degree_sequence())
        .all(|(&h, p)| h >= p)
}

pub(crate) fn contains_unchecked(host: &SmallGraph, pattern: &SmallGraph) -> bool {
    let n = host.order();
    if pattern.edge_count() > host.edge_count() || !degree_dominated(host, pattern) {
        return false;
    }
    // Pattern vertices in an order where each has as many earlier neighbours
    // as possible: start at the highest degree, then grow greedily.
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u16;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed & (1 << v) == 0)
            .max_by_key(|&v| {
                (
                    (pattern.neighbors(v) & placed).count_ones(),
                    pattern.degree(v),
                    std::cmp::Reverse(v),
                )
            })
            .expect("unplaced vertex");
        placed |= 1 << next;
        order.push(next);
    }
    let mut image = [0u8; MAX_ORDER];
    backtrack(host, pattern, &order, 0, 0, &mut image)
}

fn backtrack(
    host: &SmallGraph,
    pattern: &SmallGraph,
    order: &[usize],
    depth: usize,
    used: u16,
    image: &mut [u8; MAX_ORDER],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let x = order[depth];
    let need = pattern.degree(x);
    // Host vertex must be adjacent to the images of all earlier neighbours.
    let mut allowed = !used & crate::graph::full_mask(host.order());
    for &y in &order[..depth] {
        if pattern.has_edge(x, y) {
            allowed &= host.neighbors(image[y] as usize);
        }
    }
    while allowed != 0 {
        let h = allowed.trailing_zeros() as usize;
        allowed &= allowed - 1;
        if host.degree(h) < need {
            continue;
        }
        image[x] = h as u8;
        if backtrack(host, pattern, order, depth + 1, used | (1 << h), image) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::num_pairs;
    use crate::reference::contains_by_permutations;

    fn p3() -> SmallGraph {
        SmallGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn examples() {
        let k3 = SmallGraph::complete(3).unwrap();
        assert!(contains_spanning(&k3, &p3()).unwrap());
        assert!(contains_spanning(&p3(), &p3()).unwrap());
        assert!(!contains_spanning(&p3(), &k3).unwrap());
        assert!(contains_spanning(&k3, &SmallGraph::complete(4).unwrap()).is_err());
    }

    #[test]
    fn agrees_with_permutation_oracle_up_to_order_5() {
        for n in 1..=5 {
            let l = num_pairs(n);
            let graphs: Vec<_> = (0u128..(1 << l))
                .map(|b| SmallGraph::from_edge_bits(n, b).unwrap())
                .collect();
            for h in &graphs {
                for p in &graphs {
                    assert_eq!(
                        contains_spanning(h, p).unwrap(),
                        contains_by_permutations(h, p),
                        "host {h:?} pattern {p:?}"
                    );
                }
            }
        }
    }
}
