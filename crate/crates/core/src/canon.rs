//! Canonical labelling of small graphs.
//!
//! Equitable partition refinement followed by a depth-first search over
//! individualisation choices. Leaves are compared by the relabelled edge
//! bitstring and the maximum wins. Automorphisms discovered at equivalent
//! leaves prune the tree two ways: sibling children in the same orbit of the
//! path stabiliser are skipped, and an equivalence with the first or best
//! leaf jumps back to the node where the two paths diverge.
//!
//! The refinement splits cells in place and individualised vertices are
//! placed at the front of their cell, so positions in the ordered partition
//! are isomorphism-invariant. That is what makes the jump-back rule sound.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{num_pairs, SmallGraph, MAX_ORDER};

/// Order-invariant fingerprint of an isomorphism class: the graph order and
/// the edge bitstring (lexicographic pair order) of the canonical relabelling.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    order: u8,
    bits: u128,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// The canonical representative itself.
    pub fn graph(&self) -> SmallGraph {
        SmallGraph::from_edge_bits_unchecked(self.order(), self.bits)
    }

    pub(crate) fn from_parts(order: usize, bits: u128) -> Self {
        Self {
            order: order as u8,
            bits,
        }
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(n={}, {:#x})", self.order, self.bits)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = num_pairs(self.order());
        let s: String = (0..l)
            .map(|k| if (self.bits >> k) & 1 == 1 { '1' } else { '0' })
            .collect();
        write!(f, "{}:{}", self.order, s)
    }
}

type Lab = [u8; MAX_ORDER];

/// Result of a canonical labelling run.
#[derive(Clone, Debug)]
pub struct Labelling {
    order: usize,
    bits: u128,
    /// `lab[i]` is the original vertex placed at canonical position `i`.
    lab: Lab,
    generators: Vec<Lab>,
}

impl Labelling {
    pub fn form(&self) -> CanonicalForm {
        CanonicalForm::from_parts(self.order, self.bits)
    }

    /// Original vertex at canonical position `i`.
    pub fn vertex_at(&self, i: usize) -> usize {
        self.lab[i] as usize
    }

    /// Canonical position of original vertex `v`.
    pub fn position_of(&self, v: usize) -> usize {
        self.lab[..self.order]
            .iter()
            .position(|&x| x as usize == v)
            .expect("vertex in labelling")
    }

    /// Automorphism generators as 0-based image arrays.
    pub fn generators(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.generators.iter().map(|g| &g[..self.order])
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Vertex orbits of the automorphism group, as a representative per vertex
    /// (the smallest vertex of its orbit).
    pub fn vertex_orbits(&self) -> Vec<usize> {
        orbits(&self.generators, self.order, |_| true)
            .iter()
            .map(|&x| x as usize)
            .collect()
    }

    /// Whether some automorphism maps edge `{a, b}` onto edge `{c, d}`.
    pub fn same_edge_orbit(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        let key = |u: usize, v: usize| -> u8 {
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            (u * MAX_ORDER + v) as u8
        };
        let target = key(c, d);
        let start = key(a, b);
        if start == target {
            return true;
        }
        if self.generators.is_empty() {
            return false;
        }
        let mut seen = [false; MAX_ORDER * MAX_ORDER];
        let mut stack = vec![(a.min(b), a.max(b))];
        seen[start as usize] = true;
        while let Some((u, v)) = stack.pop() {
            for g in &self.generators {
                let (x, y) = (g[u] as usize, g[v] as usize);
                let k = key(x, y);
                if k == target {
                    return true;
                }
                if !seen[k as usize] {
                    seen[k as usize] = true;
                    stack.push((x.min(y), x.max(y)));
                }
            }
        }
        false
    }
}

/// Union-find orbits of the group generated by the generators accepted by
/// `keep`; entry `v` is the minimum vertex of `v`'s orbit.
fn orbits(gens: &[Lab], n: usize, keep: impl Fn(&Lab) -> bool) -> Lab {
    let mut parent: Lab = [0; MAX_ORDER];
    for (v, p) in parent.iter_mut().enumerate().take(n) {
        *p = v as u8;
    }
    fn find(parent: &mut Lab, mut x: u8) -> u8 {
        while parent[x as usize] != x {
            let p = parent[x as usize];
            parent[x as usize] = parent[p as usize];
            x = p;
        }
        x
    }
    for g in gens.iter().filter(|g| keep(g)) {
        for v in 0..n {
            let a = find(&mut parent, v as u8);
            let b = find(&mut parent, g[v]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut out: Lab = [0; MAX_ORDER];
    for v in 0..n {
        out[v] = find(&mut parent, v as u8);
    }
    out
}

/// Ordered partition of vertex positions: `lab` lists vertices, bit `i` of
/// `starts` marks position `i` as the first of a cell.
#[derive(Clone, Copy)]
struct Partition {
    lab: Lab,
    starts: u32,
}

impl Partition {
    #[inline]
    fn cell_end(&self, s: usize, n: usize) -> usize {
        let rest = self.starts >> (s + 1);
        if rest == 0 {
            n
        } else {
            s + 1 + rest.trailing_zeros() as usize
        }
    }

    #[inline]
    fn is_discrete(&self, n: usize) -> bool {
        self.starts.count_ones() as usize == n
    }
}

/// Refines `p` to the coarsest equitable partition finer than it, using the
/// cells flagged in `active` as initial splitters.
fn refine(rows: &[u16; MAX_ORDER], n: usize, p: &mut Partition, mut active: u32) {
    while active != 0 {
        let ws = active.trailing_zeros() as usize;
        active &= active - 1;
        let we = p.cell_end(ws, n);
        let mut wmask = 0u16;
        for &v in &p.lab[ws..we] {
            wmask |= 1 << v;
        }
        // Split every non-singleton cell by neighbour count into W.
        let mut s = 0;
        while s < n {
            let e = p.cell_end(s, n);
            if e - s > 1 {
                let mut counts = [0u8; MAX_ORDER];
                let mut same = true;
                let first = (p.rows_count(rows, s, wmask)) as u8;
                for i in s..e {
                    let c = (rows[p.lab[i] as usize] & wmask).count_ones() as u8;
                    counts[i] = c;
                    same &= c == first;
                }
                if !same {
                    // Stable insertion sort of the cell by count.
                    for i in (s + 1)..e {
                        let (cv, lv) = (counts[i], p.lab[i]);
                        let mut j = i;
                        while j > s && counts[j - 1] > cv {
                            counts[j] = counts[j - 1];
                            p.lab[j] = p.lab[j - 1];
                            j -= 1;
                        }
                        counts[j] = cv;
                        p.lab[j] = lv;
                    }
                    for i in (s + 1)..e {
                        if counts[i] != counts[i - 1] {
                            p.starts |= 1 << i;
                            active |= 1 << i;
                        }
                    }
                    active |= 1 << s;
                }
            }
            s = e;
        }
    }
}

impl Partition {
    #[inline]
    fn rows_count(&self, rows: &[u16; MAX_ORDER], s: usize, wmask: u16) -> u32 {
        (rows[self.lab[s] as usize] & wmask).count_ones()
    }
}

#[inline]
fn leaf_bits(rows: &[u16; MAX_ORDER], n: usize, lab: &Lab) -> u128 {
    let mut bits = 0u128;
    let mut k = 0;
    for i in 0..n {
        let r = rows[lab[i] as usize];
        for j in (i + 1)..n {
            bits |= (((r >> lab[j]) & 1) as u128) << k;
            k += 1;
        }
    }
    bits
}

struct Leaf {
    bits: u128,
    lab: Lab,
    path: Vec<u8>,
}

struct Search<'a> {
    rows: &'a [u16; MAX_ORDER],
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Lab>,
    path: Vec<u8>,
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    fn automorphism(&mut self, from: &Lab, to: &Lab) {
        let mut g: Lab = [0; MAX_ORDER];
        for i in 0..self.n {
            g[from[i] as usize] = to[i];
        }
        if (0..self.n).any(|v| g[v] as usize != v) {
            self.gens.push(g);
        }
    }

    /// Returns `Some(d)` to unwind to the node at depth `d`.
    fn leaf(&mut self, p: &Partition) -> Option<usize> {
        let bits = leaf_bits(self.rows, self.n, &p.lab);
        let Some(first) = &self.first else {
            let leaf = Leaf {
                bits,
                lab: p.lab,
                path: self.path.clone(),
            };
            self.best = Some(Leaf {
                bits,
                lab: p.lab,
                path: self.path.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if bits == first.bits {
            let (flab, d) = (first.lab, common_prefix(&first.path, &self.path));
            self.automorphism(&flab, &p.lab);
            return Some(d);
        }
        let best = self.best.as_ref().expect("best set with first");
        match bits.cmp(&best.bits) {
            Ordering::Greater => {
                self.best = Some(Leaf {
                    bits,
                    lab: p.lab,
                    path: self.path.clone(),
                });
                None
            }
            Ordering::Equal => {
                let (blab, d) = (best.lab, common_prefix(&best.path, &self.path));
                self.automorphism(&blab, &p.lab);
                Some(d)
            }
            Ordering::Less => None,
        }
    }

    fn node(&mut self, p: &Partition, depth: usize) -> Option<usize> {
        let n = self.n;
        if p.is_discrete(n) {
            return self.leaf(p);
        }
        // Target: first non-singleton cell.
        let mut s = 0;
        let mut e = p.cell_end(0, n);
        while e - s == 1 {
            s = e;
            e = p.cell_end(s, n);
        }
        let mut explored = 0u16;
        let mut cell = [0u8; MAX_ORDER];
        let len = e - s;
        cell[..len].copy_from_slice(&p.lab[s..e]);
        cell[..len].sort_unstable();
        for &v in &cell[..len] {
            if explored != 0 && !self.gens.is_empty() {
                let path = &self.path;
                let orb = orbits(&self.gens, n, |g| path.iter().all(|&x| g[x as usize] == x));
                let rep = orb[v as usize];
                let mut ex = explored;
                let mut hit = false;
                while ex != 0 {
                    let w = ex.trailing_zeros() as usize;
                    if orb[w] == rep {
                        hit = true;
                        break;
                    }
                    ex &= ex - 1;
                }
                if hit {
                    continue;
                }
            }
            let mut child = *p;
            let pos = s + child.lab[s..e].iter().position(|&x| x == v).unwrap();
            child.lab.swap(s, pos);
            child.starts |= 1 << (s + 1);
            refine(self.rows, n, &mut child, 1 << s);
            self.path.push(v);
            let r = self.node(&child, depth + 1);
            self.path.pop();
            explored |= 1 << v;
            if let Some(d) = r {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }
}

/// Canonical labelling with automorphism generators.
pub fn canonical_labelling(g: &SmallGraph) -> Labelling {
    let n = g.order();
    let rows = g.row_array();
    let mut lab: Lab = [0; MAX_ORDER];
    for (i, x) in lab.iter_mut().enumerate().take(n) {
        *x = i as u8;
    }
    let mut root = Partition { lab, starts: 1 };
    refine(rows, n, &mut root, 1);
    let mut search = Search {
        rows,
        n,
        first: None,
        best: None,
        gens: Vec::new(),
        path: Vec::with_capacity(n),
    };
    search.node(&root, 0);
    let best = search.best.expect("search visits at least one leaf");
    Labelling {
        order: n,
        bits: best.bits,
        lab: best.lab,
        generators: search.gens,
    }
}

/// Canonical form by refinement and search. Equal for two graphs exactly when
/// they are isomorphic.
pub fn canonical_form(g: &SmallGraph) -> CanonicalForm {
    let n = g.order();
    if n <= 1 {
        return CanonicalForm::from_parts(n, 0);
    }
    canonical_labelling(g).form()
}

/// Canonical form as the maximum relabelled bitstring over all `n!`
/// permutations. Only for `n <= 8`; used to cross-check [`canonical_form`].
pub fn canonical_form_brute(g: &SmallGraph) -> Result<CanonicalForm> {
    let n = g.order();
    if n > 8 {
        return Err(Error::OrderOutOfRange(n));
    }
    let rows = g.row_array();
    let mut lab: Lab = [0; MAX_ORDER];
    for (i, x) in lab.iter_mut().enumerate().take(n) {
        *x = i as u8;
    }
    let mut best = leaf_bits(rows, n, &lab);
    // Heap's algorithm.
    let mut c = [0usize; MAX_ORDER];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                lab.swap(0, i);
            } else {
                lab.swap(c[i], i);
            }
            best = best.max(leaf_bits(rows, n, &lab));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(CanonicalForm::from_parts(n, best))
}

/// True iff the graphs are isomorphic; graphs of different order never are.
pub fn is_isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    if a.order() != b.order() || a.edge_count() != b.edge_count() {
        return false;
    }
    if a.degree_sequence() != b.degree_sequence() {
        return false;
    }
    canonical_form(a) == canonical_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Permutation;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_graphs(n: usize) -> impl Iterator<Item = SmallGraph> {
        let l = num_pairs(n);
        (0u128..(1u128 << l)).map(move |b| SmallGraph::from_edge_bits(n, b).unwrap())
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> SmallGraph {
        let l = num_pairs(n);
        let bits = if l == 0 {
            0
        } else {
            rng.gen::<u128>() & ((1u128 << l) - 1)
        };
        SmallGraph::from_edge_bits(n, bits).unwrap()
    }

    fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Permutation::new(v).unwrap()
    }

    #[test]
    fn class_counts_match_known_values() {
        use std::collections::HashSet;
        for (n, expect) in [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34), (6, 156)] {
            let forms: HashSet<_> = all_graphs(n).map(|g| canonical_form(&g)).collect();
            assert_eq!(forms.len(), expect, "order {n}");
        }
    }

    #[test]
    fn refined_and_brute_partition_agree_up_to_order_6() {
        use std::collections::HashMap;
        for n in 1..=6 {
            let mut fwd: HashMap<CanonicalForm, CanonicalForm> = HashMap::new();
            let mut back: HashMap<CanonicalForm, CanonicalForm> = HashMap::new();
            for g in all_graphs(n) {
                let a = canonical_form(&g);
                let b = canonical_form_brute(&g).unwrap();
                assert_eq!(*fwd.entry(a).or_insert(b), b);
                assert_eq!(*back.entry(b).or_insert(a), a);
            }
        }
    }

    #[test]
    fn refined_and_brute_agree_on_random_graphs_up_to_8() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 7..=8 {
            for _ in 0..60 {
                let g = random_graph(&mut rng, n);
                let h = g.permuted(&random_perm(&mut rng, n)).unwrap();
                assert_eq!(canonical_form(&g), canonical_form(&h));
                assert_eq!(
                    canonical_form_brute(&g).unwrap(),
                    canonical_form_brute(&h).unwrap()
                );
            }
        }
    }

    #[test]
    fn invariant_under_relabelling_orders_3_to_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=16 {
            for _ in 0..100 {
                let g = random_graph(&mut rng, n);
                let h = g.permuted(&random_perm(&mut rng, n)).unwrap();
                assert_eq!(canonical_form(&g), canonical_form(&h), "n={n}");
            }
        }
    }

    #[test]
    fn symmetric_graphs_terminate_quickly() {
        for n in 1..=16 {
            let e = SmallGraph::empty(n).unwrap();
            let k = SmallGraph::complete(n).unwrap();
            assert_eq!(canonical_form(&e).bits(), 0);
            assert_eq!(canonical_form(&k).graph(), k);
        }
        // Disjoint triangles and a 16-cycle.
        let tri: Vec<_> = (0..5)
            .flat_map(|t| {
                [
                    (3 * t, 3 * t + 1),
                    (3 * t + 1, 3 * t + 2),
                    (3 * t, 3 * t + 2),
                ]
            })
            .collect();
        let g = SmallGraph::from_edges(15, &tri).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = g.permuted(&random_perm(&mut rng, 15)).unwrap();
        assert_eq!(canonical_form(&g), canonical_form(&h));
        let cyc: Vec<_> = (0..16).map(|i| (i, (i + 1) % 16)).collect();
        let c = SmallGraph::from_edges(16, &cyc).unwrap();
        let d = c.permuted(&random_perm(&mut rng, 16)).unwrap();
        assert_eq!(canonical_form(&c), canonical_form(&d));
    }

    fn brute_automorphisms(g: &SmallGraph) -> Vec<Vec<usize>> {
        use itertools_free_perms::permutations;
        permutations(g.order())
            .into_iter()
            .filter(|p| {
                let perm = Permutation::new(p.clone()).unwrap();
                g.permuted(&perm).unwrap() == *g
            })
            .collect()
    }

    mod itertools_free_perms {
        pub fn permutations(n: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur: Vec<usize> = (0..n).collect();
            fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if k == cur.len() {
                    out.push(cur.clone());
                    return;
                }
                for i in k..cur.len() {
                    cur.swap(k, i);
                    rec(k + 1, cur, out);
                    cur.swap(k, i);
                }
            }
            rec(0, &mut cur, &mut out);
            out
        }
    }

    #[test]
    fn generators_produce_full_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut graphs: Vec<SmallGraph> = all_graphs(5).collect();
        for _ in 0..300 {
            let n = rng.gen_range(2..=7);
            graphs.push(random_graph(&mut rng, n));
        }
        for g in graphs {
            let lab = canonical_labelling(&g);
            for gen in lab.generators() {
                let p = Permutation::new(gen.iter().map(|&x| x as usize).collect()).unwrap();
                assert_eq!(g.permuted(&p).unwrap(), g, "generator is an automorphism");
            }
            let autos = brute_automorphisms(&g);
            let orb = lab.vertex_orbits();
            for v in 0..g.order() {
                for a in &autos {
                    assert_eq!(orb[v], orb[a[v]], "vertex orbit of {v} in {g:?}");
                }
            }
            let edges = g.edges();
            for &e in &edges {
                for &f in &edges {
                    let brute = autos.iter().any(|a| {
                        let (x, y) = (a[e.0], a[e.1]);
                        (x.min(y), x.max(y)) == f
                    });
                    assert_eq!(
                        lab.same_edge_orbit(e, f),
                        brute,
                        "edges {e:?} {f:?} in {g:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn is_isomorphic_examples() {
        let k3 = SmallGraph::complete(3).unwrap();
        let p = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert!(is_isomorphic(&k3, &k3.permuted(&p).unwrap()));
        let p4 = SmallGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let star = SmallGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!is_isomorphic(&p4, &star));
        assert!(!is_isomorphic(&k3, &SmallGraph::complete(4).unwrap()));
    }

    #[test]
    fn path_relabelled_has_same_form() {
        let a = SmallGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = SmallGraph::from_edges(3, &[(1, 2), (2, 0)]).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }
}
