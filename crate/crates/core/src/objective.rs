//! The subgraph-counting objective.
//!
//! For a coloring `e` of `K_N` the objective is the number of `|V_G|`-subsets
//! whose red graph contains `G` plus the number of `|V_H|`-subsets whose blue
//! graph contains `H`. It vanishes exactly when the coloring avoids both.
//!
//! Two table kinds back the evaluation. [`IsoLookupTable`] stores one entry
//! per isomorphism class of the pattern's order, keyed by canonical form.
//! [`DenseTable`] stores one bit per labelled graph on `p` vertices, indexed
//! by the edge bits of the subset in local colex order (pair `a < b` is bit
//! `b(b-1)/2 + a`), which is what the enumeration and Tabu loops use.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalForm};
use crate::containment::contains_unchecked;
use crate::error::{Error, Result};
use crate::graph::{num_pairs, subgraph_on, Color, Coloring, SmallGraph, VertexSubset, MAX_ORDER};
use crate::isogen::enumerate_unlabelled;
use crate::reference::any_permutation;

/// Largest pattern order with lookup tables.
pub const MAX_PATTERN_ORDER: usize = 8;

fn check_pattern(p: &SmallGraph) -> Result<()> {
    if p.order() > MAX_PATTERN_ORDER {
        return Err(Error::PatternTooLarge(p.order()));
    }
    if p.edge_count() == 0 {
        return Err(Error::EdgelessPattern);
    }
    Ok(())
}

/// Containment verdict for every unlabelled graph of the pattern's order.
#[derive(Clone, Debug)]
pub struct IsoLookupTable {
    pattern: SmallGraph,
    entries: BTreeMap<CanonicalForm, bool>,
}

impl IsoLookupTable {
    pub fn pattern(&self) -> &SmallGraph {
        &self.pattern
    }

    pub fn order(&self) -> usize {
        self.pattern.order()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, form: &CanonicalForm) -> Option<bool> {
        self.entries.get(form).copied()
    }

    /// Whether `g` (of the pattern's order) contains the pattern.
    pub fn contains(&self, g: &SmallGraph) -> Result<bool> {
        if g.order() != self.order() {
            return Err(Error::SizeMismatch {
                expected: self.order(),
                actual: g.order(),
            });
        }
        Ok(self
            .get(&canonical_form(g))
            .expect("table covers every class"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalForm, bool)> + '_ {
        self.entries.iter().map(|(k, &v)| (k, v))
    }
}

/// Builds the class-keyed table by enumerating every unlabelled graph of the
/// pattern's order and testing containment directly.
pub fn build_lookup(pattern: &SmallGraph) -> Result<IsoLookupTable> {
    check_pattern(pattern)?;
    let mut entries = BTreeMap::new();
    enumerate_unlabelled(pattern.order(), |g| {
        entries.insert(canonical_form(g), contains_unchecked(g, pattern));
    })?;
    Ok(IsoLookupTable {
        pattern: *pattern,
        entries,
    })
}

/// One bit per labelled graph on `p` vertices: set iff it contains the pattern.
#[derive(Clone, Debug)]
pub struct DenseTable {
    order: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) const fn colex_bit(a: usize, b: usize) -> usize {
    b * (b - 1) / 2 + a
}

impl DenseTable {
    /// Seeds every labelled copy of the pattern, then closes upward under
    /// adding edges.
    pub fn build(pattern: &SmallGraph) -> Result<Self> {
        check_pattern(pattern)?;
        let p = pattern.order();
        let bits = num_pairs(p);
        let size = 1usize << bits;
        let mut words = vec![0u64; size.div_ceil(64)];
        let edges = pattern.edges();
        any_permutation(p, |pi| {
            let mut idx = 0usize;
            for &(u, v) in &edges {
                let (a, b) = (pi[u].min(pi[v]), pi[u].max(pi[v]));
                idx |= 1 << colex_bit(a, b);
            }
            words[idx >> 6] |= 1 << (idx & 63);
            false
        });
        const LOW: [u64; 6] = [
            0x5555_5555_5555_5555,
            0x3333_3333_3333_3333,
            0x0f0f_0f0f_0f0f_0f0f,
            0x00ff_00ff_00ff_00ff,
            0x0000_ffff_0000_ffff,
            0x0000_0000_ffff_ffff,
        ];
        for b in 0..bits {
            if b < 6 {
                let s = 1 << b;
                for w in words.iter_mut() {
                    *w |= (*w & LOW[b]) << s;
                }
            } else {
                let stride = 1usize << (b - 6);
                for w in 0..words.len() {
                    if w & stride == 0 {
                        words[w | stride] |= words[w];
                    }
                }
            }
        }
        if size < 64 {
            words[0] &= (1u64 << size) - 1;
        }
        Ok(Self { order: p, words })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        (self.words[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    /// Local colex index of `g` (order must match).
    pub fn index_of(g: &SmallGraph) -> usize {
        let mut idx = 0;
        for (u, v) in g.edges() {
            idx |= 1 << colex_bit(u, v);
        }
        idx
    }
}

fn dense_cache() -> &'static Mutex<HashMap<CanonicalForm, Arc<DenseTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<CanonicalForm, Arc<DenseTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn iso_cache() -> &'static Mutex<HashMap<CanonicalForm, Arc<IsoLookupTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<CanonicalForm, Arc<IsoLookupTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`DenseTable`], shared across contexts with isomorphic patterns.
pub fn dense_table(pattern: &SmallGraph) -> Result<Arc<DenseTable>> {
    check_pattern(pattern)?;
    let key = canonical_form(pattern);
    let mut cache = dense_cache().lock().expect("table cache poisoned");
    if let Some(t) = cache.get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(DenseTable::build(pattern)?);
    cache.insert(key, t.clone());
    Ok(t)
}

/// Memoized [`build_lookup`].
pub fn lookup_table(pattern: &SmallGraph) -> Result<Arc<IsoLookupTable>> {
    check_pattern(pattern)?;
    let key = canonical_form(pattern);
    let mut cache = iso_cache().lock().expect("table cache poisoned");
    if let Some(t) = cache.get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_lookup(pattern)?);
    cache.insert(key, t.clone());
    Ok(t)
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ObjectiveValue {
    pub total: u64,
    pub red: u64,
    pub blue: u64,
}

impl ObjectiveValue {
    fn new(red: u64, blue: u64) -> Self {
        Self {
            total: red + blue,
            red,
            blue,
        }
    }
}

/// `(N, G, H)` plus the tables needed to score colorings of `K_N`.
#[derive(Clone, Debug)]
pub struct ObjectiveContext {
    n: usize,
    red: SmallGraph,
    blue: SmallGraph,
    red_dense: Arc<DenseTable>,
    blue_dense: Arc<DenseTable>,
    red_iso: OnceLock<Arc<IsoLookupTable>>,
    blue_iso: OnceLock<Arc<IsoLookupTable>>,
}

impl ObjectiveContext {
    /// Orders below a pattern's order are allowed: no subset of that size
    /// exists, so that color contributes nothing.
    pub fn new(n: usize, red: &SmallGraph, blue: &SmallGraph) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(Error::OrderOutOfRange(n));
        }
        Ok(Self {
            n,
            red: *red,
            blue: *blue,
            red_dense: dense_table(red)?,
            blue_dense: dense_table(blue)?,
            red_iso: OnceLock::new(),
            blue_iso: OnceLock::new(),
        })
    }

    /// Same patterns at another order; tables are shared.
    pub fn at_order(&self, n: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(Error::OrderOutOfRange(n));
        }
        Ok(Self { n, ..self.clone() })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn red_pattern(&self) -> &SmallGraph {
        &self.red
    }

    pub fn blue_pattern(&self) -> &SmallGraph {
        &self.blue
    }

    pub fn red_table(&self) -> Result<&IsoLookupTable> {
        iso_get(&self.red_iso, &self.red)
    }

    pub fn blue_table(&self) -> Result<&IsoLookupTable> {
        iso_get(&self.blue_iso, &self.blue)
    }

    fn check_coloring(&self, e: &Coloring) -> Result<()> {
        if e.order() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: e.order(),
            });
        }
        Ok(())
    }

    /// Objective of the coloring whose red graph is `red`.
    pub fn evaluate_graph(&self, red: &SmallGraph) -> ObjectiveValue {
        let r = count_subsets(red.row_array(), self.n, &self.red_dense, false, u64::MAX);
        let b = count_subsets(red.row_array(), self.n, &self.blue_dense, true, u64::MAX);
        ObjectiveValue::new(r, b)
    }

    /// Exact total when it is at most `cap`; otherwise some value above `cap`.
    pub fn total_capped(&self, red: &SmallGraph, cap: u64) -> u64 {
        let r = count_subsets(red.row_array(), self.n, &self.red_dense, false, cap);
        if r > cap {
            return r;
        }
        r + count_subsets(red.row_array(), self.n, &self.blue_dense, true, cap - r)
    }

    pub fn evaluate(&self, e: &Coloring) -> Result<ObjectiveValue> {
        self.check_coloring(e)?;
        Ok(self.evaluate_graph(&e.red_graph()))
    }
}

fn iso_get<'a>(
    cell: &'a OnceLock<Arc<IsoLookupTable>>,
    p: &SmallGraph,
) -> Result<&'a IsoLookupTable> {
    if let Some(t) = cell.get() {
        return Ok(t);
    }
    let t = lookup_table(p)?;
    Ok(cell.get_or_init(|| t))
}

/// Counts `p`-subsets of the `n` vertices whose induced graph (the complement
/// graph when `complement`) is set in `table`. Stops once the count exceeds
/// `cap`.
fn count_subsets(
    rows: &[u16; MAX_ORDER],
    n: usize,
    table: &DenseTable,
    complement: bool,
    cap: u64,
) -> u64 {
    let p = table.order();
    if p > n {
        return 0;
    }
    let mut rows = *rows;
    if complement {
        let full = crate::graph::full_mask(n);
        for (v, r) in rows.iter_mut().enumerate().take(n) {
            *r = !*r & full & !(1 << v);
        }
    }
    let mut chosen = [0u8; MAX_PATTERN_ORDER];
    let mut count = 0u64;
    fn rec(
        rows: &[u16; MAX_ORDER],
        n: usize,
        p: usize,
        table: &DenseTable,
        chosen: &mut [u8; MAX_PATTERN_ORDER],
        level: usize,
        start: usize,
        idx: usize,
        count: &mut u64,
        cap: u64,
    ) -> bool {
        if level == p {
            if table.get(idx) {
                *count += 1;
                return *count > cap;
            }
            return false;
        }
        let shift = level * level.saturating_sub(1) / 2;
        for v in start..=(n - (p - level)) {
            let r = rows[v];
            let mut local = 0usize;
            for (a, &c) in chosen[..level].iter().enumerate() {
                local |= (((r >> c) & 1) as usize) << a;
            }
            chosen[level] = v as u8;
            if rec(
                rows,
                n,
                p,
                table,
                chosen,
                level + 1,
                v + 1,
                idx | (local << shift),
                count,
                cap,
            ) {
                return true;
            }
        }
        false
    }
    rec(&rows, n, p, table, &mut chosen, 0, 0, 0, &mut count, cap);
    count
}

/// Red indicator for one subset, through the class-keyed table.
pub fn f_red(e: &Coloring, s: &VertexSubset, ctx: &ObjectiveContext) -> Result<bool> {
    indicator(e, s, ctx.red_table()?, Color::Red)
}

/// Blue indicator for one subset: the red test on the complemented coloring
/// with the blue pattern.
pub fn f_blue(e: &Coloring, s: &VertexSubset, ctx: &ObjectiveContext) -> Result<bool> {
    indicator(e, s, ctx.blue_table()?, Color::Blue)
}

fn indicator(e: &Coloring, s: &VertexSubset, table: &IsoLookupTable, color: Color) -> Result<bool> {
    if s.len() != table.order() {
        return Err(Error::SizeMismatch {
            expected: table.order(),
            actual: s.len(),
        });
    }
    table.contains(&subgraph_on(e, s, color)?)
}

/// Full evaluation; same as [`ObjectiveContext::evaluate`].
pub fn evaluate(e: &Coloring, ctx: &ObjectiveContext) -> Result<ObjectiveValue> {
    ctx.evaluate(e)
}

/// Rank of a sorted subset in the combinatorial number system.
fn subset_rank(s: &[u8], binom: &[[u64; 17]; 17]) -> usize {
    s.iter()
        .enumerate()
        .map(|(i, &v)| binom[v as usize][i + 1] as usize)
        .sum()
}

fn binomials() -> [[u64; 17]; 17] {
    let mut b = [[0u64; 17]; 17];
    for n in 0..17 {
        b[n][0] = 1;
        for k in 1..=n {
            b[n][k] = b[n - 1][k - 1] + if k < n { b[n - 1][k] } else { 0 };
        }
    }
    b
}

/// Number of `k`-subsets of an `n`-set.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else {
        binomials()[n][k]
    }
}

/// Local colex index of the subset `s` inside graph rows.
#[inline]
fn local_index(rows: &[u16; MAX_ORDER], s: &[u8]) -> usize {
    let mut idx = 0;
    for b in 1..s.len() {
        let r = rows[s[b] as usize];
        for a in 0..b {
            idx |= (((r >> s[a]) & 1) as usize) << colex_bit(a, b);
        }
    }
    idx
}

/// Per-subset indicator values for one coloring, for [`evaluate_delta`].
#[derive(Clone, Debug)]
pub struct DeltaCache {
    order: usize,
    bits: u128,
    red: Vec<bool>,
    blue: Vec<bool>,
    value: ObjectiveValue,
    recomputed: usize,
}

impl DeltaCache {
    /// Full evaluation of `e`, keeping every subset's indicator.
    pub fn new(e: &Coloring, ctx: &ObjectiveContext) -> Result<Self> {
        ctx.check_coloring(e)?;
        let n = ctx.n;
        let rows = *e.red_graph().row_array();
        let blue_rows = *e.blue_graph().row_array();
        let fill = |p: usize, rows: &[u16; MAX_ORDER], t: &DenseTable| -> Vec<bool> {
            let mut out = vec![false; binomial(n, p) as usize];
            for s in crate::reference::subsets(n, p) {
                let s: Vec<u8> = s.iter().map(|&v| (v - 1) as u8).collect();
                out[subset_rank(&s, &binomials())] = t.get(local_index(rows, &s));
            }
            out
        };
        let red = fill(ctx.red.order(), &rows, &ctx.red_dense);
        let blue = fill(ctx.blue.order(), &blue_rows, &ctx.blue_dense);
        let value = ObjectiveValue::new(
            red.iter().filter(|&&x| x).count() as u64,
            blue.iter().filter(|&&x| x).count() as u64,
        );
        Ok(Self {
            order: n,
            bits: e.bits(),
            red,
            blue,
            value,
            recomputed: 0,
        })
    }

    pub fn value(&self) -> ObjectiveValue {
        self.value
    }

    /// Subset indicators recomputed by the last delta step.
    pub fn last_recomputed(&self) -> usize {
        self.recomputed
    }
}

/// Flips edge `{i, j}` (1-based) of `e` and returns the new objective,
/// recomputing only subsets containing both endpoints. `cache` must describe
/// `e` and is advanced to the flipped coloring.
pub fn evaluate_delta(
    e: &Coloring,
    flipped: (usize, usize),
    ctx: &ObjectiveContext,
    cache: &mut DeltaCache,
) -> Result<ObjectiveValue> {
    ctx.check_coloring(e)?;
    if cache.order != e.order() || cache.bits != e.bits() {
        return Err(Error::StaleCache);
    }
    let n = ctx.n;
    let (i, j) = flipped;
    let k = crate::graph::edge_index(i, j, n)?;
    let next = e.with_flipped(k);
    let red_rows = *next.red_graph().row_array();
    let blue_rows = *next.blue_graph().row_array();
    let binom = binomials();
    let (u, v) = ((i - 1) as u8, (j - 1) as u8);
    let mut recomputed = 0;
    let mut update =
        |p: usize, rows: &[u16; MAX_ORDER], t: &DenseTable, f: &mut Vec<bool>, count: &mut u64| {
            if p > n {
                return;
            }
            let others: Vec<usize> = (0..n)
                .filter(|&x| x != u as usize && x != v as usize)
                .collect();
            for rest in crate::reference::subsets(others.len(), p - 2) {
                let mut s: Vec<u8> = rest.iter().map(|&r| others[r - 1] as u8).collect();
                s.push(u);
                s.push(v);
                s.sort_unstable();
                let rank = subset_rank(&s, &binom);
                let now = t.get(local_index(rows, &s));
                if now != f[rank] {
                    if now {
                        *count += 1;
                    } else {
                        *count -= 1;
                    }
                    f[rank] = now;
                }
                recomputed += 1;
            }
        };
    let (mut red, mut blue) = (cache.value.red, cache.value.blue);
    update(
        ctx.red.order(),
        &red_rows,
        &ctx.red_dense,
        &mut cache.red,
        &mut red,
    );
    update(
        ctx.blue.order(),
        &blue_rows,
        &ctx.blue_dense,
        &mut cache.blue,
        &mut blue,
    );
    cache.recomputed = recomputed;
    cache.value = ObjectiveValue::new(red, blue);
    cache.bits = next.bits();
    Ok(cache.value)
}

/// One color's subsets with their current local indices, for incremental
/// flip-gain tracking.
#[derive(Clone, Debug)]
struct ColorState {
    table: Arc<DenseTable>,
    /// XOR applied to a red-edge index before lookup: all ones for blue.
    flip_mask: usize,
    /// Global edge index of each local pair, per subset.
    pairs: Vec<[u8; 28]>,
    idx: Vec<u32>,
    /// For each global edge, the subsets holding it and its local bit there.
    by_edge: Vec<Vec<(u32, u8)>>,
    npairs: usize,
}

impl ColorState {
    fn new(table: Arc<DenseTable>, blue: bool, n: usize, rows: &[u16; MAX_ORDER]) -> Self {
        let p = table.order();
        let npairs = num_pairs(p);
        let mut pairs = Vec::new();
        let mut idx = Vec::new();
        let mut by_edge = vec![Vec::new(); num_pairs(n)];
        if p <= n {
            for s in crate::reference::subsets(n, p) {
                let s: Vec<u8> = s.iter().map(|&v| (v - 1) as u8).collect();
                let id = pairs.len() as u32;
                let mut pr = [0u8; 28];
                for b in 1..p {
                    for a in 0..b {
                        let bit = colex_bit(a, b);
                        let k = crate::graph::pair_index0(s[a] as usize, s[b] as usize, n);
                        pr[bit] = k as u8;
                        by_edge[k].push((id, bit as u8));
                    }
                }
                pairs.push(pr);
                idx.push(local_index(rows, &s) as u32);
            }
        }
        Self {
            flip_mask: if blue { (1usize << npairs) - 1 } else { 0 },
            table,
            pairs,
            idx,
            by_edge,
            npairs,
        }
    }

    #[inline]
    fn f(&self, idx: usize) -> i64 {
        self.table.get(idx ^ self.flip_mask) as i64
    }

    fn count(&self) -> u64 {
        self.idx
            .iter()
            .filter(|&&i| self.f(i as usize) == 1)
            .count() as u64
    }

    /// Adds `sign` times each subset's contribution to the flip gains.
    fn contribute(&self, id: usize, sign: i64, gains: &mut [i64]) {
        let idx = self.idx[id] as usize;
        let base = self.f(idx);
        for bit in 0..self.npairs {
            let d = self.f(idx ^ (1 << bit)) - base;
            if d != 0 {
                gains[self.pairs[id][bit] as usize] += sign * d;
            }
        }
    }
}

/// A coloring with its objective and the objective change of every
/// single-edge flip, maintained incrementally.
#[derive(Clone, Debug)]
pub struct FlipState {
    coloring: Coloring,
    red: u64,
    blue: u64,
    gains: Vec<i64>,
    colors: [ColorState; 2],
}

impl FlipState {
    pub fn new(ctx: &ObjectiveContext, e: &Coloring) -> Result<Self> {
        ctx.check_coloring(e)?;
        let n = ctx.n;
        let rows = *e.red_graph().row_array();
        let colors = [
            ColorState::new(ctx.red_dense.clone(), false, n, &rows),
            ColorState::new(ctx.blue_dense.clone(), true, n, &rows),
        ];
        let mut gains = vec![0i64; num_pairs(n)];
        for c in &colors {
            for id in 0..c.idx.len() {
                c.contribute(id, 1, &mut gains);
            }
        }
        Ok(Self {
            coloring: *e,
            red: colors[0].count(),
            blue: colors[1].count(),
            gains,
            colors,
        })
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn value(&self) -> ObjectiveValue {
        ObjectiveValue::new(self.red, self.blue)
    }

    /// Objective change from flipping edge `k`, for every `k`.
    pub fn gains(&self) -> &[i64] {
        &self.gains
    }

    /// Flips edge `k` (0-based index) and updates all gains.
    pub fn flip(&mut self, k: usize) {
        let mut gains = std::mem::take(&mut self.gains);
        for (ci, c) in self.colors.iter_mut().enumerate() {
            let mut delta = 0i64;
            for &(id, bit) in &c.by_edge[k] {
                let id = id as usize;
                c.contribute(id, -1, &mut gains);
                let before = c.f(c.idx[id] as usize);
                c.idx[id] ^= 1 << bit;
                delta += c.f(c.idx[id] as usize) - before;
                c.contribute(id, 1, &mut gains);
            }
            let count = if ci == 0 {
                &mut self.red
            } else {
                &mut self.blue
            };
            *count = (*count as i64 + delta) as u64;
        }
        self.gains = gains;
        self.coloring = self.coloring.with_flipped(k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{objective_literal, subsets};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> SmallGraph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        SmallGraph::from_edges(n, &e).unwrap()
    }

    fn star(k: usize) -> SmallGraph {
        let e: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        SmallGraph::from_edges(k + 1, &e).unwrap()
    }

    fn random_coloring(rng: &mut ChaCha8Rng, n: usize) -> Coloring {
        let l = num_pairs(n);
        Coloring::new(n, rng.gen::<u128>() & ((1u128 << l) - 1)).unwrap()
    }

    #[test]
    fn lookup_for_p3() {
        let t = build_lookup(&path(3)).unwrap();
        assert_eq!(t.len(), 4);
        let truths: Vec<(usize, bool)> =
            t.iter().map(|(f, v)| (f.graph().edge_count(), v)).collect();
        for (edges, v) in truths {
            assert_eq!(v, edges >= 2);
        }
        let k3 = build_lookup(&SmallGraph::complete(3).unwrap()).unwrap();
        assert_eq!(k3.iter().filter(|(_, v)| *v).count(), 1);
    }

    #[test]
    fn lookup_invariants_and_errors() {
        let t = build_lookup(&path(6)).unwrap();
        assert_eq!(t.len(), 156);
        assert_eq!(t.contains(&SmallGraph::complete(6).unwrap()), Ok(true));
        assert_eq!(t.contains(&SmallGraph::empty(6).unwrap()), Ok(false));
        assert_eq!(
            build_lookup(&SmallGraph::empty(4).unwrap()).unwrap_err(),
            Error::EdgelessPattern
        );
        assert_eq!(
            build_lookup(&path(9)).unwrap_err(),
            Error::PatternTooLarge(9)
        );
    }

    #[test]
    fn dense_agrees_with_class_table() {
        let mut patterns = vec![
            SmallGraph::complete(3).unwrap(),
            SmallGraph::complete(4).unwrap(),
        ];
        for p in 2..=7 {
            patterns.push(path(p));
            patterns.push(star(p - 1));
        }
        for pat in patterns {
            let iso = build_lookup(&pat).unwrap();
            let dense = DenseTable::build(&pat).unwrap();
            for (form, v) in iso.iter() {
                assert_eq!(
                    dense.get(DenseTable::index_of(&form.graph())),
                    v,
                    "{pat:?} {form}"
                );
            }
        }
    }

    #[test]
    fn dense_agrees_on_random_labelled_graphs_of_order_8() {
        let pat = path(8);
        let dense = dense_table(&pat).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let g = SmallGraph::from_edge_bits(8, rng.gen::<u128>() & ((1 << 28) - 1)).unwrap();
            assert_eq!(
                dense.get(DenseTable::index_of(&g)),
                contains_unchecked(&g, &pat)
            );
        }
    }

    #[test]
    fn evaluate_examples() {
        let p3 = path(3);
        let ctx = ObjectiveContext::new(3, &p3, &p3).unwrap();
        let v = ctx.evaluate(&Coloring::all_red(3).unwrap()).unwrap();
        assert_eq!((v.total, v.red, v.blue), (1, 1, 0));
        let v = ctx.evaluate(&Coloring::new(3, 0b001).unwrap()).unwrap();
        assert_eq!((v.total, v.red, v.blue), (1, 0, 1));

        let k3 = SmallGraph::complete(3).unwrap();
        let c5 = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let ctx = ObjectiveContext::new(5, &k3, &k3).unwrap();
        assert_eq!(
            ctx.evaluate(&Coloring::from_red_graph(&c5)).unwrap().total,
            0
        );
        assert!(ctx.evaluate(&Coloring::all_red(4).unwrap()).is_err());
    }

    #[test]
    fn indicator_examples() {
        let p6 = path(6);
        let s5 = star(5);
        let ctx = ObjectiveContext::new(6, &p6, &s5).unwrap();
        let all = VertexSubset::full(6).unwrap();
        let red = Coloring::all_red(6).unwrap();
        let blue = Coloring::all_blue(6).unwrap();
        assert!(f_red(&red, &all, &ctx).unwrap());
        assert!(!f_red(&blue, &all, &ctx).unwrap());
        assert!(f_blue(&blue, &all, &ctx).unwrap());
        assert!(!f_blue(&red, &all, &ctx).unwrap());
        let one = Coloring::new(6, 1).unwrap();
        assert!(!f_red(&one, &all, &ctx).unwrap());
        let small = VertexSubset::new(6, &[1, 2, 3]).unwrap();
        assert!(f_red(&red, &small, &ctx).is_err());
    }

    #[test]
    fn lookup_matches_literal_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pats = [
            path(3),
            path(4),
            star(3),
            SmallGraph::complete(3).unwrap(),
            path(5),
            star(4),
            path(6),
        ];
        for n in 3..=7 {
            for g in &pats {
                for h in &pats {
                    if g.order() > n || h.order() > n {
                        continue;
                    }
                    let ctx = ObjectiveContext::new(n, g, h).unwrap();
                    let e = random_coloring(&mut rng, n);
                    for s in subsets(n, g.order()) {
                        let s = VertexSubset::new(n, &s).unwrap();
                        assert_eq!(
                            f_red(&e, &s, &ctx).unwrap(),
                            crate::reference::red_indicator(&e, &s, g).unwrap()
                        );
                    }
                    let v = ctx.evaluate(&e).unwrap();
                    assert_eq!((v.red, v.blue), objective_literal(&e, g, h).unwrap());
                }
            }
        }
    }

    #[test]
    fn capped_total_is_exact_below_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = ObjectiveContext::new(8, &path(5), &star(4)).unwrap();
        for _ in 0..100 {
            let e = random_coloring(&mut rng, 8);
            let full = ctx.evaluate(&e).unwrap().total;
            for cap in [0, 1, 5, full, full + 3] {
                let t = ctx.total_capped(&e.red_graph(), cap);
                if full <= cap {
                    assert_eq!(t, full);
                } else {
                    assert!(t > cap);
                }
            }
        }
    }

    #[test]
    fn delta_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(4..=8);
            let g = path(rng.gen_range(3..=n.min(6)));
            let h = star(rng.gen_range(2..=n.min(6) - 1));
            let ctx = ObjectiveContext::new(n, &g, &h).unwrap();
            let e = random_coloring(&mut rng, n);
            let mut cache = DeltaCache::new(&e, &ctx).unwrap();
            assert_eq!(cache.value(), ctx.evaluate(&e).unwrap());
            let i = rng.gen_range(1..n);
            let j = rng.gen_range(i + 1..=n);
            let v = evaluate_delta(&e, (i, j), &ctx, &mut cache).unwrap();
            let k = crate::graph::edge_index(i, j, n).unwrap();
            let flipped = e.with_flipped(k);
            assert_eq!(v, ctx.evaluate(&flipped).unwrap());
            assert_eq!(
                evaluate_delta(&e, (i, j), &ctx, &mut cache),
                Err(Error::StaleCache)
            );
            let back = evaluate_delta(&flipped, (i, j), &ctx, &mut cache).unwrap();
            assert_eq!(back, ctx.evaluate(&e).unwrap());
        }
    }

    #[test]
    fn delta_touches_only_subsets_with_both_endpoints() {
        let p3 = path(3);
        let ctx = ObjectiveContext::new(6, &p3, &p3).unwrap();
        let e = Coloring::all_red(6).unwrap();
        let mut cache = DeltaCache::new(&e, &ctx).unwrap();
        let before = cache.value();
        let after = evaluate_delta(&e, (2, 5), &ctx, &mut cache).unwrap();
        assert_eq!(cache.last_recomputed(), 8);
        assert!(before.total.abs_diff(after.total) <= 8);
    }

    #[test]
    fn flip_state_tracks_gains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(5..=9);
            let ctx = ObjectiveContext::new(n, &path(5), &star(4)).unwrap();
            let mut st = FlipState::new(&ctx, &random_coloring(&mut rng, n)).unwrap();
            for _ in 0..20 {
                let cur = ctx.evaluate(st.coloring()).unwrap();
                assert_eq!(st.value(), cur);
                for k in 0..num_pairs(n) {
                    let f = ctx.evaluate(&st.coloring().with_flipped(k)).unwrap().total as i64;
                    assert_eq!(st.gains()[k], f - cur.total as i64);
                }
                st.flip(rng.gen_range(0..num_pairs(n)));
            }
        }
    }

    #[test]
    fn small_orders_contribute_nothing() {
        let p3 = path(3);
        let ctx = ObjectiveContext::new(2, &p3, &p3).unwrap();
        for bits in 0..2 {
            assert_eq!(
                ctx.evaluate(&Coloring::new(2, bits).unwrap())
                    .unwrap()
                    .total,
                0
            );
        }
    }
}
