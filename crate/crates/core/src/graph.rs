//! Small vertex-labelled graphs, edge 2-colorings of complete graphs, and the
//! edge-indexing convention shared by every module.
//!
//! Internally vertices are 0-based (`0..order`) and a graph stores one `u16`
//! neighbourhood row per vertex. The user-facing conventions (`edge_index`,
//! [`VertexSubset`], the text formats) are 1-based, matching the `e_{i,j}`
//! labelling of coloring strings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported graph order; one neighbourhood fits in a `u16`.
pub const MAX_ORDER: usize = 16;

/// Number of vertex pairs, `C(n, 2)`.
#[inline]
pub const fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Zero-based position of the pair `{u, v}` (0-based, `u < v`) in
/// lexicographic pair order for a graph of order `n`.
#[inline]
pub(crate) const fn pair_index0(u: usize, v: usize, n: usize) -> usize {
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Zero-based index of edge `{i, j}` (1-based, `i < j`) in the coloring
/// string `e = (e_{1,2}, ..., e_{N-1,N})`.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || i >= j || j > n || n > MAX_ORDER {
        return Err(Error::InvalidPair { i, j, n });
    }
    Ok((i - 1) * n - i * (i - 1) / 2 + (j - i - 1))
}

/// Inverse of [`edge_index`]: the 1-based pair at position `k`.
pub fn edge_pair(k: usize, n: usize) -> Result<(usize, usize)> {
    if k >= num_pairs(n) {
        return Err(Error::InvalidArgument(format!(
            "edge index {k} out of range for order {n}"
        )));
    }
    let (u, v) = pair_at(k, n);
    Ok((u + 1, v + 1))
}

/// 0-based pair at lexicographic position `k`.
pub(crate) fn pair_at(k: usize, n: usize) -> (usize, usize) {
    let mut u = 0;
    let mut start = 0;
    loop {
        let row = n - u - 1;
        if k < start + row {
            return (u, u + 1 + (k - start));
        }
        start += row;
        u += 1;
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        Err(Error::OrderOutOfRange(order))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) const fn full_mask(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// A simple undirected graph of order at most 16.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    order: u8,
    rows: [u16; MAX_ORDER],
}

impl SmallGraph {
    /// Edgeless graph on `order` vertices.
    pub fn empty(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order: order as u8,
            rows: [0; MAX_ORDER],
        })
    }

    pub fn complete(order: usize) -> Result<Self> {
        let mut g = Self::empty(order)?;
        let mask = full_mask(order);
        for v in 0..order {
            g.rows[v] = mask & !(1 << v);
        }
        Ok(g)
    }

    /// Builds a graph from 0-based edge pairs.
    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(order)?;
        for &(u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from per-vertex neighbourhood rows. Rows must be
    /// symmetric and loop-free.
    pub fn from_rows(order: usize, rows: &[u16]) -> Result<Self> {
        check_order(order)?;
        if rows.len() != order {
            return Err(Error::SizeMismatch {
                expected: order,
                actual: rows.len(),
            });
        }
        let mask = full_mask(order);
        let mut g = Self::empty(order)?;
        for (v, &r) in rows.iter().enumerate() {
            if r & !mask != 0 || r & (1 << v) != 0 {
                return Err(Error::Parse(format!("bad adjacency row for vertex {v}")));
            }
            g.rows[v] = r;
        }
        for u in 0..order {
            for v in 0..order {
                if g.has_edge(u, v) != g.has_edge(v, u) {
                    return Err(Error::Parse("adjacency is not symmetric".into()));
                }
            }
        }
        Ok(g)
    }

    /// Unchecked constructor for hot paths; rows must already be valid.
    #[inline]
    pub(crate) fn from_rows_unchecked(order: usize, rows: [u16; MAX_ORDER]) -> Self {
        Self {
            order: order as u8,
            rows,
        }
    }

    /// Graph whose edges are the set bits of `bits` in lexicographic pair order.
    pub fn from_edge_bits(order: usize, bits: u128) -> Result<Self> {
        check_order(order)?;
        let l = num_pairs(order);
        if l < 128 && bits >> l != 0 {
            return Err(Error::InvalidArgument(format!(
                "edge bitstring has bits beyond position {l}"
            )));
        }
        Ok(Self::from_edge_bits_unchecked(order, bits))
    }

    pub(crate) fn from_edge_bits_unchecked(order: usize, bits: u128) -> Self {
        let mut rows = [0u16; MAX_ORDER];
        let mut k = 0;
        for u in 0..order {
            for v in (u + 1)..order {
                if (bits >> k) & 1 == 1 {
                    rows[u] |= 1 << v;
                    rows[v] |= 1 << u;
                }
                k += 1;
            }
        }
        Self::from_rows_unchecked(order, rows)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    #[inline]
    pub fn rows(&self) -> &[u16] {
        &self.rows[..self.order()]
    }

    #[inline]
    pub(crate) fn row_array(&self) -> &[u16; MAX_ORDER] {
        &self.rows
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> u16 {
        self.rows[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.rows[u] >> v) & 1 == 1
    }

    fn try_add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.order();
        for w in [u, v] {
            if w >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: w,
                    order: n,
                });
            }
        }
        if u == v {
            return Err(Error::InvalidPair { i: u, j: v, n });
        }
        self.add_edge(u, v);
        Ok(())
    }

    #[inline]
    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.order() && v < self.order());
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
    }

    #[inline]
    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u] &= !(1 << v);
        self.rows[v] &= !(1 << u);
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.order()).map(|v| self.degree(v)).collect()
    }

    /// Degrees sorted in non-increasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn edge_count(&self) -> usize {
        self.rows()
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges as 0-based pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..n {
            let mut hi = self.rows[u] & !((2u16 << u).wrapping_sub(1));
            while hi != 0 {
                let v = hi.trailing_zeros() as usize;
                out.push((u, v));
                hi &= hi - 1;
            }
        }
        out
    }

    /// Edge set as a bitstring in lexicographic pair order (bit `k` is the
    /// pair at `edge_index` position `k`).
    pub fn edge_bits(&self) -> u128 {
        let n = self.order();
        let mut bits = 0u128;
        let mut k = 0;
        for u in 0..n {
            let row = self.rows[u];
            for v in (u + 1)..n {
                bits |= (((row >> v) & 1) as u128) << k;
                k += 1;
            }
        }
        bits
    }

    pub fn complement(&self) -> Self {
        let n = self.order();
        let mask = full_mask(n);
        let mut rows = [0u16; MAX_ORDER];
        for v in 0..n {
            rows[v] = !self.rows[v] & mask & !(1 << v);
        }
        Self::from_rows_unchecked(n, rows)
    }

    /// Relabels vertices: edge `{π(u), π(v)}` is present iff `{u, v}` was.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self> {
        let n = self.order();
        if perm.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: perm.len(),
            });
        }
        let mut rows = [0u16; MAX_ORDER];
        for u in 0..n {
            let pu = perm.image0(u);
            let mut r = self.rows[u];
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                rows[pu] |= 1 << perm.image0(v);
                r &= r - 1;
            }
        }
        Ok(Self::from_rows_unchecked(n, rows))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        let all = full_mask(n);
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0u16;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                next |= self.rows[v];
                f &= f - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen & all == all
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.order() && self.is_connected()
    }

    /// Parses the graph text format (`order N` line, then `edges i-j,...`
    /// with 1-based vertex ids).
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut order = None;
        let mut edges = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("order") {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad order line `{line}`")))?;
                order = Some(n);
            } else if let Some(rest) = line.strip_prefix("edges") {
                for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (a, b) = item
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad edge `{item}`")))?;
                    let a: usize = a
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad edge `{item}`")))?;
                    let b: usize = b
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad edge `{item}`")))?;
                    if a == 0 || b == 0 {
                        return Err(Error::Parse(format!("vertex ids are 1-based: `{item}`")));
                    }
                    edges.push((a - 1, b - 1));
                }
            } else {
                return Err(Error::Parse(format!("unexpected line `{line}`")));
            }
        }
        let order = order.ok_or_else(|| Error::Parse("missing `order` line".into()))?;
        Self::from_edges(order, &edges)
    }

    /// Renders the graph text format.
    pub fn to_text(&self) -> String {
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(u, v)| format!("{}-{}", u + 1, v + 1))
            .collect();
        format!("order {}\nedges {}", self.order(), edges.join(","))
    }
}

impl fmt::Debug for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(u, v)| format!("{}-{}", u + 1, v + 1))
            .collect();
        write!(f, "SmallGraph(n={}; {})", self.order(), edges.join(","))
    }
}

impl fmt::Display for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Serialized as `{ "order": n, "edges": [[i, j], ...] }` with 1-based ids.
impl Serialize for SmallGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            order: usize,
            edges: Vec<[usize; 2]>,
        }
        Repr {
            order: self.order(),
            edges: self.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SmallGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            order: usize,
            edges: Vec<[usize; 2]>,
        }
        let r = Repr::deserialize(d)?;
        let edges: Vec<(usize, usize)> = r
            .edges
            .iter()
            .map(|[a, b]| (a.wrapping_sub(1), b.wrapping_sub(1)))
            .collect();
        SmallGraph::from_edges(r.order, &edges).map_err(serde::de::Error::custom)
    }
}

/// Edge color: red edges carry bit 1, blue edges bit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

/// A red/blue coloring of the edges of `K_N`, one bit per edge in
/// [`edge_index`] order; bit `k` set means edge `k` is red.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    order: u8,
    bits: u128,
}

impl Coloring {
    pub fn new(order: usize, bits: u128) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::OrderOutOfRange(order));
        }
        let l = num_pairs(order);
        if l < 128 && bits >> l != 0 {
            return Err(Error::SizeMismatch {
                expected: l,
                actual: 128 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self {
            order: order as u8,
            bits,
        })
    }

    pub fn all_red(order: usize) -> Result<Self> {
        let l = num_pairs(order);
        let bits = if l == 128 {
            u128::MAX
        } else {
            (1u128 << l) - 1
        };
        Self::new(order, bits)
    }

    pub fn all_blue(order: usize) -> Result<Self> {
        Self::new(order, 0)
    }

    /// Coloring whose red graph is `g`.
    pub fn from_red_graph(g: &SmallGraph) -> Self {
        Self {
            order: g.order() as u8,
            bits: g.edge_bits(),
        }
    }

    /// Parses a `0`/`1` string of length `C(N,2)`, bit 0 first.
    pub fn from_bitstring(order: usize, s: &str) -> Result<Self> {
        let l = num_pairs(order);
        if s.len() != l {
            return Err(Error::SizeMismatch {
                expected: l,
                actual: s.len(),
            });
        }
        let mut bits = 0u128;
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << k,
                '0' => {}
                _ => return Err(Error::Parse(format!("bad bit `{ch}`"))),
            }
        }
        Self::new(order, bits)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// Number of edges `L = C(N, 2)`.
    #[inline]
    pub fn len(&self) -> usize {
        num_pairs(self.order())
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        (self.bits >> k) & 1 == 1
    }

    /// Bit `e_{i,j}` for 1-based `i < j`.
    pub fn edge(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.get(edge_index(i, j, self.order())?))
    }

    pub fn with_flipped(&self, k: usize) -> Self {
        debug_assert!(k < self.len());
        Self {
            order: self.order,
            bits: self.bits ^ (1u128 << k),
        }
    }

    pub fn complement(&self) -> Self {
        let l = self.len();
        let mask = if l == 128 {
            u128::MAX
        } else {
            (1u128 << l) - 1
        };
        Self {
            order: self.order,
            bits: !self.bits & mask,
        }
    }

    pub fn red_graph(&self) -> SmallGraph {
        SmallGraph::from_edge_bits_unchecked(self.order(), self.bits)
    }

    pub fn blue_graph(&self) -> SmallGraph {
        self.red_graph().complement()
    }

    pub fn graph(&self, color: Color) -> SmallGraph {
        match color {
            Color::Red => self.red_graph(),
            Color::Blue => self.blue_graph(),
        }
    }

    /// Relabels the vertices of `K_N` by `perm`.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self> {
        Ok(Self::from_red_graph(&self.red_graph().permuted(perm)?))
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len())
            .map(|k| if self.get(k) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} bits={}", self.order(), self.to_bitstring())
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the coloring text format `N=<n> bits=<0/1 string>`.
impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut order = None;
        let mut bits = None;
        for tok in s.split_whitespace() {
            if let Some(v) = tok.strip_prefix("N=") {
                order = Some(
                    v.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad order `{v}`")))?,
                );
            } else if let Some(v) = tok.strip_prefix("bits=") {
                bits = Some(v.to_string());
            } else {
                return Err(Error::Parse(format!("unexpected token `{tok}`")));
            }
        }
        let order = order.ok_or_else(|| Error::Parse("missing N=".into()))?;
        // `bits=` with an empty string is valid for N = 1.
        let bits = bits.unwrap_or_default();
        Coloring::from_bitstring(order, &bits)
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of vertices of `K_N`, 1-based and strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSubset {
    parent: u8,
    members: Vec<u8>,
}

impl VertexSubset {
    pub fn new(parent: usize, members: &[usize]) -> Result<Self> {
        check_order(parent)?;
        if members.is_empty() || members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSubset);
        }
        for &m in members {
            if m == 0 || m > parent {
                return Err(Error::VertexOutOfRange {
                    vertex: m,
                    order: parent,
                });
            }
        }
        Ok(Self {
            parent: parent as u8,
            members: members.iter().map(|&m| m as u8).collect(),
        })
    }

    /// All of `1..=n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, &(1..=n).collect::<Vec<_>>())
    }

    pub fn parent_order(&self) -> usize {
        self.parent as usize
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// 1-based members.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&m| m as usize)
    }
}

/// Induced red (or blue) subgraph on `subset`, relabelled `0..|S|` in
/// increasing member order.
pub fn subgraph_on(e: &Coloring, subset: &VertexSubset, color: Color) -> Result<SmallGraph> {
    if subset.parent_order() != e.order() {
        return Err(Error::SizeMismatch {
            expected: e.order(),
            actual: subset.parent_order(),
        });
    }
    let members: Vec<usize> = subset.members().map(|m| m - 1).collect();
    let n = e.order();
    let want = matches!(color, Color::Red);
    let mut g = SmallGraph::empty(members.len())?;
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            if e.get(pair_index0(members[a], members[b], n)) == want {
                g.add_edge(a, b);
            }
        }
    }
    Ok(g)
}

/// Flips every edge color.
pub fn complement_coloring(e: &Coloring) -> Coloring {
    e.complement()
}

/// A bijection on `{0, .., n-1}` (displayed 1-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u8).collect(),
        }
    }

    /// From 0-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n > MAX_ORDER {
            return Err(Error::OrderOutOfRange(n));
        }
        let mut seen = 0u32;
        for &x in &images {
            if x >= n || seen & (1 << x) != 0 {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen |= 1 << x;
        }
        Ok(Self {
            images: images.into_iter().map(|x| x as u8).collect(),
        })
    }

    /// From 1-based images, as written in `π = (2, 1, 3)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::NotAPermutation(format!("{images:?}")));
        }
        Self::new(images.iter().map(|x| x - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image0(&self, v: usize) -> usize {
        self.images[v] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.len()];
        for (v, &w) in self.images.iter().enumerate() {
            inv[w as usize] = v as u8;
        }
        Self { images: inv }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "({})", imgs.join(","))
    }
}

/// Applies `perm` to `g`; see [`SmallGraph::permuted`].
pub fn apply_permutation(g: &SmallGraph, perm: &Permutation) -> Result<SmallGraph> {
    g.permuted(perm)
}
