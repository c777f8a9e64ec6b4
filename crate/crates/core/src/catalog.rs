//! Free trees and the named families `P_n`, `K_{1,k}` and `S^(k)_{a,b}`.
//!
//! Trees of order `m` come from decoding every Prüfer sequence, so all
//! `m^(m-2)` labelled trees are produced. A rooted-at-center tree code removes
//! duplicates cheaply and the survivors are sorted by canonical form, which
//! fixes the catalog index of each class.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{SmallGraph, MAX_ORDER};

pub const MIN_TREE_ORDER: usize = 2;
pub const MAX_TREE_ORDER: usize = 10;

/// A graph named by family, by catalog position, or given explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    /// Path with `n` vertices.
    Path(usize),
    /// `K_{1,k}`.
    Star(usize),
    /// Centers of `K_{1,a}` and `K_{1,b}` joined by a path with `k` vertices.
    DoubleStar {
        k: usize,
        a: usize,
        b: usize,
    },
    /// Class `index` (1-based) of the order-`order` tree catalog.
    CatalogRef {
        order: usize,
        index: usize,
    },
    Explicit(SmallGraph),
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidFamily(why));
        match *self {
            FamilySpec::Path(n) if !(2..=MAX_ORDER).contains(&n) => {
                bad(format!("path order {n} not in 2..=16"))
            }
            FamilySpec::Star(k) if !(1..MAX_ORDER).contains(&k) => {
                bad(format!("star with {k} leaves not in 1..=15"))
            }
            FamilySpec::DoubleStar { k, a, b }
                if k < 2 || a < 1 || b < 1 || a + b + k > MAX_ORDER =>
            {
                bad(format!(
                    "double star ({k},{a},{b}) needs k >= 2, a, b >= 1, a+b+k <= 16"
                ))
            }
            FamilySpec::CatalogRef { order, index } => {
                if !(MIN_TREE_ORDER..=MAX_TREE_ORDER).contains(&order) || index == 0 {
                    bad(format!("catalog reference T{order}.{index} out of range"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Order of the built graph, without building it.
    pub fn order(&self) -> usize {
        match *self {
            FamilySpec::Path(n) => n,
            FamilySpec::Star(k) => k + 1,
            FamilySpec::DoubleStar { k, a, b } => a + b + k,
            FamilySpec::CatalogRef { order, .. } => order,
            FamilySpec::Explicit(g) => g.order(),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path(n) => write!(f, "P{n}"),
            FamilySpec::Star(k) => write!(f, "K1,{k}"),
            FamilySpec::DoubleStar { k, a, b } => write!(f, "S{k}:{a},{b}"),
            FamilySpec::CatalogRef { order, index } => write!(f, "T{order}.{index}"),
            FamilySpec::Explicit(g) => {
                let edges: Vec<String> = g
                    .edges()
                    .iter()
                    .map(|(u, v)| format!("{}-{}", u + 1, v + 1))
                    .collect();
                write!(f, "G{}:{}", g.order(), edges.join(","))
            }
        }
    }
}

/// Accepted forms: `P6`, `K1,5`, `K3` (complete), `S4:1,1`, `T6.3`, and
/// `G4:1-2,2-3,3-4` for an explicit 1-based edge list.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognised graph spec {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let spec = if let Some(r) = s.strip_prefix("K1,") {
            FamilySpec::Star(num(r)?)
        } else if let Some(r) = s.strip_prefix('K') {
            FamilySpec::Explicit(SmallGraph::complete(num(r)?)?)
        } else if let Some(r) = s.strip_prefix('P') {
            FamilySpec::Path(num(r)?)
        } else if let Some(r) = s.strip_prefix('S') {
            let (k, ab) = r.split_once(':').ok_or_else(bad)?;
            let (a, b) = ab.split_once(',').ok_or_else(bad)?;
            FamilySpec::DoubleStar {
                k: num(k)?,
                a: num(a)?,
                b: num(b)?,
            }
        } else if let Some(r) = s.strip_prefix('T') {
            let (m, j) = r.split_once('.').ok_or_else(bad)?;
            FamilySpec::CatalogRef {
                order: num(m)?,
                index: num(j)?,
            }
        } else if let Some(r) = s.strip_prefix('G') {
            let (n, list) = r.split_once(':').ok_or_else(bad)?;
            let text = format!("order {}\nedges {}", num(n)?, list);
            FamilySpec::Explicit(SmallGraph::parse_text(&text)?)
        } else {
            return Err(bad());
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One isomorphism class of trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeClass {
    pub order: usize,
    /// 1-based position in canonical-form order.
    pub index: usize,
    pub representative: SmallGraph,
    /// Every family description that builds this class.
    pub names: Vec<FamilySpec>,
}

impl TreeClass {
    pub fn form(&self) -> CanonicalForm {
        canonical_form(&self.representative)
    }

    pub fn label(&self) -> String {
        let mut s = format!("T{}.{}", self.order, self.index);
        for n in &self.names {
            s.push_str(&format!(" = {n}"));
        }
        s
    }
}

/// Builds the graph a spec describes.
pub fn build_family(spec: &FamilySpec) -> Result<SmallGraph> {
    spec.validate()?;
    match *spec {
        FamilySpec::Path(n) => {
            let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            SmallGraph::from_edges(n, &e)
        }
        FamilySpec::Star(k) => {
            let e: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            SmallGraph::from_edges(k + 1, &e)
        }
        FamilySpec::DoubleStar { k, a, b } => {
            // Spine 0..k, leaves of the first center, then of the last.
            let mut e: Vec<_> = (0..k - 1).map(|i| (i, i + 1)).collect();
            e.extend((0..a).map(|i| (0, k + i)));
            e.extend((0..b).map(|i| (k - 1, k + a + i)));
            SmallGraph::from_edges(a + b + k, &e)
        }
        FamilySpec::CatalogRef { order, index } => {
            let cat = free_trees(order)?;
            cat.get(index - 1).map(|c| c.representative).ok_or_else(|| {
                Error::InvalidFamily(format!(
                    "T{order}.{index}: catalog has {} classes",
                    cat.len()
                ))
            })
        }
        FamilySpec::Explicit(g) => Ok(g),
    }
}

/// Decodes a Prüfer sequence over `0..m` into a tree.
fn prufer_tree(seq: &[usize], m: usize) -> SmallGraph {
    let mut deg = [1u8; MAX_ORDER];
    for &x in seq {
        deg[x] += 1;
    }
    let mut g = SmallGraph::empty(m).expect("valid order");
    for &x in seq {
        let leaf = (0..m).find(|&v| deg[v] == 1).expect("a leaf exists");
        g.add_edge(leaf, x);
        deg[leaf] -= 1;
        deg[x] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&v| deg[v] == 1).collect();
    g.add_edge(rest[0], rest[1]);
    g
}

/// Rooted tree code: `1`, children codes in sorted order, `0`.
fn rooted_code(g: &SmallGraph, v: usize, parent: usize) -> (u32, u64) {
    let mut kids: Vec<(u32, u64)> = Vec::new();
    let mut row = g.neighbors(v);
    while row != 0 {
        let c = row.trailing_zeros() as usize;
        row &= row - 1;
        if c != parent {
            kids.push(rooted_code(g, c, v));
        }
    }
    kids.sort_unstable();
    let mut len = 1u32;
    let mut code = 1u64;
    for (l, c) in kids {
        code = (code << l) | c;
        len += l;
    }
    (len + 1, code << 1)
}

/// Isomorphism key for trees: codes rooted at the center (or both centers).
fn tree_key(g: &SmallGraph) -> (u64, u64) {
    let n = g.order();
    let mut deg: Vec<usize> = g.degrees();
    let mut alive = crate::graph::full_mask(n);
    let mut left = n;
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while left > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            alive &= !(1 << v);
            left -= 1;
            let mut row = g.neighbors(v) & alive;
            while row != 0 {
                let u = row.trailing_zeros() as usize;
                row &= row - 1;
                deg[u] -= 1;
                if deg[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    let centers: Vec<usize> = (0..n).filter(|&v| alive & (1 << v) != 0).collect();
    if centers.len() == 1 {
        let (_, c) = rooted_code(g, centers[0], usize::MAX);
        (0, c)
    } else {
        let a = rooted_code(g, centers[0], centers[1]);
        let b = rooted_code(g, centers[1], centers[0]);
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        (x.1 | (1 << 63), y.1)
    }
}

fn generate(m: usize, exec: Execution) -> Vec<SmallGraph> {
    if m == 2 {
        return vec![SmallGraph::from_edges(2, &[(0, 1)]).expect("edge")];
    }
    let len = m - 2;
    // One task per leading symbol; each yields its distinct trees in order.
    let parts = exec.map_range(m, |first| {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        let mut seq = vec![0usize; len];
        seq[0] = first;
        loop {
            let g = prufer_tree(&seq, m);
            let key = tree_key(&g);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(());
                out.push((key, g));
            }
            // Odometer over positions 1..len.
            let mut i = len;
            loop {
                if i == 1 {
                    return out;
                }
                i -= 1;
                seq[i] += 1;
                if seq[i] < m {
                    break;
                }
                seq[i] = 0;
            }
        }
    });
    let mut classes: BTreeMap<(u64, u64), SmallGraph> = BTreeMap::new();
    for (key, g) in parts.into_iter().flatten() {
        classes.entry(key).or_insert(g);
    }
    classes.into_values().collect()
}

/// Every family description of the tree `g`: path, star, and double stars
/// written with `a >= b`.
pub fn identify_families(g: &SmallGraph) -> Vec<FamilySpec> {
    let m = g.order();
    if !g.is_tree() || m < 2 {
        return Vec::new();
    }
    let form = canonical_form(g);
    let mut out = Vec::new();
    let mut check = |spec: FamilySpec| {
        if let Ok(h) = build_family(&spec) {
            if h.order() == m && canonical_form(&h) == form {
                out.push(spec);
            }
        }
    };
    check(FamilySpec::Path(m));
    if m >= 3 {
        check(FamilySpec::Star(m - 1));
    }
    for k in 2..m {
        for b in 1..m {
            for a in b..m {
                if a + b + k == m {
                    check(FamilySpec::DoubleStar { k, a, b });
                }
            }
        }
    }
    out
}

fn catalog_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<TreeClass>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<TreeClass>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The catalog of order `m`, built once and shared.
pub fn free_trees(m: usize) -> Result<Arc<Vec<TreeClass>>> {
    if !(MIN_TREE_ORDER..=MAX_TREE_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange(m));
    }
    if let Some(c) = catalog_cache().lock().expect("catalog cache").get(&m) {
        return Ok(c.clone());
    }
    let cat = Arc::new(generate_free_trees_with(m, Execution::default())?);
    catalog_cache()
        .lock()
        .expect("catalog cache")
        .insert(m, cat.clone());
    Ok(cat)
}

/// Non-isomorphic trees of order `m` in canonical-form order.
pub fn generate_free_trees(m: usize) -> Result<Vec<TreeClass>> {
    Ok(free_trees(m)?.as_ref().clone())
}

pub fn generate_free_trees_with(m: usize, exec: Execution) -> Result<Vec<TreeClass>> {
    if !(MIN_TREE_ORDER..=MAX_TREE_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange(m));
    }
    let mut forms: Vec<CanonicalForm> = generate(m, exec).iter().map(canonical_form).collect();
    forms.sort_unstable();
    forms.dedup();
    Ok(forms
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let representative = f.graph();
            TreeClass {
                order: m,
                index: i + 1,
                names: identify_families(&representative),
                representative,
            }
        })
        .collect())
}

/// The catalog class isomorphic to the tree `spec` builds.
pub fn resolve_class(spec: &FamilySpec, m: usize) -> Result<TreeClass> {
    let g = build_family(spec)?;
    if g.order() != m || !g.is_tree() {
        return Err(Error::NotATree(m));
    }
    let form = canonical_form(&g);
    free_trees(m)?
        .iter()
        .find(|c| c.form() == form)
        .cloned()
        .ok_or(Error::NotATree(m))
}
