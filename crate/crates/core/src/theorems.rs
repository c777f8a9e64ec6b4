//! Closed-form values and bounds for tree Ramsey numbers.
//!
//! Each oracle returns an [`OracleVerdict`]. [`applicable_oracles`] recognises
//! paths, stars and double stars in a pattern pair and collects every verdict
//! that applies, for seeding the driver and annotating tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::is_isomorphic;
use crate::catalog::{identify_families, FamilySpec};
use crate::error::{Error, Result};
use crate::graph::SmallGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSource {
    Paths,
    Stars,
    Cockayne,
    BurrErdos,
    Ghk,
    Conjecture,
}

impl fmt::Display for OracleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleSource::Paths => "paths",
            OracleSource::Stars => "stars",
            OracleSource::Cockayne => "cockayne",
            OracleSource::BurrErdos => "burr-erdos",
            OracleSource::Ghk => "ghk",
            OracleSource::Conjecture => "conjecture",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Exact,
    LowerBound,
    UpperBound,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub source: OracleSource,
    pub kind: VerdictKind,
    /// `None` exactly when not applicable.
    pub value: Option<usize>,
}

impl OracleVerdict {
    fn exact(source: OracleSource, v: usize) -> Self {
        Self {
            source,
            kind: VerdictKind::Exact,
            value: Some(v),
        }
    }

    fn na(source: OracleSource) -> Self {
        Self {
            source,
            kind: VerdictKind::NotApplicable,
            value: None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.kind != VerdictKind::NotApplicable
    }

    pub fn exact_value(&self) -> Option<usize> {
        (self.kind == VerdictKind::Exact)
            .then_some(self.value)
            .flatten()
    }

    /// Largest order known to avoid both patterns, if the verdict implies one.
    pub fn strict_lower_bound(&self) -> Option<usize> {
        match self.kind {
            VerdictKind::Exact | VerdictKind::LowerBound => self.value.map(|v| v - 1),
            _ => None,
        }
    }
}

/// `r(P_m, P_n) = n + floor(m/2) - 1` for `2 <= m <= n`.
pub fn path_ramsey(m: usize, n: usize) -> Result<OracleVerdict> {
    if m < 2 || m > n {
        return Err(Error::InvalidArgument(format!(
            "path orders need 2 <= m <= n, got ({m},{n})"
        )));
    }
    Ok(OracleVerdict::exact(OracleSource::Paths, n + m / 2 - 1))
}

/// `r(K_{1,m-1}, K_{1,n-1})`: `m+n-3` when both orders are odd, else `m+n-2`.
pub fn star_ramsey(m: usize, n: usize) -> OracleVerdict {
    if m < 2 || n < 2 {
        return OracleVerdict::na(OracleSource::Stars);
    }
    let v = if m % 2 == 1 && n % 2 == 1 {
        m + n - 3
    } else {
        m + n - 2
    };
    OracleVerdict::exact(OracleSource::Stars, v)
}

fn congruent(x: usize, r: usize, modulus: usize) -> bool {
    x % modulus == r % modulus
}

/// `r(T_m, K_{1,n-1}) = m+n-3` for a tree with a leaf next to a degree-2
/// vertex, under any of four congruence conditions on `n-1`. Needs `m >= 4`:
/// for `m = 3` the tree is the star `K_{1,2}` and the value is wrong.
pub fn cockayne_star(t: &SmallGraph, n: usize) -> Result<OracleVerdict> {
    let m = t.order();
    if !t.is_tree() {
        return Err(Error::NotATree(m));
    }
    let na = OracleVerdict::na(OracleSource::Cockayne);
    if n < 2 || m < 4 {
        return Ok(na);
    }
    let leaf_by_two = t.edges().iter().any(|&(u, v)| {
        let (du, dv) = (t.degree(u), t.degree(v));
        (du == 1 && dv == 2) || (du == 2 && dv == 1)
    });
    if !leaf_by_two {
        return Ok(na);
    }
    let x = n - 1;
    let (m1, m2) = (m - 1, m - 2);
    let c1 = congruent(x, 0, m1) || congruent(x, 2, m1);
    let c2 = !congruent(x, 1, m1) && x >= (m - 3) * (m - 3);
    let c3 = !congruent(x, 1, m1) && congruent(x, 1, m2);
    let c4 = congruent(x, m2, m1) && x > m2;
    if c1 || c2 || c3 || c4 {
        Ok(OracleVerdict::exact(OracleSource::Cockayne, m + n - 3))
    } else {
        Ok(na)
    }
}

fn check_ab(a: usize, b: usize) -> Result<()> {
    if b < 1 || a < b {
        return Err(Error::InvalidArgument(format!(
            "need a >= b >= 1, got ({a},{b})"
        )));
    }
    Ok(())
}

/// Diagonal `r(S^(4)_{a,b}, S^(4)_{a,b}) = max(2a+3, a+2b+5)`.
pub fn burr_erdos_s4(a: usize, b: usize) -> Result<OracleVerdict> {
    check_ab(a, b)?;
    Ok(OracleVerdict::exact(
        OracleSource::BurrErdos,
        (2 * a + 3).max(a + 2 * b + 5),
    ))
}

/// Diagonal `S^(2)_{a,b}`: a lower bound always, exact when `a <= sqrt(2) b`
/// or `a >= 3b`.
pub fn ghk_s2(a: usize, b: usize) -> Result<OracleVerdict> {
    check_ab(a, b)?;
    let v = if a % 2 == 1 && (b == 1 || b == 2) {
        (2 * a + 1).max(a + 2 * b + 2)
    } else {
        (2 * a + 2).max(a + 2 * b + 2)
    };
    // a <= sqrt(2) b  <=>  a^2 <= 2 b^2
    let exact = a * a <= 2 * b * b || a >= 3 * b;
    Ok(OracleVerdict {
        source: OracleSource::Ghk,
        kind: if exact {
            VerdictKind::Exact
        } else {
            VerdictKind::LowerBound
        },
        value: Some(v),
    })
}

/// Conjectured `r(T_m, T_n) <= m+n-2` for all trees.
pub fn conjectured_upper(m: usize, n: usize) -> OracleVerdict {
    if m < 2 || n < 2 {
        return OracleVerdict::na(OracleSource::Conjecture);
    }
    OracleVerdict {
        source: OracleSource::Conjecture,
        kind: VerdictKind::UpperBound,
        value: Some(m + n - 2),
    }
}

/// Every applicable verdict for the pair, sorted and deduplicated.
pub fn applicable_oracles(g: &SmallGraph, h: &SmallGraph) -> Vec<OracleVerdict> {
    let mut out = Vec::new();
    if !g.is_tree() || !h.is_tree() {
        return out;
    }
    let fg = identify_families(g);
    let fh = identify_families(h);
    let path_of = |f: &[FamilySpec]| f.iter().any(|s| matches!(s, FamilySpec::Path(_)));
    let star_of = |f: &[FamilySpec]| f.iter().any(|s| matches!(s, FamilySpec::Star(_)));
    let (m, n) = (g.order(), h.order());
    if path_of(&fg) && path_of(&fh) {
        out.extend(path_ramsey(m.min(n), m.max(n)));
    }
    if star_of(&fg) && star_of(&fh) {
        out.push(star_ramsey(m, n));
    }
    if star_of(&fh) {
        out.extend(cockayne_star(g, n));
    }
    if star_of(&fg) {
        out.extend(cockayne_star(h, m));
    }
    if is_isomorphic(g, h) {
        for spec in &fg {
            if let FamilySpec::DoubleStar { k, a, b } = *spec {
                match k {
                    4 => out.extend(burr_erdos_s4(a, b)),
                    2 => out.extend(ghk_s2(a, b)),
                    _ => {}
                }
            }
        }
    }
    out.push(conjectured_upper(m, n));
    out.retain(|v| v.is_applicable());
    out.sort();
    out.dedup();
    out
}

/// The common exact value of the verdicts, failing if two disagree.
pub fn agreed_exact(verdicts: &[OracleVerdict]) -> Result<Option<usize>> {
    let mut value = None;
    for v in verdicts {
        if let Some(x) = v.exact_value() {
            match value {
                Some(y) if y != x => {
                    return Err(Error::Numerical(format!(
                        "oracles disagree: {y} vs {x} ({})",
                        v.source
                    )));
                }
                _ => value = Some(x),
            }
        }
    }
    Ok(value)
}

/// Largest order the verdicts prove to avoid both patterns.
pub fn strict_lower_bound(verdicts: &[OracleVerdict]) -> Option<usize> {
    verdicts.iter().filter_map(|v| v.strict_lower_bound()).max()
}
