//! The incremental-order Ramsey algorithm.
//!
//! Starting from a strict lower bound, each order is searched for a coloring
//! with objective zero. The first order whose exhaustive minimum is positive
//! is `r(G, H)`. Orders beyond the exhaustive budget fall back to Tabu search,
//! which can only ever report a lower bound. Tabu is not run at orders an
//! exact oracle already shows to be forced.
//!
//! Many pairs are solved together by [`solve_pairs`]: at each step every
//! pending pair at the smallest pending order shares one enumeration pass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{complement_coloring, Coloring, SmallGraph, MAX_ORDER};
use crate::objective::ObjectiveContext;
use crate::search::{search_contexts, Budget, SearchMode, SearchOptions};
use crate::tabu::{tabu_with_context, TabuParams, TabuStatus};
use crate::theorems::{agreed_exact, applicable_oracles, strict_lower_bound, OracleVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultStatus {
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    Tabu,
    Aqo,
}

/// What was learned at one order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub order: usize,
    pub method: Method,
    /// Exact minimum for exhaustive entries, best found otherwise.
    pub min: u64,
    /// A coloring attaining `min`.
    pub witness: Option<Coloring>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub order: usize,
    pub min: u64,
    /// Number of unlabelled colorings attaining `min`.
    pub count: u64,
    /// Up to the witness cap, smallest canonical form first.
    pub witnesses: Vec<Coloring>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyResult {
    pub red: SmallGraph,
    pub blue: SmallGraph,
    pub status: ResultStatus,
    /// `r(G, H)` when exact, otherwise a proven lower bound.
    pub value: usize,
    pub trace: Vec<TraceEntry>,
    /// Zero-objective classes at `r - 1`.
    pub critical: Option<Census>,
    /// Minimum-objective classes at `r`.
    pub optimal: Option<Census>,
    pub oracles: Vec<OracleVerdict>,
}

impl RamseyResult {
    /// Same result with the colors interchanged, as for `r(H, G)`.
    pub fn mirrored(&self) -> Self {
        let flip = |c: &Coloring| complement_coloring(c);
        let census = |c: &Census| Census {
            witnesses: {
                let mut w: Vec<Coloring> = c
                    .witnesses
                    .iter()
                    .map(|e| canonical_coloring(&flip(e)))
                    .collect();
                w.sort_by_key(|e| e.bits());
                w
            },
            ..c.clone()
        };
        Self {
            red: self.blue,
            blue: self.red,
            status: self.status,
            value: self.value,
            trace: self
                .trace
                .iter()
                .map(|t| TraceEntry {
                    witness: t.witness.as_ref().map(flip),
                    ..t.clone()
                })
                .collect(),
            critical: self.critical.as_ref().map(census),
            optimal: self.optimal.as_ref().map(census),
            oracles: self.oracles.clone(),
        }
    }

    /// Re-evaluates every witness with a full objective evaluation and checks
    /// the trace is consecutive and consistent with the status.
    pub fn verify(&self) -> Result<()> {
        let bad = |why: String| Err(Error::Numerical(why));
        for w in self.trace.windows(2) {
            if w[1].order != w[0].order + 1 {
                return bad(format!(
                    "trace orders {} and {} not consecutive",
                    w[0].order, w[1].order
                ));
            }
        }
        let check = |n: usize, e: &Coloring, want: u64| -> Result<()> {
            let got = ObjectiveContext::new(n, &self.red, &self.blue)?
                .evaluate(e)?
                .total;
            if got != want {
                return Err(Error::Numerical(format!(
                    "witness at order {n} evaluates to {got}, expected {want}"
                )));
            }
            Ok(())
        };
        for t in &self.trace {
            if let Some(e) = &t.witness {
                check(t.order, e, t.min)?;
            }
        }
        for c in self.critical.iter().chain(&self.optimal) {
            for e in &c.witnesses {
                check(c.order, e, c.min)?;
            }
        }
        if self.status == ResultStatus::Exact {
            let Some((last, before)) = self.trace.split_last() else {
                return bad("exact result without a trace".into());
            };
            if last.order != self.value || last.method == Method::Tabu || last.min == 0 {
                return bad(format!(
                    "order {} is not an exhaustively positive order",
                    self.value
                ));
            }
            if before.iter().any(|t| t.min != 0 || t.witness.is_none()) {
                return bad("an order below r lacks a zero witness".into());
            }
        }
        Ok(())
    }
}

fn canonical_coloring(e: &Coloring) -> Coloring {
    Coloring::new(e.order(), canonical_form(&e.red_graph()).bits()).expect("same order")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriverOptions {
    pub budget: Budget,
    /// Also count zero-objective classes at `r - 1`.
    pub census: bool,
    /// Witnesses kept per census.
    pub witness_cap: usize,
    pub tabu: TabuParams,
    pub exec: Execution,
}

impl Default for DriverOptions {
    fn default() -> Self {
        Self {
            budget: Budget::Default,
            census: false,
            witness_cap: 64,
            tabu: TabuParams::default(),
            exec: Execution::default(),
        }
    }
}

/// Order to start the sweep at: one that provably avoids both patterns.
pub fn starting_order(g: &SmallGraph, h: &SmallGraph, oracles: &[OracleVerdict]) -> usize {
    let trivial = g.order().max(h.order()).saturating_sub(1).max(1);
    strict_lower_bound(oracles).map_or(trivial, |b| b.max(trivial))
}

struct Pending {
    slot: usize,
    ctx: ObjectiveContext,
    n: usize,
    trace: Vec<TraceEntry>,
    oracles: Vec<OracleVerdict>,
    outcome: Option<Result<(ResultStatus, Option<Census>)>>,
}

fn census_from(report: &crate::search::SearchReport) -> Census {
    Census {
        order: report.order,
        min: report.min,
        count: report.attaining,
        witnesses: report.witnesses.clone(),
    }
}

fn setup(slot: usize, g: &SmallGraph, h: &SmallGraph) -> Result<Pending> {
    if g.edge_count() == 0 || h.edge_count() == 0 {
        return Err(Error::EdgelessPattern);
    }
    let oracles = applicable_oracles(g, h);
    agreed_exact(&oracles)?;
    let n = starting_order(g, h, &oracles);
    Ok(Pending {
        slot,
        ctx: ObjectiveContext::new(n, g, h)?,
        n,
        trace: Vec::new(),
        oracles,
        outcome: None,
    })
}

/// Solves every pair; errors are reported per pair.
pub fn solve_pairs(
    pairs: &[(SmallGraph, SmallGraph)],
    opts: &DriverOptions,
) -> Vec<Result<RamseyResult>> {
    let mut results: Vec<Result<RamseyResult>> =
        vec![Err(Error::Table("unsolved".into())); pairs.len()];
    let mut states = Vec::new();
    for (slot, (g, h)) in pairs.iter().enumerate() {
        match setup(slot, g, h) {
            Ok(s) => states.push(s),
            Err(e) => results[slot] = Err(e),
        }
    }

    let search_opts = SearchOptions {
        mode: SearchMode::FirstZero,
        budget: opts.budget,
        witness_cap: opts.witness_cap.max(1),
        exec: opts.exec,
    };
    while let Some(n) = states
        .iter()
        .filter(|s| s.outcome.is_none())
        .map(|s| s.n)
        .min()
    {
        let group: Vec<usize> = (0..states.len())
            .filter(|&i| states[i].outcome.is_none() && states[i].n == n)
            .collect();
        if n > MAX_ORDER {
            for &i in &group {
                states[i].outcome = Some(Ok((ResultStatus::LowerBound, None)));
            }
            continue;
        }
        let ctxs: Vec<ObjectiveContext> = group
            .iter()
            .map(|&i| states[i].ctx.at_order(n).expect("order checked"))
            .collect();
        if n <= opts.budget.max_order() {
            match search_contexts(&ctxs, &search_opts) {
                Ok(reports) => {
                    for (&i, r) in group.iter().zip(&reports) {
                        let s = &mut states[i];
                        s.trace.push(TraceEntry {
                            order: n,
                            method: Method::Exhaustive,
                            min: r.min,
                            witness: r.witnesses.first().copied(),
                        });
                        if r.min == 0 {
                            s.n += 1;
                        } else if s.trace.len() == 1 && n > 1 {
                            s.outcome = Some(Err(Error::Numerical(format!(
                                "starting order {n} already forces a pattern; the seeding bound is wrong"
                            ))));
                        } else {
                            s.outcome = Some(Ok((ResultStatus::Exact, Some(census_from(r)))));
                        }
                    }
                }
                Err(e) => {
                    for &i in &group {
                        states[i].outcome = Some(Err(e.clone()));
                    }
                }
            }
        } else {
            for (&i, ctx) in group.iter().zip(&ctxs) {
                let s = &mut states[i];
                if matches!(agreed_exact(&s.oracles), Ok(Some(v)) if n >= v) {
                    s.outcome = Some(Ok((ResultStatus::LowerBound, None)));
                    continue;
                }
                match tabu_with_context(ctx, &opts.tabu) {
                    Ok(t) => {
                        s.trace.push(TraceEntry {
                            order: n,
                            method: Method::Tabu,
                            min: t.value.total,
                            witness: Some(t.best),
                        });
                        if t.status == TabuStatus::ZeroFound {
                            s.n += 1;
                        } else {
                            s.outcome = Some(Ok((ResultStatus::LowerBound, None)));
                        }
                    }
                    Err(e) => s.outcome = Some(Err(e)),
                }
            }
        }
    }

    for s in states {
        results[s.slot] = s
            .outcome
            .expect("loop resolves every pair")
            .map(|(status, optimal)| RamseyResult {
                red: *s.ctx.red_pattern(),
                blue: *s.ctx.blue_pattern(),
                status,
                value: s.n,
                trace: s.trace,
                critical: None,
                optimal,
                oracles: s.oracles,
            });
    }
    if opts.census {
        attach_critical(&mut results, opts);
    }
    results
}

fn attach_critical(results: &mut [Result<RamseyResult>], opts: &DriverOptions) {
    let mut by_order: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in results.iter().enumerate() {
        if let Ok(r) = r {
            if r.status == ResultStatus::Exact && r.value >= 2 {
                by_order.entry(r.value - 1).or_default().push(i);
            }
        }
    }
    let census_opts = SearchOptions {
        mode: SearchMode::Census,
        budget: opts.budget,
        witness_cap: opts.witness_cap,
        exec: opts.exec,
    };
    for (n, idx) in by_order {
        let ctxs: Result<Vec<ObjectiveContext>> = idx
            .iter()
            .map(|&i| {
                let r = results[i].as_ref().expect("only successes are grouped");
                ObjectiveContext::new(n, &r.red, &r.blue)
            })
            .collect();
        match ctxs.and_then(|c| search_contexts(&c, &census_opts)) {
            Ok(reports) => {
                for (&i, rep) in idx.iter().zip(&reports) {
                    if let Ok(r) = &mut results[i] {
                        r.critical = Some(census_from(rep));
                    }
                }
            }
            Err(e) => {
                for &i in &idx {
                    results[i] = Err(e.clone());
                }
            }
        }
    }
}

/// `r(G, H)` or a lower bound for it.
pub fn compute_ramsey(
    g: &SmallGraph,
    h: &SmallGraph,
    opts: &DriverOptions,
) -> Result<RamseyResult> {
    solve_pairs(&[(*g, *h)], opts).remove(0)
}

/// All pairs of `rows` x `cols`. Each unordered isomorphism class pair is
/// solved once and the transposed cell filled by interchanging colors.
pub fn compute_table(
    rows: &[SmallGraph],
    cols: &[SmallGraph],
    opts: &DriverOptions,
) -> Vec<Vec<Result<RamseyResult>>> {
    let rf: Vec<_> = rows.iter().map(canonical_form).collect();
    let cf: Vec<_> = cols.iter().map(canonical_form).collect();
    let mut slot = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut cells = vec![vec![(0usize, false); cols.len()]; rows.len()];
    for i in 0..rows.len() {
        for j in 0..cols.len() {
            let (a, b) = (rf[i], cf[j]);
            if let Some(&k) = slot.get(&(a, b)) {
                cells[i][j] = (k, false);
            } else if let Some(&k) = slot.get(&(b, a)) {
                cells[i][j] = (k, true);
            } else {
                slot.insert((a, b), pairs.len());
                cells[i][j] = (pairs.len(), false);
                pairs.push((rows[i], cols[j]));
            }
        }
    }
    let solved = solve_pairs(&pairs, opts);
    cells
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, (k, swap))| {
                    let r = solved[k].clone()?;
                    let r = if swap { r.mirrored() } else { r };
                    Ok(RamseyResult {
                        red: rows[i],
                        blue: cols[j],
                        ..r
                    })
                })
                .collect()
        })
        .collect()
}
