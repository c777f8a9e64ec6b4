//! Exhaustive minimisation of the objective over unlabelled colorings.
//!
//! The enumerated graph is the red graph and its complement the blue one,
//! so one isomorph-free pass covers every coloring class of `K_N` once.
//! Several pattern pairs at the same order can share a single pass.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Coloring, SmallGraph};
use crate::isogen::{fold_classes, MAX_ENUM_ORDER};
use crate::objective::ObjectiveContext;

/// Witness limit for full censuses.
pub const CENSUS_WITNESS_LIMIT: usize = 1_000_000;

/// How far exhaustive enumeration may go.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Budget {
    /// Up to order 9 (274,668 classes).
    #[default]
    Default,
    /// Up to order 10 (about 12 million classes).
    Extended,
    /// Up to order 11 (about 10^9 classes).
    Heroic,
}

impl Budget {
    pub fn max_order(self) -> usize {
        match self {
            Budget::Default => 9,
            Budget::Extended => 10,
            Budget::Heroic => 11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Budget::Default => "default",
            Budget::Extended => "extended",
            Budget::Heroic => "heroic",
        }
    }

    /// Smallest budget that covers order `n`.
    pub fn for_order(n: usize) -> Result<Self> {
        [Budget::Default, Budget::Extended, Budget::Heroic]
            .into_iter()
            .find(|b| n <= b.max_order())
            .ok_or(Error::BudgetExceeded {
                order: n,
                budget: "heroic",
                max: MAX_ENUM_ORDER,
            })
    }

    pub fn check(self, n: usize) -> Result<()> {
        if n > self.max_order() {
            return Err(Error::BudgetExceeded {
                order: n,
                budget: self.name(),
                max: self.max_order(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Stop at the first zero-objective class.
    FirstZero,
    /// Minimum and the number of classes attaining it.
    #[default]
    Census,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub budget: Budget,
    pub witness_cap: usize,
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Census,
            budget: Budget::Default,
            witness_cap: 16,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub order: usize,
    pub mode: SearchMode,
    /// Minimum objective over the classes examined.
    pub min: u64,
    /// Classes attaining `min`; a lower bound when `complete` is false.
    pub attaining: u64,
    /// Whether every class was examined.
    pub complete: bool,
    /// Canonical representatives attaining `min`, smallest first, at most
    /// the witness cap.
    pub witnesses: Vec<Coloring>,
    pub classes_examined: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Timing is excluded from equality.
impl PartialEq for SearchReport {
    fn eq(&self, o: &Self) -> bool {
        (
            self.order,
            self.mode,
            self.min,
            self.attaining,
            self.complete,
            &self.witnesses,
            self.classes_examined,
        ) == (
            o.order,
            o.mode,
            o.min,
            o.attaining,
            o.complete,
            &o.witnesses,
            o.classes_examined,
        )
    }
}

impl Eq for SearchReport {}

#[derive(Clone, Debug)]
struct PairAcc {
    min: u64,
    count: u64,
    witnesses: Vec<u128>,
    examined: u64,
    zero: bool,
}

impl PairAcc {
    fn new() -> Self {
        Self {
            min: u64::MAX,
            count: 0,
            witnesses: Vec::new(),
            examined: 0,
            zero: false,
        }
    }
}

fn insert_capped(list: &mut Vec<u128>, key: u128, cap: usize) {
    if cap == 0 {
        return;
    }
    if list.len() == cap && key >= *list.last().expect("non-empty") {
        return;
    }
    let at = list.binary_search(&key).unwrap_or_else(|i| i);
    list.insert(at, key);
    list.truncate(cap);
}

/// One enumeration pass scoring every context (all of the same order).
pub fn search_contexts(
    ctxs: &[ObjectiveContext],
    opts: &SearchOptions,
) -> Result<Vec<SearchReport>> {
    let Some(first) = ctxs.first() else {
        return Ok(Vec::new());
    };
    let n = first.order();
    if ctxs.iter().any(|c| c.order() != n) {
        return Err(Error::InvalidArgument(
            "contexts in one pass must share the order".into(),
        ));
    }
    opts.budget.check(n)?;
    let started = Instant::now();
    let first_zero = opts.mode == SearchMode::FirstZero;
    let cap = opts.witness_cap;
    let done_at: Vec<AtomicUsize> = ctxs.iter().map(|_| AtomicUsize::new(usize::MAX)).collect();

    let tasks = fold_classes(
        n,
        opts.exec,
        |i| (i, vec![PairAcc::new(); ctxs.len()]),
        |(task, accs): &mut (usize, Vec<PairAcc>), g: &SmallGraph| {
            let mut all_done = first_zero;
            let mut key = None;
            for (p, (ctx, acc)) in ctxs.iter().zip(accs.iter_mut()).enumerate() {
                if first_zero && (acc.zero || done_at[p].load(Ordering::Relaxed) < *task) {
                    continue;
                }
                let v = ctx.total_capped(g, acc.min);
                acc.examined += 1;
                if v <= acc.min {
                    if v < acc.min {
                        acc.min = v;
                        acc.count = 0;
                        acc.witnesses.clear();
                    }
                    acc.count += 1;
                    let k = *key.get_or_insert_with(|| canonical_form(g).bits());
                    insert_capped(&mut acc.witnesses, k, cap);
                }
                if first_zero && v == 0 {
                    acc.zero = true;
                    done_at[p].fetch_min(*task, Ordering::Relaxed);
                } else {
                    all_done = false;
                }
            }
            if first_zero && all_done {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    let wall_time = started.elapsed();

    let reports = (0..ctxs.len())
        .map(|p| {
            let win = tasks.iter().position(|(_, a)| a[p].zero);
            let mut report = SearchReport {
                order: n,
                mode: opts.mode,
                min: u64::MAX,
                attaining: 0,
                complete: true,
                witnesses: Vec::new(),
                classes_examined: 0,
                wall_time,
            };
            let mut keys = Vec::new();
            if let Some(w) = win {
                let acc = &tasks[w].1[p];
                report.min = 0;
                report.attaining = 1;
                report.complete = false;
                keys = acc.witnesses.clone();
                keys.truncate(1.min(cap));
                report.classes_examined = tasks[..=w].iter().map(|(_, a)| a[p].examined).sum();
            } else {
                for (_, accs) in &tasks {
                    let acc = &accs[p];
                    report.classes_examined += acc.examined;
                    if acc.min < report.min {
                        report.min = acc.min;
                        report.attaining = 0;
                        keys.clear();
                    }
                    if acc.min == report.min {
                        report.attaining += acc.count;
                        for &k in &acc.witnesses {
                            insert_capped(&mut keys, k, cap);
                        }
                    }
                }
            }
            report.witnesses = keys
                .into_iter()
                .map(|k| Coloring::new(n, k).expect("canonical bits fit the order"))
                .collect();
            report
        })
        .collect();
    Ok(reports)
}

/// Search one pattern pair at order `n` under `opts`.
pub fn run_search(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    let ctx = ObjectiveContext::new(n, g, h)?;
    Ok(search_contexts(std::slice::from_ref(&ctx), opts)?.remove(0))
}

/// Minimum and attaining-class count over every coloring class of `K_n`.
pub fn min_objective_exhaustive(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    witness_cap: usize,
) -> Result<SearchReport> {
    let opts = SearchOptions {
        budget: Budget::for_order(n)?,
        witness_cap,
        ..SearchOptions::default()
    };
    run_search(n, g, h, &opts)
}

/// Full census with every attaining class as a witness.
pub fn census_at(n: usize, g: &SmallGraph, h: &SmallGraph) -> Result<SearchReport> {
    census_with(n, g, h, Budget::for_order(n)?, Execution::default())
}

pub fn census_with(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    budget: Budget,
    exec: Execution,
) -> Result<SearchReport> {
    let opts = SearchOptions {
        mode: SearchMode::Census,
        budget,
        witness_cap: CENSUS_WITNESS_LIMIT + 1,
        exec,
    };
    let r = run_search(n, g, h, &opts)?;
    if r.attaining as usize > CENSUS_WITNESS_LIMIT {
        return Err(Error::WitnessOverflow(CENSUS_WITNESS_LIMIT));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_family, FamilySpec};

    fn fam(s: FamilySpec) -> SmallGraph {
        build_family(&s).unwrap()
    }

    #[test]
    fn tiny_orders() {
        let p3 = fam(FamilySpec::Path(3));
        let r = census_at(2, &p3, &p3).unwrap();
        assert_eq!((r.min, r.attaining, r.complete), (0, 2, true));
        let r = census_at(3, &p3, &p3).unwrap();
        assert_eq!(r.min, 1);
        assert_eq!(r.attaining, 4);
        let r = census_at(1, &p3, &p3).unwrap();
        assert_eq!((r.min, r.attaining), (0, 1));
    }

    #[test]
    fn triangle_pair() {
        let k3 = SmallGraph::complete(3).unwrap();
        let r5 = census_at(5, &k3, &k3).unwrap();
        assert_eq!((r5.min, r5.attaining), (0, 1));
        let c5 = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert!(crate::canon::is_isomorphic(
            &r5.witnesses[0].red_graph(),
            &c5
        ));
        let r6 = census_at(6, &k3, &k3).unwrap();
        assert_eq!(r6.min, 2);
    }

    #[test]
    fn witnesses_attain_min_and_modes_agree() {
        let g = fam(FamilySpec::Path(5));
        let h = fam(FamilySpec::Star(3));
        for n in 4..=7 {
            let ctx = ObjectiveContext::new(n, &g, &h).unwrap();
            let seq = SearchOptions {
                exec: Execution::Sequential,
                witness_cap: 1000,
                ..Default::default()
            };
            let par = SearchOptions {
                exec: Execution::Parallel,
                ..seq
            };
            let a = run_search(n, &g, &h, &seq).unwrap();
            let b = run_search(n, &g, &h, &par).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.witnesses.len() as u64, a.attaining);
            for w in &a.witnesses {
                assert_eq!(ctx.evaluate(w).unwrap().total, a.min);
            }
            let fz = SearchOptions {
                mode: SearchMode::FirstZero,
                ..seq
            };
            let z = run_search(n, &g, &h, &fz).unwrap();
            assert_eq!(z.min == 0, a.min == 0);
            if a.min > 0 {
                assert_eq!((z.min, z.attaining, z.complete), (a.min, a.attaining, true));
            }
            let zp = run_search(
                n,
                &g,
                &h,
                &SearchOptions {
                    exec: Execution::Parallel,
                    ..fz
                },
            )
            .unwrap();
            assert_eq!(z, zp);
        }
    }

    #[test]
    fn batch_equals_single() {
        let pats = [
            fam(FamilySpec::Path(4)),
            fam(FamilySpec::Star(3)),
            fam(FamilySpec::Path(5)),
            SmallGraph::complete(3).unwrap(),
        ];
        for mode in [SearchMode::FirstZero, SearchMode::Census] {
            let opts = SearchOptions {
                mode,
                ..Default::default()
            };
            for n in [5, 6] {
                let mut ctxs = Vec::new();
                for g in &pats {
                    for h in &pats {
                        ctxs.push(ObjectiveContext::new(n, g, h).unwrap());
                    }
                }
                let batch = search_contexts(&ctxs, &opts).unwrap();
                for (ctx, r) in ctxs.iter().zip(&batch) {
                    let single =
                        run_search(n, ctx.red_pattern(), ctx.blue_pattern(), &opts).unwrap();
                    assert_eq!(&single, r);
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p3 = fam(FamilySpec::Path(3));
        let err = run_search(10, &p3, &p3, &SearchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { order: 10, .. }));
        assert!(Budget::for_order(12).is_err());
        assert_eq!(Budget::for_order(10).unwrap(), Budget::Extended);
    }
}
