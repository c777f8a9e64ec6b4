//! Tabu search over labelled colorings.
//!
//! Each restart starts from a uniformly random coloring and repeatedly takes
//! the best single-edge flip that is not tabu. A flipped edge stays tabu for
//! `tenure` iterations unless flipping it would beat the best value seen in
//! that restart. Finding objective zero stops everything.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{num_pairs, Coloring, SmallGraph};
use crate::objective::{FlipState, ObjectiveContext, ObjectiveValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuParams {
    /// Iterations per restart.
    pub iterations: u64,
    pub restarts: usize,
    /// Defaults to `ceil(L/4)` for `L` edges.
    pub tenure: Option<usize>,
    pub aspiration: bool,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            iterations: 50_000,
            restarts: 20,
            tenure: None,
            aspiration: true,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

impl TabuParams {
    pub fn tenure_for(&self, n: usize) -> usize {
        self.tenure.unwrap_or_else(|| num_pairs(n).div_ceil(4))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TabuStatus {
    ZeroFound,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuOutcome {
    pub order: usize,
    pub best: Coloring,
    pub value: ObjectiveValue,
    /// Iterations over all restarts that count toward the result.
    pub iterations: u64,
    pub restarts_used: usize,
    pub status: TabuStatus,
}

struct RestartResult {
    best: Coloring,
    value: u64,
    iterations: u64,
}

fn random_coloring(rng: &mut ChaCha8Rng, n: usize) -> Coloring {
    let l = num_pairs(n);
    let mask = if l == 128 {
        u128::MAX
    } else {
        (1u128 << l) - 1
    };
    Coloring::new(n, rng.gen::<u128>() & mask).expect("masked to the edge count")
}

fn one_restart(
    ctx: &ObjectiveContext,
    params: &TabuParams,
    restart: usize,
    stop: &AtomicUsize,
) -> Result<Option<RestartResult>> {
    let n = ctx.order();
    let l = num_pairs(n);
    let tenure = params.tenure_for(n) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(restart as u64);
    let start = random_coloring(&mut rng, n);
    let mut state = FlipState::new(ctx, &start)?;
    let mut best = start;
    let mut best_value = state.value().total;
    let mut tabu_until = vec![0u64; l];
    let mut order: Vec<usize> = (0..l).collect();
    let mut it = 0;
    while best_value > 0 && it < params.iterations {
        if it % 1024 == 0 && stop.load(Ordering::Relaxed) < restart {
            return Ok(None);
        }
        it += 1;
        order.shuffle(&mut rng);
        let current = state.value().total as i64;
        let gains = state.gains();
        let mut pick: Option<(usize, i64)> = None;
        let mut oldest: Option<usize> = None;
        for &k in &order {
            let g = gains[k];
            let allowed =
                tabu_until[k] < it || (params.aspiration && current + g < best_value as i64);
            if allowed {
                if pick.is_none_or(|(_, pg)| g < pg) {
                    pick = Some((k, g));
                }
            } else if oldest.is_none_or(|o| tabu_until[k] < tabu_until[o]) {
                oldest = Some(k);
            }
        }
        let Some(k) = pick.map(|(k, _)| k).or(oldest) else {
            break;
        };
        state.flip(k);
        tabu_until[k] = it + tenure;
        let v = state.value().total;
        if v < best_value {
            best_value = v;
            best = *state.coloring();
        }
    }
    if best_value == 0 {
        stop.fetch_min(restart, Ordering::Relaxed);
    }
    Ok(Some(RestartResult {
        best,
        value: best_value,
        iterations: it,
    }))
}

/// Minimises the objective for `(G, H)` on `K_n`. Bit-reproducible for a
/// fixed seed regardless of execution mode.
pub fn tabu_minimize(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    params: &TabuParams,
) -> Result<TabuOutcome> {
    let ctx = ObjectiveContext::new(n, g, h)?;
    tabu_with_context(&ctx, params)
}

pub fn tabu_with_context(ctx: &ObjectiveContext, params: &TabuParams) -> Result<TabuOutcome> {
    if params.iterations == 0 || params.restarts == 0 {
        return Err(Error::InvalidArgument(
            "tabu needs at least one iteration and one restart".into(),
        ));
    }
    let stop = AtomicUsize::new(usize::MAX);
    let runs = params
        .exec
        .map_range(params.restarts, |r| one_restart(ctx, params, r, &stop));
    let runs: Vec<RestartResult> = runs
        .into_iter()
        .map_while(|r| r.transpose())
        .collect::<Result<_>>()?;
    let winner = runs.iter().position(|r| r.value == 0).unwrap_or_else(|| {
        (0..runs.len())
            .min_by_key(|&i| (runs[i].value, i))
            .expect("at least one restart ran")
    });
    let zero = runs[winner].value == 0;
    let used = if zero { winner + 1 } else { runs.len() };
    let best = runs[winner].best;
    let value = ctx.evaluate(&best)?;
    if value.total != runs[winner].value {
        return Err(Error::Numerical(format!(
            "incremental objective {} disagrees with full evaluation {}",
            runs[winner].value, value.total
        )));
    }
    Ok(TabuOutcome {
        order: ctx.order(),
        best,
        value,
        iterations: runs[..used].iter().map(|r| r.iterations).sum(),
        restarts_used: used,
        status: if zero {
            TabuStatus::ZeroFound
        } else {
            TabuStatus::BudgetExhausted
        },
    })
}
