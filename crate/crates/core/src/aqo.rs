//! State-vector simulation of adiabatic quantum optimization.
//!
//! One qubit per edge of `K_N`; basis state `|e>` is the coloring whose edge
//! bit `k` is integer bit `k`. The problem Hamiltonian is diagonal with the
//! objective on that basis, the initial Hamiltonian is `-sum sigma_x`, and
//! `H(t) = A(t/T) H_i + B(t/T) H_P` is integrated by symmetric splitting:
//! half a diagonal phase, an exact rotation per qubit, half a diagonal phase.

use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::driver::{starting_order, Census, Method, RamseyResult, ResultStatus, TraceEntry};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{num_pairs, Coloring, SmallGraph};
use crate::objective::ObjectiveContext;
use crate::search::min_objective_exhaustive;
use crate::theorems::applicable_oracles;

pub const MAX_QUBITS: usize = 20;
/// Allowed deviation of the squared norm from 1 after any step.
pub const NORM_TOLERANCE: f64 = 1e-9;

const CHUNK: usize = 1 << 12;

fn check_qubits(l: usize) -> Result<()> {
    if l > MAX_QUBITS {
        return Err(Error::TooManyQubits(l));
    }
    Ok(())
}

/// The objective of every labelled coloring of `K_N`, indexed by its bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalProblem {
    order: usize,
    diagonal: Vec<u32>,
}

impl DiagonalProblem {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn qubits(&self) -> usize {
        num_pairs(self.order)
    }

    pub fn diagonal(&self) -> &[u32] {
        &self.diagonal
    }

    pub fn min(&self) -> u32 {
        *self
            .diagonal
            .iter()
            .min()
            .expect("at least one basis state")
    }

    pub fn coloring(&self, index: usize) -> Coloring {
        Coloring::new(self.order, index as u128).expect("index below 2^L")
    }
}

pub fn build_problem(n: usize, g: &SmallGraph, h: &SmallGraph) -> Result<DiagonalProblem> {
    build_problem_with(n, g, h, Execution::default())
}

pub fn build_problem_with(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    exec: Execution,
) -> Result<DiagonalProblem> {
    let ctx = ObjectiveContext::new(n, g, h)?;
    let l = num_pairs(n);
    check_qubits(l)?;
    let mut diagonal = vec![0u32; 1 << l];
    exec.for_each_chunk(&mut diagonal, CHUNK, |offset, chunk| {
        for (i, d) in chunk.iter_mut().enumerate() {
            let red = Coloring::new(n, (offset + i) as u128)
                .expect("index below 2^L")
                .red_graph();
            *d = ctx.evaluate_graph(&red).total as u32;
        }
    });
    Ok(DiagonalProblem { order: n, diagonal })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    pub fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn basis(l: usize, index: usize) -> Result<Self> {
        check_qubits(l)?;
        if index >> l != 0 {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} needs more than {l} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<psi| -sum_k sigma_x^k |psi>`.
    pub fn transverse_energy(&self) -> f64 {
        let mut e = 0.0;
        for q in 0..self.qubits() {
            let bit = 1 << q;
            for (i, a) in self.amps.iter().enumerate() {
                e -= (a.conj() * self.amps[i ^ bit]).re;
            }
        }
        e
    }

    /// Probability mass on the basis states of minimum objective.
    pub fn ground_overlap(&self, problem: &DiagonalProblem) -> f64 {
        let min = problem.min();
        self.amps
            .iter()
            .zip(problem.diagonal())
            .filter(|(_, &d)| d == min)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }
}

/// Uniform superposition, the ground state of `-sum sigma_x`.
pub fn initial_state(l: usize) -> Result<QuantumState> {
    check_qubits(l)?;
    let a = (1usize << l) as f64;
    Ok(QuantumState {
        amps: vec![Complex64::new(a.sqrt().recip(), 0.0); 1 << l],
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleShape {
    /// `A = 1 - s`, `B = s`.
    #[default]
    Linear,
    /// `A = cos(pi s / 2)`, `B = sin(pi s / 2)`.
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub shape: ScheduleShape,
    pub runtime: f64,
    pub steps: usize,
}

impl Schedule {
    pub fn linear(runtime: f64, steps: usize) -> Self {
        Self {
            shape: ScheduleShape::Linear,
            runtime,
            steps,
        }
    }

    pub fn a(&self, s: f64) -> f64 {
        match self.shape {
            ScheduleShape::Linear => 1.0 - s,
            ScheduleShape::Sine if s >= 1.0 => 0.0,
            ScheduleShape::Sine => (std::f64::consts::FRAC_PI_2 * s).cos(),
        }
    }

    pub fn b(&self, s: f64) -> f64 {
        match self.shape {
            ScheduleShape::Linear => s,
            ScheduleShape::Sine => (std::f64::consts::FRAC_PI_2 * s).sin(),
        }
    }

    /// Endpoints exact, monotone on a grid, runtime finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidArgument(format!("schedule: {why}")));
        if self.steps == 0 {
            return bad("step count must be at least 1");
        }
        if !self.runtime.is_finite() || self.runtime < 0.0 {
            return bad("runtime must be finite and non-negative");
        }
        if self.a(1.0) != 0.0 || self.b(0.0) != 0.0 {
            return bad("need A(1) = 0 and B(0) = 0");
        }
        let grid: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        for w in grid.windows(2) {
            if self.a(w[1]) > self.a(w[0]) || self.b(w[1]) < self.b(w[0]) {
                return bad("A must decrease and B increase");
            }
        }
        Ok(())
    }
}

/// Integrates `H(t) = a(t/T) H_i + b(t/T) H_P` over `steps` equal steps,
/// sampling the coefficients at each step's midpoint.
pub fn evolve_with<A, B>(
    state: &QuantumState,
    problem: &DiagonalProblem,
    runtime: f64,
    steps: usize,
    a: A,
    b: B,
    exec: Execution,
) -> Result<QuantumState>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "step count must be at least 1".into(),
        ));
    }
    if state.amps.len() != problem.diagonal.len() {
        return Err(Error::SizeMismatch {
            expected: problem.diagonal.len(),
            actual: state.amps.len(),
        });
    }
    let l = state.qubits();
    let dt = runtime / steps as f64;
    let diag = &problem.diagonal;
    let mut amps = state.amps.clone();
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        let half = b(s) * dt / 2.0;
        let phase = |amps: &mut [Complex64]| {
            exec.for_each_chunk(amps, CHUNK, |offset, chunk| {
                for (i, x) in chunk.iter_mut().enumerate() {
                    *x *= Complex64::from_polar(1.0, -half * diag[offset + i] as f64);
                }
            });
        };
        phase(&mut amps);
        // exp(-i theta (-sigma_x)) = cos(theta) + i sin(theta) sigma_x
        let theta = a(s) * dt;
        let (c, sn) = (theta.cos(), theta.sin());
        let is = Complex64::new(0.0, sn);
        for q in 0..l {
            let bit = 1usize << q;
            exec.for_each_chunk(&mut amps, CHUNK.max(bit << 1), |_, chunk| {
                for base in (0..chunk.len()).step_by(bit << 1) {
                    for i in base..base + bit {
                        let (x, y) = (chunk[i], chunk[i + bit]);
                        chunk[i] = x * c + y * is;
                        chunk[i + bit] = y * c + x * is;
                    }
                }
            });
        }
        phase(&mut amps);
        let norm: f64 = amps.iter().map(|x| x.norm_sqr()).sum();
        if !norm.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite amplitude at step {k}"
            )));
        }
        if (norm - 1.0).abs() >= NORM_TOLERANCE {
            return Err(Error::Numerical(format!(
                "norm drifted to {norm} at step {k}"
            )));
        }
    }
    Ok(QuantumState { amps })
}

pub fn evolve(
    state: &QuantumState,
    problem: &DiagonalProblem,
    schedule: &Schedule,
) -> Result<QuantumState> {
    evolve_exec(state, problem, schedule, Execution::default())
}

pub fn evolve_exec(
    state: &QuantumState,
    problem: &DiagonalProblem,
    schedule: &Schedule,
    exec: Execution,
) -> Result<QuantumState> {
    schedule.validate()?;
    evolve_with(
        state,
        problem,
        schedule.runtime,
        schedule.steps,
        |s| schedule.a(s),
        |s| schedule.b(s),
        exec,
    )
}

/// Basis indices sampled from the squared amplitudes.
pub fn measure(state: &QuantumState, shots: usize, seed: u64) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let dist = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::Numerical(format!("cannot sample state: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| dist.sample(&mut rng)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionPlan {
    /// Probability that one run misses every optimal string.
    pub epsilon: f64,
    /// Wanted probability that some run hits one.
    pub delta: f64,
    pub runs: usize,
}

/// `k = ceil(ln(1 - delta) / ln(epsilon))`, at least 1.
pub fn plan_repetitions(epsilon: f64, delta: f64) -> Result<RepetitionPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < epsilon < 1 and 0 < delta < 1, got ({epsilon}, {delta})"
        )));
    }
    let k = ((1.0 - delta).ln() / epsilon.ln() - 1e-9).ceil();
    Ok(RepetitionPlan {
        epsilon,
        delta,
        runs: (k as usize).max(1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AqoConfig {
    pub schedule: Schedule,
    /// Measurements used to estimate the per-run failure rate.
    pub calibration_shots: usize,
    pub confidence: f64,
    pub seed: u64,
    /// Check every order's verdict against exhaustive search.
    pub corroborate: bool,
    pub max_qubits: usize,
    pub exec: Execution,
}

impl Default for AqoConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::linear(20.0, 400),
            calibration_shots: 64,
            confidence: 0.999,
            seed: 0,
            corroborate: true,
            max_qubits: MAX_QUBITS,
            exec: Execution::default(),
        }
    }
}

/// Outcome of simulating one order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AqoRun {
    pub order: usize,
    pub qubits: usize,
    pub ground_overlap: f64,
    pub norm_drift: f64,
    pub plan: Option<RepetitionPlan>,
    /// Objective of each sample, calibration shots first.
    pub sample_values: Vec<u32>,
    pub best: Coloring,
    pub best_value: u32,
}

/// Evolves, estimates the failure rate from calibration shots, then draws
/// the planned number of further runs and keeps the best sample.
pub fn simulate_order(
    n: usize,
    g: &SmallGraph,
    h: &SmallGraph,
    config: &AqoConfig,
) -> Result<AqoRun> {
    let l = num_pairs(n);
    if l > config.max_qubits.min(MAX_QUBITS) {
        return Err(Error::TooManyQubits(l));
    }
    let problem = build_problem_with(n, g, h, config.exec)?;
    let state = evolve_exec(&initial_state(l)?, &problem, &config.schedule, config.exec)?;
    let seed = config.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let calib = measure(&state, config.calibration_shots.max(1), seed)?;
    let values = |idx: &[usize]| idx.iter().map(|&i| problem.diagonal[i]).collect::<Vec<_>>();
    let mut samples = calib.clone();
    let mut sample_values = values(&calib);
    let seen_min = *sample_values.iter().min().expect("at least one shot");
    let misses = sample_values.iter().filter(|&&v| v > seen_min).count();
    let epsilon = misses as f64 / sample_values.len() as f64;
    let plan = if epsilon > 0.0 {
        let p = plan_repetitions(epsilon, config.confidence)?;
        let more = measure(&state, p.runs, seed.wrapping_add(1))?;
        sample_values.extend(values(&more));
        samples.extend(more);
        Some(p)
    } else {
        None
    };
    let best_at = (0..samples.len())
        .min_by_key(|&i| (sample_values[i], i))
        .expect("at least one shot");
    Ok(AqoRun {
        order: n,
        qubits: l,
        ground_overlap: state.ground_overlap(&problem),
        norm_drift: (state.norm_sqr() - 1.0).abs(),
        plan,
        best: problem.coloring(samples[best_at]),
        best_value: sample_values[best_at],
        sample_values,
    })
}

/// The incremental-order algorithm with each order's minimum taken from AQO
/// samples. Exact only when every order is corroborated exhaustively;
/// stops with a lower bound at the qubit cap.
pub fn run_aqo_ramsey(
    g: &SmallGraph,
    h: &SmallGraph,
    config: &AqoConfig,
) -> Result<(RamseyResult, Vec<AqoRun>)> {
    if g.edge_count() == 0 || h.edge_count() == 0 {
        return Err(Error::EdgelessPattern);
    }
    let oracles = applicable_oracles(g, h);
    let mut n = starting_order(g, h, &oracles);
    let mut trace = Vec::new();
    let mut runs = Vec::new();
    let mut corroborated = config.corroborate;
    let finish = |status, value, trace, optimal| RamseyResult {
        red: *g,
        blue: *h,
        status,
        value,
        trace,
        critical: None,
        optimal,
        oracles: oracles.clone(),
    };
    loop {
        if num_pairs(n) > config.max_qubits.min(MAX_QUBITS) {
            return Ok((finish(ResultStatus::LowerBound, n, trace, None), runs));
        }
        let run = simulate_order(n, g, h, config)?;
        trace.push(TraceEntry {
            order: n,
            method: Method::Aqo,
            min: run.best_value as u64,
            witness: Some(run.best),
        });
        let best = run.best_value;
        runs.push(run);
        let mut optimal = None;
        if config.corroborate {
            let report = min_objective_exhaustive(n, g, h, 16)?;
            corroborated &= report.min == best as u64;
            optimal = Some(Census {
                order: n,
                min: report.min,
                count: report.attaining,
                witnesses: report.witnesses,
            });
        }
        if best == 0 {
            n += 1;
            continue;
        }
        let status = if corroborated {
            ResultStatus::Exact
        } else {
            ResultStatus::LowerBound
        };
        return Ok((
            finish(status, n, trace, optimal.filter(|_| corroborated)),
            runs,
        ));
    }
}
