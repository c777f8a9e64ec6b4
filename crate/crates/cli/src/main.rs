//! `ramsey`: command-line access to enumeration, search and Ramsey tables.
//!
//! Exit codes: 0 success, 2 invalid input, 3 only a lower bound was
//! established, 4 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ramsey_cli::config::{load_config, ConfigError, Effective, Settings, TabuSection};
use ramsey_cli::manifest::{result_bytes, Recorder};
use ramsey_cli::table::{emit_table, TableDocument, TableError, TableFormat};
use ramsey_core::aqo::{
    build_problem_with, evolve_exec, initial_state, run_aqo_ramsey, simulate_order, Schedule,
};
use ramsey_core::catalog::{build_family, free_trees, FamilySpec};
use ramsey_core::driver::{compute_ramsey, compute_table, ResultStatus};
use ramsey_core::exec::Execution;
use ramsey_core::isogen::{count_unlabelled, GenerationCursor};
use ramsey_core::objective::ObjectiveContext;
use ramsey_core::search::{run_search, Budget, SearchMode, SearchOptions};
use ramsey_core::tabu::{tabu_minimize, TabuStatus};
use ramsey_core::theorems::applicable_oracles;
use ramsey_core::{Coloring, SmallGraph};

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Generalized Ramsey numbers for small graphs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Common {
    /// TOML settings file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for result files and the manifest log. Defaults to
    /// `$RAMSEY_RUN_DIR`, then `runs`.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    budget: Option<BudgetArg>,
    /// Shorthand for `--budget extended`.
    #[arg(long, global = true)]
    extended: bool,
    #[arg(long, global = true, value_enum)]
    exec: Option<ExecArg>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum BudgetArg {
    Default,
    Extended,
    Heroic,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum ExecArg {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum ModeArg {
    FirstZero,
    Census,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum OutArg {
    Csv,
    Json,
    Text,
}

#[derive(Args, Serialize)]
struct Pair {
    /// Red pattern, e.g. `P6`, `K1,5`, `S4:1,1`, `T6.3`, `K3`.
    #[arg(long)]
    red: String,
    #[arg(long)]
    blue: String,
}

impl Pair {
    fn graphs(&self) -> Result<(SmallGraph, SmallGraph)> {
        Ok((spec_graph(&self.red)?, spec_graph(&self.blue)?))
    }
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// List the free trees of one order with their family names.
    Trees {
        #[arg(long)]
        order: usize,
    },
    /// Count unlabelled 2-colorings of K_N, optionally in resumable pieces.
    Enumerate {
        #[arg(long, required_unless_present = "resume")]
        order: Option<usize>,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long, default_value_t = 0)]
        shard: usize,
        /// Stop after this many classes and print a checkpoint.
        #[arg(long)]
        limit: Option<u64>,
        /// Continue from a checkpoint token.
        #[arg(long)]
        resume: Option<String>,
    },
    /// Objective of one coloring.
    Objective {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        pair: Pair,
        /// Edge bits in edge-index order, 1 = red.
        #[arg(long)]
        bits: String,
    },
    /// Exhaustive minimum over unlabelled colorings.
    Search {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "census")]
        mode: ModeArg,
        #[arg(long)]
        witness_cap: Option<usize>,
        /// Write witnesses, one coloring per line.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Heuristic minimisation over labelled colorings.
    Tabu {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        iters: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        tenure: Option<usize>,
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Known closed-form values and bounds for the pair.
    Oracle {
        #[command(flatten)]
        pair: Pair,
    },
    /// Compute r(G, H) by increasing the order until no zero remains.
    Ramsey {
        #[command(flatten)]
        pair: Pair,
        /// Also count the critical colorings at r - 1.
        #[arg(long)]
        census: bool,
    },
    /// r for every pair of trees of two orders.
    Table {
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        orders: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        out: OutArg,
        #[arg(long)]
        census: bool,
    },
    /// Simulated adiabatic optimization; CSV of samples and an overlap sweep.
    Aqo {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        runtime: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        shots: Option<usize>,
        /// Comma-separated runtimes for the overlap sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<f64>,
        /// Run the incremental-order algorithm instead of one order.
        #[arg(long)]
        ramsey: bool,
    },
}

fn spec_graph(s: &str) -> Result<SmallGraph> {
    let spec: FamilySpec = s.parse()?;
    Ok(build_family(&spec)?)
}

fn flag_settings(c: &Common) -> Settings {
    let budget = if c.extended {
        Some(Budget::Extended)
    } else {
        c.budget.map(|b| match b {
            BudgetArg::Default => Budget::Default,
            BudgetArg::Extended => Budget::Extended,
            BudgetArg::Heroic => Budget::Heroic,
        })
    };
    Settings {
        budget,
        seed: c.seed,
        run_dir: c.run_dir.clone(),
        execution: c.exec.map(|e| match e {
            ExecArg::Sequential => Execution::Sequential,
            ExecArg::Parallel => Execution::Parallel,
        }),
        ..Default::default()
    }
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Trees { .. } => "trees",
        Command::Enumerate { .. } => "enumerate",
        Command::Objective { .. } => "objective",
        Command::Search { .. } => "search",
        Command::Tabu { .. } => "tabu",
        Command::Oracle { .. } => "oracle",
        Command::Ramsey { .. } => "ramsey",
        Command::Table { .. } => "table",
        Command::Aqo { .. } => "aqo",
    }
}

/// Output text plus whether only a lower bound was reached.
struct Outcome {
    text: Vec<u8>,
    lower_bound: bool,
}

fn json<T: Serialize>(v: &T) -> Result<Outcome> {
    Ok(Outcome {
        text: result_bytes(v)?,
        lower_bound: false,
    })
}

fn write_witnesses(path: &Option<PathBuf>, ws: &[Coloring]) -> Result<()> {
    if let Some(p) = path {
        let text: String = ws.iter().map(|w| format!("{w}\n")).collect();
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cmd: &Command, eff: &Effective) -> Result<Outcome> {
    match cmd {
        Command::Trees { order } => {
            #[derive(Serialize)]
            struct Row {
                label: String,
                graph: SmallGraph,
            }
            let rows: Vec<Row> = free_trees(*order)?
                .iter()
                .map(|c| Row {
                    label: c.label(),
                    graph: c.representative,
                })
                .collect();
            json(&rows)
        }
        Command::Enumerate {
            order,
            shards,
            shard,
            limit,
            resume,
        } => {
            #[derive(Serialize)]
            struct Count {
                order: usize,
                classes: u64,
                finished: bool,
                checkpoint: Option<String>,
            }
            let order = order.unwrap_or(0);
            if resume.is_none() && limit.is_none() && *shards == 1 {
                eff.budget.check(order)?;
                let r = count_unlabelled(order, eff.exec)?;
                return json(&Count {
                    order,
                    classes: r.unlabelled,
                    finished: true,
                    checkpoint: None,
                });
            }
            let mut cur = match resume {
                Some(t) => GenerationCursor::from_checkpoint(t)?,
                None => GenerationCursor::sharded(order, *shard, *shards)?,
            };
            eff.budget.check(cur.order())?;
            let p = cur.run(*limit, |_| {})?;
            json(&Count {
                order: cur.order(),
                classes: p.visited,
                finished: p.finished,
                checkpoint: (!p.finished).then(|| cur.checkpoint()),
            })
        }
        Command::Objective { order, pair, bits } => {
            let (g, h) = pair.graphs()?;
            let ctx = ObjectiveContext::new(*order, &g, &h)?;
            json(&ctx.evaluate(&Coloring::from_bitstring(*order, bits)?)?)
        }
        Command::Search {
            order,
            pair,
            mode,
            witness_cap,
            witness_out,
        } => {
            let (g, h) = pair.graphs()?;
            let opts = SearchOptions {
                mode: match mode {
                    ModeArg::FirstZero => SearchMode::FirstZero,
                    ModeArg::Census => SearchMode::Census,
                },
                budget: eff.budget,
                witness_cap: witness_cap.unwrap_or(eff.witness_cap),
                exec: eff.exec,
            };
            let r = run_search(*order, &g, &h, &opts)?;
            write_witnesses(witness_out, &r.witnesses)?;
            json(&r)
        }
        Command::Tabu {
            order,
            pair,
            witness_out,
            ..
        } => {
            let (g, h) = pair.graphs()?;
            let out = tabu_minimize(*order, &g, &h, &eff.tabu)?;
            write_witnesses(witness_out, &[out.best])?;
            let mut o = json(&out)?;
            o.lower_bound = out.status == TabuStatus::BudgetExhausted;
            Ok(o)
        }
        Command::Oracle { pair } => {
            let (g, h) = pair.graphs()?;
            json(&applicable_oracles(&g, &h))
        }
        Command::Ramsey { pair, .. } => {
            let (g, h) = pair.graphs()?;
            let r = compute_ramsey(&g, &h, &eff.driver())?;
            r.verify()?;
            let mut o = json(&r)?;
            o.lower_bound = r.status == ResultStatus::LowerBound;
            Ok(o)
        }
        Command::Table { orders, out, .. } => {
            let (rows, cols) = (free_trees(orders[0])?, free_trees(orders[1])?);
            let rg: Vec<SmallGraph> = rows.iter().map(|c| c.representative).collect();
            let cg: Vec<SmallGraph> = cols.iter().map(|c| c.representative).collect();
            let results = compute_table(&rg, &cg, &eff.driver());
            let lower_bound = results
                .iter()
                .flatten()
                .any(|r| !matches!(r, Ok(x) if x.status == ResultStatus::Exact));
            let doc = TableDocument::from_results(&rows, &cols, &results)?;
            let format = match out {
                OutArg::Csv => TableFormat::Csv,
                OutArg::Json => TableFormat::Json,
                OutArg::Text => TableFormat::Text,
            };
            Ok(Outcome {
                text: emit_table(&doc, format)?.into_bytes(),
                lower_bound,
            })
        }
        Command::Aqo {
            pair,
            order,
            sweep,
            ramsey,
            ..
        } => {
            let (g, h) = pair.graphs()?;
            let cfg = eff.aqo;
            if *ramsey {
                let (r, runs) = run_aqo_ramsey(&g, &h, &cfg)?;
                #[derive(Serialize)]
                struct Both<'a> {
                    result: &'a ramsey_core::driver::RamseyResult,
                    runs: &'a [ramsey_core::aqo::AqoRun],
                }
                let mut o = json(&Both {
                    result: &r,
                    runs: &runs,
                })?;
                o.lower_bound = r.status == ResultStatus::LowerBound;
                return Ok(o);
            }
            let n = order.ok_or_else(|| {
                ramsey_core::Error::InvalidArgument("--order is required without --ramsey".into())
            })?;
            let run = simulate_order(n, &g, &h, &cfg)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["kind", "index", "runtime", "objective", "overlap"])?;
            let rt = cfg.schedule.runtime.to_string();
            for (i, v) in run.sample_values.iter().enumerate() {
                w.write_record(["sample", &i.to_string(), &rt, &v.to_string(), ""])?;
            }
            w.write_record([
                "best",
                "",
                &rt,
                &run.best_value.to_string(),
                &run.ground_overlap.to_string(),
            ])?;
            if !sweep.is_empty() {
                let problem = build_problem_with(n, &g, &h, cfg.exec)?;
                let s0 = initial_state(problem.qubits())?;
                let density = cfg.schedule.steps as f64 / cfg.schedule.runtime.max(1e-12);
                for (i, &t) in sweep.iter().enumerate() {
                    let steps = ((t * density).ceil() as usize).max(1);
                    let sched = Schedule {
                        runtime: t,
                        steps,
                        ..cfg.schedule
                    };
                    let ov = evolve_exec(&s0, &problem, &sched, cfg.exec)?.ground_overlap(&problem);
                    w.write_record(["sweep", &i.to_string(), &t.to_string(), "", &ov.to_string()])?;
                }
            }
            Ok(Outcome {
                text: w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))?,
                lower_bound: false,
            })
        }
    }
}

fn command_settings(c: &Command) -> Settings {
    let mut s = Settings::default();
    match c {
        Command::Tabu {
            iters,
            restarts,
            tenure,
            ..
        } => {
            s.tabu = TabuSection {
                iterations: *iters,
                restarts: *restarts,
                tenure: *tenure,
                aspiration: None,
            };
        }
        Command::Ramsey { census, .. } | Command::Table { census, .. } if *census => {
            s.census = Some(true)
        }
        Command::Aqo {
            runtime,
            steps,
            shots,
            ..
        } => {
            s.aqo.runtime = *runtime;
            s.aqo.steps = *steps;
            s.aqo.shots = *shots;
        }
        _ => {}
    }
    s
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use ramsey_core::Error as E;
    if let Some(e) = e.downcast_ref::<E>() {
        return match e {
            E::WitnessOverflow(_) | E::StaleCache | E::Numerical(_) | E::Table(_) => 4,
            _ => 2,
        };
    }
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if let Some(t) = e.downcast_ref::<TableError>() {
        return match t {
            TableError::Csv(_) | TableError::Json(_) => 4,
            _ => 2,
        };
    }
    4
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| -> Result<Outcome> {
        let file = load_config(cli.common.config.as_deref())?;
        let settings = command_settings(&cli.command)
            .over(flag_settings(&cli.common))
            .over(file);
        let eff = Effective::resolve(&settings);
        let params = serde_json::json!({ "command": &cli.command, "effective": &eff });
        let recorder = Recorder::start(&eff.run_dir, name(&cli.command), params, vec![eff.seed]);
        let out = run(&cli.command, &eff)?;
        recorder
            .finish(&out.text)
            .with_context(|| format!("recording run in {}", eff.run_dir.display()))?;
        Ok(out)
    })();
    match outcome {
        Ok(o) => {
            use std::io::Write;
            let _ = std::io::stdout().write_all(&o.text);
            if o.lower_bound {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
