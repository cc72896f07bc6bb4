use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use ompc::adversary::{self, AdversaryInstance, AdversaryRun};
use ompc::baseline::{offline_ipgood_opt, offline_ompc_opt, offline_steiner_opt, ResultCache};
use ompc::io::{self, CoveringEntry, Ident, OmpcFile, VariableEntry};
use ompc::ompc::{run_traced, trace_csv, PotentialParams};
use ompc::oracles::{ExactOracle, PathOracleKind};
use ompc::seed::{self, trial_seed};
use ompc::steiner::{per_demand_csv, run_with_doubling, DemandRecord, RatioReport, SteinerEngine};
use ompc::structural::{self, split_tree, RoundingTrial};
use ompc::Error;

#[derive(Parser)]
#[command(name = "ompc", version, about = "Online packing/covering and degree-bounded Steiner forest experiments")]
struct Cli {
    /// Output directory (also settable through OMPC_OUT_DIR).
    #[arg(long, global = true, env = "OMPC_OUT_DIR", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct PotentialArgs {
    /// Base of the exponential cost.
    #[arg(long, default_value_t = 1.5)]
    rho: f64,
    /// Potential constant; rho must not exceed 1 + 1/gamma.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
}

impl PotentialArgs {
    fn params(&self) -> Result<PotentialParams> {
        Ok(PotentialParams::new(self.rho, self.gamma)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Surrogate,
    Exact,
}

impl From<OracleArg> for PathOracleKind {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Surrogate => PathOracleKind::Surrogate,
            OracleArg::Exact => PathOracleKind::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Ompc,
    Steiner,
    Ipgood,
}

#[derive(Subcommand)]
enum Command {
    /// Run the online solver on a packing/covering instance.
    SolveOmpc {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        potential: PotentialArgs,
        /// Largest constraint support the exact oracle accepts.
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Run the online Steiner forest engine.
    SolveSteiner {
        #[arg(long)]
        instance: PathBuf,
        /// Known optimal weight; fixes the weight guess.
        #[arg(long, conflicts_with = "doubling", required_unless_present = "doubling")]
        w_opt: Option<f64>,
        /// Guess the optimal weight by geometric doubling.
        #[arg(long)]
        doubling: bool,
        #[arg(long, default_value_t = 2.0, requires = "doubling")]
        ratio: f64,
        #[arg(long, value_enum, default_value = "surrogate")]
        oracle: OracleArg,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Write a lower-bound instance with its covering stream as an instance file.
    GenAdversary {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Measure the online solver against seeded lower-bound streams.
    EvalAdversary {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Check tree splits and connective lists on random trees.
    VerifyStructural {
        /// Random (tree, demands) instances for connective lists.
        #[arg(long, default_value_t = 300)]
        trees: usize,
        #[arg(long, default_value_t = 64)]
        max_n: usize,
        #[arg(long, default_value_t = 20)]
        max_demands: usize,
        /// Random trees for the split check.
        #[arg(long, default_value_t = 10_000)]
        split_trees: usize,
        #[arg(long, default_value_t = 200)]
        split_max_n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Round random pair probabilities on random trees.
    RoundTrial {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Exact offline optimum of a small instance.
    Baseline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        kind: BaselineKind,
        /// Weight scale for the subgraph program (computed when omitted).
        #[arg(long)]
        w_opt: Option<f64>,
        /// Cache directory for results.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Collect every JSON summary in a directory into one report.
    Report {
        /// Directory to scan (defaults to the output directory).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, &text)
}

fn solve_ompc(out: &Path, instance: &Path, potential: PotentialArgs, cap: usize) -> Result<()> {
    let inst = io::read_ompc(instance).with_context(|| format!("loading {}", instance.display()))?;
    let params = potential.params()?;
    let run = run_traced(
        &inst.system,
        &inst.covering,
        inst.certificate.as_ref(),
        ExactOracle::with_cap(cap),
        params,
    )?;
    write(out, "trace.csv", &trace_csv(&run.rows))?;
    let m = run.state.loads().len();
    write_json(
        out,
        "summary.json",
        &json!({
            "steps": run.rows.len(),
            "max_f": run.state.max_load(),
            "max_violation": run.rows.last().map_or(0.0, |r| r.max_violation),
            "load_cap": params.load_cap(m),
            "phi0": run.phi0,
            "committed": run.state.committed().len(),
        }),
    )
}

fn solve_steiner(
    out: &Path,
    instance: &Path,
    w_opt: Option<f64>,
    ratio: f64,
    oracle: PathOracleKind,
    potential: PotentialArgs,
) -> Result<()> {
    let inst = io::read_steiner(instance).with_context(|| format!("loading {}", instance.display()))?;
    let params = potential.params()?;
    let (g, stream) = (&inst.graph, &inst.demands);
    let small = g.edges().len() <= ompc::baseline::STEINER_EDGE_CAP;
    match w_opt {
        Some(w) => {
            let mut engine = SteinerEngine::new(g, w, oracle, params)?;
            engine.serve_all(stream)?;
            let ip_alpha = if small {
                offline_ipgood_opt(g, stream.as_slice(), w).ok().map(|r| r.objective)
            } else {
                None
            };
            let report = RatioReport::new(engine.solution(), g, w, w, ip_alpha, &params);
            let trace = DemandRecord::trace(engine.solution(), g, None);
            write(out, "demands.csv", &per_demand_csv(&trace))?;
            write_json(
                out,
                "report.json",
                &json!({
                    "feasible": engine.solution().connects(g, stream.as_slice()),
                    "report": report,
                }),
            )
        }
        None => {
            let outcome = run_with_doubling(g, stream, ratio, oracle, params)?;
            let w_opt = if small {
                offline_steiner_opt(g, stream.as_slice()).ok().map(|r| r.objective)
            } else {
                None
            };
            let report = w_opt.map(|w| RatioReport::new(&outcome.solution, g, w, outcome.final_guess(), None, &params));
            let trace = DemandRecord::trace(&outcome.solution, g, Some(&outcome.demand_phase));
            write(out, "demands.csv", &per_demand_csv(&trace))?;
            write_json(
                out,
                "report.json",
                &json!({
                    "feasible": outcome.solution.connects(g, stream.as_slice()),
                    "threshold": outcome.threshold,
                    "final_guess": outcome.final_guess(),
                    "cumulative_weight": outcome.solution.weight(),
                    "phases": outcome.phases,
                    "report": report,
                }),
            )
        }
    }
}

fn gen_adversary(out: &Path, m: usize, d: usize, seed: u64) -> Result<()> {
    let inst = AdversaryInstance::new(m, d)?;
    let mut run = AdversaryRun::new(&inst, seed);
    while !run.is_exhausted() {
        run.next_constraint(&inst)?;
    }
    let cert = run.offline_opt(&inst)?;
    let sys = inst.system();
    let name = |v: ompc::VarId| sys.name(v).expect("known variable").to_string();
    let file = OmpcFile {
        m,
        k: inst.frequency(),
        variables: sys
            .variables()
            .map(|v| {
                Ok(VariableEntry {
                    id: Ident::Text(name(v)),
                    column: ompc::PackingSystem::column(sys, v)?.to_vec(),
                })
            })
            .collect::<ompc::Result<_>>()?,
        covering: run
            .emitted()
            .iter()
            .map(|c| CoveringEntry {
                coeffs: c.iter().map(|(v, x)| (name(v), x)).collect(),
            })
            .collect(),
        certificate: Some(cert.assignment().iter().map(|v| Ident::Text(name(v))).collect()),
    };
    write_json(out, &format!("adversary_m{m}_d{d}_s{seed}.json"), &file)?;
    write_json(
        out,
        &format!("adversary_m{m}_d{d}_s{seed}.meta.json"),
        &json!({ "m": m, "d": d, "seed": seed, "leaf": run.leaf(), "constraints": run.emitted().len() }),
    )
}

fn eval_adversary(out: &Path, m: usize, d: usize, trials: usize, seed: u64, potential: PotentialArgs) -> Result<()> {
    let (records, summary) = adversary::evaluate(m, d, trials, seed, potential.params()?)?;
    write(out, "adversary_trials.csv", &adversary::trials_csv(&records))?;
    write_json(out, "adversary_summary.json", &summary)?;
    println!(
        "mean max violation {:.4} (lower bound {}, upper bound {:.4}), certificate failures {}",
        summary.mean, summary.lower_bound, summary.upper_bound, summary.certificate_failures
    );
    Ok(())
}

#[derive(Serialize)]
struct StructuralSummary {
    seed: u64,
    split_trees: usize,
    split_failures: usize,
    connective_instances: usize,
    connective_failures: usize,
    repaired_demands: usize,
    max_multiplicity_ratio: f64,
    passed: bool,
}

fn verify_structural(
    out: &Path,
    trees: usize,
    max_n: usize,
    max_demands: usize,
    split_trees: usize,
    split_max_n: usize,
    seed: u64,
) -> Result<bool> {
    use rand::Rng;
    if max_n < 2 || split_max_n < 3 || max_demands == 0 {
        bail!("need --max-n >= 2, --split-max-n >= 3 and --max-demands >= 1");
    }
    let split_failures: usize = (0..split_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(trial_seed(seed, i as u64));
            let n = rng.gen_range(3..=split_max_n);
            let t = structural::random_tree(n, &mut rng);
            split_tree(&t).map_or(1, |s| usize::from(!s.violations(&t).is_empty()))
        })
        .sum();
    let connective: Vec<(bool, usize, f64)> = (0..trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(trial_seed(seed ^ 0x5bd1_e995, i as u64));
            let n = rng.gen_range(2..=max_n);
            let t = structural::random_tree(n, &mut rng);
            let demands: Vec<(usize, usize)> = (0..rng.gen_range(1..=max_demands))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let list = structural::build_connective(n, t.edges(), &demands)?;
            let report = structural::verify_connective(n, t.edges(), &demands, &list);
            Ok((report.passed(), list.repaired.len(), report.max_multiplicity as f64 / report.bound))
        })
        .collect::<ompc::Result<_>>()?;
    let connective_failures = connective.iter().filter(|c| !c.0).count();
    let summary = StructuralSummary {
        seed,
        split_trees,
        split_failures,
        connective_instances: trees,
        connective_failures,
        repaired_demands: connective.iter().map(|c| c.1).sum(),
        max_multiplicity_ratio: connective.iter().map(|c| c.2).fold(0.0, f64::max),
        passed: split_failures == 0 && connective_failures == 0,
    };
    write_json(out, "structural_summary.json", &summary)?;
    println!(
        "split failures {split_failures}/{split_trees}, connective failures {connective_failures}/{trees}"
    );
    Ok(summary.passed)
}

fn round_trial(out: &Path, n: usize, trials: usize, seed: u64) -> Result<()> {
    if n < 2 || trials == 0 {
        bail!("need --n >= 2 and --trials >= 1");
    }
    let records: Vec<RoundingTrial> = (0..trials)
        .into_par_iter()
        .map(|t| RoundingTrial::run(t, trial_seed(seed, t as u64), n))
        .collect();
    let mut csv = String::from("trial,max_load_p,max_load_q,ratio\n");
    for r in &records {
        csv.push_str(&format!("{},{},{},{}\n", r.trial, r.max_load_p, r.max_load_q, r.ratio));
    }
    write(out, "rounding_trials.csv", &csv)?;
    let within = records.iter().filter(|r| r.ratio <= 8.0).count();
    write_json(
        out,
        "rounding_summary.json",
        &json!({
            "n": n,
            "trials": trials,
            "seed": seed,
            "within_8x": within,
            "max_ratio": records.iter().map(|r| r.ratio).fold(0.0, f64::max),
        }),
    )
}

fn baseline(out: &Path, instance: &Path, kind: BaselineKind, w_opt: Option<f64>, cache: Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(instance).with_context(|| format!("reading {}", instance.display()))?;
    let source = instance.display().to_string();
    let cache = cache.map(ResultCache::new);
    let cached = |kind_name: &str, compute: &dyn Fn() -> ompc::Result<ompc::baseline::OfflineResult>| {
        let key = ResultCache::key(kind_name, &(text.as_str(), w_opt.map(f64::to_bits)));
        match &cache {
            Some(c) => c.get_or_compute(&key, compute),
            None => compute(),
        }
    };
    let result = match kind {
        BaselineKind::Ompc => {
            let inst = io::parse_ompc(&text, &source)?;
            cached("ompc", &|| offline_ompc_opt(&inst.system, &inst.covering))?
        }
        BaselineKind::Steiner => {
            let inst = io::parse_steiner(&text, &source)?;
            cached("steiner", &|| offline_steiner_opt(&inst.graph, inst.demands.as_slice()))?
        }
        BaselineKind::Ipgood => {
            let inst = io::parse_steiner(&text, &source)?;
            cached("ipgood", &|| {
                let w = match w_opt {
                    Some(w) => w,
                    None => offline_steiner_opt(&inst.graph, inst.demands.as_slice())?.objective,
                };
                offline_ipgood_opt(&inst.graph, inst.demands.as_slice(), w)
            })?
        }
    };
    write_json(out, "baseline.json", &result)?;
    println!("objective {}", result.objective);
    Ok(())
}

fn report(dir: &Path) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "report_index.json"))
        .collect();
    entries.sort();
    let mut files = serde_json::Map::new();
    for p in &entries {
        let text = fs::read_to_string(p)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
        let name = p.file_name().expect("file").to_string_lossy().into_owned();
        files.insert(name, value);
    }
    println!("{} summaries collected", files.len());
    write_json(dir, "report_index.json", &json!({ "files": files }))
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out;
    match cli.command {
        Command::SolveOmpc { instance, potential, cap } => solve_ompc(&out, &instance, potential, cap)?,
        Command::SolveSteiner {
            instance,
            w_opt,
            doubling: _,
            ratio,
            oracle,
            potential,
        } => solve_steiner(&out, &instance, w_opt, ratio, oracle.into(), potential)?,
        Command::GenAdversary { m, d, seed } => gen_adversary(&out, m, d, seed)?,
        Command::EvalAdversary {
            m,
            d,
            trials,
            seed,
            potential,
        } => eval_adversary(&out, m, d, trials, seed, potential)?,
        Command::VerifyStructural {
            trees,
            max_n,
            max_demands,
            split_trees,
            split_max_n,
            seed,
        } => return verify_structural(&out, trees, max_n, max_demands, split_trees, split_max_n, seed),
        Command::RoundTrial { n, trials, seed } => round_trial(&out, n, trials, seed)?,
        Command::Baseline {
            instance,
            kind,
            w_opt,
            cache,
        } => baseline(&out, &instance, kind, w_opt, cache)?,
        Command::Report { dir } => report(dir.as_deref().unwrap_or(&out))?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::InfeasibleStep { .. } | Error::Infeasible | Error::Unservable { .. })
            );
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
