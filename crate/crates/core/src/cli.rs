//! Command-line front end: `solve`, `compare`, `verify`, `oracle`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 when the answer is infeasible
//! (solve: best sampled bitstring violates a constraint; verify: certificate fails;
//! oracle: nothing is feasible).

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::ansatz::{
    gate_stats, reference_form_stats, tvf_at_most_one, tvf_chain, tvf_flp, tvf_lap, tvf_sum_eq_last, tvf_sum_leq_last,
    verify_feasibility, AnsatzSpec, Benchmark, FeasibleSet, MAX_VERIFY_QUBITS,
};
use crate::error::{Error, Result};
use crate::model::{load_problem, ConstraintKind, LcqboProblem, PenaltyScope, StructuralConstraint};
use crate::report::{histogram_json, oracle_table_csv, trace_csv, write_file, ExperimentReport, OracleRow, RunRecord};
use crate::statevector::{BitConvention, ParamCircuit};
use crate::vqe::{run_vqe, ExpectationMode, Init, Optimizer, VqeConfig, VqeResult};

pub const SEED_ENV: &str = "TVF_SEED";

#[derive(Parser, Debug)]
#[command(name = "tvf", version, about = "Constraint-preserving VQE for linearly constrained binary problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run VQE with one ansatz.
    Solve(SolveArgs),
    /// Run tailored, 2-Local and QAOA side by side.
    Compare(RunArgs),
    /// Certify that a tailored form never leaves its feasible set.
    Verify(VerifyArgs),
    /// Enumerate every bitstring.
    Oracle(OracleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AnsatzArg {
    Tvf,
    TwoLocal,
    Qaoa,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OptimizerArg {
    Cobyla,
    NelderMead,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ScopeArg {
    All,
    Equalities,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Overrides the problem file's penalty weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Exact expectation instead of shot estimates.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Cobyla)]
    optimizer: OptimizerArg,
    /// 2-Local repetitions.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// QAOA layers.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    layers: u64,
    /// Which constraints shape the QAOA cost layer.
    #[arg(long, value_enum, default_value_t = ScopeArg::All)]
    qaoa_penalties: ScopeArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = AnsatzArg::Tvf)]
    ansatz: AnsatzArg,
    /// Start point, comma separated; disables restarts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Chain,
    #[value(name = "at_most_one")]
    AtMostOne,
    #[value(name = "sum_leq_last")]
    SumLeqLast,
    #[value(name = "sum_eq_last")]
    SumEqLast,
    Flp,
    Lap,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// `N`, or `N,M` for flp (facilities, clients) and lap (jobs, workers).
    #[arg(long, value_delimiter = ',', num_args = 1..=2, required = true)]
    size: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a, stdout),
        Command::Compare(a) => compare(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Oracle(a) => oracle(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn config_of(a: &RunArgs, init: Init) -> VqeConfig {
    VqeConfig {
        shots: a.shots,
        seed: a.seed,
        max_iters: a.max_iters,
        mode: if a.exact { ExpectationMode::Exact } else { ExpectationMode::Sampled },
        optimizer: match a.optimizer {
            OptimizerArg::Cobyla => Optimizer::default(),
            OptimizerArg::NelderMead => Optimizer::nelder_mead(),
        },
        init,
        restarts: a.restarts as usize,
        lambda: a.lambda,
    }
}

fn spec_of(kind: AnsatzArg, a: &RunArgs) -> AnsatzSpec {
    match kind {
        AnsatzArg::Tvf => AnsatzSpec::Tailored,
        AnsatzArg::TwoLocal => AnsatzSpec::TwoLocal { depth: a.depth as usize },
        AnsatzArg::Qaoa => AnsatzSpec::Qaoa {
            p: a.layers as usize,
            scope: match a.qaoa_penalties {
                ScopeArg::All => PenaltyScope::All,
                ScopeArg::Equalities => PenaltyScope::EqualitiesOnly,
            },
        },
    }
}

fn load(a: &RunArgs, out: &mut dyn Write) -> Result<(LcqboProblem, f64)> {
    let mut problem = load_problem(&a.problem)?;
    if let Some(l) = a.lambda {
        problem.set_lambda(l)?;
    }
    writeln!(out, "{problem}")?;
    let lambda = problem.lambda();
    Ok((problem, lambda))
}

fn show_stats(label: &str, s: crate::ansatz::GateStats, reference: Option<crate::ansatz::GateStats>) -> String {
    let mut line = format!("{label:<10} su2={:<3} cnot={:<3} params={:<3} cost={}", s.su2, s.cnot, s.params, s.cost);
    if let Some(r) = reference {
        line += &format!("   (published: su2={} cnot={} params={} cost={})", r.su2, r.cnot, r.params, r.cost);
    }
    line
}

fn summary_line(r: &VqeResult) -> String {
    format!(
        "best {} objective {} ({}), energy {:.6}, {} evaluations, feasible share {:.3}",
        r.best_display(),
        r.best_objective,
        if r.best_feasible { "feasible" } else { "INFEASIBLE" },
        r.energy,
        r.trace.len(),
        r.feasible_fraction
    )
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (problem, lambda) = load(&a.run, out)?;
    let init = a.theta.clone().map_or(Init::Random, Init::Explicit);
    let config = config_of(&a.run, init);
    let spec = spec_of(a.ansatz, &a.run);
    let result = run_vqe(&problem, &spec, &config)?;
    let reference = Benchmark::detect(&problem).and_then(|b| b.reference(spec.label()));
    let record = RunRecord::new(&problem, &result, reference)?;
    let report = ExperimentReport::new(&problem, lambda, &config, vec![record])?;

    write_file(&a.run.out, "result.json", &report.to_json())?;
    write_file(&a.run.out, "trace.csv", &trace_csv(&result.trace)?)?;
    write_file(&a.run.out, "histogram.json", &histogram_json(&result.histogram))?;

    writeln!(out, "{}", show_stats(spec.label(), result.stats, reference))?;
    writeln!(out, "{}", summary_line(&result))?;
    if let (Some(bits), Some(obj)) = (&report.oracle.best_bits, report.oracle.best_objective) {
        writeln!(out, "oracle     best {bits} objective {obj}")?;
    }
    writeln!(out, "wrote {}", a.run.out.display())?;
    Ok(if result.best_feasible { 0 } else { 2 })
}

fn compare(a: RunArgs, out: &mut dyn Write) -> Result<i32> {
    let (problem, lambda) = load(&a, out)?;
    let config = config_of(&a, Init::Random);
    let specs: Vec<AnsatzSpec> = [AnsatzArg::Tvf, AnsatzArg::TwoLocal, AnsatzArg::Qaoa].iter().map(|&k| spec_of(k, &a)).collect();
    let results: Vec<(AnsatzSpec, VqeResult)> = specs
        .into_par_iter()
        .map(|spec| run_vqe(&problem, &spec, &config).map(|r| (spec, r)))
        .collect::<Result<_>>()?;
    let bench = Benchmark::detect(&problem);
    let mut records = Vec::new();
    for (spec, r) in &results {
        let reference = bench.and_then(|b| b.reference(spec.label()));
        writeln!(out, "{}", show_stats(spec.label(), r.stats, reference))?;
        writeln!(out, "           {}", summary_line(r))?;
        write_file(&a.out, &format!("trace_{}.csv", spec.label()), &trace_csv(&r.trace)?)?;
        write_file(&a.out, &format!("histogram_{}.json", spec.label()), &histogram_json(&r.histogram))?;
        records.push(RunRecord::new(&problem, r, reference)?);
    }
    let report = ExperimentReport::new(&problem, lambda, &config, records)?;
    write_oracle_line(&report.oracle, out)?;
    write_file(&a.out, "report.json", &report.to_json())?;
    write_file(&a.out, "report.csv", &report.stats_csv()?)?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(0)
}

fn write_oracle_line(o: &OracleRow, out: &mut dyn Write) -> Result<()> {
    match (&o.best_bits, o.best_objective) {
        (Some(bits), Some(obj)) => writeln!(out, "oracle     best {bits} objective {obj}")?,
        _ => writeln!(out, "oracle     no feasible assignment")?,
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let size = |i: usize| a.size.get(i).copied();
    let single = || -> Result<usize> {
        if a.size.len() != 1 {
            return Err(Error::Config(format!("--kind {:?} takes a single size", a.kind)));
        }
        Ok(a.size[0])
    };
    let pair = || -> Result<(usize, usize)> {
        match (size(0), size(1)) {
            (Some(x), Some(y)) if a.size.len() == 2 => Ok((x, y)),
            _ => Err(Error::Config("--size needs N,M for flp and lap".into())),
        }
    };
    let qubits = match a.kind {
        KindArg::Flp => pair().map(|(n, m)| n * m + n)?,
        KindArg::Lap => pair().map(|(n1, n2)| n1 * n2)?,
        _ => single()?,
    };
    if qubits > MAX_VERIFY_QUBITS {
        return Err(Error::TooManyVariables { got: qubits, max: MAX_VERIFY_QUBITS });
    }
    let whole = |kind: ConstraintKind, n: usize| FeasibleSet::for_kind(kind, n);
    let (circuit, set, reference): (ParamCircuit, FeasibleSet, Option<crate::ansatz::GateStats>) = match a.kind {
        KindArg::Chain => {
            let n = single()?;
            (tvf_chain(n)?, whole(ConstraintKind::ChainMonotone, n)?, reference_form_stats(ConstraintKind::ChainMonotone, n))
        }
        KindArg::AtMostOne => {
            let n = single()?;
            (tvf_at_most_one(n)?, whole(ConstraintKind::AtMostOne, n)?, reference_form_stats(ConstraintKind::AtMostOne, n))
        }
        KindArg::SumLeqLast => {
            let n = single()?;
            (tvf_sum_leq_last(n)?, whole(ConstraintKind::SumLeqLast, n)?, reference_form_stats(ConstraintKind::SumLeqLast, n))
        }
        KindArg::SumEqLast => {
            let n = single()?;
            (tvf_sum_eq_last(n)?, whole(ConstraintKind::SumEqLast, n)?, reference_form_stats(ConstraintKind::SumEqLast, n))
        }
        KindArg::Flp => {
            let (n, m) = pair()?;
            let vars = |i: usize, j: usize| (i * m + j, n * m + i);
            let cs = (0..n)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let (x, y) = vars(i, j);
                    StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![x, y])
                })
                .collect::<Result<Vec<_>>>()?;
            (tvf_flp(n, m)?, FeasibleSet::new(qubits, cs)?, None)
        }
        KindArg::Lap => {
            let (n1, n2) = pair()?;
            let cs = if n1 >= 2 {
                (0..n2)
                    .map(|j| StructuralConstraint::new(ConstraintKind::AtMostOne, (0..n1).map(|i| i * n2 + j).collect()))
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            (tvf_lap(n1, n2)?, FeasibleSet::new(qubits, cs)?, None)
        }
    };
    let report = verify_feasibility(&circuit, &set, a.trials, a.seed)?;
    writeln!(out, "{}", show_stats(&format!("{:?}", a.kind).to_lowercase(), gate_stats(&circuit), reference))?;
    writeln!(out, "{}", report.summary(qubits))?;
    for w in &report.witnesses {
        writeln!(out, "  reachable {} p={:.6} at theta {:?}", BitConvention::display(w.index, qubits), w.probability, w.theta)?;
    }
    Ok(if report.pass { 0 } else { 2 })
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let mut problem = load_problem(&a.problem)?;
    if let Some(l) = a.lambda {
        problem.set_lambda(l)?;
    }
    let (table, scope) = oracle_table_csv(&problem, problem.lambda())?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &table).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        None => write!(out, "{table}")?,
    }
    if scope == PenaltyScope::EqualitiesOnly {
        writeln!(out, "note: penalty column covers equalities only (some structural kinds have no penalty form)")?;
    }
    let row = OracleRow::compute(&problem, problem.lambda())?;
    match (&row.best_bits, row.best_objective) {
        (Some(bits), Some(obj)) => {
            writeln!(out, "optimum {obj} at {bits}")?;
            Ok(0)
        }
        _ => {
            writeln!(out, "no feasible assignment")?;
            Ok(2)
        }
    }
}
