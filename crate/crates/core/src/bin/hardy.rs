use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hardy_core::curvature::{self, CurvatureContext};
use hardy_core::mutation::Mutation;
use hardy_core::pointeval::{self, LeftEvalContext};
use hardy_core::report::Report;
use hardy_core::scenario::{self, Overrides, Scenario, ScenarioError};
use hardy_core::suite::{self, RunOptions, SuiteLevel};
use hardy_core::HardyError;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Identity checks for Poisson kernels over finite-dimensional W*-correspondences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the truncation level N.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Multiply every tolerance by this factor.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    None,
    FlipThetaDiagonal,
    DropDefectInKernel,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or the bundled suite when no file is given.
    Verify {
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::Quick)]
        suite: Suite,
        /// Inject a known defect to confirm the checks can fail.
        #[arg(long, value_enum, default_value_t = MutationArg::None)]
        mutation: MutationArg,
    },
    /// Evaluate the scenario's polynomials at its disc point.
    Evaluate {
        scenario: PathBuf,
        /// Also evaluate at the scenario's left point, seeded when absent.
        #[arg(long)]
        left: bool,
    },
    /// Curvature ratios and the curvature operator for the scenario's point.
    Curvature { scenario: PathBuf },
}

enum Failure {
    Scenario(ScenarioError),
    Io(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Scenario(e)
    }
}

fn invalid(field: &str, e: HardyError) -> Failure {
    Failure::Scenario(ScenarioError::Validation { field: field.to_string(), message: e.to_string() })
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Scenario::parse(&text)?)
}

fn emit(cli: &Cli, human: String, machine: &Value) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Human => human,
        Format::Machine => serde_json::to_string_pretty(machine).expect("json values serialize") + "\n",
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(cli: &Cli, report: &Report) -> Result<bool, Failure> {
    let value = serde_json::to_value(report).expect("reports serialize");
    emit(cli, report.render_human(), &value)?;
    if cli.output.is_some() {
        eprintln!("{} checks, {} failed", report.checks.len(), report.failures().count());
    }
    Ok(report.all_passed())
}

fn overrides(cli: &Cli) -> Overrides {
    Overrides { truncation: cli.truncation, seed: cli.seed, tolerance_scale: cli.tolerance_scale }
}

fn verify(cli: &Cli, path: Option<&Path>, level: Suite, mutation: MutationArg) -> Result<bool, Failure> {
    let mutation = match mutation {
        MutationArg::None => Mutation::None,
        MutationArg::FlipThetaDiagonal => Mutation::FlipThetaDiagonal,
        MutationArg::DropDefectInKernel => Mutation::DropDefectInKernel,
    };
    let report = match path {
        Some(path) => {
            let mut s = load(path)?;
            if mutation != Mutation::None {
                s.mutation = mutation;
            }
            scenario::run_scenario(&s, &overrides(cli))?
        }
        None => {
            let scale = cli.tolerance_scale.unwrap_or(1.0);
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Failure::Scenario(ScenarioError::Validation {
                    field: "tolerance_scale".into(),
                    message: "must be positive and finite".into(),
                }));
            }
            let options = RunOptions { tolerance_scale: scale, mutation, ..RunOptions::default() };
            let level = match level {
                Suite::Quick => SuiteLevel::Quick,
                Suite::Full => SuiteLevel::Full,
            };
            suite::verify_suite(level, cli.seed.unwrap_or(1), cli.truncation, &options)
                .map_err(|e| invalid("suite", e))?
        }
    };
    emit_report(cli, &report)
}

fn evaluate(cli: &Cli, path: &Path, left: bool) -> Result<bool, Failure> {
    let resolved = load(path)?.resolve(&overrides(cli))?;
    let fx = &resolved.fixture;
    if fx.polynomials.is_empty() {
        return Err(invalid("polynomials", HardyError::InvalidStructure("nothing to evaluate".into())));
    }
    let mut human = String::new();
    let mut fourier = Vec::new();
    for (i, x) in fx.polynomials.iter().enumerate() {
        let v = fx.eta.fourier_eval(x).map_err(|e| invalid("polynomials", e))?;
        human += &format!("X{i}^(η*) =\n{v}");
        fourier.push(json!(scenario::matrix_rows(&v)));
    }
    let mut machine = json!({ "fourier": fourier });
    if left {
        let xi = fx.effective_left_point();
        let ctx = LeftEvalContext::new(&xi, fx.truncation).map_err(|e| invalid("left_point", e))?;
        let a = fx.effective_left_argument();
        let mut values = Vec::new();
        for (i, x) in fx.polynomials.iter().enumerate() {
            let v = pointeval::left_point_eval(x, &ctx, &a).map_err(|e| invalid("polynomials", e))?;
            let blocks: Vec<_> = v.blocks().iter().map(|b| json!(scenario::matrix_rows(b))).collect();
            human += &format!("Φ_X{i}(a) blocks:\n");
            for b in v.blocks() {
                human += &format!("{b}");
            }
            values.push(Value::Array(blocks));
        }
        machine["left"] = Value::Array(values);
    }
    emit(cli, human, &machine)?;
    Ok(true)
}

fn curvature_cmd(cli: &Cli, path: &Path) -> Result<bool, Failure> {
    let resolved = load(path)?.resolve(&overrides(cli))?;
    let fx = &resolved.fixture;
    let ctx = CurvatureContext::new(&fx.eta, fx.truncation).map_err(|e| invalid("algebra", e))?;
    let k = curvature::kappa_estimate(&ctx).map_err(|e| invalid("correspondence", e))?;
    let op = curvature::curvature_operator(&ctx).map_err(|e| invalid("truncation", e))?;
    let mut human = format!("d = {}\n N  r_N                 tr(K_N*K_N)/d^N\n", ctx.d());
    for (n, (r, t)) in k.ratios.iter().zip(&k.tail_ratios).enumerate() {
        human += &format!("{n:>2}  {r:<18.12}  {t:.12}\n");
    }
    human += &format!(
        "curvature operator over levels <= {}: {:.12} (tail ratio {:.12})\nnumerator gap {:.3e}, trace swap gap {:.3e}, monotone {}\n",
        op.window, op.value, op.tail_ratio, k.numerator_gap, k.trace_swap_gap, k.monotone
    );
    let machine = json!({
        "d": ctx.d(),
        "ratios": k.ratios,
        "tail_ratios": k.tail_ratios,
        "kappa": k.kappa,
        "monotone": k.monotone,
        "numerator_gap": k.numerator_gap,
        "trace_swap_gap": k.trace_swap_gap,
        "operator": { "value": op.value, "window": op.window, "tail_ratio": op.tail_ratio, "shift_residual": op.shift_residual },
    });
    emit(cli, human, &machine)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { scenario, suite, mutation } => verify(&cli, scenario.as_deref(), *suite, *mutation),
        Command::Evaluate { scenario, left } => evaluate(&cli, scenario, *left),
        Command::Curvature { scenario } => curvature_cmd(&cli, scenario),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Scenario(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
