use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lz_integrability::harness::{write_report, Format, OutputSpec, Scenario, Task};
use lz_integrability::{harness, Error, ModelSpec, Pencil, Result};

#[derive(Parser)]
#[command(name = "lzint", version, about = "Integrable multistate Landau-Zener models")]
struct Cli {
    /// Scenario file supplying the model, propagation settings and task knobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path, or `csv` / `json` to pick the format and write to stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    format: Option<String>,
    /// Seed for random `u` samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelArg {
    /// Model as inline JSON or a path to a JSON file.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Clone, Default)]
struct PropagationArgs {
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Comma-separated horizons for `T → ∞` extrapolation.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    extrapolate: Option<Vec<f64>>,
    /// Initial-state labels to propagate (all by default).
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    initial: Option<Vec<i64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient matrices of a model.
    Model(ModelArg),
    /// Check the commuting family of a bordered model.
    Verify(ModelArg),
    /// Secular roots against eigenvalues on a `u` grid.
    Spectrum {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        u: Option<Vec<f64>>,
    },
    /// Numerical transition probabilities.
    Propagate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        prop: PropagationArgs,
    },
    /// Propagated probabilities against the closed form.
    Compare {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        prop: PropagationArgs,
        #[arg(long)]
        margin: Option<usize>,
    },
    /// Run scenario files (or `--config`) end to end.
    Report { scenarios: Vec<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        4
    } else if e.is_numerical() {
        3
    } else {
        2
    }
}

fn read_json_or_path(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::from_json(&std::fs::read_to_string(path)?)
}

fn output_spec(cli: &Cli, default: Format) -> Result<OutputSpec> {
    let mut out = OutputSpec {
        path: None,
        format: default,
    };
    match cli.out.as_deref() {
        Some(v) if v.eq_ignore_ascii_case("csv") || v.eq_ignore_ascii_case("json") => out.format = v.parse()?,
        Some(v) => {
            out.path = Some(PathBuf::from(v));
            if Path::new(v).extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                out.format = Format::Json;
            }
        }
        None => {}
    }
    if let Some(f) = &cli.format {
        out.format = f.parse()?;
    }
    Ok(out)
}

/// Scenario for a single-purpose subcommand: `--config` provides defaults,
/// `--model` and flags override them.
fn base_scenario(cli: &Cli, model: &ModelArg, tasks: Vec<Task>) -> Result<Scenario> {
    let mut s = match &cli.config {
        Some(p) => load_scenario(p)?,
        None => match &model.model {
            Some(m) => Scenario::new(parse_model(m)?, tasks.clone()),
            None => return Err(Error::InvalidScenario("either --model or --config is required".into())),
        },
    };
    if let Some(m) = &model.model {
        s.model = parse_model(m)?;
    }
    s.tasks = tasks;
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn parse_model(arg: &str) -> Result<ModelSpec> {
    let text = read_json_or_path(arg)?;
    let m: ModelSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
    m.validate()?;
    Ok(m)
}

fn apply_propagation(s: &mut Scenario, p: &PropagationArgs) {
    if let Some(h) = p.horizon {
        s.propagation.horizon = h;
    }
    if let Some(t) = p.rel_tol {
        s.propagation.rel_tol = t;
    }
    if let Some(t) = p.abs_tol {
        s.propagation.abs_tol = t;
    }
    if p.extrapolate.is_some() {
        s.settings.extrapolate = p.extrapolate.clone();
    }
    if p.initial.is_some() {
        s.settings.initial_states = p.initial.clone();
    }
}

#[derive(Serialize)]
struct ModelDump<'a> {
    model: &'a ModelSpec,
    dim: usize,
    states: Vec<String>,
    pencil: Pencil,
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let scenario = match &cli.command {
        Command::Model(m) => {
            let s = base_scenario(&cli, m, vec![Task::Spectrum])?;
            let dump = ModelDump {
                model: &s.model,
                dim: s.model.dim(),
                states: s.model.state_names(),
                pencil: s.model.build()?,
            };
            let mut text = serde_json::to_string_pretty(&dump).map_err(|e| Error::Io(e.to_string()))?;
            text.push('\n');
            match output_spec(&cli, Format::Json)?.path {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            return Ok(true);
        }
        Command::Verify(m) => base_scenario(&cli, m, vec![Task::VerifyCommutant])?,
        Command::Spectrum { model, u } => {
            let mut s = base_scenario(&cli, model, vec![Task::Spectrum])?;
            if let Some(u) = u {
                s.settings.spectrum_u = u.clone();
            }
            s.output = output_spec(&cli, Format::Csv)?;
            s
        }
        Command::Propagate { model, prop } => {
            let mut s = base_scenario(&cli, model, vec![Task::Propagate])?;
            apply_propagation(&mut s, prop);
            s.output = output_spec(&cli, Format::Csv)?;
            s
        }
        Command::Compare { model, prop, margin } => {
            let mut s = base_scenario(&cli, model, vec![Task::Propagate, Task::CompareClosedForm])?;
            apply_propagation(&mut s, prop);
            if let Some(m) = margin {
                s.settings.compare_margin = *m;
            }
            s.output = output_spec(&cli, Format::Csv)?;
            // Only the residual table is of interest here.
            let mut report = harness::run_scenario(&s)?;
            report.results.retain(|r| r.result.task() == Task::CompareClosedForm);
            write_report(&report, &s.output)?;
            return Ok(report.all_passed());
        }
        Command::Report { scenarios } => {
            let mut paths = scenarios.clone();
            paths.extend(cli.config.clone());
            if paths.is_empty() {
                return Err(Error::InvalidScenario("no scenario files given".into()));
            }
            let mut batch = paths.iter().map(|p| load_scenario(p)).collect::<Result<Vec<_>>>()?;
            let out = output_spec(&cli, Format::Json)?;
            for (s, path) in batch.iter_mut().zip(&paths) {
                if let Some(seed) = cli.seed {
                    s.seed = seed;
                }
                if cli.format.is_some() || cli.out.is_some() {
                    s.output.format = out.format;
                }
                // With several scenarios `--out` names a directory.
                if let Some(dir) = &out.path {
                    let stem = path.file_stem().unwrap_or_default();
                    s.output.path = Some(if paths.len() == 1 {
                        dir.clone()
                    } else {
                        let mut p = dir.join(stem);
                        if s.output.format == Format::Json {
                            p.set_extension("json");
                        }
                        p
                    });
                }
            }
            if let Some(dir) = out.path.as_ref().filter(|_| paths.len() > 1) {
                std::fs::create_dir_all(dir)?;
            }
            let mut ok = true;
            for (s, r) in batch.iter().zip(harness::run_batch(&batch)) {
                let r = r?;
                write_report(&r, &s.output)?;
                ok &= r.all_passed();
            }
            return Ok(ok);
        }
    };
    let mut scenario = scenario;
    if matches!(cli.command, Command::Verify(_)) {
        scenario.output = output_spec(&cli, Format::Json)?;
    }
    let report = harness::run_scenario(&scenario)?;
    write_report(&report, &scenario.output)?;
    Ok(report.all_passed())
}
