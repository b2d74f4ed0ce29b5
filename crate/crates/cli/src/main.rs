//! `qdim`: quantization dimension experiments on iterated function systems.

mod lists;
mod output;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lists::{NList, RealGrid};
use output::{emit, Format};
use qdim::ifs::distortion_report;
use qdim::lab::{
    coefficient_trace, contraction_family, continuity_experiment, empirical_dimension,
    equal_steps_experiment, halving_family, halving_limit,
};
use qdim::measure::{chaos_game, invariant_atoms_mid, SamplerConfig};
use qdim::quantizer::{dp_sweep, lloyd, sweep_csv, QuantizationResult};
use qdim::spectral::{
    assemble_operator, closed_form_sigma, default_bracket, solve_sigma_spectral, spectral_radius,
    word_sum_sigma, Mesh,
};
use qdim::verify::{default_models, verify_suite, VerifyConfig};
use qdim::{AtomicMeasure, Error, IfsModel};

#[derive(Parser)]
#[command(name = "qdim", version, about = "Quantization dimension of IFS invariant measures")]
struct Cli {
    /// Write the result to this file instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[arg(short, long, value_enum, global = true, default_value = "text")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantization dimension by one of four routes
    Dim(DimArgs),
    /// Optimal quantization errors over a range of n
    Quantize(QuantizeArgs),
    /// Atomic approximation of the invariant measure
    Measure(MeasureArgs),
    /// Spectral radius of the discretized transfer operator
    Spectral(SpectralArgs),
    /// Behaviour of the dimension along a family of systems
    Continuity(ContinuityArgs),
    /// Bounded-distortion constants per depth
    Distortion(DistortionArgs),
    /// Run the invariant suite; exits 1 on any violation
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMethod {
    Closed,
    Spectral,
    Wordsum,
    Empirical,
}

#[derive(Args)]
struct DimArgs {
    #[arg(long, value_enum)]
    method: DimMethod,
    /// Model config (JSON)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Atomic measure CSV, used by the empirical route instead of a model
    #[arg(long, conflicts_with = "model")]
    measure: Option<PathBuf>,
    #[arg(short, long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1025)]
    mesh_size: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Word depth (wordsum) or atom depth (empirical)
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value = "2..64", value_parser = lists::n_list)]
    n_list: NList,
    /// Initial σ bracket for the spectral route, "lo,hi"
    #[arg(long, value_parser = lists::parse_pair)]
    bracket: Option<(f64, f64)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantMethod {
    Dp,
    Lloyd,
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long, required_unless_present = "measure")]
    model: Option<PathBuf>,
    #[arg(long, conflicts_with = "model")]
    measure: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(short, long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value = "1..16", value_parser = lists::n_list)]
    n_list: NList,
    #[arg(long, value_enum, default_value = "dp")]
    method: QuantMethod,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    model: PathBuf,
    /// Exact level-`depth` atoms
    #[arg(long, conflicts_with = "chaos", required_unless_present = "chaos")]
    depth: Option<usize>,
    /// Chaos-game samples
    #[arg(long)]
    chaos: Option<usize>,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(short, long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1025)]
    mesh_size: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// σ values as "a,b,c" or "lo:hi:count"; without it the σ solve trace is emitted
    #[arg(long, value_parser = lists::real_grid)]
    sigma_grid: Option<RealGrid>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// c_k = 1/3 + 1/(10k) converging to the Cantor system
    Contraction,
    /// x/(2n), x/(2n) + 1/(2n) collapsing to constant maps
    Halving,
    /// (1/n) Σ δ_{i/n} against Lebesgue measure
    EqualSteps,
    /// n V^{s/r} on a model's invariant measure
    Coefficient,
}

#[derive(Args)]
struct ContinuityArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(short, long, default_value_t = 2.0)]
    r: f64,
    /// Family indices (k or n); defaults depend on the family
    #[arg(long, value_parser = lists::n_list)]
    n_list: Option<NList>,
    /// Atom depth for W1 gaps, or for the coefficient measure
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 1 << 14)]
    grid_size: usize,
    /// Model for the coefficient family
    #[arg(long)]
    model: Option<PathBuf>,
    /// Exponent s for the coefficient family; defaults to the closed-form dimension
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct DistortionArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 33)]
    mesh_size: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Model configs; the built-in set when omitted
    #[arg(long)]
    model: Vec<PathBuf>,
    #[arg(long, default_value = "1,2", value_parser = lists::real_grid)]
    r_values: RealGrid,
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<IfsModel, Error> {
    let text = std::fs::read_to_string(path).map_err(with_path(path))?;
    IfsModel::from_json(&text)
}

fn load_measure(path: &Path) -> Result<AtomicMeasure, Error> {
    AtomicMeasure::read_csv(File::open(path).map_err(with_path(path))?)
}

fn require_model(model: &Option<PathBuf>) -> Result<IfsModel, Error> {
    match model {
        Some(p) => load_model(p),
        None => Err(Error::Model("--model is required here".into())),
    }
}

fn measure_for(model: &Option<PathBuf>, measure: &Option<PathBuf>, depth: usize) -> Result<AtomicMeasure, Error> {
    match measure {
        Some(p) => load_measure(p),
        None => invariant_atoms_mid(&require_model(model)?, depth),
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

/// Output body plus whether the run counts as a success.
type Outcome = (String, bool);

fn run_dim(a: &DimArgs, format: Format) -> Result<Outcome, Error> {
    let body = match a.method {
        DimMethod::Closed => {
            let model = require_model(&a.model)?;
            let ratios = model
                .similitude_ratios()
                .ok_or_else(|| Error::Unsupported("closed form needs affine maps".into()))?;
            let sigma = closed_form_sigma(model.probs(), &ratios, a.r)?;
            match format {
                Format::Text => format!("{sigma:.10}"),
                Format::Csv => format!("r,sigma\n{},{}\n", a.r, sigma),
                Format::Json => pretty(&json!({ "method": "closed", "r": a.r, "sigma": sigma })),
            }
        }
        DimMethod::Spectral | DimMethod::Wordsum => {
            let model = require_model(&a.model)?;
            let res = if matches!(a.method, DimMethod::Spectral) {
                let mesh = Mesh::new(model.domain(), a.mesh_size)?;
                solve_sigma_spectral(&model, &mesh, a.r, a.bracket.unwrap_or(default_bracket(a.r)), a.tol)?
            } else {
                word_sum_sigma(&model, a.r, a.depth, a.tol, a.mesh_size)?
            };
            match format {
                Format::Text => format!("{:.10}", res.sigma),
                Format::Csv => res.trace_csv()?,
                Format::Json => res.to_json(),
            }
        }
        DimMethod::Empirical => {
            let mu = measure_for(&a.model, &a.measure, a.depth)?;
            let est = empirical_dimension(&mu, a.r, &a.n_list.0)?;
            match format {
                Format::Text => format!("{:.10}", est.slope),
                Format::Csv => est.to_csv()?,
                Format::Json => pretty(&est),
            }
        }
    };
    Ok((body, true))
}

fn run_quantize(a: &QuantizeArgs, format: Format) -> Result<Outcome, Error> {
    let mu = measure_for(&a.model, &a.measure, a.depth)?;
    let results: Vec<QuantizationResult> = match a.method {
        QuantMethod::Dp => {
            let sweep = dp_sweep(&mu, *a.n_list.0.last().expect("list is nonempty"), a.r)?;
            a.n_list.0.iter().map(|&n| sweep[n - 1].clone()).collect()
        }
        QuantMethod::Lloyd => a
            .n_list
            .0
            .iter()
            .map(|&n| lloyd(&mu, n, a.r, a.restarts, a.seed))
            .collect::<Result<_, _>>()?,
    };
    let body = match format {
        Format::Json => pretty(&results),
        _ => sweep_csv(&results)?,
    };
    Ok((body, true))
}

fn run_measure(a: &MeasureArgs, format: Format) -> Result<Outcome, Error> {
    let model = load_model(&a.model)?;
    let mu = match (a.depth, a.chaos) {
        (Some(d), _) => invariant_atoms_mid(&model, d)?,
        (None, Some(samples)) => chaos_game(
            &model,
            SamplerConfig { seed: a.seed, burn_in: a.burn_in, samples },
        )?,
        (None, None) => unreachable!("clap requires one of --depth, --chaos"),
    };
    let body = match format {
        Format::Json => pretty(&json!({ "atoms": mu.atoms(), "weights": mu.weights() })),
        _ => {
            let mut buf = Vec::new();
            mu.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    Ok((body, true))
}

fn run_spectral(a: &SpectralArgs, format: Format) -> Result<Outcome, Error> {
    let model = load_model(&a.model)?;
    let mesh = Mesh::new(model.domain(), a.mesh_size)?;
    let body = match &a.sigma_grid {
        Some(grid) => {
            let rows = grid
                .0
                .iter()
                .map(|&sigma| {
                    let op = assemble_operator(&model, &mesh, sigma, a.r)?;
                    Ok((sigma, spectral_radius(&op, a.tol)?.spr))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            match format {
                Format::Json => pretty(
                    &rows
                        .iter()
                        .map(|&(sigma, spr)| json!({ "sigma": sigma, "spr": spr }))
                        .collect::<Vec<_>>(),
                ),
                _ => {
                    let mut s = String::from("sigma,spr\n");
                    for (sigma, spr) in rows {
                        s.push_str(&format!("{sigma},{spr}\n"));
                    }
                    s
                }
            }
        }
        None => {
            let res = solve_sigma_spectral(&model, &mesh, a.r, default_bracket(a.r), a.tol)?;
            match format {
                Format::Json => res.to_json(),
                _ => res.trace_csv()?,
            }
        }
    };
    Ok((body, true))
}

fn run_continuity(a: &ContinuityArgs, format: Format) -> Result<Outcome, Error> {
    let csv_or_json = |csv: String, json: String| match format {
        Format::Json => json,
        _ => csv,
    };
    let body = match a.family {
        Family::Contraction | Family::Halving => {
            let (family, limit) = if matches!(a.family, Family::Contraction) {
                let ks = a.n_list.clone().map(|l| l.0).unwrap_or_else(|| (1..=32).collect());
                (contraction_family(&ks)?, IfsModel::cantor())
            } else {
                let ns = a.n_list.clone().map(|l| l.0).unwrap_or_else(|| vec![2, 4, 8, 16]);
                (halving_family(&ns)?, halving_limit())
            };
            let rep = continuity_experiment(&family, &limit, a.r, a.depth)?;
            csv_or_json(rep.to_csv()?, rep.to_json())
        }
        Family::EqualSteps => {
            let ns = a.n_list.clone().map(|l| l.0).unwrap_or_else(|| vec![5, 10, 20, 40]);
            let rep = equal_steps_experiment(&ns, a.grid_size, a.r)?;
            let mut csv = String::from("n,w1,v_below,v_at_or_above,dimension\n");
            for row in &rep.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.n, row.w1, row.v_below, row.v_at_or_above, row.dimension
                ));
            }
            csv_or_json(csv, rep.to_json())
        }
        Family::Coefficient => {
            let model = require_model(&a.model)?;
            let s = match a.s {
                Some(s) => s,
                None => {
                    let ratios = model.similitude_ratios().ok_or_else(|| {
                        Error::Unsupported("pass --s for models with nonlinear maps".into())
                    })?;
                    closed_form_sigma(model.probs(), &ratios, a.r)?
                }
            };
            let ns = a.n_list.clone().map(|l| l.0).unwrap_or_else(|| (4..=64).collect());
            let mu = invariant_atoms_mid(&model, a.depth)?;
            let tr = coefficient_trace(&mu, a.r, s, &ns)?;
            let json = pretty(&json!({
                "r": tr.r,
                "s": tr.s,
                "min": tr.min,
                "max": tr.max,
                "ratio": tr.ratio(),
                "entries": tr.entries,
            }));
            csv_or_json(tr.to_csv()?, json)
        }
    };
    Ok((body, true))
}

fn run_distortion(a: &DistortionArgs, format: Format) -> Result<Outcome, Error> {
    let model = load_model(&a.model)?;
    let rep = distortion_report(&model, a.depth, a.mesh_size)?;
    let body = match format {
        Format::Json => rep.to_json(),
        _ => rep.to_csv()?,
    };
    Ok((body, true))
}

fn run_verify(a: &VerifyArgs, format: Format) -> Result<Outcome, Error> {
    let models = if a.model.is_empty() {
        default_models()
    } else {
        a.model
            .iter()
            .map(|p| {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                load_model(p).map(|m| (name, m))
            })
            .collect::<Result<_, _>>()?
    };
    let cfg = VerifyConfig { r_values: a.r_values.0.clone(), ..VerifyConfig::default() };
    let rep = verify_suite(&models, &cfg)?;
    let body = match format {
        Format::Json => rep.to_json(),
        Format::Csv => {
            let mut s = String::from("model,check,passed,detail\n");
            for c in &rep.checks {
                s.push_str(&format!("{},{},{},\"{}\"\n", c.model, c.check, c.passed, c.detail.replace('"', "\"\"")));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &rep.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{tag} {} {}: {}\n", c.model, c.check, c.detail));
            }
            let failed = rep.failures().count();
            s.push_str(&format!("{} checks, {failed} failed\n", rep.checks.len()));
            s
        }
    };
    Ok((body, rep.all_passed()))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Dim(a) => run_dim(a, cli.format),
        Command::Quantize(a) => run_quantize(a, cli.format),
        Command::Measure(a) => run_measure(a, cli.format),
        Command::Spectral(a) => run_spectral(a, cli.format),
        Command::Continuity(a) => run_continuity(a, cli.format),
        Command::Distortion(a) => run_distortion(a, cli.format),
        Command::Verify(a) => run_verify(a, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((body, success)) => {
            if let Err(e) = emit(cli.output.as_deref(), &body) {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("qdim: error [io]: {e}");
                return ExitCode::from(1);
            }
            if success {
                ExitCode::SUCCESS
            } else {
                eprintln!("qdim: verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match e {
                Error::Validation { .. } => eprintln!("qdim: error [{}]: {e}", e.kind_label()),
                _ => eprintln!("qdim: error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
