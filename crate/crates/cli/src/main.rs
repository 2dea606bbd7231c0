use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stablefit::bench::{self, emit_table, run_mc_with_threads, Estimator, McConfig, McMetrics, TrueModel};
use stablefit::data::{goodness_of_fit, load_csv, load_csv_matrix, to_log_returns, to_simple_returns, SpectralModelSpec};
use stablefit::{fit_spectral_with, hybrid_fit, kw_initial, sample_mv, sample_uni, Error, Parametrization, Result, RngSeed, StableParams, UniEstimator, UniFitReport};

#[derive(Parser)]
#[command(name = "stablefit", version, about = "Simulate and fit alpha-stable laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a univariate sample, or a multivariate one from a spectral model file.
    Simulate(SimulateArgs),
    /// Fit a univariate stable law to one CSV column.
    Fit(FitArgs),
    /// Estimate the index, shift and discrete spectral measure of d = 1..3 columns.
    #[command(name = "fit-mv")]
    FitMv(FitMvArgs),
    /// Monte-Carlo study of an estimator.
    Bench(BenchArgs),
    /// Fit returns and report the Kolmogorov-Smirnov statistic and p-value.
    Gof(GofArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for bench::Format {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => bench::Format::Text,
            Format::Csv => bench::Format::Csv,
            Format::Json => bench::Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Zero,
    One,
}

impl From<Param> for Parametrization {
    fn from(p: Param) -> Self {
        match p {
            Param::Zero => Parametrization::Zero,
            Param::One => Parametrization::One,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UniEstimatorArg {
    Hybrid,
    Kw,
}

impl From<UniEstimatorArg> for UniEstimator {
    fn from(e: UniEstimatorArg) -> Self {
        match e {
            UniEstimatorArg::Hybrid => UniEstimator::Hybrid,
            UniEstimatorArg::Kw => UniEstimator::KogonWilliams,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchEstimator {
    Hybrid,
    Kw,
    SpectralEcf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Returns {
    /// Use the column as is.
    None,
    Log,
    Simple,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// CSV file.
    input: PathBuf,
    /// Column name or zero-based index (default: first column).
    #[arg(long)]
    column: Option<String>,
    /// The file has no header row.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, required_unless_present = "spectral", allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Parametrization of the location parameter.
    #[arg(long, value_enum, default_value = "zero")]
    param: Param,
    /// JSON model {alpha, d, L, weights, shift}; switches to multivariate sampling.
    #[arg(long, conflicts_with = "alpha")]
    spectral: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, env = "STABLEFIT_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "hybrid")]
    estimator: UniEstimatorArg,
    /// Treat the column as prices and difference it first.
    #[arg(long, value_enum, default_value = "none")]
    returns: Returns,
    /// Parametrization of the reported location.
    #[arg(long, value_enum, default_value = "zero")]
    param: Param,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FitMvArgs {
    /// CSV file with one column per coordinate.
    input: PathBuf,
    #[arg(long)]
    no_header: bool,
    /// Number of grid points (fixed at 2 for one column).
    #[arg(long = "L")]
    l: Option<usize>,
    /// Location form of the marginal fits the data are centred on.
    #[arg(long, value_enum, default_value = "zero")]
    param: Param,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON file holding one McConfig or a list of them; overrides the model flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated values produce one run each.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    delta: Vec<f64>,
    #[arg(long, value_enum, default_value = "zero")]
    param: Param,
    /// Spectral model file; implies the spectral-ecf estimator.
    #[arg(long)]
    spectral: Option<PathBuf>,
    #[arg(long, value_enum)]
    estimator: Option<BenchEstimator>,
    #[arg(long, default_value_t = 1500)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, env = "STABLEFIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "log")]
    returns: Returns,
    #[arg(long, value_enum, default_value = "hybrid")]
    estimator: UniEstimatorArg,
    #[command(flatten)]
    output: Output,
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable output");
    v.push(b'\n');
    v
}

fn table(rows: &[(String, f64)], format: Format) -> Vec<u8> {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("parameter,value\n");
            for (k, v) in rows {
                s.push_str(&format!("{k},{v}\n"));
            }
        }
        _ => {
            for (k, v) in rows {
                s.push_str(&format!("{k:<10} {v}\n"));
            }
        }
    }
    s.into_bytes()
}

fn param_rows(p: &StableParams) -> Vec<(String, f64)> {
    vec![
        ("alpha".into(), p.alpha),
        ("beta".into(), p.beta),
        ("sigma".into(), p.sigma),
        ("delta".into(), p.delta),
    ]
}

fn simulate(args: SimulateArgs) -> Result<Vec<u8>> {
    let seed = RngSeed(args.seed);
    if let Some(path) = &args.spectral {
        let model = SpectralModelSpec::from_json_file(path)?;
        let sample = sample_mv(&model, args.n, seed)?;
        return Ok(match args.output.format {
            Format::Json => json(&sample.rows().collect::<Vec<_>>()),
            Format::Csv | Format::Text => {
                let sep = if matches!(args.output.format, Format::Csv) { "," } else { " " };
                let mut s = String::new();
                if matches!(args.output.format, Format::Csv) {
                    let names: Vec<String> = (1..=sample.d()).map(|j| format!("x{j}")).collect();
                    s.push_str(&names.join(","));
                    s.push('\n');
                }
                for row in sample.rows() {
                    let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                    s.push_str(&cells.join(sep));
                    s.push('\n');
                }
                s.into_bytes()
            }
        });
    }
    let alpha = args.alpha.expect("clap requires alpha without --spectral");
    let params = StableParams::new(alpha, args.beta, args.sigma, args.delta, args.param.into())?;
    let sample = sample_uni(&params, args.n, seed)?;
    Ok(match args.output.format {
        Format::Json => json(&sample),
        Format::Csv | Format::Text => {
            let mut s = String::new();
            if matches!(args.output.format, Format::Csv) {
                s.push_str("x\n");
            }
            for x in &sample {
                s.push_str(&format!("{x}\n"));
            }
            s.into_bytes()
        }
    })
}

fn read_values(input: &Input, returns: Returns) -> Result<Vec<f64>> {
    let values = load_csv(&input.input, input.column.as_deref(), !input.no_header)?;
    match returns {
        Returns::None => Ok(values),
        Returns::Log => to_log_returns(&values),
        Returns::Simple => to_simple_returns(&values),
    }
}

#[derive(Serialize)]
struct FitOutput {
    estimator: UniEstimator,
    n: usize,
    estimate: StableParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    hybrid: Option<UniFitReport>,
}

fn fit(args: FitArgs) -> Result<Vec<u8>> {
    let values = read_values(&args.input, args.returns)?;
    let estimator: UniEstimator = args.estimator.into();
    let (estimate, hybrid) = match estimator {
        UniEstimator::Hybrid => {
            let r = hybrid_fit(&values)?;
            (r.estimate, Some(r))
        }
        UniEstimator::KogonWilliams => (kw_initial(&values)?, None),
    };
    let estimate = match args.param {
        Param::Zero => estimate.to_zero(),
        Param::One => estimate.to_one(),
    };
    Ok(match args.output.format {
        Format::Json => json(&FitOutput {
            estimator,
            n: values.len(),
            estimate,
            hybrid,
        }),
        f => {
            let mut rows = param_rows(&estimate);
            rows.push(("n".into(), values.len() as f64));
            if let Some(r) = &hybrid {
                rows.push(("k".into(), r.k_used as f64));
            }
            table(&rows, f)
        }
    })
}

fn fit_mv(args: FitMvArgs) -> Result<Vec<u8>> {
    let data = load_csv_matrix(&args.input, !args.no_header)?;
    let l = match (data.d(), args.l) {
        (1, None) => 2,
        (_, Some(l)) => l,
        (d, None) => return Err(Error::InvalidParams(format!("--L is required for d = {d}"))),
    };
    let fit = fit_spectral_with(&data, l, args.param.into())?;
    Ok(match args.output.format {
        Format::Json => json(&fit),
        f => {
            let mut rows = vec![("alpha".to_string(), fit.alpha_hat)];
            rows.extend(fit.delta_hat.iter().enumerate().map(|(j, &v)| (format!("delta_{}", j + 1), v)));
            rows.extend(fit.gamma_hat.iter().enumerate().map(|(l, &v)| (format!("gamma_{}", l + 1), v)));
            table(&rows, f)
        }
    })
}

fn bench_configs(args: &BenchArgs) -> Result<Vec<McConfig>> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let parsed = if value.is_array() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|c| vec![c])
        };
        return parsed.map_err(|e| Error::InvalidConfig(e.to_string()));
    }
    let base = |true_model, estimator| McConfig {
        true_model,
        n: args.n,
        replicates: args.reps,
        seed: RngSeed(args.seed),
        estimator,
    };
    if let Some(path) = &args.spectral {
        if matches!(args.estimator, Some(BenchEstimator::Hybrid | BenchEstimator::Kw)) {
            return Err(Error::InvalidConfig("--spectral requires the spectral-ecf estimator".into()));
        }
        let model = SpectralModelSpec::from_json_file(path)?;
        return Ok(vec![base(TrueModel::Spectral(model), Estimator::SpectralEcf)]);
    }
    let estimator = match args.estimator.unwrap_or(BenchEstimator::Hybrid) {
        BenchEstimator::Hybrid => Estimator::Hybrid,
        BenchEstimator::Kw => Estimator::KogonWilliams,
        BenchEstimator::SpectralEcf => {
            return Err(Error::InvalidConfig("spectral-ecf requires --spectral".into()));
        }
    };
    if args.alpha.is_empty() {
        return Err(Error::InvalidConfig("--alpha, --spectral or --config is required".into()));
    }
    let mut configs = Vec::new();
    for &alpha in &args.alpha {
        for &beta in &args.beta {
            for &sigma in &args.sigma {
                for &delta in &args.delta {
                    let p = StableParams::new(alpha, beta, sigma, delta, args.param.into())?;
                    configs.push(base(TrueModel::Uni(p), estimator));
                }
            }
        }
    }
    Ok(configs)
}

fn run_bench(args: BenchArgs) -> Result<Vec<u8>> {
    let configs = bench_configs(&args)?;
    let metrics = configs
        .iter()
        .map(|c| run_mc_with_threads(c, args.threads))
        .collect::<Result<Vec<McMetrics>>>()?;
    Ok(emit_table(&metrics, args.output.format.into()))
}

fn gof(args: GofArgs) -> Result<Vec<u8>> {
    let values = read_values(&args.input, args.returns)?;
    let report = goodness_of_fit(&values, args.estimator.into())?;
    Ok(match args.output.format {
        Format::Json => json(&report),
        f => {
            let mut rows = param_rows(&report.estimate);
            rows.push(("n".into(), report.n as f64));
            rows.push(("ks".into(), report.ks_statistic));
            rows.push(("p_value".into(), report.p_value));
            table(&rows, f)
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    let (bytes, out) = match cli.command {
        Command::Simulate(a) => {
            let out = a.output.out.clone();
            (simulate(a)?, out)
        }
        Command::Fit(a) => {
            let out = a.output.out.clone();
            (fit(a)?, out)
        }
        Command::FitMv(a) => {
            let out = a.output.out.clone();
            (fit_mv(a)?, out)
        }
        Command::Bench(a) => {
            let out = a.output.out.clone();
            (run_bench(a)?, out)
        }
        Command::Gof(a) => {
            let out = a.output.out.clone();
            (gof(a)?, out)
        }
    };
    write_output(&bytes, out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
