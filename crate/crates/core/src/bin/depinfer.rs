use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use depinfer::config::{McSection, RunConfig, SimulateSection};
use depinfer::dgp::{simulate_ar_arch, InnovationDist};
use depinfer::empirical::run_empirical;
use depinfer::experiments::{run_preset, Preset, RunManifest};
use depinfer::group::run_group_test;
use depinfer::hac::{hac_test_with, Bandwidth, KernelKind};
use depinfer::io::{ingest_returns, synthetic_dates, write_returns, Instrument, IngestMode};
use depinfer::series::{estimate, DependenceSpec, Measure};
use depinfer::{Error, Result};

/// Robust inference on serial dependence and volatility clustering in
/// heavy-tailed return series.
#[derive(Parser)]
#[command(name = "depinfer", version)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an AR(1)-GARCH(1,1) series and write it as a returns file.
    Simulate(SimulateArgs),
    /// Test one dependence measure on one series with the HAC and group t-tests.
    Test(TestArgs),
    /// Run a Monte Carlo preset and write CSV results with a JSON manifest.
    Mc(McArgs),
    /// Run the empirical pipeline on a returns file.
    Empirical(EmpiricalArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Skewed-t degrees of freedom; normal innovations when absent.
    #[arg(long)]
    eta: Option<f64>,
    /// Skewed-t asymmetry in (-1, 1); requires --eta.
    #[arg(long, requires = "eta")]
    lambda: Option<f64>,
    #[arg(short = 't', long = "len")]
    len: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Column name of the simulated series.
    #[arg(long, default_value = "sim")]
    name: String,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// Returns file with a date column.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<IngestMode>,
    /// Instrument column; the first one when absent.
    #[arg(long)]
    column: Option<String>,
    /// abs_power_autocov, abs_power_autocorr, signed_power_crosscov or signed_power_crosscorr.
    #[arg(long, value_parser = parse_measure)]
    measure: Option<Measure>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    lag: Option<usize>,
    #[arg(short, long)]
    q: Option<usize>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    confidence: Option<f64>,
    /// Use the Bartlett kernel instead of the quadratic-spectral kernel.
    #[arg(long)]
    bartlett: bool,
    /// Fixed HAC bandwidth instead of the automatic choice.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    /// One of table1, fig1, fig2, fig3.
    #[arg(short, long)]
    preset: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(short = 't', long = "len")]
    len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    pilot_len: Option<usize>,
    /// Comma-separated sweep values (phi for power presets, alpha for coverage).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Worker threads; all cores when absent. Results do not depend on it.
    #[arg(short, long)]
    workers: Option<usize>,
    /// Use 10 000 replications instead of the desk-scale default.
    #[arg(long)]
    full_scale: bool,
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<IngestMode>,
    #[arg(short, long)]
    q: Option<usize>,
    #[arg(long)]
    tail_fraction: Option<f64>,
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_mode(s: &str) -> std::result::Result<IngestMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_measure(s: &str) -> std::result::Result<Measure, String> {
    Measure::from_name(s).ok_or_else(|| format!("unknown measure '{s}'"))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn simulate(args: SimulateArgs, cfg: &RunConfig) -> Result<()> {
    let innovation = match (args.eta, args.lambda) {
        (Some(eta), lambda) => Some(InnovationDist::skewed_t(eta, lambda.unwrap_or(0.0))?),
        (None, _) => None,
    };
    let flags = SimulateSection {
        phi: args.phi,
        omega: args.omega,
        alpha: args.alpha,
        beta: args.beta,
        innovation,
        t: args.len,
        burn_in: args.burn_in,
        seed: args.seed,
    };
    let dgp = flags.or(&cfg.simulate).to_dgp();
    let x = simulate_ar_arch(&dgp)?;
    let inst = Instrument {
        name: args.name,
        dates: synthetic_dates(x.len()),
        returns: x,
    };
    match args.out {
        Some(path) => {
            let f = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
            write_returns(std::io::BufWriter::new(f), &[inst])
        }
        None => write_returns(std::io::stdout().lock(), &[inst]),
    }
}

fn pick_instrument(mut all: Vec<Instrument>, column: Option<&str>) -> Result<Instrument> {
    match column {
        Some(c) => {
            let names: Vec<String> = all.iter().map(|i| i.name.clone()).collect();
            let pos = all.iter().position(|i| i.name == c).ok_or_else(|| Error::Data {
                row: 0,
                column: c.to_string(),
                reason: format!("no such instrument; available: {}", names.join(", ")),
            })?;
            Ok(all.swap_remove(pos))
        }
        None => all.into_iter().next().ok_or_else(|| Error::Data {
            row: 0,
            column: String::new(),
            reason: "file has no instrument columns".into(),
        }),
    }
}

fn test(args: TestArgs, cfg: &RunConfig) -> Result<()> {
    let t = &cfg.test;
    let mode = args.mode.or(t.mode).unwrap_or(IngestMode::Returns);
    let inst = pick_instrument(ingest_returns(&args.input, mode)?, args.column.as_deref().or(t.column.as_deref()))?;
    let spec = DependenceSpec::new(
        args.measure.or(t.measure).unwrap_or(Measure::SignedPowerCrosscorr),
        args.exponent.or(t.exponent).unwrap_or(1.0),
        args.lag.or(t.lag).unwrap_or(1),
    )?;
    let q = args.q.or(t.q).unwrap_or(8);
    let beta0 = args.beta0.or(t.beta0).unwrap_or(0.0);
    let confidence = args.confidence.or(t.confidence).unwrap_or(0.95);
    let mut kernel = t.kernel.unwrap_or_default();
    if args.bartlett {
        kernel.kind = KernelKind::Bartlett;
    }
    if let Some(b) = args.bandwidth {
        kernel.bandwidth = Bandwidth::Fixed(b);
    }
    let x = &inst.returns;
    let est = estimate(x, &spec)?;
    let hac = hac_test_with(x, &spec, beta0, &kernel, confidence);
    let group = run_group_test(x, &spec, q, beta0, confidence);
    let report = json!({
        "instrument": inst.name,
        "n_obs": x.len(),
        "spec": spec,
        "estimate": est,
        "hac": hac.as_ref().map_err(|e| e.to_string()).ok(),
        "hac_error": hac.as_ref().err().map(|e| e.to_string()),
        "group": group.as_ref().map_err(|e| e.to_string()).ok(),
        "group_error": group.as_ref().err().map(|e| e.to_string()),
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    // A closed downstream pipe is not a failure of the test itself.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    // Both methods failing is an error; one failing is reported in the JSON.
    match (hac, group) {
        (Err(e), Err(_)) => Err(e),
        _ => Ok(()),
    }
}

fn mc(args: McArgs, cfg: &RunConfig) -> Result<()> {
    let flags = McSection {
        preset: args.preset,
        replications: args.replications,
        t: args.len,
        base_seed: args.seed,
        nominal_level: args.level,
        pilot_len: args.pilot_len,
        grid: args.grid,
        workers: args.workers,
        full_scale: args.full_scale.then_some(true),
    };
    let section = flags.or(&cfg.mc);
    let name = section.preset.clone().ok_or_else(|| {
        Error::param("preset", format!("no preset given; available presets: {}", Preset::names()))
    })?;
    let preset: Preset = name.parse()?;
    if preset == Preset::Empirical {
        return Err(Error::param(
            "preset",
            "the empirical preset is run with the `empirical` subcommand",
        ));
    }
    let opts = section.to_options();
    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let summary = run_preset(preset, &opts, section.workers)?;
    let csv_path = args.out_dir.join(format!("{}.csv", preset.name()));
    summary.write_csv_file(&csv_path)?;
    if preset == Preset::Table1 {
        let wide = args.out_dir.join("table1_wide.csv");
        let f = std::fs::File::create(&wide).map_err(|e| io_err(&wide, e))?;
        summary.write_wide_csv(std::io::BufWriter::new(f))?;
    }
    let manifest = RunManifest::new(preset, &opts)?;
    let mpath = args.out_dir.join(format!("{}_manifest.json", preset.name()));
    std::fs::write(&mpath, manifest.to_json()?).map_err(|e| io_err(&mpath, e))?;
    eprintln!("wrote {} rows to {}", summary.rows.len(), csv_path.display());
    Ok(())
}

fn empirical(args: EmpiricalArgs, cfg: &RunConfig) -> Result<()> {
    let mut ecfg = cfg.empirical.clone();
    if let Some(q) = args.q {
        ecfg.q = q;
    }
    if let Some(f) = args.tail_fraction {
        ecfg.tail_fraction = f;
    }
    let mode = args.mode.or(cfg.test.mode).unwrap_or(IngestMode::Returns);
    let instruments = ingest_returns(&args.input, mode)?;
    let report = run_empirical(&instruments, &ecfg)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let csv_path = args.out_dir.join("empirical_report.csv");
    let f = std::fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    report.write_csv(std::io::BufWriter::new(f))?;
    let json_path = args.out_dir.join("empirical_report.json");
    std::fs::write(&json_path, report.to_json()?).map_err(|e| io_err(&json_path, e))?;
    let mut err = std::io::stderr().lock();
    for inst in &report.instruments {
        let line = match (&inst.analysis, &inst.error) {
            (Some(a), _) => format!(
                "{}: n={} zeta={:.3} [{:.3}, {:.3}] s={}",
                inst.name,
                inst.n_obs,
                a.tail.zeta_hat,
                a.tail.ci.0,
                a.tail.ci.1,
                a.selected_s.map_or("none".to_string(), |s| s.to_string())
            ),
            (None, e) => format!("{}: error: {}", inst.name, e.clone().unwrap_or_default()),
        };
        let _ = writeln!(err, "{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate(a) => simulate(a, &cfg),
        Command::Test(a) => test(a, &cfg),
        Command::Mc(a) => mc(a, &cfg),
        Command::Empirical(a) => empirical(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
