use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rocmar::io::{format_full, read_dataset, write_curve, write_curves, write_report};
use rocmar::simulation::{
    find_preset, presets, run_scenario, GeneratorSpec, MissingMechanism, Model, PerPopulation, PropensityMode,
    ScenarioConfig,
};
use rocmar::{estimate, EstimateOptions, Method, ProbabilityGrid, PropensityKind, RegressionSpec};

/// ROC curves and AUC with biomarkers missing at random.
#[derive(Parser)]
#[command(name = "rocmar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the ROC curve of a dataset CSV (columns pop,y,x1..xd).
    Estimate(EstimateArgs),
    /// Run a Monte Carlo scenario and write the summary report.
    Simulate(SimulateArgs),
    /// List the registered scenario presets.
    Scenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ipw,
    Kernel,
    Conv,
    Simplified,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropensityArg {
    Logistic,
    Constant,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "logistic")]
    propensity: PropensityArg,
    /// 1-based covariate columns of the logistic propensity (default: all).
    #[arg(long, value_delimiter = ',')]
    propensity_cols: Option<Vec<usize>>,
    /// 1-based covariate columns of the regression (default: all).
    #[arg(long, value_delimiter = ',')]
    regression_cols: Option<Vec<usize>>,
    #[arg(long)]
    no_intercept: bool,
    /// Number of interior grid points.
    #[arg(long, default_value_t = ProbabilityGrid::DEFAULT_POINTS)]
    grid: usize,
    /// Curve CSV; with `--method all` each method gets a `_<method>` suffix.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dim1,
    Dim2,
}

#[derive(Clone, Copy, ValueEnum)]
enum MissArg {
    None,
    M1,
    M2,
    Logistic2d,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropModeArg {
    Known,
    Logistic,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegArg {
    Full,
    Nointercept,
    X1only,
    X1sq,
}

const SCENARIO_FLAGS: [&str; 9] = [
    "model", "n", "miss_h", "miss_d", "prop_h", "prop_d", "regspec_h", "regspec_d", "grid",
];

#[derive(Args)]
struct SimulateArgs {
    /// Registered scenario (see `rocmar scenarios`).
    #[arg(long, conflicts_with_all = SCENARIO_FLAGS)]
    preset: Option<String>,
    #[arg(long, value_enum, required_unless_present = "preset")]
    model: Option<ModelArg>,
    /// Sample size of each population.
    #[arg(long, required_unless_present = "preset")]
    n: Option<usize>,
    #[arg(long)]
    nrep: Option<usize>,
    #[arg(long, value_enum, default_value = "none")]
    miss_h: MissArg,
    #[arg(long, value_enum, default_value = "none")]
    miss_d: MissArg,
    #[arg(long, value_enum, default_value = "known")]
    prop_h: PropModeArg,
    #[arg(long, value_enum, default_value = "known")]
    prop_d: PropModeArg,
    #[arg(long, value_enum, default_value = "full")]
    regspec_h: RegArg,
    #[arg(long, value_enum, default_value = "full")]
    regspec_d: RegArg,
    #[arg(long, default_value_t = ProbabilityGrid::DEFAULT_POINTS)]
    grid: usize,
    #[arg(long, default_value_t = ScenarioConfig::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output: PathBuf,
    /// Also write every replication's curves (`rep,p,roc,estimator`).
    #[arg(long)]
    emit_curves: Option<PathBuf>,
}

fn zero_based(cols: &Option<Vec<usize>>, flag: &str) -> Result<Option<Vec<usize>>> {
    let Some(cols) = cols else { return Ok(None) };
    cols.iter()
        .map(|&c| match c.checked_sub(1) {
            Some(c) => Ok(c),
            None => bail!("{flag}: column indices start at 1"),
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn suffixed(path: &Path, label: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn method_label(method: Method) -> &'static str {
    match method {
        Method::Empirical => "simplified",
        m => m.name(),
    }
}

/// Writes the whole buffer at once so an error leaves no partial file.
fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let data = read_dataset(BufReader::new(file)).with_context(|| format!("reading {}", args.input.display()))?;
    let opts = EstimateOptions {
        propensity: match args.propensity {
            PropensityArg::Logistic => PropensityKind::Logistic,
            PropensityArg::Constant => PropensityKind::Constant,
        },
        propensity_cols: zero_based(&args.propensity_cols, "--propensity-cols")?,
        regression_cols: zero_based(&args.regression_cols, "--regression-cols")?,
        intercept: !args.no_intercept,
        grid: ProbabilityGrid::new(args.grid)?,
    };
    let methods: &[Method] = match args.method {
        MethodArg::Ipw => &[Method::Ipw],
        MethodArg::Kernel => &[Method::Kernel],
        MethodArg::Conv => &[Method::Conv],
        MethodArg::Simplified => &[Method::Empirical],
        MethodArg::All => &[Method::Empirical, Method::Ipw, Method::Kernel, Method::Conv],
    };

    let mut outputs = Vec::new();
    for &method in methods {
        let est = estimate(&data, method, &opts).with_context(|| format!("{} estimator", method_label(method)))?;
        let path = if methods.len() > 1 { suffixed(&args.output, method_label(method)) } else { args.output.clone() };
        let mut buf = Vec::new();
        write_curve(&mut buf, est.grid.values(), &est.values, est.auc)?;
        outputs.push((method, est, path, buf));
    }
    // every estimate and target is checked before the first write
    for (_, _, path, _) in &outputs {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
    }
    for (method, est, path, buf) in outputs {
        write_file(&path, &buf)?;
        println!("{}\tauc={}\t{}", method_label(method), format_full(est.auc), path.display());
        if est.clamped > 0 {
            eprintln!("{}: {} propensities raised to the floor", method_label(method), est.clamped);
        }
    }
    Ok(())
}

fn mechanism(m: MissArg) -> MissingMechanism {
    match m {
        MissArg::None => MissingMechanism::None,
        MissArg::M1 => MissingMechanism::M1,
        MissArg::M2 => MissingMechanism::M2,
        MissArg::Logistic2d => MissingMechanism::Logistic2D,
    }
}

fn prop_mode(m: PropModeArg) -> PropensityMode {
    match m {
        PropModeArg::Known => PropensityMode::Known,
        PropModeArg::Logistic => PropensityMode::FitLogistic,
        PropModeArg::Constant => PropensityMode::FitConstant,
    }
}

fn reg_spec(r: RegArg, dim: usize) -> RegressionSpec {
    match r {
        RegArg::Full => RegressionSpec::full(dim),
        RegArg::Nointercept => RegressionSpec::without_intercept(dim),
        RegArg::X1only => RegressionSpec::first_only(),
        RegArg::X1sq => RegressionSpec::first_squared(),
    }
}

fn scenario_config(args: &SimulateArgs) -> Result<ScenarioConfig> {
    let mut config = match &args.preset {
        Some(name) => match find_preset(name) {
            Some(p) => p.config,
            None => bail!("unknown preset {name:?} (see `rocmar scenarios`)"),
        },
        None => {
            let model = match args.model.expect("required by clap") {
                ModelArg::Dim1 => Model::Dim1,
                ModelArg::Dim2 => Model::Dim2,
            };
            let dim = model.dim();
            let mut c = ScenarioConfig::complete(GeneratorSpec::new(model, args.n.expect("required by clap"))?);
            c.missing = PerPopulation::new(mechanism(args.miss_d), mechanism(args.miss_h));
            c.propensity = PerPopulation::new(prop_mode(args.prop_d), prop_mode(args.prop_h));
            c.regression = PerPopulation::new(reg_spec(args.regspec_d, dim), reg_spec(args.regspec_h, dim));
            c.grid = ProbabilityGrid::new(args.grid)?;
            c
        }
    };
    if let Some(n) = args.nrep {
        config.n_rep = n;
    }
    config.base_seed = args.seed;
    config.threads = args.threads;
    config.retain_curves = args.emit_curves.is_some();
    config.validate()?;
    Ok(config)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let config = scenario_config(args)?;
    let report = run_scenario(&config)?;
    let mut buf = Vec::new();
    write_report(&mut buf, &report)?;
    let curves = match &args.emit_curves {
        Some(path) => {
            let mut c = Vec::new();
            write_curves(&mut c, config.grid.values(), &report)?;
            Some((path, c))
        }
        None => None,
    };
    write_file(&args.output, &buf)?;
    if let Some((path, c)) = curves {
        write_file(path, &c)?;
    }
    if report.clamped > 0 {
        eprintln!(
            "{} propensities raised to the floor in {} replications",
            report.clamped, report.replications_clamped
        );
    }
    Ok(())
}

fn cmd_scenarios() -> Result<()> {
    let mut out = std::io::stdout().lock();
    for p in presets() {
        if let Err(e) = writeln!(out, "{}\t{}, {} replications", p.name, p.description, p.config.n_rep) {
            // a closed pipe (e.g. `| head`) is not an error
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                return Ok(());
            }
            return Err(e.into());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<rocmar::Error>())
        .any(rocmar::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Scenarios => cmd_scenarios(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
