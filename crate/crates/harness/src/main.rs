use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use morh2w_core::matdense::Mat;
use morh2w_core::norms::{format_significant, h2_norm, hinf_norm, sigma_sweep};
use morh2w_core::optimality::OptimalityReport;
use morh2w_core::reducers::Method;
use morh2w_harness::config::{ExperimentConfig, InitSpec, OptionsSpec, SigmaSpec, WeightSpec};
use morh2w_harness::experiment::{run_experiment, Setup};
use morh2w_harness::io::{load_statespace, model_to_json, stability_warning};
use morh2w_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "morh2w", version, about = "Frequency-weighted H2 model reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce one plant with one method at one order.
    Reduce(ReduceArgs),
    /// Run several methods and orders and write a comparison table.
    Compare(CompareArgs),
    /// H2 and H-infinity norms of a system.
    Norms {
        #[arg(long)]
        plant: PathBuf,
    },
    /// Singular values of the frequency response on a log grid, as CSV.
    Sigma {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long, default_value = "0.01:1000", value_parser = parse_band)]
        band: (f64, f64),
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimality deviations of a given reduced model.
    Report {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        rom: PathBuf,
        /// `basis.json` with the projection matrices `V` and `W`.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    plant: PathBuf,
    /// Input weight file, or `identity`.
    #[arg(long, default_value = "identity")]
    wi: String,
    /// Output weight file, or `identity`.
    #[arg(long, default_value = "identity")]
    wo: String,
}

#[derive(Args)]
struct IterArgs {
    /// Relative pole-change tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// `modal`, `balanced`, `random`, or a model file.
    #[arg(long, default_value = "modal")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(short = 'r', long)]
    order: usize,
    #[arg(long, default_value = "fwhmor")]
    method: Method,
    #[command(flatten)]
    iter: IterArgs,
    /// Write the cell directory (model, basis, history) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment config; the other flags override it or stand in for it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    plant: Option<PathBuf>,
    #[arg(long)]
    wi: Option<String>,
    #[arg(long)]
    wo: Option<String>,
    /// Orders, comma separated.
    #[arg(short = 'r', long, value_delimiter = ',')]
    order: Vec<usize>,
    /// Methods, comma separated; all four by default.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Band of the error sigma sweeps.
    #[arg(long, value_parser = parse_band)]
    band: Option<(f64, f64)>,
    /// Record wall-clock times (outputs are then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower edge '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper edge '{hi}'"))?;
    if lo > 0.0 && lo < hi && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(format!("need 0 < lo < hi, got {lo}:{hi}"))
    }
}

fn weight_spec(s: &str) -> WeightSpec {
    if s.eq_ignore_ascii_case("identity") {
        WeightSpec::Identity
    } else {
        WeightSpec::File { path: PathBuf::from(s) }
    }
}

fn init_spec(s: &str) -> InitSpec {
    match s.to_ascii_lowercase().as_str() {
        "modal" => InitSpec::Modal,
        "balanced" => InitSpec::Balanced,
        "random" => InitSpec::Random,
        _ => InitSpec::File { path: PathBuf::from(s) },
    }
}

fn options(tol: Option<f64>, max_iters: Option<usize>, base: OptionsSpec) -> OptionsSpec {
    OptionsSpec { pole_tol: tol.unwrap_or(base.pole_tol), max_iters: max_iters.unwrap_or(base.max_iters), ..base }
}

fn load_setup(w: &WeightArgs) -> Result<Setup> {
    let plant = load_statespace(&w.plant)?;
    let wi = morh2w_harness::experiment::build_weight(&weight_spec(&w.wi), &plant, true)?;
    let wo = morh2w_harness::experiment::build_weight(&weight_spec(&w.wo), &plant, false)?;
    let setup = Setup::new(plant, wi, wo);
    for warning in setup.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(setup)
}

fn reduce(args: &ReduceArgs) -> Result<()> {
    let opts = options(args.iter.tol, args.iter.max_iters, OptionsSpec::default());
    if let Some(out) = &args.out {
        let cfg = ExperimentConfig {
            plant: args.weights.plant.clone(),
            input_weight: weight_spec(&args.weights.wi),
            output_weight: weight_spec(&args.weights.wo),
            methods: vec![args.method],
            orders: vec![args.order],
            seed: args.iter.seed,
            out: out.clone(),
            options: opts.clone(),
            init: init_spec(&args.iter.init),
            sigma: SigmaSpec::default(),
            record_timings: false,
        };
        cfg.validate()?;
        run_experiment(&cfg)?;
    }
    let setup = load_setup(&args.weights)?;
    let mut cells = setup.run_order(&[args.method], args.order, &init_spec(&args.iter.init), args.iter.seed, &opts.to_options());
    let (method, res, _) = cells.pop().expect("one cell");
    let red = res.map_err(|f| HarnessError::CellFailed { method: method.to_string(), kind: f.kind, message: f.message })?;
    match method {
        Method::Fwhmor | Method::Fwitia if red.converged => println!("{method} converged in {} iterations", red.iterations),
        Method::Fwhmor | Method::Fwitia => println!("{method} did not converge in {} iterations", red.iterations),
        _ => println!("{method} reduced to order {}", red.rom.n()),
    }
    for w in &red.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", model_to_json(&red.rom));
    let (h2, hinf, w) = setup.error_norms(&red.rom)?;
    println!("weighted error: h2={} hinf={} at omega={}", format_significant(h2, 6), format_significant(hinf, 6), format_significant(w, 6));
    Ok(())
}

fn compare(args: &CompareArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let plant = args.plant.clone().ok_or_else(|| HarnessError::Config("compare needs --config or --plant".into()))?;
            let out = args.out.clone().ok_or_else(|| HarnessError::Config("compare needs --out".into()))?;
            if args.order.is_empty() {
                return Err(HarnessError::Config("compare needs --order".into()));
            }
            ExperimentConfig {
                plant,
                input_weight: WeightSpec::Identity,
                output_weight: WeightSpec::Identity,
                methods: Method::ALL.to_vec(),
                orders: args.order.clone(),
                seed: 0,
                out,
                options: OptionsSpec::default(),
                init: InitSpec::Modal,
                sigma: SigmaSpec::default(),
                record_timings: false,
            }
        }
    };
    if args.config.is_some() {
        if let Some(p) = &args.plant {
            cfg.plant = p.clone();
        }
        if !args.order.is_empty() {
            cfg.orders = args.order.clone();
        }
        if let Some(o) = &args.out {
            cfg.out = o.clone();
        }
    }
    if let Some(s) = &args.wi {
        cfg.input_weight = weight_spec(s);
    }
    if let Some(s) = &args.wo {
        cfg.output_weight = weight_spec(s);
    }
    if !args.method.is_empty() {
        cfg.methods = args.method.clone();
    }
    if let Some(s) = &args.init {
        cfg.init = init_spec(s);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some((lo, hi)) = args.band {
        cfg.sigma.lo = lo;
        cfg.sigma.hi = hi;
    }
    cfg.options = options(args.tol, args.max_iters, cfg.options.clone());
    cfg.record_timings |= args.timings;
    cfg.validate()?;
    let table = run_experiment(&cfg)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", table.pretty());
    println!("wrote {}", cfg.out.join("table.csv").display());
    Ok(())
}

fn norms(plant: &Path) -> Result<()> {
    let sys = load_statespace(plant)?;
    if let Some(w) = stability_warning(&sys) {
        eprintln!("warning: {w}");
    }
    match h2_norm(&sys) {
        Ok(h2) => println!("h2={}", format_significant(h2, 6)),
        Err(morh2w_core::Error::NonzeroFeedthrough(_)) => println!("h2=inf"),
        Err(e) => return Err(e.into()),
    }
    let (hinf, w) = hinf_norm(&sys, 1e-8)?;
    println!("hinf={}", format_significant(hinf, 6));
    println!("hinf_omega={}", format_significant(w, 6));
    Ok(())
}

fn sigma(plant: &Path, band: (f64, f64), points: usize, out: Option<&Path>) -> Result<()> {
    let sys = load_statespace(plant)?;
    let data = sigma_sweep(&sys, band.0, band.1, points)?;
    match out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
            data.write_csv(std::io::BufWriter::new(f))?;
        }
        None => data.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn report(weights: &WeightArgs, rom: &Path, basis: Option<&Path>) -> Result<()> {
    let setup = load_setup(weights)?;
    let hr = load_statespace(rom)?;
    let vw = match basis {
        Some(path) => Some(load_basis(path)?),
        None => None,
    };
    let rep = setup.report(&hr, vw.as_ref().map(|(v, w)| (v, w)))?;
    for (name, value) in OptimalityReport::CSV_FIELDS.iter().zip(rep.csv_values()) {
        println!("{name}={}", format_significant(value, 6));
    }
    Ok(())
}

fn load_basis(path: &Path) -> Result<(Mat, Mat)> {
    #[derive(serde::Deserialize)]
    struct Basis {
        #[serde(rename = "V")]
        v: Vec<Vec<f64>>,
        #[serde(rename = "W")]
        w: Vec<Vec<f64>>,
    }
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let b: Basis = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mat = |rows: &[Vec<f64>]| -> Result<Mat> {
        let nc = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nc) {
            return Err(HarnessError::Config(format!("{}: ragged basis matrix", path.display())));
        }
        Ok(Mat::from_fn(rows.len(), nc, |i, j| rows[i][j]))
    };
    Ok((mat(&b.v)?, mat(&b.w)?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            if !matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                eprintln!("{}", Cli::command().render_help());
            }
            return ExitCode::from(1);
        }
    };
    let res = match &cli.command {
        Command::Reduce(a) => reduce(a),
        Command::Compare(a) => compare(a),
        Command::Norms { plant } => norms(plant),
        Command::Sigma { plant, band, points, out } => sigma(plant, *band, *points, out.as_deref()),
        Command::Report { weights, rom, basis } => report(weights, rom, basis.as_deref()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
