//! Comparison runs: every (method, order) cell of a config, with per-cell
//! output directories and a summary table.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use morh2w_core::matdense::Mat;
use morh2w_core::norms::{format_significant, h2_norm, hinf_norm, sigma_sweep, SigmaData};
use morh2w_core::optimality::{report_from_partition, weighted_gramians, OptimalityReport};
use morh2w_core::reducers::{
    afwbt, fwbt_to_order, fwhmor, fwitia, modal_initial_rom, FwhmorOptions, FwitiaConfig, Method, ReductionResult,
};
use morh2w_core::statespace::{error_system, weighted_error_realization, StateSpace, WeightedProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, InitSpec, SigmaSpec, WeightSpec};
use crate::error::{HarnessError, Result};
use crate::io::{load_statespace, matrix_json, model_to_json, stability_warning};
use crate::weights::{butterworth_bandpass, sensitivity_weights};

pub const TABLE_HEADER: [&str; 7] = ["method", "order", "h2", "hinf", "iters", "converged", "seconds"];
const DIGITS: usize = 12;
const HINF_TOL: f64 = 1e-8;

/// Plant and weights shared by all cells of a run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub plant: StateSpace,
    pub input_weight: StateSpace,
    pub output_weight: StateSpace,
}

/// A failed cell: error kind for the table, message for the metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<&HarnessError> for Failure {
    fn from(e: &HarnessError) -> Self {
        Failure { kind: e.kind().to_string(), message: e.to_string() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::from(&e)
    }
}

impl From<morh2w_core::Error> for Failure {
    fn from(e: morh2w_core::Error) -> Self {
        Failure::from(HarnessError::from(e))
    }
}

/// Realize a weight for `plant`, the system being reduced.
pub fn build_weight(spec: &WeightSpec, plant: &StateSpace, input_side: bool) -> Result<StateSpace> {
    let k = if input_side { plant.m() } else { plant.p() };
    match spec {
        WeightSpec::Identity => Ok(StateSpace::identity(k)),
        WeightSpec::File { path } => load_statespace(path),
        WeightSpec::Bandpass { half_order, lo, hi } => Ok(block_diagonal(&butterworth_bandpass(*half_order, *lo, *hi)?, k)?),
        WeightSpec::InputSensitivity { loop_plant } => Ok(sensitivity_weights(&load_statespace(loop_plant)?, plant)?.0),
        WeightSpec::OutputSensitivity { loop_plant } => Ok(sensitivity_weights(&load_statespace(loop_plant)?, plant)?.1),
    }
}

/// `k` decoupled copies of a SISO filter.
fn block_diagonal(g: &StateSpace, k: usize) -> morh2w_core::Result<StateSpace> {
    if k == 1 {
        return Ok(g.clone());
    }
    let n = g.n();
    let mut a = Mat::zeros(n * k, n * k);
    let mut b = Mat::zeros(n * k, k);
    let mut c = Mat::zeros(k, n * k);
    for i in 0..k {
        a.view_mut((i * n, i * n), (n, n)).copy_from(g.a());
        b.view_mut((i * n, i), (n, 1)).copy_from(g.b());
        c.view_mut((i, i * n), (1, n)).copy_from(g.c());
    }
    StateSpace::new(a, b, c, Mat::identity(k, k) * g.d()[(0, 0)])
}

impl Setup {
    pub fn new(plant: StateSpace, input_weight: StateSpace, output_weight: StateSpace) -> Self {
        Setup { plant, input_weight, output_weight }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let plant = load_statespace(&cfg.plant)?;
        let wi = build_weight(&cfg.input_weight, &plant, true)?;
        let wo = build_weight(&cfg.output_weight, &plant, false)?;
        Ok(Setup::new(plant, wi, wo))
    }

    pub fn warnings(&self) -> Vec<String> {
        [("plant", &self.plant), ("input weight", &self.input_weight), ("output weight", &self.output_weight)]
            .iter()
            .filter_map(|(name, s)| stability_warning(s).map(|w| format!("{name}: {w}")))
            .collect()
    }

    /// Problem at order `r < n`.
    pub fn problem(&self, r: usize) -> Result<WeightedProblem> {
        Ok(WeightedProblem::new(self.plant.clone(), self.input_weight.clone(), self.output_weight.clone(), r)?)
    }

    /// Problem used for quantities that do not depend on the target order
    /// (gramians, error norms); accepts `r = n`.
    fn base_problem(&self, r: usize) -> Result<WeightedProblem> {
        let n = self.plant.n();
        if r == 0 || r > n {
            return Err(morh2w_core::Error::DimensionMismatch(format!("order {r} for a plant of order {n}")).into());
        }
        self.problem(r.min(n.saturating_sub(1)).max(1))
    }

    pub fn initial_rom(&self, spec: &InitSpec, r: usize, seed: u64) -> Result<StateSpace> {
        match spec {
            InitSpec::Modal => Ok(modal_initial_rom(&self.plant, r)?),
            InitSpec::Balanced => Ok(fwbt_to_order(&self.problem(r)?, r)?.rom),
            InitSpec::Random => Ok(random_rom(&self.plant, r, seed)?),
            InitSpec::File { path } => {
                let rom = load_statespace(path)?;
                if rom.n() != r {
                    return Err(morh2w_core::Error::DimensionMismatch(format!(
                        "initial model {} has order {}, cell order is {r}",
                        path.display(),
                        rom.n()
                    ))
                    .into());
                }
                Ok(rom)
            }
        }
    }

    /// Run `methods` at order `r`. FWITIA starts from the mirrored poles of
    /// the same initial model as FWHMOR; A-FWBT uses FWHMOR's gramian
    /// approximations.
    pub fn run_order(
        &self,
        methods: &[Method],
        r: usize,
        init: &InitSpec,
        seed: u64,
        opts: &FwhmorOptions,
    ) -> Vec<(Method, std::result::Result<ReductionResult, Failure>, f64)> {
        let needs_init = methods.iter().any(|m| *m != Method::Fwbt);
        let prob = self.problem(r).map_err(Failure::from);
        let start = if needs_init {
            prob.clone().and_then(|_| self.initial_rom(init, r, seed).map_err(Failure::from))
        } else {
            Err(Failure { kind: String::new(), message: String::new() })
        };
        let mut fwhmor_cache: Option<(std::result::Result<ReductionResult, Failure>, f64)> = None;
        let mut run_fwhmor = || -> (std::result::Result<ReductionResult, Failure>, f64) {
            let t = Instant::now();
            let res = match (&prob, &start) {
                (Ok(p), Ok(s)) => fwhmor(p, s, opts).map_err(Failure::from),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            (res, t.elapsed().as_secs_f64())
        };
        let mut out = Vec::with_capacity(methods.len());
        for &method in methods {
            let t = Instant::now();
            let (res, secs) = match method {
                Method::Fwbt => {
                    let res = self.base_problem(r).and_then(|b| Ok(fwbt_to_order(&b, r)?)).map_err(Failure::from);
                    (res, t.elapsed().as_secs_f64())
                }
                Method::Fwhmor => {
                    let cell = fwhmor_cache.get_or_insert_with(&mut run_fwhmor);
                    (cell.0.clone(), cell.1)
                }
                Method::Fwitia => {
                    let res = match (&prob, &start) {
                        (Ok(p), Ok(s)) => FwitiaConfig::mirrored(s).and_then(|c| fwitia(p, &c, opts)).map_err(Failure::from),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    (res, t.elapsed().as_secs_f64())
                }
                Method::Afwbt => {
                    let cell = fwhmor_cache.get_or_insert_with(&mut run_fwhmor);
                    let t = Instant::now();
                    let res = match (&cell.0, &prob) {
                        (Ok(fw), Ok(p)) => match (&fw.p_hat, &fw.q_hat) {
                            (Some(ph), Some(qh)) => afwbt(p, ph, qh).map_err(Failure::from),
                            _ => Err(Failure {
                                kind: "UnstableSystem".into(),
                                message: "fixed-point iteration ended on an unstable model; no gramian approximations".into(),
                            }),
                        },
                        (Err(e), _) | (_, Err(e)) => Err(Failure {
                            kind: e.kind.clone(),
                            message: format!("gramian approximations unavailable: {}", e.message),
                        }),
                    };
                    (res, t.elapsed().as_secs_f64())
                }
            };
            out.push((method, res, secs));
        }
        out
    }

    /// Weighted error norms `(‖E_w‖_H2, ‖E_w‖_H∞, ω_peak)`.
    pub fn error_norms(&self, rom: &StateSpace) -> Result<(f64, f64, f64)> {
        let base = self.base_problem(rom.n().min(self.plant.n()).max(1))?;
        let ew = weighted_error_realization(&base, rom)?;
        let h2 = h2_norm(&ew)?;
        let (hinf, w) = hinf_norm(&ew, HINF_TOL)?;
        Ok((h2, hinf, w))
    }

    /// Optimality report of `rom` against the weighted problem; basis fields
    /// are NaN without `(V, W)`.
    pub fn report(&self, rom: &StateSpace, basis: Option<(&Mat, &Mat)>) -> Result<OptimalityReport> {
        let base = self.base_problem(rom.n().min(self.plant.n()).max(1))?;
        let g = weighted_gramians(&base, rom)?;
        Ok(report_from_partition(&base, rom, &g, basis)?)
    }
}

/// Random stable model of order `r` with the plant's dimensions and feedthrough.
pub fn random_rom(plant: &StateSpace, r: usize, seed: u64) -> morh2w_core::Result<StateSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut draw = |rows, cols| Mat::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
    let m = draw(r, r);
    // Gershgorin shift puts every eigenvalue left of -0.5.
    let radius = (0..r)
        .map(|i| m[(i, i)] + (0..r).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let a = m - Mat::identity(r, r) * (radius + 0.5);
    let b = draw(r, plant.m());
    let c = draw(plant.p(), r);
    StateSpace::new(a, b, c, plant.d().clone())
}

/// Summary statistics of a successful cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub h2: f64,
    pub hinf: f64,
    pub iters: usize,
    pub converged: bool,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub method: Method,
    pub order: usize,
    pub outcome: std::result::Result<CellStats, String>,
}

/// One row per (method, order), methods in config order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
}

fn sig(x: f64) -> String {
    format_significant(x, DIGITS)
}

impl ComparisonTable {
    pub fn get(&self, method: Method, order: usize) -> Option<&Row> {
        self.rows.iter().find(|r| r.method == method && r.order == order)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TABLE_HEADER).expect("in-memory write");
        for row in &self.rows {
            let rec = match &row.outcome {
                Ok(s) => [
                    row.method.as_str().to_string(),
                    row.order.to_string(),
                    sig(s.h2),
                    sig(s.hinf),
                    s.iters.to_string(),
                    s.converged.to_string(),
                    s.seconds.map(sig).unwrap_or_default(),
                ],
                Err(kind) => [
                    row.method.as_str().to_string(),
                    row.order.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("FAILED:{kind}"),
                    String::new(),
                ],
            };
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Parse and validate a `table.csv`: exact header, finite numbers on
    /// successful rows, empty numbers on `FAILED:<kind>` rows, and an empty
    /// or nonnegative `seconds` field.
    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| e.to_string())?;
        if header.iter().ne(TABLE_HEADER) {
            return Err(format!("unexpected header {header:?}"));
        }
        let mut table = ComparisonTable::default();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let at = |msg: String| format!("row {}: {msg}", i + 1);
            let method: Method = rec[0].parse().map_err(|e: morh2w_core::Error| at(e.to_string()))?;
            let order: usize = rec[1].parse().map_err(|_| at(format!("bad order '{}'", &rec[1])))?;
            let finite = |s: &str| match s.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
                _ => Err(at(format!("expected a finite nonnegative number, got '{s}'"))),
            };
            let seconds = if rec[6].is_empty() { None } else { Some(finite(&rec[6])?) };
            let outcome = match rec[5].strip_prefix("FAILED:") {
                Some(kind) => {
                    if kind.is_empty() || !(rec[2].is_empty() && rec[3].is_empty() && rec[4].is_empty()) {
                        return Err(at("failed rows carry an error kind and no numbers".into()));
                    }
                    Err(kind.to_string())
                }
                None => Ok(CellStats {
                    h2: finite(&rec[2])?,
                    hinf: finite(&rec[3])?,
                    iters: rec[4].parse().map_err(|_| at(format!("bad iteration count '{}'", &rec[4])))?,
                    converged: rec[5].parse().map_err(|_| at(format!("bad converged flag '{}'", &rec[5])))?,
                    seconds,
                }),
            };
            if table.get(method, order).is_some() {
                return Err(at(format!("duplicate cell {method} r={order}")));
            }
            table.rows.push(Row { method, order, outcome });
        }
        Ok(table)
    }

    /// Fixed-width summary with norms rounded to 4 decimals.
    pub fn pretty(&self) -> String {
        let mut s = format!("{:<8} {:>3} {:>10} {:>10} {:>6}  {}\n", "method", "r", "H2", "Hinf", "iters", "status");
        for row in &self.rows {
            let line = match &row.outcome {
                Ok(c) => format!(
                    "{:<8} {:>3} {:>10.4} {:>10.4} {:>6}  {}",
                    row.method.as_str(),
                    row.order,
                    c.h2,
                    c.hinf,
                    c.iters,
                    if c.converged { "converged" } else { "not converged" }
                ),
                Err(kind) => format!("{:<8} {:>3} {:>10} {:>10} {:>6}  FAILED:{kind}", row.method.as_str(), row.order, "-", "-", "-"),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }
}

pub fn cell_dir_name(method: Method, order: usize) -> String {
    format!("{}_r{order}", method.slug())
}

/// Worker count: `MORH2W_THREADS` when set, else rayon's default.
fn thread_count() -> Result<usize> {
    match std::env::var("MORH2W_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(HarnessError::Config(format!("MORH2W_THREADS must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

/// Run every cell of `cfg`, write the outputs under `cfg.out`, re-validate
/// them, and return the table.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonTable> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    run_with_setup(cfg, &setup)
}

pub fn run_with_setup(cfg: &ExperimentConfig, setup: &Setup) -> Result<ComparisonTable> {
    fs::create_dir_all(&cfg.out).map_err(|e| HarnessError::io(&cfg.out, e))?;
    let opts = cfg.options.to_options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let per_order: Vec<Result<Vec<Row>>> = pool.install(|| {
        cfg.orders
            .par_iter()
            .map(|&r| {
                let cells = setup.run_order(&cfg.methods, r, &cfg.init, cfg.seed, &opts);
                cells
                    .into_iter()
                    .map(|(method, res, secs)| {
                        let timing = cfg.record_timings.then_some(secs);
                        let outcome = write_cell(&cfg.out, setup, method, r, &res, timing, &cfg.sigma, cfg.seed)?;
                        Ok(Row { method, order: r, outcome })
                    })
                    .collect()
            })
            .collect()
    });
    let mut cells = Vec::new();
    for rows in per_order {
        cells.extend(rows?);
    }
    let mut table = ComparisonTable { rows: Vec::new(), warnings: setup.warnings() };
    for &method in &cfg.methods {
        for &r in &cfg.orders {
            let i = cells.iter().position(|c| c.method == method && c.order == r).expect("every cell ran");
            table.rows.push(cells.swap_remove(i));
        }
    }
    write_atomic(&cfg.out.join("table.csv"), table.to_csv().as_bytes())?;
    write_atomic(&cfg.out.join("table_pretty.txt"), table.pretty().as_bytes())?;
    validate_outputs(&cfg.out, &table)?;
    Ok(table)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        sig(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
    } else {
        Value::Null
    }
}

/// Write one cell directory (staged in a hidden sibling, then renamed) and
/// return its table outcome.
#[allow(clippy::too_many_arguments)]
fn write_cell(
    out: &Path,
    setup: &Setup,
    method: Method,
    r: usize,
    res: &std::result::Result<ReductionResult, Failure>,
    seconds: Option<f64>,
    sigma: &SigmaSpec,
    seed: u64,
) -> Result<std::result::Result<CellStats, String>> {
    let name = cell_dir_name(method, r);
    let stage = out.join(format!(".{name}.partial"));
    let target = out.join(&name);
    if stage.exists() {
        fs::remove_dir_all(&stage).map_err(|e| HarnessError::io(&stage, e))?;
    }
    fs::create_dir_all(&stage).map_err(|e| HarnessError::io(&stage, e))?;
    let put = |file: &str, bytes: &[u8]| fs::write(stage.join(file), bytes).map_err(|e| HarnessError::io(&stage.join(file), e));

    let mut meta = json!({ "method": method.as_str(), "order": r, "seed": seed });
    let outcome = match res {
        Err(f) => {
            meta["status"] = json!("failed");
            meta["error_kind"] = json!(f.kind);
            meta["error"] = json!(f.message);
            Err(f.kind.clone())
        }
        Ok(red) => {
            let mut warnings = red.diagnostics.warnings.clone();
            put("rom.json", model_to_json(&red.rom).as_bytes())?;
            let basis = format!("{{\n  \"V\": {},\n  \"W\": {}\n}}\n", matrix_json(&red.v, "  "), matrix_json(&red.w, "  "));
            put("basis.json", basis.as_bytes())?;
            put("history.csv", history_csv(red, seconds.is_some()).as_bytes())?;
            match setup.report(&red.rom, Some((&red.v, &red.w))) {
                Ok(rep) => put("report.csv", report_csv(&rep).as_bytes())?,
                Err(e) => warnings.push(format!("optimality report unavailable: {e}")),
            }
            match error_system(&setup.plant, &red.rom).and_then(|e| sigma_sweep(&e, sigma.lo, sigma.hi, sigma.points)) {
                Ok(data) => {
                    let mut buf = Vec::new();
                    data.write_csv(&mut buf)?;
                    put("sigma.csv", &buf)?;
                }
                Err(e) => warnings.push(format!("sigma sweep unavailable: {e}")),
            }
            meta["iterations"] = json!(red.iterations);
            meta["converged"] = json!(red.converged);
            meta["rom_stable"] = json!(red.diagnostics.rom_stable);
            meta["biorth_error"] = json_num(red.diagnostics.biorth_error);
            if !red.diagnostics.singular_values.is_empty() {
                meta["singular_values"] = Value::Array(red.diagnostics.singular_values.iter().map(|&s| json_num(s)).collect());
            }
            if let Some(ir) = &red.diagnostics.interpolation {
                meta["interpolation_residual_right"] = json_num(ir.max_right());
                meta["interpolation_residual_left"] = json_num(ir.max_left());
            }
            let norms = setup.error_norms(&red.rom);
            let outcome = match &norms {
                Ok((h2, hinf, w)) => {
                    meta["status"] = json!(if red.converged { "converged" } else { "not_converged" });
                    meta["h2"] = json_num(*h2);
                    meta["hinf"] = json_num(*hinf);
                    meta["hinf_frequency"] = json_num(*w);
                    Ok(CellStats { h2: *h2, hinf: *hinf, iters: red.iterations, converged: red.converged, seconds })
                }
                Err(e) => {
                    meta["status"] = json!("failed");
                    meta["error_kind"] = json!(e.kind());
                    meta["error"] = json!(format!("error norms: {e}"));
                    Err(e.kind().to_string())
                }
            };
            meta["warnings"] = json!(warnings);
            outcome
        }
    };
    if let Some(s) = seconds {
        meta["seconds"] = json_num(s);
    }
    let mut text = serde_json::to_string_pretty(&meta).expect("json value");
    text.push('\n');
    put("meta.json", text.as_bytes())?;
    if target.exists() {
        fs::remove_dir_all(&target).map_err(|e| HarnessError::io(&target, e))?;
    }
    fs::rename(&stage, &target).map_err(|e| HarnessError::io(&target, e))?;
    Ok(outcome)
}

pub const HISTORY_HEADER: [&str; 6] = ["iteration", "pole_change", "e1", "e2", "xbar_norm", "spectral_abscissa"];

fn history_csv(red: &ReductionResult, timings: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = HISTORY_HEADER.to_vec();
    if timings {
        header.push("seconds");
    }
    w.write_record(&header).expect("in-memory write");
    for (i, rec) in red.history.records.iter().enumerate() {
        let alpha = rec.poles.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        let mut row = vec![(i + 1).to_string(), sig(rec.pole_change), sig(rec.e1), sig(rec.e2), sig(rec.xbar_norm), sig(alpha)];
        if timings {
            row.push(sig(rec.seconds));
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn report_csv(rep: &OptimalityReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(OptimalityReport::CSV_FIELDS).expect("in-memory write");
    w.write_record(rep.csv_values().iter().map(|&x| sig(x))).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Rows of a numeric CSV with the given leading header columns.
fn numeric_rows(text: &str, header: &[&str], extra: &[&str]) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let got: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    let mut want: Vec<&str> = header.to_vec();
    if got.len() > header.len() {
        want.extend_from_slice(extra);
    }
    if got != want {
        return Err(format!("unexpected header {got:?}"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            rec.iter().map(|f| f.parse::<f64>().map_err(|_| format!("not a number: '{f}'"))).collect()
        })
        .collect()
}

pub fn validate_history_csv(text: &str) -> std::result::Result<(), String> {
    let rows = numeric_rows(text, &HISTORY_HEADER, &["seconds"])?;
    for (i, row) in rows.iter().enumerate() {
        if row[0] != (i + 1) as f64 {
            return Err(format!("iteration column out of sequence at row {}", i + 1));
        }
        if !(row[1] >= 0.0) || (i == 0) != row[1].is_infinite() {
            return Err(format!("pole change at row {} must be +inf first, then finite and nonnegative", i + 1));
        }
        if row[2..5].iter().any(|x| x.is_infinite()) || !row[5].is_finite() {
            return Err(format!("non-finite trace data at row {}", i + 1));
        }
        if row.len() > 6 && !(row[6] >= 0.0 && row[6].is_finite()) {
            return Err(format!("bad timing at row {}", i + 1));
        }
    }
    Ok(())
}

pub fn validate_report_csv(text: &str) -> std::result::Result<(), String> {
    let rows = numeric_rows(text, &OptimalityReport::CSV_FIELDS, &[])?;
    if rows.len() != 1 {
        return Err(format!("expected one data row, found {}", rows.len()));
    }
    // The J columns are trace terms and may round to tiny negatives.
    let signed = 7..11;
    for (i, x) in rows[0].iter().enumerate() {
        if x.is_infinite() || (!signed.contains(&i) && *x < 0.0) {
            return Err(format!("{} must be finite or NaN and nonnegative, got {x}", OptimalityReport::CSV_FIELDS[i]));
        }
    }
    Ok(())
}

/// Re-read everything a run wrote and check it against the table.
pub fn validate_outputs(out: &Path, table: &ComparisonTable) -> Result<()> {
    let fail = |path: &Path, msg: String| HarnessError::Config(format!("output {} failed validation: {msg}", path.display()));
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| HarnessError::io(p, e));
    let table_path = out.join("table.csv");
    let parsed = ComparisonTable::from_csv(&read(&table_path)?).map_err(|m| fail(&table_path, m))?;
    if parsed.rows.len() != table.rows.len() {
        return Err(fail(&table_path, "row count differs from the run".into()));
    }
    for row in &table.rows {
        let dir = out.join(cell_dir_name(row.method, row.order));
        let meta_path = dir.join("meta.json");
        serde_json::from_str::<Value>(&read(&meta_path)?).map_err(|e| fail(&meta_path, e.to_string()))?;
        let path = |f: &str| -> PathBuf { dir.join(f) };
        if path("rom.json").exists() {
            load_statespace(&path("rom.json"))?;
        }
        if path("history.csv").exists() {
            validate_history_csv(&read(&path("history.csv"))?).map_err(|m| fail(&path("history.csv"), m))?;
        }
        if path("report.csv").exists() {
            validate_report_csv(&read(&path("report.csv"))?).map_err(|m| fail(&path("report.csv"), m))?;
        }
        if path("sigma.csv").exists() {
            SigmaData::from_csv(read(&path("sigma.csv"))?.as_bytes()).map_err(|e| fail(&path("sigma.csv"), e.to_string()))?;
        }
        if row.outcome.is_ok() && !path("rom.json").exists() {
            return Err(fail(&dir, "successful cell without rom.json".into()));
        }
    }
    Ok(())
}
