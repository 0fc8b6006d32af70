//! Batch experiment driver behind the `dynsamp` binary.
//!
//! An experiment is one JSON config plus a mode. Running it yields a JSON
//! report, a CSV table and, for singular scans, an optional spectrum CSV.
//! Every number in the outputs comes from a library operation; floats are
//! written with 17 significant digits so tables round-trip losslessly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evolution::{check_symmetric_decreasing, Filter, FilterKind};
use crate::reconstruct::{
    dense_oracle, dense_solve, forward, reconstruct_extended, reconstruct_plain, ExtendedOptions,
    Sampling, DENSE_ORACLE_CAP,
};
use crate::sis::{
    build_sis_system, choose_n, grid_tolerance, reducibility_check, riesz_bounds, separates,
    sis_forward, sis_reconstruct, sis_singular_scan, Generator, LineFilter, SisOptions,
    DEFAULT_OVERSAMPLE, DEFAULT_TRUNCATION,
};
use crate::spectral::Signal;
use crate::stability::{
    gautschi_dominance, j_grid, noise_sweep, pinv_norm_profile, stability_report, NoiseSetup,
    StabilityReport, NOISE_SLACK, SLOPE_TOLERANCE,
};
use crate::system::{
    det_plain, full_omega, minimal_omega, singular_set, PlainSystem, SINGULAR_TOL,
};

/// Relative round-trip tolerance on `ℓ²(ℤ)` signals.
pub const ROUNDTRIP_TOL: f64 = 1e-8;
/// Relative round-trip tolerance in a shift-invariant space.
pub const SIS_ROUNDTRIP_TOL: f64 = 1e-6;

const EXIT_CONFIG: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    Roundtrip,
    SingularScan,
    StabilityReport,
    NoiseSweep,
    SisRoundtrip,
    BoundsTable,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Roundtrip => "roundtrip",
            Mode::SingularScan => "singular_scan",
            Mode::StabilityReport => "stability_report",
            Mode::NoiseSweep => "noise_sweep",
            Mode::SisRoundtrip => "sis_roundtrip",
            Mode::BoundsTable => "bounds_table",
        }
    }

    /// Modes that draw random signals or noise.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Mode::Roundtrip | Mode::NoiseSweep | Mode::SisRoundtrip
        )
    }
}

fn one() -> usize {
    1
}

fn default_slack() -> f64 {
    NOISE_SLACK
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

fn default_oversample() -> usize {
    DEFAULT_OVERSAMPLE
}

fn default_n_min() -> usize {
    2
}

fn default_n_max() -> usize {
    31
}

/// One experiment, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    /// Discrete evolution filter on the `L`-point grid.
    #[serde(default)]
    pub filter: Option<FilterKind>,
    pub m: usize,
    /// Packet size; `sis_roundtrip` chooses it when absent.
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of time steps; defaults to `m`.
    #[serde(rename = "N", default)]
    pub rows: Option<usize>,
    /// Signal length; `bounds_table` derives it per `n` instead.
    #[serde(rename = "L", default)]
    pub len: Option<usize>,
    #[serde(default)]
    pub omega: Option<Vec<usize>>,
    #[serde(default)]
    pub sigmas: Vec<f64>,
    /// Random signals per round trip, or noise draws per level.
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Packet sizes for `bounds_table`.
    #[serde(default)]
    pub n_values: Vec<usize>,
    /// Points per unit of `ξ` per packet in `bounds_table`: `L = m·n·grid_resolution`.
    #[serde(default)]
    pub grid_resolution: Option<usize>,
    #[serde(default)]
    pub generator: Option<Generator>,
    #[serde(default)]
    pub line_filter: Option<LineFilter>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Solve outside the guaranteed regime.
    #[serde(default)]
    pub force: bool,
    /// Also solve with the dense measurement matrix.
    #[serde(default)]
    pub dense_check: bool,
    /// Write `spectrum.csv` in `singular_scan`.
    #[serde(default)]
    pub spectrum: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn n(&self) -> usize {
        self.n.unwrap_or(1)
    }

    fn rows(&self) -> usize {
        self.rows.unwrap_or(self.m)
    }

    fn omega_or(&self, default: Vec<usize>) -> Vec<usize> {
        self.omega.clone().unwrap_or(default)
    }

    fn is_plain(&self) -> bool {
        self.omega.as_ref().is_none_or(|o| o.is_empty()) && self.n() == 1
    }
}

/// Command-line interface: a mode, a config file and scalar overrides.
#[derive(Debug, Parser)]
#[command(name = "dynsamp", version, about = "Dynamical sampling experiments")]
pub struct Cli {
    pub mode: Mode,
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "N")]
    pub rows: Option<usize>,
    #[arg(long = "L")]
    pub len: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub oversample: Option<usize>,
    #[arg(long = "grid_resolution")]
    pub grid_resolution: Option<usize>,
    #[arg(long = "n_min")]
    pub n_min: Option<usize>,
    #[arg(long = "n_max")]
    pub n_max: Option<usize>,
}

impl Cli {
    /// Top-level scalar fields given on the command line replace the config's.
    pub fn apply(&self, config: &mut ExperimentConfig) {
        config.mode = Some(self.mode);
        if let Some(out) = &self.out {
            config.out = Some(out.clone());
        }
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        if let Some(m) = self.m {
            config.m = m;
        }
        if let Some(n) = self.n {
            config.n = Some(n);
        }
        if let Some(rows) = self.rows {
            config.rows = Some(rows);
        }
        if let Some(len) = self.len {
            config.len = Some(len);
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(slack) = self.slack {
            config.slack = slack;
        }
        if let Some(k) = self.truncation {
            config.truncation = k;
        }
        if let Some(p) = self.oversample {
            config.oversample = p;
        }
        if let Some(q) = self.grid_resolution {
            config.grid_resolution = Some(q);
        }
        if let Some(v) = self.n_min {
            config.n_min = v;
        }
        if let Some(v) = self.n_max {
            config.n_max = v;
        }
    }
}

/// Every hypothesis or divisibility requirement the config breaks.
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    let mut out = Vec::new();
    let Some(mode) = config.mode else {
        return vec!["mode is missing".into()];
    };
    let m = config.m;
    if m == 0 {
        return vec!["m must be at least 1".into()];
    }
    if config.n == Some(0) {
        out.push("n must be at least 1".into());
    }
    if config.rows == Some(0) {
        out.push("N must be at least 1".into());
    }
    if mode.is_stochastic() && config.seed.is_none() {
        out.push(format!(
            "seed is required for the stochastic mode {}",
            mode.name()
        ));
    }
    if config.trials == 0 {
        out.push("trials must be at least 1".into());
    }

    if mode == Mode::BoundsTable {
        validate_bounds_table(config, &mut out);
        return out;
    }
    let Some(len) = config.len else {
        out.push(format!("L is required for mode {}", mode.name()));
        return out;
    };
    if len == 0 || len % m != 0 {
        out.push(format!("L = {len} is not divisible by m = {m}"));
        return out;
    }
    if mode == Mode::SisRoundtrip {
        validate_sis(config, len, &mut out);
        return out;
    }

    let filter = match &config.filter {
        None => {
            out.push(format!("a filter is required for mode {}", mode.name()));
            return out;
        }
        Some(kind) => match Filter::from_kind(kind, len) {
            Ok(f) => f,
            Err(e) => {
                out.push(format!("filter: {e}"));
                return out;
            }
        },
    };
    let n = config.n();
    match mode {
        Mode::Roundtrip => {
            if config.rows() < m {
                out.push(format!(
                    "N = {} is smaller than m = {m}; recovery needs N >= m",
                    config.rows()
                ));
            }
            if config.is_plain() {
                if config.rows() >= m {
                    match singular_set(&filter, m, SINGULAR_TOL) {
                        Ok(s) if !s.is_empty() => out.push(format!(
                            "hypothesis \"A_m(xi) invertible on the whole grid\" fails for plain recovery: singular at grid indices {s:?}; add extra samples (omega, n)"
                        )),
                        Err(e) => out.push(e.to_string()),
                        _ => {}
                    }
                }
            } else {
                let omega = config.omega_or(Vec::new());
                check_extended_shape(len, m, n, &omega, &mut out);
                if !config.force {
                    check_extra_sample_regime(m, n, &omega, &mut out);
                }
            }
        }
        Mode::SingularScan => {}
        Mode::StabilityReport => {
            if let Some(omega) = &config.omega {
                check_full_omega(m, omega, &mut out);
            }
            check_upper_bound_regime(&filter, m, n, &mut out);
            check_stability_grid(len, m, n, &mut out);
        }
        Mode::NoiseSweep => {
            let omega = config.omega_or(minimal_omega(m));
            check_extended_shape(len, m, n, &omega, &mut out);
            check_extra_sample_regime(m, n, &omega, &mut out);
            if len % (m * n) == 0 && len / m < 4 * m * n {
                out.push(format!(
                    "grid L/m = {} is coarser than 4mn = {}",
                    len / m,
                    4 * m * n
                ));
            }
            if config.sigmas.is_empty() {
                out.push("sigmas must list at least one noise level".into());
            }
            if config.sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                out.push("noise levels must be finite and nonnegative".into());
            }
            if !(config.slack.is_finite() && config.slack >= 0.0) {
                out.push("slack must be finite and nonnegative".into());
            }
        }
        Mode::SisRoundtrip | Mode::BoundsTable => unreachable!("handled above"),
    }
    out
}

fn check_extended_shape(len: usize, m: usize, n: usize, omega: &[usize], out: &mut Vec<String>) {
    if n == 0 {
        return;
    }
    if !len.is_multiple_of(m * n) {
        out.push(format!("L = {len} is not divisible by m*n = {}", m * n));
    }
    if let Some(c) = omega.iter().find(|&&c| c >= m * n) {
        out.push(format!(
            "shift {c} in omega is outside 0..m*n = 0..{}",
            m * n
        ));
    }
}

fn check_extra_sample_regime(m: usize, n: usize, omega: &[usize], out: &mut Vec<String>) {
    if n.is_multiple_of(2) {
        out.push(format!(
            "hypothesis \"n is odd\" fails for the extra-sample guarantee: n = {n}"
        ));
    }
    if m.is_multiple_of(2) {
        out.push(format!(
            "hypothesis \"m is odd\" fails for the extra-sample guarantee: m = {m}"
        ));
    }
    let missing: Vec<usize> = minimal_omega(m)
        .into_iter()
        .filter(|c| !omega.contains(c))
        .collect();
    if !missing.is_empty() {
        out.push(format!(
            "hypothesis \"Omega contains 1..(m-1)/2\" fails for the extra-sample guarantee: missing {missing:?}"
        ));
    }
}

fn check_full_omega(m: usize, omega: &[usize], out: &mut Vec<String>) {
    let mut sorted = omega.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != full_omega(m) {
        out.push(format!(
            "hypothesis \"Omega = {{0, ..., m-1}}\" of the upper stability bound fails: Omega = {omega:?}"
        ));
    }
}

fn check_upper_bound_regime(filter: &Filter, m: usize, n: usize, out: &mut Vec<String>) {
    if m.is_multiple_of(2) {
        out.push(format!(
            "hypothesis \"m is odd\" fails for the stability bounds: m = {m}"
        ));
    }
    if n.is_multiple_of(2) {
        out.push(format!(
            "hypothesis \"n is odd\" fails for the stability bounds: n = {n}"
        ));
    }
    let check = check_symmetric_decreasing(filter);
    if !check.holds {
        out.push(format!(
            "hypothesis \"a^ real, symmetric and strictly decreasing on [0, 1/2]\" fails at grid index {:?}",
            check.violation
        ));
    }
}

fn check_stability_grid(len: usize, m: usize, n: usize, out: &mut Vec<String>) {
    if n == 0 || !len.is_multiple_of(m * n) {
        out.push(format!("L = {len} is not divisible by m*n = {}", m * n));
        return;
    }
    let coarse = len / m;
    if coarse < 4 * m * n {
        out.push(format!(
            "grid L/m = {coarse} is coarser than 4mn = {}",
            4 * m * n
        ));
    }
    let inside = j_grid(coarse, n).len();
    if inside < 8 * m * n {
        out.push(format!(
            "only {inside} grid points fall inside J; need at least 8mn = {}",
            8 * m * n
        ));
    }
}

fn validate_bounds_table(config: &ExperimentConfig, out: &mut Vec<String>) {
    let m = config.m;
    if config.n_values.is_empty() {
        out.push("n_values must list at least one packet size".into());
    }
    if !config.n_values.windows(2).all(|w| w[0] < w[1]) {
        out.push("n_values must be strictly increasing".into());
    }
    if let Some(omega) = &config.omega {
        check_full_omega(m, omega, out);
    }
    let q = config.grid_resolution.unwrap_or(16 * m);
    match &config.filter {
        None => out.push("a filter is required for mode bounds_table".into()),
        Some(FilterKind::Table { .. }) => out.push(
            "bounds_table resamples the filter per n; a table filter cannot be resampled".into(),
        ),
        Some(kind) => {
            for &n in &config.n_values {
                if n == 0 {
                    out.push("n_values must be positive".into());
                    continue;
                }
                let len = m * n * q;
                match Filter::from_kind(kind, len) {
                    Ok(filter) => {
                        let before = out.len();
                        check_upper_bound_regime(&filter, m, n, out);
                        check_stability_grid(len, m, n, out);
                        if out.len() > before {
                            out.push(format!("(the messages above concern n = {n}, L = {len})"));
                        }
                    }
                    Err(e) => out.push(format!("filter: {e}")),
                }
            }
        }
    }
}

fn validate_sis(config: &ExperimentConfig, len: usize, out: &mut Vec<String>) {
    let m = config.m;
    if config.generator.is_none() {
        out.push("a generator is required for mode sis_roundtrip".into());
    }
    match &config.line_filter {
        None => out.push("a line_filter is required for mode sis_roundtrip".into()),
        Some(lf) => {
            if let Err(e) = lf.validate() {
                out.push(format!("line_filter: {e}"));
            }
        }
    }
    if config.truncation == 0 || config.oversample == 0 {
        out.push("truncation and oversample must be positive".into());
    }
    if config.rows() < m {
        out.push(format!(
            "N = {} is smaller than m = {m}; recovery needs N >= m",
            config.rows()
        ));
    }
    let omega = config.omega_or((1..m).collect());
    if !config.force {
        let missing: Vec<usize> = (1..m).filter(|c| !omega.contains(c)).collect();
        if !missing.is_empty() {
            out.push(format!(
                "hypothesis \"Omega = {{1, ..., m-1}}\" fails for the shift-invariant guarantee: missing {missing:?}"
            ));
        }
    }
    if let Some(n) = config.n {
        if n > 0 {
            check_extended_shape(len, m, n, &omega, out);
        }
    } else if config.n_min > config.n_max {
        out.push(format!(
            "n_min = {} exceeds n_max = {}",
            config.n_min, config.n_max
        ));
    }
}

/// CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Outputs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub report: Value,
    pub table: Table,
    pub spectrum: Option<Table>,
    /// Guarantees the run found broken; empty on success.
    pub violations: Vec<String>,
}

impl Artifacts {
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut report = serde_json::to_string_pretty(&self.report)?;
        report.push('\n');
        fs::write(dir.join("report.json"), report)?;
        fs::write(dir.join("table.csv"), self.table.to_csv()?)?;
        if let Some(spectrum) = &self.spectrum {
            fs::write(dir.join("spectrum.csv"), spectrum.to_csv()?)?;
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Complex signal with independent standard normal real and imaginary parts.
pub fn random_signal(len: usize, rng: &mut ChaCha8Rng) -> Signal {
    let values = (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    Signal::new(values).expect("finite samples")
}

/// Runs a validated config.
pub fn run(config: &ExperimentConfig) -> Result<Artifacts> {
    let violations = validate(config);
    if !violations.is_empty() {
        return Err(Error::Config(violations.join("; ")));
    }
    match config.mode.expect("validated") {
        Mode::Roundtrip => run_roundtrip(config),
        Mode::SingularScan => run_singular_scan(config),
        Mode::StabilityReport => run_stability_report(config),
        Mode::NoiseSweep => run_noise_sweep(config),
        Mode::SisRoundtrip => run_sis_roundtrip(config),
        Mode::BoundsTable => run_bounds_table(config),
    }
}

fn discrete_filter(config: &ExperimentConfig, len: usize) -> Result<Filter> {
    let kind = config
        .filter
        .as_ref()
        .ok_or_else(|| Error::Config("filter is missing".into()))?;
    Filter::from_kind(kind, len)
}

fn header(config: &ExperimentConfig) -> Value {
    json!({
        "mode": config.mode.map(Mode::name),
        "m": config.m,
        "n": config.n,
        "N": config.rows(),
        "L": config.len,
        "omega": config.omega,
        "seed": config.seed,
        "trials": config.trials,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn run_roundtrip(config: &ExperimentConfig) -> Result<Artifacts> {
    let len = config.len.expect("validated");
    let a = discrete_filter(config, len)?;
    let m = config.m;
    let plain = config.is_plain();
    let sampling = if plain {
        Sampling::plain(m, config.rows())
    } else {
        Sampling::extended(m, config.rows(), config.n(), &config.omega_or(Vec::new()))
    };
    let dense = if config.dense_check {
        if len > DENSE_ORACLE_CAP {
            return Err(Error::TooLarge {
                len,
                cap: DENSE_ORACLE_CAP,
            });
        }
        Some(dense_oracle(&a, &sampling)?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.expect("validated"));
    let mut table = if dense.is_some() {
        Table::new(&["trial", "rel_error", "dense_rel_error", "dense_agreement"])
    } else {
        Table::new(&["trial", "rel_error"])
    };
    let mut errors = Vec::with_capacity(config.trials);
    let mut dense_errors = Vec::new();
    for trial in 0..config.trials {
        let f = random_signal(len, &mut rng);
        let samples = forward(&f, &a, &sampling)?;
        let rec = if plain {
            reconstruct_plain(&samples, &a)?
        } else {
            reconstruct_extended(
                &samples,
                &a,
                ExtendedOptions {
                    force: config.force,
                },
            )?
        };
        let err = rec.relative_error(&f);
        errors.push(err);
        let mut row = vec![trial.to_string(), num(err)];
        if let Some(oracle) = &dense {
            let via_dense = dense_solve(oracle, &samples)?;
            let agreement = via_dense.relative_error(&rec);
            row.push(num(via_dense.relative_error(&f)));
            row.push(num(agreement));
            dense_errors.push(agreement);
        }
        table.push(row);
    }
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let mut violations = Vec::new();
    if max_error > ROUNDTRIP_TOL {
        violations.push(format!(
            "round-trip relative error {max_error:e} exceeds {ROUNDTRIP_TOL:e}"
        ));
    }
    let report = merge(
        header(config),
        json!({
            "filter": config.filter,
            "sampling": if plain { "plain" } else { "extended" },
            "rel_errors": errors,
            "max_rel_error": max_error,
            "dense_agreement": if dense.is_some() { Some(dense_errors) } else { None },
            "tolerance": ROUNDTRIP_TOL,
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report,
        table,
        spectrum: None,
        violations,
    })
}

fn run_singular_scan(config: &ExperimentConfig) -> Result<Artifacts> {
    let len = config.len.expect("validated");
    let a = discrete_filter(config, len)?;
    let m = config.m;
    let system = PlainSystem::new(&a, m, m)?;
    let coarse = system.grid_len();
    let singular = system.singular_set(SINGULAR_TOL)?;
    let xi = |rho: usize| rho as f64 / coarse as f64;
    let mut table = Table::new(&["grid_index", "xi", "smin"]);
    for &rho in &singular {
        table.push(vec![rho.to_string(), num(xi(rho)), num(system.smin(rho)?)]);
    }
    let spectrum = if config.spectrum {
        let mut s = Table::new(&["xi", "smin", "det_abs"]);
        for rho in 0..coarse {
            s.push(vec![
                num(xi(rho)),
                num(system.smin(rho)?),
                num(det_plain(&a, m, m, rho)?.node_product.norm()),
            ]);
        }
        Some(s)
    } else {
        None
    };
    let mut violations = Vec::new();
    let symmetric = a.is_symmetric_decreasing();
    if symmetric && m > 1 {
        let expected: Vec<usize> = std::iter::once(0)
            .chain((coarse % 2 == 0).then_some(coarse / 2))
            .collect();
        if singular != expected {
            violations.push(format!(
                "symmetric decreasing filter should be singular exactly at xi in {{0, 1/2}}; found grid indices {singular:?}"
            ));
        }
    }
    let report = merge(
        header(config),
        json!({
            "filter": config.filter,
            "symmetric_decreasing": symmetric,
            "grid": coarse,
            "tolerance": SINGULAR_TOL,
            "singular_indices": singular,
            "singular_xi": singular.iter().map(|&r| xi(r)).collect::<Vec<_>>(),
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report,
        table,
        spectrum,
        violations,
    })
}

fn stability_violations(report: &StabilityReport) -> Vec<String> {
    let mut out = Vec::new();
    if report.lower_bound > report.empirical_norm {
        out.push(format!(
            "lower bound {} exceeds the pseudoinverse norm {} (n = {})",
            report.lower_bound, report.empirical_norm, report.n
        ));
    }
    let upper = report.tightest_upper();
    if report.empirical_norm_full > upper {
        out.push(format!(
            "pseudoinverse norm {} exceeds the upper bound {upper} (n = {})",
            report.empirical_norm_full, report.n
        ));
    }
    out
}

fn run_stability_report(config: &ExperimentConfig) -> Result<Artifacts> {
    let len = config.len.expect("validated");
    let a = discrete_filter(config, len)?;
    let (m, n) = (config.m, config.n());
    let report = stability_report(&a, m, n)?;
    let minimal = pinv_norm_profile(&a, m, n, &minimal_omega(m))?;
    let full = pinv_norm_profile(&a, m, n, &full_omega(m))?;
    let (gautschi_checked, gautschi_violations) = gautschi_dominance(&a, m)?;
    let mut table = Table::new(&["packet", "xi", "pinv_norm_minimal", "pinv_norm_full"]);
    for (rho, (lo, hi)) in minimal.iter().zip(&full).enumerate() {
        table.push(vec![
            rho.to_string(),
            num(rho as f64 / report.grid as f64),
            num(*lo),
            num(*hi),
        ]);
    }
    let mut violations = stability_violations(&report);
    if !gautschi_violations.is_empty() {
        violations.push(format!(
            "Gautschi bound below the SVD norm at grid indices {gautschi_violations:?}"
        ));
    }
    let json_report = merge(
        header(config),
        json!({
            "filter": config.filter,
            "stability": report,
            "tightest_upper": report.tightest_upper(),
            "sandwich_holds": report.sandwich_holds(),
            "gautschi_checked": gautschi_checked,
            "gautschi_violations": gautschi_violations,
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report: json_report,
        table,
        spectrum: None,
        violations,
    })
}

fn run_noise_sweep(config: &ExperimentConfig) -> Result<Artifacts> {
    let len = config.len.expect("validated");
    let a = discrete_filter(config, len)?;
    let (m, n) = (config.m, config.n());
    let omega = config.omega_or(minimal_omega(m));
    let seed = config.seed.expect("validated");
    let mut signal_rng = ChaCha8Rng::seed_from_u64(seed);
    signal_rng.set_stream(1);
    let f = random_signal(len, &mut signal_rng);
    let setup = NoiseSetup {
        f: &f,
        a: &a,
        m,
        n,
        omega: &omega,
        slack: config.slack,
    };
    let sweep = noise_sweep(&setup, &config.sigmas, config.trials, seed)?;
    let mut table = Table::new(&[
        "sigma",
        "trials",
        "mean_error",
        "bound",
        "ratio",
        "violated",
    ]);
    for p in &sweep.points {
        table.push(vec![
            num(p.sigma),
            p.trials.to_string(),
            num(p.mean_error),
            num(p.bound),
            num(p.ratio),
            p.violated.to_string(),
        ]);
    }
    let mut violations: Vec<String> = sweep
        .points
        .iter()
        .filter(|p| p.violated)
        .map(|p| {
            format!(
                "mean error {} exceeds (1 + slack) x bound {} at sigma = {}",
                p.mean_error, p.bound, p.sigma
            )
        })
        .collect();
    if sweep.points.len() >= 2 && sweep.slope_deviation > SLOPE_TOLERANCE {
        violations.push(format!(
            "fitted slope deviates from proportionality by {:.3}%",
            100.0 * sweep.slope_deviation
        ));
    }
    let report = merge(
        header(config),
        json!({
            "filter": config.filter,
            "omega": omega,
            "slack": config.slack,
            "sweep": sweep,
            "slope_tolerance": SLOPE_TOLERANCE,
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report,
        table,
        spectrum: None,
        violations,
    })
}

fn run_sis_roundtrip(config: &ExperimentConfig) -> Result<Artifacts> {
    let len = config.len.expect("validated");
    let m = config.m;
    let gen = config
        .generator
        .clone()
        .ok_or_else(|| Error::Config("generator is missing".into()))?;
    let lf = config
        .line_filter
        .clone()
        .ok_or_else(|| Error::Config("line_filter is missing".into()))?;
    let model = build_sis_system(&gen, &lf, len, m, config.truncation)?;
    let singular = sis_singular_scan(&model, m)?;
    let tol = grid_tolerance(len);
    let n = match config.n {
        Some(n) => n,
        None => choose_n(&singular, config.n_min, config.n_max, tol)?,
    };
    if !len.is_multiple_of(m * n) {
        return Err(Error::Config(format!(
            "L = {len} is not divisible by m*n = {} for the chosen n",
            m * n
        )));
    }
    let omega = config.omega_or((1..m).collect());
    let sampling = Sampling::extended(m, config.rows(), n, &omega);
    let options = SisOptions {
        truncation: config.truncation,
        oversample: config.oversample,
        force: config.force,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.expect("validated"));
    let mut table = Table::new(&["trial", "rel_error"]);
    let mut errors = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let c = random_signal(len, &mut rng);
        let samples = sis_forward(&c, &gen, &lf, &sampling, &options)?;
        let rec = sis_reconstruct(&samples, &gen, &lf, &options)?;
        let err = rec.relative_error(&c);
        errors.push(err);
        table.push(vec![trial.to_string(), num(err)]);
    }
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let mut violations = Vec::new();
    if max_error > SIS_ROUNDTRIP_TOL {
        violations.push(format!(
            "round-trip relative error {max_error:e} exceeds {SIS_ROUNDTRIP_TOL:e}"
        ));
    }
    let (riesz_lower, riesz_upper) = riesz_bounds(&gen, len, config.truncation);
    let reducibility = reducibility_check(&gen, &lf, len, config.truncation, 1e-12)?;
    let report = merge(
        header(config),
        json!({
            "n": n,
            "omega": omega,
            "generator": gen,
            "line_filter": lf,
            "truncation": config.truncation,
            "oversample": config.oversample,
            "tail": model.tail(),
            "riesz_lower": riesz_lower,
            "riesz_upper": riesz_upper,
            "reducibility": reducibility,
            "singular_xi": singular,
            "separates_singular_set": separates(&singular, n, tol),
            "rel_errors": errors,
            "max_rel_error": max_error,
            "tolerance": SIS_ROUNDTRIP_TOL,
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report,
        table,
        spectrum: None,
        violations,
    })
}

fn run_bounds_table(config: &ExperimentConfig) -> Result<Artifacts> {
    let m = config.m;
    let q = config.grid_resolution.unwrap_or(16 * m);
    let mut table = Table::new(&[
        "n",
        "L",
        "lower_bound",
        "empirical_norm",
        "empirical_norm_full",
        "beta1_bound",
        "beta2_bound",
        "beta2_bound_inflated",
        "beta3_bound",
        "beta3_bound_inflated",
        "sandwich_holds",
    ]);
    let mut reports = Vec::with_capacity(config.n_values.len());
    let mut violations = Vec::new();
    for &n in &config.n_values {
        let len = m * n * q;
        let a = discrete_filter(config, len)?;
        let r = stability_report(&a, m, n)?;
        table.push(vec![
            n.to_string(),
            len.to_string(),
            num(r.lower_bound),
            num(r.empirical_norm),
            num(r.empirical_norm_full),
            opt_num(r.beta1.map(|b| b.bound)),
            opt_num(r.beta2.map(|b| b.bound)),
            opt_num(r.beta2.map(|b| b.bound_inflated)),
            opt_num(r.beta3.map(|b| b.bound)),
            opt_num(r.beta3.map(|b| b.bound_inflated)),
            r.sandwich_holds().to_string(),
        ]);
        violations.extend(stability_violations(&r));
        reports.push(r);
    }
    let lower: Vec<f64> = reports.iter().map(|r| r.lower_bound).collect();
    let increasing = lower.windows(2).all(|w| w[0] < w[1]);
    if !increasing {
        violations.push(format!(
            "lower bound is not strictly increasing in n: {lower:?}"
        ));
    }
    let report = merge(
        header(config),
        json!({
            "filter": config.filter,
            "grid_resolution": q,
            "n_values": config.n_values,
            "reports": reports,
            "lower_bound_increasing": increasing,
            "passed": violations.is_empty(),
        }),
    );
    Ok(Artifacts {
        report,
        table,
        spectrum: None,
        violations,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SingularSystem(_)
        | Error::RankDeficient(_)
        | Error::CoincidentNodes { .. }
        | Error::TailTooLarge { .. }
        | Error::NotFound { .. } => EXIT_VIOLATION,
        _ => EXIT_CONFIG,
    }
}

fn fail(kind: &str, message: String, violations: &[String]) {
    let body = json!({ "error": kind, "message": message, "violations": violations });
    eprintln!("{body}");
}

/// Loads, validates, runs and writes one experiment; returns the process exit code.
pub fn execute(cli: &Cli) -> ExitCode {
    let mut config = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            fail(e.kind(), e.to_string(), &[]);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    cli.apply(&mut config);
    let problems = validate(&config);
    if !problems.is_empty() {
        fail(
            "config",
            format!("{} violated requirement(s)", problems.len()),
            &problems,
        );
        return ExitCode::from(EXIT_CONFIG);
    }
    let artifacts = match run(&config) {
        Ok(a) => a,
        Err(e) => {
            fail(e.kind(), e.to_string(), &[]);
            return ExitCode::from(exit_code(&e));
        }
    };
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    if let Err(e) = artifacts.write(&dir) {
        fail(e.kind(), e.to_string(), &[]);
        return ExitCode::from(EXIT_CONFIG);
    }
    if artifacts.violations.is_empty() {
        println!(
            "{}: ok, wrote {}",
            config.mode.map_or("", Mode::name),
            dir.display()
        );
        ExitCode::SUCCESS
    } else {
        fail(
            "guarantee_violated",
            "a guaranteed property failed".into(),
            &artifacts.violations,
        );
        ExitCode::from(EXIT_VIOLATION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn even_n_names_the_hypothesis() {
        let c = config(
            r#"{"mode":"roundtrip","filter":{"kind":"raised_cosine","p":1.0},"m":3,"n":4,"omega":[1],"L":72,"seed":1}"#,
        );
        let v = validate(&c);
        assert!(v.iter().any(|s| s.contains("\"n is odd\"")), "{v:?}");
    }

    #[test]
    fn divisibility_is_checked() {
        let c = config(r#"{"mode":"singular_scan","filter":{"kind":"heat","t":0.5},"m":3,"L":10}"#);
        assert_eq!(
            validate(&c),
            vec!["L = 10 is not divisible by m = 3".to_string()]
        );
    }

    #[test]
    fn upper_bounds_need_full_omega() {
        let c = config(
            r#"{"mode":"stability_report","filter":{"kind":"raised_cosine","p":1.0},"m":3,"n":3,"omega":[1],"L":432}"#,
        );
        let v = validate(&c);
        assert!(
            v.iter().any(|s| s.contains("Omega = {0, ..., m-1}")),
            "{v:?}"
        );
    }

    #[test]
    fn stochastic_modes_need_a_seed() {
        let c = config(
            r#"{"mode":"noise_sweep","filter":{"kind":"raised_cosine","p":1.0},"m":3,"n":3,"L":144,"sigmas":[0.01]}"#,
        );
        assert!(validate(&c).iter().any(|s| s.contains("seed is required")));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"m":3,"L":9,"bogus":1}"#).is_err());
    }

    #[test]
    fn roundtrip_example() {
        let c = config(
            r#"{"mode":"roundtrip","filter":{"kind":"raised_cosine","p":1.0},"m":3,"n":3,"omega":[1],"L":72,"seed":5,"trials":2}"#,
        );
        let out = run(&c).unwrap();
        assert!(out.violations.is_empty());
        assert!(out.report["max_rel_error"].as_f64().unwrap() < 1e-8);
        assert_eq!(out.table.rows.len(), 2);
    }

    #[test]
    fn singular_scan_example() {
        let c = config(
            r#"{"mode":"singular_scan","filter":{"kind":"raised_cosine","p":1.0},"m":5,"L":100,"spectrum":true}"#,
        );
        let out = run(&c).unwrap();
        let xi: Vec<&str> = out.table.rows.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(xi, vec!["0.0000000000000000e0", "5.0000000000000000e-1"]);
        assert_eq!(out.spectrum.unwrap().rows.len(), 20);
    }

    #[test]
    fn csv_floats_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
