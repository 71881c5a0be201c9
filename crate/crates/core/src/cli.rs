//! The `chaoscope` command line.
//!
//! ```text
//! chaoscope <orbit|lyap1d|sweep|bifurcate|spectrum> [--map NAME] [--param k=v ...]
//!     [--x0 v[,v]] [--steps N] [--method M] [--epsilon E] [--burn-in B]
//!     [--r-min A --r-max B --r-step S] [--transient T --samples K]
//!     [--tau T --renorms S] [--jacobian-mode corrected|paper-compat]
//!     [--threads N] [--seed N] [--out PATH] [--config FILE]
//! ```
//!
//! Every command writes a CSV table (UTF-8, LF, header row). Floats are
//! written with 17 significant digits; summaries printed to stdout use 6
//! decimals. Exit status: 0 success, 2 configuration error, 3 runtime
//! failure (divergence and other numerical breakdowns).
//!
//! A config file holds `key=value` lines using the long flag names
//! (`param` may repeat, `#` starts a comment). Flags given on the command
//! line take precedence.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::bifurcation::{self, bifurcation_diagram};
use crate::error::Error;
use crate::maps::{self, iterate_map, DiscreteMap, JacobianMode, MapDefinition};
use crate::scalar::{self, lyapunov_sweep, ParameterGrid, ScalarEstimator, ScalarMethod};
use crate::spectrum::{
    self, max_exponent_benettin, max_exponent_direct, second_exponent_from_determinant,
    spectrum_qr, SpectrumEstimate, SpectrumMethod,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const DEFAULT_ORBIT_STEPS: usize = 10_000;
pub const DEFAULT_BENETTIN_STEPS: usize = 1_000_000;
pub const DEFAULT_QR_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Orbit,
    Lyap1d,
    Sweep,
    Bifurcate,
    Spectrum,
}

#[derive(Debug, Parser)]
#[command(
    name = "chaoscope",
    version,
    about = "Lyapunov exponents and bifurcation diagrams for discrete maps"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

/// Raw flag values; `None` means "not given".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Built-in map: logistic or henon
    #[arg(long)]
    pub map: Option<String>,
    /// Map parameter override, e.g. r=3.7 (repeatable)
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Initial state, comma separated
    #[arg(long, value_name = "V[,V]")]
    pub x0: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// lyap1d/sweep: derivative|finite-diff; spectrum: benettin|qr|direct
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<usize>,
    #[arg(long = "r-min", allow_hyphen_values = true)]
    pub r_min: Option<f64>,
    #[arg(long = "r-max", allow_hyphen_values = true)]
    pub r_max: Option<f64>,
    #[arg(long = "r-step")]
    pub r_step: Option<f64>,
    #[arg(long)]
    pub transient: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub renorms: Option<usize>,
    #[arg(long = "jacobian-mode")]
    pub jacobian_mode: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file supplying defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(e) => write!(f, "runtime error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Dimension { .. } | Error::Domain(_) => {
                CliError::Config(e.to_string())
            }
            runtime => CliError::Runtime(runtime),
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(format!("cannot parse {key} value '{value}'")))
}

impl Options {
    /// Sets one option from a config-file entry.
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "map" => self.map = Some(v.to_string()),
            "param" => self.params.push(v.to_string()),
            "x0" => self.x0 = Some(v.to_string()),
            "steps" => self.steps = Some(parse_value(key, v)?),
            "method" => self.method = Some(v.to_string()),
            "epsilon" => self.epsilon = Some(parse_value(key, v)?),
            "burn-in" => self.burn_in = Some(parse_value(key, v)?),
            "r-min" => self.r_min = Some(parse_value(key, v)?),
            "r-max" => self.r_max = Some(parse_value(key, v)?),
            "r-step" => self.r_step = Some(parse_value(key, v)?),
            "transient" => self.transient = Some(parse_value(key, v)?),
            "samples" => self.samples = Some(parse_value(key, v)?),
            "tau" => self.tau = Some(parse_value(key, v)?),
            "renorms" => self.renorms = Some(parse_value(key, v)?),
            "jacobian-mode" => self.jacobian_mode = Some(v.to_string()),
            "threads" => self.threads = Some(parse_value(key, v)?),
            "seed" => self.seed = Some(parse_value(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(config_err(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn from_config_text(text: &str) -> Result<Options, CliError> {
        let mut opts = Options::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err(format!("config line {}: expected key=value", lineno + 1))
            })?;
            opts.set(key.trim(), value)?;
        }
        Ok(opts)
    }

    /// `self` (command line) over `base` (config file).
    fn over(self, base: Options) -> Options {
        let mut params = base.params;
        params.extend(self.params);
        Options {
            map: self.map.or(base.map),
            params,
            x0: self.x0.or(base.x0),
            steps: self.steps.or(base.steps),
            method: self.method.or(base.method),
            epsilon: self.epsilon.or(base.epsilon),
            burn_in: self.burn_in.or(base.burn_in),
            r_min: self.r_min.or(base.r_min),
            r_max: self.r_max.or(base.r_max),
            r_step: self.r_step.or(base.r_step),
            transient: self.transient.or(base.transient),
            samples: self.samples.or(base.samples),
            tau: self.tau.or(base.tau),
            renorms: self.renorms.or(base.renorms),
            jacobian_mode: self.jacobian_mode.or(base.jacobian_mode),
            threads: self.threads.or(base.threads),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            config: self.config,
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub map: &'static MapDefinition,
    /// Parameter values in schema order.
    pub parameters: Vec<f64>,
    pub x0: Vec<f64>,
    pub method: Option<String>,
    pub steps: Option<usize>,
    pub epsilon: f64,
    pub burn_in: usize,
    pub grid: ParameterGrid,
    pub transient: usize,
    pub samples: usize,
    pub tau: usize,
    pub renorms: Option<usize>,
    pub jacobian_mode: JacobianMode,
    pub threads: Option<usize>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: Command, cli: Options) -> Result<RunConfig, CliError> {
        let opts = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    config_err(format!("cannot read config {}: {e}", path.display()))
                })?;
                cli.over(Options::from_config_text(&text)?)
            }
            None => cli,
        };

        let map_name = opts.map.as_deref().unwrap_or("logistic");
        let map = maps::lookup(map_name).ok_or_else(|| {
            config_err(format!(
                "unknown map '{map_name}' (expected logistic or henon)"
            ))
        })?;

        let mut overrides = BTreeMap::new();
        for p in &opts.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| config_err(format!("--param expects k=v, got '{p}'")))?;
            overrides.insert(k.trim().to_string(), parse_value(k, v)?);
        }
        let parameters = map.resolve(&overrides)?;

        let x0 = match &opts.x0 {
            Some(s) => s
                .split(',')
                .map(|c| parse_value("x0", c))
                .collect::<Result<Vec<f64>, _>>()?,
            None => map.default_initial_state.to_vec(),
        };
        if x0.len() != map.dimension {
            return Err(config_err(format!(
                "x0 has {} components but map '{}' has dimension {}",
                x0.len(),
                map.name,
                map.dimension
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(config_err("x0 components must be finite"));
        }

        let epsilon = opts.epsilon.unwrap_or(scalar::DEFAULT_EPSILON);
        if !(epsilon > 0.0) {
            return Err(config_err("--epsilon must be positive"));
        }
        let grid = ParameterGrid::new(
            opts.r_min.unwrap_or(0.0),
            opts.r_max.unwrap_or(4.0),
            opts.r_step.unwrap_or(0.001),
        )?;
        let samples = opts.samples.unwrap_or(bifurcation::DEFAULT_ITERATIONS);
        if samples == 0 {
            return Err(config_err("--samples must be at least 1"));
        }
        let tau = opts.tau.unwrap_or(spectrum::DEFAULT_TAU);
        if tau == 0 {
            return Err(config_err("--tau must be at least 1"));
        }
        if opts.renorms == Some(0) {
            return Err(config_err("--renorms must be at least 1"));
        }
        if opts.threads == Some(0) {
            return Err(config_err("--threads must be at least 1"));
        }
        let jacobian_mode = match &opts.jacobian_mode {
            Some(s) => s.parse::<JacobianMode>()?,
            None => JacobianMode::default(),
        };

        Ok(RunConfig {
            command,
            map,
            parameters,
            x0,
            method: opts.method,
            steps: opts.steps,
            epsilon,
            burn_in: opts.burn_in.unwrap_or(0),
            grid,
            transient: opts.transient.unwrap_or(bifurcation::DEFAULT_TRANSIENT),
            samples,
            tau,
            renorms: opts.renorms,
            jacobian_mode,
            threads: opts.threads,
            seed: opts.seed.unwrap_or(spectrum::DEFAULT_SEED),
            output_path: opts.out,
        })
    }

    fn build_map(&self) -> Box<dyn DiscreteMap> {
        self.map.build_with(&self.parameters)
    }

    fn require_1d(&self) -> Result<(), CliError> {
        if self.map.dimension != 1 {
            return Err(config_err(format!(
                "{:?} needs a one-dimensional map; '{}' has dimension {}",
                self.command, self.map.name, self.map.dimension
            )));
        }
        Ok(())
    }

    fn scalar_estimator(&self) -> Result<ScalarEstimator, CliError> {
        let method = match &self.method {
            Some(m) => m.parse::<ScalarMethod>()?,
            None => ScalarMethod::FiniteDifference,
        };
        let steps = self.steps.unwrap_or(scalar::DEFAULT_STEPS);
        if steps == 0 {
            return Err(config_err("--steps must be at least 1"));
        }
        Ok(ScalarEstimator {
            method,
            steps,
            burn_in: self.burn_in,
            epsilon: self.epsilon,
            log_floor: scalar::DEFAULT_LOG_FLOOR,
        })
    }

    /// Builds the 1-D family used by sweeps: the first schema parameter varies.
    fn family(&self) -> impl Fn(f64) -> Box<dyn DiscreteMap> + Sync + Send {
        let def = self.map;
        let base = self.parameters.clone();
        move |r| {
            let mut p = base.clone();
            p[0] = r;
            def.build_with(&p)
        }
    }
}

/// Header plus rows of already-rendered cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> io::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        let file = fs::File::create(path)
            .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?;
        self.write_to(io::BufWriter::new(file))
            .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
    }
}

/// 17 significant digits: lossless for f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// 6 decimals, for human-facing summaries.
pub fn format_summary(v: f64) -> String {
    format!("{v:.6}")
}

fn emit_table(
    table: &CsvTable,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => table.write_file(path),
        None => table
            .write_to(stdout)
            .map_err(|e| config_err(format!("cannot write to stdout: {e}"))),
    }
}

fn emit_line(stdout: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(stdout, "{line}").map_err(|e| config_err(format!("cannot write to stdout: {e}")))
}

fn parameter_header(config: &RunConfig) -> Vec<String> {
    config
        .map
        .parameters
        .iter()
        .map(|p| p.name.to_string())
        .collect()
}

fn parameter_cells(config: &RunConfig) -> Vec<String> {
    config
        .parameters
        .iter()
        .copied()
        .map(format_float)
        .collect()
}

fn x0_cell(config: &RunConfig) -> String {
    config
        .x0
        .iter()
        .copied()
        .map(format_float)
        .collect::<Vec<_>>()
        .join(";")
}

pub fn cmd_orbit(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let map = config.build_map();
    let steps = config.steps.unwrap_or(DEFAULT_ORBIT_STEPS);
    let trajectory = iterate_map(&map, &config.x0, steps, true)?;

    let coords = ["x", "y", "z"];
    let mut header = vec!["step".to_string()];
    header.extend((0..map.dimension()).map(|i| {
        coords
            .get(i)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("x{i}"))
    }));
    let mut table = CsvTable::new(header);
    for (k, state) in trajectory.states().enumerate() {
        let mut row = vec![(k + 1).to_string()];
        row.extend(state.iter().copied().map(format_float));
        table.push(row);
    }
    emit_table(&table, config, stdout)?;

    match trajectory.diverged_at {
        Some(step) => Err(CliError::Runtime(Error::Divergence { step })),
        None => Ok(()),
    }
}

pub fn cmd_lyap1d(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.require_1d()?;
    let estimator = config.scalar_estimator()?;
    let map = config.build_map();
    let estimate = estimator.estimate(&map, config.x0[0])?;

    emit_line(
        stdout,
        &format!("lyapunov_exponent,{}", format_summary(estimate.value)),
    )?;

    if let Some(path) = &config.output_path {
        let mut header = vec!["map".to_string()];
        header.extend(parameter_header(config));
        header.extend(
            [
                "x0",
                "method",
                "n",
                "epsilon",
                "burn_in",
                "floor_hits",
                "lyapunov",
            ]
            .map(String::from),
        );
        let mut row = vec![config.map.name.to_string()];
        row.extend(parameter_cells(config));
        row.extend([
            x0_cell(config),
            estimate.method.as_str().to_string(),
            estimate.steps.to_string(),
            format_float(estimate.epsilon),
            estimate.burn_in.to_string(),
            estimate.floor_hits.to_string(),
            format_float(estimate.value),
        ]);
        let mut table = CsvTable::new(header);
        table.push(row);
        table.write_file(path)?;
    }
    Ok(())
}

pub fn cmd_sweep(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.require_1d()?;
    let estimator = config.scalar_estimator()?;
    let records = lyapunov_sweep(
        config.family(),
        &config.grid,
        &estimator,
        config.x0[0],
        config.threads,
    )?;

    let mut table = CsvTable::new(["r", "lyapunov", "floor_hits", "diverged"]);
    for rec in &records {
        table.push(vec![
            format_float(rec.parameter_value),
            format_float(rec.estimate.value),
            rec.estimate.floor_hits.to_string(),
            rec.estimate.diverged.to_string(),
        ]);
    }
    emit_table(&table, config, stdout)?;

    let failed = records.iter().filter(|r| r.estimate.diverged).count();
    if failed > 0 {
        log::warn!("{failed} of {} sweep points failed", records.len());
    }
    if failed == records.len() {
        let first = records.iter().find_map(|r| r.error.clone());
        return Err(CliError::Runtime(
            first.unwrap_or(Error::Divergence { step: 0 }),
        ));
    }
    Ok(())
}

pub fn cmd_bifurcate(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.require_1d()?;
    let records = bifurcation_diagram(
        config.family(),
        &config.grid.values(),
        config.x0[0],
        config.transient,
        config.samples,
        config.threads,
    )?;

    let mut table = CsvTable::new(["r", "x"]);
    for rec in &records {
        let r = format_float(rec.parameter_value);
        for &x in &rec.samples {
            table.push(vec![r.clone(), format_float(x)]);
        }
    }
    emit_table(&table, config, stdout)?;

    let failed = records.iter().filter(|r| r.diverged).count();
    if failed > 0 {
        log::warn!("{failed} of {} parameter values diverged", records.len());
    }
    if failed == records.len() {
        return Err(CliError::Runtime(Error::Divergence { step: 0 }));
    }
    Ok(())
}

/// Runs the spectrum estimator selected by `config` (no output).
pub fn compute_spectrum(config: &RunConfig) -> Result<SpectrumEstimate, CliError> {
    let method = match &config.method {
        Some(m) => m.parse::<SpectrumMethod>()?,
        None => SpectrumMethod::Qr,
    };
    let map = config.build_map();
    let n = map.dimension();
    let estimate = match method {
        SpectrumMethod::Qr => {
            let t = config.steps.unwrap_or(DEFAULT_QR_STEPS);
            spectrum_qr(&map, &config.x0, t, config.jacobian_mode)?
        }
        SpectrumMethod::Direct => {
            let t = config.steps.unwrap_or(DEFAULT_BENETTIN_STEPS);
            max_exponent_direct(&map, &config.x0, config.epsilon, t, config.seed)?
        }
        SpectrumMethod::Benettin | SpectrumMethod::DeterminantPair => {
            let tau = config.tau;
            let renorms = match (config.steps, config.renorms) {
                (Some(t), Some(s)) if t != s * tau => {
                    return Err(config_err(format!(
                        "--steps {t} disagrees with --tau {tau} x --renorms {s}"
                    )))
                }
                (_, Some(s)) => s,
                (Some(t), None) => {
                    if t % tau != 0 || t == 0 {
                        return Err(config_err(format!(
                            "--steps {t} must be a positive multiple of --tau {tau}"
                        )));
                    }
                    t / tau
                }
                (None, None) => DEFAULT_BENETTIN_STEPS / tau,
            };
            let mut u0 = vec![0.0; n];
            u0[0] = 1.0;
            let single =
                max_exponent_benettin(&map, &config.x0, &u0, tau, renorms, config.jacobian_mode)?;
            if n == 2 {
                if config.map.name == maps::HENON.name {
                    let b = config.parameters[1];
                    let lambda2 = second_exponent_from_determinant(single.exponents[0], b)?;
                    single.with_second_exponent(lambda2)
                } else {
                    single.complete_with_determinant()?
                }
            } else {
                single
            }
        }
    };
    Ok(estimate)
}

pub fn cmd_spectrum(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let estimate = compute_spectrum(config)?;
    let summary: Vec<String> = estimate
        .exponents
        .iter()
        .copied()
        .map(format_summary)
        .collect();
    emit_line(stdout, &format!("lyapunov_spectrum,{}", summary.join(",")))?;

    if let Some(path) = &config.output_path {
        let n = config.map.dimension;
        let mut header = vec!["map".to_string()];
        header.extend(parameter_header(config));
        header.extend(["x0", "method", "jacobian_mode", "t", "tau", "s", "seed"].map(String::from));
        header.extend((1..=n).map(|i| format!("lambda_{i}")));
        header.push("det_sum_check".to_string());

        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut row = vec![config.map.name.to_string()];
        row.extend(parameter_cells(config));
        row.extend([
            x0_cell(config),
            estimate.method.as_str().to_string(),
            opt(estimate.jacobian_mode.map(|m| m.as_str().to_string())),
            estimate.steps.to_string(),
            opt(estimate.renorm_interval.map(|v| v.to_string())),
            opt(estimate.renorm_count.map(|v| v.to_string())),
            opt(estimate.seed.map(|v| v.to_string())),
        ]);
        row.extend((0..n).map(|i| opt(estimate.exponents.get(i).copied().map(format_float))));
        row.push(opt(estimate.det_sum_check.map(format_float)));

        let mut table = CsvTable::new(header);
        table.push(row);
        table.write_file(path)?;
    }
    Ok(())
}

pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match config.command {
        Command::Orbit => cmd_orbit(config, stdout),
        Command::Lyap1d => cmd_lyap1d(config, stdout),
        Command::Sweep => cmd_sweep(config, stdout),
        Command::Bifurcate => cmd_bifurcate(config, stdout),
        Command::Spectrum => cmd_spectrum(config, stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
/// Diagnostics go to `stderr` as a single line.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };

    let outcome = RunConfig::resolve(cli.command, cli.options).and_then(|c| execute(&c, stdout));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "chaoscope: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        let mut full = vec!["chaoscope"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).unwrap();
        RunConfig::resolve(cli.command, cli.options).unwrap()
    }

    #[test]
    fn defaults_follow_map() {
        let c = config(&["lyap1d"]);
        assert_eq!(c.map.name, "logistic");
        assert_eq!(c.parameters, vec![4.0]);
        assert_eq!(c.x0, vec![0.1]);
        assert_eq!(c.epsilon, 1e-8);
        assert_eq!(c.grid.len(), 4001);
        let h = config(&[
            "spectrum",
            "--map",
            "henon",
            "--jacobian-mode",
            "paper-compat",
        ]);
        assert_eq!(h.parameters, vec![1.4, 0.3]);
        assert_eq!(h.x0, vec![0.1, 0.1]);
        assert_eq!(h.jacobian_mode, JacobianMode::Compat);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let base = Options::from_config_text(
            "# defaults\nmap = logistic\nparam = r=3.2\nsteps=500\nr-min=3\n",
        )
        .unwrap();
        let cli = Options {
            steps: Some(42),
            params: vec!["r=3.9".into()],
            ..Options::default()
        };
        let merged = cli.over(base);
        assert_eq!(merged.steps, Some(42));
        assert_eq!(merged.r_min, Some(3.0));
        let c = RunConfig::resolve(Command::Lyap1d, merged).unwrap();
        assert_eq!(c.parameters, vec![3.9]);
    }

    #[test]
    fn bad_config_lines() {
        assert!(Options::from_config_text("steps").is_err());
        assert!(Options::from_config_text("colour=red").is_err());
        assert!(Options::from_config_text("steps=ten").is_err());
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        let cases: &[&[&str]] = &[
            &["orbit", "--map", "lorenz"],
            &["orbit", "--map", "henon", "--x0", "0.1"],
            &["orbit", "--param", "q=1"],
            &["sweep", "--r-min", "3", "--r-max", "2"],
            &["spectrum", "--jacobian-mode", "exact"],
            &["sweep", "--threads", "0"],
        ];
        for args in cases {
            let mut full = vec!["chaoscope"];
            full.extend_from_slice(args);
            let cli = Cli::try_parse_from(full).unwrap();
            let err = RunConfig::resolve(cli.command, cli.options).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_CONFIG, "{args:?}");
        }
    }

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.1, 2f64.ln(), -1.2935, 1e-300, 123456789.123] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(format_summary(0.0895371), "0.089537");
    }

    #[test]
    fn benettin_step_bookkeeping() {
        let c = config(&[
            "spectrum", "--map", "henon", "--method", "benettin", "--steps", "1000", "--tau", "10",
        ]);
        let e = compute_spectrum(&c).unwrap();
        assert_eq!(e.steps, 1000);
        assert_eq!(e.renorm_count, Some(100));
        assert_eq!(e.exponents.len(), 2);

        let bad = config(&[
            "spectrum", "--map", "henon", "--method", "benettin", "--steps", "1001",
        ]);
        assert_eq!(compute_spectrum(&bad).unwrap_err().exit_code(), EXIT_CONFIG);
        let clash = config(&[
            "spectrum",
            "--map",
            "henon",
            "--method",
            "benettin",
            "--steps",
            "100",
            "--tau",
            "10",
            "--renorms",
            "5",
        ]);
        assert_eq!(
            compute_spectrum(&clash).unwrap_err().exit_code(),
            EXIT_CONFIG
        );
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
