//! Command implementations behind the `deformflow` binary.
//!
//! Every command writes CSV with a header row, floats with 17 significant
//! digits and LF line endings. Metadata and summaries are `# key = value`
//! lines. Failures map to exit code 1 (validation) or 2 (numerical or
//! domain exhaustion).

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::audit::{paper_claim_audit, AuditReport};
use crate::config::RunConfig;
use crate::deform::{lorentz_gamma, VelocityRatio};
use crate::elliptic::compare;
use crate::energy::energy_trace;
use crate::error::Error;
use crate::flow::{
    analytic_conformal, analytic_linear, fit_decay_rate, integrate, second_order_solution, FlowConfig, FlowState,
    Regime, Trajectory,
};
use crate::grid::{DeformationProfile, VelocityGrid};
use crate::invariants::flow_invariant_scaling;

/// Relative tolerance for flagging an energy increase between snapshots.
pub const ENERGY_INCREASE_RTOL: f64 = 1e-10;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) | Error::DomainExhausted { .. } => 2,
            Error::Domain(_) | Error::GridMismatch(_) | Error::Config(_) => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::validation(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What was asked for, recorded in output metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunManifest {
    fn write_header(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# command = {}", self.command)?;
        if let Some(p) = &self.config_path {
            writeln!(out, "# config = {}", p.display())?;
        }
        if let Some(s) = self.seed {
            writeln!(out, "# seed = {s}")?;
        }
        Ok(())
    }
}

/// 17 significant digits; round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cmd_cv(beta_min: f64, beta_max: f64, n: usize, out: &mut dyn Write) -> CliResult<()> {
    if !(0.0 <= beta_min && beta_min < beta_max && beta_max <= 1.0) || n < 2 {
        return Err(CliError::validation(format!(
            "invalid range: need 0 <= beta_min < beta_max <= 1 and n >= 2, got [{beta_min}, {beta_max}], n = {n}"
        )));
    }
    let grid = VelocityGrid::uniform(beta_min, beta_max, n)?;
    writeln!(out, "beta,c_model,c_exact,c_first_order,dev_model,dev_first_order,gamma")?;
    for beta in grid.ratios() {
        let r = compare(beta);
        let gamma = lorentz_gamma(beta).map(fmt_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(beta.value()),
            fmt_f64(r.c_model),
            fmt_f64(r.c_exact),
            fmt_f64(r.c_first_order),
            fmt_f64(r.dev_model),
            fmt_f64(r.dev_first_order),
            gamma
        )?;
    }
    Ok(())
}

/// Initial profile selector for `flow`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// C(β, 0) = π(1 − β²)
    Static,
    Uniform(f64),
    /// CSV with columns beta,C; its betas replace the configured grid.
    File(PathBuf),
}

impl FromStr for InitialProfile {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if s == "static" {
            return Ok(Self::Static);
        }
        if let Some(x) = s.strip_prefix("uniform:") {
            return x
                .trim()
                .parse()
                .map(Self::Uniform)
                .map_err(|_| CliError::validation(format!("bad uniform value '{x}'")));
        }
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(p)));
        }
        Err(CliError::validation(format!("unknown initial profile '{s}' (static | uniform:<x> | file:<path>)")))
    }
}

impl fmt::Display for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Static => f.write_str("static"),
            Self::Uniform(x) => write!(f, "uniform:{x}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

fn parse_f64(field: &str, what: &str) -> CliResult<f64> {
    field.trim().parse().map_err(|_| CliError::validation(format!("malformed {what} '{field}'")))
}

fn read_profile_file(path: &Path) -> CliResult<(VelocityGrid, DeformationProfile)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut betas = Vec::new();
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::validation(format!("malformed profile file: {e}")))?;
        if rec.len() != 2 {
            return Err(CliError::validation("profile file rows need exactly two columns beta,C"));
        }
        betas.push(parse_f64(&rec[0], "beta")?);
        values.push(parse_f64(&rec[1], "C")?);
    }
    Ok((VelocityGrid::new(betas)?, DeformationProfile::new(values)))
}

pub fn resolve_initial(initial: &InitialProfile, cfg: &RunConfig) -> CliResult<(VelocityGrid, DeformationProfile)> {
    match initial {
        InitialProfile::Static => {
            let grid = cfg.grid()?;
            let p = DeformationProfile::static_model(&grid);
            Ok((grid, p))
        }
        InitialProfile::Uniform(x) => {
            let grid = cfg.grid()?;
            let p = DeformationProfile::uniform(&grid, *x);
            Ok((grid, p))
        }
        InitialProfile::File(path) => read_profile_file(path),
    }
}

/// Closed-form value at (sample, τ) when one exists for the regime.
fn oracle(beta: VelocityRatio, tau: f64, c_init: f64, cfg: &FlowConfig) -> Option<f64> {
    match cfg.regime {
        Regime::SubcriticalLinear | Regime::SupercriticalLinear => analytic_linear(beta, tau, c_init, cfg).ok(),
        Regime::ConformalNonlinear => analytic_conformal(c_init, cfg.k_curv, tau).ok(),
        Regime::SecondOrder => Some(second_order_solution(beta, cfg.alpha, c_init - PI, tau)),
    }
}

pub fn cmd_flow(
    manifest: &RunManifest,
    cfg: &RunConfig,
    tau_end: f64,
    snapshot_every: f64,
    initial: &InitialProfile,
    out: &mut dyn Write,
) -> CliResult<Trajectory> {
    cfg.validate()?;
    let (grid, profile) = resolve_initial(initial, cfg)?;
    let trajectory = integrate(&grid, &profile, &cfg.flow, tau_end, snapshot_every)?;
    let flow = &cfg.flow;

    manifest.write_header(out)?;
    writeln!(out, "# regime = {}", flow.regime)?;
    writeln!(out, "# alpha = {}", fmt_f64(flow.alpha))?;
    writeln!(out, "# c = {}", fmt_f64(flow.c))?;
    writeln!(out, "# K = {}", fmt_f64(flow.k_offset))?;
    writeln!(out, "# k_curv = {}", fmt_f64(flow.k_curv))?;
    writeln!(out, "# method = {}", flow.method.name())?;
    match flow.dt {
        Some(dt) => writeln!(out, "# dt = {}", fmt_f64(dt))?,
        None => writeln!(out, "# dt = auto")?,
    }
    writeln!(out, "# tol = {}", fmt_f64(flow.tol))?;
    writeln!(out, "# initial = {initial}")?;
    writeln!(out, "tau,beta,C")?;
    for state in &trajectory.states {
        for (b, c) in grid.samples().iter().zip(&state.profile.values) {
            writeln!(out, "{},{},{}", fmt_f64(state.tau), fmt_f64(*b), fmt_f64(*c))?;
        }
    }

    let taus = trajectory.taus();
    let mut final_dev: Option<f64> = None;
    let mut oracle_dev: Option<f64> = None;
    let mut rates = Vec::with_capacity(grid.len());
    for (i, beta) in grid.ratios().enumerate() {
        let series = trajectory.sample_series(i);
        let c_init = profile.values[i];
        if let Ok(target) = flow.target(beta) {
            let d = (series[series.len() - 1] - target).abs();
            final_dev = Some(final_dev.map_or(d, |m: f64| m.max(d)));
            if flow.regime.is_linear() {
                let devs: Vec<f64> = series.iter().map(|c| c - target).collect();
                rates.push((beta.value(), fit_decay_rate(&taus, &devs, 1e-300)));
            }
        }
        for (tau, c) in taus.iter().zip(&series) {
            if let Some(exact) = oracle(beta, *tau, c_init, flow) {
                let d = (c - exact).abs();
                oracle_dev = Some(oracle_dev.map_or(d, |m: f64| m.max(d)));
            }
        }
    }
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_else(|| "n/a".into());
    writeln!(out, "# final_max_abs_dev_from_target = {}", opt(final_dev))?;
    writeln!(out, "# oracle_max_abs_dev = {}", opt(oracle_dev))?;
    for (beta, rate) in rates {
        writeln!(out, "# fitted_decay_rate[beta={}] = {}", fmt_f64(beta), opt(rate))?;
    }
    Ok(trajectory)
}

/// Rebuilds a trajectory from `flow` CSV output.
///
/// `alpha` overrides the value recorded in the file's metadata.
pub fn read_trajectory(text: &str, alpha: Option<f64>) -> CliResult<Trajectory> {
    let mut recorded_alpha = None;
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((k, v)) = line.split_once('=') {
            if k.trim() == "alpha" {
                recorded_alpha = Some(parse_f64(v, "alpha")?);
            }
        }
    }
    let alpha = alpha
        .or(recorded_alpha)
        .ok_or_else(|| CliError::validation("trajectory has no alpha metadata; pass --alpha"))?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::validation(format!("malformed trajectory: {e}")))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["tau", "beta", "C"] {
        return Err(CliError::validation("trajectory header must be tau,beta,C"));
    }
    let mut blocks: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::validation(format!("malformed trajectory: {e}")))?;
        if rec.len() != 3 {
            return Err(CliError::validation("trajectory rows need three columns"));
        }
        let tau = parse_f64(&rec[0], "tau")?;
        let beta = parse_f64(&rec[1], "beta")?;
        let c = parse_f64(&rec[2], "C")?;
        match blocks.last_mut() {
            Some(b) if b.0 == tau => {
                b.1.push(beta);
                b.2.push(c);
            }
            _ => blocks.push((tau, vec![beta], vec![c])),
        }
    }
    if blocks.is_empty() {
        return Err(CliError::validation("trajectory has no rows"));
    }
    if blocks.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(CliError::validation("trajectory tau values must be strictly increasing"));
    }
    let grid = VelocityGrid::new(blocks[0].1.clone())?;
    if blocks.iter().any(|b| b.1 != blocks[0].1) {
        return Err(CliError::validation("trajectory snapshots use different velocity grids"));
    }
    let states = blocks
        .into_iter()
        .map(|(tau, _, values)| FlowState { tau, profile: DeformationProfile::new(values), rate: None })
        .collect();
    let config = FlowConfig { alpha, ..FlowConfig::default() };
    Ok(Trajectory { grid, states, config })
}

pub fn cmd_energy(manifest: &RunManifest, trajectory_text: &str, alpha: Option<f64>, out: &mut dyn Write) -> CliResult<()> {
    let trajectory = read_trajectory(trajectory_text, alpha)?;
    let trace = energy_trace(&trajectory)?;
    manifest.write_header(out)?;
    writeln!(out, "tau,E,dE_dtau_quadrature,dE_dtau_lemma")?;
    for e in &trace.entries {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(e.tau),
            fmt_f64(e.energy),
            fmt_f64(e.rate_quadrature),
            fmt_f64(e.rate_lemma)
        )?;
    }
    let flagged = trace.increasing_steps(ENERGY_INCREASE_RTOL);
    if flagged.is_empty() {
        writeln!(out, "# energy_increases = none")?;
    } else {
        let taus: Vec<String> = flagged.iter().map(|&i| fmt_f64(trace.entries[i].tau)).collect();
        writeln!(out, "# energy_increases = {}", taus.join(" "))?;
    }
    Ok(())
}

pub fn cmd_invariants(c_value: f64, r0: f64, vol0: f64, out: &mut dyn Write) -> CliResult<()> {
    let t = flow_invariant_scaling(c_value, r0, vol0)?;
    writeln!(out, "C,R0,Vol0,I1,I2,I3")?;
    writeln!(
        out,
        "{},{},{},{},{},{}",
        fmt_f64(c_value),
        fmt_f64(r0),
        fmt_f64(vol0),
        fmt_f64(t.i1),
        fmt_f64(t.i2),
        fmt_f64(t.i3)
    )?;
    Ok(())
}

pub fn write_audit_csv(report: &AuditReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "label,paper_value,computed_value,abs_dev,rel_dev,status")?;
    for c in &report.claims {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.label,
            fmt_f64(c.paper_value),
            fmt_f64(c.computed_value),
            fmt_f64(c.abs_dev),
            fmt_f64(c.rel_dev),
            c.status()
        )?;
    }
    Ok(())
}

pub fn write_audit_table(report: &AuditReport, out: &mut dyn Write) -> io::Result<()> {
    let w = report.claims.iter().map(|c| c.label.len()).max().unwrap_or(5).max(5);
    writeln!(
        out,
        "{:<w$}  {:>24}  {:>24}  {:>24}  {:>24}  {:<9}  note",
        "label", "paper_value", "computed_value", "abs_dev", "rel_dev", "status"
    )?;
    for c in &report.claims {
        writeln!(
            out,
            "{:<w$}  {:>24}  {:>24}  {:>24}  {:>24}  {:<9}  {}",
            c.label,
            fmt_f64(c.paper_value),
            fmt_f64(c.computed_value),
            fmt_f64(c.abs_dev),
            fmt_f64(c.rel_dev),
            c.status(),
            c.note
        )?;
    }
    Ok(())
}

pub fn cmd_audit(csv: bool, out: &mut dyn Write) -> CliResult<AuditReport> {
    let report = paper_claim_audit()?;
    if csv {
        write_audit_csv(&report, out)?;
    } else {
        write_audit_table(&report, out)?;
    }
    Ok(report)
}
