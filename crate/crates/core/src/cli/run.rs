//! Subcommand bodies: each builds its tables from a validated configuration
//! and writes them below `output.dir`.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde_json::json;

use super::config::{emit_config, ConfigError, ScenarioConfig};
use super::output::{write_json, write_table, Metadata, Table};
use crate::driven::{lambda_t, spectrum_hf};
use crate::evolution::{
    evolved_state, grid_with_density, integrate_wei_norman_at, ModelParams, WeiNormanSolution,
};
use crate::fock::{coherent_state, default_truncation};
use crate::kerr::{quadrature_variances, unshifted_quadrature_variances, KerrStateParams};
use crate::numerics::linspace;
use crate::observables::{autocorrelation_series, husimi_grid, PEAK_FRACTION};
use crate::oracle::{fidelity, integrate_exact_at};
use crate::reparam::{
    evolve_direct, evolve_via_timemap, spectrum_h, QuadraticBasis, QuadraticStarEvolver,
    ReparamResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Wei-Norman coefficients and the displaced amplitude over the time window.
    Simulate,
    /// Reference Fock-space integration with fidelity against Wei-Norman.
    Oracle,
    /// Quadrature variance ratios of Kerr states against xi.
    Variances,
    /// Autocorrelation F(t) and detected revivals.
    Autocorr,
    /// Husimi grids at the configured scaled times.
    Husimi,
    /// Instantaneous spectrum of the driven oscillator.
    Spectrum,
    /// Time-map evolution against direct integration for a variable mass.
    Timemap,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Oracle => "oracle",
            Command::Variances => "variances",
            Command::Autocorr => "autocorr",
            Command::Husimi => "husimi",
            Command::Spectrum => "spectrum",
            Command::Timemap => "timemap",
        }
    }
}

#[derive(Debug)]
pub enum RunErrorKind {
    Config(ConfigError),
    Numerical(crate::Error),
    Io(std::io::Error),
}

/// A failure tagged with the stage that produced it.
#[derive(Debug)]
pub struct RunError {
    pub stage: String,
    pub kind: RunErrorKind,
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            RunErrorKind::Config(_) => 2,
            RunErrorKind::Numerical(_) | RunErrorKind::Io(_) => 3,
        }
    }

    pub fn config(stage: impl Into<String>, e: ConfigError) -> Self {
        Self {
            stage: stage.into(),
            kind: RunErrorKind::Config(e),
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RunErrorKind::Config(e) => write!(f, "{}: configuration error: {e}", self.stage),
            RunErrorKind::Numerical(e) => write!(f, "{}: numerical failure: {e}", self.stage),
            RunErrorKind::Io(e) => write!(f, "{}: i/o failure: {e}", self.stage),
        }
    }
}

impl std::error::Error for RunError {}

trait Stage<T> {
    fn stage(self, name: &str) -> Result<T, RunError>;
}

impl<T> Stage<T> for crate::Result<T> {
    fn stage(self, name: &str) -> Result<T, RunError> {
        self.map_err(|e| RunError {
            stage: name.into(),
            kind: RunErrorKind::Numerical(e),
        })
    }
}

impl<T> Stage<T> for Result<T, ConfigError> {
    fn stage(self, name: &str) -> Result<T, RunError> {
        self.map_err(|e| RunError::config(name, e))
    }
}

impl<T> Stage<T> for std::io::Result<T> {
    fn stage(self, name: &str) -> Result<T, RunError> {
        self.map_err(|e| RunError {
            stage: name.into(),
            kind: RunErrorKind::Io(e),
        })
    }
}

/// Runs one subcommand and returns the paths written.
pub fn run_scenario(cfg: &ScenarioConfig, cmd: Command) -> Result<Vec<PathBuf>, RunError> {
    log::info!("running {}", cmd.name());
    match cmd {
        Command::Simulate => simulate(cfg),
        Command::Oracle => oracle(cfg),
        Command::Variances => variances(cfg),
        Command::Autocorr => autocorr(cfg),
        Command::Husimi => husimi(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Timemap => timemap(cfg),
    }
}

fn metadata(cfg: &ScenarioConfig, cmd: Command) -> Metadata {
    let mut m = Metadata::default();
    m.add(
        "generator",
        format!("kerrsim {}", env!("CARGO_PKG_VERSION")),
    );
    m.add("subcommand", cmd.name());
    m.add("tol", cfg.numerics.tol);
    m.add("config", emit_config(cfg).trim_end());
    m
}

fn out_dir(cfg: &ScenarioConfig) -> &Path {
    Path::new(&cfg.output.dir)
}

fn write(
    cfg: &ScenarioConfig,
    stem: &str,
    table: &Table,
    meta: &Metadata,
) -> Result<PathBuf, RunError> {
    let path = write_table(out_dir(cfg), stem, cfg.output.format, table, meta).stage("write")?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn trajectory(cfg: &ScenarioConfig, params: &ModelParams) -> Result<WeiNormanSolution, RunError> {
    let times =
        grid_with_density(params, cfg.t_end(), cfg.time.samples_per_period).stage("grid")?;
    integrate_wei_norman_at(params, &times, cfg.numerics.tol).stage("wei-norman")
}

fn truncation_for(cfg: &ScenarioConfig, radius: f64, extra: usize) -> usize {
    cfg.numerics
        .n_trunc
        .unwrap_or(default_truncation(radius) + extra)
}

fn max_eta(sol: &WeiNormanSolution) -> f64 {
    sol.eta
        .iter()
        .map(|z| z.norm())
        .fold(sol.alpha.norm(), f64::max)
}

fn trajectory_row(params: &ModelParams, sol: &WeiNormanSolution, k: usize) -> Vec<f64> {
    let t = sol.times[k];
    vec![
        t,
        params.omega0 * t,
        sol.x1[k].re,
        sol.x1[k].im,
        sol.x2[k].re,
        sol.x2[k].im,
        sol.x3[k].re,
        sol.x3[k].im,
        sol.eta[k].re,
        sol.eta[k].im,
    ]
}

const TRAJECTORY_COLUMNS: [&str; 11] = [
    "t", "tau", "re_x1", "im_x1", "re_x2", "im_x2", "re_x3", "im_x3", "re_eta", "im_eta", "norm",
];

fn simulate(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let params = cfg.model_params().stage("config")?;
    let sol = trajectory(cfg, &params)?;
    let n = truncation_for(cfg, max_eta(&sol), 0);
    let mut table = Table::new(TRAJECTORY_COLUMNS.to_vec());
    for (k, &t) in sol.times.iter().enumerate() {
        let psi = evolved_state(&params, &sol, t, n).stage("evolved state")?;
        let mut row = trajectory_row(&params, &sol, k);
        row.push(psi.norm());
        table.push(row);
    }
    let mut meta = metadata(cfg, Command::Simulate);
    meta.add("n_trunc", n);
    meta.add(
        "steps",
        format!(
            "{} accepted, {} rejected",
            sol.accepted_steps, sol.rejected_steps
        ),
    );
    Ok(vec![write(cfg, "simulate", &table, &meta)?])
}

fn oracle(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let params = cfg.model_params().stage("config")?;
    let sol = trajectory(cfg, &params)?;
    let n = truncation_for(cfg, max_eta(&sol), 20);
    let psi0 = coherent_state(params.alpha, n).stage("initial state")?;
    let run = integrate_exact_at(&params, &psi0, &sol.times, cfg.numerics.tol).stage("oracle")?;
    let mut columns = TRAJECTORY_COLUMNS.to_vec();
    columns.push("fidelity");
    let mut table = Table::new(columns);
    for (k, (&t, state)) in run.times.iter().zip(&run.states).enumerate() {
        let wn = evolved_state(&params, &sol, t, n).stage("evolved state")?;
        let mut row = trajectory_row(&params, &sol, k);
        row.push(state.norm());
        row.push(fidelity(state, &wn).stage("fidelity")?);
        table.push(row);
    }
    let mut meta = metadata(cfg, Command::Oracle);
    meta.add("n_trunc", n);
    meta.add("max_norm_drift", run.max_norm_drift());
    meta.add(
        "oracle_steps",
        format!(
            "{} accepted, {} rejected",
            run.accepted_steps, run.rejected_steps
        ),
    );
    Ok(vec![write(cfg, "oracle", &table, &meta)?])
}

fn variances(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let beta: C64 = cfg.kerr.beta.unwrap_or(cfg.model.alpha).into();
    let mut table = Table::new(vec!["xi", "ratio_q", "ratio_p", "ratio_p_unshifted"]);
    for xi in linspace(cfg.kerr.xi_min, cfg.kerr.xi_max, cfg.kerr.samples) {
        let p = KerrStateParams::new(beta, xi);
        let (q, mom) = quadrature_variances(p);
        let (_, unshifted) = unshifted_quadrature_variances(p);
        table.push(vec![xi, q, mom, unshifted]);
    }
    let mut meta = metadata(cfg, Command::Variances);
    meta.add("beta", format!("{} {}", beta.re, beta.im));
    Ok(vec![write(cfg, "variances", &table, &meta)?])
}

fn autocorr(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let scan = !cfg.autocorr.chi_values.is_empty();
    let chis = if scan {
        cfg.autocorr.chi_values.clone()
    } else {
        vec![cfg.model.chi]
    };
    let mut paths = Vec::new();
    for chi in chis {
        let params = cfg.model_params_with_chi(chi).stage("config")?;
        let sol = trajectory(cfg, &params)?;
        let series = autocorrelation_series(&params, &sol)
            .and_then(|s| s.with_revivals(cfg.autocorr.threshold))
            .stage("autocorrelation")?;
        let mut table = Table::new(vec!["t", "tau", "re_f", "im_f", "abs_f2"]);
        for ((&t, f), &f2) in series.times.iter().zip(&series.f).zip(&series.f2) {
            table.push(vec![t, params.omega0 * t, f.re, f.im, f2]);
        }
        let mut meta = metadata(cfg, Command::Autocorr);
        meta.add("chi", chi);
        meta.add("threshold", cfg.autocorr.threshold);
        let revivals: Vec<String> = series.revivals.iter().map(|t| t.to_string()).collect();
        meta.add("revivals", revivals.join(" "));
        let stem = if scan {
            format!("autocorr_chi{chi}")
        } else {
            "autocorr".to_string()
        };
        paths.push(write(cfg, &stem, &table, &meta)?);
    }
    Ok(paths)
}

fn husimi(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let params = cfg.model_params().stage("config")?;
    let mut times: Vec<f64> = cfg
        .grid
        .taus
        .iter()
        .map(|tau| tau / params.omega0)
        .collect();
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let sol = integrate_wei_norman_at(&params, &times, cfg.numerics.tol).stage("wei-norman")?;
    let n = truncation_for(cfg, max_eta(&sol), 0);
    let h = cfg.grid.half_width.unwrap_or(params.alpha.norm() + 5.0);
    let res = cfg.grid.resolution;
    let mut paths = Vec::new();
    for (k, &tau) in cfg.grid.taus.iter().enumerate() {
        let t = tau / params.omega0;
        let state = evolved_state(&params, &sol, t, n).stage("evolved state")?;
        let grid = husimi_grid(&state, (-h, h), (-h, h), (res, res), t).stage("husimi")?;
        let mut table = Table::new(vec!["x", "y", "Q"]);
        for (iy, &y) in grid.ys.iter().enumerate() {
            for (ix, &x) in grid.xs.iter().enumerate() {
                table.push(vec![x, y, grid.values[[iy, ix]]]);
            }
        }
        let peaks: Vec<_> = grid
            .peaks(PEAK_FRACTION)
            .iter()
            .map(|p| json!({ "x": p.x, "y": p.y, "value": p.value }))
            .collect();
        let mut meta = metadata(cfg, Command::Husimi);
        meta.add("tau", tau);
        meta.add("t", t);
        meta.add("n_trunc", n);
        meta.add("grid_mass", grid.mass());
        meta.add("peak_count", peaks.len());
        let stem = format!("husimi_{k}");
        paths.push(write(cfg, &stem, &table, &meta)?);
        let sidecar = json!({
            "tau": tau,
            "t": t,
            "n_trunc": n,
            "resolution": res,
            "half_width": h,
            "mass": grid.mass(),
            "peak_fraction": PEAK_FRACTION,
            "peaks": peaks,
            "generator": format!("kerrsim {}", env!("CARGO_PKG_VERSION")),
            "config": emit_config(cfg),
        });
        let name = format!("{stem}.meta.json");
        paths.push(write_json(out_dir(cfg), &name, &sidecar).stage("write")?);
    }
    Ok(paths)
}

fn spectrum(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let drive = cfg.drive_spec().stage("config")?;
    let freq = cfg.frequency();
    let mut table = Table::new(vec!["n", "t", "E_n", "lambda_t"]);
    let times = linspace(0.0, cfg.t_end(), cfg.spectrum.samples);
    for n in 0..cfg.spectrum.levels {
        for &t in &times {
            let e = spectrum_hf(n, &drive, &freq, t).stage("spectrum")?;
            let l = lambda_t(&drive, &freq, t).stage("spectrum")?;
            table.push(vec![n as f64, t, e, l]);
        }
    }
    let meta = metadata(cfg, Command::Spectrum);
    Ok(vec![write(cfg, "spectrum", &table, &meta)?])
}

fn timemap(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, RunError> {
    let mass = cfg.mass_spec().stage("config")?;
    let freq = cfg.frequency();
    let alpha: C64 = cfg.timemap.alpha.unwrap_or(cfg.model.alpha).into();
    let n = cfg
        .numerics
        .n_trunc
        .unwrap_or(default_truncation(alpha.norm()).max(40));
    let tol = cfg.numerics.tol;
    let reparam = ReparamResult::new(mass.clone(), freq);
    let basis = QuadraticBasis::new(n, mass.mass(0.0), freq.omega(0.0));
    let psi0 = coherent_state(alpha, n).stage("initial state")?;
    let times = linspace(0.0, cfg.timemap.t_end, cfg.timemap.samples);
    let direct = evolve_direct(&psi0, &reparam, &basis, &times, tol).stage("direct integration")?;
    let star = QuadraticStarEvolver {
        reparam: reparam.clone(),
        basis: basis.clone(),
        tol,
    };
    let mut table = Table::new(vec![
        "t",
        "tau",
        "mass",
        "omega_star",
        "E0",
        "fidelity",
        "top_population",
    ]);
    for (&t, d) in times.iter().zip(&direct) {
        let mapped = evolve_via_timemap(&psi0, &mass, &star, t).stage("time map")?;
        let tau = reparam.tau_of_t(t).stage("time map")?;
        let f = fidelity(&mapped, d).stage("fidelity")?;
        table.push(vec![
            t,
            tau,
            mass.mass(t),
            reparam.omega_star(t),
            spectrum_h(0, &freq, t),
            f,
            mapped.top_population().max(d.top_population()),
        ]);
    }
    let mut meta = metadata(cfg, Command::Timemap);
    meta.add("n_trunc", n);
    meta.add("alpha", format!("{} {}", alpha.re, alpha.im));
    Ok(vec![write(cfg, "timemap", &table, &meta)?])
}
