//! Reference integrator: time-ordered Schrodinger evolution of the full
//! `H(t) = Omega0(n + 1/2) + chi n^2 + e(t)/sqrt(2 Omega0) (a + a+)` on the
//! truncated number basis.
//!
//! The diagonal part is removed analytically (interaction picture) and only
//! the tridiagonal drive term is integrated.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::evolution::{default_grid, ModelParams};
use crate::fock::FockState;
use crate::ode::{Dopri5, Output};

/// Largest accepted `| ||psi|| - 1 |` over a run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Largest accepted population of the top basis level.
pub const TOP_POPULATION_LIMIT: f64 = 1e-10;

/// Levels at the top of the basis that must be empty initially.
pub const TRUNCATION_MARGIN: usize = 10;

/// Integrates `i dpsi/dt = H(t) psi` for a Hamiltonian given by its action
/// `apply_h(t, psi, out)`, returning the state at each of `outputs`
/// (non-decreasing, starting at or after zero).
pub fn integrate_schrodinger<F>(
    mut apply_h: F,
    psi0: &FockState,
    outputs: &[f64],
    tol: f64,
) -> Result<Vec<FockState>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    check_tol(tol)?;
    let y0: Vec<C64> = psi0.amplitudes().to_vec();
    let minus_i = C64::new(0.0, -1.0);
    let sol = Dopri5::new(tol, tol).solve(
        |t, y, dy| {
            apply_h(t, y, dy);
            for v in dy.iter_mut() {
                *v *= minus_i;
            }
        },
        0.0,
        &y0,
        outputs,
        Output::Exact,
    )?;
    Ok(sol
        .states
        .into_iter()
        .map(|s| FockState::unchecked(Array1::from(s)))
        .collect())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    Ok(())
}

/// Result of a reference integration.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub params: ModelParams,
    pub n_trunc: usize,
    pub times: Vec<f64>,
    pub states: Vec<FockState>,
    /// `| ||psi(t)|| - 1 |` at every output time.
    pub norm_drift: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl OracleRun {
    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }

    /// State at the output time closest to `t`.
    pub fn state_near(&self, t: f64) -> &FockState {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        &self.states[k]
    }
}

/// Diagonal energies `Omega0(n + 1/2) + chi n^2`.
pub fn diagonal_energies(params: &ModelParams, n_trunc: usize) -> Vec<f64> {
    (0..n_trunc)
        .map(|n| {
            let n = n as f64;
            params.omega0 * (n + 0.5) + params.chi * n * n
        })
        .collect()
}

/// Reference evolution on the default output grid of `[0, t_end]`.
pub fn integrate_exact(
    params: &ModelParams,
    psi0: &FockState,
    t_end: f64,
    tol: f64,
) -> Result<OracleRun> {
    let times = default_grid(params, t_end)?;
    integrate_exact_at(params, psi0, &times, tol)
}

/// Reference evolution reported at the given output times.
pub fn integrate_exact_at(
    params: &ModelParams,
    psi0: &FockState,
    times: &[f64],
    tol: f64,
) -> Result<OracleRun> {
    check_tol(tol)?;
    let n = psi0.n_trunc();
    if !psi0.is_normalized() {
        return Err(Error::InvalidParameter {
            name: "psi0",
            reason: format!("initial state must be normalized, norm {}", psi0.norm()),
        });
    }
    let margin = TRUNCATION_MARGIN.min(n);
    let edge: f64 = psi0.probabilities()[n - margin..].iter().sum();
    if edge > TOP_POPULATION_LIMIT {
        return Err(Error::TruncationTooSmall {
            n_trunc: n,
            tail: edge,
            limit: TOP_POPULATION_LIMIT,
        });
    }
    if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
        params.drive.check_window(first.min(0.0), last)?;
    }

    let energies = diagonal_energies(params, n);
    let sqrt: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).sqrt()).collect();
    let inv_sqrt_2w = 1.0 / (2.0 * params.omega0).sqrt();
    let drive = &params.drive;
    let (omega0, chi) = (params.omega0, params.chi);
    let minus_i = C64::new(0.0, -1.0);
    let mut coupling = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];

    let y0: Vec<C64> = psi0.amplitudes().to_vec();
    let sol = Dopri5::new(tol, tol).solve(
        |t, y, dy| {
            let f = drive.value(t) * inv_sqrt_2w;
            // <k|V_I|k+1> = f sqrt(k+1) exp(-i (Omega0 + chi (2k+1)) t)
            for (k, c) in coupling.iter_mut().enumerate() {
                let phase = -(omega0 + chi * (2 * k + 1) as f64) * t;
                *c = C64::from_polar(f * sqrt[k], phase);
            }
            for k in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                if k + 1 < n {
                    acc += coupling[k] * y[k + 1];
                }
                if k > 0 {
                    acc += coupling[k - 1].conj() * y[k - 1];
                }
                dy[k] = minus_i * acc;
            }
        },
        0.0,
        &y0,
        times,
        Output::Exact,
    )?;

    let mut states = Vec::with_capacity(times.len());
    let mut norm_drift = Vec::with_capacity(times.len());
    for (&t, psi_i) in sol.times.iter().zip(&sol.states) {
        let amps: Array1<C64> = psi_i
            .iter()
            .zip(&energies)
            .map(|(z, e)| z * C64::from_polar(1.0, -e * t))
            .collect();
        let state = FockState::unchecked(amps);
        let top = state.top_population();
        if top > TOP_POPULATION_LIMIT {
            return Err(Error::TruncationBoundary { t, population: top });
        }
        let drift = (state.norm() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                t,
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        norm_drift.push(drift);
        states.push(state);
    }
    log::debug!(
        "oracle: {} accepted / {} rejected steps, n_trunc {}",
        sol.accepted,
        sol.rejected,
        n
    );
    Ok(OracleRun {
        params: params.clone(),
        n_trunc: n,
        times: sol.times,
        states,
        norm_drift,
        accepted_steps: sol.accepted,
        rejected_steps: sol.rejected,
    })
}

/// `|<psi|phi>|^2`
pub fn fidelity(psi: &FockState, phi: &FockState) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}
