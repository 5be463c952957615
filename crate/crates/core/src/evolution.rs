//! Dynamics of the driven Kerr oscillator
//! `H(t) = Omega0(n + 1/2) + chi n^2 + e(t)/sqrt(2 Omega0) (a + a+)`.
//!
//! Two branches: the linearized Heisenberg ladder operator for an initial
//! number state, and the Wei-Norman factorized evolution of an initial coherent
//! state, whose result is the Kerr state `|e^{-i Omega0 t} eta_t>_{chi t}`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::driven::DriveSpec;
use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, poisson_tail, FockState};
use crate::numerics::linspace;
use crate::ode::{Dopri5, Output};

/// Output samples per drive period on default grids.
pub const SAMPLES_PER_PERIOD: usize = 2000;

/// Truncation tail tolerated by [`evolved_state`].
pub const EVOLVED_TAIL_LIMIT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub chi: f64,
    pub drive: DriveSpec,
    /// Initial coherent amplitude.
    pub alpha: C64,
}

impl ModelParams {
    pub fn new(omega0: f64, chi: f64, drive: DriveSpec, alpha: C64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                reason: format!("must be positive, got {omega0}"),
            });
        }
        if !(chi >= 0.0 && chi.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "chi",
                reason: format!("must be non-negative, got {chi}"),
            });
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be finite".into(),
            });
        }
        if chi / omega0 > 0.5 {
            log::warn!(
                "chi/omega0 = {} is not small; the averaged dynamics may be inaccurate",
                chi / omega0
            );
        }
        Ok(Self {
            omega0,
            chi,
            drive,
            alpha,
        })
    }

    /// `nu = Omega0 - chi`
    pub fn nu(&self) -> f64 {
        self.omega0 - self.chi
    }

    /// Drive period if periodic, else the free period `2 pi / Omega0`.
    pub fn period(&self) -> f64 {
        self.drive.period().unwrap_or(2.0 * PI / self.omega0)
    }
}

/// Uniform grid on `[0, t_end]` with [`SAMPLES_PER_PERIOD`] points per period.
pub fn default_grid(params: &ModelParams, t_end: f64) -> Result<Vec<f64>> {
    grid_with_density(params, t_end, SAMPLES_PER_PERIOD)
}

/// Uniform grid on `[0, t_end]` with `per_period` points per period.
pub fn grid_with_density(params: &ModelParams, t_end: f64, per_period: usize) -> Result<Vec<f64>> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("must be non-negative, got {t_end}"),
        });
    }
    let n = ((t_end / params.period()) * per_period as f64).ceil() as usize + 1;
    Ok(linspace(0.0, t_end, n.max(2)))
}

/// `g(t) = e(t)/sqrt(2 Omega0) e^{-i t (Omega0 + chi)} exp(|alpha|^2 (e^{-2 i chi t} - 1))`
pub fn g_coefficient(params: &ModelParams, t: f64) -> C64 {
    let amp = params.drive.value(t) / (2.0 * params.omega0).sqrt();
    let rot = C64::from_polar(1.0, -t * (params.omega0 + params.chi));
    let kerr = (C64::from_polar(1.0, -2.0 * params.chi * t) - 1.0) * params.alpha.norm_sqr();
    rot * kerr.exp() * amp
}

/// Linearized ladder dynamics for an initial number state `|n>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearizedSolution {
    pub t: f64,
    /// First-order drive response; `a(t) ~ e^{-i nu t} a(0) - zeta(t)`.
    pub zeta: C64,
    /// `gamma(t) = int_0^t 2 chi [n + |zeta|^2] dt'`
    pub gamma_phase: f64,
    /// Refined drive response; `a(t) ~ e^{-i(nu t + gamma)} a(0) + e^{-i nu t} delta(t)`.
    pub delta: C64,
    /// `A(t) = 2 chi nbar(t)`
    pub rate: f64,
    /// `nbar(t) = n + |zeta(t)|^2`
    pub n_bar: f64,
}

impl LinearizedSolution {
    /// Coefficients `(c, d)` of `a(t) = c a(0) + d` in the refined branch.
    pub fn ladder_coefficients(&self, nu: f64) -> (C64, C64) {
        (
            C64::from_polar(1.0, -(nu * self.t + self.gamma_phase)),
            C64::from_polar(1.0, -nu * self.t) * self.delta,
        )
    }
}

/// Linearized solution at one time.
pub fn linearized_ladder(params: &ModelParams, n: usize, t: f64) -> Result<LinearizedSolution> {
    Ok(linearized_series(params, n, &[t])?.remove(0))
}

/// Linearized solution at each of `times` (non-decreasing, non-negative).
///
/// Integrates `u' = e^{i nu t} e(t)`, `gamma' = 2 chi (n + |zeta|^2)` and
/// `w' = e^{i gamma} e^{i nu t} e(t) / (i sqrt(2 Omega0))`, with
/// `zeta = i e^{-i nu t} u / sqrt(2 Omega0)` and `delta = e^{-i gamma} w`.
pub fn linearized_series(
    params: &ModelParams,
    n: usize,
    times: &[f64],
) -> Result<Vec<LinearizedSolution>> {
    if let Some(&last) = times.last() {
        params.drive.check_window(0.0, last)?;
    }
    let nu = params.nu();
    let chi = params.chi;
    let s = 1.0 / (2.0 * params.omega0).sqrt();
    let nf = n as f64;
    let zeta_of = |t: f64, u: C64| C64::new(0.0, s) * C64::from_polar(1.0, -nu * t) * u;
    let zero = C64::new(0.0, 0.0);
    let sol = Dopri5::new(1e-12, 1e-14).solve(
        |t, y, dy| {
            let e = params.drive.value(t);
            let carrier = C64::from_polar(e, nu * t);
            let zeta = zeta_of(t, y[0]);
            dy[0] = carrier;
            dy[1] = C64::new(2.0 * chi * (nf + zeta.norm_sqr()), 0.0);
            dy[2] = C64::from_polar(1.0, y[1].re) * carrier * C64::new(0.0, -s);
        },
        0.0,
        &[zero, zero, zero],
        times,
        Output::Exact,
    )?;
    Ok(sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&t, y)| {
            let zeta = zeta_of(t, y[0]);
            let n_bar = nf + zeta.norm_sqr();
            LinearizedSolution {
                t,
                zeta,
                gamma_phase: y[1].re,
                delta: C64::from_polar(1.0, -y[1].re) * y[2],
                rate: 2.0 * chi * n_bar,
                n_bar,
            }
        })
        .collect())
}

/// Sampled Wei-Norman coefficients, `U_I = e^{X1} e^{X2 a+} e^{X3 a}` with
/// `X1' = X3' X2`, `X2' = -i conj(g)`, `X3' = -i g`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeiNormanSolution {
    pub times: Vec<f64>,
    pub x1: Vec<C64>,
    pub x2: Vec<C64>,
    pub x3: Vec<C64>,
    /// `eta_t = X2(t) + alpha`
    pub eta: Vec<C64>,
    pub alpha: C64,
    pub omega0: f64,
    pub chi: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl WeiNormanSolution {
    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    /// `xi(t) = chi t`
    pub fn xi(&self, t: f64) -> f64 {
        self.chi * t
    }

    /// `(X1, X2, X3)` at `t`, linear in the complex plane between samples.
    pub fn interpolate(&self, t: f64) -> Result<(C64, C64, C64)> {
        let (lo, hi) = self.span();
        let eps = 1e-12 * hi.abs().max(1.0);
        if t < lo - eps || t > hi + eps {
            return Err(Error::NotCovered { t, lo, hi });
        }
        let t = t.clamp(lo, hi);
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return Ok((self.x1[0], self.x2[0], self.x3[0]));
        }
        let i = (k - 1).min(self.times.len().saturating_sub(2));
        if self.times.len() == 1 {
            return Ok((self.x1[0], self.x2[0], self.x3[0]));
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        let lerp = |v: &[C64]| v[i] + (v[i + 1] - v[i]) * w;
        Ok((lerp(&self.x1), lerp(&self.x2), lerp(&self.x3)))
    }

    pub fn eta_at(&self, t: f64) -> Result<C64> {
        Ok(self.interpolate(t)?.1 + self.alpha)
    }
}

/// Wei-Norman integration on the default grid of `[0, t_end]`.
pub fn integrate_wei_norman(
    params: &ModelParams,
    t_end: f64,
    tol: f64,
) -> Result<WeiNormanSolution> {
    let times = default_grid(params, t_end)?;
    integrate_wei_norman_at(params, &times, tol)
}

/// Wei-Norman integration sampled at `times`, with relative and absolute
/// local error tolerance `tol`.
pub fn integrate_wei_norman_at(
    params: &ModelParams,
    times: &[f64],
    tol: f64,
) -> Result<WeiNormanSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    if times.is_empty() {
        return Err(Error::EmptySeries);
    }
    params.drive.check_window(0.0, *times.last().unwrap())?;
    let minus_i = C64::new(0.0, -1.0);
    let zero = C64::new(0.0, 0.0);
    let sol = Dopri5::new(tol, tol).solve(
        |t, y, dy| {
            let g = g_coefficient(params, t);
            let dx3 = minus_i * g;
            dy[0] = dx3 * y[1];
            dy[1] = minus_i * g.conj();
            dy[2] = dx3;
        },
        0.0,
        &[zero, zero, zero],
        times,
        Output::Exact,
    )?;
    let x1: Vec<C64> = sol.states.iter().map(|y| y[0]).collect();
    let x2: Vec<C64> = sol.states.iter().map(|y| y[1]).collect();
    let x3: Vec<C64> = sol.states.iter().map(|y| y[2]).collect();
    let eta = x2.iter().map(|x| x + params.alpha).collect();
    Ok(WeiNormanSolution {
        times: sol.times,
        x1,
        x2,
        x3,
        eta,
        alpha: params.alpha,
        omega0: params.omega0,
        chi: params.chi,
        accepted_steps: sol.accepted,
        rejected_steps: sol.rejected,
    })
}

/// Global phase of the evolved state, `Im(X3 alpha + X1) - Omega0 t / 2`.
pub fn evolved_phase(params: &ModelParams, x1: C64, x3: C64, t: f64) -> f64 {
    (x3 * params.alpha + x1).im - params.omega0 * t / 2.0
}

/// `|psi_t> = e^{i theta} e^{-i chi t n^2} |e^{-i Omega0 t} eta_t>`.
pub fn evolved_state(
    params: &ModelParams,
    sol: &WeiNormanSolution,
    t: f64,
    n_trunc: usize,
) -> Result<FockState> {
    let (x1, x2, x3) = sol.interpolate(t)?;
    let eta = x2 + params.alpha;
    let tail = poisson_tail(eta.norm_sqr(), n_trunc);
    if tail > EVOLVED_TAIL_LIMIT {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            tail,
            limit: EVOLVED_TAIL_LIMIT,
        });
    }
    let z = C64::from_polar(1.0, -params.omega0 * t) * eta;
    let theta = evolved_phase(params, x1, x3, t);
    let xi = params.chi * t;
    let mut amps = coherent_amplitudes(z, n_trunc);
    for (n, c) in amps.iter_mut().enumerate() {
        let nf = n as f64;
        // n^2 xi reduced mod 2 pi in two steps to keep the phase accurate
        let phase = theta - (xi * nf % (2.0 * PI)) * nf % (2.0 * PI);
        *c *= C64::from_polar(1.0, phase);
    }
    FockState::normalize_from(amps)
}
