//! Autocorrelation, revival detection and the Husimi distribution.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{evolved_phase, ModelParams, WeiNormanSolution};
use crate::fock::FockState;
use crate::kerr::kerr_phase;
use crate::numerics::linspace;

/// Relative height above which a Husimi local maximum counts as a peak.
pub const PEAK_FRACTION: f64 = 0.2;

/// `sum_n e^{-i xi n^2} w^n / n!` scaled by `e^{-scale}`, summed in log space
/// until the terms fall below 1e-17 of the running magnitude past the mode.
fn kerr_series(w: C64, xi: f64, scale: f64) -> C64 {
    let r = w.norm();
    if r == 0.0 {
        return C64::new((-scale).exp(), 0.0);
    }
    let (ln_r, arg) = (r.ln(), w.arg());
    let mut sum = C64::new(0.0, 0.0);
    let mut ln_fact = 0.0;
    let mut n = 0usize;
    loop {
        if n > 1 {
            ln_fact += (n as f64).ln();
        }
        let nf = n as f64;
        let mag = (nf * ln_r - ln_fact - scale).exp();
        sum += kerr_phase(xi, n) * C64::from_polar(mag, nf * arg % (2.0 * std::f64::consts::PI));
        if nf > r && mag <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
        if nf > r && mag == 0.0 {
            break;
        }
        n += 1;
    }
    sum
}

/// `F(t) = <alpha|psi_t>`, including the global phase carried by the
/// evolved state.
pub fn autocorrelation(params: &ModelParams, sol: &WeiNormanSolution, t: f64) -> Result<C64> {
    let (x1, x2, x3) = sol.interpolate(t)?;
    let eta = x2 + params.alpha;
    let z = C64::from_polar(1.0, -params.omega0 * t) * eta;
    let scale = 0.5 * (params.alpha.norm_sqr() + eta.norm_sqr());
    let series = kerr_series(params.alpha.conj() * z, params.chi * t, scale);
    Ok(C64::from_polar(1.0, evolved_phase(params, x1, x3, t)) * series)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrSeries {
    pub times: Vec<f64>,
    pub f: Vec<C64>,
    /// `|F|^2`
    pub f2: Vec<f64>,
    pub revivals: Vec<f64>,
}

/// `F` at every sample of the solution grid.
pub fn autocorrelation_series(
    params: &ModelParams,
    sol: &WeiNormanSolution,
) -> Result<AutocorrSeries> {
    let f = sol
        .times
        .par_iter()
        .map(|&t| autocorrelation(params, sol, t))
        .collect::<Result<Vec<_>>>()?;
    let f2 = f.iter().map(|z| z.norm_sqr()).collect();
    Ok(AutocorrSeries {
        times: sol.times.clone(),
        f,
        f2,
        revivals: Vec::new(),
    })
}

/// Running median over five samples, shrinking the window at the ends.
pub fn median5(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            let mut w: Vec<f64> = values[lo..hi].to_vec();
            w.sort_by(f64::total_cmp);
            let m = w.len();
            if m % 2 == 1 {
                w[m / 2]
            } else {
                0.5 * (w[m / 2 - 1] + w[m / 2])
            }
        })
        .collect()
}

/// Times of interior local maxima of the median-filtered `|F|^2` exceeding
/// `threshold`, in increasing order.
pub fn detect_revivals(series: &AutocorrSeries, threshold: f64) -> Result<Vec<f64>> {
    if series.f2.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must be positive, got {threshold}"),
        });
    }
    let m = median5(&series.f2);
    let mut out = Vec::new();
    for i in 1..m.len().saturating_sub(1) {
        if m[i] > threshold && m[i] > m[i - 1] && m[i] >= m[i + 1] {
            out.push(series.times[i]);
        }
    }
    Ok(out)
}

impl AutocorrSeries {
    pub fn with_revivals(mut self, threshold: f64) -> Result<Self> {
        self.revivals = detect_revivals(&self, threshold)?;
        Ok(self)
    }
}

/// Husimi values `Q(x + i y)` on a rectangular grid; `values[[iy, ix]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Array2<f64>,
    pub time: f64,
}

/// A local maximum of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl PhaseSpaceGrid {
    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn dy(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ys.len(), self.xs.len())
    }

    /// Riemann sum of `Q dx dy`.
    pub fn mass(&self) -> f64 {
        self.values.sum() * self.dx() * self.dy()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Strict local maxima over the 8-neighbourhood above `fraction * max`.
    /// A plateau of equal nodes counts once.
    pub fn peaks(&self, fraction: f64) -> Vec<Peak> {
        let (ny, nx) = self.shape();
        let cut = fraction * self.max();
        let mut out = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let v = self.values[[iy, ix]];
                if v <= cut {
                    continue;
                }
                let mut is_max = true;
                'nb: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (jy, jx) = (iy as i64 + dy, ix as i64 + dx);
                        if jy < 0 || jx < 0 || jy >= ny as i64 || jx >= nx as i64 {
                            continue;
                        }
                        let w = self.values[[jy as usize, jx as usize]];
                        // ties go to the earlier node in raster order
                        let earlier = (dy, dx) < (0, 0);
                        if w > v || (earlier && w == v) {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push(Peak {
                        x: self.xs[ix],
                        y: self.ys[iy],
                        value: v,
                    });
                }
            }
        }
        out.sort_by(|a, b| b.value.total_cmp(&a.value));
        out
    }
}

/// Number of peaks at the default [`PEAK_FRACTION`].
pub fn count_peaks(grid: &PhaseSpaceGrid) -> usize {
    grid.peaks(PEAK_FRACTION).len()
}

/// Square window of half-width `|alpha| + 5` centred at the origin.
pub fn default_window(alpha: C64) -> ((f64, f64), (f64, f64)) {
    let h = alpha.norm() + 5.0;
    ((-h, h), (-h, h))
}

/// `|<gamma|psi>|^2 / pi` for one phase-space point.
pub fn husimi_point(state: &FockState, gamma: C64) -> f64 {
    let gc = gamma.conj();
    let mut acc = C64::new(0.0, 0.0);
    let mut w = C64::new(1.0, 0.0);
    // ln of the running weight, rescaled to avoid overflow at large |gamma|
    let mut ln_scale = 0.0;
    for (n, c) in state.amplitudes().iter().enumerate() {
        if n > 0 {
            w *= gc / (n as f64).sqrt();
            let m = w.norm();
            if m > 1e150 {
                w /= m;
                acc /= m;
                ln_scale += m.ln();
            }
        }
        acc += w * c;
    }
    if acc.norm() == 0.0 {
        return 0.0;
    }
    let ln_q = 2.0 * (acc.norm().ln() + ln_scale) - gamma.norm_sqr();
    ln_q.exp() / std::f64::consts::PI
}

/// Husimi distribution of a pure state on an `nx x ny` grid.
pub fn husimi_grid(
    state: &FockState,
    x_range: (f64, f64),
    y_range: (f64, f64),
    resolution: (usize, usize),
    time: f64,
) -> Result<PhaseSpaceGrid> {
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::GridResolution { nx, ny });
    }
    let xs = linspace(x_range.0, x_range.1, nx);
    let ys = linspace(y_range.0, y_range.1, ny);
    let rows: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| husimi_point(state, C64::new(x, y)))
                .collect()
        })
        .collect();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((ny, nx), flat).expect("grid shape");
    Ok(PhaseSpaceGrid {
        xs,
        ys,
        values,
        time,
    })
}

/// `Q(gamma, t) = e^{-(|gamma|^2 + |eta|^2)} |sum (conj(gamma) z)^n e^{-i xi n^2}/n!|^2 / pi`
/// with `z = e^{-i Omega0 t} eta_t`.
pub fn husimi_closed_form(
    params: &ModelParams,
    sol: &WeiNormanSolution,
    gamma: C64,
    t: f64,
) -> Result<f64> {
    let eta = sol.eta_at(t)?;
    let z = C64::from_polar(1.0, -params.omega0 * t) * eta;
    let scale = 0.5 * (gamma.norm_sqr() + eta.norm_sqr());
    let s = kerr_series(gamma.conj() * z, params.chi * t, scale);
    Ok(s.norm_sqr() / std::f64::consts::PI)
}

/// `sum Q(gamma) A(gamma) dx dy` for an observable sampled on the grid nodes.
pub fn husimi_expectation(grid: &PhaseSpaceGrid, samples: &Array2<C64>) -> Result<C64> {
    let shape = grid.shape();
    if samples.dim() != shape {
        return Err(Error::GridMismatch {
            grid: shape,
            samples: samples.dim(),
        });
    }
    let sum: C64 = grid
        .values
        .iter()
        .zip(samples.iter())
        .map(|(q, a)| a * *q)
        .sum();
    Ok(sum * (grid.dx() * grid.dy()))
}

/// Samples `f(gamma)` on the nodes of a grid.
pub fn sample_on_grid(grid: &PhaseSpaceGrid, f: impl Fn(C64) -> C64) -> Array2<C64> {
    Array2::from_shape_fn(grid.shape(), |(iy, ix)| {
        f(C64::new(grid.xs[ix], grid.ys[iy]))
    })
}
