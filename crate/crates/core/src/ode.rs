//! Adaptive Dormand-Prince 5(4) integrator for complex vector ODEs.
//!
//! Both the Wei-Norman coefficient equations and the reference Schrodinger
//! integration run through this one stepper, so tolerances mean the same
//! thing on both sides of every comparison.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th- and embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// How requested output times are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    /// Cubic Hermite interpolation inside accepted steps.
    Dense,
    /// Steps are shortened to land exactly on every output time.
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step; `f64::INFINITY` for none.
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self::new(1e-10, 1e-12)
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 10_000_000,
            h_max: f64::INFINITY,
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    fn error_norm(&self, y: &[C64], y_new: &[C64], err: &[C64]) -> f64 {
        let n = y.len().max(1) as f64;
        let sum: f64 = y
            .iter()
            .zip(y_new)
            .zip(err)
            .map(|((a, b), e)| {
                let sc = self.atol + self.rtol * a.norm().max(b.norm());
                (e.norm() / sc).powi(2)
            })
            .sum();
        (sum / n).sqrt()
    }

    fn scaled_norm(&self, y0: &[C64], v: &[C64]) -> f64 {
        let n = y0.len().max(1) as f64;
        let sum: f64 = y0
            .iter()
            .zip(v)
            .map(|(a, b)| (b.norm() / (self.atol + self.rtol * a.norm())).powi(2))
            .sum();
        (sum / n).sqrt()
    }

    /// Integrates `y' = rhs(t, y)` from `t0` and returns the state at every
    /// time in `outputs`, which must be non-decreasing and not before `t0`.
    pub fn solve<F>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: &[C64],
        outputs: &[f64],
        mode: Output,
    ) -> Result<Solution>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let dim = y0.len();
        let mut sol = Solution {
            times: Vec::with_capacity(outputs.len()),
            states: Vec::with_capacity(outputs.len()),
            accepted: 0,
            rejected: 0,
        };
        if outputs.is_empty() {
            return Ok(sol);
        }
        if outputs[0] < t0 || outputs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "outputs",
                reason: "output times must be sorted and not before t0".into(),
            });
        }
        let t_end = *outputs.last().unwrap();

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![C64::new(0.0, 0.0); dim];
        rhs(t, &y, &mut k1);

        let mut next_out = 0;
        while next_out < outputs.len() && outputs[next_out] <= t {
            sol.times.push(outputs[next_out]);
            sol.states.push(y.clone());
            next_out += 1;
        }
        if next_out == outputs.len() {
            return Ok(sol);
        }

        let mut h = self
            .initial_step(&mut rhs, t, &y, &k1, t_end - t0)
            .min(self.h_max);

        let mut k2 = vec![C64::new(0.0, 0.0); dim];
        let mut k3 = k2.clone();
        let mut k4 = k2.clone();
        let mut k5 = k2.clone();
        let mut k6 = k2.clone();
        let mut k7 = k2.clone();
        let mut tmp = k2.clone();
        let mut y_new = k2.clone();
        let mut err = k2.clone();
        let mut last_rejected = false;

        while next_out < outputs.len() {
            if sol.accepted + sol.rejected >= self.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    max_steps: self.max_steps,
                });
            }
            let mut landing = None;
            let h_free = h;
            let limit = match mode {
                Output::Exact => outputs[next_out],
                Output::Dense => t_end,
            };
            if t + h >= limit - 1e-14 * limit.abs().max(1.0) {
                h = limit - t;
                landing = Some(limit);
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }

            for i in 0..dim {
                tmp[i] = y[i] + k1[i] * (h * A21);
            }
            rhs(t + C2 * h, &tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
            }
            rhs(t + C3 * h, &tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            rhs(t + C4 * h, &tmp, &mut k4);
            for i in 0..dim {
                tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            rhs(t + C5 * h, &tmp, &mut k5);
            for i in 0..dim {
                tmp[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            rhs(t + h, &tmp, &mut k6);
            for i in 0..dim {
                y_new[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
            }
            rhs(t + h, &y_new, &mut k7);
            for i in 0..dim {
                err[i] =
                    (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                        * h;
            }

            let en = self.error_norm(&y, &y_new, &err);
            if en <= 1.0 {
                let t_new = landing.unwrap_or(t + h);
                // emit every output inside (t, t_new]
                while next_out < outputs.len() && outputs[next_out] <= t_new {
                    let to = outputs[next_out];
                    let state = if to == t_new {
                        y_new.clone()
                    } else {
                        hermite(&y, &k1, &y_new, &k7, h, (to - t) / h)
                    };
                    sol.times.push(to);
                    sol.states.push(state);
                    next_out += 1;
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                sol.accepted += 1;

                let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 5.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                h *= fac;
                if landing.is_some() {
                    h = h.max(h_free);
                }
                h = h.min(self.h_max);
                last_rejected = false;
            } else {
                sol.rejected += 1;
                let fac = if en.is_finite() {
                    (0.9 * en.powf(-0.2)).max(0.2)
                } else {
                    0.2
                };
                h *= fac;
                last_rejected = true;
            }
        }
        Ok(sol)
    }

    fn initial_step<F>(&self, rhs: &mut F, t0: f64, y0: &[C64], f0: &[C64], span: f64) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let d0 = self.scaled_norm(y0, y0);
        let d1 = self.scaled_norm(y0, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
        .min(span.abs());
        let y1: Vec<C64> = y0.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
        let mut f1 = vec![C64::new(0.0, 0.0); y0.len()];
        rhs(t0 + h0, &y1, &mut f1);
        let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = self.scaled_norm(y0, &diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span.abs())
    }
}

/// Cubic Hermite interpolant between `(y0, f0)` and `(y1, f1)` at fraction `theta` of a step `h`.
pub fn hermite(y0: &[C64], f0: &[C64], y1: &[C64], f1: &[C64], h: f64, theta: f64) -> Vec<C64> {
    let th = theta;
    y0.iter()
        .zip(f0)
        .zip(y1.iter().zip(f1))
        .map(|((a, fa), (b, fb))| {
            (1.0 - th) * a
                + th * b
                + th * (th - 1.0) * ((1.0 - 2.0 * th) * (b - a) + (th - 1.0) * h * fa + th * h * fb)
        })
        .collect()
}
