//! Driven oscillator without the Kerr term: displacement amplitude, shifted
//! spectrum and shifted Hermite eigenfunctions of
//! `H_f(t) = Omega(t)(n + 1/2) + e(t)/sqrt(2 Omega(t)) (a + a+)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockState};
use crate::numerics::MonotoneCubic;

/// Highest order accepted by the Hermite-function recurrence.
pub const MAX_HERMITE_ORDER: usize = 200;

/// External force profile `e(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum DriveSpec {
    Zero,
    Constant(f64),
    /// `amplitude * cos(frequency * t)`
    Cosine {
        amplitude: f64,
        frequency: f64,
    },
    Tabulated(MonotoneCubic),
}

impl DriveSpec {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            DriveSpec::Zero => 0.0,
            DriveSpec::Constant(e0) => *e0,
            DriveSpec::Cosine {
                amplitude,
                frequency,
            } => amplitude * (frequency * t).cos(),
            DriveSpec::Tabulated(table) => table.eval(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DriveSpec::Zero => true,
            DriveSpec::Constant(e0) => *e0 == 0.0,
            DriveSpec::Cosine { amplitude, .. } => *amplitude == 0.0,
            DriveSpec::Tabulated(table) => table.values().iter().all(|v| *v == 0.0),
        }
    }

    /// Tabulated drives must cover the whole simulation window.
    pub fn check_window(&self, t0: f64, t1: f64) -> Result<()> {
        if let DriveSpec::Tabulated(table) = self {
            let (lo, hi) = table.domain();
            for t in [t0, t1] {
                if t < lo - 1e-12 || t > hi + 1e-12 {
                    return Err(Error::OutOfDomain { t, lo, hi });
                }
            }
        }
        Ok(())
    }

    /// Oscillation period of a cosine drive.
    pub fn period(&self) -> Option<f64> {
        match self {
            DriveSpec::Cosine { frequency, .. } if *frequency != 0.0 => {
                Some(2.0 * std::f64::consts::PI / frequency.abs())
            }
            _ => None,
        }
    }
}

/// `Omega(t) = Omega0 [1 + 2k cos(2 Omega0 t)]`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencySpec {
    omega0: f64,
    k: f64,
}

impl FrequencySpec {
    pub fn new(omega0: f64, k: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                reason: format!("must be positive, got {omega0}"),
            });
        }
        if !(0.0..0.5).contains(&k) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("confinement parameter must lie in [0, 1/2), got {k}"),
            });
        }
        Ok(Self { omega0, k })
    }

    pub fn constant(omega0: f64) -> Result<Self> {
        Self::new(omega0, 0.0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.omega0 * (1.0 + 2.0 * self.k * (2.0 * self.omega0 * t).cos())
    }

    fn positive_omega(&self, t: f64) -> Result<f64> {
        let omega = self.omega(t);
        if omega <= 0.0 {
            return Err(Error::NonPositiveFrequency { t, omega });
        }
        Ok(omega)
    }
}

/// `lambda_t = e(t) / (Omega(t) sqrt(2 Omega(t)))`
pub fn lambda_t(e: &DriveSpec, omega: &FrequencySpec, t: f64) -> Result<f64> {
    let w = omega.positive_omega(t)?;
    Ok(e.value(t) / (w * (2.0 * w).sqrt()))
}

/// `E_n(t) = (n + 1/2 - lambda_t^2) Omega(t)`
pub fn spectrum_hf(n: usize, e: &DriveSpec, omega: &FrequencySpec, t: f64) -> Result<f64> {
    let w = omega.positive_omega(t)?;
    let lambda = lambda_t(e, omega, t)?;
    Ok((n as f64 + 0.5 - lambda * lambda) * w)
}

/// Normalized Hermite function `h_n(z) = (2^n n! sqrt(pi))^{-1/2} H_n(z) e^{-z^2/2}`,
/// evaluated by the three-term recurrence on the normalized functions.
pub fn hermite_function(n: usize, z: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrder {
            n,
            max: MAX_HERMITE_ORDER,
        });
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
    if n == 0 {
        return Ok(h0);
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * z * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Eigenfunction of the undriven oscillator with frequency `omega`.
pub fn free_eigenfunction(n: usize, q: f64, omega: f64) -> Result<f64> {
    Ok(omega.powf(0.25) * hermite_function(n, omega.sqrt() * q)?)
}

/// Centre of the driven eigenfunctions, `-lambda_t sqrt(2/Omega(t)) = -e(t)/Omega(t)^2`,
/// the minimum of `Omega^2 q^2 / 2 + e q`.
pub fn eigenfunction_center(e: &DriveSpec, omega: &FrequencySpec, t: f64) -> Result<f64> {
    let w = omega.positive_omega(t)?;
    Ok(-lambda_t(e, omega, t)? * (2.0 / w).sqrt())
}

/// Position-space eigenfunction of `H_f(t)`: the free eigenfunction translated
/// to the potential minimum.
pub fn eigenfunction_hf(
    n: usize,
    q: f64,
    e: &DriveSpec,
    omega: &FrequencySpec,
    t: f64,
) -> Result<f64> {
    let w = omega.positive_omega(t)?;
    let center = eigenfunction_center(e, omega, t)?;
    free_eigenfunction(n, q - center, w)
}

/// Displacement operator `D(alpha) = exp(alpha a+ - conj(alpha) a)`.
pub fn displacement(alpha: C64, n_trunc: usize) -> FockOperator {
    let a = FockOperator::annihilation(n_trunc);
    let generator = &a.dagger().scale(alpha) - &a.scale(alpha.conj());
    generator.exp()
}

/// `|n>_t = D+(lambda)|n> = exp(lambda (a - a+))|n>` for real `lambda`.
///
/// Fails when the displaced state reaches the top basis level (population
/// above 1e-9), where the truncated generator no longer represents the
/// displacement faithfully.
pub fn displaced_number_state(n: usize, lambda: f64, n_trunc: usize) -> Result<FockState> {
    if n >= n_trunc {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("level {n} not below truncation {n_trunc}"),
        });
    }
    let d_dag = displacement(C64::new(-lambda, 0.0), n_trunc);
    let column = d_dag.matrix().column(n).to_owned();
    let top = column[n_trunc - 1].norm_sqr();
    if top > 1e-9 {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            tail: top,
            limit: 1e-9,
        });
    }
    FockState::normalize_from(column)
}

/// `H_0(t) = Omega(t)(n + 1/2)`
pub fn free_hamiltonian(omega: &FrequencySpec, t: f64, n_trunc: usize) -> Result<FockOperator> {
    let w = omega.positive_omega(t)?;
    Ok(FockOperator::diagonal(n_trunc, |n| {
        C64::new(w * (n as f64 + 0.5), 0.0)
    }))
}

/// `H_f(t)` on the truncated number basis of `A_t`.
pub fn driven_hamiltonian(
    e: &DriveSpec,
    omega: &FrequencySpec,
    t: f64,
    n_trunc: usize,
) -> Result<FockOperator> {
    let w = omega.positive_omega(t)?;
    let h0 = free_hamiltonian(omega, t, n_trunc)?;
    let a = FockOperator::annihilation(n_trunc);
    let x = &a + &a.dagger();
    Ok(&h0 + &x.scale(C64::new(e.value(t) / (2.0 * w).sqrt(), 0.0)))
}
