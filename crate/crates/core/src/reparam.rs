//! Time reparametrization for oscillators with time-dependent mass.
//!
//! For `H(t) = p^2/(2m(t)) + m(t) Omega(t)^2 q^2 / 2 = H*(t)/m(t)` with
//! `H*(t) = p^2/2 + omega(t)^2 q^2/2` and `omega(t) = m(t) Omega(t)`, the
//! evolution operator of `H` at time `t` equals the evolution operator of the
//! reparametrized `H*(rho^-1(tau))` at `tau = rho(t) = int_0^t dt'/m(t')`.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::driven::FrequencySpec;
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockState};
use crate::numerics::{adaptive_simpson, MonotoneCubic};
use crate::oracle::integrate_schrodinger;

const QUAD_TOL: f64 = 1e-10;

/// Mass profile `m(t) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum MassSpec {
    Constant(f64),
    /// `m0 exp(gamma t)`
    Exponential {
        m0: f64,
        gamma: f64,
    },
    Tabulated(TabulatedMass),
}

/// Tabulated mass with the running integral of `1/m` cached at every knot.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedMass {
    interp: MonotoneCubic,
    cumulative: Vec<f64>,
}

impl TabulatedMass {
    fn new(times: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if let Some(bad) = masses.iter().find(|m| !(**m > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("non-positive mass sample {bad}"),
            });
        }
        if times.first().copied().unwrap_or(1.0) > 0.0 {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: "table must start at or before t = 0".into(),
            });
        }
        let interp = MonotoneCubic::new(times, masses)?;
        let knots = interp.knots().to_vec();
        // cumulative integral from t = 0; knots before zero get negative values
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        let mut prev = knots[0];
        for &k in &knots {
            acc += adaptive_simpson(|s| 1.0 / interp.eval(s), prev, k, QUAD_TOL * 1e-2);
            cumulative.push(acc);
            prev = k;
        }
        let at_zero = Self::integral_from_first(&interp, &knots, &cumulative, 0.0);
        for c in &mut cumulative {
            *c -= at_zero;
        }
        Ok(Self { interp, cumulative })
    }

    fn integral_from_first(
        interp: &MonotoneCubic,
        knots: &[f64],
        cumulative: &[f64],
        t: f64,
    ) -> f64 {
        let i = knots.partition_point(|&k| k <= t).saturating_sub(1);
        cumulative[i] + adaptive_simpson(|s| 1.0 / interp.eval(s), knots[i], t, QUAD_TOL * 1e-2)
    }

    fn rho(&self, t: f64) -> f64 {
        let knots = self.interp.knots();
        let i = knots.partition_point(|&k| k <= t).saturating_sub(1);
        self.cumulative[i] + adaptive_simpson(|s| 1.0 / self.interp.eval(s), knots[i], t, QUAD_TOL)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.interp.domain()
    }
}

impl MassSpec {
    pub fn constant(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be positive, got {m}"),
            });
        }
        Ok(MassSpec::Constant(m))
    }

    pub fn exponential(m0: f64, gamma: f64) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "m0",
                reason: format!("must be positive, got {m0}"),
            });
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "must be finite".into(),
            });
        }
        Ok(MassSpec::Exponential { m0, gamma })
    }

    /// Samples `(t_i, m_i)`, strictly increasing in time, starting at or before zero.
    pub fn tabulated(times: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        Ok(MassSpec::Tabulated(TabulatedMass::new(times, masses)?))
    }

    pub fn mass(&self, t: f64) -> f64 {
        match self {
            MassSpec::Constant(m) => *m,
            MassSpec::Exponential { m0, gamma } => m0 * (gamma * t).exp(),
            MassSpec::Tabulated(tab) => tab.interp.eval(t),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("time must be non-negative, got {t}"),
            });
        }
        if let MassSpec::Tabulated(tab) = self {
            let (lo, hi) = tab.domain();
            if t > hi {
                return Err(Error::OutOfDomain { t, lo, hi });
            }
        }
        Ok(())
    }
}

/// `tau = rho(t) = int_0^t dt'/m(t')`.
pub fn rho_map(m: &MassSpec, t: f64) -> Result<f64> {
    m.check_time(t)?;
    Ok(match m {
        MassSpec::Constant(mass) => t / mass,
        MassSpec::Exponential { m0, gamma } => {
            if *gamma == 0.0 {
                t / m0
            } else {
                -(-gamma * t).exp_m1() / (m0 * gamma)
            }
        }
        MassSpec::Tabulated(tab) => tab.rho(t),
    })
}

/// Inverse of [`rho_map`].
pub fn rho_inverse(m: &MassSpec, tau: f64) -> Result<f64> {
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be non-negative, got {tau}"),
        });
    }
    match m {
        MassSpec::Constant(mass) => Ok(tau * mass),
        MassSpec::Exponential { m0, gamma } => {
            if *gamma == 0.0 {
                return Ok(tau * m0);
            }
            let arg = -m0 * gamma * tau;
            if arg <= -1.0 {
                return Err(Error::OutOfDomain {
                    t: tau,
                    lo: 0.0,
                    hi: 1.0 / (m0 * gamma),
                });
            }
            Ok(arg.ln_1p() / -gamma)
        }
        MassSpec::Tabulated(tab) => {
            let (_, hi) = tab.domain();
            let tau_hi = tab.rho(hi);
            if tau > tau_hi {
                return Err(Error::OutOfDomain {
                    t: tau,
                    lo: 0.0,
                    hi: tau_hi,
                });
            }
            // bracket on the knot table, then Newton with bisection fallback
            let knots = tab.interp.knots();
            let mut lo = 0.0;
            let mut hi_t = hi;
            for (&k, &c) in knots.iter().zip(&tab.cumulative) {
                if k <= 0.0 {
                    continue;
                }
                if c >= tau {
                    hi_t = k;
                    break;
                }
                lo = k;
            }
            let mut t = 0.5 * (lo + hi_t);
            for _ in 0..200 {
                let f = tab.rho(t) - tau;
                if f.abs() <= 1e-13 * tau.max(1.0) {
                    break;
                }
                if f > 0.0 {
                    hi_t = t;
                } else {
                    lo = t;
                }
                let newton = t - f * m.mass(t);
                t = if newton > lo && newton < hi_t {
                    newton
                } else {
                    0.5 * (lo + hi_t)
                };
            }
            Ok(t)
        }
    }
}

/// `omega(t) = m(t) Omega(t)`
pub fn transformed_frequency(m: &MassSpec, omega: &FrequencySpec, t: f64) -> f64 {
    m.mass(t) * omega.omega(t)
}

/// Spectrum of `H(t)`: the mass drops out, `E_n(t) = Omega(t)(n + 1/2)`.
pub fn spectrum_h(n: usize, omega: &FrequencySpec, t: f64) -> f64 {
    omega.omega(t) * (n as f64 + 0.5)
}

/// The time map and the transformed frequency for one mass/frequency pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ReparamResult {
    pub mass: MassSpec,
    pub frequency: FrequencySpec,
}

impl ReparamResult {
    pub fn new(mass: MassSpec, frequency: FrequencySpec) -> Self {
        Self { mass, frequency }
    }

    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        rho_map(&self.mass, t)
    }

    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        rho_inverse(&self.mass, tau)
    }

    pub fn omega_star(&self, t: f64) -> f64 {
        transformed_frequency(&self.mass, &self.frequency, t)
    }
}

/// Heisenberg-picture coefficients:
/// `q(t) = c_qq q(0) + c_qp p(0)`, `p(t) = c_pq q(0) + c_pp p(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergQP {
    pub c_qq: f64,
    pub c_qp: f64,
    pub c_pq: f64,
    pub c_pp: f64,
}

impl HeisenbergQP {
    /// Determinant of the coefficient matrix; 1 when `[q, p] = i` is preserved.
    pub fn determinant(&self) -> f64 {
        self.c_qq * self.c_pp - self.c_qp * self.c_pq
    }
}

/// Closed-form Heisenberg solution for `m(t) = m0 exp(gamma t)`, constant `omega0`,
/// in the oscillatory regime `4 omega0^2 > gamma^2`.
///
/// With `F = sqrt(4 omega0^2 - gamma^2)`, `theta = atan2(F, gamma)` and `x = F t / 2`:
///
/// ```text
/// q(t) = (2 / (m0 F)) e^{-gamma t/2} (sin x p(0) + m0 omega0 sin(x + theta) q(0))
/// p(t) = -(2 omega0 / F) e^{+gamma t/2} (sin(x - theta) p(0) + m0 omega0 sin x q(0))
/// ```
///
/// The momentum carries `e^{+gamma t/2}`: `p = m(t) dq/dt` and the growing mass
/// overcompensates the decay of `q`.
pub fn heisenberg_exp_mass(m0: f64, omega0: f64, gamma: f64, t: f64) -> Result<HeisenbergQP> {
    if !(m0 > 0.0) || !(omega0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "m0/omega0",
            reason: "mass and frequency must be positive".into(),
        });
    }
    let four_w2 = 4.0 * omega0 * omega0;
    let g2 = gamma * gamma;
    if four_w2 <= g2 {
        return Err(Error::Overdamped { four_w2, g2 });
    }
    let big_f = (four_w2 - g2).sqrt();
    let theta = big_f.atan2(gamma);
    let x = big_f * t / 2.0;
    let decay = (-gamma * t / 2.0).exp();
    let grow = (gamma * t / 2.0).exp();
    Ok(HeisenbergQP {
        c_qq: 2.0 * omega0 / big_f * decay * (x + theta).sin(),
        c_qp: 2.0 / (m0 * big_f) * decay * x.sin(),
        c_pq: -2.0 * m0 * omega0 * omega0 / big_f * grow * x.sin(),
        c_pp: -2.0 * omega0 / big_f * grow * (x - theta).sin(),
    })
}

/// Position and momentum of a reference oscillator `(mass_ref, omega_ref)`
/// on the truncated number basis; `q^2` and `p^2` are cached.
#[derive(Clone, Debug)]
pub struct QuadraticBasis {
    pub n_trunc: usize,
    pub mass_ref: f64,
    pub omega_ref: f64,
    q: FockOperator,
    p: FockOperator,
    q2: Array2<C64>,
    p2: Array2<C64>,
}

impl QuadraticBasis {
    pub fn new(n_trunc: usize, mass_ref: f64, omega_ref: f64) -> Self {
        let a = FockOperator::annihilation(n_trunc);
        let ad = a.dagger();
        let q = (&a + &ad).scale(C64::new(1.0 / (2.0 * mass_ref * omega_ref).sqrt(), 0.0));
        let p = (&ad - &a).scale(C64::new(0.0, (mass_ref * omega_ref / 2.0).sqrt()));
        let q2 = (&q * &q).matrix().clone();
        let p2 = (&p * &p).matrix().clone();
        Self {
            n_trunc,
            mass_ref,
            omega_ref,
            q,
            p,
            q2,
            p2,
        }
    }

    pub fn position(&self) -> &FockOperator {
        &self.q
    }

    pub fn momentum(&self) -> &FockOperator {
        &self.p
    }

    /// `out = (kinetic p^2 + potential q^2) psi`
    fn apply_quadratic(&self, kinetic: f64, potential: f64, psi: &[C64], out: &mut [C64]) {
        let n = self.n_trunc;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            // q^2 and p^2 are pentadiagonal
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            for j in lo..hi {
                acc += (self.p2[[i, j]] * kinetic + self.q2[[i, j]] * potential) * psi[j];
            }
            out[i] = acc;
        }
    }
}

/// Evolution under the reparametrized constant-mass Hamiltonian `H*(rho^-1(tau))`.
pub trait StarEvolver {
    fn evolve(&self, psi0: &FockState, tau: f64) -> Result<FockState>;
}

/// Integrates `i d/dtau phi = [p^2/2 + omega(rho^-1(tau))^2 q^2 / 2] phi`.
#[derive(Clone, Debug)]
pub struct QuadraticStarEvolver {
    pub reparam: ReparamResult,
    pub basis: QuadraticBasis,
    pub tol: f64,
}

impl StarEvolver for QuadraticStarEvolver {
    fn evolve(&self, psi0: &FockState, tau: f64) -> Result<FockState> {
        let reparam = &self.reparam;
        let basis = &self.basis;
        let mut failure = None;
        let out = integrate_schrodinger(
            |s, psi, out| {
                let t = match reparam.t_of_tau(s) {
                    Ok(t) => t,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                };
                let w = reparam.omega_star(t);
                basis.apply_quadratic(0.5, 0.5 * w * w, psi, out);
            },
            psi0,
            &[tau],
            self.tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(out?.pop().expect("one output requested"))
    }
}

/// `U(t) psi0 = U*(rho(t)) psi0`.
pub fn evolve_via_timemap(
    psi0: &FockState,
    m: &MassSpec,
    evolver_star: &impl StarEvolver,
    t: f64,
) -> Result<FockState> {
    let tau = rho_map(m, t)?;
    if tau == 0.0 {
        return Ok(psi0.clone());
    }
    evolver_star.evolve(psi0, tau)
}

/// Direct time-ordered integration of `H(t) = p^2/(2m(t)) + m(t) Omega(t)^2 q^2/2`
/// at each of `times`.
pub fn evolve_direct(
    psi0: &FockState,
    reparam: &ReparamResult,
    basis: &QuadraticBasis,
    times: &[f64],
    tol: f64,
) -> Result<Vec<FockState>> {
    integrate_schrodinger(
        |t, psi, out| {
            let m = reparam.mass.mass(t);
            let w = reparam.frequency.omega(t);
            basis.apply_quadratic(0.5 / m, 0.5 * m * w * w, psi, out);
        },
        psi0,
        times,
        tol,
    )
}

/// `<q>` and `<p>` of a state in the given basis.
pub fn mean_position_momentum(basis: &QuadraticBasis, psi: &FockState) -> Result<(f64, f64)> {
    Ok((
        basis.position().expectation(psi)?.re,
        basis.momentum().expectation(psi)?.re,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use crate::ode::{Dopri5, Output};

    #[test]
    fn unit_mass_is_identity_map() {
        let m = MassSpec::constant(1.0).unwrap();
        assert_eq!(rho_map(&m, 5.0).unwrap(), 5.0);
        assert_eq!(rho_inverse(&m, 5.0).unwrap(), 5.0);
    }

    #[test]
    fn exponential_mass_saturates() {
        let m = MassSpec::exponential(1.0, 1.0).unwrap();
        assert!((rho_map(&m, 60.0).unwrap() - 1.0).abs() < 1e-15);
        let t = 2.0;
        let m = MassSpec::exponential(1.0, 0.5).unwrap();
        let closed = rho_map(&m, t).unwrap();
        let quad = adaptive_simpson(|s| 1.0 / m.mass(s), 0.0, t, 1e-13);
        assert!((closed - quad).abs() < 1e-11);
        assert!((closed - 1.26424).abs() < 1e-5);
    }

    #[test]
    fn rejects_negative_time_and_bad_mass() {
        let m = MassSpec::constant(2.0).unwrap();
        assert!(rho_map(&m, -1.0).is_err());
        assert!(MassSpec::constant(0.0).is_err());
        assert!(MassSpec::tabulated(vec![0.0, 1.0], vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn tabulated_quadrature_is_accurate() {
        // a linear table is reproduced exactly by the interpolant
        let tab = MassSpec::tabulated(vec![0.0, 1.0, 2.0, 5.0], vec![1.0, 1.5, 2.0, 3.5]).unwrap();
        for t in [0.0f64, 0.6, 1.0, 3.3, 5.0] {
            let exact = 2.0 * (1.0 + 0.5 * t).ln();
            let got = rho_map(&tab, t).unwrap();
            assert!((got - exact).abs() <= 1e-10 * exact.max(1e-12), "t={t}");
        }
    }

    #[test]
    fn tabulated_follows_a_sampled_exponential() {
        let exact = MassSpec::exponential(1.0, 0.3).unwrap();
        let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
        let masses: Vec<f64> = times.iter().map(|&t| exact.mass(t)).collect();
        let tab = MassSpec::tabulated(times, masses).unwrap();
        for t in [0.0, 0.33, 2.5, 7.77, 10.0] {
            let a = rho_map(&tab, t).unwrap();
            let b = rho_map(&exact, t).unwrap();
            assert!((a - b).abs() < 1e-5 * b.max(1e-3), "t={t}: {a} vs {b}");
        }
        assert!(rho_map(&tab, 10.5).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let specs = vec![
            MassSpec::constant(2.5).unwrap(),
            MassSpec::exponential(1.5, 0.3).unwrap(),
            MassSpec::exponential(1.0, -0.2).unwrap(),
            MassSpec::tabulated(vec![0.0, 1.0, 2.0, 4.0], vec![1.0, 3.0, 0.5, 2.0]).unwrap(),
        ];
        for m in &specs {
            for t in [0.0, 0.4, 1.7, 3.9] {
                let tau = rho_map(m, t).unwrap();
                let back = rho_inverse(m, tau).unwrap();
                assert!((back - t).abs() < 1e-9, "{m:?} t={t} back={back}");
            }
        }
    }

    #[test]
    fn transformed_frequency_examples() {
        let w = FrequencySpec::constant(3.0).unwrap();
        assert_eq!(
            transformed_frequency(&MassSpec::constant(1.0).unwrap(), &w, 0.7),
            3.0
        );
        let m = MassSpec::exponential(2.0, 0.0).unwrap();
        assert_eq!(transformed_frequency(&m, &w, 1.0), 6.0);
        let m = MassSpec::exponential(1.3, 0.4).unwrap();
        let w0 = FrequencySpec::constant(0.9).unwrap();
        let t = 1.1;
        let v = transformed_frequency(&m, &w0, t);
        // squared, this is the m0^2 omega0^2 e^{2 gamma t} coefficient of q^2 in H*
        assert!((v - 1.3 * 0.9 * (0.4 * t).exp()).abs() < 1e-14);
    }

    #[test]
    fn spectrum_examples() {
        let w1 = FrequencySpec::constant(1.0).unwrap();
        let w2 = FrequencySpec::constant(2.0).unwrap();
        assert_eq!(spectrum_h(0, &w1, 0.0), 0.5);
        assert_eq!(spectrum_h(3, &w2, 4.0), 7.0);
        // exponential mass: omega(t)/m(t) is the constant omega0
        let m = MassSpec::exponential(1.0, 0.3).unwrap();
        let w0 = 1.7;
        for t in [0.0, 1.0, 4.0] {
            let big_omega =
                transformed_frequency(&m, &FrequencySpec::constant(w0).unwrap(), t) / m.mass(t);
            let spec = FrequencySpec::constant(big_omega).unwrap();
            assert!((spectrum_h(2, &spec, t) - w0 * 2.5).abs() < 1e-13);
        }
    }

    #[test]
    fn heisenberg_identity_at_zero() {
        let c = heisenberg_exp_mass(1.3, 0.8, 0.5, 0.0).unwrap();
        assert!((c.c_qq - 1.0).abs() < 1e-15);
        assert!(c.c_qp.abs() < 1e-15);
        assert!(c.c_pq.abs() < 1e-15);
        assert!((c.c_pp - 1.0).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_constant_mass_limit() {
        let (m0, w0, t) = (1.4, 0.9, 2.3);
        let c = heisenberg_exp_mass(m0, w0, 1e-9, t).unwrap();
        assert!((c.c_qq - (w0 * t).cos()).abs() < 1e-8);
        assert!((c.c_qp - (w0 * t).sin() / (m0 * w0)).abs() < 1e-8);
        assert!((c.c_pq + m0 * w0 * (w0 * t).sin()).abs() < 1e-8);
        assert!((c.c_pp - (w0 * t).cos()).abs() < 1e-8);
    }

    #[test]
    fn heisenberg_is_symplectic() {
        let c = heisenberg_exp_mass(1.0, 1.0, 0.4, 2.0).unwrap();
        assert!((c.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_matches_classical_equations_of_motion() {
        // oracle: integrate dq/dt = p/m, dp/dt = -m w0^2 q for unit initial vectors
        let (m0, w0, g) = (1.2, 1.1, 0.6);
        let m = MassSpec::exponential(m0, g).unwrap();
        let times: Vec<f64> = (1..=8).map(|k| k as f64 * 0.6).collect();
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let mass = m.mass(t);
            dy[0] = y[1] / mass;
            dy[1] = -mass * w0 * w0 * y[0];
        };
        let from_q = Dopri5::new(1e-12, 1e-14)
            .solve(
                rhs,
                0.0,
                &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                &times,
                Output::Exact,
            )
            .unwrap();
        let from_p = Dopri5::new(1e-12, 1e-14)
            .solve(
                rhs,
                0.0,
                &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
                &times,
                Output::Exact,
            )
            .unwrap();
        for (k, &t) in times.iter().enumerate() {
            let c = heisenberg_exp_mass(m0, w0, g, t).unwrap();
            assert!((c.c_qq - from_q.states[k][0].re).abs() < 1e-9);
            assert!((c.c_pq - from_q.states[k][1].re).abs() < 1e-9);
            assert!((c.c_qp - from_p.states[k][0].re).abs() < 1e-9);
            assert!((c.c_pp - from_p.states[k][1].re).abs() < 1e-9);
        }
    }

    #[test]
    fn decaying_momentum_prefactor_breaks_the_commutator() {
        // with e^{-gamma t/2} on the momentum row the determinant is e^{-gamma t}
        let (g, t) = (0.4, 2.0);
        let c = heisenberg_exp_mass(1.0, 1.0, g, t).unwrap();
        let shrink = (-g * t).exp();
        let decaying_det = c.c_qq * c.c_pp * shrink - c.c_qp * c.c_pq * shrink;
        assert!((decaying_det - (-g * t).exp()).abs() < 1e-12);
    }

    #[test]
    fn overdamped_is_rejected() {
        assert!(matches!(
            heisenberg_exp_mass(1.0, 1.0, 2.0, 1.0),
            Err(Error::Overdamped { .. })
        ));
        assert!(heisenberg_exp_mass(1.0, 1.0, 2.5, 1.0).is_err());
    }

    #[test]
    fn timemap_with_unit_mass_is_the_star_evolution() {
        let basis = QuadraticBasis::new(20, 1.0, 1.0);
        let m = MassSpec::constant(1.0).unwrap();
        let evolver = QuadraticStarEvolver {
            reparam: ReparamResult::new(m.clone(), FrequencySpec::constant(1.0).unwrap()),
            basis,
            tol: 1e-11,
        };
        let psi0 = coherent_state(C64::new(0.5, 0.2), 20).unwrap();
        let a = evolve_via_timemap(&psi0, &m, &evolver, 1.3).unwrap();
        let b = evolver.evolve(&psi0, 1.3).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-14);
        let same = evolve_via_timemap(&psi0, &m, &evolver, 0.0).unwrap();
        assert_eq!(same, psi0);
    }
}
