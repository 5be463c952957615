//! Kerr states `|beta>_xi = e^{-i xi n^2} |beta>`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_state, default_truncation, ln_factorials, poisson_pmf, FockOperator, FockState,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrStateParams {
    pub beta: C64,
    /// Kerr phase `xi = chi t`.
    pub xi: f64,
}

impl KerrStateParams {
    pub fn new(beta: C64, xi: f64) -> Self {
        Self { beta, xi }
    }

    /// Truncation with Poisson tail below 1e-12.
    pub fn default_truncation(&self) -> usize {
        default_truncation(self.beta.norm())
    }
}

/// `e^{-i xi n^2}` reduced modulo `2 pi` before taking the exponential.
pub(crate) fn kerr_phase(xi: f64, n: usize) -> C64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let nf = n as f64;
    C64::from_polar(1.0, -((xi * nf % two_pi) * nf % two_pi))
}

/// Amplitudes `e^{-|beta|^2/2} beta^n e^{-i xi n^2} / sqrt(n!)`, renormalized.
pub fn kerr_state(p: KerrStateParams, n_trunc: usize) -> Result<FockState> {
    let coherent = coherent_state(p.beta, n_trunc)?;
    let tail = coherent.truncation_tail();
    let mut amps = coherent.into_amplitudes();
    for (n, c) in amps.iter_mut().enumerate() {
        *c *= kerr_phase(p.xi, n);
    }
    let state = FockState::normalize_from(amps)?;
    debug_assert!(state.truncation_tail() <= tail + 1e-15);
    Ok(state)
}

/// `B = e^{-i xi n^2} a e^{i xi n^2}`, with `<n|B|n+1> = sqrt(n+1) e^{i xi (2n+1)}`.
pub fn deformed_ladder_b(xi: f64, n_trunc: usize) -> FockOperator {
    let a = FockOperator::annihilation(n_trunc);
    let phases = FockOperator::diagonal(n_trunc, |n| {
        let k = n + 1;
        // f(n+1) = e^{i xi (2(n+1) - 1)}
        C64::from_polar(1.0, xi * (2 * k - 1) as f64)
    });
    &phases * &a
}

/// `D_B(beta) = exp(beta B+ - conj(beta) B)`; maps `|0>` to `|beta>_xi`.
pub fn deformed_displacement(beta: C64, xi: f64, n_trunc: usize) -> FockOperator {
    let b = deformed_ladder_b(xi, n_trunc);
    (&b.dagger().scale(beta) - &b.scale(beta.conj())).exp()
}

/// Excitation probabilities `P(n) = e^{-|beta|^2} |beta|^{2n} / n!` over the
/// default truncation window; independent of `xi`.
pub fn excitation_distribution(p: KerrStateParams) -> Vec<f64> {
    let n = p.default_truncation();
    let mean = p.beta.norm_sqr();
    let lf = ln_factorials(n);
    (0..n).map(|k| poisson_pmf(mean, k, lf[k])).collect()
}

/// `(Delta q)_xi / (Delta q)_0` and `(Delta p)_xi / (Delta p)_0` for
/// `x = (a + a+)/2`, `p = (a - a+)/(2i)` in closed form, with `beta = |beta| e^{i phi}`.
pub fn quadrature_variances(p: KerrStateParams) -> (f64, f64) {
    let (r2, phi, xi) = (p.beta.norm_sqr(), p.beta.arg(), p.xi);
    let (second, first) = variance_terms(r2, phi, xi);
    let q = 2.0 * r2 + 1.0 + second
        - 4.0 * r2 * first * (phi - xi - r2 * (2.0 * xi).sin()).cos().powi(2);
    let mom = 2.0 * r2 + 1.0
        - second
        - 4.0 * r2 * first * (phi - xi - r2 * (2.0 * xi).sin()).sin().powi(2);
    (q.max(0.0).sqrt(), mom.max(0.0).sqrt())
}

/// Variant of [`quadrature_variances`] whose momentum ratio omits `xi` from
/// the phase of the squared-mean term, `sin^2(phi - |beta|^2 sin 2xi)`.
/// Kept for comparison; it disagrees with the moments of `|beta>_xi`.
pub fn unshifted_quadrature_variances(p: KerrStateParams) -> (f64, f64) {
    let (r2, phi, xi) = (p.beta.norm_sqr(), p.beta.arg(), p.xi);
    let (second, first) = variance_terms(r2, phi, xi);
    let (q, _) = quadrature_variances(p);
    let mom =
        2.0 * r2 + 1.0 - second - 4.0 * r2 * first * (phi - r2 * (2.0 * xi).sin()).sin().powi(2);
    (q, mom.max(0.0).sqrt())
}

// (2|b|^2 e^{-2|b|^2 sin^2 2xi} cos(2phi - 4xi - |b|^2 sin 4xi), e^{-4|b|^2 sin^2 xi})
fn variance_terms(r2: f64, phi: f64, xi: f64) -> (f64, f64) {
    let second = 2.0
        * r2
        * (-2.0 * r2 * (2.0 * xi).sin().powi(2)).exp()
        * (2.0 * phi - 4.0 * xi - r2 * (4.0 * xi).sin()).cos();
    let first = (-4.0 * r2 * xi.sin().powi(2)).exp();
    (second, first)
}

/// Quadrature variance ratios computed from the moments `<a>`, `<a^2>`,
/// `<a+ a>` of a state (coherent-state baseline 1/4).
pub fn quadrature_ratios_from_state(psi: &FockState) -> (f64, f64) {
    let c = psi.amplitudes();
    let n = c.len();
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut num = 0.0;
    for k in 0..n {
        num += k as f64 * c[k].norm_sqr();
        if k + 1 < n {
            a1 += c[k].conj() * c[k + 1] * ((k + 1) as f64).sqrt();
        }
        if k + 2 < n {
            a2 += c[k].conj() * c[k + 2] * (((k + 1) * (k + 2)) as f64).sqrt();
        }
    }
    // 4 Var x = 2 Re<a^2> + 2<n> + 1 - 4 (Re<a>)^2, 4 Var p = -2 Re<a^2> + 2<n> + 1 - 4 (Im<a>)^2
    let var_q = 2.0 * a2.re + 2.0 * num + 1.0 - 4.0 * a1.re * a1.re;
    let var_p = -2.0 * a2.re + 2.0 * num + 1.0 - 4.0 * a1.im * a1.im;
    (var_q.max(0.0).sqrt(), var_p.max(0.0).sqrt())
}

/// Mandel parameter and second-order coherence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mandel {
    pub q: f64,
    pub g2: f64,
}

/// `Q = (<n^2> - <n>^2)/<n> - 1` and `g2(0) = 1 + Q/<n>` from number moments.
pub fn mandel_q_of_state(psi: &FockState) -> Result<Mandel> {
    let m1 = psi.diagonal_moment(|n| n);
    let m2 = psi.diagonal_moment(|n| n * n);
    if m1 <= 1e-300 {
        return Err(Error::VacuumMandel);
    }
    let q = (m2 - m1 * m1) / m1 - 1.0;
    Ok(Mandel {
        q,
        g2: 1.0 + q / m1,
    })
}

/// Mandel parameter of `|beta>_xi` at the default truncation.
pub fn mandel_q(p: KerrStateParams) -> Result<Mandel> {
    if p.beta.norm() == 0.0 {
        return Err(Error::VacuumMandel);
    }
    mandel_q_of_state(&kerr_state(p, p.default_truncation())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_xi_is_coherent() {
        let beta = c(0.8, -0.3);
        let k = kerr_state(KerrStateParams::new(beta, 0.0), 40).unwrap();
        let coh = coherent_state(beta, 40).unwrap();
        assert!(k.distance(&coh).unwrap() < 1e-15);
    }

    #[test]
    fn vacuum_for_any_xi() {
        let k = kerr_state(KerrStateParams::new(c(0.0, 0.0), 1.234), 10).unwrap();
        assert_eq!(k, FockState::vacuum(10).unwrap());
    }

    #[test]
    fn full_phase_wrap() {
        let beta = c(1.5, 0.5);
        let a = kerr_state(KerrStateParams::new(beta, 2.0 * PI), 50).unwrap();
        let b = coherent_state(beta, 50).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn b_reduces_to_a() {
        let b = deformed_ladder_b(0.0, 12);
        assert_eq!(b, FockOperator::annihilation(12));
    }

    #[test]
    fn b_is_the_rotated_annihilator() {
        let (xi, n) = (0.37, 15);
        let u = FockOperator::diagonal(n, |k| kerr_phase(xi, k));
        let rotated = &(&u * &FockOperator::annihilation(n)) * &u.dagger();
        assert!(rotated.block_deviation(&deformed_ladder_b(xi, n), n) < 1e-13);
    }

    #[test]
    fn b_eigenrelation() {
        let p = KerrStateParams::new(c(1.1, 0.4), 0.9);
        let k = kerr_state(p, 40).unwrap();
        let bk = deformed_ladder_b(p.xi, 40)
            .apply(&k)
            .unwrap()
            .without_top_level();
        let expected = k.scaled(p.beta).without_top_level();
        assert!(bk.distance(&expected).unwrap() < 1e-9);
    }

    #[test]
    fn b_commutator_on_interior() {
        let n = 20;
        let b = deformed_ladder_b(1.3, n);
        let comm = b.commutator(&b.dagger());
        assert!(comm.block_deviation(&FockOperator::identity(n), n - 1) < 1e-12);
    }

    #[test]
    fn deformed_displacement_builds_the_kerr_state() {
        let p = KerrStateParams::new(c(0.9, -0.6), 0.45);
        let n = 60;
        let direct = kerr_state(p, n).unwrap();
        let built = deformed_displacement(p.beta, p.xi, n)
            .apply(&FockState::vacuum(n).unwrap())
            .unwrap();
        assert!(built.distance(&direct).unwrap() < 1e-9);
    }

    #[test]
    fn kerr_hamiltonian_is_n_squared() {
        let n = 15;
        let a = FockOperator::annihilation(n);
        let ad = a.dagger();
        let lhs = &(&ad * &a) + &(&(&ad * &ad) * &(&a * &a));
        let num = FockOperator::number(n);
        // a+ a+ a a is exact on the basis; a+ a is the exact number operator
        assert!(lhs.block_deviation(&(&num * &num), n) < 1e-12);
    }

    #[test]
    fn distribution_examples() {
        let d = excitation_distribution(KerrStateParams::new(c(0.0, 0.0), 0.3));
        assert_eq!(d[0], 1.0);
        let d = excitation_distribution(KerrStateParams::new(c(3.0, 0.0), 0.3));
        let max = d.iter().cloned().fold(0.0, f64::max);
        assert!((d[8] - max).abs() < 1e-15 && (d[9] - max).abs() < 1e-15);
        assert!(d
            .iter()
            .enumerate()
            .all(|(k, v)| k == 8 || k == 9 || *v < max - 1e-6));
        let sum: f64 = excitation_distribution(KerrStateParams::new(c(1.2, 1.1), 0.0))
            .iter()
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variances_at_zero_xi() {
        for beta in [c(0.5, 0.0), c(-1.2, 0.7), c(0.0, 2.0)] {
            let (q, p) = quadrature_variances(KerrStateParams::new(beta, 0.0));
            assert!((q - 1.0).abs() < 1e-12 && (p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_moments() {
        let p = KerrStateParams::new(c(0.5, 0.0), 0.8);
        let psi = kerr_state(p, 40).unwrap();
        let (fq, fp) = quadrature_ratios_from_state(&psi);
        let (q, mom) = quadrature_variances(p);
        assert!((q - fq).abs() < 1e-10);
        assert!((mom - fp).abs() < 1e-10);
    }

    #[test]
    fn unshifted_momentum_ratio_disagrees_with_moments() {
        let p = KerrStateParams::new(c(0.5, 0.0), 0.8);
        let (_, fp) = quadrature_ratios_from_state(&kerr_state(p, 40).unwrap());
        let (_, unshifted) = unshifted_quadrature_variances(p);
        assert!((unshifted - fp).abs() > 1e-3);
    }

    #[test]
    fn position_is_squeezed_at_half_amplitude() {
        let min_q = (1..1000)
            .map(|k| {
                quadrature_variances(KerrStateParams::new(c(0.5, 0.0), PI * k as f64 / 1000.0)).0
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min_q < 1.0);
    }

    #[test]
    fn mandel_examples() {
        let m = mandel_q(KerrStateParams::new(c(1.0, 0.0), 0.7)).unwrap();
        assert!(m.q.abs() < 1e-9);
        assert!((m.g2 - 1.0).abs() < 1e-9);
        assert_eq!(
            mandel_q(KerrStateParams::new(c(0.0, 0.0), 0.7)),
            Err(Error::VacuumMandel)
        );
        let m = mandel_q_of_state(&FockState::number(4, 10).unwrap()).unwrap();
        assert!((m.q + 1.0).abs() < 1e-15);
    }
}
