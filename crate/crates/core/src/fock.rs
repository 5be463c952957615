//! Truncated Fock-space states and operators.
//!
//! Every state in the crate is a dense amplitude vector over the number basis
//! `|0>, ..., |N-1>`. Operators are dense `N x N` complex matrices; at the
//! truncations used here (a few hundred levels at most) this keeps the kernels
//! simple.

use std::ops::{Add, Mul, Sub};

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Tail mass allowed beyond the truncation when building coherent states.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-12;

/// Tolerance on `| ||psi|| - 1 |` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-9;

/// `ln(k!)` for `k = 0..n`, accumulated as a running sum of logarithms.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Default truncation for a coherent amplitude of modulus `r`: mean plus ten
/// standard deviations of the Poisson distribution, plus ten levels.
pub fn default_truncation(r: f64) -> usize {
    let mean = r * r;
    (mean + 10.0 * (mean + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Poisson probability `e^-mean mean^n / n!`, evaluated in log space.
pub fn poisson_pmf(mean: f64, n: usize, ln_fact_n: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_fact_n).exp()
}

/// `sum_{n >= n_trunc} Poisson(mean)(n)`, summed directly from the cut upwards.
pub fn poisson_tail(mean: f64, n_trunc: usize) -> f64 {
    if mean == 0.0 {
        return if n_trunc == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = mean.ln();
    let mut ln_fact = ln_factorials(n_trunc + 1)[n_trunc];
    let mut sum = 0.0;
    let mut n = n_trunc;
    loop {
        let term = (-mean + n as f64 * ln_mean - ln_fact).exp();
        sum += term;
        // terms decrease geometrically once n exceeds the mean
        if n as f64 > mean + 1.0 && (term == 0.0 || term <= 1e-17 * sum) {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    sum
}

/// Unnormalized coherent amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n < n_trunc`.
///
/// No tail check and no renormalization: this is the exact projection of the
/// coherent state onto the truncated space, used for overlaps.
pub fn coherent_amplitudes(alpha: C64, n_trunc: usize) -> Array1<C64> {
    let r = alpha.norm();
    let mut out = Array1::<C64>::zeros(n_trunc);
    if n_trunc == 0 {
        return out;
    }
    if r == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let phase = alpha.arg();
    let ln_r = r.ln();
    let ln_fact = ln_factorials(n_trunc);
    for n in 0..n_trunc {
        let ln_mag = -0.5 * r * r + n as f64 * ln_r - 0.5 * ln_fact[n];
        out[n] = C64::from_polar(ln_mag.exp(), n as f64 * phase);
    }
    out
}

/// A pure state on the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    amplitudes: Array1<C64>,
    normalized: bool,
    truncation_tail: f64,
}

impl FockState {
    /// Wraps an amplitude vector that must satisfy `||psi|| <= 1 + 1e-9`.
    pub fn from_amplitudes(amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter {
                name: "n_trunc",
                reason: "must be at least 1".into(),
            });
        }
        let norm = l2(&amplitudes);
        if norm > 1.0 + NORM_TOL {
            return Err(Error::NormTooLarge { norm });
        }
        Ok(Self::unchecked(amplitudes))
    }

    /// Rescales an arbitrary non-zero vector to unit norm. The discarded
    /// deviation `1 - ||v||^2` is recorded as the truncation tail.
    pub fn normalize_from(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = l2(&amplitudes);
        if amplitudes.is_empty() || norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: "cannot normalize a zero vector".into(),
            });
        }
        Ok(Self {
            amplitudes: amplitudes.mapv(|z| z / norm),
            normalized: true,
            truncation_tail: (1.0 - norm * norm).max(0.0),
        })
    }

    /// General vector without the norm bound, as produced by applying a
    /// non-unitary operator.
    pub(crate) fn unchecked(amplitudes: Array1<C64>) -> Self {
        let normalized = (l2(&amplitudes) - 1.0).abs() <= NORM_TOL;
        Self {
            amplitudes,
            normalized,
            truncation_tail: 0.0,
        }
    }

    pub fn vacuum(n_trunc: usize) -> Result<Self> {
        Self::number(0, n_trunc)
    }

    /// Number state `|n>`.
    pub fn number(n: usize, n_trunc: usize) -> Result<Self> {
        if n >= n_trunc {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("level {n} not below truncation {n_trunc}"),
            });
        }
        let mut amps = Array1::<C64>::zeros(n_trunc);
        amps[n] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn n_trunc(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2(&self.amplitudes)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Probability mass removed by truncation before renormalization.
    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockState) -> Result<C64> {
        check_dim(self.n_trunc(), other.n_trunc())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<n|psi>|^2` for every level.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Population of the highest basis level.
    pub fn top_population(&self) -> f64 {
        self.amplitudes[self.n_trunc() - 1].norm_sqr()
    }

    /// Copy with the highest basis level zeroed.
    pub fn without_top_level(&self) -> FockState {
        let mut amps = self.amplitudes.clone();
        let last = amps.len() - 1;
        amps[last] = C64::new(0.0, 0.0);
        Self::unchecked(amps)
    }

    pub fn scaled(&self, factor: C64) -> FockState {
        Self::unchecked(self.amplitudes.mapv(|z| z * factor))
    }

    /// `||self - other||`
    pub fn distance(&self, other: &FockState) -> Result<f64> {
        check_dim(self.n_trunc(), other.n_trunc())?;
        Ok(l2(&(&self.amplitudes - &other.amplitudes)))
    }

    /// Expectation of a diagonal observable `f(n)`.
    pub fn diagonal_moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, z)| z.norm_sqr() * f(n as f64))
            .sum()
    }
}

/// Coherent state `|alpha>` on `n_trunc` levels, renormalized after truncation.
///
/// Fails when the Poisson tail beyond the truncation exceeds 1e-12.
pub fn coherent_state(alpha: C64, n_trunc: usize) -> Result<FockState> {
    if n_trunc == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trunc",
            reason: "must be at least 1".into(),
        });
    }
    let tail = poisson_tail(alpha.norm_sqr(), n_trunc);
    if tail >= COHERENT_TAIL_LIMIT {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            tail,
            limit: COHERENT_TAIL_LIMIT,
        });
    }
    FockState::normalize_from(coherent_amplitudes(alpha, n_trunc))
}

/// Dense operator on the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: Array2<C64>,
}

impl FockOperator {
    pub fn from_matrix(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_trunc: usize) -> Self {
        Self {
            matrix: Array2::eye(n_trunc),
        }
    }

    pub fn zeros(n_trunc: usize) -> Self {
        Self {
            matrix: Array2::zeros((n_trunc, n_trunc)),
        }
    }

    /// `a`, with `<n|a|n+1> = sqrt(n+1)`.
    pub fn annihilation(n_trunc: usize) -> Self {
        let mut m = Array2::<C64>::zeros((n_trunc, n_trunc));
        for n in 0..n_trunc.saturating_sub(1) {
            m[[n, n + 1]] = C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        Self { matrix: m }
    }

    pub fn creation(n_trunc: usize) -> Self {
        Self::annihilation(n_trunc).dagger()
    }

    pub fn number(n_trunc: usize) -> Self {
        Self::diagonal(n_trunc, |n| C64::new(n as f64, 0.0))
    }

    /// Diagonal operator `f(n)`.
    pub fn diagonal(n_trunc: usize, f: impl Fn(usize) -> C64) -> Self {
        let mut m = Array2::<C64>::zeros((n_trunc, n_trunc));
        for n in 0..n_trunc {
            m[[n, n]] = f(n);
        }
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: linalg::dagger(&self.matrix),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            matrix: linalg::commutator(&self.matrix, &other.matrix),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            matrix: self.matrix.mapv(|z| z * factor),
        }
    }

    pub fn exp(&self) -> Self {
        Self {
            matrix: linalg::expm(&self.matrix),
        }
    }

    /// Matrix-vector product. The result is a general vector: applying a
    /// non-unitary operator does not preserve the norm.
    pub fn apply(&self, psi: &FockState) -> Result<FockState> {
        check_dim(self.dim(), psi.n_trunc())?;
        Ok(FockState::unchecked(self.matrix.dot(psi.amplitudes())))
    }

    /// `<psi|Op|psi>`
    pub fn expectation(&self, psi: &FockState) -> Result<C64> {
        let image = self.apply(psi)?;
        psi.inner(&image)
    }

    /// Largest entrywise deviation from `other` on the leading `k x k` block.
    pub fn block_deviation(&self, other: &Self, k: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.matrix[[i, j]] - other.matrix[[i, j]]).norm());
            }
        }
        worst
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: Self) -> FockOperator {
        FockOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: Self) -> FockOperator {
        FockOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: Self) -> FockOperator {
        FockOperator {
            matrix: self.matrix.dot(&rhs.matrix),
        }
    }
}

pub(crate) fn l2(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_amplitude_is_vacuum() {
        let psi = coherent_state(c(0.0, 0.0), 8).unwrap();
        assert_eq!(psi, FockState::vacuum(8).unwrap().clone());
        assert_eq!(psi.amplitudes()[0], c(1.0, 0.0));
    }

    #[test]
    fn coherent_mean_matches_poisson_mean() {
        // oracle: direct summation of n * Poisson(9)(n)
        let ln_f = ln_factorials(200);
        let oracle: f64 = (0..200)
            .map(|n| n as f64 * poisson_pmf(9.0, n, ln_f[n]))
            .sum();
        let psi = coherent_state(c(3.0, 0.0), 60).unwrap();
        let mean = FockOperator::number(60).expectation(&psi).unwrap();
        assert!((mean.re - oracle).abs() < 1e-9);
        assert!((mean.re - 9.0).abs() < 1e-9);
    }

    #[test]
    fn single_excitation_probability() {
        let psi = coherent_state(c(0.5, 0.0), 30).unwrap();
        let p1 = psi.probabilities()[1];
        assert!((p1 - (-0.25f64).exp() * 0.25).abs() < 1e-14);
        assert!((p1 - 0.19470).abs() < 1e-5);
    }

    #[test]
    fn coherent_norm_after_renormalization() {
        for &(re, im) in &[(0.3, 0.1), (2.0, -1.0), (-4.0, 2.5)] {
            let a = c(re, im);
            let psi = coherent_state(a, default_truncation(a.norm())).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert!(psi.is_normalized());
            assert!(psi.truncation_tail() < COHERENT_TAIL_LIMIT);
        }
    }

    #[test]
    fn rejects_short_truncation() {
        let err = coherent_state(c(3.0, 0.0), 12).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
    }

    #[test]
    fn large_levels_do_not_overflow() {
        // n > 170 would overflow a plain factorial
        let a = c(14.0, 0.0);
        let psi = coherent_state(a, default_truncation(14.0)).unwrap();
        assert!(psi
            .amplitudes()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite()));
        let mean = psi.diagonal_moment(|n| n);
        assert!((mean - 196.0).abs() < 1e-8);
    }

    #[test]
    fn identity_apply() {
        let psi = coherent_state(c(1.0, 0.5), 30).unwrap();
        let out = FockOperator::identity(30).apply(&psi).unwrap();
        assert_eq!(out.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn annihilation_eigenrelation_on_coherent_state() {
        let a = c(1.2, -0.7);
        let n = 50;
        let psi = coherent_state(a, n).unwrap();
        let lhs = FockOperator::annihilation(n).apply(&psi).unwrap();
        let rhs = psi.scaled(a).without_top_level();
        assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn number_operator_on_number_state() {
        let three = FockState::number(3, 10).unwrap();
        let out = FockOperator::number(10).apply(&three).unwrap();
        assert_eq!(out.amplitudes(), three.scaled(c(3.0, 0.0)).amplitudes());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let psi = FockState::vacuum(5).unwrap();
        let err = FockOperator::number(6).apply(&psi).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 6,
                found: 5
            }
        );
    }

    #[test]
    fn ladder_matrix_elements_are_exact_square_roots() {
        let a = FockOperator::annihilation(20);
        for n in 0..19 {
            assert_eq!(a.matrix()[[n, n + 1]].re, ((n + 1) as f64).sqrt());
        }
    }

    #[test]
    fn canonical_commutator_holds_off_the_top_level() {
        let n = 25;
        let a = FockOperator::annihilation(n);
        let comm = a.commutator(&a.dagger());
        let id = FockOperator::identity(n);
        assert!(comm.block_deviation(&id, n - 1) < 1e-14);
        // truncation artifact sits in the corner
        assert!((comm.matrix()[[n - 1, n - 1]].re - (1.0 - n as f64)).abs() < 1e-12);
    }

    #[test]
    fn number_commutators_have_standard_signs() {
        // [n, a] = -a, [n, a+] = +a+
        let n = 12;
        let a = FockOperator::annihilation(n);
        let num = FockOperator::number(n);
        assert!(
            num.commutator(&a)
                .block_deviation(&a.scale(c(-1.0, 0.0)), n)
                < 1e-14
        );
        assert!(num.commutator(&a.dagger()).block_deviation(&a.dagger(), n) < 1e-14);
    }

    #[test]
    fn coherent_moments() {
        let b = c(1.3, 0.4);
        let n = 60;
        let psi = coherent_state(b, n).unwrap();
        let num = FockOperator::number(n);
        let n1 = num.expectation(&psi).unwrap();
        let n2 = (&num * &num).expectation(&psi).unwrap();
        let r2 = b.norm_sqr();
        assert!((n1.re - r2).abs() < 1e-12);
        assert!((n2.re - (r2 * r2 + r2)).abs() < 1e-11);
        assert!(n1.im.abs() < 1e-10 && n2.im.abs() < 1e-10);
        let vac = FockState::vacuum(n).unwrap();
        assert_eq!(num.expectation(&vac).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn poisson_tail_matches_complement() {
        let mean = 4.0;
        let ln_f = ln_factorials(40);
        let head: f64 = (0..10).map(|n| poisson_pmf(mean, n, ln_f[n])).sum();
        assert!((poisson_tail(mean, 10) - (1.0 - head)).abs() < 1e-14);
    }
}
