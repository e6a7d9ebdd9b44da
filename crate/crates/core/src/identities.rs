//! Numerical checks of the algebra behind the extension argument:
//!
//! * the roots-of-unity filter `Σ_j ω^{kj} = n·[n | k]`,
//! * the geometric identity `(S − ω^j σ I)⁻¹ (Sⁿ − σⁿ I) = Σ_k ω^{kj} σᵏ S^{n−k−1}`,
//! * `I − (σ S⁻¹)ⁿ = (Sⁿ − σⁿ I) S⁻ⁿ`,
//! * the sum of inverses `Σ_j (S − ω^j σ I)⁻¹ (I − (σ S⁻¹)ⁿ) S = n I`.
//!
//! Inverses are never formed explicitly; every `(·)⁻¹` is an LU solve
//! applied column by column.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Lu};
use crate::{oracle, random};

/// Relative deviation accepted by [`IdentityReport::pass`].
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// The primitive `n`-th root `ω = e^{2πi/n}` and its powers `ω⁰ … ω^{n−1}`.
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    n: usize,
    powers: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> Complex64 {
        root_power(self.n, 1)
    }

    pub fn powers(&self) -> &[Complex64] {
        &self.powers
    }

    /// `ω^m` for any exponent, reduced modulo `n` before evaluation.
    pub fn pow(&self, m: usize) -> Complex64 {
        self.powers[m % self.n]
    }
}

pub fn roots_of_unity(n: usize) -> Result<RootsOfUnity> {
    if n == 0 {
        return Err(Error::invalid("roots of unity need n >= 1"));
    }
    Ok(RootsOfUnity {
        n,
        powers: (0..n).map(|j| root_power(n, j)).collect(),
    })
}

/// `e^{2πi m/n}` evaluated at the reduced angle, exact at quarter turns.
fn root_power(n: usize, m: usize) -> Complex64 {
    let m = m % n;
    if (4 * m).is_multiple_of(n) {
        return match 4 * m / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * m as f64 / n as f64)
}

/// `Σ_{j=0}^{n−1} ω^{kj}`.
pub fn filter_sum(n: usize, k: usize) -> Result<Complex64> {
    let roots = roots_of_unity(n)?;
    Ok((0..n).map(|j| roots.pow((k % n) * j)).sum())
}

/// Deviation of a computed operator expression from its target.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub n: usize,
    pub sigma: Complex64,
    /// Largest entrywise modulus of computed minus target.
    pub deviation: f64,
    /// Largest entrywise modulus of the target.
    pub target_scale: f64,
}

impl IdentityReport {
    pub fn relative(&self) -> f64 {
        self.deviation / self.target_scale.max(1.0)
    }

    pub fn pass(&self) -> bool {
        self.deviation.is_finite() && self.relative() <= IDENTITY_TOLERANCE
    }
}

impl Serialize for IdentityReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("IdentityReport", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("sigma", &[self.sigma.re, self.sigma.im])?;
        st.serialize_field("deviation", &self.deviation)?;
        st.serialize_field("relative", &self.relative())?;
        st.serialize_field("pass", &self.pass())?;
        st.end()
    }
}

/// Filter sum compared with `n·[n | k]`.
pub fn filter_sum_check(n: usize, k: usize) -> Result<IdentityReport> {
    let sum = filter_sum(n, k)?;
    let target = if k.is_multiple_of(n) { n as f64 } else { 0.0 };
    Ok(IdentityReport {
        n,
        sigma: Complex64::new(0.0, 0.0),
        deviation: (sum - target).norm(),
        target_scale: target,
    })
}

fn shifted_lu(s: &ComplexMatrix, shift: Complex64, index: usize) -> Result<Lu> {
    s.shifted(shift).lu().map_err(|err| match err {
        Error::Singular(info) => Error::SingularShift { index, info },
        other => other,
    })
}

fn report(n: usize, sigma: Complex64, computed: &ComplexMatrix, target: &ComplexMatrix) -> Result<IdentityReport> {
    Ok(IdentityReport {
        n,
        sigma,
        deviation: computed.max_abs_diff(target)?,
        target_scale: target.max_abs(),
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("identity checks need n >= 1"));
    }
    Ok(())
}

/// `(S − ω^j σ I)⁻¹ (Sⁿ − σⁿ I)` against `Σ_k ω^{kj} σᵏ S^{n−k−1}`.
pub fn geometric_identity_check(s: &ComplexMatrix, sigma: Complex64, j: usize, n: usize) -> Result<IdentityReport> {
    check_n(n)?;
    let roots = roots_of_unity(n)?;
    let dim = s.dim();
    let lu = shifted_lu(s, roots.pow(j) * sigma, j % n)?;

    let mut powers = Vec::with_capacity(n + 1);
    powers.push(ComplexMatrix::identity(dim));
    for m in 1..=n {
        powers.push(powers[m - 1].matmul(s)?);
    }
    let computed = lu.solve_matrix(&powers[n].sub(&ComplexMatrix::scalar(dim, sigma.powu(n as u32)))?)?;

    let mut target = ComplexMatrix::zeros(dim);
    let mut sigma_k = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let coeff = roots.pow(k * (j % n)) * sigma_k;
        target = target.add(&powers[n - k - 1].scale(coeff))?;
        sigma_k *= sigma;
    }
    report(n, sigma, &computed, &target)
}

/// `(σ S⁻¹)ⁿ` by `n` repeated solves starting from the identity.
fn scaled_inverse_power(lu: &Lu, sigma: Complex64, n: usize) -> Result<ComplexMatrix> {
    let mut x = ComplexMatrix::identity(lu.dim());
    for _ in 0..n {
        x = lu.solve_matrix(&x)?.scale(sigma);
    }
    Ok(x)
}

/// `I − (σ S⁻¹)ⁿ` against `(Sⁿ − σⁿ I) S⁻ⁿ`, both evaluated as written.
pub fn eq_isn_check(s: &ComplexMatrix, sigma: Complex64, n: usize) -> Result<IdentityReport> {
    check_n(n)?;
    let dim = s.dim();
    let lu = s.lu()?;
    let eye = ComplexMatrix::identity(dim);
    let lhs = eye.sub(&scaled_inverse_power(&lu, sigma, n)?)?;

    let inverse_power = scaled_inverse_power(&lu, Complex64::new(1.0, 0.0), n)?;
    let rhs = s
        .pow(n)
        .sub(&ComplexMatrix::scalar(dim, sigma.powu(n as u32)))?
        .matmul(&inverse_power)?;
    report(n, sigma, &rhs, &lhs)
}

/// `Σ_{j=0}^{n−1} (S − ω^j σ I)⁻¹ (I − (σ S⁻¹)ⁿ) S` against `n I`. The `n`
/// terms are evaluated in parallel and summed in index order.
pub fn sum_inverses_check(s: &ComplexMatrix, sigma: Complex64, n: usize) -> Result<IdentityReport> {
    check_n(n)?;
    let dim = s.dim();
    let roots = roots_of_unity(n)?;
    let lu = s.lu()?;
    let middle = ComplexMatrix::identity(dim)
        .sub(&scaled_inverse_power(&lu, sigma, n)?)?
        .matmul(s)?;

    let terms = (0..n)
        .into_par_iter()
        .map(|j| shifted_lu(s, roots.pow(j) * sigma, j)?.solve_matrix(&middle))
        .collect::<Result<Vec<_>>>()?;
    let mut total = ComplexMatrix::zeros(dim);
    for term in &terms {
        total = total.add(term)?;
    }
    let target = ComplexMatrix::scalar(dim, Complex64::new(n as f64, 0.0));
    report(n, sigma, &total, &target)
}

/// `σ` uniform in the disk of radius `0.5 · min |μ|` over the oracle
/// eigenvalues `μ` of `s`, so every `S − ω^j σ I` is invertible.
pub fn sample_safe_sigma<R: Rng + ?Sized>(rng: &mut R, s: &ComplexMatrix) -> Result<Complex64> {
    let spectrum = oracle::reference_spectrum(s)?;
    let smallest = spectrum
        .eigenvalues
        .iter()
        .map(|mu| mu.norm())
        .fold(f64::INFINITY, f64::min);
    Ok(random::scalar_in_disk(rng, 0.5 * smallest))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    FilterSum,
    Geometric,
    EqIsn,
    SumInverses,
}

/// Settings for a batch of seeded identity checks.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    /// Fixes `n` for every case instead of drawing it from `2..=12`.
    pub n: Option<usize>,
    /// Uses this operator as `S` instead of a generated one.
    pub operator: Option<ComplexMatrix>,
    /// Sets `σ` to an oracle eigenvalue of `S`, making the `j = 0` shift singular.
    pub force_singular: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            cases: 100,
            n: None,
            operator: None,
            force_singular: false,
        }
    }
}

#[derive(Debug)]
pub struct SuiteEntry {
    pub case: usize,
    pub check: CheckKind,
    pub outcome: Result<IdentityReport>,
}

impl SuiteEntry {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(r) if r.pass())
    }
}

/// One instance of the suite: the operator, shift and exponents used.
#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub s: ComplexMatrix,
    pub sigma: Complex64,
    pub n: usize,
    pub j: usize,
    pub k: usize,
}

/// Draws case `index` of the suite; independent of every other case.
pub fn suite_case(config: &SuiteConfig, index: usize) -> Result<SuiteCase> {
    let mut rng = random::rng(
        config
            .seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(index as u64),
    );
    let dim = rng.random_range(2..=8);
    let n = match config.n {
        Some(n) => n,
        None => rng.random_range(2..=12),
    };
    check_n(n)?;
    let s = match &config.operator {
        Some(op) => op.clone(),
        None => random::identity_operator(&mut rng, dim),
    };
    let sigma = if config.force_singular {
        oracle::reference_spectrum(&s)?.eigenvalues[0]
    } else {
        sample_safe_sigma(&mut rng, &s)?
    };
    let j = rng.random_range(0..n);
    let k = rng.random_range(0..=3 * n);
    Ok(SuiteCase { s, sigma, n, j, k })
}

/// Runs the four checks on each of `config.cases` seeded instances.
pub fn run_suite(config: &SuiteConfig) -> Vec<SuiteEntry> {
    let per_case: Vec<Vec<SuiteEntry>> = (0..config.cases)
        .into_par_iter()
        .map(|case| match suite_case(config, case) {
            Ok(c) => vec![
                SuiteEntry {
                    case,
                    check: CheckKind::FilterSum,
                    outcome: filter_sum_check(c.n, c.k),
                },
                SuiteEntry {
                    case,
                    check: CheckKind::Geometric,
                    outcome: geometric_identity_check(&c.s, c.sigma, c.j, c.n),
                },
                SuiteEntry {
                    case,
                    check: CheckKind::EqIsn,
                    outcome: eq_isn_check(&c.s, c.sigma, c.n),
                },
                SuiteEntry {
                    case,
                    check: CheckKind::SumInverses,
                    outcome: sum_inverses_check(&c.s, c.sigma, c.n),
                },
            ],
            Err(err) => vec![SuiteEntry {
                case,
                check: CheckKind::SumInverses,
                outcome: Err(err),
            }],
        })
        .collect();
    per_case.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_examples() {
        assert_eq!(roots_of_unity(1).unwrap().powers(), &[c(1.0, 0.0)]);
        assert_eq!(roots_of_unity(2).unwrap().powers(), &[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(
            roots_of_unity(4).unwrap().powers(),
            &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
        );
        assert!(roots_of_unity(0).is_err());
    }

    #[test]
    fn roots_are_primitive() {
        for n in 1..=40 {
            let roots = roots_of_unity(n).unwrap();
            for (j, w) in roots.powers().iter().enumerate() {
                assert!((w.norm() - 1.0).abs() <= 1e-14);
                if j > 0 {
                    assert!((w - 1.0).norm() > 1e-3);
                }
            }
            assert!((roots.omega().powu(n as u32) - 1.0).norm() <= 1e-12);
        }
    }

    #[test]
    fn filter_sum_examples() {
        assert!(filter_sum(4, 2).unwrap().norm() <= 1e-12 * 4.0);
        assert_eq!(filter_sum(4, 0).unwrap(), c(4.0, 0.0));
        assert!((filter_sum(3, 6).unwrap() - 3.0).norm() <= 1e-12 * 3.0);
        assert!(filter_sum(0, 1).is_err());
    }

    #[test]
    fn geometric_examples() {
        let r = geometric_identity_check(&ComplexMatrix::identity(2), c(0.0, 0.0), 1, 3).unwrap();
        assert_eq!(r.deviation, 0.0);

        let s = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
        let r = geometric_identity_check(&s, c(1.0, 0.0), 0, 2).unwrap();
        assert!(r.deviation <= 1e-12);
        assert_eq!(r.target_scale, 4.0);
    }

    #[test]
    fn geometric_singular_shift_names_index() {
        let s = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
        // ω² σ = −(−2) = 2 for n = 4.
        let err = geometric_identity_check(&s, c(-2.0, 0.0), 2, 4).unwrap_err();
        assert!(matches!(err, Error::SingularShift { index: 2, .. }), "{err:?}");
    }

    #[test]
    fn eq_isn_examples() {
        let mut rng = random::rng(2);
        let s = random::identity_operator(&mut rng, 4);
        let r = eq_isn_check(&s, c(0.0, 0.0), 5).unwrap();
        assert!(r.deviation <= 1e-12);
        let r = eq_isn_check(&ComplexMatrix::identity(3), c(0.0, 0.0), 5).unwrap();
        assert_eq!(r.deviation, 0.0);

        let r = eq_isn_check(&ComplexMatrix::identity(3), c(2.0, 0.0), 2).unwrap();
        assert_eq!(r.deviation, 0.0);
        assert_eq!(r.target_scale, 3.0);

        assert!(eq_isn_check(&ComplexMatrix::zeros(2), c(1.0, 0.0), 2)
            .unwrap_err()
            .is_singular());
    }

    #[test]
    fn sum_inverses_examples() {
        let mut rng = random::rng(9);
        let s = random::identity_operator(&mut rng, 3);
        let r = sum_inverses_check(&s, c(0.0, 0.0), 3).unwrap();
        assert!(r.deviation <= 1e-12);

        let diag = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 5.0]).unwrap();
        let r = sum_inverses_check(&diag, c(1.0, 0.0), 4).unwrap();
        assert!(r.relative() <= 1e-10);
    }

    /// Scalar form of the sum-of-inverses identity on each diagonal entry of
    /// `diag(2, 5)`, summed directly from `cos`/`sin` without the library.
    #[test]
    fn sum_inverses_scalar_oracle() {
        for s in [2.0f64, 5.0] {
            let n = 4;
            let total: Complex64 = (0..n)
                .map(|j| {
                    let angle = TAU * j as f64 / n as f64;
                    let w = c(angle.cos(), angle.sin());
                    (1.0 - s.powi(-4)) * s / (c(s, 0.0) - w)
                })
                .sum();
            assert!((total - 4.0).norm() <= 1e-12);
        }
    }

    #[test]
    fn sum_inverses_singular_names_index() {
        let diag = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 5.0]).unwrap();
        // ω σ = i·(−2i) = 2 for n = 4.
        let err = sum_inverses_check(&diag, c(0.0, -2.0), 4).unwrap_err();
        assert!(matches!(err, Error::SingularShift { index: 1, .. }), "{err:?}");
        let err = sum_inverses_check(&ComplexMatrix::zeros(2), c(0.0, 0.0), 2).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn report_json_shape() {
        let r = IdentityReport {
            n: 3,
            sigma: c(0.5, -0.25),
            deviation: 2e-9,
            target_scale: 0.5,
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"n": 3, "sigma": [0.5, -0.25], "deviation": 2e-9, "relative": 2e-9, "pass": true})
        );
    }
}
