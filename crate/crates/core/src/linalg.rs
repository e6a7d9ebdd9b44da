//! Dense complex vectors and matrices, the three supported vector norms,
//! LU solves with partial pivoting, and the operator bound `C` with its
//! coercivity consequence `‖Tv − λv‖ ≥ (|λ| − C)‖v‖`.
//!
//! Everything here is a pure function of its inputs. Matrices are stored
//! dense and row-major.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SingularInfo};

/// Relative pivot threshold below which a matrix is reported as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_finite(entries: &[Complex64]) -> Result<()> {
    match entries.iter().position(|z| !z.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Vector norm used to measure residuals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    One,
    #[default]
    Two,
    Inf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::One, NormKind::Two, NormKind::Inf];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::One => "one",
            NormKind::Two => "two",
            NormKind::Inf => "inf",
        }
    }

    /// Norm of a raw slice of entries.
    pub fn of(self, entries: &[Complex64]) -> f64 {
        match self {
            NormKind::One => entries.iter().map(|z| z.norm()).sum(),
            NormKind::Two => entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::Inf => entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one" | "1" | "l1" => Ok(NormKind::One),
            "two" | "2" | "l2" => Ok(NormKind::Two),
            "inf" | "infinity" | "max" => Ok(NormKind::Inf),
            other => Err(Error::invalid(format!(
                "unknown norm `{other}` (expected one, two or inf)"
            ))),
        }
    }
}

/// A vector of finite complex entries, length at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension);
        }
        check_finite(&entries)?;
        Ok(ComplexVector(entries))
    }

    /// Builds a vector from real parts only.
    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        ComplexVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexVector(vec![ZERO; dim.max(1)])
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        kind.of(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    /// `self / ‖self‖`; fails on the zero vector.
    pub fn normalized(&self, kind: NormKind) -> Result<Self> {
        let n = self.norm(kind);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        ComplexVector(self.0.iter().map(|z| z * alpha).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self − alpha · other`.
    pub fn sub_scaled(&self, alpha: Complex64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - alpha * b)
    }

    /// Hermitian inner product `Σ self_i · conj(other_i)`.
    pub fn dot(&self, other: &Self) -> Result<Complex64> {
        self.expect_len(other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.expect_len(other.len())?;
        Ok(ComplexVector(
            self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    fn expect_len(&self, found: usize) -> Result<()> {
        if self.len() != found {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

/// Square `dim × dim` complex matrix, row-major, finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from `dim²` row-major entries.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        check_finite(&data)?;
        Ok(ComplexMatrix { dim, data })
    }

    /// Builds a matrix from `dim²` real row-major entries.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut data = vec![ZERO; dim * dim];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            for (i, z) in col.iter().enumerate() {
                data[i * dim + j] = *z;
            }
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        ComplexMatrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, ONE)
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    /// `alpha · I`.
    pub fn scalar(dim: usize, alpha: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = alpha;
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let dim = diag.len();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        check_finite(diag)?;
        let mut m = Self::zeros(dim);
        for (i, z) in diag.iter().enumerate() {
            m.data[i * dim + i] = *z;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column(&self, col: usize) -> ComplexVector {
        ComplexVector((0..self.dim).map(|i| self.get(i, col)).collect())
    }

    pub fn columns(&self) -> Vec<ComplexVector> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix-vector product `T v`.
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        self.expect_dim(v.len())?;
        Ok(ComplexVector(self.apply_slice(v.as_slice())))
    }

    pub(crate) fn apply_slice(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.expect_dim(other.dim)?;
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                for (o, b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexMatrix { dim: d, data: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// `T − λ I`.
    pub fn shifted(&self, lambda: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] -= lambda;
        }
        m
    }

    /// Conjugate transpose `T*`.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        m
    }

    /// `Tⁿ` by repeated multiplication (`T⁰ = I`).
    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..n {
            acc = acc.matmul(self).expect("square matrices of equal dimension");
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.expect_dim(other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        self.expect_dim(b.len())?;
        self.lu()?.solve(b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.expect_dim(other.dim)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn expect_dim(&self, found: usize) -> Result<()> {
        if self.dim != found {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

/// LU factorization `P A = L U` with partial (row) pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    factors: Vec<Complex64>,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
}

impl Lu {
    /// Factors `a`. A pivot of modulus below `1e-14 · max |a_ij|` is
    /// reported as [`Error::Singular`] together with a near-null direction.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let d = a.dim;
        let threshold = SINGULAR_PIVOT_RATIO * a.max_abs();
        let mut f = a.data.clone();
        let mut perm: Vec<usize> = (0..d).collect();

        for k in 0..d {
            let (p, pivot) =
                (k..d)
                    .map(|i| (i, f[i * d + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold {
                let near_null = near_null_direction(&f, d, k);
                return Err(Error::Singular(Box::new(SingularInfo {
                    column: k,
                    pivot,
                    threshold,
                    near_null,
                })));
            }
            if p != k {
                for j in 0..d {
                    f.swap(k * d + j, p * d + j);
                }
                perm.swap(k, p);
            }
            let inv = ONE / f[k * d + k];
            for i in k + 1..d {
                let m = f[i * d + k] * inv;
                f[i * d + k] = m;
                if m == ZERO {
                    continue;
                }
                for j in k + 1..d {
                    let u = f[k * d + j];
                    f[i * d + j] -= m * u;
                }
            }
        }
        Ok(Lu {
            dim: d,
            factors: f,
            perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.len(),
            });
        }
        Ok(ComplexVector(self.solve_slice(b.as_slice())))
    }

    pub(crate) fn solve_slice(&self, b: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        let f = &self.factors;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..d {
            let s: Complex64 = (0..i).map(|j| f[i * d + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..d).rev() {
            let s: Complex64 = (i + 1..d).map(|j| f[i * d + j] * x[j]).sum();
            x[i] = (x[i] - s) / f[i * d + i];
        }
        x
    }

    /// Solves `A* x = b` with the same factors.
    pub fn solve_adjoint(&self, b: &ComplexVector) -> Result<ComplexVector> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.len(),
            });
        }
        let d = self.dim;
        let f = &self.factors;
        // A* = U* L* P, so solve U* y = b, L* w = y, then x = Pᵀ w.
        let mut w = b.as_slice().to_vec();
        for i in 0..d {
            let s: Complex64 = (0..i).map(|j| f[j * d + i].conj() * w[j]).sum();
            w[i] = (w[i] - s) / f[i * d + i].conj();
        }
        for i in (0..d).rev() {
            let s: Complex64 = (i + 1..d).map(|j| f[j * d + i].conj() * w[j]).sum();
            w[i] -= s;
        }
        let mut x = vec![ZERO; d];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        Ok(ComplexVector(x))
    }

    /// Applies `A⁻¹` to every column of `b`.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.dim,
            });
        }
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        let mut col = vec![ZERO; d];
        for j in 0..d {
            for i in 0..d {
                col[i] = b.data[i * d + j];
            }
            for (i, z) in self.solve_slice(&col).into_iter().enumerate() {
                out[i * d + j] = z;
            }
        }
        Ok(ComplexMatrix { dim: d, data: out })
    }
}

/// Null vector of the partially eliminated matrix when step `k` collapses:
/// `x_k = 1`, `x_j = 0` for `j > k`, and the leading block solved by back
/// substitution so the first `k` rows of `U x` vanish.
fn near_null_direction(f: &[Complex64], d: usize, k: usize) -> ComplexVector {
    let mut x = vec![ZERO; d];
    x[k] = ONE;
    for i in (0..k).rev() {
        let s: Complex64 = (i + 1..=k).map(|j| f[i * d + j] * x[j]).sum();
        x[i] = -s / f[i * d + i];
    }
    let v = ComplexVector(x);
    v.normalized(NormKind::Two).unwrap_or(v)
}

/// A constant `C ≥ 0` with `‖T v‖ ≤ C ‖v‖` for every `v`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorBound(f64);

impl OperatorBound {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::invalid(format!(
                "operator bound must be finite and nonnegative, got {value}"
            )));
        }
        Ok(OperatorBound(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Exact induced norm for `One` (max column sum) and `Inf` (max row sum);
/// Frobenius norm for `Two`, which dominates the induced 2-norm.
pub fn operator_bound(t: &ComplexMatrix, norm: NormKind) -> OperatorBound {
    let d = t.dim;
    let value = match norm {
        NormKind::One => (0..d)
            .map(|j| (0..d).map(|i| t.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Inf => (0..d)
            .map(|i| t.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Two => t.frobenius_norm(),
    };
    OperatorBound(value)
}

/// `T v − λ v`.
pub fn residual_vector(t: &ComplexMatrix, v: &ComplexVector, lambda: Complex64) -> Result<ComplexVector> {
    t.apply(v)?.sub_scaled(lambda, v)
}

/// `‖T v − λ v‖`.
pub fn residual(t: &ComplexMatrix, v: &ComplexVector, lambda: Complex64, norm: NormKind) -> Result<f64> {
    Ok(residual_vector(t, v, lambda)?.norm(norm))
}

/// `‖T v − λ v‖ / ‖v‖`; undefined for `v = 0`.
pub fn residual_ratio(t: &ComplexMatrix, v: &ComplexVector, lambda: Complex64, norm: NormKind) -> Result<f64> {
    let scale = v.norm(norm);
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(residual(t, v, lambda, norm)? / scale)
}

/// `‖T v − λ v‖ − (|λ| − C)‖v‖`, nonnegative up to rounding whenever `C`
/// bounds `T`.
pub fn coercivity_gap(
    t: &ComplexMatrix,
    v: &ComplexVector,
    lambda: Complex64,
    norm: NormKind,
    bound: OperatorBound,
) -> Result<f64> {
    let lhs = residual(t, v, lambda, norm)?;
    Ok(lhs - (lambda.norm() - bound.value()) * v.norm(norm))
}
