//! The extension step: moving a pair `(v̄, λ̄)` to a new scalar `λ` through
//! `v = (T − λI)⁻¹ (T − λ̄I) v̄`, which keeps the residual vector fixed:
//! `T v − λ v = T v̄ − λ̄ v̄`.
//!
//! Also provides the resolvent bound `‖(T − λI)⁻¹ v‖ ≤ ‖v‖ / c_λ` with
//! `c_λ = min_{‖u‖=1} ‖(T − λI) u‖`, and the factor `n (|λ − λ̄| / c̄)ⁿ`
//! that controls the extension argument.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::vector_to_json;
use crate::linalg::{operator_bound, residual_vector, ComplexMatrix, ComplexVector, NormKind};
use crate::pattern::{minimize_compass, PatternSettings};
use crate::{oracle, random};

/// Relative slack allowed by [`inverse_norm_bound_check`].
pub const INVERSE_BOUND_SLACK: f64 = 1e-8;
/// Number of seeded starts of the sphere search used for `c_λ` estimates.
pub const SPHERE_SEARCH_STARTS: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionResult {
    pub v_new: ComplexVector,
    /// `‖(T v_new − λ v_new) − (T v̄ − λ̄ v̄)‖`.
    pub residual_vector_drift: f64,
    /// `‖v_new‖ / ‖v̄‖`; the residual ratio changes by the inverse factor.
    pub norm_growth: f64,
}

impl Serialize for ExtensionResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExtensionResult", 3)?;
        st.serialize_field("v_new", &vector_to_json(&self.v_new))?;
        st.serialize_field("drift", &self.residual_vector_drift)?;
        st.serialize_field("growth", &self.norm_growth)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionOutcome {
    Extended(ExtensionResult),
    /// `T v̄ = λ̄ v̄` up to rounding: the map sends `v̄` to zero.
    ZeroResidual,
    /// `T − λI` is numerically singular; `λ` is an eigenvalue with
    /// approximate eigenvector `near_null`.
    Eigenvalue {
        near_null: ComplexVector,
    },
}

pub fn extend_pair(
    t: &ComplexMatrix,
    v_bar: &ComplexVector,
    lambda_bar: Complex64,
    lambda: Complex64,
    norm: NormKind,
) -> Result<ExtensionOutcome> {
    if v_bar.is_zero() {
        return Err(Error::ZeroVector);
    }
    let r = residual_vector(t, v_bar, lambda_bar)?;
    if lambda == lambda_bar {
        return Ok(ExtensionOutcome::Extended(ExtensionResult {
            v_new: v_bar.clone(),
            residual_vector_drift: 0.0,
            norm_growth: 1.0,
        }));
    }
    let rounding = 4.0 * f64::EPSILON * (operator_bound(t, norm).value() + lambda_bar.norm()) * v_bar.norm(norm);
    if r.norm(norm) <= rounding {
        return Ok(ExtensionOutcome::ZeroResidual);
    }
    let v_new = match t.shifted(lambda).solve(&r) {
        Ok(v) => v,
        Err(Error::Singular(info)) => {
            return Ok(ExtensionOutcome::Eigenvalue {
                near_null: info.near_null,
            })
        }
        Err(err) => return Err(err),
    };
    let drift = residual_vector(t, &v_new, lambda)?.sub(&r)?.norm(norm);
    Ok(ExtensionOutcome::Extended(ExtensionResult {
        norm_growth: v_new.norm(norm) / v_bar.norm(norm),
        residual_vector_drift: drift,
        v_new,
    }))
}

/// Outcome of testing `‖(T − λI)⁻¹ v‖ ≤ ‖v‖ / c_λ` on sampled vectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseBoundReport {
    pub norm: NormKind,
    #[serde(serialize_with = "serialize_complex")]
    pub lambda: Complex64,
    /// `min_{‖u‖=1} ‖(T − λI) u‖`: the smallest singular value for the
    /// 2-norm, `1 / ‖(T − λI)⁻¹‖` from the exact induced norm otherwise.
    pub c_lambda: f64,
    /// Best value found by pattern search over the unit sphere (1- and
    /// ∞-norms only); never below `c_lambda` beyond rounding.
    pub c_search: Option<f64>,
    pub trials: usize,
    pub violations: usize,
    /// Largest `c_λ ‖(T − λI)⁻¹ v‖ / ‖v‖` over the random trials.
    pub max_ratio: f64,
    /// The same ratio at the vector where the bound is attained.
    pub tight_ratio: f64,
    pub pass: bool,
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn inverse_norm_bound_check(
    t: &ComplexMatrix,
    lambda: Complex64,
    norm: NormKind,
    trials: usize,
    seed: u64,
) -> Result<InverseBoundReport> {
    let a = t.shifted(lambda);
    let lu = a.lu()?;
    let d = a.dim();

    let (c_lambda, witness, c_search) = match norm {
        NormKind::Two => {
            let (x, s) = oracle::smallest_singular_direction(&a)?;
            (s, a.apply(&x)?, None)
        }
        NormKind::One | NormKind::Inf => {
            let inverse = lu.solve_matrix(&ComplexMatrix::identity(d))?;
            let (inverse_norm, witness) = induced_norm_with_witness(&inverse, norm);
            (1.0 / inverse_norm, witness, Some(sphere_search(&a, norm, seed)))
        }
    };

    let ratio = |v: &ComplexVector| -> Result<f64> { Ok(c_lambda * lu.solve(v)?.norm(norm) / v.norm(norm)) };
    let mut rng = random::rng(seed);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..trials {
        let v = random::vector(&mut rng, d);
        let r = ratio(&v)?;
        max_ratio = max_ratio.max(r);
        if r > 1.0 + INVERSE_BOUND_SLACK {
            violations += 1;
        }
    }
    let tight_ratio = ratio(&witness)?;
    if tight_ratio > 1.0 + INVERSE_BOUND_SLACK {
        violations += 1;
    }
    Ok(InverseBoundReport {
        norm,
        lambda,
        c_lambda,
        c_search,
        trials,
        violations,
        max_ratio,
        tight_ratio,
        pass: violations == 0,
    })
}

/// Induced 1- or ∞-norm of `m` and a vector attaining it.
fn induced_norm_with_witness(m: &ComplexMatrix, norm: NormKind) -> (f64, ComplexVector) {
    let d = m.dim();
    match norm {
        NormKind::One => {
            let (col, value) = (0..d)
                .map(|j| (j, m.column(j).norm(NormKind::One)))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            (value, ComplexVector::basis(d, col))
        }
        _ => {
            let (row, value) = (0..d)
                .map(|i| (i, NormKind::One.of(m.row(i))))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let phases = m
                .row(row)
                .iter()
                .map(|z| {
                    if z.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        z.conj() / z.norm()
                    }
                })
                .collect();
            (value, ComplexVector::from_vec_unchecked(phases))
        }
    }
}

/// Minimum of `‖A u‖ / ‖u‖` found by compass search from seeded starts.
fn sphere_search(a: &ComplexMatrix, norm: NormKind, seed: u64) -> f64 {
    let d = a.dim();
    let objective = |x: &[f64]| {
        let u: Vec<Complex64> = x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let scale = norm.of(&u);
        if scale == 0.0 {
            return f64::INFINITY;
        }
        norm.of(&a.apply_slice(&u)) / scale
    };
    let mut rng = random::rng(seed ^ 0x5eed_5eed);
    (0..SPHERE_SEARCH_STARTS)
        .map(|_| {
            let start: Vec<f64> = random::unit_vector(&mut rng, d, norm)
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect();
            minimize_compass(
                objective,
                start,
                PatternSettings {
                    initial_step: 0.25,
                    min_step: 1e-7,
                    max_evals: 20_000,
                },
            )
            .value
        })
        .fold(f64::INFINITY, f64::min)
}

/// `n (|λ − λ̄| / c̄)ⁿ`.
pub fn decay_term(lambda_bar: Complex64, lambda: Complex64, c_bar: f64, n: u32) -> Result<f64> {
    if c_bar <= 0.0 || !c_bar.is_finite() {
        return Err(Error::invalid(format!("c_bar must be positive, got {c_bar}")));
    }
    if n == 0 {
        return Err(Error::invalid("decay term needs n >= 1"));
    }
    let ratio = (lambda - lambda_bar).norm() / c_bar;
    if ratio == 0.0 {
        return Ok(0.0);
    }
    Ok((f64::from(n).ln() + f64::from(n) * ratio.ln()).exp())
}
