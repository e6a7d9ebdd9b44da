//! Global minimization of `f(v, λ) = ‖T v − λ v‖` over the compact set
//! `{‖v‖ = 1, |λ| ≤ ‖T v₀‖ + C}`.
//!
//! The minimum exists by compactness and is zero exactly at eigenpairs. The
//! search alternates two half-steps:
//!
//! * `λ` step: the exact minimizer of `‖T v − λ v‖` at fixed `v` (orthogonal
//!   projection for the 2-norm, planar pattern search for the 1- and
//!   ∞-norms), clamped to the search disk;
//! * `v` step: `v⁺ = normalize((T − λ I)⁻¹ v)`.
//!
//! A collapsed pivot in the `v` step means `λ` is numerically an eigenvalue
//! and is treated as convergence evidence. Several seeded starts guard
//! against the non-convexity in `v`; the accepted residual within a start
//! never increases.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{operator_bound, residual_ratio, ComplexMatrix, ComplexVector, NormKind, OperatorBound};
use crate::pattern::{minimize_convex_planar, PatternSettings};
use crate::random;

/// Planar search stops once its step drops to this size.
pub const LAMBDA_MIN_STEP: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_RESTARTS: usize = 4;
pub const STAGNATION_WINDOW: usize = 10;
pub const STAGNATION_IMPROVEMENT: f64 = 1e-15;
const UNIT_NORM_SLACK: f64 = 1e-12;

/// Default tolerance `1e-10 · (1 + C)` for the given bound.
pub fn default_tolerance(bound: OperatorBound) -> f64 {
    1e-10 * (1.0 + bound.value())
}

/// A unit vector, a scalar, and the residual ratio they attain.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePair {
    pub v: ComplexVector,
    pub lambda: Complex64,
    pub residual_ratio: f64,
}

impl CandidatePair {
    pub fn evaluate(t: &ComplexMatrix, v: ComplexVector, lambda: Complex64, norm: NormKind) -> Result<Self> {
        let residual_ratio = residual_ratio(t, &v, lambda, norm)?;
        Ok(CandidatePair {
            v,
            lambda,
            residual_ratio,
        })
    }
}

/// The `λ` disk `|λ| ≤ ‖T v₀‖ + C` outside of which no minimizer lies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchDomain {
    pub radius: f64,
    pub bound: OperatorBound,
    pub v0_image_norm: f64,
}

impl SearchDomain {
    pub fn contains(&self, lambda: Complex64) -> bool {
        lambda.norm() <= self.radius
    }

    /// Radial projection onto the closed disk.
    pub fn clamp(&self, lambda: Complex64) -> Complex64 {
        let r = lambda.norm();
        if r <= self.radius {
            lambda
        } else if self.radius == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            lambda * (self.radius / r)
        }
    }
}

pub fn search_domain(t: &ComplexMatrix, v0: &ComplexVector, norm: NormKind) -> Result<SearchDomain> {
    let v0_norm = v0.norm(norm);
    if (v0_norm - 1.0).abs() > UNIT_NORM_SLACK {
        return Err(Error::invalid(format!(
            "search domain needs a unit start vector, got norm {v0_norm}"
        )));
    }
    let bound = operator_bound(t, norm);
    let v0_image_norm = t.apply(v0)?.norm(norm);
    Ok(SearchDomain {
        radius: v0_image_norm + bound.value(),
        bound,
        v0_image_norm,
    })
}

/// `λ` minimizing `‖T v − λ v‖` at fixed `v ≠ 0`.
pub fn best_lambda(t: &ComplexMatrix, v: &ComplexVector, norm: NormKind) -> Result<Complex64> {
    let tv = t.apply(v)?;
    best_lambda_for_image(t, v, &tv, norm)
}

fn best_lambda_for_image(
    t: &ComplexMatrix,
    v: &ComplexVector,
    tv: &ComplexVector,
    norm: NormKind,
) -> Result<Complex64> {
    let vv = v.dot(v)?.re;
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let projection = tv.dot(v)? / vv;
    if norm == NormKind::Two {
        return Ok(projection);
    }
    // f is convex in λ (norm of an affine map). Its minimizers satisfy
    // |λ| ≤ 2‖Tv‖/‖v‖, since beyond that f(λ) ≥ |λ|‖v‖ − ‖Tv‖ > f(0).
    let scale = v.norm(norm);
    let image = tv.norm(norm) / scale;
    let radius = image + operator_bound(t, norm).value();
    let objective =
        |lambda: Complex64| norm.of(&tv.iter().zip(v.iter()).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
    let found = minimize_convex_planar(
        objective,
        projection,
        2.0 * image,
        PatternSettings {
            initial_step: radius,
            min_step: LAMBDA_MIN_STEP,
            max_evals: 20_000,
        },
    );
    Ok(found.point)
}

/// Result of one `v` step.
#[derive(Clone, Debug, PartialEq)]
pub struct Improvement {
    pub v: ComplexVector,
    /// `T − λ I` was numerically singular; `v` came from the perturbed shift
    /// or from the near-null direction of the factorization.
    pub near_singular: bool,
}

/// `normalize((T − λ I)⁻¹ v)`; on a collapsed pivot the shift is moved by
/// `1e-10 (1 + |λ|)` and, failing that, the near-null direction is used.
pub fn improve_v(t: &ComplexMatrix, pair: &CandidatePair, norm: NormKind) -> Result<Improvement> {
    match inverse_step(t, &pair.v, pair.lambda, norm) {
        Ok(Some(v)) => {
            return Ok(Improvement {
                v,
                near_singular: false,
            })
        }
        Ok(None) => {}
        Err(Error::Singular(_)) => {}
        Err(err) => return Err(err),
    }
    let eps = 1e-10 * (1.0 + pair.lambda.norm());
    let v = match inverse_step(t, &pair.v, pair.lambda + eps, norm) {
        Ok(Some(v)) => v,
        Ok(None) => pair.v.clone(),
        Err(Error::Singular(info)) => info.near_null.normalized(norm)?,
        Err(err) => return Err(err),
    };
    Ok(Improvement { v, near_singular: true })
}

/// `Some(normalize((T − shift I)⁻¹ v))`, or `None` if the solve overflowed.
fn inverse_step(
    t: &ComplexMatrix,
    v: &ComplexVector,
    shift: Complex64,
    norm: NormKind,
) -> Result<Option<ComplexVector>> {
    let x = t.shifted(shift).solve(v)?;
    if x.iter().any(|z| !z.is_finite()) || x.is_zero() {
        return Ok(None);
    }
    let n = x.norm(norm);
    if !n.is_finite() {
        return Ok(None);
    }
    Ok(Some(x.scale(Complex64::new(1.0 / n, 0.0))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeConfig {
    /// Defaults to `1e-10 · (1 + C)`.
    pub tolerance: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
    /// Random starts in addition to the deterministic start `e₁`.
    pub restarts: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            tolerance: None,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

/// The best pair found, with its residual and the domain it was sought in.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub pair: CandidatePair,
    pub c_bar: f64,
    pub domain: SearchDomain,
    pub iterations: usize,
    pub converged: bool,
    pub tolerance: f64,
    pub norm: NormKind,
    pub seed: u64,
}

impl Certificate {
    pub fn lambda(&self) -> Complex64 {
        self.pair.lambda
    }

    pub fn v(&self) -> &ComplexVector {
        &self.pair.v
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.pair.v.iter().map(|z| [z.re, z.im]).collect();
        let mut st = s.serialize_struct("Certificate", 9)?;
        st.serialize_field("lambda", &[self.pair.lambda.re, self.pair.lambda.im])?;
        st.serialize_field("v", &v)?;
        st.serialize_field("residual", &self.c_bar)?;
        st.serialize_field("C", &self.domain.bound.value())?;
        st.serialize_field("radius", &self.domain.radius)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("norm", &self.norm)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// History of one start.
#[derive(Clone, Debug)]
pub struct RestartTrace {
    /// 0 for `e₁`, `1..=restarts` for the random starts.
    pub index: usize,
    /// Accepted residual ratio after each iteration, starting with the
    /// initial pair.
    pub accepted: Vec<f64>,
    pub best: CandidatePair,
    pub iterations: usize,
    pub converged: bool,
    pub near_singular_steps: usize,
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub certificate: Certificate,
    pub restarts: Vec<RestartTrace>,
}

/// Runs every start and returns the certificate of the best one.
pub fn minimize(t: &ComplexMatrix, norm: NormKind, config: &MinimizeConfig) -> Certificate {
    minimize_with_trace(t, norm, config).certificate
}

/// Like [`minimize`], also returning the per-start traces.
///
/// Starts run in parallel; the winner is the lowest-index start that reached
/// the tolerance, or failing that the lowest residual (ties to lower index).
pub fn minimize_with_trace(t: &ComplexMatrix, norm: NormKind, config: &MinimizeConfig) -> MinimizeOutcome {
    let dim = t.dim();
    let e1 = ComplexVector::basis(dim, 0);
    let domain = search_domain(t, &e1, norm).expect("e1 is a unit vector in every norm");
    let tolerance = config.tolerance.unwrap_or_else(|| default_tolerance(domain.bound));

    let traces: Vec<RestartTrace> = (0..=config.restarts)
        .into_par_iter()
        .map(|index| {
            let start = if index == 0 {
                e1.clone()
            } else {
                let mut rng = random::rng(restart_seed(config.seed, index));
                random::unit_vector(&mut rng, dim, norm)
            };
            descend(t, norm, &domain, start, tolerance, config.max_iters, index)
        })
        .collect();

    let winner = traces
        .iter()
        .min_by(|a, b| {
            let key = |r: &RestartTrace| (!r.converged, if r.converged { 0.0 } else { r.best.residual_ratio });
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.index.cmp(&b.index))
        })
        .expect("at least one start");

    let certificate = Certificate {
        pair: winner.best.clone(),
        c_bar: winner.best.residual_ratio,
        domain,
        iterations: winner.iterations,
        converged: winner.converged,
        tolerance,
        norm,
        seed: config.seed,
    };
    MinimizeOutcome {
        certificate,
        restarts: traces,
    }
}

fn restart_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0xa076_1d64_78bd_642f)
}

/// Evaluates the pair `(v, clamp(best_lambda(v)))`.
fn lambda_step(t: &ComplexMatrix, v: ComplexVector, norm: NormKind, domain: &SearchDomain) -> Result<CandidatePair> {
    let lambda = domain.clamp(best_lambda(t, &v, norm)?);
    CandidatePair::evaluate(t, v, lambda, norm)
}

fn descend(
    t: &ComplexMatrix,
    norm: NormKind,
    domain: &SearchDomain,
    start: ComplexVector,
    tolerance: f64,
    max_iters: usize,
    index: usize,
) -> RestartTrace {
    let start = start.normalized(norm).expect("start vectors are nonzero");
    let mut accepted = lambda_step(t, start, norm, domain).expect("dimensions agree");
    let mut history = vec![accepted.residual_ratio];
    let mut working = accepted.clone();
    let mut iterations = 0;
    let mut near_singular_steps = 0;

    while accepted.residual_ratio > tolerance && iterations < max_iters {
        iterations += 1;
        let step = improve_v(t, &working, norm).expect("dimensions agree");
        near_singular_steps += usize::from(step.near_singular);
        working = lambda_step(t, step.v, norm, domain).expect("dimensions agree");
        if working.residual_ratio <= accepted.residual_ratio {
            accepted = working.clone();
        }
        history.push(accepted.residual_ratio);

        if iterations >= STAGNATION_WINDOW {
            let earlier = history[iterations - STAGNATION_WINDOW];
            if earlier - accepted.residual_ratio < STAGNATION_IMPROVEMENT {
                break;
            }
        }
    }

    RestartTrace {
        index,
        converged: accepted.residual_ratio <= tolerance,
        accepted: history,
        best: accepted,
        iterations,
        near_singular_steps,
    }
}

/// Recomputed residual ratio of a claimed eigenpair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub residual: f64,
    pub tolerance: f64,
    pub certified: bool,
    pub norm: NormKind,
}

/// `‖T v − λ v‖ / ‖v‖ ≤ tolerance` certifies `(v, λ)` as an eigenpair up to
/// that tolerance. `tolerance` defaults to `1e-10 · (1 + C)`.
pub fn certify_pair(
    t: &ComplexMatrix,
    v: &ComplexVector,
    lambda: Complex64,
    norm: NormKind,
    tolerance: Option<f64>,
) -> Result<PairCheck> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let residual = residual_ratio(t, v, lambda, norm)?;
    let tolerance = tolerance.unwrap_or_else(|| default_tolerance(operator_bound(t, norm)));
    Ok(PairCheck {
        residual,
        tolerance,
        certified: residual <= tolerance,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag25() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 5.0]).unwrap()
    }

    fn rotation() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn search_domain_examples() {
        let e1 = ComplexVector::basis(2, 0);
        for norm in NormKind::ALL {
            assert_eq!(search_domain(&ComplexMatrix::zeros(2), &e1, norm).unwrap().radius, 0.0);
        }
        assert_eq!(
            search_domain(&ComplexMatrix::identity(2), &e1, NormKind::Inf)
                .unwrap()
                .radius,
            2.0
        );
        let dom = search_domain(&diag25(), &e1, NormKind::Inf).unwrap();
        assert_eq!((dom.v0_image_norm, dom.bound.value(), dom.radius), (2.0, 5.0, 7.0));

        let not_unit = e1.scale(c(2.0, 0.0));
        assert!(search_domain(&diag25(), &not_unit, NormKind::Two).is_err());
    }

    #[test]
    fn clamp_projects_radially() {
        let dom = search_domain(&diag25(), &ComplexVector::basis(2, 0), NormKind::Inf).unwrap();
        assert_eq!(dom.clamp(c(1.0, 1.0)), c(1.0, 1.0));
        let clamped = dom.clamp(c(0.0, 14.0));
        assert!((clamped - c(0.0, 7.0)).norm() < 1e-15);
    }

    #[test]
    fn best_lambda_examples() {
        let e2 = ComplexVector::basis(2, 1);
        for norm in NormKind::ALL {
            assert_eq!(best_lambda(&diag25(), &e2, norm).unwrap(), c(5.0, 0.0));
            let v = ComplexVector::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.0)]).unwrap();
            let l = best_lambda(&ComplexMatrix::identity(3), &v, norm).unwrap();
            assert!((l - 1.0).norm() < 1e-12, "{norm}: {l}");
        }
        // T (1, i) = (−i, 1) = −i (1, i).
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::new(vec![c(h, 0.0), c(0.0, h)]).unwrap();
        let l = best_lambda(&rotation(), &v, NormKind::Two).unwrap();
        assert!((l - c(0.0, -1.0)).norm() < 1e-14, "{l}");

        assert!(matches!(
            best_lambda(&rotation(), &ComplexVector::zeros(2), NormKind::Two),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn best_lambda_beats_projection_in_other_norms() {
        let mut rng = random::rng(21);
        for _ in 0..50 {
            let t = random::matrix(&mut rng, 4);
            let v = random::unit_vector(&mut rng, 4, NormKind::Two);
            let proj = best_lambda(&t, &v, NormKind::Two).unwrap();
            for norm in [NormKind::One, NormKind::Inf] {
                let l = best_lambda(&t, &v, norm).unwrap();
                let f = |x| residual_ratio(&t, &v, x, norm).unwrap();
                assert!(f(l) <= f(proj));
                // Local optimality on a small ring of probes.
                for k in 0..16 {
                    let probe = l + Complex64::from_polar(1e-6, k as f64 * 0.39);
                    assert!(f(l) <= f(probe) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn improve_v_diagonal_inverse_iteration() {
        let v = ComplexVector::from_real(&[1.0, 1.0])
            .unwrap()
            .normalized(NormKind::Two)
            .unwrap();
        let pair = CandidatePair::evaluate(&diag25(), v, c(2.1, 0.0), NormKind::Two).unwrap();
        let step = improve_v(&diag25(), &pair, NormKind::Two).unwrap();
        assert!(!step.near_singular);
        let ratio = step.v[0].norm() / step.v[1].norm();
        assert!((ratio - 29.0).abs() < 1e-12);
        assert!((step.v.norm(NormKind::Two) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn improve_v_identity_keeps_direction() {
        let v = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let pair = CandidatePair::evaluate(&ComplexMatrix::identity(2), v.clone(), c(0.0, 0.0), NormKind::Two).unwrap();
        let step = improve_v(&ComplexMatrix::identity(2), &pair, NormKind::Two).unwrap();
        assert!(step.v.sub(&v).unwrap().norm(NormKind::Inf) < 1e-15);
    }

    #[test]
    fn improve_v_at_exact_eigenpair_is_near_singular() {
        let e1 = ComplexVector::basis(2, 0);
        let pair = CandidatePair::evaluate(&diag25(), e1, c(2.0, 0.0), NormKind::Two).unwrap();
        let step = improve_v(&diag25(), &pair, NormKind::Two).unwrap();
        assert!(step.near_singular);
        let after = lambda_step(
            &diag25(),
            step.v,
            NormKind::Two,
            &search_domain(&diag25(), &ComplexVector::basis(2, 0), NormKind::Two).unwrap(),
        )
        .unwrap();
        assert!(after.residual_ratio <= 1e-10);
    }

    #[test]
    fn minimize_diagonal() {
        let cert = minimize(
            &diag25(),
            NormKind::Two,
            &MinimizeConfig {
                tolerance: Some(1e-10),
                ..Default::default()
            },
        );
        assert!(cert.converged);
        assert!(cert.c_bar <= 1e-10);
        let l = cert.lambda();
        assert!((l - 2.0).norm() < 1e-8 || (l - 5.0).norm() < 1e-8);
    }

    #[test]
    fn minimize_rotation_generator() {
        for norm in NormKind::ALL {
            let cert = minimize(&rotation(), norm, &MinimizeConfig::default());
            assert!(cert.converged, "{norm}: {}", cert.c_bar);
            let l = cert.lambda();
            assert!((l - c(0.0, 1.0)).norm() < 1e-8 || (l + c(0.0, 1.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn minimize_zero_matrix_converges_immediately() {
        for norm in NormKind::ALL {
            let cert = minimize(&ComplexMatrix::zeros(3), norm, &MinimizeConfig::default());
            assert!(cert.converged);
            assert_eq!(cert.iterations, 0);
            assert_eq!(cert.lambda(), c(0.0, 0.0));
            assert_eq!(cert.c_bar, 0.0);
            assert!((cert.v().norm(norm) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn minimize_one_by_one() {
        let t = ComplexMatrix::new(1, vec![c(7.0, 0.0)]).unwrap();
        let cert = minimize(&t, NormKind::Two, &MinimizeConfig::default());
        assert!(cert.converged);
        assert_eq!(cert.lambda(), c(7.0, 0.0));
        assert_eq!(cert.v(), &ComplexVector::basis(1, 0));
    }

    #[test]
    fn traces_are_monotone() {
        let mut rng = random::rng(8);
        for _ in 0..20 {
            let t = random::matrix(&mut rng, 6);
            for norm in NormKind::ALL {
                let out = minimize_with_trace(&t, norm, &MinimizeConfig::default());
                for trace in &out.restarts {
                    assert!(trace.accepted.windows(2).all(|w| w[1] <= w[0]));
                }
            }
        }
    }

    #[test]
    fn certify_pair_examples() {
        let check = certify_pair(&diag25(), &ComplexVector::basis(2, 1), c(5.0, 0.0), NormKind::Two, None).unwrap();
        assert!(check.certified && check.residual == 0.0);
        let check = certify_pair(&diag25(), &ComplexVector::basis(2, 0), c(3.0, 0.0), NormKind::Two, None).unwrap();
        assert!(!check.certified);
        assert_eq!(check.residual, 1.0);
        assert!(matches!(
            certify_pair(&diag25(), &ComplexVector::zeros(2), c(3.0, 0.0), NormKind::Two, None),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn certificate_json_shape() {
        let cert = minimize(&diag25(), NormKind::Inf, &MinimizeConfig::default());
        let v = serde_json::to_value(&cert).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "lambda",
            "v",
            "residual",
            "C",
            "radius",
            "iterations",
            "converged",
            "norm",
            "seed",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["norm"], "inf");
        assert_eq!(v["C"], 5.0);
    }
}
