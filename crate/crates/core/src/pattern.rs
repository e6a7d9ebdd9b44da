//! Derivative-free pattern search.
//!
//! Accepted values never increase: a trial point replaces the incumbent only
//! if it is strictly better, otherwise the step is halved.

use num_complex::Complex64;

/// Golden angle, used to rotate the planar stencil after each contraction so
/// that the search does not stall on a ridge aligned with a fixed direction.
const STENCIL_ROTATION: f64 = 2.399_963_229_728_653;
const PLANAR_DIRECTIONS: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct PatternSettings {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
}

#[derive(Clone, Debug)]
pub struct PatternResult<P> {
    pub point: P,
    pub value: f64,
    pub evals: usize,
}

/// Minimizes `f` over the complex plane from `start`.
pub fn minimize_planar(
    f: impl Fn(Complex64) -> f64,
    start: Complex64,
    settings: PatternSettings,
) -> PatternResult<Complex64> {
    let mut x = start;
    let mut fx = f(x);
    let mut evals = 1;
    let mut step = settings.initial_step;
    let mut angle = 0.0f64;
    while step > settings.min_step && evals < settings.max_evals && fx > 0.0 {
        let mut best = (x, fx);
        for k in 0..PLANAR_DIRECTIONS {
            let theta = angle + std::f64::consts::TAU * k as f64 / PLANAR_DIRECTIONS as f64;
            let trial = x + Complex64::from_polar(step, theta);
            let ft = f(trial);
            evals += 1;
            if ft < best.1 {
                best = (trial, ft);
            }
        }
        if best.1 < fx {
            (x, fx) = best;
        } else {
            step *= 0.5;
            angle += STENCIL_ROTATION;
        }
    }
    PatternResult {
        point: x,
        value: fx,
        evals,
    }
}

/// Golden-section search for the minimum of a convex `f` on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nested golden-section search over the square `center ± half_width` in
/// each coordinate. For convex `f` the partial minimum `min_y f(x, y)` is
/// convex in `x`, so both levels converge to the minimum in the square.
pub fn minimize_convex_box(
    f: impl Fn(Complex64) -> f64,
    center: Complex64,
    half_width: f64,
    tol: f64,
) -> PatternResult<Complex64> {
    let evals = std::cell::Cell::new(0usize);
    let inner = |re: f64| {
        golden_section(
            |im| {
                evals.set(evals.get() + 1);
                f(Complex64::new(re, im))
            },
            center.im - half_width,
            center.im + half_width,
            tol,
        )
    };
    let (re, _) = golden_section(|re| inner(re).1, center.re - half_width, center.re + half_width, tol);
    let (im, value) = inner(re);
    PatternResult {
        point: Complex64::new(re, im),
        value,
        evals: evals.get(),
    }
}

/// Minimizes a convex `f` over the plane, given that its minimizers lie in
/// the disk `|z| ≤ bound`: planar pattern search from `start`, then a nested
/// golden-section pass that cannot stall on ridges. Returns the better point,
/// so the value never exceeds `f(start)`.
pub fn minimize_convex_planar(
    f: impl Fn(Complex64) -> f64,
    start: Complex64,
    bound: f64,
    settings: PatternSettings,
) -> PatternResult<Complex64> {
    let polled = minimize_planar(&f, start, settings);
    if polled.value == 0.0 || bound == 0.0 {
        return polled;
    }
    let boxed = minimize_convex_box(&f, Complex64::new(0.0, 0.0), bound, settings.min_step);
    let evals = polled.evals + boxed.evals;
    let best = if boxed.value < polled.value { boxed } else { polled };
    PatternResult { evals, ..best }
}

/// Compass search over `ℝⁿ` along `±e_i`.
pub fn minimize_compass(
    f: impl Fn(&[f64]) -> f64,
    start: Vec<f64>,
    settings: PatternSettings,
) -> PatternResult<Vec<f64>> {
    let mut x = start;
    let mut fx = f(&x);
    let mut evals = 1;
    let mut step = settings.initial_step;
    let mut trial = x.clone();
    while step > settings.min_step && evals < settings.max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[i] += sign * step;
                let ft = f(&trial);
                evals += 1;
                if ft < fx {
                    fx = ft;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    PatternResult {
        point: x,
        value: fx,
        evals,
    }
}
