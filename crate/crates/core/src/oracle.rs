//! Reference eigenvalues computed by methods unrelated to the residual
//! minimizer: closed forms for `d ≤ 2`, shifted complex QR iteration on the
//! Hessenberg form otherwise. Used by tests, the acceptance suite and the
//! CLI `--oracle` flag.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, NormKind};
use crate::random;

/// Largest dimension the oracle accepts.
pub const MAX_DIM: usize = 32;
pub const MAX_SWEEPS: usize = 2000;
/// Subdiagonal entries below this multiple of `‖T‖_F` are deflated.
pub const DEFLATION_RATIO: f64 = 1e-12;

const PRECONDITION_SEED: u64 = 0x0c0f_fee5;
const MAX_INVERSE_ITERATIONS: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ClosedForm2x2,
    QrIteration,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEstimate {
    #[serde(serialize_with = "serialize_complex_list")]
    pub eigenvalues: Vec<Complex64>,
    pub method: SpectrumMethod,
    /// Largest `min_x ‖(T − λI)x‖₂` over the returned eigenvalues.
    pub max_residual: f64,
}

fn serialize_complex_list<S: serde::Serializer>(values: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|z| [z.re, z.im]))
}

impl SpectrumEstimate {
    /// Distance from `lambda` to the closest reference eigenvalue.
    pub fn distance_to(&self, lambda: Complex64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|mu| (mu - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether every eigenvalue passes `max_residual ≤ 1e-6 (1 + ‖T‖_F)`.
    pub fn residual_check(&self, t: &ComplexMatrix) -> bool {
        self.max_residual <= 1e-6 * (1.0 + t.frobenius_norm())
    }
}

pub fn reference_spectrum(t: &ComplexMatrix) -> Result<SpectrumEstimate> {
    let d = t.dim();
    if d > MAX_DIM {
        return Err(Error::invalid(format!(
            "oracle supports dimension up to {MAX_DIM}, got {d}"
        )));
    }
    let (eigenvalues, method) = match d {
        1 => (vec![t.get(0, 0)], SpectrumMethod::ClosedForm2x2),
        2 => {
            let (l1, l2) = eig2x2(t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1));
            (vec![l1, l2], SpectrumMethod::ClosedForm2x2)
        }
        _ => (qr_eigenvalues(t)?, SpectrumMethod::QrIteration),
    };
    let max_residual = eigenvalues
        .iter()
        .map(|&lambda| smallest_singular_direction(&t.shifted(lambda)).map(|(_, s)| s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(SpectrumEstimate {
        eigenvalues,
        method,
        max_residual,
    })
}

/// Roots of `λ² − (a + d)λ + (ad − bc)`.
fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    (mean + root, mean - root)
}

fn qr_eigenvalues(t: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = t.dim();
    let u = random::unitary(&mut random::rng(PRECONDITION_SEED), n);
    let similar = u.matmul(t)?.matmul(&u.adjoint())?;
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| similar.row(i).to_vec()).collect();
    hessenberg(&mut h);

    let scale = t.frobenius_norm();
    let floor = DEFLATION_RATIO * scale;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut sweeps = 0;
    let mut since_deflation = 0;

    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[l][l - 1].norm();
            let local = h[l - 1][l - 1].norm() + h[l][l].norm();
            if sub <= floor || sub <= f64::EPSILON * local {
                h[l][l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps == MAX_SWEEPS {
            let partial = eig[hi + 1..].to_vec();
            return Err(Error::NoConvergence { sweeps, partial });
        }
        sweeps += 1;
        since_deflation += 1;

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift breaks symmetric stagnation cycles.
            h[hi][hi] + Complex64::new(0.75, 0.43) * h[hi][hi - 1].norm()
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, l, hi, mu);
    }
    Ok(eig)
}

fn wilkinson_shift(h: &[Vec<Complex64>], hi: usize) -> Complex64 {
    let (l1, l2) = eig2x2(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
    let corner = h[hi][hi];
    if (l1 - corner).norm() <= (l2 - corner).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR step `H ← R Q + μ I` on the active block `lo..=hi`.
fn qr_sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for k in lo..=hi {
        h[k][k] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = x * c + s * y;
            h[k + 1][j] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[k][k] += mu;
    }
}

/// `(c, s)` with `c` real such that `[[c, s], [−s̄, c]] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let abs_a = a.norm();
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if abs_a == 0.0 {
        return (0.0, b.conj() / abs_b);
    }
    let r = abs_a.hypot(abs_b);
    (abs_a / r, (a / abs_a) * b.conj() / r)
}

/// Householder reduction to upper Hessenberg form (similarity, in place).
fn hessenberg(a: &mut [Vec<Complex64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[i][k]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x;
        v[0] += phase * norm_x;
        let norm_v = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm_v;
        }
        // Left: rows k+1.., apply I − 2 v v*.
        for j in 0..n {
            let w: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[k + 1 + i][j]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[k + 1 + i][j] -= vi * w * 2.0;
            }
        }
        // Right: columns k+1..
        for row in a.iter_mut() {
            let w: Complex64 = v.iter().enumerate().map(|(l, vl)| row[k + 1 + l] * vl).sum();
            for (l, vl) in v.iter().enumerate() {
                row[k + 1 + l] -= w * vl.conj() * 2.0;
            }
        }
        for row in a.iter_mut().skip(k + 2) {
            row[k] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Smallest singular value `s` of `a` and a unit vector `x` with
/// `‖a x‖₂ = s`, by inverse iteration on `a* a`.
pub fn smallest_singular_direction(a: &ComplexMatrix) -> Result<(ComplexVector, f64)> {
    let d = a.dim();
    if d > MAX_DIM {
        return Err(Error::invalid(format!(
            "oracle supports dimension up to {MAX_DIM}, got {d}"
        )));
    }
    if a.max_abs() == 0.0 {
        return Ok((ComplexVector::basis(d, 0), 0.0));
    }
    let lu = match a.lu() {
        Ok(lu) => lu,
        Err(Error::Singular(info)) => {
            let s = a.apply(&info.near_null)?.norm(NormKind::Two);
            return Ok((info.near_null, s));
        }
        Err(err) => return Err(err),
    };
    let mut x = random::unit_vector(&mut random::rng(PRECONDITION_SEED), d, NormKind::Two);
    let mut s = a.apply(&x)?.norm(NormKind::Two);
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let y = lu.solve(&lu.solve_adjoint(&x)?)?;
        let next = match y.normalized(NormKind::Two) {
            Ok(next) => next,
            Err(_) => break,
        };
        let next_s = a.apply(&next)?.norm(NormKind::Two);
        let settled = (s - next_s).abs() <= 1e-15 * next_s.max(f64::MIN_POSITIVE);
        x = next;
        s = next_s;
        if settled {
            break;
        }
    }
    Ok((x, s))
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets
/// of equal size; `INFINITY` if the sizes differ.
pub fn greedy_match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut unused: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (idx, dist) = unused
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        worst = worst.max(dist);
        unused.swap_remove(idx);
    }
    worst
}
