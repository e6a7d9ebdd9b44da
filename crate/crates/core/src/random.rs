//! Seeded generators for test instances, restarts and the identity suites.
//!
//! All streams come from ChaCha8 so that a seed reproduces the same instance
//! on every platform.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, ComplexVector, NormKind};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from the closed disk `|z| ≤ radius`.
pub fn scalar_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

/// Sample with modulus in `[min_modulus, max_modulus]` and uniform phase.
pub fn scalar_in_annulus<R: Rng + ?Sized>(rng: &mut R, min_modulus: f64, max_modulus: f64) -> Complex64 {
    let r = min_modulus + (max_modulus - min_modulus) * rng.random::<f64>();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

/// Entries uniform in the unit disk.
pub fn matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim).map(|_| scalar_in_disk(rng, 1.0)).collect();
    ComplexMatrix::from_vec_unchecked(dim, data)
}

/// Entries uniform in the unit disk; redrawn in the (measure-zero) event of
/// an all-zero draw.
pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = ComplexVector::from_vec_unchecked((0..dim).map(|_| scalar_in_disk(rng, 1.0)).collect());
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: NormKind) -> ComplexVector {
    vector(rng, dim).normalized(norm).expect("nonzero by construction")
}

/// Unitary matrix from a Gram–Schmidt pass (applied twice) over a random
/// complex matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let cols = matrix(rng, dim).columns();
        if let Some(q) = orthonormalize(&cols) {
            return ComplexMatrix::from_columns(&q).expect("square");
        }
    }
}

fn orthonormalize(cols: &[ComplexVector]) -> Option<Vec<ComplexVector>> {
    let mut q: Vec<ComplexVector> = Vec::with_capacity(cols.len());
    for col in cols {
        let mut v = col.clone();
        for _ in 0..2 {
            for u in &q {
                let proj = v.dot(u).ok()?;
                v = v.sub_scaled(proj, u).ok()?;
            }
        }
        if v.norm(NormKind::Two) < 1e-8 {
            return None;
        }
        q.push(v.normalized(NormKind::Two).ok()?);
    }
    Some(q)
}

/// `U diag(eigenvalues) U*` with `U` random unitary.
pub fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, eigenvalues: &[Complex64]) -> ComplexMatrix {
    let u = unitary(rng, eigenvalues.len());
    let d = ComplexMatrix::diagonal(eigenvalues).expect("finite eigenvalues");
    u.matmul(&d).and_then(|ud| ud.matmul(&u.adjoint())).expect("square")
}

/// Normal matrix with eigenvalues uniform in the disk of radius `scale`.
pub fn random_normal_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> ComplexMatrix {
    let eigenvalues: Vec<Complex64> = (0..dim).map(|_| scalar_in_disk(rng, scale)).collect();
    normal_matrix(rng, &eigenvalues)
}

/// Operator for the identity suites: `U (D + N) U*` with `|D_ii| ∈ [0.5, 1]`
/// and a strictly upper triangular `N` of entries below `0.1`, rescaled so
/// every entry has modulus at most one. The bounded eigenvalue spread keeps
/// `‖Sⁿ‖‖S⁻ⁿ‖` moderate for `n ≤ 12`.
pub fn identity_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut core = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        core.set(i, i, scalar_in_annulus(rng, 0.5, 1.0));
        for j in i + 1..dim {
            core.set(i, j, scalar_in_disk(rng, 0.1));
        }
    }
    let u = unitary(rng, dim);
    let s = u.matmul(&core).and_then(|m| m.matmul(&u.adjoint())).expect("square");
    let peak = s.max_abs();
    if peak > 1.0 {
        s.scale(Complex64::new(1.0 / peak, 0.0))
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_columns_are_orthonormal() {
        let mut r = rng(7);
        let u = unitary(&mut r, 6);
        let gram = u.adjoint().matmul(&u).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(6)).unwrap() < 1e-13);
    }

    #[test]
    fn seeds_reproduce() {
        assert_eq!(matrix(&mut rng(3), 4), matrix(&mut rng(3), 4));
        assert_ne!(matrix(&mut rng(3), 4), matrix(&mut rng(4), 4));
    }

    #[test]
    fn identity_operator_entries_bounded() {
        let mut r = rng(11);
        for d in 1..=8 {
            assert!(identity_operator(&mut r, d).max_abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn disk_samples_stay_inside() {
        let mut r = rng(1);
        for _ in 0..1000 {
            assert!(scalar_in_disk(&mut r, 0.3).norm() <= 0.3);
        }
    }
}
