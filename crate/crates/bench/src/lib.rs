//! Seeded fixtures shared by the benchmarks.

use argmin_eig::{random, ComplexMatrix, ComplexVector};

pub fn general(dim: usize, seed: u64) -> ComplexMatrix {
    random::matrix(&mut random::rng(seed), dim)
}

pub fn normal(dim: usize, seed: u64) -> ComplexMatrix {
    random::random_normal_matrix(&mut random::rng(seed), dim, 1.0)
}

/// A well-conditioned operator for the identity checks.
pub fn identity_operator(dim: usize, seed: u64) -> ComplexMatrix {
    random::identity_operator(&mut random::rng(seed), dim)
}

pub fn rhs(dim: usize, seed: u64) -> ComplexVector {
    random::vector(&mut random::rng(seed ^ 0xb0b), dim)
}
