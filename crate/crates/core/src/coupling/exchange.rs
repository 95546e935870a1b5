//! Particle-exchange operators and per-state exchange parities.

use std::fmt;

use num_complex::Complex64;

use super::basis::CoupledState;
use crate::error::{Error, Result};
use crate::spin_core::{check_dim, swap_bits, CMatrix, Operator, SpinSystem};

const EIGEN_TOL: f64 = 1e-10;

/// Permutation matrix swapping the spins of particles `i` and `j`.
pub fn exchange_operator(system: &SpinSystem, i: usize, j: usize) -> Result<Operator> {
    let n = system.len();
    if i >= n || j >= n {
        return Err(Error::Argument(format!("exchange ({i},{j}) out of range for {n} particles")));
    }
    if i == j {
        return Err(Error::Argument(format!("exchange needs two distinct particles, got ({i},{i})")));
    }
    let dim = system.dimension();
    let (a, b) = (1 << (n - 1 - i), 1 << (n - 1 - j));
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(swap_bits(col, a, b), col)] = Complex64::new(1.0, 0.0);
    }
    Operator::new(m, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
    /// Not an eigenstate of the exchange.
    Mixed,
}

impl Parity {
    pub fn sign(self) -> Option<i32> {
        match self {
            Parity::Symmetric => Some(1),
            Parity::Antisymmetric => Some(-1),
            Parity::Mixed => None,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Symmetric => "+1",
            Parity::Antisymmetric => "-1",
            Parity::Mixed => "mixed",
        })
    }
}

/// Exchange parity of each state (outer) under each pair (inner).
pub fn classify_exchange(
    system: &SpinSystem,
    states: &[CoupledState],
    pairs: &[(usize, usize)],
) -> Result<Vec<Vec<Parity>>> {
    let ops = pairs
        .iter()
        .map(|&(i, j)| exchange_operator(system, i, j))
        .collect::<Result<Vec<_>>>()?;
    states
        .iter()
        .map(|s| {
            check_dim(system.dimension(), s.vector.len())?;
            ops.iter()
                .map(|op| {
                    let swapped = op.apply(&s.vector)?;
                    let parity = if (&swapped - &s.vector).norm() <= EIGEN_TOL {
                        Parity::Symmetric
                    } else if (&swapped + &s.vector).norm() <= EIGEN_TOL {
                        Parity::Antisymmetric
                    } else {
                        Parity::Mixed
                    };
                    Ok(parity)
                })
                .collect()
        })
        .collect()
}

/// All pairs of particles with the same species, in index order.
pub fn like_particle_pairs(system: &SpinSystem) -> Vec<(usize, usize)> {
    let p = system.particles();
    let mut out = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i].species == p[j].species {
                out.push((i, j));
            }
        }
    }
    out
}
