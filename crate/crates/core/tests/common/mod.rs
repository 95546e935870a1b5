#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use ps2spin::coupling::{couple, BasisTransform, CoupledBasis, CouplingTree};
use ps2spin::spin_core::{pauli_site, Axis, CMatrix, SpinSystem};

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn like_pairs() -> CoupledBasis {
    couple(&SpinSystem::dipositronium(), &CouplingTree::like_pairs()).unwrap()
}

pub fn positronium_pairs() -> CoupledBasis {
    couple(&SpinSystem::dipositronium(), &CouplingTree::positronium_pairs()).unwrap()
}

/// μ_z diagonal by counting signed spins bit by bit.
pub fn moment_diagonal_oracle(system: &SpinSystem) -> Vec<f64> {
    let n = system.len();
    (0..system.dimension())
        .map(|idx| {
            let mut total = 0.0;
            for (k, p) in system.particles().iter().enumerate() {
                let down = (idx >> (n - 1 - k)) & 1 == 1;
                let sigma = if down { -1.0 } else { 1.0 };
                let sign = match p.species {
                    ps2spin::spin_core::Species::Electron => -1.0,
                    ps2spin::spin_core::Species::Positron => 1.0,
                };
                total += sign * sigma;
            }
            total * system.mu0()
        })
        .collect()
}

/// `Σ_a (½ Σ_i σ_a,i)²` built from single-site Pauli matrices.
pub fn spin_squared_oracle(system: &SpinSystem) -> CMatrix {
    let dim = system.dimension();
    let mut total = CMatrix::zeros(dim, dim);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let mut s = CMatrix::zeros(dim, dim);
        for site in 0..system.len() {
            s += pauli_site(system, axis, site).unwrap().matrix().scale(0.5);
        }
        total += &s * &s;
    }
    total
}

/// Basis transform `U` (rows = coupled states) conjugating the product-basis
/// μ_z: `U diag(μ) U†`.
pub fn moment_oracle(system: &SpinSystem, rows: &CMatrix, columns: &[usize]) -> CMatrix {
    let diag = moment_diagonal_oracle(system);
    let d = CMatrix::from_fn(columns.len(), columns.len(), |i, j| {
        if i == j {
            c(diag[columns[i]])
        } else {
            c(0.0)
        }
    });
    rows * d * rows.adjoint()
}

pub fn transform_columns(t: &BasisTransform) -> Vec<usize> {
    t.columns.iter().map(|p| p.index).collect()
}

/// Clebsch–Gordan table for `j1 ⊗ j2` (doubled arguments) by applying the
/// lowering operator to highest-weight states and orthogonalizing.
/// Returns a closure-friendly map `(2m1, 2m2, 2J, 2M) -> value`.
pub fn cg_table_oracle(tj1: i32, tj2: i32) -> std::collections::HashMap<(i32, i32, i32, i32), f64> {
    let ms = |tj: i32| (0..=tj).map(move |k| tj - 2 * k).collect::<Vec<i32>>();
    let (m1s, m2s) = (ms(tj1), ms(tj2));
    let idx = |m1: i32, m2: i32| {
        let a = m1s.iter().position(|&x| x == m1).unwrap();
        let b = m2s.iter().position(|&x| x == m2).unwrap();
        a * m2s.len() + b
    };
    let dim = m1s.len() * m2s.len();
    let j = |t: i32| f64::from(t) / 2.0;
    let lower = |v: &Vec<f64>| {
        let mut out = vec![0.0; dim];
        for &m1 in &m1s {
            for &m2 in &m2s {
                let x = v[idx(m1, m2)];
                if x == 0.0 {
                    continue;
                }
                if m1 > -tj1 {
                    let f = (j(tj1) * (j(tj1) + 1.0) - j(m1) * (j(m1) - 1.0)).sqrt();
                    out[idx(m1 - 2, m2)] += f * x;
                }
                if m2 > -tj2 {
                    let f = (j(tj2) * (j(tj2) + 1.0) - j(m2) * (j(m2) - 1.0)).sqrt();
                    out[idx(m1, m2 - 2)] += f * x;
                }
            }
        }
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter().map(|x| x / norm).collect::<Vec<f64>>()
    };
    let mut table = std::collections::HashMap::new();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut tj = tj1 + tj2;
    while tj >= (tj1 - tj2).abs() {
        // highest weight: orthogonal to every found state with the same M
        let mut v = vec![0.0; dim];
        let candidates: Vec<(i32, i32)> = m1s
            .iter()
            .flat_map(|&m1| m2s.iter().map(move |&m2| (m1, m2)))
            .filter(|(m1, m2)| m1 + m2 == tj)
            .collect();
        // Gram–Schmidt seed from each candidate until a nonzero remainder
        for &(m1, m2) in &candidates {
            let mut w = vec![0.0; dim];
            w[idx(m1, m2)] = 1.0;
            for f in &found {
                let d: f64 = f.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (x, y) in w.iter_mut().zip(f) {
                    *x -= d * y;
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v = w.iter().map(|x| x / norm).collect();
                break;
            }
        }
        // Condon–Shortley: ⟨j1 j1; j2 J-j1|J J⟩ > 0
        if tj - tj1 >= -tj2 && tj - tj1 <= tj2 && v[idx(tj1, tj - tj1)] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let mut tm = tj;
        loop {
            for &m1 in &m1s {
                for &m2 in &m2s {
                    table.insert((m1, m2, tj, tm), v[idx(m1, m2)]);
                }
            }
            found.push(v.clone());
            if tm == -tj {
                break;
            }
            v = lower(&v);
            tm -= 2;
        }
        tj -= 2;
    }
    table
}

/// Finds per-row signs `s` with `actual ≈ diag(s) expected` and returns the
/// signs with the residual.
pub fn match_rows_up_to_sign(actual: &CMatrix, expected: &DMatrix<f64>) -> (Vec<i32>, f64) {
    let mut signs = Vec::new();
    let mut worst = 0.0f64;
    for r in 0..actual.nrows() {
        let dev = |s: f64| {
            (0..actual.ncols())
                .map(|k| (actual[(r, k)] - c(s * expected[(r, k)])).norm())
                .fold(0.0, f64::max)
        };
        let (p, m) = (dev(1.0), dev(-1.0));
        if p <= m {
            signs.push(1);
            worst = worst.max(p);
        } else {
            signs.push(-1);
            worst = worst.max(m);
        }
    }
    (signs, worst)
}

/// Largest deviation of `actual` from `diag(s) expected diag(s)`.
pub fn deviation_with_signs(actual: &CMatrix, expected: &DMatrix<f64>, signs: &[i32]) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..actual.nrows() {
        for k in 0..actual.ncols() {
            let e = f64::from(signs[r] * signs[k]) * expected[(r, k)];
            worst = worst.max((actual[(r, k)] - c(e)).norm());
        }
    }
    worst
}

/// Matrices as printed in the reference tables.
pub mod reference {
    use nalgebra::DMatrix;

    pub fn like_pairs_m1() -> DMatrix<f64> {
        let r = 0.5f64.sqrt();
        DMatrix::from_row_slice(4, 4, &[
            0.5, 0.5, 0.5, 0.5,
            0.5, -0.5, 0.5, -0.5,
            r, 0.0, -r, 0.0,
            0.0, r, 0.0, -r,
        ])
    }

    pub fn like_pairs_m1_moment() -> DMatrix<f64> {
        DMatrix::from_row_slice(4, 4, &[
            0.0, -1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        ]) * 2.0
    }

    pub fn like_pairs_m0() -> DMatrix<f64> {
        let a = (2.0f64 / 3.0).sqrt();
        let s2 = 2.0f64.sqrt();
        let t = 1.0 / 3.0f64.sqrt();
        DMatrix::from_row_slice(6, 6, &[
            1.0, 0.0, 1.0, -1.0, 0.0, -1.0,
            1.0, 0.0, -1.0, -1.0, 0.0, 1.0,
            1.0, 0.0, -1.0, 1.0, 0.0, -1.0,
            a, a, a, a, a, a,
            0.0, s2, 0.0, 0.0, -s2, 0.0,
            t, -2.0 * t, t, t, -2.0 * t, t,
        ]) * 0.5
    }

    pub fn like_pairs_m0_moment() -> DMatrix<f64> {
        let t = 1.0 / 3.0f64.sqrt();
        let a = (2.0f64 / 3.0).sqrt();
        let mut m = DMatrix::zeros(6, 6);
        m[(3, 4)] = t;
        m[(4, 3)] = t;
        m[(4, 5)] = a;
        m[(5, 4)] = a;
        m * -4.0
    }

    pub fn positronium_pairs_m1() -> DMatrix<f64> {
        let r = 0.5f64.sqrt();
        DMatrix::from_row_slice(4, 4, &[
            0.5, 0.5, 0.5, 0.5,
            0.5, 0.5, -0.5, -0.5,
            r, -r, 0.0, 0.0,
            0.0, 0.0, r, -r,
        ])
    }

    pub fn positronium_pairs_m1_moment() -> DMatrix<f64> {
        let r = 0.5f64.sqrt();
        DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, -r, -r,
            0.0, 0.0, -r, r,
            -r, -r, 0.0, 0.0,
            -r, r, 0.0, 0.0,
        ]) * 2.0
    }
}
