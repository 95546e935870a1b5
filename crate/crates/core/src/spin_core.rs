//! Product-basis representation of small systems of spin-½ particles.
//!
//! Basis states are indexed with the leftmost particle as the most
//! significant bit and `↑ = 0`, so `|↑↑↑↓⟩` of a four-particle system has
//! index 1.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::half::HalfInt;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest supported number of particles.
pub const MAX_PARTICLES: usize = 12;

/// Tolerance used when verifying a hermiticity claim.
pub const HERMITIAN_TOL: f64 = 1e-12;

const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    Electron,
    Positron,
}

impl Species {
    /// Sign of the particle's magnetic moment along its spin, in units of μ0.
    pub fn moment_sign(self) -> f64 {
        match self {
            Species::Electron => -1.0,
            Species::Positron => 1.0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Species::Electron => 'e',
            Species::Positron => 'p',
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "e" | "electron" | "e-" => Ok(Species::Electron),
            "p" | "positron" | "e+" => Ok(Species::Positron),
            other => Err(Error::Argument(format!(
                "unknown species '{other}' (expected electron/e or positron/p)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSpec {
    pub index: usize,
    pub species: Species,
}

impl ParticleSpec {
    pub fn moment_sign(&self) -> f64 {
        self.species.moment_sign()
    }
}

/// An ordered collection of spin-½ particles sharing one moment unit `mu0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem {
    particles: Vec<ParticleSpec>,
    names: Vec<String>,
    mu0: f64,
}

impl SpinSystem {
    pub fn new(species: &[Species]) -> Result<Self> {
        if species.is_empty() {
            return Err(Error::Argument("a spin system needs at least one particle".into()));
        }
        if species.len() > MAX_PARTICLES {
            return Err(Error::Argument(format!(
                "{} particles requested; at most {MAX_PARTICLES} are supported",
                species.len()
            )));
        }
        let particles = species
            .iter()
            .enumerate()
            .map(|(index, &species)| ParticleSpec { index, species })
            .collect::<Vec<_>>();
        // e1, p1, e2, ... numbered per species in order of appearance
        let mut counts = [0usize; 2];
        let names = species
            .iter()
            .map(|s| {
                let slot = match s {
                    Species::Electron => 0,
                    Species::Positron => 1,
                };
                counts[slot] += 1;
                format!("{}{}", s.letter(), counts[slot])
            })
            .collect();
        Ok(SpinSystem { particles, names, mu0: 1.0 })
    }

    /// Two electrons and two positrons in the order `(e1, p1, e2, p2)`.
    pub fn dipositronium() -> Self {
        use Species::*;
        Self::new(&[Electron, Positron, Electron, Positron]).expect("preset is valid")
    }

    /// One electron and one positron, `(e1, p1)`.
    pub fn positronium() -> Self {
        Self::new(&[Species::Electron, Species::Positron]).expect("preset is valid")
    }

    pub fn with_mu0(mut self, mu0: f64) -> Result<Self> {
        if !mu0.is_finite() {
            return Err(Error::Argument(format!("mu0 must be finite, got {mu0}")));
        }
        self.mu0 = mu0;
        Ok(self)
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn particles(&self) -> &[ParticleSpec] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn dimension(&self) -> usize {
        1 << self.particles.len()
    }

    /// Particle name such as `e1` or `p2`.
    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name.trim())
    }

    fn bit(&self, site: usize) -> usize {
        1 << (self.len() - 1 - site)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.len() {
            return Err(Error::Argument(format!(
                "site {site} out of range for {} particles",
                self.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// A computational basis state of the product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductState {
    pub bits: Vec<Spin>,
    pub index: usize,
}

impl ProductState {
    pub fn from_index(n: usize, index: usize) -> Self {
        let bits = (0..n)
            .map(|k| {
                if index >> (n - 1 - k) & 1 == 0 {
                    Spin::Up
                } else {
                    Spin::Down
                }
            })
            .collect();
        ProductState { bits, index }
    }

    pub fn from_bits(bits: Vec<Spin>) -> Self {
        let index = bits
            .iter()
            .fold(0usize, |acc, s| (acc << 1) | usize::from(*s == Spin::Down));
        ProductState { bits, index }
    }

    /// Parses a ket written with arrows, e.g. `|↑↑↓↑⟩` or `↑↑↓↑`.
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('|').trim_end_matches('⟩');
        let bits = inner
            .chars()
            .map(|c| match c {
                '↑' | 'u' | 'U' => Ok(Spin::Up),
                '↓' | 'd' | 'D' => Ok(Spin::Down),
                other => Err(Error::Argument(format!("unexpected character '{other}' in ket"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::Argument("empty ket".into()));
        }
        Ok(Self::from_bits(bits))
    }

    /// Total spin projection `(ups - downs) / 2`.
    pub fn m(&self) -> HalfInt {
        let ups = self.bits.iter().filter(|s| **s == Spin::Up).count() as i32;
        HalfInt::from_twice(2 * ups - self.bits.len() as i32)
    }

    pub fn ket(&self) -> String {
        let arrows: String = self
            .bits
            .iter()
            .map(|s| if *s == Spin::Up { '↑' } else { '↓' })
            .collect();
        format!("|{arrows}⟩")
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ket())
    }
}

/// Product states of an `n`-particle system, in index order.
pub fn product_states(n: usize) -> Vec<ProductState> {
    (0..1usize << n).map(|i| ProductState::from_index(n, i)).collect()
}

/// Dense complex matrix acting on a product space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    hermitian_hint: bool,
}

impl Operator {
    /// Wraps a square matrix. A hermiticity claim is checked, not trusted.
    pub fn new(matrix: CMatrix, hermitian_hint: bool) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Argument("operator has non-finite entries".into()));
        }
        let op = Operator { matrix, hermitian_hint };
        if hermitian_hint {
            let dev = op.hermiticity_defect();
            if dev > HERMITIAN_TOL {
                return Err(Error::Contract(format!(
                    "operator flagged Hermitian deviates by {dev:e}"
                )));
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        check_dim(self.dim(), v.len())?;
        Ok(&self.matrix * v)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Operator) -> Result<CMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pauli matrix `σ_axis` acting on one site, identity elsewhere.
pub fn pauli_site(system: &SpinSystem, axis: Axis, site: usize) -> Result<Operator> {
    system.check_site(site)?;
    let dim = system.dimension();
    let bit = system.bit(site);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let down = col & bit != 0;
        match axis {
            Axis::X => m[(col ^ bit, col)] = Complex64::new(1.0, 0.0),
            // σ_y|↑⟩ = i|↓⟩, σ_y|↓⟩ = -i|↑⟩
            Axis::Y => {
                m[(col ^ bit, col)] = if down {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(0.0, 1.0)
                }
            }
            Axis::Z => m[(col, col)] = Complex64::new(if down { -1.0 } else { 1.0 }, 0.0),
        }
    }
    Operator::new(m, true)
}

fn diagonal_operator(dim: usize, f: impl Fn(usize) -> f64) -> Operator {
    let diag = CVector::from_iterator(dim, (0..dim).map(|i| Complex64::new(f(i), 0.0)));
    Operator { matrix: CMatrix::from_diagonal(&diag), hermitian_hint: true }
}

/// `S_z = ½ Σ σ_z`.
pub fn total_spin_z(system: &SpinSystem) -> Operator {
    let n = system.len();
    diagonal_operator(system.dimension(), |i| {
        ProductState::from_index(n, i).m().value()
    })
}

/// `S² = 3N/4 + Σ_{i<j} (P_ij - ½)`, with `P_ij` the swap of sites `i` and `j`.
pub fn total_spin_squared(system: &SpinSystem) -> Operator {
    let n = system.len();
    let dim = system.dimension();
    let pairs = n * (n - 1) / 2;
    let mut m = CMatrix::zeros(dim, dim);
    let constant = 0.75 * n as f64 - 0.5 * pairs as f64;
    for col in 0..dim {
        m[(col, col)] += Complex64::new(constant, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                m[(swap_bits(col, system.bit(i), system.bit(j)), col)] += Complex64::new(1.0, 0.0);
            }
        }
    }
    Operator { matrix: m, hermitian_hint: true }
}

pub(crate) fn swap_bits(index: usize, a: usize, b: usize) -> usize {
    let (ba, bb) = (index & a != 0, index & b != 0);
    if ba == bb {
        index
    } else {
        index ^ a ^ b
    }
}

/// `μ_z = μ0 Σ sign_i σ_z,i`; diagonal in the product basis.
pub fn magnetic_moment_z(system: &SpinSystem) -> Operator {
    let n = system.len();
    let mu0 = system.mu0();
    diagonal_operator(system.dimension(), |i| {
        mu0 * system
            .particles()
            .iter()
            .map(|p| {
                let up = i >> (n - 1 - p.index) & 1 == 0;
                p.moment_sign() * if up { 1.0 } else { -1.0 }
            })
            .sum::<f64>()
    })
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Diagonalizes an operator whose hermiticity has been verified.
pub fn hermitian_eigen(op: &Operator) -> Result<Eigen> {
    if !op.hermitian_hint {
        return Err(Error::Contract("hermitian_eigen requires a Hermitian operator".into()));
    }
    let dev = op.hermiticity_defect();
    if dev > HERMITIAN_TOL {
        return Err(Error::Contract(format!("operator is not Hermitian (defect {dev:e})")));
    }
    Ok(eigh(op.matrix()))
}

/// Hermitian eigendecomposition of a raw matrix, sorted ascending.
pub(crate) fn eigh(m: &CMatrix) -> Eigen {
    let n = m.nrows();
    if n == 0 {
        return Eigen { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    // symmetrize so round-off cannot leak an anti-Hermitian part into the solver
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigen { values, vectors }
}

/// `⟨bra|op|ket⟩` for normalized vectors.
pub fn matrix_element(bra: &CVector, op: &Operator, ket: &CVector) -> Result<Complex64> {
    check_dim(op.dim(), bra.len())?;
    check_dim(op.dim(), ket.len())?;
    for v in [bra, ket] {
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("vector norm {norm} is not 1")));
        }
    }
    Ok(bra.dotc(&(op.matrix() * ket)))
}

/// Unit vector on one product state.
pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = Complex64::new(1.0, 0.0);
    v
}
