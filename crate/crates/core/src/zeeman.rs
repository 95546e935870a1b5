//! Magnetic-moment matrices in coupled bases, Zeeman-order classification
//! and level curves `E(B)` of `H(B) = H0 - B μ_z`.

use std::fmt;

use num_complex::Complex64;

use crate::coupling::{BasisTransform, CoupledState};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::par::{map_ordered, Execution};
use crate::spin_core::{eigh, magnetic_moment_z, max_abs, CMatrix, CVector, Eigen, SpinSystem};

/// Entries below this magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-10;

/// Two tracking overlaps closer than this make a curve ambiguous.
pub const TRACK_TOL: f64 = 1e-9;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// `⟨row|μ_z|col⟩` over an orthonormal set of coupled states.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    pub labels: Vec<String>,
    pub ms: Vec<HalfInt>,
    pub entries: CMatrix,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }
}

pub fn moment_matrix(system: &SpinSystem, states: &[CoupledState]) -> Result<MomentMatrix> {
    let dim = system.dimension();
    for s in states {
        if s.vector.len() != dim {
            return Err(Error::Dimension { expected: dim, found: s.vector.len() });
        }
    }
    let basis = CMatrix::from_fn(dim, states.len(), |r, c| states[c].vector[r]);
    let gram = basis.adjoint() * &basis;
    let defect = max_abs(&(gram - CMatrix::identity(states.len(), states.len())));
    if defect > ORTHONORMAL_TOL {
        return Err(Error::Contract(format!("basis rows are not orthonormal (defect {defect:e})")));
    }
    let mu = magnetic_moment_z(system);
    let mut entries = basis.adjoint() * mu.matrix() * &basis;
    // exact Hermitian symmetry; round-off only
    entries = (&entries + entries.adjoint()).scale(0.5);
    Ok(MomentMatrix {
        labels: states.iter().map(|s| s.label.clone()).collect(),
        ms: states.iter().map(|s| s.m).collect(),
        entries,
    })
}

/// Moment matrix over the rows of a basis transform (e.g. one `M` sector).
pub fn moment_matrix_of(system: &SpinSystem, block: &BasisTransform) -> Result<MomentMatrix> {
    moment_matrix(system, &block.rows)
}

/// Zero-field energy structure: a partition of the basis into groups that
/// share an unperturbed energy.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracySpec {
    groups: Vec<Vec<usize>>,
    energies: Vec<f64>,
    shared_energies: bool,
}

impl DegeneracySpec {
    /// `groups` must partition `0..n`. Distinct groups may share an energy
    /// only when `shared_energies` is set.
    pub fn new(groups: Vec<Vec<usize>>, energies: Vec<f64>, n: usize, shared_energies: bool) -> Result<Self> {
        if groups.len() != energies.len() {
            return Err(Error::Degeneracy(format!(
                "{} groups but {} energies",
                groups.len(),
                energies.len()
            )));
        }
        let mut seen = vec![false; n];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Degeneracy("empty group".into()));
            }
            for &k in g {
                if k >= n {
                    return Err(Error::Degeneracy(format!("state {k} out of range for {n} states")));
                }
                if std::mem::replace(&mut seen[k], true) {
                    return Err(Error::Degeneracy(format!("state {k} appears in more than one group")));
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::Degeneracy(format!("state {k} is not in any group")));
        }
        if let Some(e) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::Degeneracy(format!("non-finite energy {e}")));
        }
        if !shared_energies {
            for i in 0..energies.len() {
                for j in i + 1..energies.len() {
                    if energies[i] == energies[j] {
                        return Err(Error::Degeneracy(format!(
                            "groups {i} and {j} share energy {} without being flagged",
                            energies[i]
                        )));
                    }
                }
            }
        }
        Ok(DegeneracySpec { groups, energies, shared_energies })
    }

    /// Every state is its own group, all at zero energy.
    pub fn singletons(n: usize) -> Self {
        DegeneracySpec { groups: (0..n).map(|k| vec![k]).collect(), energies: vec![0.0; n], shared_energies: true }
    }

    /// Groups states with exactly equal energies.
    pub fn from_state_energies(energies: &[f64]) -> Result<Self> {
        let mut distinct: Vec<f64> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, &e) in energies.iter().enumerate() {
            match distinct.iter().position(|&d| d == e) {
                Some(g) => groups[g].push(k),
                None => {
                    distinct.push(e);
                    groups.push(vec![k]);
                }
            }
        }
        Self::new(groups, distinct, energies.len(), false)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn shared_energies(&self) -> bool {
        self.shared_energies
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Unperturbed energy of each basis state.
    pub fn state_energies(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (g, e) in self.groups.iter().zip(&self.energies) {
            for &k in g {
                out[k] = *e;
            }
        }
        out
    }

    fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (gi, g) in self.groups.iter().enumerate() {
            for &k in g {
                out[k] = gi;
            }
        }
        out
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::Degeneracy(format!(
                "spec covers {} states but the matrix has {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeemanOrder {
    Linear,
    Quadratic,
    None,
}

impl fmt::Display for ZeemanOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeemanOrder::Linear => "LINEAR",
            ZeemanOrder::Quadratic => "QUADRATIC",
            ZeemanOrder::None => "NONE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StateReport {
    pub label: String,
    pub m: HalfInt,
    pub group: usize,
    /// First-order `⟨μ_z⟩` of the zeroth-order state.
    pub moment: f64,
    /// `dE/dB` at zero field, `-moment`.
    pub linear_slope: f64,
    pub classification: ZeemanOrder,
    pub quadratic_partners: Vec<String>,
    /// Zeroth-order state as coefficients over the matrix basis.
    pub adapted: CVector,
}

#[derive(Clone, Debug)]
pub struct ZeemanReport {
    pub states: Vec<StateReport>,
}

impl ZeemanReport {
    pub fn count(&self, order: ZeemanOrder) -> usize {
        self.states.iter().filter(|s| s.classification == order).count()
    }

    pub fn find(&self, label: &str) -> Option<&StateReport> {
        self.states.iter().find(|s| s.label == label)
    }
}

fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

// Fixes the phase so the largest component is real and positive.
fn normalize_phase(v: &mut CVector) {
    let mut best = 0;
    for k in 0..v.len() {
        if v[k].norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Zeroth-order states of each group: eigenvectors of `μ_z` restricted to
/// the group, each assigned to the group member it overlaps most.
fn adapted_states(matrix: &MomentMatrix, spec: &DegeneracySpec) -> Vec<(f64, CVector)> {
    let n = matrix.dim();
    let mut out = vec![(0.0, CVector::zeros(n)); n];
    for group in spec.groups() {
        let Eigen { values, vectors } = eigh(&restrict(&matrix.entries, group));
        let mut taken = vec![false; group.len()];
        for (pos, &member) in group.iter().enumerate() {
            let mut pick = None::<(usize, f64)>;
            for e in 0..group.len() {
                if taken[e] {
                    continue;
                }
                let w = vectors[(pos, e)].norm_sqr();
                if pick.is_none_or(|(_, best)| w > best + 1e-12) {
                    pick = Some((e, w));
                }
            }
            let (e, _) = pick.expect("one eigenvector per member");
            taken[e] = true;
            let mut v = CVector::zeros(n);
            for (r, &k) in group.iter().enumerate() {
                v[k] = vectors[(r, e)];
            }
            normalize_phase(&mut v);
            out[member] = (values[e], v);
        }
    }
    out
}

/// First-order classification with degenerate perturbation theory inside
/// each group. The energy shift is `-⟨μ_z⟩ B`.
pub fn classify(matrix: &MomentMatrix, spec: &DegeneracySpec) -> Result<ZeemanReport> {
    let n = matrix.dim();
    spec.check(n)?;
    let group_of = spec.group_of();
    let states = adapted_states(matrix, spec)
        .into_iter()
        .enumerate()
        .map(|(k, (moment, adapted))| {
            let row = adapted.adjoint() * &matrix.entries;
            let quadratic_partners = (0..n)
                .filter(|&j| group_of[j] != group_of[k] && row[j].norm() > ZERO_TOL)
                .map(|j| matrix.labels[j].clone())
                .collect::<Vec<_>>();
            let linear_slope = if moment.abs() > ZERO_TOL { -moment } else { 0.0 };
            let classification = if linear_slope != 0.0 {
                ZeemanOrder::Linear
            } else if !quadratic_partners.is_empty() {
                ZeemanOrder::Quadratic
            } else {
                ZeemanOrder::None
            };
            StateReport {
                label: matrix.labels[k].clone(),
                m: matrix.ms[k],
                group: group_of[k],
                moment,
                linear_slope,
                classification,
                quadratic_partners,
                adapted,
            }
        })
        .collect();
    Ok(ZeemanReport { states })
}

/// Coefficient of `B²` in each state's energy,
/// `Σ_{m outside the group} |⟨n|μ_z|m⟩|² / (E_n - E_m)`, in report order.
pub fn quadratic_coefficients(matrix: &MomentMatrix, spec: &DegeneracySpec) -> Result<Vec<f64>> {
    let n = matrix.dim();
    spec.check(n)?;
    let group_of = spec.group_of();
    let energy = spec.state_energies();
    let scale = energy.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    adapted_states(matrix, spec)
        .into_iter()
        .enumerate()
        .map(|(k, (_, adapted))| {
            let row = adapted.adjoint() * &matrix.entries;
            let mut total = 0.0;
            for j in 0..n {
                if group_of[j] == group_of[k] {
                    continue;
                }
                let w = row[j].norm_sqr();
                if w.sqrt() <= ZERO_TOL {
                    continue;
                }
                let gap = energy[k] - energy[j];
                if gap.abs() <= 1e-12 * scale {
                    return Err(Error::Singular(format!(
                        "{} and {} are coupled by μ_z but share energy {}; merge their groups",
                        matrix.labels[k], matrix.labels[j], energy[k]
                    )));
                }
                total += w / gap;
            }
            Ok(total)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub energies: Vec<f64>,
    /// Set when continuation could not tell two levels apart.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCurves {
    pub fields: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl LevelCurves {
    /// `(B, label, energy)` rows sorted by field then label.
    pub fn rows(&self) -> Vec<(f64, &str, f64)> {
        let mut rows = Vec::with_capacity(self.fields.len() * self.curves.len());
        for (i, &b) in self.fields.iter().enumerate() {
            let mut at_b: Vec<(f64, &str, f64)> =
                self.curves.iter().map(|c| (b, c.label.as_str(), c.energies[i])).collect();
            at_b.sort_by(|x, y| x.1.cmp(y.1));
            rows.extend(at_b);
        }
        rows
    }

    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

/// Evenly spaced grid from `b_min` to `b_max` that also contains `B = 0`.
pub fn field_grid(b_min: f64, b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(b_min.is_finite() && b_max.is_finite()) || b_min > b_max {
        return Err(Error::Argument(format!("invalid field range [{b_min}, {b_max}]")));
    }
    if b_min > 0.0 || b_max < 0.0 {
        return Err(Error::Argument(format!("field range [{b_min}, {b_max}] must include 0")));
    }
    let mut grid: Vec<f64> = if steps == 0 || b_min == b_max {
        vec![b_min]
    } else {
        (0..=steps).map(|k| b_min + (b_max - b_min) * k as f64 / steps as f64).collect()
    };
    if !grid.contains(&0.0) {
        grid.push(0.0);
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid.into_iter().map(|b| if b == 0.0 { 0.0 } else { b }).collect())
}

pub fn level_curves(matrix: &MomentMatrix, spec: &DegeneracySpec, fields: &[f64]) -> Result<LevelCurves> {
    level_curves_with(matrix, spec, fields, Execution::default())
}

/// Eigenvalues of `H0 - B μ_z` on every grid point, followed from `B = 0`
/// outwards by maximal eigenvector overlap.
pub fn level_curves_with(
    matrix: &MomentMatrix,
    spec: &DegeneracySpec,
    fields: &[f64],
    exec: Execution,
) -> Result<LevelCurves> {
    let n = matrix.dim();
    spec.check(n)?;
    if fields.iter().any(|b| !b.is_finite()) {
        return Err(Error::Argument("field grid has non-finite values".into()));
    }
    if fields.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("field grid must be strictly increasing".into()));
    }
    let origin = fields
        .iter()
        .position(|&b| b == 0.0)
        .ok_or_else(|| Error::Argument("field grid must include B = 0".into()))?;

    let h0 = spec.state_energies();
    let spectra = map_ordered(fields, exec, |&b| {
        let mut h = matrix.entries.scale(-b);
        for (k, e) in h0.iter().enumerate() {
            h[(k, k)] += Complex64::new(*e, 0.0);
        }
        eigh(&h)
    });

    let mut energies = vec![vec![0.0; fields.len()]; n];
    let mut ambiguous = vec![false; n];
    for k in 0..n {
        energies[k][origin] = h0[k];
    }
    let start: Vec<CVector> = (0..n).map(|k| crate::spin_core::basis_vector(n, k)).collect();
    for path in [(origin + 1..fields.len()).collect::<Vec<_>>(), (0..origin).rev().collect()] {
        let mut prev = start.clone();
        for i in path {
            let eig = &spectra[i];
            let assignment = track(&prev, &eig.vectors, &mut ambiguous);
            for (k, &j) in assignment.iter().enumerate() {
                energies[k][i] = eig.values[j];
                prev[k] = eig.vectors.column(j).into_owned();
            }
        }
    }
    let curves = (0..n)
        .map(|k| Curve { label: matrix.labels[k].clone(), energies: energies[k].clone(), ambiguous: ambiguous[k] })
        .collect();
    Ok(LevelCurves { fields: fields.to_vec(), curves })
}

// Greedy maximal-overlap matching of previous vectors onto new eigenvectors.
fn track(prev: &[CVector], vectors: &CMatrix, ambiguous: &mut [bool]) -> Vec<usize> {
    let n = prev.len();
    let overlap: Vec<Vec<f64>> = prev
        .iter()
        .map(|p| (0..n).map(|j| p.dotc(&vectors.column(j)).norm_sqr()).collect())
        .collect();
    for (k, row) in overlap.iter().enumerate() {
        let mut sorted = row.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if n > 1 && sorted[0] - sorted[1] < TRACK_TOL {
            ambiguous[k] = true;
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..n).map(move |j| (k, j))).collect();
    pairs.sort_by(|a, b| overlap[b.0][b.1].total_cmp(&overlap[a.0][a.1]).then(a.cmp(b)));
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (k, j) in pairs {
        if assignment[k] == usize::MAX && !used[j] {
            assignment[k] = j;
            used[j] = true;
        }
    }
    assignment
}
