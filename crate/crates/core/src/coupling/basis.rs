//! Coupled bases built by sequential Clebsch–Gordan coupling along a tree.

use num_complex::Complex64;

use super::cg::cg;
use super::tree::{CouplingTree, LabelStyle, Node, Preset};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::spin_core::{check_dim, max_abs, CMatrix, CVector, ProductState, SpinSystem};

/// Spin carried by one internal (non-root) node of the coupling tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intermediate {
    /// Particles under the node, left to right.
    pub leaves: Vec<usize>,
    pub spin: HalfInt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState {
    pub total_s: HalfInt,
    pub m: HalfInt,
    /// Non-root internal nodes in pre-order.
    pub intermediates: Vec<Intermediate>,
    pub vector: CVector,
    pub label: String,
}

impl CoupledState {
    fn intermediate_key(&self) -> Vec<i32> {
        self.intermediates.iter().map(|i| i.spin.twice()).collect()
    }
}

/// A complete coupled basis for one system and tree.
#[derive(Clone, Debug)]
pub struct CoupledBasis {
    n: usize,
    preset: Option<Preset>,
    states: Vec<CoupledState>,
}

/// Amplitudes of a list of coupled states over the product states they touch.
#[derive(Clone, Debug)]
pub struct BasisTransform {
    pub rows: Vec<CoupledState>,
    /// `rows × columns` amplitudes.
    pub matrix: CMatrix,
    pub columns: Vec<ProductState>,
}

impl BasisTransform {
    pub fn row_labels(&self) -> Vec<String> {
        self.rows.iter().map(|s| s.label.clone()).collect()
    }

    pub fn column_labels(&self) -> Vec<String> {
        self.columns.iter().map(ProductState::ket).collect()
    }

    /// Largest entry of `|A A† - I|`.
    pub fn row_orthonormality_defect(&self) -> f64 {
        let g = &self.matrix * self.matrix.adjoint();
        max_abs(&(g - CMatrix::identity(self.rows.len(), self.rows.len())))
    }
}

// A multiplet of a subtree in the subtree's local product space.
struct Multiplet {
    spin: HalfInt,
    intermediates: Vec<Intermediate>,
    // components ordered m = spin, spin-1, …, -spin
    components: Vec<Vec<f64>>,
}

fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn couple_node(node: &Node) -> Result<Vec<Multiplet>> {
    match node {
        Node::Leaf(_) => Ok(vec![Multiplet {
            spin: HalfInt::HALF,
            intermediates: vec![],
            components: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        }]),
        Node::Pair(left, right) => {
            let lhs = couple_node(left)?;
            let rhs = couple_node(right)?;
            let (left_leaves, right_leaves) = (left.leaves(), right.leaves());
            let dim = 1usize << (left_leaves.len() + right_leaves.len());
            let mut out = Vec::new();
            for a in &lhs {
                for b in &rhs {
                    let mut intermediates = Vec::new();
                    if matches!(**left, Node::Pair(..)) {
                        intermediates.push(Intermediate { leaves: left_leaves.clone(), spin: a.spin });
                    }
                    intermediates.extend(a.intermediates.iter().cloned());
                    if matches!(**right, Node::Pair(..)) {
                        intermediates.push(Intermediate { leaves: right_leaves.clone(), spin: b.spin });
                    }
                    intermediates.extend(b.intermediates.iter().cloned());

                    for spin in HalfInt::triangle(a.spin, b.spin).rev() {
                        let mut components = Vec::new();
                        for m in spin.projections() {
                            let mut v = vec![0.0; dim];
                            for (ma, va) in a.spin.projections().zip(&a.components) {
                                for (mb, vb) in b.spin.projections().zip(&b.components) {
                                    let c = cg(a.spin, ma, b.spin, mb, spin, m)?;
                                    if c != 0.0 {
                                        for (o, x) in v.iter_mut().zip(kron(va, vb)) {
                                            *o += c * x;
                                        }
                                    }
                                }
                            }
                            components.push(v);
                        }
                        out.push(Multiplet { spin, intermediates: intermediates.clone(), components });
                    }
                }
            }
            Ok(out)
        }
    }
}

fn render_label(style: LabelStyle, s: HalfInt, m: HalfInt, inter: &[Intermediate]) -> String {
    let body = match style {
        LabelStyle::So4Bracket if inter.len() == 2 => {
            let (a, b) = (inter[0].spin, inter[1].spin);
            if a == HalfInt::ONE && b == HalfInt::ONE {
                "[2,2]".to_string()
            } else {
                format!("[{a},{b}]")
            }
        }
        _ if inter.is_empty() => String::new(),
        _ => {
            let parts: Vec<String> = inter.iter().map(|i| i.spin.to_string()).collect();
            format!("({})", parts.join(","))
        }
    };
    format!("|{s},{m}{body}⟩")
}

// Row order of the like-pairs M = 0 block as (2S, [2S_e, 2S_p]).
const LIKE_PAIRS_M0_ORDER: [(i32, [i32; 2]); 6] = [
    (2, [0, 2]),
    (0, [0, 0]),
    (2, [2, 0]),
    (4, [2, 2]),
    (2, [2, 2]),
    (0, [2, 2]),
];

/// Couples every particle of `system` along `tree`.
///
/// States are ordered by descending total spin, then descending
/// intermediate spins in pre-order, then descending `M`.
pub fn couple(system: &SpinSystem, tree: &CouplingTree) -> Result<CoupledBasis> {
    tree.check_system(system)?;
    let n = system.len();
    let leaves = tree.root().leaves();
    let dim = system.dimension();
    // local bit t (most significant first) belongs to particle leaves[t]
    let global: Vec<usize> = (0..dim)
        .map(|local| {
            leaves.iter().enumerate().fold(0usize, |acc, (t, &p)| {
                if local >> (n - 1 - t) & 1 == 1 {
                    acc | 1 << (n - 1 - p)
                } else {
                    acc
                }
            })
        })
        .collect();

    let mut states = Vec::with_capacity(dim);
    for multiplet in couple_node(tree.root())? {
        for (m, local) in multiplet.spin.projections().zip(multiplet.components) {
            let mut vector = CVector::zeros(dim);
            for (k, x) in local.into_iter().enumerate() {
                vector[global[k]] = Complex64::new(x, 0.0);
            }
            states.push(CoupledState {
                total_s: multiplet.spin,
                m,
                label: render_label(tree.style(), multiplet.spin, m, &multiplet.intermediates),
                intermediates: multiplet.intermediates.clone(),
                vector,
            });
        }
    }
    states.sort_by(|a, b| {
        b.total_s
            .cmp(&a.total_s)
            .then_with(|| b.intermediate_key().cmp(&a.intermediate_key()))
            .then_with(|| b.m.cmp(&a.m))
    });
    debug_assert_eq!(states.len(), dim);
    Ok(CoupledBasis { n, preset: tree.preset_kind(), states })
}

impl CoupledBasis {
    pub fn states(&self) -> &[CoupledState] {
        &self.states
    }

    pub fn into_states(self) -> Vec<CoupledState> {
        self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn preset(&self) -> Option<Preset> {
        self.preset
    }

    pub fn find(&self, label: &str) -> Option<&CoupledState> {
        self.states.iter().find(|s| s.label == label)
    }

    /// Distinct `M` values present, descending.
    pub fn m_values(&self) -> Vec<HalfInt> {
        let mut ms: Vec<HalfInt> = self.states.iter().map(|s| s.m).collect();
        ms.sort_unstable_by(|a, b| b.cmp(a));
        ms.dedup();
        ms
    }

    /// The whole basis as a square unitary.
    pub fn transform(&self) -> BasisTransform {
        let columns = (0..1usize << self.n).map(|i| ProductState::from_index(self.n, i)).collect();
        build_transform(self.states.clone(), columns)
    }

    /// The block of states with projection `m` over the product states with
    /// the same projection (ascending index).
    pub fn m_sector(&self, m: HalfInt) -> BasisTransform {
        let mut rows: Vec<CoupledState> = self.states.iter().filter(|s| s.m == m).cloned().collect();
        if self.preset == Some(Preset::LikePairs) && m == HalfInt::ZERO {
            let rank = |s: &CoupledState| {
                let key = s.intermediate_key();
                LIKE_PAIRS_M0_ORDER
                    .iter()
                    .position(|(ts, k)| *ts == s.total_s.twice() && key == k)
                    .unwrap_or(usize::MAX)
            };
            rows.sort_by_key(rank);
        }
        let columns = (0..1usize << self.n)
            .map(|i| ProductState::from_index(self.n, i))
            .filter(|p| p.m() == m)
            .collect();
        build_transform(rows, columns)
    }
}

fn build_transform(rows: Vec<CoupledState>, columns: Vec<ProductState>) -> BasisTransform {
    let matrix = CMatrix::from_fn(rows.len(), columns.len(), |r, c| rows[r].vector[columns[c].index]);
    BasisTransform { rows, matrix, columns }
}

/// `O[a, b] = ⟨A_a|B_b⟩` between two complete bases of the same system.
pub fn scheme_overlap(a: &[CoupledState], b: &[CoupledState]) -> Result<CMatrix> {
    check_dim(a.len(), b.len())?;
    let dim = a.first().map_or(0, |s| s.vector.len());
    for s in a.iter().chain(b) {
        check_dim(dim, s.vector.len())?;
    }
    if a.len() != dim {
        return Err(Error::Argument(format!(
            "overlap needs complete bases: {} states for dimension {dim}",
            a.len()
        )));
    }
    Ok(CMatrix::from_fn(a.len(), b.len(), |i, j| a[i].vector.dotc(&b[j].vector)))
}
