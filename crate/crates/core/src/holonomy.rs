//! Holonomy of the Bismut connection through its invariant-subspace lattice.
//!
//! The operator span is the smallest subspace of `End(𝔤)` containing every
//! `R(e_i, e_j)` and closed under `A ↦ Λ_{e_k}·A`; it contains every
//! generator `Λ_{X_1}···Λ_{X_k}R(X,Y)`, so a subspace is holonomy-invariant
//! iff every span element preserves it.

use std::fmt;

use serde::Serialize;

use crate::compactform::CompactAlgebra;
use crate::connection::{CurvatureSet, NomizuOperator};
use crate::error::{Error, Result};
use crate::hermitian::SktParameters;
use crate::linalg::{inner, is_zero_vector, unit_vector, Echelon, Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct OperatorSpan {
    dim: usize,
    basis: Vec<Matrix>,
    generation_log: Vec<usize>,
}

fn flatten(m: &Matrix) -> Vector {
    m.as_slice().to_vec()
}

fn unflatten(n: usize, v: &[Scalar]) -> Matrix {
    Matrix::from_fn(n, n, |i, j| v[i * n + j].clone())
}

/// Closes `{R(e_i,e_j)}` under left composition with every `Λ_{e_k}`.
/// `generation_log[r]` is the span dimension after round `r`; round 0 holds
/// the curvature endomorphisms.
pub fn generate_span(lambda: &NomizuOperator, curv: &CurvatureSet, alg: &CompactAlgebra) -> OperatorSpan {
    let n = alg.dim();
    let mut ech = Echelon::new(n * n);
    let mut fresh = Vec::new();
    for (_, _, r) in curv.iter() {
        if ech.insert(flatten(r)) {
            fresh.push(r.clone());
        }
    }
    let mut log = vec![ech.dim()];
    log::debug!("holonomy span round 0: dim {}", ech.dim());
    while !fresh.is_empty() {
        let mut next = Vec::new();
        for a in &fresh {
            for l in lambda.ops() {
                let p = l.mul(a);
                if ech.insert(flatten(&p)) {
                    next.push(p);
                }
            }
        }
        fresh = next;
        log.push(ech.dim());
        log::debug!("holonomy span round {}: dim {}", log.len() - 1, ech.dim());
    }
    let basis = ech.rows().map(|v| unflatten(n, v)).collect();
    OperatorSpan {
        dim: n,
        basis,
        generation_log: log,
    }
}

/// First `(operator, row, column)` entry moving a coordinate subspace out of
/// itself.
pub type Witness = (usize, usize, usize);

impl OperatorSpan {
    /// Span of explicit operators, without closure.
    pub fn from_operators(dim: usize, ops: &[Matrix]) -> Self {
        let mut ech = Echelon::new(dim * dim);
        for m in ops {
            ech.insert(flatten(m));
        }
        let basis: Vec<Matrix> = ech.rows().map(|v| unflatten(dim, v)).collect();
        let log = vec![basis.len()];
        Self {
            dim,
            basis,
            generation_log: log,
        }
    }

    /// Number of linearly independent operators.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Dimension of the space acted on.
    pub fn ambient(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn generation_log(&self) -> &[usize] {
        &self.generation_log
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        let mut ech = Echelon::new(self.dim * self.dim);
        for b in &self.basis {
            ech.insert(flatten(b));
        }
        ech.contains(&flatten(m))
    }

    /// First `(k, basis index)` with `Λ_{e_k}·A` outside the span.
    pub fn closure_violation(&self, lambda: &NomizuOperator) -> Option<(usize, usize)> {
        let mut ech = Echelon::new(self.dim * self.dim);
        for b in &self.basis {
            ech.insert(flatten(b));
        }
        for (i, a) in self.basis.iter().enumerate() {
            for (k, l) in lambda.ops().iter().enumerate() {
                if !ech.contains(&flatten(&l.mul(a))) {
                    return Some((k, i));
                }
            }
        }
        None
    }

    /// Common kernel, canonical basis.
    pub fn common_kernel(&self) -> Vec<Vector> {
        let n = self.dim;
        if self.basis.is_empty() {
            return (0..n).map(|i| unit_vector(n, i)).collect();
        }
        let mut rows = Vec::new();
        for a in &self.basis {
            for r in 0..n {
                rows.push(a.row(r).to_vec());
            }
        }
        let stacked = Matrix::from_rows(rows);
        let k = stacked.kernel();
        crate::linalg::span_basis(n, k)
    }

    /// First operator entry moving the coordinate subspace spanned by
    /// `indices` outside itself.
    pub fn preserves_coordinates(&self, indices: &[usize]) -> Option<Witness> {
        for (k, a) in self.basis.iter().enumerate() {
            for &c in indices {
                for r in 0..self.dim {
                    if !indices.contains(&r) && !a[(r, c)].is_zero() {
                        return Some((k, r, c));
                    }
                }
            }
        }
        None
    }

    /// First operator entry not killing a basis vector in `indices`.
    pub fn annihilates_coordinates(&self, indices: &[usize]) -> Option<Witness> {
        for (k, a) in self.basis.iter().enumerate() {
            for &c in indices {
                for r in 0..self.dim {
                    if !a[(r, c)].is_zero() {
                        return Some((k, r, c));
                    }
                }
            }
        }
        None
    }

    /// Whether every operator maps `span(basis)` into itself.
    pub fn preserves(&self, basis: &[Vector]) -> bool {
        let mut ech = Echelon::new(self.dim);
        for v in basis {
            ech.insert(v.clone());
        }
        self.basis
            .iter()
            .all(|a| basis.iter().all(|v| ech.contains(&a.apply(v))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockLabel {
    Torus,
    RootSpace { root: usize },
    /// Coordinate sum of at least two root spaces inside one simple factor.
    Residual { factor: usize, roots: Vec<usize> },
    TrivialWhole,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: BlockLabel,
    pub basis: Vec<Vector>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolonomyDecomposition {
    pub blocks: Vec<Block>,
    pub trivial_part: Vec<Vector>,
}

/// Basis indices where some block vector is nonzero.
fn support(basis: &[Vector]) -> Vec<usize> {
    let n = basis.first().map_or(0, Vec::len);
    (0..n).filter(|&i| basis.iter().any(|v| !v[i].is_zero())).collect()
}

fn label_block(alg: &CompactAlgebra, basis: &[Vector]) -> BlockLabel {
    let supp = support(basis);
    // a coordinate subspace has as many basis vectors as support indices
    if supp.len() != basis.len() {
        return BlockLabel::Mixed;
    }
    let r = alg.rank();
    if supp == (0..r).collect::<Vec<_>>() {
        return BlockLabel::Torus;
    }
    if supp.iter().any(|&i| i < r) {
        return BlockLabel::Mixed;
    }
    let mut roots: Vec<usize> = supp.iter().map(|&i| (i - r) / 2).collect();
    roots.dedup();
    if roots.iter().any(|&a| !supp.contains(&alg.x_index(a)) || !supp.contains(&alg.y_index(a))) {
        return BlockLabel::Mixed;
    }
    let rs = alg.root_system();
    let factor = rs.factor_of_root(roots[0]);
    if roots.iter().any(|&a| rs.factor_of_root(a) != factor) {
        return BlockLabel::Mixed;
    }
    if roots.len() == 1 {
        BlockLabel::RootSpace { root: roots[0] }
    } else {
        BlockLabel::Residual { factor, roots }
    }
}

/// `A^* = g⁻¹ Aᵀ g`.
fn adjoint(a: &Matrix, g: &Matrix, ginv: &Matrix) -> Matrix {
    ginv.mul(&a.transpose()).mul(g)
}

/// Splits `𝔤` into span-invariant, pairwise `g`-orthogonal blocks.
///
/// Orbits are closed under the span, its `g`-adjoint and `J`; the first two
/// keep every orthocomplement invariant, and `J` commutes with the holonomy.
/// Blocks are found, not certified irreducible.
pub fn invariant_decomposition(span: &OperatorSpan, g: &Matrix, j: &Matrix, alg: &CompactAlgebra) -> HolonomyDecomposition {
    let n = alg.dim();
    let trivial_part = span.common_kernel();
    if span.is_empty() {
        return HolonomyDecomposition {
            blocks: vec![Block {
                label: BlockLabel::TrivialWhole,
                basis: (0..n).map(|i| unit_vector(n, i)).collect(),
            }],
            trivial_part,
        };
    }
    let ginv = g.inverse().expect("metric is invertible");
    let mut ops: Vec<Matrix> = span.basis().to_vec();
    ops.extend(span.basis().iter().map(|a| adjoint(a, g, &ginv)));
    ops.push(j.clone());

    let mut covered = Echelon::new(n);
    let mut covered_basis: Vec<Vector> = Vec::new();
    let mut blocks = Vec::new();

    let torus: Vec<Vector> = (0..alg.rank()).map(|i| unit_vector(n, i)).collect();
    let mut kernel = Echelon::new(n);
    for v in &trivial_part {
        kernel.insert(v.clone());
    }
    if !torus.is_empty() && torus.iter().all(|v| kernel.contains(v)) {
        for v in &torus {
            covered.insert(v.clone());
            covered_basis.push(v.clone());
        }
        blocks.push(Block {
            label: BlockLabel::Torus,
            basis: torus,
        });
    }

    for i in 0..n {
        let e = unit_vector(n, i);
        if covered.contains(&e) {
            continue;
        }
        let v = orthogonal_remainder(g, &covered_basis, e);
        let mut orbit = Echelon::new(n);
        orbit.insert(v.clone());
        let mut queue = vec![v];
        while let Some(w) = queue.pop() {
            for a in &ops {
                let aw = a.apply(&w);
                if orbit.insert(aw.clone()) {
                    queue.push(aw);
                }
            }
        }
        let basis = orbit.canonical_basis();
        for b in &basis {
            covered.insert(b.clone());
            covered_basis.push(b.clone());
        }
        blocks.push(Block {
            label: label_block(alg, &basis),
            basis,
        });
    }
    HolonomyDecomposition { blocks, trivial_part }
}

/// `e − P_W e` for the `g`-orthogonal projection onto `span(w)`.
fn orthogonal_remainder(g: &Matrix, w: &[Vector], e: Vector) -> Vector {
    if w.is_empty() {
        return e;
    }
    let gram = Matrix::from_fn(w.len(), w.len(), |a, b| inner(g, &w[a], &w[b]));
    let rhs: Vector = w.iter().map(|u| inner(g, u, &e)).collect();
    let coef = gram.inverse().expect("subspace basis is independent").apply(&rhs);
    let mut out = e;
    for (c, u) in coef.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(u) {
            *o -= &(c * x);
        }
    }
    out
}

impl HolonomyDecomposition {
    /// First block pair that is not `g`-orthogonal.
    pub fn orthogonality_violation(&self, g: &Matrix) -> Option<(usize, usize)> {
        for a in 0..self.blocks.len() {
            for b in a + 1..self.blocks.len() {
                for u in &self.blocks[a].basis {
                    for v in &self.blocks[b].basis {
                        if !inner(g, u, v).is_zero() {
                            return Some((a, b));
                        }
                    }
                }
            }
        }
        None
    }

    /// Total dimension of the blocks.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(Block::dim).sum()
    }

    /// Whether the blocks together span `𝔤`.
    pub fn spans(&self, n: usize) -> bool {
        let mut e = Echelon::new(n);
        for b in &self.blocks {
            for v in &b.basis {
                e.insert(v.clone());
            }
        }
        e.dim() == n
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Clause {
    fn new(name: impl Into<String>, witness: Option<Witness>) -> Self {
        Self {
            name: name.into(),
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub clauses: Vec<Clause>,
    /// Computed blocks coincide with `𝔱`, each `𝔤_α` for `α ∈ Δ_{I_max}`,
    /// and the per-factor residual sums.
    pub matches_prediction: bool,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

/// Coordinate checks of the predicted splitting
/// `𝔱 ⊕ ⊕_{α∈Δ_{I_max}} 𝔤_α ⊕ Σ_{α∈Δ⁺∖Δ_{I_max}} 𝔤_α` and of the simple factors.
pub fn label_and_compare(
    dec: &HolonomyDecomposition,
    span: &OperatorSpan,
    skt: &SktParameters,
    alg: &CompactAlgebra,
) -> Result<ComparisonReport> {
    let rs = alg.root_system();
    if span.ambient() != alg.dim() || skt.c_all.len() != rs.num_positive() {
        return Err(Error::Shape("holonomy data and SKT parameters describe different algebras".into()));
    }
    let mut clauses = vec![Clause::new("torus_trivial", span.annihilates_coordinates(&alg.torus_indices()))];
    for &a in &skt.delta_i_max {
        clauses.push(Clause::new(
            format!("root_space_invariant[{}]", rs.root_label(a)),
            span.preserves_coordinates(&alg.root_block(a)),
        ));
    }
    let residual_roots: Vec<usize> = (0..rs.num_positive()).filter(|a| !skt.delta_i_max.contains(a)).collect();
    let residual: Vec<usize> = residual_roots.iter().flat_map(|&a| alg.root_block(a)).collect();
    clauses.push(Clause::new("residual_invariant", span.preserves_coordinates(&residual)));
    for f in 0..rs.num_factors() {
        clauses.push(Clause::new(
            format!("factor_preserved[{}]", f + 1),
            span.preserves_coordinates(&alg.factor_indices(f)),
        ));
    }

    let mut predicted = vec![BlockLabel::Torus];
    for &a in &skt.delta_i_max {
        predicted.push(BlockLabel::RootSpace { root: a });
    }
    for f in 0..rs.num_factors() {
        let roots: Vec<usize> = residual_roots.iter().copied().filter(|&a| rs.factor_of_root(a) == f).collect();
        match roots.len() {
            0 => {}
            1 => predicted.push(BlockLabel::RootSpace { root: roots[0] }),
            _ => predicted.push(BlockLabel::Residual { factor: f, roots }),
        }
    }
    let mut found: Vec<BlockLabel> = dec.blocks.iter().map(|b| b.label.clone()).collect();
    let key = |l: &BlockLabel| format!("{l:?}");
    predicted.sort_by_key(key);
    found.sort_by_key(key);
    Ok(ComparisonReport {
        clauses,
        matches_prediction: predicted == found,
    })
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Torus => write!(f, "torus"),
            BlockLabel::RootSpace { root } => write!(f, "root space {root}"),
            BlockLabel::Residual { factor, roots } => write!(f, "residual of factor {} over roots {roots:?}", factor + 1),
            BlockLabel::TrivialWhole => write!(f, "whole algebra (trivial holonomy)"),
            BlockLabel::Mixed => write!(f, "mixed"),
        }
    }
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vector], v: &[Scalar]) -> bool {
    let n = v.len();
    let mut e = Echelon::new(n);
    for b in basis {
        e.insert(b.clone());
    }
    is_zero_vector(&e.reduce(v.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactform::build_compact_algebra;
    use crate::connection::{bismut_torsion, curvature, nomizu};
    use crate::hermitian::{auto_torus_j, extend_pluriclosed, HermitianStructure};
    use crate::rootsys::{build_root_system, chevalley_constants, CartanSpec};

    struct Setup {
        alg: CompactAlgebra,
        h: HermitianStructure,
        skt: SktParameters,
        lambda: NomizuOperator,
        span: OperatorSpan,
    }

    fn setup(s: &str, c: &[Scalar]) -> Setup {
        let rs = build_root_system(&CartanSpec::parse(s).unwrap()).unwrap();
        let alg = build_compact_algebra(&rs, &chevalley_constants(&rs)).unwrap();
        let skt = extend_pluriclosed(&rs, c).unwrap();
        let lam = vec![Scalar::one(); rs.num_factors()];
        let jt = auto_torus_j(&alg, &lam).unwrap();
        let h = HermitianStructure::new(&alg, &jt, &lam, &skt.c_all).unwrap();
        let t = bismut_torsion(&alg, &h.g, &h.j);
        let lambda = nomizu(&alg, &h.g, &t);
        let r = curvature(&lambda, &alg);
        let span = generate_span(&lambda, &r, &alg);
        Setup { alg, h, skt, lambda, span }
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn flat_gives_trivial_whole() {
        let s = setup("A2", &ints(&[1, 1]));
        assert!(s.span.is_empty());
        assert_eq!(s.span.generation_log(), &[0]);
        let dec = invariant_decomposition(&s.span, &s.h.g, &s.h.j, &s.alg);
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!(dec.blocks[0].label, BlockLabel::TrivialWhole);
        assert_eq!(dec.trivial_part.len(), 8);
        let cmp = label_and_compare(&dec, &s.span, &s.skt, &s.alg).unwrap();
        assert!(cmp.passed());
    }

    #[test]
    fn a2_splitting() {
        let s = setup("A2", &ints(&[2, 1]));
        assert!(!s.span.is_empty());
        let log = s.span.generation_log();
        assert!(log.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(log[log.len() - 1], log[log.len() - 2]);
        assert_eq!(s.span.closure_violation(&s.lambda), None);
        let dec = invariant_decomposition(&s.span, &s.h.g, &s.h.j, &s.alg);
        let labels: Vec<&BlockLabel> = dec.blocks.iter().map(|b| &b.label).collect();
        assert_eq!(
            labels,
            vec![
                &BlockLabel::Torus,
                &BlockLabel::Residual { factor: 0, roots: vec![0, 2] },
                &BlockLabel::RootSpace { root: 1 },
            ]
        );
        assert_eq!(dec.blocks.iter().map(Block::dim).collect::<Vec<_>>(), vec![2, 4, 2]);
        assert_eq!(dec.orthogonality_violation(&s.h.g), None);
        assert!(dec.spans(8));
        for b in &dec.blocks {
            assert!(s.span.preserves(&b.basis));
        }
        let cmp = label_and_compare(&dec, &s.span, &s.skt, &s.alg).unwrap();
        assert!(cmp.passed(), "{cmp:?}");
        assert!(cmp.matches_prediction);
    }

    #[test]
    fn g2_splitting() {
        let s = setup("G2", &[Scalar::from_ratio(4, 3), Scalar::one()]);
        assert_eq!(s.skt.delta_i_max, vec![1]);
        let dec = invariant_decomposition(&s.span, &s.h.g, &s.h.j, &s.alg);
        assert_eq!(dec.orthogonality_violation(&s.h.g), None);
        assert!(dec.spans(14));
        let cmp = label_and_compare(&dec, &s.span, &s.skt, &s.alg).unwrap();
        assert!(cmp.passed(), "{cmp:?}");
        assert!(cmp.matches_prediction, "{:?}", dec.blocks.iter().map(|b| &b.label).collect::<Vec<_>>());
    }

    #[test]
    fn coordinate_checks_detect_motion() {
        let n = 3;
        let m = Matrix::from_int_rows(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let span = OperatorSpan::from_operators(n, &[m]);
        assert_eq!(span.preserves_coordinates(&[0]), None);
        assert_eq!(span.preserves_coordinates(&[1]), Some((0, 0, 1)));
        assert_eq!(span.annihilates_coordinates(&[0, 2]), None);
        assert_eq!(span.common_kernel().len(), 2);
    }
}
