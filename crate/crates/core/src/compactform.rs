//! The compact real form `𝔤 = 𝔱 ⊕ Σ_α 𝔤_α^ℝ` with exact structure constants
//! and the Killing form.
//!
//! Basis order: `T_1..T_r`, then `X_α, Y_α` for each positive root in root
//! order, where `T_j = i·h_j`, `X_α = E_α − E_{−α}`, `Y_α = i(E_α + E_{−α})`.

use std::fmt;

use num::{BigRational, Complex, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rootsys::{ChevalleyConstants, ComplexBracket, RootSystem};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisLabel {
    Torus(usize),
    XRoot(usize),
    YRoot(usize),
}

#[derive(Clone, Debug)]
pub struct CompactAlgebra {
    root_system: RootSystem,
    labels: Vec<BasisLabel>,
    brackets: Vec<Vec<Vec<(usize, Scalar)>>>,
    killing: Matrix,
}

type C = Complex<BigRational>;

fn c_int(re: i64, im: i64) -> C {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn build_compact_algebra(rs: &RootSystem, cc: &ChevalleyConstants) -> Result<CompactAlgebra> {
    let r = rs.rank();
    let m = rs.num_positive();
    for (&(x, y), _) in cc.iter() {
        if x.index >= m || y.index >= m || crate::rootsys::root_sum(rs, x, y).is_none() {
            return Err(Error::Structure(format!(
                "constant N for [{:?}, {:?}] does not match the root system",
                x, y
            )));
        }
    }
    let cb = ComplexBracket::new(rs, cc);
    let dim = r + 2 * m;

    let mut labels = Vec::with_capacity(dim);
    let mut embed: Vec<Vec<(usize, C)>> = Vec::with_capacity(dim);
    for j in 0..r {
        labels.push(BasisLabel::Torus(j));
        embed.push(vec![(j, c_int(0, 1))]);
    }
    for a in 0..m {
        labels.push(BasisLabel::XRoot(a));
        embed.push(vec![(r + a, c_int(1, 0)), (r + m + a, c_int(-1, 0))]);
        labels.push(BasisLabel::YRoot(a));
        embed.push(vec![(r + a, c_int(0, 1)), (r + m + a, c_int(0, 1))]);
    }

    let half = BigRational::new(1.into(), 2.into());
    let mut brackets = vec![vec![Vec::new(); dim]; dim];
    for p in 0..dim {
        for q in 0..dim {
            let mut acc = vec![C::zero(); dim];
            for (k, u) in &embed[p] {
                for (l, v) in &embed[q] {
                    for &(s, n) in cb.bracket(*k, *l) {
                        acc[s] = &acc[s] + u * v * c_int(n, 0);
                    }
                }
            }
            let fail = || Error::Structure(format!("bracket [{}, {}] leaves the compact real form", p, q));
            let mut out = Vec::new();
            for j in 0..r {
                // a_j = i·t_j
                let a = &acc[j];
                if !a.re.is_zero() {
                    return Err(fail());
                }
                if !a.im.is_zero() {
                    out.push((j, Scalar::from_rational(a.im.clone())));
                }
            }
            for a in 0..m {
                let bp = &acc[r + a];
                let bn = &acc[r + m + a];
                let x = (bp - bn) * C::new(half.clone(), BigRational::zero());
                // y = (b_α + b_{−α}) / 2i
                let y = (bp + bn) * C::new(BigRational::zero(), -half.clone());
                if !x.im.is_zero() || !y.im.is_zero() {
                    return Err(fail());
                }
                let back_p = C::new(x.re.clone(), y.re.clone());
                let back_n = C::new(-x.re.clone(), y.re.clone());
                if &back_p != bp || &back_n != bn {
                    return Err(fail());
                }
                if !x.re.is_zero() {
                    out.push((r + 2 * a, Scalar::from_rational(x.re)));
                }
                if !y.re.is_zero() {
                    out.push((r + 2 * a + 1, Scalar::from_rational(y.re)));
                }
            }
            brackets[p][q] = out;
        }
    }

    let killing = killing_from_brackets(&brackets);
    Ok(CompactAlgebra {
        root_system: rs.clone(),
        labels,
        brackets,
        killing,
    })
}

/// `B(e_a, e_b) = tr(ad e_a ∘ ad e_b)`
fn killing_from_brackets(br: &[Vec<Vec<(usize, Scalar)>>]) -> Matrix {
    let n = br.len();
    let mut b = Matrix::zeros(n, n);
    for a in 0..n {
        for c in a..n {
            let mut s = Scalar::zero();
            for l in 0..n {
                // (ad e_a ad e_c) e_l = Σ_k c_{c l}^k [e_a, e_k]
                for (k, u) in &br[c][l] {
                    for (l2, v) in &br[a][*k] {
                        if *l2 == l {
                            s += &(u * v);
                        }
                    }
                }
            }
            b[(a, c)] = s.clone();
            b[(c, a)] = s;
        }
    }
    b
}

impl CompactAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self) -> usize {
        self.root_system.rank()
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn torus_index(&self, j: usize) -> usize {
        j
    }

    pub fn x_index(&self, root: usize) -> usize {
        self.rank() + 2 * root
    }

    pub fn y_index(&self, root: usize) -> usize {
        self.rank() + 2 * root + 1
    }

    pub fn torus_indices(&self) -> Vec<usize> {
        (0..self.rank()).collect()
    }

    /// `[X_α, Y_α]` indices of `𝔤_α^ℝ`.
    pub fn root_block(&self, root: usize) -> [usize; 2] {
        [self.x_index(root), self.y_index(root)]
    }

    pub fn factor_of_basis(&self, i: usize) -> usize {
        match self.labels[i] {
            BasisLabel::Torus(j) => self.root_system.factor_of_simple(j),
            BasisLabel::XRoot(a) | BasisLabel::YRoot(a) => self.root_system.factor_of_root(a),
        }
    }

    /// Basis indices spanning the simple factor `𝔤_f`.
    pub fn factor_indices(&self, f: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.factor_of_basis(i) == f).collect()
    }

    /// Torus indices of the simple factor `𝔤_f`.
    pub fn factor_torus_indices(&self, f: usize) -> Vec<usize> {
        self.root_system.simple_roots_of_factor(f)
    }

    pub fn basis_name(&self, i: usize) -> String {
        let rs = &self.root_system;
        match self.labels[i] {
            BasisLabel::Torus(j) => format!("T{}", j + 1),
            BasisLabel::XRoot(a) => format!("X[{}]", rs.root_label(a)),
            BasisLabel::YRoot(a) => format!("Y[{}]", rs.root_label(a)),
        }
    }

    /// Sparse `[e_a, e_b]`.
    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.brackets[a][b]
    }

    pub fn bracket_vectors(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let f = xa * yb;
                for (k, c) in self.bracket(a, b) {
                    out[*k] += &(&f * c);
                }
            }
        }
        out
    }

    /// Matrix of `ad(e_a)`.
    pub fn ad(&self, a: usize) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for l in 0..n {
            for (k, c) in self.bracket(a, l) {
                m[(*k, l)] = c.clone();
            }
        }
        m
    }

    pub fn killing(&self) -> &Matrix {
        &self.killing
    }

    /// First basis triple violating Jacobi, exhaustively.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let mut acc = vec![Scalar::zero(); n];
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        for (k, u) in self.bracket(y, z) {
                            for (l, v) in self.bracket(x, *k) {
                                acc[*l] += &(u * v);
                            }
                        }
                    }
                    if acc.iter().any(|x| !x.is_zero()) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// First triple with `B([X,Y],Z) + B(Y,[X,Z]) ≠ 0`.
    pub fn killing_invariance_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        let kb = |v: &[(usize, Scalar)], z: usize| -> Scalar {
            v.iter().map(|(k, c)| c * &self.killing[(*k, z)]).sum()
        };
        for x in 0..n {
            for y in 0..n {
                for z in y..n {
                    let s = kb(self.bracket(x, y), z) + kb(self.bracket(x, z), y);
                    if !s.is_zero() {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// Sylvester criterion: leading minors alternate in sign starting negative.
    pub fn killing_is_negative_definite(&self) -> bool {
        self.killing
            .leading_minors()
            .iter()
            .enumerate()
            .all(|(k, d)| if k % 2 == 0 { d.signum().is_lt() } else { d.is_positive() })
    }

    /// `B` restricted to the span of the given basis vectors.
    pub fn killing_restriction(&self, indices: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim(),
            });
        }
        Ok(self.killing.submatrix(indices, indices))
    }

    /// Index set is closed under the bracket, `[W, W] ⊆ W`.
    pub fn is_subalgebra(&self, indices: &[usize]) -> Option<(usize, usize)> {
        for &a in indices {
            for &b in indices {
                if self.bracket(a, b).iter().any(|(k, _)| !indices.contains(k)) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

impl fmt::Display for CompactAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "compact {} (dim {})", self.root_system.spec(), self.dim())
    }
}
