//! Samelson complex structures, the invariant metrics `g(λ, c)` and the
//! pluriclosed coefficient law.

use serde::Serialize;

use crate::compactform::{BasisLabel, CompactAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rootsys::RootSystem;
use crate::scalar::Scalar;

/// Full `J` on `𝔤`: `j_torus` on `𝔱`, `J X_α = Y_α`, `J Y_α = −X_α`.
pub fn samelson_j(alg: &CompactAlgebra, j_torus: &Matrix) -> Result<Matrix> {
    let r = alg.rank();
    if r % 2 == 1 {
        return Err(Error::OddRank(r));
    }
    if j_torus.rows() != r || j_torus.cols() != r {
        return Err(Error::Shape(format!(
            "torus complex structure is {}x{}, torus has dimension {r}",
            j_torus.rows(),
            j_torus.cols()
        )));
    }
    single_field(j_torus)?;
    if j_torus.mul(j_torus) != Matrix::identity(r).scale(&Scalar::from_int(-1)) {
        return Err(Error::NotComplexStructure);
    }
    let n = alg.dim();
    let mut j = Matrix::zeros(n, n);
    for a in 0..r {
        for b in 0..r {
            j[(a, b)] = j_torus[(a, b)].clone();
        }
    }
    for root in 0..alg.root_system().num_positive() {
        let [x, y] = alg.root_block(root);
        j[(y, x)] = Scalar::one();
        j[(x, y)] = Scalar::from_int(-1);
    }
    Ok(j)
}

/// Rejects matrices mixing two quadratic fields.
fn single_field(m: &Matrix) -> Result<u64> {
    let mut d = 0;
    for x in m.as_slice() {
        match (d, x.radicand()) {
            (_, 0) => {}
            (0, r) => d = r,
            (a, b) if a == b => {}
            (a, b) => {
                return Err(Error::Unsupported(format!(
                    "entries from two quadratic fields, sqrt({a}) and sqrt({b})"
                )))
            }
        }
    }
    Ok(d)
}

fn require_positive(name: String, v: &Scalar) -> Result<()> {
    if !v.is_rational() {
        return Err(Error::Unsupported(format!("{name} = {v} must be rational")));
    }
    if !v.is_positive() {
        return Err(Error::Nonpositive {
            name,
            value: v.to_string(),
        });
    }
    Ok(())
}

/// `g = −Σ_i λ_i (B|_{𝔱_i} + Σ_{α∈Δ_i^+} c_α B|_{𝔤_α})`; `c` is indexed by
/// positive root.
pub fn build_metric(alg: &CompactAlgebra, lambda: &[Scalar], c: &[Scalar]) -> Result<Matrix> {
    let rs = alg.root_system();
    if lambda.len() != rs.num_factors() {
        return Err(Error::Shape(format!(
            "{} metric scales for {} simple factors",
            lambda.len(),
            rs.num_factors()
        )));
    }
    if c.len() != rs.num_positive() {
        return Err(Error::Shape(format!(
            "{} root coefficients for {} positive roots",
            c.len(),
            rs.num_positive()
        )));
    }
    for (i, l) in lambda.iter().enumerate() {
        require_positive(format!("lambda[{}]", i + 1), l)?;
    }
    for (a, v) in c.iter().enumerate() {
        require_positive(format!("c[{}]", rs.root_label(a)), v)?;
    }
    let n = alg.dim();
    let weight = |i: usize| -> Scalar {
        let f = alg.factor_of_basis(i);
        match alg.labels()[i] {
            BasisLabel::Torus(_) => -&lambda[f],
            BasisLabel::XRoot(a) | BasisLabel::YRoot(a) => -(&lambda[f] * &c[a]),
        }
    };
    let block = |i: usize| -> (usize, usize) {
        match alg.labels()[i] {
            BasisLabel::Torus(_) => (0, alg.factor_of_basis(i)),
            BasisLabel::XRoot(a) | BasisLabel::YRoot(a) => (1, a),
        }
    };
    let b = alg.killing();
    Ok(Matrix::from_fn(n, n, |i, j| {
        if block(i) == block(j) {
            &weight(i) * &b[(i, j)]
        } else {
            Scalar::zero()
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Compatibility {
    Compatible,
    Incompatible { witness: (usize, usize), defect: Scalar },
}

impl Compatibility {
    pub fn passed(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// `JᵀgJ = g`, with the first differing entry as witness.
pub fn check_compatibility(g: &Matrix, j: &Matrix) -> Result<Compatibility> {
    if !g.is_square() || g.rows() != j.rows() || !j.is_square() {
        return Err(Error::Shape("metric and complex structure differ in size".into()));
    }
    let d = j.transpose().mul(g).mul(j).sub(g);
    let n = g.rows();
    for a in 0..n {
        for b in 0..n {
            if !d[(a, b)].is_zero() {
                return Ok(Compatibility::Incompatible {
                    witness: (a, b),
                    defect: d[(a, b)].clone(),
                });
            }
        }
    }
    Ok(Compatibility::Compatible)
}

/// A compatible torus complex structure built factor by factor: every rank-2
/// block (a rank-2 factor, or two consecutive rank-1 factors) gets
/// `J = √det(G)·G⁻¹·[[0,−1],[1,0]]` for its torus metric block `G`.
pub fn auto_torus_j(alg: &CompactAlgebra, lambda: &[Scalar]) -> Result<Matrix> {
    let rs = alg.root_system();
    let r = rs.rank();
    if r % 2 == 1 {
        return Err(Error::OddRank(r));
    }
    let ones = vec![Scalar::one(); rs.num_positive()];
    let g = build_metric(alg, lambda, &ones)?;
    let mut blocks = Vec::new();
    let mut pending: Option<usize> = None;
    let mut start = 0;
    for f in rs.spec().factors.iter() {
        match (f.rank, pending) {
            (2, None) => blocks.push(start),
            (1, None) => pending = Some(start),
            (1, Some(p)) => {
                blocks.push(p);
                pending = None;
            }
            _ => {
                return Err(Error::Unsupported(
                    "automatic torus complex structure needs factors of rank at most 2, \
                     with rank-1 factors adjacent in pairs; \
                     give complex_structure.j_torus explicitly"
                        .into(),
                ))
            }
        }
        start += f.rank;
    }
    if pending.is_some() {
        return Err(Error::OddRank(r));
    }
    let mut j = Matrix::zeros(r, r);
    let rot = Matrix::from_int_rows(&[&[0, -1], &[1, 0]]);
    for s in blocks {
        let gb = g.submatrix(&[s, s + 1], &[s, s + 1]);
        let det = gb.determinant();
        let root = det
            .as_rational()
            .and_then(Scalar::sqrt_rational)
            .ok_or_else(|| Error::Unsupported("torus metric block is not rational".into()))?;
        let jb = gb.inverse().expect("definite block").mul(&rot).scale(&root);
        for a in 0..2 {
            for b in 0..2 {
                j[(s + a, s + b)] = jb[(a, b)].clone();
            }
        }
    }
    single_field(&j)?;
    Ok(j)
}

/// Coefficients of a pluriclosed metric together with `I_max` and
/// `Δ_{I_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SktParameters {
    pub c_simple: Vec<Scalar>,
    pub c_all: Vec<Scalar>,
    pub i_max: Vec<usize>,
    pub delta_i_max: Vec<usize>,
}

/// `c_α = 1 + Σ_j k_j (c_{α_j} − 1)` for `α = Σ_j k_j α_j`.
pub fn extend_pluriclosed(rs: &RootSystem, c_simple: &[Scalar]) -> Result<SktParameters> {
    if c_simple.len() != rs.rank() {
        return Err(Error::Shape(format!(
            "{} simple-root coefficients for rank {}",
            c_simple.len(),
            rs.rank()
        )));
    }
    let c_all: Vec<Scalar> = rs
        .positive_roots()
        .iter()
        .map(|k| {
            let mut c = Scalar::one();
            for (kj, cj) in k.iter().zip(c_simple) {
                c += &(&Scalar::from_int(*kj) * &(cj - &Scalar::one()));
            }
            c
        })
        .collect();
    for (a, v) in c_all.iter().enumerate() {
        require_positive(format!("c[{}]", rs.root_label(a)), v)?;
    }
    let i_max: Vec<usize> = (0..rs.rank()).filter(|&j| c_simple[j].is_one()).collect();
    let delta_i_max = rs.roots_supported_on(&i_max);
    Ok(SktParameters {
        c_simple: c_simple.to_vec(),
        c_all,
        i_max,
        delta_i_max,
    })
}

/// First pair `(α, β)` of positive roots with `α+β` a root and
/// `c_{α+β} ≠ c_α + c_β − 1`.
pub fn recursion_violation(rs: &RootSystem, c: &[Scalar]) -> Option<(usize, usize)> {
    let m = rs.num_positive();
    for a in 0..m {
        for b in a..m {
            let sum: Vec<i64> = rs.root(a).iter().zip(rs.root(b)).map(|(x, y)| x + y).collect();
            if let Some(s) = rs.find(&sum) {
                if c[s] != &(&c[a] + &c[b]) - &Scalar::one() {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// A compatible Hermitian structure `(g, J)` with its fundamental form.
#[derive(Clone, Debug)]
pub struct HermitianStructure {
    pub j: Matrix,
    pub lambda: Vec<Scalar>,
    pub c: Vec<Scalar>,
    pub g: Matrix,
    pub omega: Matrix,
}

impl HermitianStructure {
    /// Fails with [`Error::Incompatible`] when `JᵀgJ ≠ g`.
    pub fn new(alg: &CompactAlgebra, j_torus: &Matrix, lambda: &[Scalar], c: &[Scalar]) -> Result<Self> {
        let j = samelson_j(alg, j_torus)?;
        let g = build_metric(alg, lambda, c)?;
        if let Compatibility::Incompatible { witness, .. } = check_compatibility(&g, &j)? {
            return Err(Error::Incompatible(witness.0, witness.1));
        }
        // ω(X,Y) = g(JX,Y), i.e. ω = Jᵀg
        let omega = j.transpose().mul(&g);
        Ok(Self {
            j,
            lambda: lambda.to_vec(),
            c: c.to_vec(),
            g,
            omega,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactform::build_compact_algebra;
    use crate::rootsys::{build_root_system, chevalley_constants, CartanSpec};
    use proptest::prelude::*;

    fn alg(s: &str) -> CompactAlgebra {
        let rs = build_root_system(&CartanSpec::parse(s).unwrap()).unwrap();
        build_compact_algebra(&rs, &chevalley_constants(&rs)).unwrap()
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    fn rot() -> Matrix {
        Matrix::from_int_rows(&[&[0, -1], &[1, 0]])
    }

    #[test]
    fn samelson_rotates_root_spaces() {
        let a = alg("A2");
        let j = samelson_j(&a, &rot()).unwrap();
        let n = a.dim();
        for i in 0..n {
            let e = crate::linalg::unit_vector(n, i);
            let jje = j.apply(&j.apply(&e));
            assert!(jje.iter().zip(&e).all(|(x, y)| x == &-y));
        }
        let x1 = crate::linalg::unit_vector(n, a.x_index(0));
        assert_eq!(j.apply(&x1), crate::linalg::unit_vector(n, a.y_index(0)));
    }

    #[test]
    fn samelson_rejects_bad_input() {
        let a1 = alg("A1");
        assert!(matches!(samelson_j(&a1, &Matrix::identity(1)), Err(Error::OddRank(1))));
        let a2 = alg("A2");
        assert!(matches!(samelson_j(&a2, &Matrix::identity(2)), Err(Error::NotComplexStructure)));
        assert!(matches!(samelson_j(&a2, &Matrix::identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn a1_metric_entries() {
        let a = alg("A1+A1");
        let g = build_metric(&a, &[q(3, 2), q(1, 1)], &[q(5, 1), q(1, 1)]).unwrap();
        // g(T,T) = 8λ, g(X,X) = 8λc
        assert_eq!(g[(0, 0)], q(12, 1));
        assert_eq!(g[(1, 1)], q(8, 1));
        assert_eq!(g[(a.x_index(0), a.x_index(0))], q(60, 1));
        assert_eq!(g[(a.y_index(1), a.y_index(1))], q(8, 1));
        let err = build_metric(&a, &[q(1, 1), q(1, 1)], &[q(0, 1), q(1, 1)]).unwrap_err();
        assert!(matches!(err, Error::Nonpositive { .. }));
    }

    #[test]
    fn metric_positive_definite_and_block_diagonal() {
        let a = alg("G2");
        let g = build_metric(&a, &[q(2, 3)], &ints(&[1, 2, 3, 4, 5, 6])).unwrap();
        assert_eq!(g, g.transpose());
        assert!(g.leading_minors().iter().all(Scalar::is_positive));
        for i in 0..a.dim() {
            for k in 0..a.dim() {
                if i != k && (i >= a.rank() || k >= a.rank()) {
                    assert!(g[(i, k)].is_zero());
                }
            }
        }
    }

    #[test]
    fn compatibility_witness_for_unequal_swap() {
        let a = alg("A1+A1");
        let j = samelson_j(&a, &rot()).unwrap();
        let c = ints(&[1, 1]);
        let ok = build_metric(&a, &ints(&[2, 2]), &c).unwrap();
        assert!(check_compatibility(&ok, &j).unwrap().passed());
        let bad = build_metric(&a, &ints(&[1, 2]), &c).unwrap();
        match check_compatibility(&bad, &j).unwrap() {
            Compatibility::Incompatible { witness, .. } => assert!(witness.0 < 2 && witness.1 < 2),
            Compatibility::Compatible => panic!("unequal scales must fail"),
        }
    }

    #[test]
    fn root_blocks_always_compatible() {
        let a = alg("A2");
        let j = samelson_j(&a, &rot()).unwrap();
        let g = build_metric(&a, &ints(&[1]), &ints(&[2, 7, 3])).unwrap();
        let d = j.transpose().mul(&g).mul(&j).sub(&g);
        for i in a.rank()..a.dim() {
            for k in a.rank()..a.dim() {
                assert!(d[(i, k)].is_zero());
            }
        }
    }

    #[test]
    fn auto_torus_j_is_compatible() {
        for (s, lam) in [("A2", vec![q(1, 1)]), ("G2", vec![q(3, 7)]), ("B2", vec![q(2, 1)]), ("A1+A1", ints(&[1, 1])), ("A2+G2", vec![q(1, 1), q(2, 1)])] {
            let a = alg(s);
            let jt = auto_torus_j(&a, &lam).unwrap();
            let c = vec![q(3, 2); a.root_system().num_positive()];
            let h = HermitianStructure::new(&a, &jt, &lam, &c).unwrap();
            assert_eq!(h.omega, h.omega.transpose().scale(&q(-1, 1)), "{s}");
        }
        // A2: J = (√3/3)·[[1,−2],[2,−1]]
        let a = alg("A2");
        let jt = auto_torus_j(&a, &[q(1, 1)]).unwrap();
        let s = Scalar::sqrt_rational(&num::BigRational::new(1.into(), 3.into())).unwrap();
        assert_eq!(jt, Matrix::from_int_rows(&[&[1, -2], &[2, -1]]).scale(&s));
        // equal scales on A1+A1 give the factor swap
        let a = alg("A1+A1");
        assert_eq!(auto_torus_j(&a, &ints(&[5, 5])).unwrap(), rot());
        assert!(auto_torus_j(&alg("A1+A2+A1"), &ints(&[1, 1, 1])).is_err());
    }

    #[test]
    fn pluriclosed_extension_examples() {
        let rs = build_root_system(&CartanSpec::parse("A2").unwrap()).unwrap();
        let p = extend_pluriclosed(&rs, &ints(&[2, 1])).unwrap();
        assert_eq!(p.c_all, ints(&[2, 1, 2]));
        assert_eq!(p.i_max, vec![1]);
        assert_eq!(p.delta_i_max, vec![1]);
        let p = extend_pluriclosed(&rs, &ints(&[1, 1])).unwrap();
        assert_eq!(p.delta_i_max, vec![0, 1, 2]);
        let err = extend_pluriclosed(&rs, &[q(1, 4), q(1, 4)]).unwrap_err();
        match err {
            Error::Nonpositive { name, value } => {
                assert_eq!(name, "c[a1+a2]");
                assert_eq!(value, "-1/2");
            }
            e => panic!("{e}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn extension_satisfies_recursion(
            fam in 0usize..4,
            nums in proptest::collection::vec(1i64..40, 2),
            dens in proptest::collection::vec(1i64..12, 2),
        ) {
            let s = ["A2", "B2", "G2", "A1+A1"][fam];
            let rs = build_root_system(&CartanSpec::parse(s).unwrap()).unwrap();
            let cs: Vec<Scalar> = nums.iter().zip(&dens).map(|(n, d)| q(*n, *d)).collect();
            if let Ok(p) = extend_pluriclosed(&rs, &cs) {
                prop_assert_eq!(recursion_violation(&rs, &p.c_all), None);
                for &a in &p.delta_i_max {
                    prop_assert!(p.c_all[a].is_one());
                }
            }
        }
    }
}
