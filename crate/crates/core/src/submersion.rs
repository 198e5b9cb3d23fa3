//! Certificates for the Hermitian submersions `G → G/H_I`, `I ⊆ I_max`, on the
//! splitting `𝒱 = 𝔥_I = 𝔱 ⊕ ⊕_{α∈Δ_I} 𝔤_α`, `ℋ = 𝔥_I^⊥`.
//!
//! Both parts are coordinate subspaces of the compact basis, and `g` is block
//! diagonal on it, so the projectors are diagonal 0/1 matrices.

use serde::Serialize;

use crate::compactform::CompactAlgebra;
use crate::connection::{exterior_derivative, increasing_tuples, sigma_t, BismutGeometry, Defect, InvariantForm};
use crate::error::{Error, Result};
use crate::hermitian::SktParameters;
use crate::holonomy::OperatorSpan;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    /// Simple roots in `I`.
    pub simple: Vec<usize>,
    /// `Δ_I`.
    pub roots: Vec<usize>,
    pub vertical: Vec<usize>,
    pub horizontal: Vec<usize>,
}

impl SplitData {
    pub fn vertical_projector(&self, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |a, b| if a == b && self.vertical.contains(&a) { Scalar::one() } else { Scalar::zero() })
    }

    pub fn horizontal_projector(&self, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |a, b| if a == b && self.horizontal.contains(&a) { Scalar::one() } else { Scalar::zero() })
    }

    fn is_vertical(&self, i: usize) -> bool {
        self.vertical.contains(&i)
    }
}

/// The split for `I ⊆ I_max`, with its invariants verified.
pub fn build_split(skt: &SktParameters, simple: &[usize], alg: &CompactAlgebra, g: &Matrix, j: &Matrix) -> Result<SplitData> {
    let outside: Vec<String> = simple
        .iter()
        .filter(|s| !skt.i_max.contains(s))
        .map(|&s| alg.root_system().simple_label(s))
        .collect();
    if !outside.is_empty() {
        return Err(Error::NotInIMax(outside));
    }
    build_split_unchecked(simple, alg, g, j)
}

/// [`build_split`] without the `I ⊆ I_max` hypothesis; negative controls only.
#[doc(hidden)]
pub fn build_split_unchecked(simple: &[usize], alg: &CompactAlgebra, g: &Matrix, j: &Matrix) -> Result<SplitData> {
    let rs = alg.root_system();
    if let Some(&bad) = simple.iter().find(|&&s| s >= rs.rank()) {
        return Err(Error::IndexOutOfRange { index: bad, dim: rs.rank() });
    }
    let mut simple = simple.to_vec();
    simple.sort_unstable();
    simple.dedup();
    let roots = rs.roots_supported_on(&simple);
    let mut vertical = alg.torus_indices();
    for &a in &roots {
        vertical.extend(alg.root_block(a));
    }
    vertical.sort_unstable();
    let horizontal: Vec<usize> = (0..alg.dim()).filter(|i| !vertical.contains(i)).collect();
    let split = SplitData {
        simple,
        roots,
        vertical,
        horizontal,
    };
    if let Some((a, b)) = alg.is_subalgebra(&split.vertical) {
        return Err(Error::Structure(format!(
            "[{}, {}] leaves the vertical space",
            alg.basis_name(a),
            alg.basis_name(b)
        )));
    }
    for part in [&split.vertical, &split.horizontal] {
        for &c in part.iter() {
            if let Some(r) = (0..alg.dim()).find(|r| !part.contains(r) && !j[(*r, c)].is_zero()) {
                return Err(Error::Structure(format!("J moves {} across the split (to {})", alg.basis_name(c), alg.basis_name(r))));
            }
        }
    }
    for &v in &split.vertical {
        for &h in &split.horizontal {
            if !g[(v, h)].is_zero() {
                return Err(Error::Structure(format!("split is not g-orthogonal at ({v}, {h})")));
            }
        }
    }
    Ok(split)
}

/// `max |T(V,W,X)|` for `V, W` vertical and `X` horizontal.
pub fn torsion_type_check(t: &InvariantForm, split: &SplitData) -> Defect {
    let mut d = Defect::zero();
    for (a, &v) in split.vertical.iter().enumerate() {
        for &w in &split.vertical[a + 1..] {
            for &x in &split.horizontal {
                d.record(&t.get(&[v, w, x]), &[v, w, x]);
            }
        }
    }
    d
}

/// `max |T(X,JY,JZ) − T(X,Y,Z)|` for `X` vertical and `Y, Z` horizontal.
pub fn one_one_check(t: &InvariantForm, j: &Matrix, split: &SplitData) -> Defect {
    let n = j.rows();
    let mut d = Defect::zero();
    for &x in &split.vertical {
        let ex = crate::linalg::unit_vector(n, x);
        for &y in &split.horizontal {
            let jy = j.column(y);
            for &z in &split.horizontal {
                let jz = j.column(z);
                let v = t.eval(&[&ex, &jy, &jz]) - t.get(&[x, y, z]);
                d.record(&v, &[x, y, z]);
            }
        }
    }
    d
}

/// `T^ℋ` and `T^m`: the parts of `T` in `Λ³ℋ` and in `Λ²ℋ∧𝒱`.
pub fn type_components(t: &InvariantForm, split: &SplitData) -> (InvariantForm, InvariantForm) {
    let n = t.dim();
    let vertical_count = |k: &[usize]| k.iter().filter(|&&i| split.is_vertical(i)).count();
    let th = InvariantForm::from_fn(3, n, |k| if vertical_count(k) == 0 { t.get(k) } else { Scalar::zero() });
    let tm = InvariantForm::from_fn(3, n, |k| if vertical_count(k) == 1 { t.get(k) } else { Scalar::zero() });
    (th, tm)
}

/// Defect of `d(T^ℋ) + 2σ_{T^m} = 0` on horizontal 4-tuples, and
/// `max |σ_{T^m}|` there, the obstruction to closed torsion on the base.
pub fn projected_torsion_obstruction(
    t: &InvariantForm,
    split: &SplitData,
    g: &Matrix,
    alg: &CompactAlgebra,
) -> Result<(Defect, Defect)> {
    let (th, tm) = type_components(t, split);
    let dth = exterior_derivative(&th, alg)?;
    let sigma = sigma_t(&tm, g);
    let two = Scalar::from_int(2);
    let mut identity = Defect::zero();
    let mut obstruction = Defect::zero();
    for q in increasing_tuples(split.horizontal.len(), 4) {
        let idx: Vec<usize> = q.iter().map(|&i| split.horizontal[i]).collect();
        let s = sigma.get(&idx);
        identity.record(&(dth.get(&idx) + &two * &s), &idx);
        obstruction.record(&s, &idx);
    }
    Ok((identity, obstruction))
}

/// `max |g(R(X,Y)Z, V)|` for `X, Y` horizontal and `Z, V` vertical.
pub fn mixed_curvature_check(geo: &BismutGeometry, split: &SplitData) -> Defect {
    let mut d = Defect::zero();
    for (a, &x) in split.horizontal.iter().enumerate() {
        for &y in &split.horizontal[a + 1..] {
            for &z in &split.vertical {
                for &v in &split.vertical {
                    d.record(&geo.curvature.value(&geo.g, x, y, z, v), &[x, y, z, v]);
                }
            }
        }
    }
    d
}

fn lowered_nomizu(geo: &BismutGeometry, x: usize, y: usize, z: usize) -> Scalar {
    let col = geo.nomizu.op(x).column(y);
    (0..col.len()).filter(|&c| !col[c].is_zero()).map(|c| &col[c] * &geo.g[(c, z)]).sum()
}

/// `max |g(∇_X Y, Z) − T(X,Y,Z)|` for `X` vertical and `Y, Z` horizontal
/// basic fields. On left-invariant `Y` this reads
/// `g(Λ_X Y, Z) − g([X,Y], Z) − T(X,Y,Z) = g(Λ_Y X, Z)`.
pub fn basic_field_check(geo: &BismutGeometry, alg: &CompactAlgebra, split: &SplitData) -> Defect {
    let mut d = Defect::zero();
    for &x in &split.vertical {
        for &y in &split.horizontal {
            for &z in &split.horizontal {
                let br: Scalar = alg.bracket(x, y).iter().map(|(k, c)| c * &geo.g[(*k, z)]).sum();
                let v = lowered_nomizu(geo, x, y, z) - br - geo.torsion.get(&[x, y, z]);
                d.record(&v, &[x, y, z]);
            }
        }
    }
    d
}

/// `max |g(Λ_X Y, Z) − T(X,Y,Z)|` with left-invariant `Y`; a diagnostic,
/// nonzero whenever `g([X,Y], Z) ≠ 0`.
pub fn left_invariant_field_defect(geo: &BismutGeometry, split: &SplitData) -> Defect {
    let mut d = Defect::zero();
    for &x in &split.vertical {
        for &y in &split.horizontal {
            for &z in &split.horizontal {
                let v = lowered_nomizu(geo, x, y, z) - geo.torsion.get(&[x, y, z]);
                d.record(&v, &[x, y, z]);
            }
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub max_defect: Scalar,
    pub witness: Option<Vec<usize>>,
}

impl CheckRecord {
    pub fn from_defect(name: &str, d: Defect) -> Self {
        Self {
            name: name.to_string(),
            passed: d.is_zero(),
            max_defect: d.max,
            witness: d.witness,
        }
    }

    fn flag(name: &str, witness: Option<Vec<usize>>) -> Self {
        Self {
            name: name.to_string(),
            passed: witness.is_none(),
            max_defect: if witness.is_none() { Scalar::zero() } else { Scalar::one() },
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubmersionReport {
    pub subset: Vec<String>,
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    pub checks: Vec<CheckRecord>,
    /// `max |σ_{T^m}|` on horizontal 4-tuples; zero iff the base has closed torsion.
    pub base_closedness_obstruction: Scalar,
    /// `max |g(Λ_X Y, Z) − T(X,Y,Z)|` over left-invariant `Y`.
    pub left_invariant_field_defect: Scalar,
}

impl SubmersionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every check on a split. The split must have been built with
/// [`build_split`] (or the unchecked variant for negative controls).
pub fn certify(
    split: &SplitData,
    geo: &BismutGeometry,
    alg: &CompactAlgebra,
    span: Option<&OperatorSpan>,
) -> Result<SubmersionReport> {
    let rs = alg.root_system();
    let mut checks = vec![
        CheckRecord::flag(
            "subalgebra",
            alg.is_subalgebra(&split.vertical).map(|(a, b)| vec![a, b]),
        ),
        CheckRecord::from_defect("torsion_type", torsion_type_check(&geo.torsion, split)),
        CheckRecord::from_defect("one_one", one_one_check(&geo.torsion, &geo.j, split)),
    ];
    let (identity, obstruction) = projected_torsion_obstruction(&geo.torsion, split, &geo.g, alg)?;
    checks.push(CheckRecord::from_defect("projected_torsion_identity", identity));
    checks.push(CheckRecord::from_defect("mixed_curvature", mixed_curvature_check(geo, split)));
    checks.push(CheckRecord::from_defect("basic_field_connection", basic_field_check(geo, alg, split)));
    if let Some(span) = span {
        let w = span
            .preserves_coordinates(&split.vertical)
            .or_else(|| span.preserves_coordinates(&split.horizontal));
        checks.push(CheckRecord::flag("holonomy_preserves_split", w.map(|(k, r, c)| vec![k, r, c])));
    }
    Ok(SubmersionReport {
        subset: split.simple.iter().map(|&s| rs.simple_label(s)).collect(),
        vertical_dim: split.vertical.len(),
        horizontal_dim: split.horizontal.len(),
        checks,
        base_closedness_obstruction: obstruction.max,
        left_invariant_field_defect: left_invariant_field_defect(geo, split).max,
    })
}
