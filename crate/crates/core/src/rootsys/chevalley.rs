//! Chevalley-basis structure constants `[E_α, E_β] = N_{α,β} E_{α+β}`.
//!
//! Signs follow the extraspecial-pair convention: for every non-simple
//! positive root `ξ`, the special pair `(α, β)`, `α + β = ξ`, `α ≺ β`, with
//! the smallest `α` in the root order gets `N_{α,β} = p + 1 > 0`. All other
//! constants follow from the relations
//!
//! - `N_{β,α} = −N_{α,β}` and `N_{−α,−β} = −N_{α,β}`;
//! - `N_{α,β}/(γ,γ) = N_{β,γ}/(α,α) = N_{γ,α}/(β,β)` when `α + β + γ = 0`;
//! - the four-term relation for `α + β + γ + δ = 0` with no opposite pair.

use std::collections::{BTreeMap, HashMap};

use num::rational::Ratio;

use super::RootSystem;

/// A root `±α_i` referenced through its positive root index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootRef {
    pub index: usize,
    pub negative: bool,
}

impl RootRef {
    pub fn pos(index: usize) -> Self {
        Self { index, negative: false }
    }

    pub fn neg(index: usize) -> Self {
        Self { index, negative: true }
    }

    pub fn opposite(self) -> Self {
        Self {
            index: self.index,
            negative: !self.negative,
        }
    }

    pub fn coords(self, rs: &RootSystem) -> Vec<i64> {
        let r = rs.root(self.index);
        if self.negative {
            r.iter().map(|k| -k).collect()
        } else {
            r.to_vec()
        }
    }
}

/// Looks up `x + y` as a root. `None` for non-roots and for zero.
pub(crate) fn root_sum(rs: &RootSystem, x: RootRef, y: RootRef) -> Option<RootRef> {
    let s: Vec<i64> = x.coords(rs).iter().zip(y.coords(rs)).map(|(a, b)| a + b).collect();
    find_signed(rs, &s)
}

pub(crate) fn find_signed(rs: &RootSystem, coords: &[i64]) -> Option<RootRef> {
    if let Some(i) = rs.find(coords) {
        return Some(RootRef::pos(i));
    }
    let neg: Vec<i64> = coords.iter().map(|k| -k).collect();
    rs.find(&neg).map(RootRef::neg)
}

/// Largest `p` with `β − pα` a root.
pub(crate) fn string_depth(rs: &RootSystem, alpha: RootRef, beta: RootRef) -> i64 {
    let a = alpha.coords(rs);
    let mut cur = beta.coords(rs);
    let mut p = 0;
    loop {
        for (c, x) in cur.iter_mut().zip(&a) {
            *c -= x;
        }
        if find_signed(rs, &cur).is_some() {
            p += 1;
        } else {
            return p;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtraspecialPair {
    pub root: usize,
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChevalleyConstants {
    table: BTreeMap<(RootRef, RootRef), i64>,
    extraspecial: Vec<ExtraspecialPair>,
}

impl ChevalleyConstants {
    pub(crate) fn from_parts(table: BTreeMap<(RootRef, RootRef), i64>, extraspecial: Vec<ExtraspecialPair>) -> Self {
        Self { table, extraspecial }
    }

    /// `N_{x,y}`; zero when `x + y` is not a root.
    pub fn get(&self, x: RootRef, y: RootRef) -> i64 {
        self.table.get(&(x, y)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(RootRef, RootRef), &i64)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn extraspecial_pairs(&self) -> &[ExtraspecialPair] {
        &self.extraspecial
    }
}

fn norm(rs: &RootSystem, i: usize) -> i64 {
    let r = rs.root(i);
    rs.inner(r, r)
}

/// `N_{x,y}` from the table of positive pairs, through the relations above.
fn general(rs: &RootSystem, pos: &HashMap<(usize, usize), i64>, x: RootRef, y: RootRef) -> i64 {
    let Some(s) = root_sum(rs, x, y) else {
        return 0;
    };
    let lookup = |a: usize, b: usize| -> i64 {
        *pos.get(&(a, b))
            .unwrap_or_else(|| panic!("positive pair ({a}, {b}) requested before it was computed"))
    };
    let scaled = |num: i64, den: i64, n: i64| -> i64 {
        let q = Ratio::new(num * n, den);
        assert!(q.is_integer(), "non-integral structure constant");
        q.to_integer()
    };
    match (x.negative, y.negative) {
        (false, false) => lookup(x.index, y.index),
        (true, true) => -lookup(x.index, y.index),
        (false, true) => {
            let z = s.opposite();
            if !z.negative {
                // N_{x,y} = (z,z)/(y,y) · N_{z,x}
                scaled(norm(rs, z.index), norm(rs, y.index), lookup(z.index, x.index))
            } else {
                // N_{x,y} = (z,z)/(x,x) · N_{y,z}, with N_{y,z} = −N_{−y,−z}
                scaled(norm(rs, z.index), norm(rs, x.index), -lookup(y.index, z.index))
            }
        }
        (true, false) => -general(rs, pos, y, x),
    }
}

/// Structure constants for the whole root system.
pub fn chevalley_constants(rs: &RootSystem) -> ChevalleyConstants {
    let m = rs.num_positive();
    let mut pos: HashMap<(usize, usize), i64> = HashMap::new();
    let mut extraspecial = Vec::new();

    for xi in 0..m {
        if rs.height(xi) < 2 {
            continue;
        }
        let target = rs.root(xi).to_vec();
        let mut pairs = Vec::new();
        for a in 0..xi {
            let rest: Vec<i64> = target.iter().zip(rs.root(a)).map(|(t, x)| t - x).collect();
            if let Some(b) = rs.find(&rest) {
                if a < b {
                    pairs.push((a, b));
                }
            }
        }
        let (a1, b1) = pairs[0];
        let n1 = string_depth(rs, RootRef::pos(a1), RootRef::pos(b1)) + 1;
        pos.insert((a1, b1), n1);
        pos.insert((b1, a1), -n1);
        extraspecial.push(ExtraspecialPair {
            root: xi,
            alpha: a1,
            beta: b1,
        });

        let xi_norm = norm(rs, xi);
        for &(a, b) in &pairs[1..] {
            let (al, be, al1, be1) = (RootRef::pos(a), RootRef::pos(b), RootRef::pos(a1), RootRef::pos(b1));
            let mut acc = Ratio::from_integer(0i64);
            // N_{β,−α₁} N_{α,−β₁} / (β−α₁, β−α₁)
            if let Some(s) = root_sum(rs, be, al1.opposite()) {
                let t = general(rs, &pos, be, al1.opposite()) * general(rs, &pos, al, be1.opposite());
                acc += Ratio::new(t, norm(rs, s.index));
            }
            // N_{−α₁,α} N_{β,−β₁} / (α−α₁, α−α₁)
            if let Some(s) = root_sum(rs, al1.opposite(), al) {
                let t = general(rs, &pos, al1.opposite(), al) * general(rs, &pos, be, be1.opposite());
                acc += Ratio::new(t, norm(rs, s.index));
            }
            let val = acc * Ratio::new(xi_norm, n1);
            assert!(val.is_integer(), "non-integral structure constant for {:?}", (a, b));
            let val = val.to_integer();
            pos.insert((a, b), val);
            pos.insert((b, a), -val);
        }
    }

    let all: Vec<RootRef> = (0..m).map(RootRef::pos).chain((0..m).map(RootRef::neg)).collect();
    let mut table = BTreeMap::new();
    for &x in &all {
        for &y in &all {
            if root_sum(rs, x, y).is_some() {
                table.insert((x, y), general(rs, &pos, x, y));
            }
        }
    }
    ChevalleyConstants { table, extraspecial }
}

/// Integer structure constants of `𝔤^ℂ` on the basis
/// `h_1..h_r, E_{α_1}..E_{α_m}, E_{−α_1}..E_{−α_m}`.
#[derive(Clone, Debug)]
pub struct ComplexBracket {
    rank: usize,
    npos: usize,
    table: Vec<Vec<Vec<(usize, i64)>>>,
}

impl ComplexBracket {
    pub fn new(rs: &RootSystem, cc: &ChevalleyConstants) -> Self {
        let r = rs.rank();
        let m = rs.num_positive();
        let dim = r + 2 * m;
        let e = |x: RootRef| if x.negative { r + m + x.index } else { r + x.index };
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..r {
            for a in 0..m {
                let k = rs.pairing(rs.root(a), i);
                if k != 0 {
                    table[i][r + a] = vec![(r + a, k)];
                    table[r + a][i] = vec![(r + a, -k)];
                    table[i][r + m + a] = vec![(r + m + a, -k)];
                    table[r + m + a][i] = vec![(r + m + a, k)];
                }
            }
        }
        for a in 0..m {
            let h: Vec<(usize, i64)> = rs.coroot(a).into_iter().enumerate().filter(|(_, c)| *c != 0).collect();
            table[r + a][r + m + a] = h.clone();
            table[r + m + a][r + a] = h.into_iter().map(|(i, c)| (i, -c)).collect();
        }
        for (&(x, y), &n) in cc.iter() {
            let s = root_sum(rs, x, y).expect("table only holds root sums");
            table[e(x)][e(y)] = vec![(e(s), n)];
        }
        Self { rank: r, npos: m, table }
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a][b]
    }

    /// First basis triple violating the Jacobi identity.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        let mut acc = vec![0i64; n];
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    acc.iter_mut().for_each(|x| *x = 0);
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        for &(k, u) in self.bracket(y, z) {
                            for &(l, v) in self.bracket(x, k) {
                                acc[l] += u * v;
                            }
                        }
                    }
                    if acc.iter().any(|&x| x != 0) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, CartanSpec};

    fn setup(s: &str) -> (RootSystem, ChevalleyConstants) {
        let rs = build_root_system(&CartanSpec::parse(s).unwrap()).unwrap();
        let cc = chevalley_constants(&rs);
        (rs, cc)
    }

    #[test]
    fn a2_magnitude() {
        let (_, cc) = setup("A2");
        assert_eq!(cc.get(RootRef::pos(0), RootRef::pos(1)).abs(), 1);
        // α₁ + (α₁+α₂) is not a root
        assert_eq!(cc.get(RootRef::pos(0), RootRef::pos(2)), 0);
    }

    #[test]
    fn g2_magnitude() {
        let (_, cc) = setup("G2");
        assert_eq!(cc.get(RootRef::pos(0), RootRef::pos(2)).abs(), 2);
    }

    #[test]
    fn extraspecial_pairs_positive() {
        for s in ["A3", "B3", "C3", "G2", "F4", "D4"] {
            let (rs, cc) = setup(s);
            assert_eq!(cc.extraspecial_pairs().len(), rs.num_positive() - rs.rank());
            for p in cc.extraspecial_pairs() {
                assert!(cc.get(RootRef::pos(p.alpha), RootRef::pos(p.beta)) > 0);
            }
        }
    }

    #[test]
    fn constants_satisfy_invariants() {
        for s in ["A3", "B3", "C3", "G2", "F4", "D4", "A1+B2"] {
            let (rs, cc) = setup(s);
            for (&(x, y), &n) in cc.iter() {
                assert_eq!(n.abs(), string_depth(&rs, x, y) + 1, "{s} |N| at {x:?},{y:?}");
                assert_eq!(cc.get(y, x), -n);
                assert_eq!(cc.get(x.opposite(), y.opposite()), -n);
            }
        }
    }

    #[test]
    fn jacobi_holds_exhaustively() {
        for s in ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "G2", "F4", "A1+A1", "A2+G2"] {
            let (rs, cc) = setup(s);
            let br = ComplexBracket::new(&rs, &cc);
            assert_eq!(br.jacobi_violation(), None, "{s}");
        }
    }

    #[test]
    fn deterministic() {
        let (_, a) = setup("F4");
        let (_, b) = setup("F4");
        assert_eq!(a, b);
    }
}
