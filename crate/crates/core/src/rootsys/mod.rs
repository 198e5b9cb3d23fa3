//! Root systems of semisimple Lie algebras given as direct sums of simple
//! factors, with Chevalley-basis structure constants.
//!
//! Conventions (Bourbaki numbering):
//! - `cartan[i][j] = ⟨α_i, α_j^∨⟩ = 2(α_i, α_j)/(α_j, α_j)`;
//! - roots are integer coordinate vectors over the simple roots of all
//!   factors, numbered globally in factor order;
//! - positive roots are sorted by height, then by descending coordinates,
//!   so `α₁` precedes `α₂`.

mod cache;
mod chevalley;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cache::{cache_dir_from_env, chevalley_constants_cached, CACHE_ENV_VAR, CONVENTION_VERSION};
pub use chevalley::{chevalley_constants, ChevalleyConstants, ComplexBracket, ExtraspecialPair, RootRef};
pub(crate) use chevalley::root_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

/// One simple factor, e.g. `G2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleFactor {
    pub family: Family,
    pub rank: usize,
}

impl SimpleFactor {
    pub fn new(family: Family, rank: usize) -> Self {
        Self { family, rank }
    }

    /// Checks admissibility and maps the low-rank aliases `C2 → B2`,
    /// `D3 → A3` onto their canonical family.
    pub fn canonical(self) -> Result<Self> {
        let Self { family, rank } = self;
        let bad = |reason| Error::Inadmissible {
            family: family.letter(),
            rank,
            reason,
        };
        match family {
            Family::A if rank >= 1 => Ok(self),
            Family::B if rank >= 2 => Ok(self),
            Family::C if rank == 2 => Ok(Self::new(Family::B, 2)),
            Family::C if rank >= 3 => Ok(self),
            Family::D if rank == 3 => Ok(Self::new(Family::A, 3)),
            Family::D if rank >= 4 => Ok(self),
            Family::E if (6..=8).contains(&rank) => Ok(self),
            Family::F if rank == 4 => Ok(self),
            Family::G if rank == 2 => Ok(self),
            Family::A => Err(bad("rank must be at least 1")),
            Family::B | Family::C => Err(bad("rank must be at least 2")),
            Family::D => Err(bad("rank must be at least 3")),
            Family::E => Err(bad("rank must be 6, 7 or 8")),
            Family::F => Err(bad("rank must be 4")),
            Family::G => Err(bad("rank must be 2")),
        }
    }

    /// Closed-form number of positive roots.
    pub fn positive_root_count(self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
            Family::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }

    pub fn dim(self) -> usize {
        self.rank + 2 * self.positive_root_count()
    }

    /// Cartan matrix `⟨α_i, α_j^∨⟩`. Assumes a canonical factor.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C => (0..n.saturating_sub(1)).for_each(|i| link(i, i + 1)),
            Family::D => {
                (0..n - 2).for_each(|i| link(i, i + 1));
                link(n - 3, n - 1);
            }
            Family::E => {
                for (i, j) in [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)] {
                    link(i, j);
                }
                (5..n - 1).for_each(|i| link(i, i + 1));
            }
            Family::F => (0..3).for_each(|i| link(i, i + 1)),
            Family::G => link(0, 1),
        }
        match self.family {
            Family::B => a[n - 2][n - 1] = -2,
            Family::C => a[n - 1][n - 2] = -2,
            Family::F => a[1][2] = -2,
            Family::G => a[1][0] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for SimpleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for SimpleFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = chars.next().and_then(Family::from_letter).ok_or_else(|| Error::BadFactor(s.into()))?;
        let rank: usize = chars.as_str().parse().map_err(|_| Error::BadFactor(s.into()))?;
        Ok(Self::new(family, rank))
    }
}

impl Serialize for SimpleFactor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SimpleFactor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanSpec {
    pub factors: Vec<SimpleFactor>,
}

impl CartanSpec {
    pub fn new(factors: Vec<SimpleFactor>) -> Self {
        Self { factors }
    }

    /// Parses `"A2"`, `"A1+A1"` or `"A1 + G2"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.split('+').map(str::parse).collect::<Result<Vec<_>>>().map(Self::new)
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank).sum()
    }

    pub fn canonical(&self) -> Result<Self> {
        if self.factors.is_empty() {
            return Err(Error::Structure("empty list of simple factors".into()));
        }
        self.factors.iter().map(|f| f.canonical()).collect::<Result<Vec<_>>>().map(Self::new)
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }
}

impl fmt::Display for CartanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    spec: CartanSpec,
    cartan: Vec<Vec<i64>>,
    /// `(α_i, α_i)/2`, normalized per factor to integers with minimum 1.
    half_norms: Vec<i64>,
    factor_of_simple: Vec<usize>,
    positive: Vec<Vec<i64>>,
    factor_of_root: Vec<usize>,
    lookup: HashMap<Vec<i64>, usize>,
}

/// Builds the positive roots by root-string closure from the simple roots.
pub fn build_root_system(spec: &CartanSpec) -> Result<RootSystem> {
    let spec = spec.canonical()?;
    let rank = spec.rank();
    let mut cartan = vec![vec![0i64; rank]; rank];
    let mut factor_of_simple = Vec::with_capacity(rank);
    let mut offset = 0;
    for (f, factor) in spec.factors.iter().enumerate() {
        let block = factor.cartan_matrix();
        for i in 0..factor.rank {
            for j in 0..factor.rank {
                cartan[offset + i][offset + j] = block[i][j];
            }
            factor_of_simple.push(f);
        }
        offset += factor.rank;
    }
    let half_norms = symmetrizer(&cartan, &factor_of_simple);

    // ⟨β, α_i^∨⟩ = Σ_j k_j cartan[j][i]
    let pairing = |beta: &[i64], i: usize| -> i64 { beta.iter().enumerate().map(|(j, k)| k * cartan[j][i]).sum() };

    let mut roots: Vec<Vec<i64>> = (0..rank).map(|i| unit(rank, i)).collect();
    let mut known: HashMap<Vec<i64>, ()> = roots.iter().map(|r| (r.clone(), ())).collect();
    let mut layer = roots.clone();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for beta in &layer {
            for i in 0..rank {
                // p: how far the α_i-string through β extends downward
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let q = p - pairing(beta, i);
                if q > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !known.contains_key(&up) {
                        known.insert(up.clone(), ());
                        next.push(up);
                    }
                }
            }
        }
        roots.extend(next.iter().cloned());
        layer = next;
    }

    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    let factor_of_root = roots
        .iter()
        .map(|r| factor_of_simple[r.iter().position(|&k| k != 0).expect("nonzero root")])
        .collect();
    let lookup = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    Ok(RootSystem {
        spec,
        cartan,
        half_norms,
        factor_of_simple,
        positive: roots,
        factor_of_root,
        lookup,
    })
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Solves `cartan[i][j]·d_j = cartan[j][i]·d_i` along the Dynkin diagram.
fn symmetrizer(cartan: &[Vec<i64>], factor_of_simple: &[usize]) -> Vec<i64> {
    use num::rational::Ratio;
    use num::Integer;
    let n = cartan.len();
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Ratio::from_integer(1));
        let mut stack = vec![start];
        let mut comp = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && cartan[i][j] != 0 && d[j].is_none() {
                    let di = d[i].expect("visited");
                    d[j] = Some(di * cartan[j][i] / cartan[i][j]);
                    stack.push(j);
                    comp.push(j);
                }
            }
        }
        let lcm = comp.iter().fold(1i64, |acc, &i| acc.lcm(d[i].expect("set").denom()));
        let scaled: Vec<i64> = comp.iter().map(|&i| (d[i].expect("set") * lcm).to_integer()).collect();
        let g = scaled.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &x) in comp.iter().zip(&scaled) {
            d[i] = Some(Ratio::from_integer(x / g));
        }
        debug_assert!(comp.iter().all(|&i| factor_of_simple[i] == factor_of_simple[start]));
    }
    d.into_iter().map(|x| x.expect("all visited").to_integer()).collect()
}

impl RootSystem {
    pub fn spec(&self) -> &CartanSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn num_factors(&self) -> usize {
        self.spec.factors.len()
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.positive[i]
    }

    pub fn height(&self, i: usize) -> i64 {
        self.positive[i].iter().sum()
    }

    pub fn factor_of_root(&self, i: usize) -> usize {
        self.factor_of_root[i]
    }

    pub fn factor_of_simple(&self, j: usize) -> usize {
        self.factor_of_simple[j]
    }

    /// Index of the positive root with these coordinates.
    pub fn find(&self, coords: &[i64]) -> Option<usize> {
        self.lookup.get(coords).copied()
    }

    /// Positive root index of the simple root `α_j`.
    pub fn simple_root_index(&self, j: usize) -> usize {
        self.find(&unit(self.rank(), j)).expect("simple roots are roots")
    }

    /// Simple root number if root `i` is simple.
    pub fn as_simple(&self, i: usize) -> Option<usize> {
        let r = &self.positive[i];
        (self.height(i) == 1).then(|| r.iter().position(|&k| k == 1).expect("height one"))
    }

    /// Symmetric form `(β, γ)` in units where short roots of each factor have
    /// `(α, α) = 2`.
    pub fn inner(&self, beta: &[i64], gamma: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if beta[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += beta[i] * gamma[j] * self.cartan[i][j] * self.half_norms[j];
            }
        }
        s
    }

    /// `⟨β, α_i^∨⟩`
    pub fn pairing(&self, beta: &[i64], i: usize) -> i64 {
        beta.iter().enumerate().map(|(j, k)| k * self.cartan[j][i]).sum()
    }

    /// Coordinates of the coroot `α^∨` of positive root `i` over the simple
    /// coroots.
    pub fn coroot(&self, i: usize) -> Vec<i64> {
        let r = &self.positive[i];
        let half = self.inner(r, r) / 2;
        r.iter()
            .zip(&self.half_norms)
            .map(|(k, d)| {
                debug_assert_eq!((k * d) % half, 0);
                k * d / half
            })
            .collect()
    }

    pub fn half_norms(&self) -> &[i64] {
        &self.half_norms
    }

    pub fn simple_label(&self, j: usize) -> String {
        format!("a{}", j + 1)
    }

    /// Parses `a<j>` (1-based) into a simple root number.
    pub fn parse_simple_label(&self, label: &str) -> Result<usize> {
        label
            .trim()
            .strip_prefix('a')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&j| (1..=self.rank()).contains(&j))
            .map(|j| j - 1)
            .ok_or_else(|| Error::UnknownRoot(label.to_string()))
    }

    /// Human-readable label, e.g. `3a1+2a2`.
    pub fn root_label(&self, i: usize) -> String {
        coords_label(&self.positive[i])
    }

    /// Simple roots belonging to each factor.
    pub fn simple_roots_of_factor(&self, f: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&j| self.factor_of_simple[j] == f).collect()
    }

    /// Positive roots whose support lies in `simple` (a set of simple root
    /// numbers).
    pub fn roots_supported_on(&self, simple: &[usize]) -> Vec<usize> {
        (0..self.num_positive())
            .filter(|&i| self.positive[i].iter().enumerate().all(|(j, &k)| k == 0 || simple.contains(&j)))
            .collect()
    }
}

pub fn coords_label(coords: &[i64]) -> String {
    let mut parts = Vec::new();
    for (j, &k) in coords.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("a{}", j + 1)),
            -1 => parts.push(format!("-a{}", j + 1)),
            _ => parts.push(format!("{k}a{}", j + 1)),
        }
    }
    parts.join("+").replace("+-", "-")
}
