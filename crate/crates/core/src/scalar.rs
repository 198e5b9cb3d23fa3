//! Exact scalars in a real quadratic field `Q(√d)`.
//!
//! Every value is `rat + irr·√radicand` with rational parts. A value with
//! `irr == 0` is a plain rational and carries radicand `0`. Arithmetic
//! between two irrational values with different radicands is a logic error
//! and panics; a single computation never leaves one field.
//!
//! The text form is `p/q`, `p/q*sqrt(d)` or a sum of the two, e.g.
//! `1/2-3/4*sqrt(3)`. Integers print without a denominator.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    rat: BigRational,
    irr: BigRational,
    radicand: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed exact number {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: String,
}

fn join_radicands(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, r) | (r, 0) => r,
        (r, s) if r == s => r,
        (r, s) => panic!("mixed quadratic fields: sqrt({r}) and sqrt({s})"),
    }
}

/// Splits `n` into `(s, f)` with `n = s²·f` and `f` squarefree.
fn square_split(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    (square, free * n)
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(rat: BigRational) -> Self {
        Self {
            rat,
            irr: BigRational::zero(),
            radicand: 0,
        }
    }

    /// `rat + irr·√d`, reducing `d` to its squarefree part.
    pub fn from_parts(rat: BigRational, irr: BigRational, d: u64) -> Self {
        if irr.is_zero() || d == 0 {
            return Self::from_rational(rat);
        }
        let (s, f) = square_split(d);
        let irr = irr * BigRational::from_integer(BigInt::from(s));
        if f == 1 {
            return Self::from_rational(rat + irr);
        }
        Self {
            rat,
            irr,
            radicand: f,
        }
    }

    /// Exact square root of a nonnegative rational.
    pub fn sqrt_rational(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Self::zero());
        }
        // sqrt(p/q) = sqrt(p·q)/q
        let pq = (q.numer() * q.denom()).to_u64()?;
        let (s, f) = square_split(pq);
        let coef = BigRational::new(BigInt::from(s), q.denom().clone());
        Some(Self::from_parts(BigRational::zero(), coef, f))
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.irr.is_zero() && self.rat.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irr
    }

    /// Squarefree radicand, `0` for rationals.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rat)
    }

    /// Integer value if this is an integer.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_rational() && self.rat.is_integer() {
            self.rat.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.rat.numer().sign();
        let sb = self.irr.numer().sign();
        let ord = |s: Sign| match s {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        };
        match (sa, sb) {
            (_, Sign::NoSign) => ord(sa),
            (Sign::NoSign, _) => ord(sb),
            (a, b) if a == b => ord(a),
            (a, b) => {
                let a2 = &self.rat * &self.rat;
                let b2d = &self.irr * &self.irr * BigRational::from_integer(self.radicand.into());
                if a2 > b2d {
                    ord(a)
                } else {
                    ord(b)
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(self.rat.recip()));
        }
        let d = BigRational::from_integer(self.radicand.into());
        let norm = &self.rat * &self.rat - &self.irr * &self.irr * d;
        Some(Self {
            rat: &self.rat / &norm,
            irr: -(&self.irr / &norm),
            radicand: self.radicand,
        })
    }

    /// Float approximation, diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            r
        } else {
            r + self.irr.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
        }
    }

    fn normalized(rat: BigRational, irr: BigRational, radicand: u64) -> Self {
        if irr.is_zero() {
            Self::from_rational(rat)
        } else {
            Self { rat, irr, radicand }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.irr.is_zero() && rhs.irr.is_zero() {
            return Scalar::from_rational(&self.rat + &rhs.rat);
        }
        let d = join_radicands(self.radicand, rhs.radicand);
        Scalar::normalized(&self.rat + &rhs.rat, &self.irr + &rhs.irr, d)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if self.irr.is_zero() && rhs.irr.is_zero() {
            return Scalar::from_rational(&self.rat - &rhs.rat);
        }
        let d = join_radicands(self.radicand, rhs.radicand);
        Scalar::normalized(&self.rat - &rhs.rat, &self.irr - &rhs.irr, d)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        match (self.irr.is_zero(), rhs.irr.is_zero()) {
            (true, true) => Scalar::from_rational(&self.rat * &rhs.rat),
            (true, false) => Scalar::normalized(&self.rat * &rhs.rat, &self.rat * &rhs.irr, rhs.radicand),
            (false, true) => Scalar::normalized(&self.rat * &rhs.rat, &self.irr * &rhs.rat, self.radicand),
            (false, false) => {
                let d = join_radicands(self.radicand, rhs.radicand);
                let dq = BigRational::from_integer(d.into());
                Scalar::normalized(
                    &self.rat * &rhs.rat + &self.irr * &rhs.irr * dq,
                    &self.rat * &rhs.irr + &self.irr * &rhs.rat,
                    d,
                )
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.recip().expect("division by zero");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            rat: -&self.rat,
            irr: -&self.irr,
            radicand: self.radicand,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if self.irr.is_zero() && rhs.irr.is_zero() {
            self.rat += &rhs.rat;
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        if self.irr.is_zero() && rhs.irr.is_zero() {
            self.rat -= &rhs.rat;
        } else {
            *self = &*self - rhs;
        }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if !self.rat.is_zero() {
            write!(f, "{}", self.rat)?;
            if self.irr.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.irr == BigRational::one() {
            write!(f, "sqrt({})", self.radicand)
        } else if self.irr == -BigRational::one() {
            write!(f, "-sqrt({})", self.radicand)
        } else {
            write!(f, "{}*sqrt({})", self.irr, self.radicand)
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator {n:?}"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator {d:?}"))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        }
        None => s
            .parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|_| format!("bad integer {s:?}")),
    }
}

/// One signed term: `q`, `q*sqrt(d)`, `sqrt(d)`, `sqrt(d)/n`, `q*sqrt(d)/n`.
fn parse_term(term: &str) -> Result<Scalar, String> {
    let (neg, body) = match term.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, term.strip_prefix('+').unwrap_or(term)),
    };
    let value = match body.find("sqrt(") {
        None => Scalar::from_rational(parse_rational(body)?),
        Some(at) => {
            let coef = match body[..at].strip_suffix('*') {
                Some(c) => parse_rational(c)?,
                None if at == 0 => BigRational::one(),
                None => return Err(format!("expected '*' before sqrt in {body:?}")),
            };
            let rest = &body[at + 5..];
            let close = rest.find(')').ok_or("unclosed sqrt(")?;
            let d: u64 = rest[..close]
                .trim()
                .parse()
                .map_err(|_| format!("bad radicand {:?}", &rest[..close]))?;
            let tail = &rest[close + 1..];
            let coef = if tail.is_empty() {
                coef
            } else {
                let den = tail.strip_prefix('/').ok_or(format!("trailing {tail:?}"))?;
                coef / parse_rational(den)?
            };
            Scalar::from_parts(BigRational::zero(), coef, d)
        }
    };
    Ok(if neg { -value } else { value })
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| ParseScalarError {
            input: input.to_string(),
            reason,
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty".into()));
        }
        // split at top-level signs that are not the leading sign
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if i > start && depth == 0 && !s[..i].ends_with('/') && !s[..i].ends_with('*') => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut total = Scalar::zero();
        let mut radicand = 0;
        for t in terms {
            let v = parse_term(t).map_err(err)?;
            if v.radicand != 0 {
                if radicand != 0 && radicand != v.radicand {
                    return Err(err("more than one radicand".into()));
                }
                radicand = v.radicand;
            }
            total += &v;
        }
        Ok(total)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(Scalar::from_int(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(s("3"), Scalar::from_int(3));
        assert_eq!(s("-1/2"), Scalar::from_ratio(-1, 2));
        assert_eq!(s("sqrt(12)"), s("2*sqrt(3)"));
        assert_eq!(s("sqrt(3)/3"), s("1/3*sqrt(3)"));
        assert_eq!(s("1/2 - 3/4*sqrt(3)").to_string(), "1/2-3/4*sqrt(3)");
        assert_eq!(s("sqrt(4)"), Scalar::from_int(2));
        assert_eq!(s("-sqrt(3)").to_string(), "-sqrt(3)");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("sqrt(2)+sqrt(3)".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_arithmetic() {
        let r3 = s("sqrt(3)");
        assert_eq!(&r3 * &r3, Scalar::from_int(3));
        let x = s("1+sqrt(3)");
        let inv = x.recip().unwrap();
        assert!((&x * &inv).is_one());
        assert_eq!(&x - &x, Scalar::zero());
        assert_eq!((&x - &r3).radicand(), 0);
    }

    #[test]
    fn ordering_with_surds() {
        // 2 - sqrt(3) > 0, 1 - sqrt(3) < 0
        assert!(s("2-sqrt(3)").is_positive());
        assert_eq!(s("1-sqrt(3)").signum(), Ordering::Less);
        assert_eq!(s("-7/4+sqrt(3)").signum(), Ordering::Less);
        assert!(s("-3/2+sqrt(3)").is_positive());
        assert_eq!(s("1-sqrt(3)").abs(), s("-1+sqrt(3)"));
    }

    #[test]
    fn sqrt_of_rationals() {
        let q = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(Scalar::sqrt_rational(&q(9, 4)).unwrap(), Scalar::from_ratio(3, 2));
        assert_eq!(Scalar::sqrt_rational(&q(1, 3)).unwrap(), s("sqrt(3)/3"));
        assert!(Scalar::sqrt_rational(&q(-1, 3)).is_none());
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixed_fields_panic() {
        let _ = s("sqrt(2)") + s("sqrt(3)");
    }

    proptest::proptest! {
        #[test]
        fn display_parse_roundtrip(a in -50i64..50, b in 1i64..20, c in -50i64..50, e in 1i64..20, d in 2u64..30) {
            let x = Scalar::from_parts(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), e.into()), d);
            let back: Scalar = x.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, x);
        }
    }
}
