//! Parameter-affine scalars with exact rational coefficients.
//!
//! Every reduced symplectic class is affine in the gluing parameters (the
//! size of the extremal surfaces and the gaps between critical levels) and
//! in the running level inside one regular interval. [`Affine`] is that
//! scalar type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// Shorthand for an integral rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `p` or `p/q` into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// A named parameter of a profile.
///
/// The derived ordering (`MinSize < MaxSize < Gap(0) < Gap(1) < ... < Level`)
/// is the variable order used by constraint systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// Symplectic area of the minimum when it is a surface.
    MinSize,
    /// Symplectic area of the maximum when it is a surface.
    MaxSize,
    /// Distance between consecutive critical levels, counted from the bottom.
    Gap(u32),
    /// The running level inside one regular interval, measured from its
    /// lower end. Never appears in a constraint system.
    Level,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::MinSize => f.write_str("alpha0"),
            Param::MaxSize => f.write_str("alphabar"),
            Param::Gap(i) => write!(f, "t{i}"),
            Param::Level => f.write_str("t"),
        }
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "alpha0" => Ok(Param::MinSize),
            "alphabar" => Ok(Param::MaxSize),
            "t" => Ok(Param::Level),
            other => other
                .strip_prefix('t')
                .and_then(|rest| rest.parse::<u32>().ok())
                .map(Param::Gap)
                .ok_or_else(|| format!("unknown parameter name `{other}`")),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `constant + sum(coefficient * param)` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of affine functions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Affine {
    terms: BTreeMap<Param, Q>,
    constant: Q,
}

impl Affine {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(q(c))
    }

    pub fn var(p: Param) -> Self {
        Self::term(p, Q::one())
    }

    pub fn term(p: Param, c: Q) -> Self {
        let mut a = Self::zero();
        a.add_term(p, c);
        a
    }

    /// Builds `constant + sum(c * p)` from integer data.
    pub fn from_ints(constant: i64, terms: &[(Param, i64)]) -> Self {
        let mut a = Self::int(constant);
        for &(p, c) in terms {
            a.add_term(p, q(c));
        }
        a
    }

    pub fn add_term(&mut self, p: Param, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(p).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn coeff(&self, p: Param) -> Q {
        self.terms.get(&p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> &Q {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (Param, &Q)> + '_ {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn params(&self) -> impl Iterator<Item = Param> + '_ {
        self.terms.keys().copied()
    }

    pub fn mentions(&self, p: Param) -> bool {
        self.terms.contains_key(&p)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        if (-c).is_one() {
            return -self.clone();
        }
        Self {
            terms: self.terms.iter().map(|(p, v)| (*p, v * c)).collect(),
            constant: &self.constant * c,
        }
    }

    /// Replaces `p` by `value` everywhere.
    pub fn substitute(&self, p: Param, value: &Affine) -> Self {
        let c = self.coeff(p);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.terms.remove(&p);
        rest + value.scale(&c)
    }

    /// Evaluates at a full assignment; `None` if some parameter is missing.
    pub fn eval(&self, point: &BTreeMap<Param, Q>) -> Option<Q> {
        let mut acc = self.constant.clone();
        for (p, c) in &self.terms {
            acc += c * point.get(p)?;
        }
        Some(acc)
    }

    /// Renames parameters through `map`; parameters not in the map are kept.
    pub fn rename(&self, map: &BTreeMap<Param, Param>) -> Self {
        let mut out = Self::constant(self.constant.clone());
        for (p, c) in &self.terms {
            out.add_term(*map.get(p).unwrap_or(p), c.clone());
        }
        out
    }

    /// Positive multiple whose leading coefficient (first parameter, or the
    /// constant when there are none) has absolute value one. Two forms
    /// describe the same strict or non-strict inequality iff their
    /// normalizations agree.
    pub fn normalized(&self) -> Self {
        let lead = self
            .terms
            .values()
            .next()
            .cloned()
            .unwrap_or_else(|| self.constant.clone());
        if lead.is_zero() {
            return self.clone();
        }
        self.scale(&lead.abs().recip())
    }

    /// Multiple whose leading coefficient is exactly one. Two forms describe
    /// the same equation iff their monic versions agree.
    pub fn monic(&self) -> Self {
        let lead = self
            .terms
            .values()
            .next()
            .cloned()
            .unwrap_or_else(|| self.constant.clone());
        if lead.is_zero() {
            return self.clone();
        }
        self.scale(&lead.recip())
    }
}

impl From<Param> for Affine {
    fn from(p: Param) -> Self {
        Affine::var(p)
    }
}

impl AddAssign<&Affine> for Affine {
    fn add_assign(&mut self, rhs: &Affine) {
        for (p, c) in &rhs.terms {
            self.add_term(*p, c.clone());
        }
        self.constant += &rhs.constant;
    }
}

impl SubAssign<&Affine> for Affine {
    fn sub_assign(&mut self, rhs: &Affine) {
        for (p, c) in &rhs.terms {
            self.add_term(*p, -c.clone());
        }
        self.constant -= &rhs.constant;
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(mut self, rhs: Affine) -> Affine {
        self += &rhs;
        self
    }
}

impl Add<&Affine> for &Affine {
    type Output = Affine;
    fn add(self, rhs: &Affine) -> Affine {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(mut self, rhs: Affine) -> Affine {
        self -= &rhs;
        self
    }
}

impl Sub<&Affine> for &Affine {
    type Output = Affine;
    fn sub(self, rhs: &Affine) -> Affine {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(mut self) -> Affine {
        for v in self.terms.values_mut() {
            *v = -std::mem::take(v);
        }
        self.constant = -self.constant;
        self
    }
}

impl Neg for &Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        -self.clone()
    }
}

impl Mul<i64> for &Affine {
    type Output = Affine;
    fn mul(self, rhs: i64) -> Affine {
        self.scale(&q(rhs))
    }
}

impl Mul<i64> for Affine {
    type Output = Affine;
    fn mul(self, rhs: i64) -> Affine {
        self.scale(&q(rhs))
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in &self.terms {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if mag.is_one() {
                write!(f, "{p}")?;
            } else {
                write!(f, "{}*{p}", fmt_q(&mag))?;
            }
            first = false;
        }
        if first {
            return f.write_str(&fmt_q(&self.constant));
        }
        if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", fmt_q(&self.constant.abs()))?;
        }
        Ok(())
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coefficients: BTreeMap<String, String> = self
            .terms
            .iter()
            .map(|(p, c)| (p.to_string(), fmt_q(c)))
            .collect();
        let mut st = serializer.serialize_struct("Affine", 3)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("constant", &fmt_q(&self.constant))?;
        st.serialize_field("coefficients", &coefficients)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_collects_terms() {
        let a = Affine::from_ints(0, &[(Param::MinSize, 1), (Param::Gap(0), -2)]);
        assert_eq!(a.to_string(), "alpha0 - 2*t0");
        let b = Affine::from_ints(-3, &[(Param::Gap(1), 1)]);
        assert_eq!(b.to_string(), "t1 - 3");
        assert_eq!(Affine::zero().to_string(), "0");
        assert_eq!(Affine::constant(frac(-1, 2)).to_string(), "-1/2");
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = Affine::var(Param::Gap(0));
        let d = &a - &a;
        assert!(d.is_zero());
        assert_eq!(d, Affine::zero());
    }

    #[test]
    fn substitution_and_eval() {
        // (alpha0 - k t) x-coefficient at t = t0 with k = 2
        let c = Affine::from_ints(0, &[(Param::MinSize, 1), (Param::Level, -2)]);
        let at_end = c.substitute(Param::Level, &Affine::var(Param::Gap(0)));
        assert_eq!(at_end.to_string(), "alpha0 - 2*t0");
        let point: BTreeMap<_, _> = [(Param::MinSize, q(5)), (Param::Gap(0), q(1))].into();
        assert_eq!(at_end.eval(&point), Some(q(3)));
        assert_eq!(c.eval(&point), None);
    }

    #[test]
    fn normalization_is_positive_scaling() {
        let a = Affine::from_ints(4, &[(Param::Gap(0), -2)]);
        let n = a.normalized();
        assert_eq!(n, Affine::from_ints(2, &[(Param::Gap(0), -1)]));
        assert_eq!(a.monic(), Affine::from_ints(-2, &[(Param::Gap(0), 1)]));
    }

    #[test]
    fn param_names_round_trip() {
        for p in [Param::MinSize, Param::MaxSize, Param::Gap(0), Param::Gap(12), Param::Level] {
            assert_eq!(p.to_string().parse::<Param>().unwrap(), p);
        }
        assert!("tx".parse::<Param>().is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_q("3/6"), Some(frac(1, 2)));
        assert_eq!(parse_q("-4"), Some(q(-4)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&frac(6, 4)), "3/2");
    }
}
