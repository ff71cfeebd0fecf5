//! Exact scalars in a multi-quadratic extension of the rationals.
//!
//! A [`Scalar`] is a finite sum `Σ q_m·√m` where every `m` is a square-free
//! integer (negative radicands allowed, `√m = i·√|m|` for `m < 0`).  Distinct
//! square-free radicands are linearly independent over ℚ, so the sorted term
//! list is a canonical form and equality is structural.
//!
//! [`FieldTower`] only tracks which square roots have been adjoined; the
//! arithmetic itself is self-describing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Convenience constructor for a rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An element of ℚ(√d₁, …, √d_k) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    // sorted by radicand, no zero coefficients, radicands square-free
    terms: Vec<(i64, Rational)>,
}

/// Split `n` into `k²·m` with `m` square-free; returns `(k, m)`.
pub fn square_free_part(n: i64) -> (i64, i64) {
    assert!(n != 0, "square_free_part of zero");
    let sign = n.signum();
    let mut rest = n.unsigned_abs();
    let mut k: u64 = 1;
    let mut m: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    m *= rest;
    (k as i64, sign * m as i64)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i64
}

/// Product of two square-free radicands: `√a·√b = coef·√r`.
fn radical_product(a: i64, b: i64) -> (i64, i64) {
    let g = gcd_i64(a, b);
    let r = (a.abs() / g) * (b.abs() / g);
    let negs = (a < 0) as u8 + (b < 0) as u8;
    match negs {
        0 => (g, r),
        1 => (g, -r),
        _ => (-g, r),
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(q: Rational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Scalar { terms: vec![(1, q)] }
        }
    }

    /// The principal square root of a rational number, `√(n/d)`.
    pub fn sqrt_of(q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let prod = q.numer() * q.denom();
        let prod = prod.to_i64().expect("radicand too large");
        let (k, m) = square_free_part(prod);
        // √(n/d) = √(n·d)/d = k·√m/d
        let c = Rational::new(BigInt::from(k), q.denom().clone());
        Scalar { terms: vec![(m, c)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 1)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_rational() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Radicands with a nonzero coefficient.
    pub fn radicands(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.iter().map(|(m, _)| *m)
    }

    pub fn terms(&self) -> &[(i64, Rational)] {
        &self.terms
    }

    fn from_terms(mut terms: Vec<(i64, Rational)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(i64, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Scalar { terms: out }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect(),
        }
    }

    /// Conjugation `√p ↦ −√p` for one prime `p` (or `p = −1` for `i`).
    fn conjugate_at(&self, p: i64) -> Self {
        let flips = |m: i64| {
            if p == -1 {
                m < 0
            } else {
                m % p == 0
            }
        };
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, if flips(*m) { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    fn some_radical_prime(&self) -> Option<i64> {
        for (m, _) in &self.terms {
            if *m < 0 {
                return Some(-1);
            }
        }
        for (m, _) in &self.terms {
            if *m != 1 {
                let mut p = 2;
                let n = m.abs();
                while p * p <= n {
                    if n % p == 0 {
                        return Some(p);
                    }
                    p += 1;
                }
                return Some(n);
            }
        }
        None
    }

    /// Multiplicative inverse, by successive conjugation down to ℚ.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut x = self.clone();
        let mut numer = Scalar::one();
        while let Some(p) = x.some_radical_prime() {
            let conj = x.conjugate_at(p);
            numer = &numer * &conj;
            x = &x * &conj;
        }
        let q = x.to_rational().expect("norm is rational");
        Ok(numer.scale_rational(&q.recip()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Textual form, e.g. `-1/2`, `1/3*sqrt(-2)`, `1 + 1/2*sqrt(3)`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    /// Deterministic total order used only for sorting output.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let a: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        let b: Vec<_> = other.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        a.cmp(&b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let ord = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &rhs.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Scalar { terms: out }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.terms.len() == 1 && rhs.terms.len() == 1 {
            let (a, ca) = &self.terms[0];
            let (b, cb) = &rhs.terms[0];
            if *a == 1 {
                return Scalar { terms: vec![(*b, ca * cb)] };
            }
            if *b == 1 {
                return Scalar { terms: vec![(*a, ca * cb)] };
            }
        }
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let (k, r) = radical_product(*a, *b);
                out.push((r, ca * cb * Rational::from_integer(BigInt::from(k))));
            }
        }
        Scalar::from_terms(out)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &Scalar) -> Scalar {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if rhs.is_zero() {
            return;
        }
        if self.terms.len() == 1 && rhs.terms.len() == 1 && self.terms[0].0 == rhs.terms[0].0 {
            self.terms[0].1 += &rhs.terms[0].1;
            if self.terms[0].1.is_zero() {
                self.terms.clear();
            }
            return;
        }
        *self = &*self + rhs;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self += &(-rhs);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let body = if *m == 1 {
                fmt_rational(&c.abs())
            } else {
                format!("{}*sqrt({})", fmt_rational(&c.abs()), m)
            };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
            } else if c.is_negative() {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational `{}`", s));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

fn parse_term(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if let Some(idx) = s.find("sqrt(") {
        let coef = s[..idx].trim().trim_end_matches('*').trim();
        let inner = s[idx + 5..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed sqrt in `{}`", s)))?;
        let d = parse_rational(inner)?;
        let c = if coef.is_empty() {
            Rational::one()
        } else if coef == "-" {
            -Rational::one()
        } else {
            parse_rational(coef)?
        };
        Ok(&Scalar::sqrt_of(&d) * &Scalar::from_rational(c))
    } else {
        Ok(Scalar::from_rational(parse_rational(s)?))
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        // split on top-level ' + ' / ' - ' and on a sign that is not the first char
        let mut acc = Scalar::zero();
        let mut start = 0;
        let bytes = s.as_bytes();
        let mut depth = 0i32;
        let mut pieces = Vec::new();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > 0 => {
                    let prev = s[..i].trim_end();
                    if !prev.ends_with('/') && !prev.ends_with('*') && !prev.is_empty() {
                        pieces.push(&s[start..i]);
                        start = i;
                    }
                }
                _ => {}
            }
        }
        pieces.push(&s[start..]);
        for p in pieces {
            let p = p.trim();
            let (neg, body) = if let Some(r) = p.strip_prefix('-') {
                (true, r)
            } else if let Some(r) = p.strip_prefix('+') {
                (false, r)
            } else {
                (false, p)
            };
            let t = parse_term(body)?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }
}

/// The set of square roots adjoined so far.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldTower {
    generators: Vec<i64>,
}

/// Maximum number of independent square roots a tower may hold.
pub const TOWER_CAPACITY: usize = 3;

impl FieldTower {
    pub fn rationals() -> Self {
        Self::default()
    }

    pub fn generators(&self) -> &[i64] {
        &self.generators
    }

    /// Square-free radicands reachable as products of generators.
    fn span(&self) -> Vec<i64> {
        let mut out = vec![1i64];
        for &g in &self.generators {
            let extra: Vec<i64> = out.iter().map(|&m| radical_product(m, g).1).collect();
            out.extend(extra);
        }
        out
    }

    pub fn contains_radicand(&self, m: i64) -> bool {
        self.span().contains(&m)
    }

    /// Whether every radicand of `x` lies in this tower.
    pub fn contains(&self, x: &Scalar) -> bool {
        let span = self.span();
        x.radicands().all(|m| span.contains(&m))
    }

    /// Adjoin `√d`; a no-op when the root is already present.
    pub fn adjoin_sqrt(&self, d: &Rational) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Precondition("cannot adjoin sqrt(0)".into()));
        }
        let m = Scalar::sqrt_of(d).radicands().next().unwrap_or(1);
        if self.contains_radicand(m) {
            return Ok(self.clone());
        }
        if self.generators.len() >= TOWER_CAPACITY {
            return Err(Error::Capacity(format!(
                "tower already has {} generators, cannot adjoin sqrt({})",
                TOWER_CAPACITY, d
            )));
        }
        let mut generators = self.generators.clone();
        generators.push(m);
        Ok(FieldTower { generators })
    }

    /// Smallest tower containing every radicand of the given scalars.
    pub fn covering<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> Result<Self> {
        let mut t = FieldTower::rationals();
        for x in xs {
            for m in x.radicands() {
                t = t.adjoin_sqrt(&Rational::from_integer(BigInt::from(m)))?;
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn rational_sum() {
        assert_eq!(&Scalar::frac(1, 2) + &Scalar::frac(1, 3), Scalar::frac(5, 6));
    }

    #[test]
    fn sqrt_minus_two_squares() {
        let r = Scalar::sqrt_of(&rat(-2, 1));
        assert_eq!(&r * &r, Scalar::from_int(-2));
        let i = Scalar::sqrt_of(&rat(-1, 1));
        assert_eq!(&i * &i, Scalar::from_int(-1));
        let r3 = Scalar::sqrt_of(&rat(-3, 1));
        assert_eq!(&r * &r3, Scalar::sqrt_of(&rat(6, 1)).scale_rational(&rat(-1, 1)));
    }

    #[test]
    fn inverse_rationalizes() {
        let x = &Scalar::one() + &Scalar::sqrt_of(&rat(-2, 1));
        let y = &Scalar::one() - &Scalar::sqrt_of(&rat(-2, 1));
        assert_eq!(x.inv().unwrap(), y.scale_rational(&rat(1, 3)));
        assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn inverse_in_three_generator_tower() {
        let x = s("1 + sqrt(2) + 2*sqrt(3) - sqrt(-5) + 1/2*sqrt(6)");
        assert_eq!(&x * &x.inv().unwrap(), Scalar::one());
    }

    #[test]
    fn sqrt_of_fraction() {
        let r = Scalar::sqrt_of(&rat(1, 2));
        assert_eq!(&r * &r, Scalar::frac(1, 2));
        assert_eq!(Scalar::sqrt_of(&rat(-8, 1)), s("2*sqrt(-2)"));
    }

    #[test]
    fn tower_adjoin() {
        let t = FieldTower::rationals().adjoin_sqrt(&rat(-2, 1)).unwrap();
        assert_eq!(t.generators(), &[-2]);
        assert_eq!(t.adjoin_sqrt(&rat(-2, 1)).unwrap(), t);
        assert_eq!(t.adjoin_sqrt(&rat(-8, 1)).unwrap(), t);
        assert_eq!(t.adjoin_sqrt(&rat(4, 9)).unwrap(), t);
        let t = t.adjoin_sqrt(&rat(3, 1)).unwrap();
        assert_eq!(t.adjoin_sqrt(&rat(-6, 1)).unwrap(), t);
        let t = t.adjoin_sqrt(&rat(5, 1)).unwrap();
        assert!(matches!(t.adjoin_sqrt(&rat(7, 1)), Err(Error::Capacity(_))));
        assert!(FieldTower::rationals().adjoin_sqrt(&rat(0, 1)).is_err());
    }

    #[test]
    fn render_and_parse() {
        for text in ["0", "-1/2", "3", "1/3*sqrt(-2)", "1 - 1/3*sqrt(-2)", "-2 + 5/7*sqrt(3) - 1*sqrt(6)"] {
            let x = s(text);
            assert_eq!(s(&x.render()), x, "{}", text);
        }
        assert_eq!(s("-1/16").render(), "-1/16");
        assert_eq!(s("1/2*sqrt(-2)").render(), "1/2*sqrt(-2)");
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        let radicands = prop::sample::select(vec![1i64, -1, 2, -2, 3, 6, -6]);
        prop::collection::vec((radicands, -9i64..9, 1i64..5), 0..4).prop_map(|ts| {
            let mut acc = Scalar::zero();
            for (m, n, d) in ts {
                acc += &Scalar::from_terms(vec![(m, rat(n, d))]);
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            }
        }

        #[test]
        fn parse_render_round_trip(a in arb_scalar()) {
            prop_assert_eq!(Scalar::parse(&a.render()).unwrap(), a);
        }
    }
}
