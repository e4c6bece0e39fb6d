//! Exact coefficient arithmetic.
//!
//! Two coefficient fields are in use: the Gaussian rationals ℚ(i) for every
//! algebra with integer grading, and ℚ(√2) for the higher rank Virasoro
//! algebra over ℤ + ℤ√2. Both are quadratic extensions of ℚ and share one
//! implementation, [`QuadraticField`], parameterised by the square of the
//! adjoined generator. The two never mix: they are distinct types.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Field elements usable as coefficients of algebra elements, words and
/// module vectors.
pub trait Coefficient:
    Clone
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + FromStr<Err = Error>
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    fn inv(&self) -> Result<Self>;

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    /// Splits the value for printing inside a signed sum: `(negative, body)`.
    /// Values with two nonzero parts are parenthesised and never negated.
    fn signed_term(&self) -> (bool, String);
}

/// `a + b·x` with `x² = D` and `a, b` rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct QuadraticField<const D: i64> {
    pub a: Rational,
    pub b: Rational,
}

/// Gaussian rationals ℚ(i).
pub type Scalar = QuadraticField<-1>;

/// ℚ(√2), the coefficient field of the higher rank Virasoro algebra.
pub type QuadScalar = QuadraticField<2>;

impl<const D: i64> QuadraticField<D> {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_parts(a: i64, b: i64) -> Self {
        Self::new(int(a), int(b))
    }

    /// `a - b·x`.
    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    /// `a² - D·b²`, nonzero for every nonzero element since `D` is not a
    /// rational square.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - int(D) * &self.b * &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    const fn unit_name() -> &'static str {
        match D {
            -1 => "i",
            2 => "sqrt2",
            _ => "x",
        }
    }
}

impl Scalar {
    pub fn re(&self) -> &Rational {
        &self.a
    }

    pub fn im(&self) -> &Rational {
        &self.b
    }

    pub fn i() -> Self {
        Self::from_parts(0, 1)
    }
}

impl QuadScalar {
    pub fn sqrt2() -> Self {
        Self::from_parts(0, 1)
    }
}

impl<const D: i64> From<Rational> for QuadraticField<D> {
    fn from(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }
}

impl<const D: i64> From<i64> for QuadraticField<D> {
    fn from(n: i64) -> Self {
        Self::from_parts(n, 0)
    }
}

impl From<QuadInt> for QuadScalar {
    fn from(q: QuadInt) -> Self {
        Self::from_parts(q.a, q.b)
    }
}

impl<const D: i64> Zero for QuadraticField<D> {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<const D: i64> One for QuadraticField<D> {
    fn one() -> Self {
        Self::from_parts(1, 0)
    }
}

impl<const D: i64> Add for QuadraticField<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl<const D: i64> Sub for QuadraticField<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl<const D: i64> Neg for QuadraticField<D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<const D: i64> Mul for QuadraticField<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.a * &rhs.a + int(D) * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Self::new(a, b)
    }
}

impl<const D: i64> Coefficient for QuadraticField<D> {
    fn from_rational(r: Rational) -> Self {
        r.into()
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::new(&self.a / &n, -(&self.b / &n)))
    }

    fn signed_term(&self) -> (bool, String) {
        if self.b.is_zero() {
            (self.a.is_negative(), self.a.abs().to_string())
        } else if self.a.is_zero() {
            (self.b.is_negative(), format!("{}*{}", self.b.abs(), Self::unit_name()))
        } else {
            (false, format!("({self})"))
        }
    }
}

/// Exact field arithmetic selector for [`scalar_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(x: &Scalar, y: &Scalar, op: ArithOp) -> Result<Scalar> {
    Ok(match op {
        ArithOp::Add => x.clone() + y.clone(),
        ArithOp::Sub => x.clone() - y.clone(),
        ArithOp::Mul => x.clone() * y.clone(),
        ArithOp::Div => x.checked_div(y)?,
    })
}

impl<const D: i64> fmt::Display for QuadraticField<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = Self::unit_name();
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*{unit}", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{sign}{}*{unit}", self.a, self.b.abs())
            }
        }
    }
}

impl<const D: i64> FromStr for QuadraticField<D> {
    type Err = Error;

    /// Accepts the printed grammar `a/b`, `c/d*u`, `a/b+c/d*u` where `u` is
    /// the unit name, plus the shorthand `u`, `-u`, `a+u`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let unit = Self::unit_name();
        let Some(body) = s.strip_suffix(unit) else {
            return Ok(parse_rational(&s)?.into());
        };
        // split off the real part at the last sign that is not leading
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = im.strip_suffix('*').unwrap_or(im);
        let im = match im {
            "" | "+" => int(1),
            "-" => int(-1),
            other => parse_rational(other)?,
        };
        let re = if re.is_empty() { Rational::zero() } else { parse_rational(re)? };
        Ok(Self::new(re, im))
    }
}

/// The real number `a + b·√2` with integer `a, b`: an element of the rank-2
/// grading group ℤ + ℤ√2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct QuadInt {
    pub a: i64,
    pub b: i64,
}

impl QuadInt {
    pub const ZERO: QuadInt = QuadInt { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn scale(self, k: i64) -> Self {
        Self::new(self.a * k, self.b * k)
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Approximate value, for display only.
    pub fn approx(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }

    /// Whether `self < q` exactly, for a rational `q`.
    pub fn lt_rational(self, q: &Rational) -> Result<bool> {
        let conv = |x: &BigInt| {
            x.to_i64().ok_or_else(|| Error::Domain("threshold out of range".into()))
        };
        let (n, d) = (conv(q.numer())?, conv(q.denom())?);
        // self < n/d  <=>  n - d*self > 0 (d > 0)
        let diff = QuadInt::new(n, 0) - self.scale(d);
        Ok(quad_sign(diff) > 0)
    }
}

/// Exact sign of `a + b√2`.
pub fn quad_sign(v: QuadInt) -> i8 {
    let sa = v.a.signum() as i8;
    let sb = v.b.signum() as i8;
    if sa == 0 || sb == 0 || sa == sb {
        return if sa != 0 { sa } else { sb };
    }
    let a2 = (v.a as i128) * (v.a as i128);
    let b2 = 2 * (v.b as i128) * (v.b as i128);
    // a, b of opposite signs; the rational part wins iff a² > 2b²
    match a2.cmp(&b2) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => unreachable!("√2 is irrational"),
    }
}

impl Add for QuadInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for QuadInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for QuadInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for QuadInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.a * rhs.a + 2 * self.b * rhs.b, self.a * rhs.b + self.b * rhs.a)
    }
}

impl Ord for QuadInt {
    fn cmp(&self, other: &Self) -> Ordering {
        quad_sign(*self - *other).cmp(&0)
    }
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl FromStr for QuadInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad group element `{s}`, expected (a,b)"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Ok(QuadInt::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ))
    }
}
