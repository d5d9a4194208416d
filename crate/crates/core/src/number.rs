//! Exact and floating scalars.
//!
//! Three layers are used throughout the crate:
//!
//! * [`Rational`]: arbitrary-precision rationals for every combinatorial quantity.
//! * [`Closed`]: exact closed forms `c · π^(k/2) · R^(1/T)` with rational `c` and
//!   positive rational `R`. This covers everything the coefficient formulas
//!   produce when all inputs are rational and the Γ arguments are integers or
//!   half-integers: sphere moments, `Γ(n + 1/2)`, rational powers like
//!   `a₀^(-(j+q)/ν)` and `det(H)^(-1/2)`.
//! * [`Real`]: either an exact [`Closed`] or an `f64`. Arithmetic stays exact
//!   for as long as both operands are exact and the result is representable.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Build `n / d` from machine integers.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!`, with `n! = 1` for `n <= 0`.
pub fn factorial(n: i64) -> BigInt {
    (2..=n.max(1)).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Natural log of a positive big integer without overflowing `f64`.
fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(r: &Rational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match ToPrimitive::to_f64(r) {
        Some(v) if v.is_finite() => v,
        _ => {
            if r.is_zero() {
                0.0
            } else {
                let mag = ln_rational(&r.abs()).exp();
                if r.is_negative() {
                    -mag
                } else {
                    mag
                }
            }
        }
    }
}

/// Integer power of a rational, negative exponents allowed.
pub fn rational_powi(base: &Rational, exp: i64) -> Rational {
    let p = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Parse `"p/q"`, `"-7"`, or a decimal literal such as `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    // decimal with optional exponent
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let scale = exponent - fp.len() as i64;
    let mut r = Rational::from_integer(n) * rational_powi(&int(10), scale);
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact `n`-th root of a nonnegative big integer, if it exists.
fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

fn exact_rational_root(r: &Rational, k: u32) -> Option<Rational> {
    Some(Rational::new(exact_root(r.numer(), k)?, exact_root(r.denom(), k)?))
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Divides every `p^t` with `p < 1000` out of `n` and returns the product of those `p`.
///
/// Together with the perfect-power check this gives a canonical radicand for every
/// value that arises from small rational inputs.
fn pull_small_powers(n: &mut BigInt, t: u32) -> BigInt {
    let mut m = BigInt::one();
    for p in 2u32..1000 {
        let pt = num_traits::pow(BigInt::from(p), t as usize);
        if pt > *n {
            break;
        }
        while (&*n % &pt).is_zero() {
            *n /= &pt;
            m *= p;
        }
    }
    m
}

/// Exact closed form `coeff · π^(pi_half/2) · radicand^(1/root)`.
#[derive(Clone, Debug)]
pub struct Closed {
    coeff: Rational,
    pi_half: i32,
    radicand: Rational,
    root: u32,
}

impl Closed {
    pub fn rational(r: Rational) -> Self {
        Closed {
            coeff: r,
            pi_half: 0,
            radicand: Rational::one(),
            root: 1,
        }
        .normalized()
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(int(n))
    }

    /// `π^(half/2)`.
    pub fn pi_pow_half(half: i32) -> Self {
        Closed {
            coeff: Rational::one(),
            pi_half: half,
            radicand: Rational::one(),
            root: 1,
        }
    }

    /// `base^exp` for a positive rational base and rational exponent.
    pub fn rational_power(base: &Rational, exp: &Rational) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::InvalidInput(format!(
                "fractional power of non-positive base {base}"
            )));
        }
        let (whole, frac) = exp.numer().div_mod_floor(exp.denom());
        let whole = whole
            .to_i64()
            .ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
        let root = exp
            .denom()
            .to_u32()
            .ok_or_else(|| Error::InvalidInput("exponent denominator too large".into()))?;
        let frac = frac.to_usize().unwrap_or(0);
        Ok(Closed {
            coeff: rational_powi(base, whole),
            pi_half: 0,
            radicand: num_traits::pow(base.clone(), frac),
            root,
        }
        .normalized())
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            return Closed {
                coeff: Rational::zero(),
                pi_half: 0,
                radicand: Rational::one(),
                root: 1,
            };
        }
        if self.root > 1 && !self.radicand.denom().is_one() {
            // (n/d)^(1/t) = (n d^(t-1))^(1/t) / d
            let d = self.radicand.denom().clone();
            self.coeff /= Rational::from_integer(d.clone());
            self.radicand = Rational::from_integer(
                self.radicand.numer() * num_traits::pow(d, self.root as usize - 1),
            );
        }
        'outer: loop {
            if self.radicand.is_one() {
                self.root = 1;
            }
            for p in prime_factors(self.root) {
                if let Some(r) = exact_rational_root(&self.radicand, p) {
                    self.radicand = r;
                    self.root /= p;
                    continue 'outer;
                }
            }
            if self.root > 1 {
                let mut n = self.radicand.numer().clone();
                let m = pull_small_powers(&mut n, self.root);
                if !m.is_one() {
                    self.coeff *= Rational::from_integer(m);
                    self.radicand = Rational::from_integer(n);
                    continue;
                }
            }
            break;
        }
        if self.root == 1 {
            self.coeff *= std::mem::replace(&mut self.radicand, Rational::one());
        }
        self
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn pi_half(&self) -> i32 {
        self.pi_half
    }

    /// Returns `(radicand, root)`.
    pub fn radical(&self) -> (&Rational, u32) {
        (&self.radicand, self.root)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The value as a plain rational, if it has no irrational factor.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.pi_half == 0 && self.root == 1).then_some(&self.coeff)
    }

    pub fn to_f64(&self) -> f64 {
        if self.coeff.is_zero() {
            return 0.0;
        }
        let log_mag = ln_rational(&self.coeff.abs())
            + self.pi_half as f64 * 0.5 * std::f64::consts::PI.ln()
            + ln_rational(&self.radicand) / self.root as f64;
        let mag = if self.pi_half == 0 && self.root == 1 {
            rational_to_f64(&self.coeff.abs())
        } else {
            log_mag.exp()
        };
        if self.coeff.is_negative() {
            -mag
        } else {
            mag
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.coeff.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(Closed {
            coeff: self.coeff.recip(),
            pi_half: -self.pi_half,
            radicand: self.radicand.recip(),
            root: self.root,
        }
        .normalized())
    }

    /// Same irrational part (π power and radical), so that the sum is exact.
    fn same_shape(&self, other: &Closed) -> bool {
        self.pi_half == other.pi_half && self.root == other.root && self.radicand == other.radicand
    }

    /// Exact sum, when the two values share their irrational factor.
    pub fn checked_add(&self, other: &Closed) -> Option<Closed> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.same_shape(other) {
            return Some(
                Closed {
                    coeff: &self.coeff + &other.coeff,
                    ..self.clone()
                }
                .normalized(),
            );
        }
        // Radicals that differ by a rational factor, e.g. sqrt(8) and sqrt(2).
        if self.pi_half == other.pi_half && self.root == other.root {
            let q = &self.radicand / &other.radicand;
            if let Some(r) = exact_rational_root(&q, self.root) {
                return Some(
                    Closed {
                        coeff: &self.coeff * r + &other.coeff,
                        ..other.clone()
                    }
                    .normalized(),
                );
            }
        }
        None
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Result<Closed> {
        let mut acc = Closed::integer(1);
        let base = if n < 0 { self.recip()? } else { self.clone() };
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

impl Mul for &Closed {
    type Output = Closed;
    fn mul(self, rhs: &Closed) -> Closed {
        if self.is_zero() || rhs.is_zero() {
            return Closed::integer(0);
        }
        let root = self.root.lcm(&rhs.root);
        let radicand = num_traits::pow(self.radicand.clone(), (root / self.root) as usize)
            * num_traits::pow(rhs.radicand.clone(), (root / rhs.root) as usize);
        Closed {
            coeff: &self.coeff * &rhs.coeff,
            pi_half: self.pi_half + rhs.pi_half,
            radicand,
            root,
        }
        .normalized()
    }
}

impl Neg for Closed {
    type Output = Closed;
    fn neg(mut self) -> Closed {
        self.coeff = -self.coeff;
        self
    }
}

impl PartialEq for Closed {
    fn eq(&self, other: &Closed) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.pi_half != other.pi_half || self.coeff.is_negative() != other.coeff.is_negative() {
            return false;
        }
        // Compare |c₁|^T R₁^(T/T₁) with |c₂|^T R₂^(T/T₂).
        let t = self.root.lcm(&other.root);
        let lhs = num_traits::pow(self.coeff.abs(), t as usize)
            * num_traits::pow(self.radicand.clone(), (t / self.root) as usize);
        let rhs = num_traits::pow(other.coeff.abs(), t as usize)
            * num_traits::pow(other.radicand.clone(), (t / other.root) as usize);
        lhs == rhs
    }
}

impl fmt::Display for Closed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors: Vec<String> = Vec::new();
        match self.pi_half {
            0 => {}
            2 => factors.push("pi".into()),
            h if h % 2 == 0 => factors.push(format!("pi^{}", h / 2)),
            h => factors.push(format!("pi^({h}/2)")),
        }
        if self.root == 2 {
            factors.push(format!("sqrt({})", self.radicand));
        } else if self.root > 1 {
            factors.push(format!("({})^(1/{})", self.radicand, self.root));
        }
        if factors.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        if self.coeff.is_one() {
            write!(f, "{}", factors.join("*"))
        } else if self.coeff == -Rational::one() {
            write!(f, "-{}", factors.join("*"))
        } else {
            write!(f, "{}*{}", self.coeff, factors.join("*"))
        }
    }
}

impl FromStr for Closed {
    type Err = Error;

    /// Parses the format written by `Display`.
    fn from_str(s: &str) -> Result<Closed> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) if rest.starts_with(|c: char| !c.is_ascii_digit()) => (true, rest),
            _ => (false, s),
        };
        let bad = || Error::Parse(format!("not a closed form: {s:?}"));
        let mut acc = Closed::integer(if neg { -1 } else { 1 });
        for factor in body.split('*') {
            let factor = factor.trim();
            let term = if factor == "pi" {
                Closed::pi_pow_half(2)
            } else if let Some(e) = factor.strip_prefix("pi^") {
                let e = e.trim_start_matches('(').trim_end_matches(')');
                let e = parse_rational(e)?;
                let half = (e * int(2)).to_integer().to_i32().ok_or_else(bad)?;
                Closed::pi_pow_half(half)
            } else if let Some(inner) = factor.strip_prefix("sqrt(") {
                let inner = inner.strip_suffix(')').ok_or_else(bad)?;
                Closed::rational_power(&parse_rational(inner)?, &ratio(1, 2))?
            } else if let Some(rest) = factor.strip_prefix('(') {
                let (base, exp) = rest.split_once(")^(").ok_or_else(bad)?;
                let exp = exp.strip_suffix(')').ok_or_else(bad)?;
                Closed::rational_power(&parse_rational(base)?, &parse_rational(exp)?)?
            } else {
                Closed::rational(parse_rational(factor)?)
            };
            acc = &acc * &term;
        }
        Ok(acc)
    }
}

/// A real number that is exact when it can be.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(Closed),
    Float(f64),
}

impl Real {
    pub fn rational(r: Rational) -> Real {
        Real::Exact(Closed::rational(r))
    }

    pub fn integer(n: i64) -> Real {
        Real::Exact(Closed::integer(n))
    }

    pub fn zero() -> Real {
        Real::integer(0)
    }

    pub fn one() -> Real {
        Real::integer(1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(c) => c.to_f64(),
            Real::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Exact(c) => c.as_rational(),
            Real::Float(_) => None,
        }
    }

    pub fn as_closed(&self) -> Option<&Closed> {
        match self {
            Real::Exact(c) => Some(c),
            Real::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(c) => c.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.to_f64() > 0.0 || self.as_rational().is_some_and(|r| r.is_positive())
    }

    /// Demote to floating point.
    pub fn to_float(&self) -> Real {
        Real::Float(self.to_f64())
    }

    /// `self^exp` for positive `self`; exact when both are exact rationals.
    pub fn pow(&self, exp: &Real) -> Result<Real> {
        if let (Some(b), Some(e)) = (self.as_rational(), exp.as_rational()) {
            return Ok(Real::Exact(Closed::rational_power(b, e)?));
        }
        if let (Real::Exact(c), Some(e)) = (self, exp.as_rational()) {
            if e.is_integer() {
                if let Some(n) = e.to_integer().to_i32() {
                    return Ok(Real::Exact(c.powi(n)?));
                }
            }
        }
        let b = self.to_f64();
        if b <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "fractional power of non-positive base {b}"
            )));
        }
        Ok(Real::Float(b.powf(exp.to_f64())))
    }

    pub fn recip(&self) -> Result<Real> {
        match self {
            Real::Exact(c) => Ok(Real::Exact(c.recip()?)),
            Real::Float(x) => Ok(Real::Float(1.0 / x)),
        }
    }

    /// Render as the exact closed form or a decimal.
    pub fn to_exact_string(&self) -> String {
        match self {
            Real::Exact(c) => c.to_string(),
            Real::Float(x) => format!("{x:e}"),
        }
    }

    /// Exact equality when both sides are exact; otherwise relative closeness.
    pub fn approx_eq(&self, other: &Real, rel: f64) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() <= f64::MIN_POSITIVE
            }
        }
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Real {
        Real::rational(r)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Real {
        Real::Float(x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        if let (Real::Exact(a), Real::Exact(b)) = (self, rhs) {
            if let Some(s) = a.checked_add(b) {
                return Real::Exact(s);
            }
        }
        Real::Float(self.to_f64() + rhs.to_f64())
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        self + &(-rhs.clone())
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => Real::Float(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) if !b.is_zero() => {
                Real::Exact(a * &b.recip().expect("nonzero"))
            }
            _ => Real::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(c) => Real::Exact(-c),
            Real::Float(x) => Real::Float(-x),
        }
    }
}

/// Coefficient field used by the generic algorithms: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    /// `None` when an exact scalar cannot hold a floating value.
    fn from_real(r: &Real) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Lift into [`Real`], keeping exactness.
    fn to_real(&self) -> Real;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    /// Sum of many terms. Floating scalars use compensated summation.
    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }

    /// True when the value is zero within the scalar's own precision.
    fn is_negligible(&self, scale: f64) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_real(r: &Real) -> Option<Self> {
        r.as_rational().cloned()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_real(&self) -> Real {
        Real::rational(self.clone())
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_real(r: &Real) -> Option<Self> {
        Some(r.to_f64())
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_real(&self) -> Real {
        Real::Float(*self)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        compensated_sum(iter)
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE)
    }
}

/// Neumaier's compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in iter {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Running compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation of `Γ(x)` for real `x` (about 15 significant digits).
pub fn gamma_f64(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_f64(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS_COEFFS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// `Γ(x)`, exact for positive integers and half-integers.
pub fn gamma(x: &Real) -> Result<Real> {
    if let Some(r) = x.as_rational() {
        if !r.is_positive() && r.is_integer() {
            return Err(Error::InvalidInput(format!("Γ has a pole at {r}")));
        }
        let twice = r * int(2);
        if r.is_positive() && twice.is_integer() {
            let t = twice.to_integer().to_i64().unwrap_or(i64::MAX);
            if t < 400 {
                if t % 2 == 0 {
                    return Ok(Real::rational(Rational::from_integer(factorial(t / 2 - 1))));
                }
                // Γ(n + 1/2) = (2n-1)!! / 2^n · √π
                let n = (t - 1) / 2;
                let c = Rational::new(double_factorial(2 * n - 1), BigInt::one() << n as usize);
                return Ok(Real::Exact(&Closed::rational(c) * &Closed::pi_pow_half(1)));
            }
        }
    }
    Ok(Real::Float(gamma_f64(x.to_f64())))
}

/// Generalized binomial `x (x-1) ... (x-r+1) / r!`.
pub fn gen_binomial<T: Scalar>(x: &T, r: usize) -> T {
    let mut acc = T::one();
    for i in 0..r {
        acc = acc * (x.clone() - T::from_i64(i as i64)) / T::from_i64(i as i64 + 1);
    }
    acc
}
