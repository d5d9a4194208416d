//! 90-digit fixed-point constants, for references that f64 cannot resolve.

use laplace_core::number::{factorial, Rational};
use num_bigint::BigInt;
use num_traits::Zero;

const DIGITS: usize = 90;

fn scale() -> BigInt {
    num_traits::pow(BigInt::from(10), DIGITS)
}

fn e() -> BigInt {
    let s = scale();
    let mut term = s.clone();
    let mut acc = BigInt::zero();
    let mut n = 1u32;
    while !term.is_zero() {
        acc += &term;
        term /= n;
        n += 1;
    }
    acc
}

/// `atan(1/x)`
fn atan_inv(x: u32) -> BigInt {
    let x2 = BigInt::from(x * x);
    let mut power = scale() / x;
    let mut acc = BigInt::zero();
    let mut n = 0u32;
    while !power.is_zero() {
        let t = &power / (2 * n + 1);
        if n % 2 == 0 {
            acc += t
        } else {
            acc -= t
        }
        power /= &x2;
        n += 1;
    }
    acc
}

fn pi() -> BigInt {
    atan_inv(5) * 16 - atan_inv(239) * 4
}

fn e_pow(k: i64) -> BigInt {
    let (s, e) = (scale(), e());
    let mut acc = s.clone();
    for _ in 0..k {
        acc = acc * &e / &s;
    }
    acc
}

/// `k!/(k^k e^{-k} √(2πk))`
pub fn stirling_ratio(k: i64) -> Rational {
    let s = scale();
    let radicand: BigInt = pi() * 2 * k * &s;
    let kfrac = factorial(k) * &s / num_traits::pow(BigInt::from(k), k as usize);
    Rational::new(kfrac * e_pow(k) / radicand.sqrt(), s)
}

/// `k! e^k / k^{k+1}`, the value of `∫_{-1}^∞ e^{-k(x - ln(1+x))} dx`.
pub fn factorial_integral(k: i64) -> Rational {
    let s = scale();
    Rational::new(factorial(k) * e_pow(k), num_traits::pow(BigInt::from(k), k as usize + 1) * s)
}
