//! Fixtures and independent reference formulas shared by the integration and acceptance tests.
#![allow(dead_code)]

use laplace_core::multiindex::{enumerate, MultiIndex};
use laplace_core::number::{factorial, int, ratio, Closed, Rational};
use laplace_core::spectral::Matrix;
use laplace_core::taylor::TaylorPoly;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub mod checks;
pub mod fixed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random rational `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 4`.
pub fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    ratio(r.gen_range(-6..=6), r.gen_range(1..=4))
}

pub fn positive_rational(r: &mut ChaCha8Rng) -> Rational {
    ratio(r.gen_range(1..=9), r.gen_range(1..=4))
}

pub fn poly(dim: usize, terms: &[(&[u32], Rational)]) -> TaylorPoly<Rational> {
    let max = terms.iter().map(|(a, _)| a.iter().sum::<u32>() as usize).max().unwrap_or(0);
    TaylorPoly::from_terms(
        dim,
        max,
        terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), c.clone())),
    )
    .unwrap()
}

/// Every monomial of the given orders with random coefficients.
pub fn random_layers(r: &mut ChaCha8Rng, dim: usize, orders: std::ops::RangeInclusive<usize>) -> TaylorPoly<Rational> {
    let top = *orders.end();
    let mut p = TaylorPoly::zero(dim, top);
    for n in orders {
        for a in enumerate(dim, n) {
            p.add_term(a, small_rational(r));
        }
    }
    p
}

pub fn half_norm_squared(dim: usize) -> TaylorPoly<Rational> {
    let mut p = TaylorPoly::zero(dim, 2);
    for i in 0..dim {
        let e = MultiIndex::unit(dim, i);
        p.add_term(e.add(&e), ratio(1, 2));
    }
    p
}

/// `∂^α p(0) = α! c_α`.
pub fn deriv(p: &TaylorPoly<Rational>, alpha: &[u32]) -> Rational {
    let a = MultiIndex::new(alpha.to_vec());
    p.coeff(&a) * Rational::from_integer(a.factorial())
}

/// 1-D derivative `p^{(n)}(0)`.
pub fn d1(p: &TaylorPoly<Rational>, n: u32) -> Rational {
    deriv(p, &[n])
}

const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

fn plane_rotation(d: usize, i: usize, j: usize, r: &mut ChaCha8Rng) -> Matrix<Rational> {
    let (a, b, h) = TRIPLES[r.gen_range(0..TRIPLES.len())];
    let (c, s) = if r.gen_bool(0.5) { (a, b) } else { (b, a) };
    let s = if r.gen_bool(0.5) { s } else { -s };
    let mut m: Matrix<Rational> = (0..d)
        .map(|p| (0..d).map(|q| if p == q { int(1) } else { int(0) }).collect())
        .collect();
    m[i][i] = ratio(c, h);
    m[j][j] = ratio(c, h);
    m[i][j] = ratio(-s, h);
    m[j][i] = ratio(s, h);
    m
}

pub fn matmul(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Matrix<Rational> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Random orthogonal matrix with rational entries (products of Pythagorean plane rotations).
pub fn rational_rotation(d: usize, r: &mut ChaCha8Rng) -> Matrix<Rational> {
    let mut m: Matrix<Rational> = (0..d)
        .map(|p| (0..d).map(|q| if p == q { int(1) } else { int(0) }).collect())
        .collect();
    for i in 0..d {
        for j in i + 1..d {
            m = matmul(&m, &plane_rotation(d, i, j, r));
        }
    }
    m
}

/// `f`, `g` in `y`-coordinates (Hessian the identity) together with the same data in
/// `x = P⁻¹ y` for a rational `P = diag(s) Q`; `det H_x = Π s_i²`.
pub struct NormalFixture {
    pub fy: TaylorPoly<Rational>,
    pub gy: TaylorPoly<Rational>,
    pub fx: TaylorPoly<Rational>,
    pub gx: TaylorPoly<Rational>,
    /// `Π |s_i|`, i.e. `√det H_x`.
    pub sqrt_det: Rational,
}

pub fn normal_fixture(d: usize, r: &mut ChaCha8Rng) -> NormalFixture {
    let fy = half_norm_squared(d).add(&random_layers(r, d, 3..=4));
    let gy = random_layers(r, d, 0..=2);
    let q = rational_rotation(d, r);
    let s: Vec<Rational> = (0..d).map(|_| positive_rational(r)).collect();
    let p: Matrix<Rational> = (0..d)
        .map(|i| q[i].iter().map(|v| v * &s[i]).collect())
        .collect();
    let fx = fy.substitute_linear(&p).unwrap();
    let gx = gy.substitute_linear(&p).unwrap();
    let sqrt_det = s.iter().fold(Rational::one(), |acc, v| acc * v.abs());
    NormalFixture { fy, gy, fx, gx, sqrt_det }
}

/// `(2π)^{d/2}`
pub fn two_pi_half(d: usize) -> Closed {
    &Closed::pi_pow_half(d as i32) * &Closed::rational_power(&int(2), &ratio(d as i64, 2)).unwrap()
}

/// `ζ₀ = √(2π) g(0) / √f''(0)`.
pub fn closed_form_d1_zeta0(f: &TaylorPoly<Rational>, g: &TaylorPoly<Rational>) -> Closed {
    let f2 = d1(f, 2);
    &(&two_pi_half(1) * &Closed::rational_power(&f2, &ratio(-1, 2)).unwrap()) * &Closed::rational(d1(g, 0))
}

/// d = 1, `ζ₂`:
/// `√(2π)/f''^{7/2} (½g''f''² - ½g'f'''f'' - ⅛g f''''f'' + 5/24 g f'''²)`.
pub fn closed_form_d1_zeta2(f: &TaylorPoly<Rational>, g: &TaylorPoly<Rational>) -> Closed {
    let (f2, f3, f4) = (d1(f, 2), d1(f, 3), d1(f, 4));
    let (g0, g1, g2) = (d1(g, 0), d1(g, 1), d1(g, 2));
    let bracket = ratio(1, 2) * &g2 * &f2 * &f2 - ratio(1, 2) * &g1 * &f3 * &f2
        - ratio(1, 8) * &g0 * &f4 * &f2
        + ratio(5, 24) * &g0 * &f3 * &f3;
    &(&two_pi_half(1) * &Closed::rational_power(&f2, &ratio(-7, 2)).unwrap()) * &Closed::rational(bracket)
}

/// d = 1, `ζ₄`, as `√(2π)/f''^{13/2}` times a polynomial in the derivatives
/// (`Fn = f^{(n)}(0)`, `Gn = g^{(n)}(0)`).
pub fn closed_form_d1_zeta4(f: &TaylorPoly<Rational>, g: &TaylorPoly<Rational>) -> Closed {
    let fd: Vec<Rational> = (0..=6).map(|n| d1(f, n)).collect();
    let gd: Vec<Rational> = (0..=4).map(|n| d1(g, n)).collect();
    let (f2, f3, f4, f5, f6) = (&fd[2], &fd[3], &fd[4], &fd[5], &fd[6]);
    let (g0, g1, g2, g3, g4) = (&gd[0], &gd[1], &gd[2], &gd[3], &gd[4]);
    let p = |n: u32| num_traits::pow(f2.clone(), n as usize);
    let p3 = |n: u32| num_traits::pow(f3.clone(), n as usize);
    let bracket = ratio(1, 8) * g4 * p(4)
        - ratio(5, 12) * g3 * f3 * p(3)
        - ratio(5, 16) * g2 * f4 * p(3)
        + ratio(35, 48) * g2 * p3(2) * p(2)
        - ratio(1, 8) * g1 * f5 * p(3)
        + ratio(35, 48) * g1 * f4 * f3 * p(2)
        - ratio(35, 48) * g1 * p3(3) * f2
        - ratio(1, 48) * g0 * f6 * p(3)
        + ratio(35, 384) * g0 * f4 * f4 * p(2)
        + ratio(7, 48) * g0 * f5 * f3 * p(2)
        - ratio(35, 64) * g0 * f4 * p3(2) * f2
        + ratio(385, 1152) * g0 * p3(4);
    &(&two_pi_half(1) * &Closed::rational_power(f2, &ratio(-13, 2)).unwrap()) * &Closed::rational(bracket)
}

/// d = 2, `ζ₂` from `y`-derivatives, times `1/√det H_x`.
pub fn closed_form_d2_zeta2(fy: &TaylorPoly<Rational>, gy: &TaylorPoly<Rational>, sqrt_det: &Rational) -> Closed {
    let f = |a: &[u32]| deriv(fy, a);
    let g = |a: &[u32]| deriv(gy, a);
    let (f111, f112, f122, f222) = (f(&[3, 0]), f(&[2, 1]), f(&[1, 2]), f(&[0, 3]));
    let bracket = ratio(1, 2) * (g(&[2, 0]) + g(&[0, 2]))
        - ratio(1, 2) * g(&[1, 0]) * (&f122 + &f111)
        - ratio(1, 2) * g(&[0, 1]) * (&f112 + &f222)
        + g(&[0, 0])
            * (ratio(-1, 8) * (f(&[4, 0]) + int(2) * f(&[2, 2]) + f(&[0, 4]))
                + ratio(1, 4) * (&f222 * &f112 + &f111 * &f122)
                + ratio(3, 8) * (&f122 * &f122 + &f112 * &f112)
                + ratio(5, 24) * (&f111 * &f111 + &f222 * &f222));
    &two_pi_half(2) * &Closed::rational(bracket / sqrt_det)
}

/// d = 3, `ζ₂` from `y`-derivatives, times `1/√det H_x`.
pub fn closed_form_d3_zeta2(fy: &TaylorPoly<Rational>, gy: &TaylorPoly<Rational>, sqrt_det: &Rational) -> Closed {
    let f = |a: [u32; 3]| deriv(fy, &a);
    let g = |a: [u32; 3]| deriv(gy, &a);
    let (f111, f222, f333) = (f([3, 0, 0]), f([0, 3, 0]), f([0, 0, 3]));
    let (f112, f113, f122) = (f([2, 1, 0]), f([2, 0, 1]), f([1, 2, 0]));
    let (f223, f133, f233) = (f([0, 2, 1]), f([1, 0, 2]), f([0, 1, 2]));
    let f123 = f([1, 1, 1]);
    let laplacian_g = g([2, 0, 0]) + g([0, 2, 0]) + g([0, 0, 2]);
    let gradient = g([1, 0, 0]) * (&f111 + &f122 + &f133)
        + g([0, 1, 0]) * (&f222 + &f233 + &f112)
        + g([0, 0, 1]) * (&f333 + &f223 + &f113);
    let quartic = f([4, 0, 0]) + f([0, 4, 0]) + f([0, 0, 4])
        + int(2) * (f([2, 2, 0]) + f([2, 0, 2]) + f([0, 2, 2]));
    let cubes = &f111 * &f111 + &f222 * &f222 + &f333 * &f333;
    let mixed_squares = &f112 * &f112 + &f113 * &f113 + &f223 * &f223
        + &f122 * &f122 + &f133 * &f133 + &f233 * &f233;
    let pure_mixed = &f111 * (&f122 + &f133) + &f222 * (&f112 + &f233) + &f333 * (&f113 + &f223);
    let mixed_mixed = &f133 * &f122 + &f223 * &f113 + &f233 * &f112;
    let bracket = ratio(1, 2) * laplacian_g - ratio(1, 2) * gradient
        + g([0, 0, 0])
            * (ratio(-1, 8) * quartic
                + ratio(5, 24) * cubes
                + ratio(3, 8) * mixed_squares
                + ratio(1, 4) * pure_mixed
                + ratio(1, 4) * mixed_mixed
                + ratio(1, 2) * &f123 * &f123);
    &two_pi_half(3) * &Closed::rational(bracket / sqrt_det)
}

/// `f_m^(r)` by summing over every ordered composition of `m` into `r` positive parts.
pub fn brute_force_bell(coeffs: &[Rational], m: usize, r: usize) -> Rational {
    fn go(coeffs: &[Rational], m: usize, r: usize) -> Rational {
        if r == 0 {
            return if m == 0 { Rational::one() } else { Rational::zero() };
        }
        let mut acc = Rational::zero();
        for first in 1..=m {
            if first > coeffs.len() {
                break;
            }
            let rest = go(coeffs, m - first, r - 1);
            if !rest.is_zero() {
                acc += &coeffs[first - 1] * rest;
            }
        }
        acc
    }
    go(coeffs, m, r)
}

/// `n!` as a rational.
pub fn fact(n: i64) -> Rational {
    Rational::from_integer(factorial(n))
}
