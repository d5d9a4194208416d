//! Checks shared by the integration tests and the acceptance runner. Each one panics on failure.

use super::*;
use laplace_core::coefficients::{
    f0const_coeffs, general_coeffs, nondegenerate_coeffs, oned_coeffs, taylor_coeffs, Expansion,
};
use laplace_core::multiindex::{enumerate_up_to, sphere_moment};
use laplace_core::number::{rational_to_f64, Real};
use laplace_core::oracle::{builtin, default_grid, integrate, verify_order, Domain, IntegrandSpec, LevelStatus, QuadratureReport};
use laplace_core::series::{bell, compose_check, invert, ScalarSeries};
use laplace_core::spectral::{determinant, inverse};
use laplace_core::taylor::radialize;
use num_bigint::BigInt;
use serde_json::Value;

/// `c|x|^ν` plus random layers of order `ν+1..=ν+extra`.
pub fn isotropic_fixture(d: usize, nu: usize, extra: usize, seed: u64) -> (TaylorPoly<Rational>, TaylorPoly<Rational>) {
    let mut r = rng(seed);
    let c = positive_rational(&mut r);
    let mut norm = TaylorPoly::constant(d, 0, int(1));
    for _ in 0..nu / 2 {
        norm = norm.mul(&half_norm_squared(d).scale(&int(2)));
    }
    let f = TaylorPoly::zero(d, nu + extra)
        .add(&norm.scale(&c))
        .add(&random_layers(&mut r, d, nu + 1..=nu + extra));
    let g = random_layers(&mut r, d, 0..=extra);
    (f, g)
}

pub fn assert_exact_eq(a: &Expansion, b: &Expansion, what: &str) {
    assert_eq!(a.terms.len(), b.terms.len());
    for (x, y) in a.terms.iter().zip(&b.terms) {
        assert!(x.zeta.is_exact() && y.zeta.is_exact(), "{what}: inexact ζ_{}", x.j);
        assert!(x.zeta.approx_eq(&y.zeta, 0.0), "{what}: ζ_{} {} vs {}", x.j, x.zeta, y.zeta);
    }
}

/// Relative agreement, with coefficients far below the largest one compared against that scale.
pub fn assert_close(a: &Expansion, b: &Expansion, rel: f64, what: &str) {
    let scale = a.terms.iter().map(|t| t.zeta.to_f64().abs()).fold(0.0, f64::max);
    for (x, y) in a.terms.iter().zip(&b.terms) {
        let (u, v) = (x.zeta.to_f64(), y.zeta.to_f64());
        assert!((u - v).abs() <= rel * u.abs().max(v.abs()).max(1e-3 * scale), "{what}: ζ_{} {u} vs {v}", x.j);
    }
}

// ---- Laplace approximation and the closed forms for d ≤ 3

pub fn laplace_approximation() {
    for seed in 0..10u64 {
        let mut r = rng(1100 + seed);
        let d = 1 + (seed as usize % 3);
        let fx = normal_fixture(d, &mut r);
        let e = nondegenerate_coeffs(&fx.fx.to_f64(), &fx.gx.to_f64(), 0).unwrap();
        let det = determinant(&fx.fx.to_f64().hessian());
        let g0 = fx.gx.coeff(&MultiIndex::zeros(d));
        let expected = (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0) * rational_to_f64(&g0) / det.sqrt();
        let got = e.terms[0].zeta.to_f64();
        assert!((got - expected).abs() <= 1e-12 * expected.abs(), "seed {seed}: {got} vs {expected}");
    }
}

fn exact(e: &Real) -> &Closed {
    e.as_closed().expect("rational input should give an exact coefficient")
}

pub fn closed_forms_d1() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let mut f = random_layers(&mut r, 1, 3..=6);
        f.add_term(MultiIndex::new(vec![2]), positive_rational(&mut r) * ratio(1, 2));
        let g = random_layers(&mut r, 1, 0..=4);
        let e = nondegenerate_coeffs(&f, &g, 4).unwrap();
        assert_eq!(exact(&e.terms[0].zeta), &closed_form_d1_zeta0(&f, &g), "seed {seed}");
        assert_eq!(exact(&e.terms[2].zeta), &closed_form_d1_zeta2(&f, &g), "seed {seed}");
        assert_eq!(exact(&e.terms[4].zeta), &closed_form_d1_zeta4(&f, &g), "seed {seed}");
    }
    // f = x²/2 + x³ + x⁴, g = 1: ζ₂ = (9/2)√(2π)
    let f = poly(1, &[(&[2], ratio(1, 2)), (&[3], int(1)), (&[4], int(1))]);
    let g = poly(1, &[(&[0], int(1))]);
    assert_eq!(closed_form_d1_zeta2(&f, &g), &Closed::rational(ratio(9, 2)) * &two_pi_half(1));
}

pub fn closed_forms_d2() {
    for seed in 100..115 {
        let fx = normal_fixture(2, &mut rng(seed));
        let e = nondegenerate_coeffs(&fx.fx, &fx.gx, 2).unwrap();
        assert_eq!(exact(&e.terms[2].zeta), &closed_form_d2_zeta2(&fx.fy, &fx.gy, &fx.sqrt_det), "seed {seed}");
    }
}

pub fn closed_forms_d3() {
    for seed in 200..215 {
        let fx = normal_fixture(3, &mut rng(seed));
        let e = nondegenerate_coeffs(&fx.fx, &fx.gx, 2).unwrap();
        assert_eq!(exact(&e.terms[2].zeta), &closed_form_d3_zeta2(&fx.fy, &fx.gy, &fx.sqrt_det), "seed {seed}");
    }
}

// ---- Bell polynomials, reversion, sphere moments

pub fn bell_matches_brute_force() {
    for seed in 0..20 {
        let mut r = rng(1300 + seed);
        let coeffs: Vec<Rational> = (0..8).map(|_| small_rational(&mut r)).collect();
        for m in 0..=8 {
            for k in 0..=m {
                assert_eq!(bell(&coeffs, m, k), brute_force_bell(&coeffs, m, k), "seed {seed}, m={m}, r={k}");
            }
        }
    }
}

/// `f_6^(3) = 6 f₁f₂f₃ + 3 f₁²f₄ + f₂³` as polynomials.
///
/// Kronecker substitution `f_i = N^{4^{i-1}}`: each monomial of degree below 4 in every
/// variable maps to its own power of `N`, and all coefficients are below `N`, so equal
/// integers mean equal polynomials.
pub fn bell_f6_3_identity() {
    let n = BigInt::from(1000);
    let f: Vec<Rational> = (0..6).map(|i| Rational::from_integer(num_traits::pow(n.clone(), 1 << (2 * i)))).collect();
    let expected = int(6) * &f[0] * &f[1] * &f[2] + int(3) * &f[0] * &f[0] * &f[3] + &f[1] * &f[1] * &f[1];
    assert_eq!(bell(&f, 6, 3), expected);
    assert_eq!(brute_force_bell(&f, 6, 3), expected);
}

pub fn inversion_composes_to_identity() {
    let mut r = rng(1500);
    for i in 0..100 {
        let n = r.gen_range(0..=6);
        let mut a = vec![positive_rational(&mut r)];
        a.extend((0..n).map(|_| small_rational(&mut r)));
        let nu = Real::rational(positive_rational(&mut r));
        let s = ScalarSeries::new(nu, a).unwrap();
        let inv = invert(&s, &Real::one()).unwrap();
        let residual = compose_check(&s, &inv).unwrap();
        assert!(residual.is_exact() && residual.is_zero(), "series {i}: residual {residual}");
    }
}

pub fn inversion_leading_coefficient() {
    let mut r = rng(1600);
    for i in 0..50 {
        let a0 = positive_rational(&mut r);
        let nu = positive_rational(&mut r);
        let q = positive_rational(&mut r);
        let s = ScalarSeries::new(Real::rational(nu.clone()), vec![a0.clone(), small_rational(&mut r)]).unwrap();
        let b0 = &invert(&s, &Real::rational(q.clone())).unwrap().coeffs[0];
        let expected = Closed::rational_power(&a0, &-(&q / &nu)).unwrap();
        assert!(b0.approx_eq(&Real::Exact(expected), 0.0), "case {i}: {b0}");
        let float = rational_to_f64(&a0).powf(-rational_to_f64(&q) / rational_to_f64(&nu));
        assert!((b0.to_f64() - float).abs() <= 1e-14 * float, "case {i}");
    }
}

/// Gauss–Legendre on `[-1, 1]` by Newton iteration on `P_n`.
fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let eval = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for j in 2..=n {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
    };
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = eval(x);
                x -= p / dp;
                if (p / dp).abs() < 1e-15 {
                    break;
                }
            }
            let dp = eval(x).1;
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫_{S^{d-1}} x^α` by trapezoid in the azimuth and Gauss–Legendre in `cos φ`.
fn angular_quadrature(a: &[u32]) -> f64 {
    let n = 64;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let ring = |b: u32, c: u32| -> f64 {
        (0..n)
            .map(|i| {
                let t = h * (i as f64 + 0.5);
                t.cos().powi(b as i32) * t.sin().powi(c as i32)
            })
            .sum::<f64>()
            * h
    };
    match a.len() {
        2 => ring(a[0], a[1]),
        3 => {
            let polar: f64 = legendre_rule(16)
                .into_iter()
                .map(|(u, w)| w * u.powi(a[0] as i32) * (1.0 - u * u).sqrt().powi((a[1] + a[2]) as i32))
                .sum();
            polar * ring(a[1], a[2])
        }
        d => panic!("no angular rule for d = {d}"),
    }
}

pub fn sphere_moments_match_quadrature() {
    for d in [2, 3] {
        for a in enumerate_up_to(d, 8) {
            let exact = sphere_moment(&a).to_f64();
            let quad = angular_quadrature(a.entries());
            if exact == 0.0 {
                assert!(quad.abs() < 1e-13, "α = {a:?}: {quad}");
            } else {
                assert!((quad - exact).abs() < 1e-10 * exact.abs(), "α = {a:?}: {quad} vs {exact}");
            }
        }
    }
    for j in 0..=8u32 {
        let m = sphere_moment(&MultiIndex::new(vec![j]));
        assert_eq!(m.pi_power, 0);
        assert_eq!(m.rational, int(if j % 2 == 0 { 2 } else { 0 }), "j = {j}");
    }
}

// ---- Remainder order against quadrature

pub fn quartic_fixture() -> (IntegrandSpec, Expansion) {
    let f = poly(1, &[(&[2], ratio(1, 2)), (&[4], int(1))]);
    let g = poly(1, &[(&[0], int(1))]);
    let e = nondegenerate_coeffs(&f, &g, 4).unwrap();
    let spec = IntegrandSpec::from_taylor(&f.to_f64(), &g.to_f64(), Domain::Box(vec![(-4.0, 4.0)])).unwrap();
    (spec, e)
}

/// `x²/2 + xy/4 + y² + x³ + x⁴ + y⁴` on `[-2, 2]²`.
pub fn cubic_fixture() -> (IntegrandSpec, Expansion) {
    let f = poly(2, &[(&[2, 0], ratio(1, 2)), (&[1, 1], ratio(1, 4)), (&[0, 2], int(1)), (&[3, 0], int(1)), (&[4, 0], int(1)), (&[0, 4], int(1))]);
    let g = poly(2, &[(&[0, 0], int(1))]);
    let e = nondegenerate_coeffs(&f, &g, 4).unwrap();
    let spec = IntegrandSpec::from_taylor(&f.to_f64(), &g.to_f64(), Domain::Box(vec![(-2.0, 2.0); 2])).unwrap();
    spec.check().unwrap();
    (spec, e)
}

/// `f = x - ln(1+x)`, so that `I(k) = k! e^k / k^{k+1}`.
pub fn factorial_fixture() -> (IntegrandSpec, Expansion) {
    let b = builtin("log-shift", &Value::Null, 8).unwrap();
    let a: Vec<Rational> = (0..=6).map(|j| ratio(if j % 2 == 0 { 1 } else { -1 }, j + 2)).collect();
    let e = oned_coeffs(&a, &[int(1)], &Real::integer(2), 6).unwrap();
    let spec = IntegrandSpec::new(1, b.f, std::sync::Arc::new(|_: &[f64]| 1.0), b.domain).unwrap();
    (spec, e)
}

pub fn show(name: &str, r: &QuadratureReport) {
    for l in &r.levels {
        eprintln!("{name} level {} target {:.3} slope {:?} used {} {:?}", l.level, l.target_slope, l.fitted_slope, l.points_used, l.status);
    }
}

/// Passes, and at least one level is resolved above the quadrature floor.
pub fn meets_contract(name: &str, (spec, e): (IntegrandSpec, Expansion)) -> QuadratureReport {
    let r = verify_order(&spec, &e, &default_grid()).unwrap();
    show(name, &r);
    assert!(r.pass, "{name}: remainder order not met");
    assert!(r.levels.iter().any(|l| l.status == LevelStatus::Pass), "{name}: every level floor-limited");
    r
}

pub fn order_contract() {
    meets_contract("quartic", quartic_fixture());
    meets_contract("cubic", cubic_fixture());
    meets_contract("factorial", factorial_fixture());
}

pub fn factorial_integral_at_50() {
    let (spec, _) = factorial_fixture();
    let got = integrate(&spec, 50.0).unwrap().value;
    let expected = rational_to_f64(&fixed::factorial_integral(50));
    assert!((got - expected).abs() <= 1e-9 * expected, "{got} vs {expected}");
}

// ---- Cross-pathway agreement

pub fn pathways_agree_on_quadratic_minima() {
    for (i, d) in [1usize, 2, 3, 1, 2, 3].into_iter().enumerate() {
        let order = if d == 3 { 3 } else { 4 };
        let (f, g) = isotropic_fixture(d, 2, order, 10 + i as u64);
        let t = taylor_coeffs(&f, &g, order).unwrap();
        let n = nondegenerate_coeffs(&f, &g, order).unwrap();
        let fr = radialize(&f, 2, order + 1).unwrap();
        let gr = radialize(&g, 0, order + 1).unwrap();
        let c = f0const_coeffs(&fr, &gr, order).unwrap();
        assert_exact_eq(&t, &n, "taylor/nondegenerate");
        assert_exact_eq(&t, &c, "taylor/f0-const");
        let gen = general_coeffs(&fr, &gr, order).unwrap();
        assert_close(&t, &gen, 1e-9, "taylor/general");
        let nf = nondegenerate_coeffs(&f.to_f64(), &g.to_f64(), order).unwrap();
        assert_close(&t, &nf, 1e-9, "exact/float");
    }
}

pub fn pathways_agree_on_quartic_minima() {
    for (i, d) in [1usize, 2, 3].into_iter().enumerate() {
        let (f, g) = isotropic_fixture(d, 4, 3, 40 + i as u64);
        let t = taylor_coeffs(&f, &g, 3).unwrap();
        let fr = radialize(&f, 4, 4).unwrap();
        let gr = radialize(&g, 0, 4).unwrap();
        let c = f0const_coeffs(&fr, &gr, 3).unwrap();
        let gen = general_coeffs(&fr, &gr, 3).unwrap();
        assert_close(&t, &c, 1e-12, "taylor/f0-const ν=4");
        assert_close(&t, &gen, 1e-9, "taylor/general ν=4");
    }
}

pub fn pathways_agree_in_one_dimension() {
    for seed in 0..10 {
        let mut r = rng(300 + seed);
        let a: Vec<Rational> = std::iter::once(positive_rational(&mut r) * ratio(1, 2))
            .chain((0..5).map(|_| small_rational(&mut r)))
            .collect();
        let b: Vec<Rational> = (0..5).map(|_| small_rational(&mut r)).collect();
        let f = TaylorPoly::from_terms(1, 7, a.iter().enumerate().map(|(j, c)| (MultiIndex::new(vec![j as u32 + 2]), c.clone()))).unwrap();
        let g = TaylorPoly::from_terms(1, 4, b.iter().enumerate().map(|(j, c)| (MultiIndex::new(vec![j as u32]), c.clone()))).unwrap();
        let o = oned_coeffs(&a, &b, &Real::integer(2), 4).unwrap();
        let n = nondegenerate_coeffs(&f, &g, 4).unwrap();
        let t = taylor_coeffs(&f, &g, 4).unwrap();
        assert_exact_eq(&o, &n, "one-dim/nondegenerate");
        assert_exact_eq(&o, &t, "one-dim/taylor");
    }
}

// ---- Structural properties

pub fn odd_coefficients_vanish() {
    for (i, d) in [1usize, 2, 3].into_iter().enumerate() {
        let (f, g) = isotropic_fixture(d, 2, 3, 60 + i as u64);
        // computed, not imposed: the taylor route evaluates odd j through the same sums
        let t = taylor_coeffs(&f, &g, 3).unwrap();
        assert!(t.terms[1].zeta.is_zero() && t.terms[3].zeta.is_zero());
        let fr = radialize(&f, 2, 4).unwrap();
        let gr = radialize(&g, 0, 4).unwrap();
        let gen = general_coeffs(&fr, &gr, 3).unwrap();
        let scale = gen.terms[0].zeta.to_f64().abs();
        assert!(gen.terms[1].zeta.to_f64().abs() < 1e-12 * scale);
        assert!(gen.terms[3].zeta.to_f64().abs() < 1e-11 * scale.max(gen.terms[2].zeta.to_f64().abs()));
    }
}

pub fn rotation_invariance() {
    for (i, d) in [2usize, 3, 2, 3].into_iter().enumerate() {
        let mut r = rng(500 + i as u64);
        let fx = normal_fixture(d, &mut r);
        let base = nondegenerate_coeffs(&fx.fx, &fx.gx, 2).unwrap();
        let q = rational_rotation(d, &mut r);
        let fr = fx.fx.substitute_linear(&q).unwrap();
        let gr = fx.gx.substitute_linear(&q).unwrap();
        assert_exact_eq(&base, &nondegenerate_coeffs(&fr, &gr, 2).unwrap(), "rational rotation");
        let t: f64 = r.gen_range(0.0..std::f64::consts::PI);
        let (s, c) = t.sin_cos();
        let mut m: Matrix<f64> = (0..d).map(|a| (0..d).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect();
        m[0][0] = c;
        m[0][1] = -s;
        m[1][0] = s;
        m[1][1] = c;
        let ff = fx.fx.to_f64().substitute_linear(&m).unwrap();
        let gf = fx.gx.to_f64().substitute_linear(&m).unwrap();
        assert_close(&base, &nondegenerate_coeffs(&ff, &gf, 2).unwrap(), 1e-9, "float rotation");
    }
}

pub fn scaling_law() {
    for (i, d) in [1usize, 2, 3].into_iter().enumerate() {
        let mut r = rng(700 + i as u64);
        let fx = normal_fixture(d, &mut r);
        let c = positive_rational(&mut r);
        let n = 4.min(6 - d);
        let base = nondegenerate_coeffs(&fx.fx, &fx.gx, n).unwrap();
        let scaled = nondegenerate_coeffs(&fx.fx.scale(&c), &fx.gx, n).unwrap();
        for (a, b) in base.terms.iter().zip(&scaled.terms) {
            // ζ_j(cf) = c^{-(j+λ)/ν} ζ_j(f)
            let factor = Closed::rational_power(&c, &-a.power.as_rational().unwrap().clone()).unwrap();
            let expected = &Real::Exact(factor) * &a.zeta;
            assert!(b.zeta.approx_eq(&expected, 0.0), "d={d} j={}", a.j);
        }
    }
    let (f, g) = isotropic_fixture(2, 4, 2, 77);
    let base = taylor_coeffs(&f, &g, 2).unwrap();
    let scaled = taylor_coeffs(&f.scale(&ratio(3, 2)), &g, 2).unwrap();
    for (a, b) in base.terms.iter().zip(&scaled.terms) {
        let expected = a.zeta.to_f64() * 1.5f64.powf(-a.power.to_f64());
        assert!((b.zeta.to_f64() - expected).abs() <= 1e-12 * expected.abs().max(1e-300));
    }
}

pub fn substitution_round_trip() {
    for seed in 0..10u64 {
        let mut r = rng(900 + seed);
        let d = 1 + (seed as usize % 3);
        let p = random_layers(&mut r, d, 0..=4);
        let m: Matrix<Rational> = loop {
            let m: Matrix<Rational> = (0..d).map(|_| (0..d).map(|_| small_rational(&mut r)).collect()).collect();
            if inverse(&m).is_ok() {
                break m;
            }
        };
        let minv = inverse(&m).unwrap();
        let back = p.substitute_linear(&m).unwrap().substitute_linear(&minv).unwrap();
        assert_eq!(back.terms(), p.terms());
    }
}
