//! Multi-indices, their factorial data, and exact monomial moments over the unit sphere.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::number::{double_factorial, factorial, Closed, Rational, Scalar};
use crate::quadrature::GaussLegendre;

pub use crate::number::gen_binomial;

/// Exponent tuple `α = (α¹, …, α^d)`.
///
/// Ordered graded-lexicographically: by `|α|` first, then entries in
/// descending lexicographic order, so `(2,0) < (1,1) < (0,2)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    /// The `m`-th unit index.
    pub fn unit(dim: usize, m: usize) -> Self {
        let mut e = vec![0; dim];
        e[m] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|a| a % 2 == 0)
    }

    /// `α!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a as i64)).product()
    }

    /// `(α - 1)!! = Π (αᵐ - 1)!!` with `(-1)!! = 1`.
    pub fn double_factorial_minus_one(&self) -> BigInt {
        self.0
            .iter()
            .map(|&a| double_factorial(a as i64 - 1))
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `x^α` at a floating point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }

    /// `x^α` in any scalar field.
    pub fn monomial_exact<T: Scalar>(&self, x: &[T]) -> T {
        let mut acc = T::one();
        for (&a, xi) in self.0.iter().zip(x) {
            for _ in 0..a {
                acc = acc * xi.clone();
            }
        }
        acc
    }

    /// Exponent string `"a1,a2,...,ad"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(s: &str) -> Option<MultiIndex> {
        let entries: Option<Vec<u32>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
        entries.filter(|e| !e.is_empty()).map(MultiIndex)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// Every `α` of dimension `d` with `|α| = n`, in graded-lexicographic order.
pub fn enumerate(d: usize, n: usize) -> Vec<MultiIndex> {
    assert!(d >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill(&mut current, 0, n, &mut out);
    out
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos == current.len() - 1 {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a as u32;
        fill(current, pos + 1, remaining - a, out);
    }
}

/// Every `α` with `|α| <= n`.
pub fn enumerate_up_to(d: usize, n: usize) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| enumerate(d, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialData {
    /// `α!`
    pub factorial: BigInt,
    /// `(α - 1)!!`
    pub double_factorial: BigInt,
    /// 1 iff every entry is even
    pub even: u8,
}

pub fn factorial_data(alpha: &MultiIndex) -> FactorialData {
    FactorialData {
        factorial: alpha.factorial(),
        double_factorial: alpha.double_factorial_minus_one(),
        even: alpha.is_even() as u8,
    }
}

/// Exact value of `∫_{S^{d-1}} Ω^α dΩ`, stored as `rational · π^pi_power`.
///
/// `(2π)^(d/2)` for even `d` and `(2π)^(d/2) √(2/π)` for odd `d` both reduce
/// to a power of two times `π^⌊d/2⌋`, so no square roots survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereMoment {
    pub rational: Rational,
    pub pi_power: u32,
}

impl SphereMoment {
    pub fn to_closed(&self) -> Closed {
        &Closed::rational(self.rational.clone()) * &Closed::pi_pow_half(2 * self.pi_power as i32)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_closed().to_f64()
    }
}

/// `w_α` with the `S⁰ = {±1}` counting convention for `d = 1`.
pub fn sphere_moment(alpha: &MultiIndex) -> SphereMoment {
    let d = alpha.dim();
    let pi_power = (d / 2) as u32;
    SphereMoment {
        rational: sphere_moment_rational(alpha),
        pi_power,
    }
}

/// `w_α / π^⌊d/2⌋`.
pub fn sphere_moment_rational(alpha: &MultiIndex) -> Rational {
    if !alpha.is_even() {
        return Rational::from_integer(0.into());
    }
    let d = alpha.dim();
    // (2π)^{d/2}{1 | √(2/π)} = 2^{⌈d/2⌉} π^{⌊d/2⌋}
    let two_power = BigInt::one() << d.div_ceil(2);
    let num = two_power * alpha.double_factorial_minus_one();
    let den = double_factorial((alpha.order() + d) as i64 - 2);
    Rational::new(num, den)
}

/// Product quadrature rule on `S^{d-1}`.
///
/// `level` is the number of polar nodes per angle; the azimuth uses `2·level`
/// equispaced nodes. For `d = 3` the polar variable is `cos φ₁` with
/// Gauss–Legendre nodes, which makes the rule exact on polynomials of degree
/// below `2·level`. For `d = 1` the "sphere" is `{±1}` with unit weights.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, level: usize) -> SphereRule {
        assert!(dim >= 1 && level >= 1);
        let (nodes, weights) = Self::build(dim, level);
        SphereRule {
            dim,
            nodes,
            weights,
        }
    }

    fn build(dim: usize, level: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        match dim {
            1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
            2 => {
                let n = 2 * level;
                let h = 2.0 * std::f64::consts::PI / n as f64;
                let nodes = (0..n)
                    .map(|i| {
                        let t = h * (i as f64 + 0.5);
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                (nodes, vec![h; n])
            }
            3 => {
                let (inner, inner_w) = Self::build(2, level);
                let gl = GaussLegendre::new(level);
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for (t, wt) in gl.on_interval(-1.0, 1.0) {
                    let s = (1.0 - t * t).sqrt();
                    for (p, wp) in inner.iter().zip(&inner_w) {
                        nodes.push(vec![t, s * p[0], s * p[1]]);
                        weights.push(wt * wp);
                    }
                }
                (nodes, weights)
            }
            _ => {
                let (inner, inner_w) = Self::build(dim - 1, level);
                let gl = GaussLegendre::new(level);
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for (phi, wphi) in gl.on_interval(0.0, std::f64::consts::PI) {
                    let (s, c) = phi.sin_cos();
                    let jac = s.powi(dim as i32 - 2);
                    for (p, wp) in inner.iter().zip(&inner_w) {
                        let mut node = Vec::with_capacity(dim);
                        node.push(c);
                        node.extend(p.iter().map(|x| s * x));
                        nodes.push(node);
                        weights.push(wphi * jac * wp);
                    }
                }
                (nodes, weights)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        crate::number::compensated_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(x)),
        )
    }
}
