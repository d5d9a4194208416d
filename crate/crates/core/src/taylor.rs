//! Multivariate Taylor polynomials, linear changes of variables and radial layers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::multiindex::{enumerate, MultiIndex, SphereRule};
use crate::number::{parse_rational, rational_to_f64, Rational, Real, Scalar};
use crate::spectral::{Ldl, Matrix, SpectralDecomp};

/// Truncated polynomial `Σ c_α x^α` with `c_α = D^α h(0) / α!`.
#[derive(Clone, PartialEq)]
pub struct TaylorPoly<T> {
    dim: usize,
    max_order: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> TaylorPoly<T> {
    pub fn zero(dim: usize, max_order: usize) -> Self {
        assert!(dim >= 1);
        TaylorPoly {
            dim,
            max_order,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `(α, c_α)` pairs, summing repeats and dropping terms above `max_order`.
    pub fn from_terms<I>(dim: usize, max_order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        let mut p = Self::zero(dim, max_order);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::InvalidInput(format!(
                    "exponent {alpha:?} does not have dimension {dim}"
                )));
            }
            if alpha.order() <= max_order {
                p.add_term(alpha, c);
            }
        }
        Ok(p)
    }

    pub fn constant(dim: usize, max_order: usize, c: T) -> Self {
        let mut p = Self::zero(dim, max_order);
        p.add_term(MultiIndex::zeros(dim), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c x^α` in place; the term disappears if the sum is zero.
    pub fn add_term(&mut self, alpha: MultiIndex, c: T) {
        debug_assert_eq!(alpha.dim(), self.dim);
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v == T::zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                if c != T::zero() {
                    e.insert(c);
                }
            }
        }
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> T {
        self.terms.get(alpha).cloned().unwrap_or_else(T::zero)
    }

    /// Lowest order with a nonzero term.
    pub fn min_order(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::order).min()
    }

    /// Degree of the highest nonzero term.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    /// Homogeneous part of order `n`.
    pub fn layer(&self, n: usize) -> TaylorPoly<T> {
        TaylorPoly {
            dim: self.dim,
            max_order: n,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() == n)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, max_order: usize) -> TaylorPoly<T> {
        TaylorPoly {
            dim: self.dim,
            max_order,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() <= max_order)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &TaylorPoly<T>) -> TaylorPoly<T> {
        let mut out = self.clone();
        out.max_order = self.max_order.max(other.max_order);
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &T) -> TaylorPoly<T> {
        let mut out = Self::zero(self.dim, self.max_order);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Product truncated at `max_order`.
    pub fn mul_truncated(&self, other: &TaylorPoly<T>, max_order: usize) -> TaylorPoly<T> {
        let mut acc: BTreeMap<MultiIndex, Vec<T>> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.order() + b.order() <= max_order {
                    acc.entry(a.add(b))
                        .or_default()
                        .push(x.clone() * y.clone());
                }
            }
        }
        let mut out = Self::zero(self.dim, max_order);
        for (g, parts) in acc {
            out.add_term(g, T::sum_all(parts));
        }
        out
    }

    /// Full product.
    pub fn mul(&self, other: &TaylorPoly<T>) -> TaylorPoly<T> {
        self.mul_truncated(other, self.max_order + other.max_order)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        crate::number::compensated_sum(
            self.terms
                .iter()
                .map(|(a, c)| c.to_f64() * a.monomial(x)),
        )
    }

    pub fn eval_exact(&self, x: &[T]) -> T {
        T::sum_all(self.terms.iter().map(|(a, c)| c.clone() * a.monomial_exact(x)))
    }

    pub fn to_f64(&self) -> TaylorPoly<f64> {
        let mut out = TaylorPoly::zero(self.dim, self.max_order);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.to_f64());
        }
        out
    }

    /// Coefficients of `p(M y)` through `max_order`; columns of `M` are the images of the `y` basis.
    pub fn substitute_linear(&self, m: &Matrix<T>) -> Result<TaylorPoly<T>> {
        let d = self.dim;
        if m.len() != d || m.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidInput(format!(
                "substitution matrix must be {d}x{d}"
            )));
        }
        let top = self.degree().unwrap_or(0);
        // powers[i][k] = (Σ_j M_ij y_j)^k
        let linear: Vec<TaylorPoly<T>> = (0..d)
            .map(|i| {
                TaylorPoly::from_terms(
                    d,
                    1,
                    (0..d).map(|j| (MultiIndex::unit(d, j), m[i][j].clone())),
                )
                .expect("dimensions match")
            })
            .collect();
        let powers: Vec<Vec<TaylorPoly<T>>> = linear
            .iter()
            .map(|l| {
                let mut pw = vec![TaylorPoly::constant(d, 0, T::one())];
                for k in 1..=top {
                    let next = pw[k - 1].mul_truncated(l, k);
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut acc: BTreeMap<MultiIndex, Vec<T>> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let mut prod = TaylorPoly::constant(d, 0, c.clone());
            for (i, &a) in alpha.entries().iter().enumerate() {
                if a > 0 {
                    prod = prod.mul_truncated(&powers[i][a as usize], alpha.order());
                }
            }
            for (g, v) in prod.terms {
                acc.entry(g).or_default().push(v);
            }
        }
        let mut out = Self::zero(d, self.max_order);
        for (g, parts) in acc {
            out.add_term(g, T::sum_all(parts));
        }
        Ok(out)
    }

    /// `H_mn = (1 + δ_mn) · [x_m x_n] p`.
    pub fn hessian(&self) -> Matrix<T> {
        let d = self.dim;
        (0..d)
            .map(|m| {
                (0..d)
                    .map(|n| {
                        let c = self.coeff(&MultiIndex::unit(d, m).add(&MultiIndex::unit(d, n)));
                        if m == n {
                            c.clone() + c
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks `p(0) = 0` and `∇p(0) = 0`.
    pub fn check_critical_zero(&self) -> Result<()> {
        let c0 = self.coeff(&MultiIndex::zeros(self.dim));
        if !c0.is_negligible(1.0) {
            return Err(Error::InvalidMinimum(format!(
                "f(0) = {} but the minimum value must be 0",
                c0.to_f64()
            )));
        }
        for m in 0..self.dim {
            let c = self.coeff(&MultiIndex::unit(self.dim, m));
            if !c.is_negligible(1.0) {
                return Err(Error::InvalidMinimum(format!(
                    "0 is not a critical point: ∂f/∂x{} = {}",
                    m + 1,
                    c.to_f64()
                )));
            }
        }
        Ok(())
    }

    /// If the polynomial equals `c |x|^n` on all of `R^d` (homogeneous of even
    /// order `n`), returns `c`.
    pub fn sphere_constant(&self) -> Option<T> {
        let n = self.min_order()?;
        if self.degree() != Some(n) || n % 2 == 1 {
            return None;
        }
        let c = self.coeff(&MultiIndex::new({
            let mut e = vec![0; self.dim];
            e[0] = n as u32;
            e
        }));
        // (Σ x_i²)^{n/2}
        let square = TaylorPoly::from_terms(
            self.dim,
            2,
            (0..self.dim).map(|i| (MultiIndex::unit(self.dim, i).add(&MultiIndex::unit(self.dim, i)), T::one())),
        )
        .ok()?;
        let mut target = TaylorPoly::constant(self.dim, 0, c.clone());
        for _ in 0..n / 2 {
            target = target.mul(&square);
        }
        let scale = self
            .terms
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max);
        let keys: std::collections::BTreeSet<&MultiIndex> =
            self.terms.keys().chain(target.terms.keys()).collect();
        let matches = keys
            .into_iter()
            .all(|a| (self.coeff(a) - target.coeff(a)).is_negligible(scale));
        matches.then_some(c)
    }
}

impl<T: Scalar> fmt::Debug for TaylorPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter())
            .finish()
    }
}

impl TaylorPoly<Rational> {
    pub fn to_json(&self) -> Value {
        Value::Object(
            self.terms
                .iter()
                .map(|(a, c)| (a.key(), Value::String(c.to_string())))
                .collect(),
        )
    }
}

impl TaylorPoly<f64> {
    pub fn to_json(&self) -> Value {
        Value::Object(
            self.terms
                .iter()
                .map(|(a, c)| (a.key(), serde_json::json!(c)))
                .collect(),
        )
    }
}

/// A Taylor polynomial read from data: exact unless some coefficient was a float.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoly {
    Exact(TaylorPoly<Rational>),
    Float(TaylorPoly<f64>),
}

impl AnyPoly {
    pub fn dim(&self) -> usize {
        match self {
            AnyPoly::Exact(p) => p.dim(),
            AnyPoly::Float(p) => p.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyPoly::Exact(_))
    }

    pub fn to_f64(&self) -> TaylorPoly<f64> {
        match self {
            AnyPoly::Exact(p) => p.to_f64(),
            AnyPoly::Float(p) => p.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AnyPoly::Exact(p) => p.eval(x),
            AnyPoly::Float(p) => p.eval(x),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            AnyPoly::Exact(p) => p.degree(),
            AnyPoly::Float(p) => p.degree(),
        }
    }

    pub fn truncate(&self, n: usize) -> AnyPoly {
        match self {
            AnyPoly::Exact(p) => AnyPoly::Exact(p.truncate(n)),
            AnyPoly::Float(p) => AnyPoly::Float(p.truncate(n)),
        }
    }

    /// Parses `{"a1,...,ad": coeff, ...}` where `coeff` is a JSON integer, a
    /// `"p/q"` / decimal string (exact) or a JSON float (inexact).
    pub fn from_json(value: &Value, dim: usize) -> Result<AnyPoly> {
        let map: &Map<String, Value> = value
            .as_object()
            .ok_or_else(|| Error::Parse("Taylor data must be a JSON object".into()))?;
        let mut exact = Vec::new();
        let mut float = false;
        for (key, v) in map {
            let alpha = MultiIndex::parse_key(key)
                .ok_or_else(|| Error::Parse(format!("bad exponent key {key:?}")))?;
            if alpha.dim() != dim {
                return Err(Error::Parse(format!(
                    "exponent key {key:?} has {} entries, expected {dim}",
                    alpha.dim()
                )));
            }
            let c: Real = match v {
                Value::String(s) => Real::rational(parse_rational(s)?),
                Value::Number(n) if n.is_i64() => Real::integer(n.as_i64().unwrap()),
                Value::Number(n) => {
                    float = true;
                    Real::Float(n.as_f64().unwrap())
                }
                other => {
                    return Err(Error::Parse(format!(
                        "coefficient for {key:?} must be a number or string, got {other}"
                    )))
                }
            };
            exact.push((alpha, c));
        }
        let top = exact.iter().map(|(a, _)| a.order()).max().unwrap_or(0);
        if float {
            let terms = exact.into_iter().map(|(a, c)| (a, c.to_f64()));
            Ok(AnyPoly::Float(TaylorPoly::from_terms(dim, top, terms)?))
        } else {
            let terms = exact
                .into_iter()
                .map(|(a, c)| (a, c.as_rational().cloned().expect("exact")));
            Ok(AnyPoly::Exact(TaylorPoly::from_terms(dim, top, terms)?))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyPoly::Exact(p) => p.to_json(),
            AnyPoly::Float(p) => p.to_json(),
        }
    }
}

/// A sampled angular function `Ω ↦ h(Ω)`.
pub type SampledFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One radial coefficient `f_j(Ω)` or `g_j(Ω)`.
#[derive(Clone)]
pub enum Layer<T> {
    Constant(T),
    /// Homogeneous polynomial evaluated on the sphere.
    Polynomial(TaylorPoly<T>),
    Sampled(SampledFn),
}

impl<T: Scalar> Layer<T> {
    pub fn eval(&self, omega: &[f64]) -> f64 {
        match self {
            Layer::Constant(c) => c.to_f64(),
            Layer::Polynomial(p) => p.eval(omega),
            Layer::Sampled(h) => h(omega),
        }
    }

    /// The value, if the layer is constant on the sphere.
    pub fn constant_value(&self) -> Option<T> {
        match self {
            Layer::Constant(c) => Some(c.clone()),
            Layer::Polynomial(p) if p.is_zero() => Some(T::zero()),
            Layer::Polynomial(p) => p.sphere_constant(),
            Layer::Sampled(_) => None,
        }
    }

    /// Homogeneous polynomial form, where one exists.
    pub fn as_polynomial(&self, dim: usize) -> Option<TaylorPoly<T>> {
        match self {
            Layer::Constant(c) => Some(TaylorPoly::constant(dim, 0, c.clone())),
            Layer::Polynomial(p) => Some(p.clone()),
            Layer::Sampled(_) => None,
        }
    }
}

impl<T: Scalar> fmt::Debug for Layer<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Constant(c) => write!(f, "Constant({c:?})"),
            Layer::Polynomial(p) => write!(f, "Polynomial({p:?})"),
            Layer::Sampled(_) => write!(f, "Sampled(..)"),
        }
    }
}

/// Radial expansion `ρ^offset Σ_j layer_j(Ω) ρ^j`.
///
/// For `f` the offset is `ν`; for `g` it is `λ - d`.
#[derive(Clone)]
pub struct RadialCoeffs<T> {
    pub dim: usize,
    pub offset: Real,
    pub layers: Vec<Layer<T>>,
}

impl<T: Scalar> fmt::Debug for RadialCoeffs<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialCoeffs")
            .field("dim", &self.dim)
            .field("offset", &self.offset)
            .field("layers", &self.layers)
            .finish()
    }
}

impl<T: Scalar> RadialCoeffs<T> {
    pub fn new(dim: usize, offset: Real, layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("radial expansion needs at least one layer".into()));
        }
        Ok(RadialCoeffs {
            dim,
            offset,
            layers,
        })
    }

    /// Number of layers minus one.
    pub fn order(&self) -> usize {
        self.layers.len() - 1
    }

    /// Layer `j`, or zero beyond the stored range.
    pub fn eval_layer(&self, j: usize, omega: &[f64]) -> f64 {
        self.layers.get(j).map_or(0.0, |l| l.eval(omega))
    }

    pub fn is_leading_constant(&self) -> bool {
        self.layers[0].constant_value().is_some()
    }

    /// Leading layer must be positive at every node of `rule` (f₀(Ω) > 0).
    pub fn check_leading_positive(&self, rule: &SphereRule) -> Result<()> {
        for node in &rule.nodes {
            let v = self.layers[0].eval(node);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Hypothesis(format!(
                    "f₀(Ω) > 0 violated: f₀({node:?}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Splits `p` into homogeneous layers: layer `j` is the part of order `j + leading`.
///
/// `layers` is the number of layers to produce (`N + 1`). For `f`, pass `ν` as
/// `leading`; any term of lower order is an error. For `g`, pass 0.
pub fn radialize<T: Scalar>(p: &TaylorPoly<T>, leading: usize, layers: usize) -> Result<RadialCoeffs<T>> {
    if let Some(low) = p.terms().keys().find(|a| a.order() < leading) {
        return Err(Error::Hypothesis(format!(
            "term x^{low:?} has order below ν = {leading}, contradicting f = ρ^ν (f₀(Ω) + ...)"
        )));
    }
    let ls = (0..layers)
        .map(|j| {
            let layer = p.layer(j + leading);
            if layer.is_zero() {
                Layer::Constant(T::zero())
            } else {
                Layer::Polynomial(layer)
            }
        })
        .collect();
    RadialCoeffs::new(p.dim(), Real::integer(leading as i64), ls)
}

/// `f` and a `g`-transform in coordinates where the Hessian is the identity.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub spectral: SpectralDecomp,
    /// `f(P⁻¹ y)`, with the order-2 layer exactly `½|y|²`.
    pub f: TaylorPoly<f64>,
    /// `x = M y`.
    pub substitution: Matrix<f64>,
}

impl Normalized {
    pub fn transform(&self, g: &TaylorPoly<f64>) -> Result<TaylorPoly<f64>> {
        g.substitute_linear(&self.substitution)
    }

    /// `det(H)^{-1/2}`, the Jacobian of `x ↦ y`.
    pub fn jacobian(&self) -> f64 {
        1.0 / self.spectral.det.sqrt()
    }
}

/// Applies `y = P x` with `P = √D Q` from `H = Qᵀ D Q`.
pub fn hessian_normalize(f: &TaylorPoly<f64>) -> Result<Normalized> {
    f.check_critical_zero()?;
    let spectral = SpectralDecomp::new(&f.hessian())?;
    let substitution = spectral.p_inverse();
    let mut fy = f.substitute_linear(&substitution)?;
    let d = f.dim();
    // The quadratic layer is ½|y|² up to rounding; store it exactly.
    let quad: Vec<MultiIndex> = fy.terms().keys().filter(|a| a.order() == 2).cloned().collect();
    for a in quad {
        let c = fy.coeff(&a);
        fy.add_term(a, -c);
    }
    for m in 0..d {
        fy.add_term(MultiIndex::unit(d, m).add(&MultiIndex::unit(d, m)), 0.5);
    }
    Ok(Normalized {
        spectral,
        f: fy,
        substitution,
    })
}

/// Exact counterpart of [`hessian_normalize`] for rational data.
///
/// `x = L⁻ᵀ z` turns the quadratic layer into `½ Σ D_i z_i²`. The remaining
/// diagonal scaling `y_i = √D_i z_i` is irrational, so it is left to the
/// caller: a monomial `z^γ` with all-even `γ` picks up `Π D_i^{-γ_i/2}`.
#[derive(Debug, Clone)]
pub struct ExactNormalized {
    pub ldl: Ldl,
    pub f: TaylorPoly<Rational>,
    pub substitution: Matrix<Rational>,
}

impl ExactNormalized {
    pub fn transform(&self, g: &TaylorPoly<Rational>) -> Result<TaylorPoly<Rational>> {
        g.substitute_linear(&self.substitution)
    }

    pub fn det(&self) -> Rational {
        self.ldl.det()
    }

    /// `Π D_i^{-γ_i/2}` for all-even `γ`; zero otherwise.
    pub fn scale(&self, gamma: &MultiIndex) -> Rational {
        if !gamma.is_even() {
            return Rational::zero();
        }
        gamma
            .entries()
            .iter()
            .zip(&self.ldl.diag)
            .fold(Rational::from_integer(1.into()), |acc, (&g, d)| {
                acc * crate::number::rational_powi(d, -(g as i64) / 2)
            })
    }
}

pub fn ldl_normalize(f: &TaylorPoly<Rational>) -> Result<ExactNormalized> {
    f.check_critical_zero()?;
    let ldl = Ldl::new(&f.hessian())?;
    let substitution = ldl.substitution();
    let fz = f.substitute_linear(&substitution)?;
    Ok(ExactNormalized {
        ldl,
        f: fz,
        substitution,
    })
}

/// Convenience for reporting: the floating spectral data of a rational Hessian.
pub fn spectral_of(f: &TaylorPoly<Rational>) -> Result<SpectralDecomp> {
    let h: Matrix<f64> = f
        .hessian()
        .iter()
        .map(|row| row.iter().map(rational_to_f64).collect())
        .collect();
    SpectralDecomp::new(&h)
}

/// Every exponent of dimension `d` and order exactly `n`, as a polynomial with given coefficients.
pub fn homogeneous<T: Scalar, F: FnMut(&MultiIndex) -> T>(d: usize, n: usize, mut coeff: F) -> TaylorPoly<T> {
    let mut p = TaylorPoly::zero(d, n);
    for a in enumerate(d, n) {
        let c = coeff(&a);
        p.add_term(a, c);
    }
    p
}
