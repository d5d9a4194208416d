//! Expansion coefficients `ζ_j` of `∫ e^{-kf} g d^d x ∼ Σ ζ_j k^{-(j+λ)/ν}`.
//!
//! Five routes are provided:
//!
//! * [`general_coeffs`]: arbitrary radial layers, angular integrals by quadrature.
//! * [`f0const_coeffs`]: constant leading layer `f₀`, which factors out of the integral.
//! * [`taylor_coeffs`]: Taylor data with constant `f₀`, closed form via sphere moments.
//! * [`nondegenerate_coeffs`]: Taylor data around a nondegenerate minimum, after
//!   normalizing the Hessian to the identity.
//! * [`oned_coeffs`]: the one-dimensional closed form; [`stirling_series`] is its
//!   application to `k!`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::multiindex::{sphere_moment_rational, MultiIndex, SphereRule};
use crate::number::{
    compensated_sum, gamma, gen_binomial, int, parse_rational, ratio, Closed, Rational, Real,
    Scalar,
};
use crate::series::BellTable;
use crate::spectral::Matrix;
use crate::taylor::{hessian_normalize, ldl_normalize, spectral_of, RadialCoeffs, TaylorPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pathway {
    General,
    F0Const,
    Taylor,
    Nondegenerate,
    OneDim,
}

impl Pathway {
    pub fn name(self) -> &'static str {
        match self {
            Pathway::General => "general",
            Pathway::F0Const => "f0-const",
            Pathway::Taylor => "taylor",
            Pathway::Nondegenerate => "nondegenerate",
            Pathway::OneDim => "one-dim",
        }
    }
}

impl fmt::Display for Pathway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Pathway {
    type Err = Error;
    fn from_str(s: &str) -> Result<Pathway> {
        Ok(match s {
            "general" => Pathway::General,
            "f0-const" => Pathway::F0Const,
            "taylor" => Pathway::Taylor,
            "nondegenerate" => Pathway::Nondegenerate,
            "one-dim" => Pathway::OneDim,
            other => return Err(Error::Parse(format!("unknown pathway {other:?}"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExpansionParams {
    pub dim: usize,
    pub nu: Real,
    pub lambda: Real,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct Term {
    pub j: usize,
    /// `(j + λ) / ν`
    pub power: Real,
    pub zeta: Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemainderKind {
    /// `O(k^{-e})`
    #[serde(rename = "big-O")]
    BigO,
    /// `o(k^{-e})`
    #[serde(rename = "little-o")]
    LittleO,
}

/// Contractual size of `I(k) - Σ_{j≤N} ζ_j k^{-(j+λ)/ν}`.
#[derive(Debug, Clone)]
pub struct Remainder {
    pub exponent: Real,
    pub kind: RemainderKind,
}

impl Remainder {
    /// Contract after keeping terms `0..=n`, following the same rule as for `N`.
    pub fn at_level(&self, params: &ExpansionParams, n: usize) -> f64 {
        let base = (n as f64 + params.lambda.to_f64()) / params.nu.to_f64();
        match self.kind {
            RemainderKind::BigO => base + 1.0 / params.nu.to_f64(),
            RemainderKind::LittleO => base,
        }
    }
}

/// How the coordinates were normalized, if at all.
#[derive(Debug, Clone)]
pub struct Normalization {
    /// `P = √D Q` with `y = P x`.
    pub p: Matrix<f64>,
    pub det_hessian: Real,
}

#[derive(Debug, Clone)]
pub struct Expansion {
    pub params: ExpansionParams,
    pub terms: Vec<Term>,
    pub pathway: Pathway,
    pub remainder: Remainder,
    pub normalization: Option<Normalization>,
}

impl Expansion {
    fn assemble(
        params: ExpansionParams,
        zetas: Vec<Real>,
        pathway: Pathway,
        smooth: bool,
        normalization: Option<Normalization>,
    ) -> Expansion {
        let terms = zetas
            .into_iter()
            .enumerate()
            .map(|(j, zeta)| Term {
                j,
                power: &(&Real::integer(j as i64) + &params.lambda) / &params.nu,
                zeta,
            })
            .collect();
        // Polynomial data has remainders one power of ρ smaller, which buys one
        // extra power of k^{-1/ν}.
        let kind = if smooth {
            RemainderKind::BigO
        } else {
            RemainderKind::LittleO
        };
        let shift = if smooth { 1 } else { 0 };
        let exponent =
            &(&Real::integer((params.order + shift) as i64) + &params.lambda) / &params.nu;
        Expansion {
            params,
            terms,
            pathway,
            remainder: Remainder { exponent, kind },
            normalization,
        }
    }

    pub fn zeta(&self, j: usize) -> Option<&Real> {
        self.terms.iter().find(|t| t.j == j).map(|t| &t.zeta)
    }

    /// `Σ_{j ≤ level} ζ_j k^{-power_j}`.
    pub fn partial_sum(&self, k: f64, level: usize) -> f64 {
        compensated_sum(
            self.terms
                .iter()
                .filter(|t| t.j <= level)
                .map(|t| t.zeta.to_f64() * k.powf(-t.power.to_f64())),
        )
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.zeta.is_exact())
    }

    /// `[{"j", "power", "zeta", "exact", "value"}, ...]`
    pub fn terms_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "j": t.j,
                        "power": real_json(&t.power),
                        "zeta": real_json(&t.zeta),
                        "exact": t.zeta.is_exact(),
                        "value": t.zeta.to_f64(),
                    })
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "pathway": self.pathway,
            "params": {
                "dimension": self.params.dim,
                "nu": real_json(&self.params.nu),
                "lambda": real_json(&self.params.lambda),
                "order": self.params.order,
            },
            "terms": self.terms_json(),
            "remainder": {
                "exponent": real_json(&self.remainder.exponent),
                "kind": self.remainder.kind,
            },
        });
        if let Some(n) = &self.normalization {
            out["normalization"] = json!({
                "P": n.p,
                "det_hessian": real_json(&n.det_hessian),
                "det_hessian_value": n.det_hessian.to_f64(),
            });
        }
        out
    }

    /// Reads the output of [`Expansion::to_json`], or a bare term array.
    ///
    /// A bare array carries no parameters; they are inferred from the powers
    /// (`ν` from consecutive powers, `λ` from the first).
    pub fn from_json(value: &Value) -> Result<Expansion> {
        let (terms_v, full) = match value {
            Value::Array(_) => (value, None),
            Value::Object(o) => (
                o.get("terms")
                    .ok_or_else(|| Error::Parse("expansion record has no \"terms\"".into()))?,
                Some(o),
            ),
            _ => return Err(Error::Parse("expansion must be an object or array".into())),
        };
        let arr = terms_v
            .as_array()
            .ok_or_else(|| Error::Parse("\"terms\" must be an array".into()))?;
        let mut terms = Vec::new();
        for t in arr {
            let j = t
                .get("j")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("term without integer \"j\": {t}")))?
                as usize;
            let power = parse_real(t.get("power").ok_or_else(|| Error::Parse("term without \"power\"".into()))?)?;
            let zeta = parse_real(t.get("zeta").ok_or_else(|| Error::Parse("term without \"zeta\"".into()))?)?;
            terms.push(Term { j, power, zeta });
        }
        terms.sort_by_key(|t| t.j);
        if terms.is_empty() {
            return Err(Error::Parse("expansion has no terms".into()));
        }
        let order = terms.last().unwrap().j;
        let (params, pathway, remainder) = match full {
            Some(o) => {
                let p = o
                    .get("params")
                    .ok_or_else(|| Error::Parse("expansion record has no \"params\"".into()))?;
                let params = ExpansionParams {
                    dim: p.get("dimension").and_then(Value::as_u64).unwrap_or(1) as usize,
                    nu: parse_real(&p["nu"])?,
                    lambda: parse_real(&p["lambda"])?,
                    order,
                };
                let pathway: Pathway = o
                    .get("pathway")
                    .and_then(Value::as_str)
                    .unwrap_or("general")
                    .parse()?;
                let rem = match o.get("remainder") {
                    Some(r) => Remainder {
                        exponent: parse_real(&r["exponent"])?,
                        kind: serde_json::from_value(r["kind"].clone())
                            .map_err(|e| Error::Parse(format!("remainder kind: {e}")))?,
                    },
                    None => Remainder {
                        exponent: &(&Real::integer(order as i64) + &params.lambda) / &params.nu,
                        kind: RemainderKind::LittleO,
                    },
                };
                (params, pathway, rem)
            }
            None => {
                let p0 = terms[0].power.to_f64();
                let nu_inv = if terms.len() > 1 {
                    (terms[1].power.to_f64() - p0) / (terms[1].j - terms[0].j) as f64
                } else {
                    0.5
                };
                let nu = Real::Float(1.0 / nu_inv);
                let lambda = Real::Float(p0 / nu_inv - terms[0].j as f64);
                let params = ExpansionParams {
                    dim: 1,
                    nu,
                    lambda,
                    order,
                };
                let rem = Remainder {
                    exponent: Real::Float(terms.last().unwrap().power.to_f64() + nu_inv),
                    kind: RemainderKind::BigO,
                };
                (params, Pathway::General, rem)
            }
        };
        Ok(Expansion {
            params,
            terms,
            pathway,
            remainder,
            normalization: None,
        })
    }
}

fn real_json(x: &Real) -> Value {
    match x {
        Real::Exact(c) => Value::String(c.to_string()),
        Real::Float(v) => json!(v),
    }
}

fn parse_real(v: &Value) -> Result<Real> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Real::integer(n.as_i64().unwrap())),
        Value::Number(n) => Ok(Real::Float(n.as_f64().unwrap())),
        Value::String(s) => match s.parse::<Closed>() {
            Ok(c) => Ok(Real::Exact(c)),
            Err(_) => s
                .trim()
                .parse::<f64>()
                .map(Real::Float)
                .map_err(|_| Error::Parse(format!("not a number: {s:?}"))),
        },
        other => Err(Error::Parse(format!("not a number: {other}"))),
    }
}

/// `(1/ν) Γ(arg)`.
fn gamma_over_nu(nu: &Real, arg: &Real) -> Result<Real> {
    Ok(&gamma(arg)? / nu)
}

fn field<T: Scalar>(x: &Real, what: &str) -> Result<T> {
    T::from_real(x).ok_or_else(|| {
        Error::InvalidInput(format!(
            "{what} = {x} has no exact rational value; use floating-point data"
        ))
    })
}

fn check_exponents(nu: &Real, lambda: &Real) -> Result<()> {
    if !nu.is_positive() {
        return Err(Error::Hypothesis(format!("ν > 0 violated: ν = {nu}")));
    }
    if !lambda.is_positive() {
        return Err(Error::Hypothesis(format!("λ > 0 violated: λ = {lambda}")));
    }
    Ok(())
}

fn smooth<T: Scalar>(r: &RadialCoeffs<T>) -> bool {
    r.layers
        .iter()
        .all(|l| !matches!(l, crate::taylor::Layer::Sampled(_)))
}

/// Sphere-rule levels tried by the quadrature pathways.
fn levels(dim: usize) -> Vec<usize> {
    match dim {
        1 => vec![1],
        2 | 3 => vec![8, 16, 32, 64, 128],
        4 => vec![8, 16, 32],
        _ => vec![4, 8, 16],
    }
}

/// Integrates `integrand(Ω) -> [values for j = 0..=n]` over the sphere with node doubling.
///
/// Returns the integrals; fails with an accuracy error if successive levels
/// still disagree by more than `1e-12` of the absolute integral at the cap.
fn sphere_integrate<F>(dim: usize, n: usize, integrand: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let mut previous: Option<Vec<f64>> = None;
    let mut last_gap = f64::INFINITY;
    for level in levels(dim) {
        let rule = SphereRule::new(dim, level);
        let samples: Vec<Vec<f64>> = rule
            .nodes
            .par_iter()
            .map(|x| integrand(x))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(n + 1);
        let mut scales = Vec::with_capacity(n + 1);
        for j in 0..=n {
            values.push(compensated_sum(
                samples.iter().zip(&rule.weights).map(|(s, w)| w * s[j]),
            ));
            scales.push(compensated_sum(
                samples.iter().zip(&rule.weights).map(|(s, w)| (w * s[j]).abs()),
            ));
        }
        if dim == 1 {
            return Ok(values);
        }
        if let Some(prev) = &previous {
            let gap = (0..=n)
                .map(|j| (values[j] - prev[j]).abs() / scales[j].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            if gap <= 1e-12 {
                return Ok(values);
            }
            last_gap = gap;
        }
        previous = Some(values);
    }
    let best = previous.map_or(f64::NAN, |v| v[0]);
    Err(Error::Accuracy {
        message: format!("angular quadrature did not converge (relative change {last_gap:e})"),
        best,
    })
}

/// Coefficients for arbitrary radial data, by sphere quadrature.
///
/// `ν` is `f.offset`, `λ` is `g.offset + d`; layers beyond those stored count as zero.
pub fn general_coeffs<T: Scalar>(
    f: &RadialCoeffs<T>,
    g: &RadialCoeffs<T>,
    order: usize,
) -> Result<Expansion> {
    let d = f.dim;
    if g.dim != d {
        return Err(Error::InvalidInput("f and g have different dimensions".into()));
    }
    let nu = f.offset.clone();
    let lambda = &g.offset + &Real::integer(d as i64);
    check_exponents(&nu, &lambda)?;
    let nu_f = nu.to_f64();
    let lambda_f = lambda.to_f64();
    let integrals = sphere_integrate(d, order, |omega| {
        let f0 = f.eval_layer(0, omega);
        if !(f0 > 0.0) {
            return Err(Error::Hypothesis(format!(
                "f₀(Ω) > 0 violated: f₀({omega:?}) = {f0}"
            )));
        }
        let fs: Vec<f64> = (1..=order).map(|m| f.eval_layer(m, omega)).collect();
        let gs: Vec<f64> = (0..=order).map(|m| g.eval_layer(m, omega)).collect();
        let bell = BellTable::new(&fs);
        Ok((0..=order)
            .map(|j| {
                let e = -(j as f64 + lambda_f) / nu_f;
                let inner = compensated_sum((0..=j).map(|m| {
                    let s = if m == 0 {
                        1.0
                    } else {
                        compensated_sum(
                            (1..=m).map(|r| gen_binomial(&e, r) * bell.get(m, r) / f0.powi(r as i32)),
                        )
                    };
                    gs[j - m] * s
                }));
                f0.powf(e) * inner
            })
            .collect())
    })?;
    let zetas = integrals
        .into_iter()
        .enumerate()
        .map(|(j, integral)| {
            let arg = &(&Real::integer(j as i64) + &lambda) / &nu;
            Ok((&gamma_over_nu(&nu, &arg)? * &Real::Float(integral)).to_float())
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ExpansionParams {
        dim: d,
        nu,
        lambda,
        order,
    };
    Ok(Expansion::assemble(params, zetas, Pathway::General, smooth(f) && smooth(g), None))
}

/// Partial Bell polynomials over the ring of polynomials: `table[r][m] = f_m^(r)`.
fn poly_bell<T: Scalar>(layers: &[TaylorPoly<T>], dim: usize) -> Vec<Vec<TaylorPoly<T>>> {
    let n = layers.len();
    let zero = TaylorPoly::zero(dim, 0);
    let mut table: Vec<Vec<TaylorPoly<T>>> = Vec::with_capacity(n + 1);
    let mut base = vec![zero.clone(); n + 1];
    base[0] = TaylorPoly::constant(dim, 0, T::one());
    table.push(base);
    for r in 1..=n {
        let row = (0..=n)
            .map(|m| {
                let mut acc = zero.clone();
                if m >= r {
                    for j in r - 1..m {
                        acc = acc.add(&layers[m - j - 1].mul(&table[r - 1][j]));
                    }
                }
                acc
            })
            .collect();
        table.push(row);
    }
    table
}

/// `∫_{S^{d-1}} p(Ω) dΩ / π^⌊d/2⌋`, exact.
fn sphere_integral<T: Scalar>(p: &TaylorPoly<T>) -> T {
    T::sum_all(
        p.terms()
            .iter()
            .map(|(a, c)| c.clone() * T::from_rational(&sphere_moment_rational(a))),
    )
}

fn pi_floor_half(d: usize) -> Real {
    Real::Exact(Closed::pi_pow_half(2 * (d / 2) as i32))
}

/// Coefficients with a constant leading layer `f₀`, pulled out of the angular integrals.
///
/// Polynomial layers are integrated exactly against sphere moments; sampled
/// layers fall back to quadrature.
pub fn f0const_coeffs<T: Scalar>(
    f: &RadialCoeffs<T>,
    g: &RadialCoeffs<T>,
    order: usize,
) -> Result<Expansion> {
    let d = f.dim;
    if g.dim != d {
        return Err(Error::InvalidInput("f and g have different dimensions".into()));
    }
    let f0 = f.layers[0].constant_value().ok_or_else(|| {
        Error::PathwayMismatch(
            "f₀(Ω) is not constant on the sphere; use the general pathway".into(),
        )
    })?;
    if !(f0.to_f64() > 0.0) {
        return Err(Error::Hypothesis(format!(
            "f₀(Ω) > 0 violated: f₀ = {}",
            f0.to_f64()
        )));
    }
    let nu = f.offset.clone();
    let lambda = &g.offset + &Real::integer(d as i64);
    check_exponents(&nu, &lambda)?;
    let f0_real = f0.to_real();

    let f_polys: Option<Vec<TaylorPoly<T>>> =
        (1..=order).map(|m| layer_poly(f, m)).collect();
    let g_polys: Option<Vec<TaylorPoly<T>>> = (0..=order).map(|m| layer_poly(g, m)).collect();

    // integrals[j][m][r] = ∫ g_{j-m} f_m^(r) dΩ, as a Real
    let integrals: Vec<Vec<Vec<Real>>> = match (f_polys, g_polys) {
        (Some(fp), Some(gp)) => {
            let bell = poly_bell(&fp, d);
            let pi = pi_floor_half(d);
            (0..=order)
                .into_par_iter()
                .map(|j| {
                    (0..=j)
                        .map(|m| {
                            (0..=m)
                                .map(|r| {
                                    let prod = gp[j - m].mul(&bell[r][m]);
                                    &pi * &sphere_integral(&prod).to_real()
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        }
        _ => {
            // Flattened (j, m, r) quadrature.
            let index: Vec<(usize, usize, usize)> = (0..=order)
                .flat_map(|j| (0..=j).flat_map(move |m| (0..=m).map(move |r| (j, m, r))))
                .collect();
            let flat = sphere_integrate(d, index.len() - 1, |omega| {
                let fs: Vec<f64> = (1..=order).map(|m| f.eval_layer(m, omega)).collect();
                let bell = BellTable::new(&fs);
                Ok(index
                    .iter()
                    .map(|&(j, m, r)| g.eval_layer(j - m, omega) * bell.get(m, r))
                    .collect())
            })?;
            let mut out: Vec<Vec<Vec<Real>>> = (0..=order)
                .map(|j| (0..=j).map(|m| vec![Real::zero(); m + 1]).collect())
                .collect();
            for (&(j, m, r), v) in index.iter().zip(flat) {
                out[j][m][r] = Real::Float(v);
            }
            out
        }
    };

    let zetas = (0..=order)
        .map(|j| {
            let arg = &(&Real::integer(j as i64) + &lambda) / &nu;
            let e = -arg.clone();
            let mut sum = Real::zero();
            let mut parts: Vec<f64> = Vec::new();
            for m in 0..=j {
                let rs: Vec<usize> = if m == 0 { vec![0] } else { (1..=m).collect() };
                for r in rs {
                    let binom = gen_binomial_real(&e, r);
                    let f0_r = f0_real.pow(&Real::integer(-(r as i64)))?;
                    let term = &(&binom * &f0_r) * &integrals[j][m][r];
                    parts.push(term.to_f64());
                    sum = &sum + &term;
                }
            }
            if !sum.is_exact() {
                sum = Real::Float(compensated_sum(parts));
            }
            let pre = &gamma_over_nu(&nu, &arg)? * &f0_real.pow(&e)?;
            Ok(&pre * &sum)
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ExpansionParams {
        dim: d,
        nu,
        lambda,
        order,
    };
    Ok(Expansion::assemble(params, zetas, Pathway::F0Const, smooth(f) && smooth(g), None))
}

fn layer_poly<T: Scalar>(r: &RadialCoeffs<T>, j: usize) -> Option<TaylorPoly<T>> {
    match r.layers.get(j) {
        None => Some(TaylorPoly::zero(r.dim, 0)),
        Some(l) => l.as_polynomial(r.dim),
    }
}

/// Generalized binomial with a `Real` argument, exact when the argument is rational.
fn gen_binomial_real(x: &Real, r: usize) -> Real {
    match x.as_rational() {
        Some(q) => Real::rational(gen_binomial(q, r)),
        None => Real::Float(gen_binomial(&x.to_f64(), r)),
    }
}

/// `Σ_{m=0}^{j} Σ_{r=1}^{m} c(r) Σ_{|β|=j-m} Σ_{n₁+…+n_r=m} Σ_{|α_i|=n_i+ν} weight(β+α₁+…+α_r) g_β f_{α₁}⋯f_{α_r}`
///
/// with the `m = 0` inner sum read as 1. `f_layers[n - 1]` holds the order
/// `n + ν` part of `f`; `g_layers[i]` the order `i` part of `g`. Compositions
/// are walked depth first, sharing prefix products.
fn composition_sum<T, C, W>(
    f_layers: &[TaylorPoly<T>],
    g_layers: &[TaylorPoly<T>],
    j: usize,
    dim: usize,
    coeff: C,
    weight: W,
) -> T
where
    T: Scalar,
    C: Fn(usize) -> T,
    W: Fn(&MultiIndex) -> T,
{
    let mut cache: HashMap<MultiIndex, T> = HashMap::new();
    let mut weigh = |g: &MultiIndex| -> T {
        if let Some(v) = cache.get(g) {
            return v.clone();
        }
        let v = weight(g);
        cache.insert(g.clone(), v.clone());
        v
    };
    let mut pieces: Vec<T> = Vec::new();
    let empty = TaylorPoly::zero(dim, 0);
    for m in 0..=j {
        let g_layer = g_layers.get(j - m).unwrap_or(&empty);
        if g_layer.is_zero() {
            continue;
        }
        if m == 0 {
            for (b, c) in g_layer.terms() {
                pieces.push(c.clone() * weigh(b));
            }
            continue;
        }
        for r in 1..=m {
            let mut products: Vec<TaylorPoly<T>> = Vec::new();
            let start = TaylorPoly::constant(dim, 0, T::one());
            walk(f_layers, m, r, &start, &mut products);
            let c_r = coeff(r);
            for prod in products {
                for (b, gb) in g_layer.terms() {
                    for (a, fa) in prod.terms() {
                        let w = weigh(&b.add(a));
                        if w != T::zero() {
                            pieces.push(c_r.clone() * gb.clone() * fa.clone() * w);
                        }
                    }
                }
            }
        }
    }
    T::sum_all(pieces)
}

fn walk<T: Scalar>(
    f_layers: &[TaylorPoly<T>],
    remaining: usize,
    parts: usize,
    prefix: &TaylorPoly<T>,
    out: &mut Vec<TaylorPoly<T>>,
) {
    if parts == 0 {
        if remaining == 0 && !prefix.is_zero() {
            out.push(prefix.clone());
        }
        return;
    }
    // each remaining part needs at least 1
    for n in 1..=remaining + 1 - parts {
        let Some(layer) = f_layers.get(n - 1) else { break };
        if layer.is_zero() {
            continue;
        }
        let next = prefix.mul(layer);
        walk(f_layers, remaining - n, parts - 1, &next, out);
    }
}

fn taylor_layers<T: Scalar>(f: &TaylorPoly<T>, g: &TaylorPoly<T>, nu: usize, order: usize) -> (Vec<TaylorPoly<T>>, Vec<TaylorPoly<T>>) {
    let fl = (1..=order).map(|n| f.layer(n + nu)).collect();
    let gl = (0..=order).map(|i| g.layer(i)).collect();
    (fl, gl)
}

/// Leading order `ν` of `f`, required to be an even integer `≥ 2`.
fn leading_order<T: Scalar>(f: &TaylorPoly<T>) -> Result<usize> {
    let nu = f
        .min_order()
        .ok_or_else(|| Error::Hypothesis("f is identically zero".into()))?;
    if nu < 2 || nu % 2 == 1 {
        return Err(Error::Hypothesis(format!(
            "f must vanish to even order ν ≥ 2 at its minimum, found order {nu}"
        )));
    }
    Ok(nu)
}

/// Closed-form coefficients for Taylor data whose order-`ν` layer is constant on the sphere.
pub fn taylor_coeffs<T: Scalar>(
    f: &TaylorPoly<T>,
    g: &TaylorPoly<T>,
    order: usize,
) -> Result<Expansion> {
    let d = f.dim();
    if g.dim() != d {
        return Err(Error::InvalidInput("f and g have different dimensions".into()));
    }
    f.check_critical_zero()?;
    let nu = leading_order(f)?;
    let f0 = f.layer(nu).sphere_constant().ok_or_else(|| {
        Error::PathwayMismatch(
            "f₀(Ω) is not constant on the sphere; normalize the Hessian first (nondegenerate pathway) or use the general pathway"
                .into(),
        )
    })?;
    if !(f0.to_f64() > 0.0) {
        return Err(Error::Hypothesis(format!(
            "f₀(Ω) > 0 violated: f₀ = {}",
            f0.to_f64()
        )));
    }
    let (fl, gl) = taylor_layers(f, g, nu, order);
    let nu_r = Real::integer(nu as i64);
    let d_r = Real::integer(d as i64);
    let f0_real = f0.to_real();
    let f0_inv = T::one() / f0.clone();
    let zetas = (0..=order)
        .into_par_iter()
        .map(|j| {
            let arg = &(&Real::integer(j as i64) + &d_r) / &nu_r;
            let e: T = field(&-arg.clone(), "-(d+j)/ν")?;
            let sum = composition_sum(
                &fl,
                &gl,
                j,
                d,
                |r| {
                    let mut p = T::one();
                    for _ in 0..r {
                        p = p * f0_inv.clone();
                    }
                    gen_binomial(&e, r) * p
                },
                |gamma| T::from_rational(&sphere_moment_rational(gamma)),
            );
            let pre = &(&gamma_over_nu(&nu_r, &arg)? * &f0_real.pow(&-arg)?) * &pi_floor_half(d);
            Ok(&pre * &sum.to_real())
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ExpansionParams {
        dim: d,
        nu: nu_r,
        lambda: d_r,
        order,
    };
    Ok(Expansion::assemble(params, zetas, Pathway::Taylor, true, None))
}

/// `(-1)^r / r!`
fn signed_inverse_factorial<T: Scalar>(r: usize) -> T {
    let fact = crate::number::factorial(r as i64);
    let v = Rational::new(if r % 2 == 0 { BigInt::one() } else { -BigInt::one() }, fact);
    T::from_rational(&v)
}

/// `(γ - 1)!! even(γ)`
fn odd_moment(gamma: &MultiIndex) -> Rational {
    if gamma.is_even() {
        Rational::from_integer(gamma.double_factorial_minus_one())
    } else {
        Rational::zero()
    }
}

/// Coefficients around a nondegenerate minimum: normalize `H` to the identity, then
/// `ζ_{2j} = (2π)^{d/2} det(H)^{-1/2} Σ (-1)^r/r! (γ-1)!! even(γ) g_β f_{α₁}⋯f_{α_r}`.
///
/// Rational data stays exact: the Hessian is diagonalized by an exact
/// congruence and the remaining diagonal scaling folds into each all-even
/// moment as a rational factor.
pub trait NondegenerateRoute: Scalar {
    fn nondegenerate(f: &TaylorPoly<Self>, g: &TaylorPoly<Self>, order: usize) -> Result<Expansion>;
}

impl NondegenerateRoute for Rational {
    fn nondegenerate(f: &TaylorPoly<Rational>, g: &TaylorPoly<Rational>, order: usize) -> Result<Expansion> {
        let d = f.dim();
        let normalized = ldl_normalize(f)?;
        let gz = normalized.transform(g)?;
        let (fl, gl) = taylor_layers(&normalized.f, &gz, 2, order);
        let det = normalized.det();
        // (2π)^{d/2} det^{-1/2} = π^{d/2} (2^d / det)^{1/2}
        let two_d = Rational::from_integer(BigInt::one() << d);
        let pre = &Closed::pi_pow_half(d as i32) * &Closed::rational_power(&(two_d / &det), &ratio(1, 2))?;
        let zetas = (0..=order)
            .into_par_iter()
            .map(|j| {
                if j % 2 == 1 {
                    return Real::zero();
                }
                let sum = composition_sum(&fl, &gl, j, d, signed_inverse_factorial::<Rational>, |gamma| {
                    odd_moment(gamma) * normalized.scale(gamma)
                });
                &Real::Exact(pre.clone()) * &Real::rational(sum)
            })
            .collect();
        let spectral = spectral_of(f)?;
        let normalization = Normalization {
            p: spectral.p,
            det_hessian: Real::rational(det),
        };
        Ok(nondegenerate_expansion(d, order, zetas, normalization))
    }
}

impl NondegenerateRoute for f64 {
    fn nondegenerate(f: &TaylorPoly<f64>, g: &TaylorPoly<f64>, order: usize) -> Result<Expansion> {
        let d = f.dim();
        let normalized = hessian_normalize(f)?;
        let gy = normalized.transform(g)?;
        let (fl, gl) = taylor_layers(&normalized.f, &gy, 2, order);
        let pre = (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0) * normalized.jacobian();
        let zetas = (0..=order)
            .into_par_iter()
            .map(|j| {
                if j % 2 == 1 {
                    return Real::zero();
                }
                let sum = composition_sum(&fl, &gl, j, d, signed_inverse_factorial::<f64>, |gamma| {
                    crate::number::rational_to_f64(&odd_moment(gamma))
                });
                Real::Float(pre * sum)
            })
            .collect();
        let normalization = Normalization {
            p: normalized.spectral.p.clone(),
            det_hessian: Real::Float(normalized.spectral.det),
        };
        Ok(nondegenerate_expansion(d, order, zetas, normalization))
    }
}

fn nondegenerate_expansion(d: usize, order: usize, zetas: Vec<Real>, normalization: Normalization) -> Expansion {
    let params = ExpansionParams {
        dim: d,
        nu: Real::integer(2),
        lambda: Real::integer(d as i64),
        order,
    };
    Expansion::assemble(params, zetas, Pathway::Nondegenerate, true, Some(normalization))
}

pub fn nondegenerate_coeffs<T: NondegenerateRoute>(
    f: &TaylorPoly<T>,
    g: &TaylorPoly<T>,
    order: usize,
) -> Result<Expansion> {
    if f.dim() != g.dim() {
        return Err(Error::InvalidInput("f and g have different dimensions".into()));
    }
    T::nondegenerate(f, g, order)
}

/// One-dimensional closed form for `f = |x|^ν Σ a_j x^j`, `g = Σ b_j x^j`:
/// `ζ_{2j} = (2/ν) Γ((2j+1)/ν) a₀^{-(2j+1)/ν} Σ_m b_{2j-m} Σ_r binom(-(2j+1)/ν, r) a₀^{-r} a_m^(r)`.
///
/// Odd-index coefficients are zero. Every `ζ_{2j}` with `2j ≤ N` is produced.
pub fn oned_coeffs<T: Scalar>(a: &[T], b: &[T], nu: &Real, order: usize) -> Result<Expansion> {
    if a.is_empty() {
        return Err(Error::InvalidInput("need at least a₀".into()));
    }
    if !(a[0].to_f64() > 0.0) {
        return Err(Error::Hypothesis(format!(
            "a₀ > 0 violated: a₀ = {}",
            a[0].to_f64()
        )));
    }
    if !nu.is_positive() {
        return Err(Error::Hypothesis(format!("ν > 0 violated: ν = {nu}")));
    }
    let coeff = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
    let rest: Vec<T> = (1..=order).map(|i| coeff(a, i)).collect();
    let bell = BellTable::new(&rest);
    let a0 = a[0].clone();
    let a0_inv = T::one() / a0.clone();
    let a0_real = a0.to_real();
    let zetas = (0..=order)
        .map(|j| {
            if j % 2 == 1 {
                return Ok(Real::zero());
            }
            let arg = &Real::integer(j as i64 + 1) / nu;
            let e: T = field(&-arg.clone(), "-(2j+1)/ν")?;
            let sum = T::sum_all((0..=j).map(|m| {
                let s = if m == 0 {
                    T::one()
                } else {
                    let mut p = T::one();
                    T::sum_all((1..=m).map(|r| {
                        p = p.clone() * a0_inv.clone();
                        gen_binomial(&e, r) * p.clone() * bell.get(m, r)
                    }))
                };
                coeff(b, j - m) * s
            }));
            let pre = &(&(&Real::integer(2) * &gamma(&arg)?) / nu) * &a0_real.pow(&-arg)?;
            Ok(&pre * &sum.to_real())
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ExpansionParams {
        dim: 1,
        nu: nu.clone(),
        lambda: Real::one(),
        order,
    };
    Ok(Expansion::assemble(params, zetas, Pathway::OneDim, true, None))
}

/// Coefficients `c_j` of `k! ∼ k^k e^{-k} √(2πk) Σ c_j k^{-j}`:
/// `c_j = Σ_{r=0}^{2j} (-1)^r/r! (2j+2r-1)!! a_{2j}^(r)` with `a_i = 1/(i+2)`.
///
/// The `r = 0` term is `a_{2j}^(0)`, which is 1 at `j = 0` and 0 otherwise.
pub fn stirling_series(n_terms: usize) -> Vec<Rational> {
    if n_terms == 0 {
        return Vec::new();
    }
    let top = 2 * (n_terms - 1);
    let a: Vec<Rational> = (1..=top).map(|i| ratio(1, i as i64 + 2)).collect();
    let bell = BellTable::new(&a);
    (0..n_terms)
        .map(|j| {
            let m = 2 * j;
            let mut c = if j == 0 { int(1) } else { Rational::zero() };
            for r in 1..=m {
                let df = crate::number::double_factorial((m + 2 * r) as i64 - 1);
                let sign: Rational = signed_inverse_factorial(r);
                c += sign * Rational::from_integer(df) * bell.get(m, r);
            }
            c
        })
        .collect()
}

/// Parses `"p/q"` or decimals into a `Real`; floats stay inexact.
pub fn real_from_str(s: &str) -> Result<Real> {
    match parse_rational(s) {
        Ok(r) => Ok(Real::rational(r)),
        Err(_) => s
            .trim()
            .parse::<f64>()
            .map(Real::Float)
            .map_err(|_| Error::Parse(format!("not a number: {s:?}"))),
    }
}
