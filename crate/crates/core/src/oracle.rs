//! Direct quadrature of `I(k) = ∫_R e^{-kf} g dx` and empirical order checks.
//!
//! At large `k` the integrand is concentrated in a region of size `k^{-1/ν}`.
//! [`integrate`] first locates the sublevel set `{k f ≤ 60}` inside the domain
//! and integrates only there; outside it the integrand is below `e^{-60}` of
//! its peak.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::coefficients::Expansion;
use crate::error::{Error, Result};
use crate::multiindex::SphereRule;
use crate::number::{int, parse_rational, ratio, KahanSum, Rational, Real};
use crate::quadrature::GaussLegendre;
use crate::taylor::{SampledFn, TaylorPoly};

/// Exponent cutoff: points with `k f > CUTOFF` are dropped.
const CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `[lo_i, hi_i]` per axis.
    Box(Vec<(f64, f64)>),
    /// Centered at 0.
    Ball(f64),
}

impl Domain {
    fn bounds(&self, dim: usize) -> Vec<(f64, f64)> {
        match self {
            Domain::Box(b) => b.clone(),
            Domain::Ball(r) => vec![(-r, *r); dim],
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box(b) => x.iter().zip(b).all(|(v, (lo, hi))| *lo <= *v && *v <= *hi),
            Domain::Ball(r) => x.iter().map(|v| v * v).sum::<f64>() <= r * r,
        }
    }

    /// Largest `t` with `t·dir` in the domain.
    fn ray_limit(&self, dir: &[f64]) -> f64 {
        match self {
            Domain::Ball(r) => *r,
            Domain::Box(b) => dir
                .iter()
                .zip(b)
                .map(|(&u, &(lo, hi))| {
                    if u > 0.0 {
                        hi / u
                    } else if u < 0.0 {
                        lo / u
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// `f`, `g` and the integration domain.
#[derive(Clone)]
pub struct IntegrandSpec {
    pub dim: usize,
    pub f: SampledFn,
    pub g: SampledFn,
    pub domain: Domain,
}

impl std::fmt::Debug for IntegrandSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegrandSpec")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl IntegrandSpec {
    pub fn new(dim: usize, f: SampledFn, g: SampledFn, domain: Domain) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        match &domain {
            Domain::Box(b) => {
                if b.len() != dim {
                    return Err(Error::InvalidInput(format!(
                        "box has {} axes, expected {dim}",
                        b.len()
                    )));
                }
                if b.iter().any(|(lo, hi)| !(*lo < 0.0 && 0.0 < *hi)) {
                    return Err(Error::InvalidInput(
                        "domain must contain 0 in its interior".into(),
                    ));
                }
            }
            Domain::Ball(r) => {
                if !(*r > 0.0) {
                    return Err(Error::InvalidInput("ball radius must be positive".into()));
                }
            }
        }
        Ok(IntegrandSpec { dim, f, g, domain })
    }

    pub fn from_taylor(f: &TaylorPoly<f64>, g: &TaylorPoly<f64>, domain: Domain) -> Result<Self> {
        let (fc, gc) = (f.clone(), g.clone());
        IntegrandSpec::new(
            f.dim(),
            Arc::new(move |x: &[f64]| fc.eval(x)),
            Arc::new(move |x: &[f64]| gc.eval(x)),
            domain,
        )
    }

    /// `f(0) = 0` and `f > 0` at every other point of a sample grid.
    pub fn check(&self) -> Result<()> {
        let origin = vec![0.0; self.dim];
        let f0 = (self.f)(&origin);
        if f0.abs() > 1e-12 {
            return Err(Error::InvalidMinimum(format!("f(0) = {f0}, expected 0")));
        }
        let bounds = self.domain.bounds(self.dim);
        let per_axis = match self.dim {
            1 => 201,
            2 => 41,
            3 => 17,
            _ => 7,
        };
        for x in grid(&bounds, per_axis) {
            if !self.domain.contains(&x) || x.iter().all(|v| v.abs() < 1e-12) {
                continue;
            }
            let v = (self.f)(&x);
            if !(v > 0.0) {
                return Err(Error::Hypothesis(format!(
                    "f must attain its unique minimum value of 0 at the origin, but f({x:?}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

fn grid(bounds: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        let step = (hi - lo) / (per_axis - 1) as f64;
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |i| {
                    let mut q = p.clone();
                    q.push(lo + step * i as f64);
                    q
                })
            })
            .collect();
    }
    out
}

/// Value of `I(k)` with its last-doubling change as error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
}

/// Largest `t ≤ limit` before `k f(t·dir)` first exceeds the cutoff.
fn ray_extent(f: &SampledFn, k: f64, dir: &[f64], limit: f64) -> f64 {
    let at = |t: f64| {
        let x: Vec<f64> = dir.iter().map(|u| t * u).collect();
        let v = k * f(&x);
        v.is_nan() || v > CUTOFF
    };
    let mut t = limit * 1e-9;
    let mut prev = 0.0;
    while t < limit {
        if at(t) {
            let (mut a, mut b) = (prev, t);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if at(m) {
                    b = m;
                } else {
                    a = m;
                }
            }
            return b;
        }
        prev = t;
        t *= 1.25;
    }
    limit
}

/// Axis-aligned box containing `{x ∈ R : k f(x) ≤ CUTOFF}`, clipped to the domain bounds.
fn sublevel_box(spec: &IntegrandSpec, k: f64) -> Vec<(f64, f64)> {
    let d = spec.dim;
    let mut dirs = if d == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        SphereRule::new(d, if d <= 3 { 16 } else { 4 }).nodes
    };
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            dirs.push(e);
        }
    }
    let points: Vec<Vec<f64>> = dirs
        .par_iter()
        .map(|u| {
            let t = ray_extent(&spec.f, k, u, spec.domain.ray_limit(u));
            u.iter().map(|c| c * t).collect()
        })
        .collect();
    let bounds = spec.domain.bounds(d);
    let mut bx: Vec<(f64, f64)> = (0..d)
        .map(|i| {
            let lo = points.iter().map(|p| p[i]).fold(0.0, f64::min);
            let hi = points.iter().map(|p| p[i]).fold(0.0, f64::max);
            (lo, hi)
        })
        .collect();
    // Sublevel sets need not be aligned with the sampled rays.
    for (i, (lo, hi)) in bx.iter_mut().enumerate() {
        let pad = 0.15 * (*hi - *lo);
        *lo = (*lo - pad).max(bounds[i].0);
        *hi = (*hi + pad).min(bounds[i].1);
    }
    // Catch far-away low regions that no ray reached.
    let per_axis = match d {
        1 => 401,
        2 => 61,
        3 => 21,
        _ => 7,
    };
    let cells: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo) / (per_axis - 1) as f64).collect();
    for x in grid(&bounds, per_axis) {
        let outside = x.iter().zip(&bx).any(|(v, (lo, hi))| v < lo || v > hi);
        if outside && spec.domain.contains(&x) && k * (spec.f)(&x) <= CUTOFF {
            for i in 0..d {
                bx[i].0 = bx[i].0.min(x[i] - cells[i]).max(bounds[i].0);
                bx[i].1 = bx[i].1.max(x[i] + cells[i]).min(bounds[i].1);
            }
        }
    }
    bx
}

fn integrand(spec: &IntegrandSpec, k: f64, x: &[f64]) -> f64 {
    let e = k * (spec.f)(x);
    if !(e <= CUTOFF + 60.0) {
        return 0.0;
    }
    (-e).exp() * (spec.g)(x)
}

fn box_rule(spec: &IntegrandSpec, k: f64, bx: &[(f64, f64)], n: usize) -> f64 {
    let gl = GaussLegendre::new(n);
    let axes: Vec<Vec<(f64, f64)>> = bx.iter().map(|&(a, b)| gl.on_interval(a, b).collect()).collect();
    let d = spec.dim;
    let inner_count: usize = axes[1..].iter().map(Vec::len).product();
    let parts: Vec<f64> = axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut acc = KahanSum::default();
            let mut x = vec![0.0; d];
            x[0] = x0;
            for flat in 0..inner_count {
                let mut rest = flat;
                let mut w = w0;
                for ax in (1..d).rev() {
                    let (xi, wi) = axes[ax][rest % n];
                    rest /= n;
                    x[ax] = xi;
                    w *= wi;
                }
                acc.add(w * integrand(spec, k, &x));
            }
            acc.value()
        })
        .collect();
    crate::number::compensated_sum(parts)
}

fn ball_rule(spec: &IntegrandSpec, k: f64, radius: f64, level: usize, n: usize) -> f64 {
    let d = spec.dim;
    let sphere = SphereRule::new(d, level);
    let gl = GaussLegendre::new(n);
    let parts: Vec<f64> = sphere
        .nodes
        .par_iter()
        .zip(&sphere.weights)
        .map(|(u, &wu)| {
            let extent = (1.1 * ray_extent(&spec.f, k, u, radius)).min(radius);
            let mut acc = KahanSum::default();
            let mut x = vec![0.0; d];
            for (t, wt) in gl.on_interval(0.0, extent) {
                for (xi, ui) in x.iter_mut().zip(u) {
                    *xi = t * ui;
                }
                acc.add(wt * t.powi(d as i32 - 1) * integrand(spec, k, &x));
            }
            wu * acc.value()
        })
        .collect();
    crate::number::compensated_sum(parts)
}

/// `I(k)` by Gauss–Legendre with node doubling until the relative change is below `1e-12`.
///
/// Boxes use tensor-product rules on the sublevel box; balls use a polar
/// rule (radial Gauss–Legendre on `ρ^{d-1}` times the angular rule).
pub fn integrate(spec: &IntegrandSpec, k: f64) -> Result<Quadrature> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    let d = spec.dim;
    if d > 4 {
        return Err(Error::InvalidInput(format!(
            "direct quadrature supports d ≤ 4, got {d}"
        )));
    }
    let tol = 1e-12;
    let mut prev: Option<f64> = None;
    let mut delta = f64::INFINITY;
    let mut nodes = 0;
    match (&spec.domain, d) {
        (Domain::Ball(r), 2..) => {
            let schedule: &[(usize, usize)] = if d == 2 {
                &[(8, 16), (16, 32), (32, 64), (64, 128), (128, 256)]
            } else {
                &[(8, 16), (16, 32), (32, 64), (64, 128)]
            };
            for &(level, n) in schedule {
                let v = ball_rule(spec, k, *r, level, n);
                nodes = SphereRule::new(d, level).len() * n;
                if let Some(p) = prev {
                    delta = (v - p).abs();
                    if delta <= tol * v.abs() {
                        return Ok(Quadrature { value: v, error: delta, nodes });
                    }
                }
                prev = Some(v);
            }
        }
        _ => {
            let bx = sublevel_box(spec, k);
            let schedule: &[usize] = match d {
                1 => &[16, 32, 64, 128, 256, 512],
                2 | 3 => &[16, 32, 64, 128],
                _ => &[8, 16, 32],
            };
            for &n in schedule {
                let v = box_rule(spec, k, &bx, n);
                nodes = n.pow(d as u32);
                if let Some(p) = prev {
                    delta = (v - p).abs();
                    if delta <= tol * v.abs() {
                        return Ok(Quadrature { value: v, error: delta, nodes });
                    }
                }
                prev = Some(v);
            }
        }
    }
    Err(Error::Accuracy {
        message: format!("quadrature at k = {k} did not converge after {nodes} nodes (last change {delta:e})"),
        best: prev.unwrap_or(f64::NAN),
    })
}

/// `points` values from `k_min` to `k_max`, equally spaced in `log k`.
pub fn geometric_grid(k_min: f64, k_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(k_min > 0.0) || !(k_max > k_min) {
        return Err(Error::InvalidInput(format!(
            "invalid k-grid: {points} points on [{k_min}, {k_max}]"
        )));
    }
    let (a, b) = (k_min.ln(), k_max.ln());
    Ok((0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e2, 1e5, 7).expect("static grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelStatus {
    Pass,
    Fail,
    FloorLimited,
}

/// Residual of the partial sum through `ζ_level`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub target_slope: f64,
    pub fitted_slope: Option<f64>,
    pub points_used: usize,
    pub residuals: Vec<f64>,
    pub status: LevelStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureReport {
    pub pathway: String,
    pub k_values: Vec<f64>,
    pub integrals: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub nodes: Vec<usize>,
    pub converged: Vec<bool>,
    pub levels: Vec<LevelReport>,
    pub pass: bool,
}

impl QuadratureReport {
    pub fn level(&self, n: usize) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.level == n)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Fits `log |I(k) - Σ_{j≤n} ζ_j k^{-p_j}|` against `log k` for every level `n ≤ N`.
///
/// Level `n` passes when the fitted slope is at most its contract exponent plus
/// 0.25. Residuals within 10× of the quadrature error (or of double-precision
/// rounding of `I`) carry no information and are dropped; with fewer than 5
/// left, the level is reported as floor-limited.
pub fn verify_order(spec: &IntegrandSpec, expansion: &Expansion, k_grid: &[f64]) -> Result<QuadratureReport> {
    if k_grid.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "the order fit needs at least 5 k-values, got {}",
            k_grid.len()
        )));
    }
    let quad: Vec<Quadrature> = k_grid
        .par_iter()
        .map(|&k| integrate(spec, k))
        .collect::<Result<_>>()?;
    let floors: Vec<f64> = quad
        .iter()
        .map(|q| 10.0 * q.error.max(1e-15 * q.value.abs()))
        .collect();
    let order = expansion.params.order;
    let levels = (0..=order)
        .map(|n| {
            let target = -expansion.remainder.at_level(&expansion.params, n);
            let residuals: Vec<f64> = k_grid
                .iter()
                .zip(&quad)
                .map(|(&k, q)| (q.value - expansion.partial_sum(k, n)).abs())
                .collect();
            let (lx, ly): (Vec<f64>, Vec<f64>) = k_grid
                .iter()
                .zip(&residuals)
                .zip(&floors)
                .filter(|((_, r), fl)| r.is_finite() && **r > **fl)
                .map(|((k, r), _)| (k.ln(), r.ln()))
                .unzip();
            let (fitted, status) = if lx.len() >= 5 {
                let s = fit_slope(&lx, &ly);
                let st = if s <= target + 0.25 {
                    LevelStatus::Pass
                } else {
                    LevelStatus::Fail
                };
                (Some(s), st)
            } else {
                (None, LevelStatus::FloorLimited)
            };
            LevelReport {
                level: n,
                target_slope: target,
                fitted_slope: fitted,
                points_used: lx.len(),
                residuals,
                status,
            }
        })
        .collect::<Vec<_>>();
    let pass = levels.iter().all(|l| l.status != LevelStatus::Fail);
    Ok(QuadratureReport {
        pathway: expansion.pathway.name().to_string(),
        k_values: k_grid.to_vec(),
        integrals: quad.iter().map(|q| q.value).collect(),
        error_estimates: quad.iter().map(|q| q.error).collect(),
        nodes: quad.iter().map(|q| q.nodes).collect(),
        converged: vec![true; quad.len()],
        levels,
        pass,
    })
}

/// A copy of `expansion` with `delta` added to `ζ_j`.
pub fn inject_error(expansion: &Expansion, j: usize, delta: f64) -> Expansion {
    let mut out = expansion.clone();
    for t in out.terms.iter_mut().filter(|t| t.j == j) {
        t.zeta = &t.zeta + &Real::Float(delta);
    }
    out
}

/// A named integrand: evaluable `f`, its Taylor data at 0, and a default domain.
#[derive(Clone)]
pub struct Builtin {
    pub name: String,
    pub dim: usize,
    pub f: SampledFn,
    pub taylor: TaylorPoly<Rational>,
    pub domain: Domain,
}

fn param_rational(params: &Value, key: &str, default: Rational) -> Result<Rational> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(Value::Number(n)) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
        Some(Value::String(s)) => parse_rational(s),
        Some(other) => Err(Error::Parse(format!(
            "builtin parameter {key:?} must be an integer or \"p/q\" string, got {other}"
        ))),
    }
}

/// `gaussian` (`½|x|²`, param `dim`), `quartic` (`x²/2 + c x⁴`, param `c`), or
/// `log-shift` (`x - ln(1+x)`). Taylor data runs through degree `degree`.
pub fn builtin(name: &str, params: &Value, degree: usize) -> Result<Builtin> {
    match name {
        "gaussian" => {
            let d = params.get("dim").and_then(Value::as_u64).unwrap_or(1) as usize;
            if d == 0 {
                return Err(Error::InvalidInput("gaussian needs dim ≥ 1".into()));
            }
            let mut taylor = TaylorPoly::zero(d, 2);
            for i in 0..d {
                let e = crate::multiindex::MultiIndex::unit(d, i);
                taylor.add_term(e.add(&e), ratio(1, 2));
            }
            Ok(Builtin {
                name: name.into(),
                dim: d,
                f: Arc::new(|x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>()),
                taylor,
                domain: Domain::Box(vec![(-8.0, 8.0); d]),
            })
        }
        "quartic" => {
            let c = param_rational(params, "c", int(1))?;
            let cf = crate::number::rational_to_f64(&c);
            let taylor = TaylorPoly::from_terms(
                1,
                4,
                [
                    (crate::multiindex::MultiIndex::new(vec![2]), ratio(1, 2)),
                    (crate::multiindex::MultiIndex::new(vec![4]), c),
                ],
            )?;
            Ok(Builtin {
                name: name.into(),
                dim: 1,
                f: Arc::new(move |x: &[f64]| 0.5 * x[0] * x[0] + cf * x[0].powi(4)),
                taylor,
                domain: Domain::Box(vec![(-4.0, 4.0)]),
            })
        }
        "log-shift" => {
            let terms = (2..=degree.max(2)).map(|n| {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                (crate::multiindex::MultiIndex::new(vec![n as u32]), ratio(sign, n as i64))
            });
            let taylor = TaylorPoly::from_terms(1, degree.max(2), terms)?;
            Ok(Builtin {
                name: name.into(),
                dim: 1,
                f: Arc::new(|x: &[f64]| {
                    if x[0] <= -1.0 {
                        f64::INFINITY
                    } else {
                        x[0] - x[0].ln_1p()
                    }
                }),
                taylor,
                domain: Domain::Box(vec![(-0.99, 20.0)]),
            })
        }
        other => Err(Error::Parse(format!(
            "unknown builtin {other:?} (expected gaussian, quartic or log-shift)"
        ))),
    }
}

/// `B_0, …, B_n` with `B_1 = -1/2`, from `Σ_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let mut binom = Rational::one(); // C(m+1, 0)
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += &binom * bj;
            binom = binom * int((m + 1 - j) as i64) / int(j as i64 + 1);
        }
        // binom is now C(m+1, m)
        b.push(-acc / binom);
    }
    b
}

/// `ln Γ(x)` for `x > 0`, independent of the expansion machinery: shift to `x ≥ 30`,
/// then the Bernoulli form of Stirling's series with compensated accumulation.
pub fn ln_gamma_reference(x: f64) -> f64 {
    assert!(x > 0.0, "ln Γ reference needs x > 0");
    let bern = bernoulli_numbers(22);
    let mut acc = KahanSum::default();
    let mut z = x;
    while z < 30.0 {
        acc.add(-z.ln());
        z += 1.0;
    }
    let lz = z.ln();
    acc.add((z - 0.5) * lz);
    acc.add(-z);
    acc.add(0.5 * (2.0 * std::f64::consts::PI).ln());
    let mut zp = z;
    for n in 1..=10 {
        let c = &bern[2 * n] / int((2 * n * (2 * n - 1)) as i64);
        acc.add(crate::number::rational_to_f64(&c) / zp);
        zp *= z * z;
    }
    acc.value()
}

/// `k! e^k / k^{k+1} = ∫_{-1}^{∞} e^{-k(x - ln(1+x))} dx`.
pub fn scaled_factorial_reference(k: f64) -> f64 {
    (ln_gamma_reference(k + 1.0) + k - (k + 1.0) * k.ln()).exp()
}

/// `c_0..c_{n-1}` of Stirling's series, obtained by exponentiating
/// `Σ_{m≥1} B_{2m} / (2m(2m-1)) k^{1-2m}`.
pub fn stirling_reference(n: usize) -> Vec<Rational> {
    if n == 0 {
        return Vec::new();
    }
    let bern = bernoulli_numbers(2 * n);
    // l[i]: coefficient of k^{-i} in the log-series
    let mut l = vec![Rational::zero(); n];
    for (i, li) in l.iter_mut().enumerate().skip(1) {
        if i % 2 == 1 {
            let m = i.div_ceil(2);
            *li = &bern[2 * m] / int((2 * m * (2 * m - 1)) as i64);
        }
    }
    // e_i = (1/i) Σ_{j=1}^{i} j l_j e_{i-j}
    let mut e = vec![Rational::one()];
    for i in 1..n {
        let mut acc = Rational::zero();
        for j in 1..=i {
            acc += int(j as i64) * &l[j] * &e[i - j];
        }
        e.push(acc / int(i as i64));
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(d: usize) -> Builtin {
        builtin("gaussian", &serde_json::json!({ "dim": d }), 2).unwrap()
    }

    fn one() -> SampledFn {
        Arc::new(|_: &[f64]| 1.0)
    }

    #[test]
    fn gaussian_one_dimensional() {
        let b = gaussian(1);
        let spec = IntegrandSpec::new(1, b.f, one(), Domain::Box(vec![(-8.0, 8.0)])).unwrap();
        let q = integrate(&spec, 10.0).unwrap();
        assert!((q.value - (2.0 * PI / 10.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_two_dimensional_box_and_ball() {
        let b = gaussian(2);
        let exact = 2.0 * PI / 20.0;
        for domain in [Domain::Box(vec![(-8.0, 8.0); 2]), Domain::Ball(8.0)] {
            let spec = IntegrandSpec::new(2, b.f.clone(), one(), domain).unwrap();
            let q = integrate(&spec, 20.0).unwrap();
            assert!((q.value - exact).abs() < 1e-10, "{}", q.value);
        }
    }

    #[test]
    fn gaussian_three_dimensional_ball() {
        let b = gaussian(3);
        let spec = IntegrandSpec::new(3, b.f, one(), Domain::Ball(6.0)).unwrap();
        let q = integrate(&spec, 5.0).unwrap();
        let exact = (2.0 * PI / 5.0).powf(1.5);
        assert!((q.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn factorial_at_fifty() {
        let b = builtin("log-shift", &Value::Null, 2).unwrap();
        let spec = IntegrandSpec::new(1, b.f, one(), b.domain).unwrap();
        let q = integrate(&spec, 50.0).unwrap();
        let reference = scaled_factorial_reference(50.0);
        assert!((q.value / reference - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ln_gamma_matches_log_factorial_sum() {
        for n in [1usize, 5, 10, 50, 170] {
            let mut s = KahanSum::default();
            for i in 2..=n {
                s.add((i as f64).ln());
            }
            let r = ln_gamma_reference(n as f64 + 1.0);
            assert!((r - s.value()).abs() < 1e-12 * s.value().max(1.0), "n={n}");
        }
        assert!((ln_gamma_reference(0.5) - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], ratio(-1, 2));
        assert_eq!(b[2], ratio(1, 6));
        assert_eq!(b[3], Rational::zero());
        assert_eq!(b[4], ratio(-1, 30));
        assert_eq!(b[12], ratio(-691, 2730));
    }

    #[test]
    fn stirling_reference_head() {
        assert_eq!(stirling_reference(4), vec![int(1), ratio(1, 12), ratio(1, 288), ratio(-139, 51840)]);
    }

    #[test]
    fn enlarging_the_domain_changes_nothing() {
        let b = gaussian(2);
        let small = IntegrandSpec::new(2, b.f.clone(), one(), Domain::Box(vec![(-3.0, 3.0); 2])).unwrap();
        let big = IntegrandSpec::new(2, b.f, one(), Domain::Box(vec![(-6.0, 6.0); 2])).unwrap();
        let (a, c) = (integrate(&small, 50.0).unwrap(), integrate(&big, 50.0).unwrap());
        assert!((a.value - c.value).abs() < 1e-13 * a.value);
    }

    #[test]
    fn check_rejects_bad_minima() {
        let shifted = IntegrandSpec::new(1, Arc::new(|x: &[f64]| x[0] * x[0] + 1.0), one(), Domain::Ball(1.0)).unwrap();
        assert!(matches!(shifted.check(), Err(Error::InvalidMinimum(_))));
        let double = IntegrandSpec::new(1, Arc::new(|x: &[f64]| x[0] * x[0] * (x[0] - 0.5).powi(2)), one(), Domain::Ball(1.0)).unwrap();
        assert!(matches!(double.check(), Err(Error::Hypothesis(_))));
        let ok = IntegrandSpec::new(1, gaussian(1).f, one(), Domain::Ball(1.0)).unwrap();
        assert!(ok.check().is_ok());
    }

    #[test]
    fn grid_is_geometric() {
        let g = default_grid();
        assert_eq!(g.len(), 7);
        assert!((g[0] - 100.0).abs() < 1e-9 && (g[6] - 1e5).abs() < 1e-6);
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-12);
        assert!(geometric_grid(10.0, 5.0, 5).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (1..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 1.0).collect();
        assert!((fit_slope(&x, &y) + 2.5).abs() < 1e-12);
    }
}
