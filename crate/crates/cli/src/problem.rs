//! Problem specifications read from JSON.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "f": {"taylor": {"2,0": "1/2", "0,2": 1, "3,0": 1}},
//!   "g": {"taylor": {"0,0": 1}},
//!   "order": 4,
//!   "pathway": "auto",
//!   "domain": {"box": [[-2, 2], [-2, 2]]}
//! }
//! ```
//!
//! `f` and `g` each take exactly one of `taylor` (exponent map), `builtin`
//! (`{"builtin": "log-shift", "params": {}}`) or `radial`
//! (`{"radial": {"nu": 2, "layers": [...]}}`, with `lambda` instead of `nu` for
//! `g`). A radial layer is a constant or an exponent map of a homogeneous
//! polynomial evaluated on the unit sphere.

use std::sync::Arc;

use laplace_core::coefficients::{
    f0const_coeffs, general_coeffs, nondegenerate_coeffs, oned_coeffs, real_from_str,
    taylor_coeffs, Expansion, NondegenerateRoute, Pathway,
};
use laplace_core::number::{Rational, Real, Scalar};
use laplace_core::oracle::{builtin, Domain, IntegrandSpec};
use laplace_core::spectral::SpectralDecomp;
use laplace_core::taylor::{radialize, AnyPoly, Layer, RadialCoeffs, SampledFn, TaylorPoly};
use laplace_core::{Error, Result};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Fixed(Pathway),
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        if s == "auto" {
            Ok(Method::Auto)
        } else {
            s.parse().map(Method::Fixed)
        }
    }
}

/// Radial data in either field.
#[derive(Clone)]
enum AnyRadial {
    Exact(RadialCoeffs<Rational>),
    Float(RadialCoeffs<f64>),
}

impl AnyRadial {
    fn to_f64(&self) -> RadialCoeffs<f64> {
        match self {
            AnyRadial::Float(r) => r.clone(),
            AnyRadial::Exact(r) => RadialCoeffs {
                dim: r.dim,
                offset: r.offset.clone(),
                layers: r
                    .layers
                    .iter()
                    .map(|l| match l {
                        Layer::Constant(c) => Layer::Constant(c.to_f64()),
                        Layer::Polynomial(p) => Layer::Polynomial(p.to_f64()),
                        Layer::Sampled(s) => Layer::Sampled(s.clone()),
                    })
                    .collect(),
            },
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AnyRadial::Exact(r) => eval_radial(r, x),
            AnyRadial::Float(r) => eval_radial(r, x),
        }
    }
}

/// `ρ^offset Σ_j layer_j(x/ρ) ρ^j`.
fn eval_radial<T: Scalar>(r: &RadialCoeffs<T>, x: &[f64]) -> f64 {
    let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rho == 0.0 {
        return if r.offset.is_positive() { 0.0 } else { r.eval_layer(0, &unit(x.len())) };
    }
    let omega: Vec<f64> = x.iter().map(|v| v / rho).collect();
    let sum: f64 = (0..r.layers.len())
        .map(|j| r.eval_layer(j, &omega) * rho.powi(j as i32))
        .sum();
    rho.powf(r.offset.to_f64()) * sum
}

fn unit(d: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[0] = 1.0;
    e
}

/// One of `f`, `g`, after parsing.
#[derive(Clone)]
enum Data {
    Taylor(AnyPoly),
    Builtin { poly: TaylorPoly<Rational>, eval: SampledFn, domain: Domain },
    Radial(AnyRadial),
}

impl Data {
    fn poly(&self) -> Option<AnyPoly> {
        match self {
            Data::Taylor(p) => Some(p.clone()),
            Data::Builtin { poly, .. } => Some(AnyPoly::Exact(poly.clone())),
            Data::Radial(_) => None,
        }
    }

    fn evaluator(&self) -> SampledFn {
        match self {
            Data::Taylor(p) => {
                let p = p.to_f64();
                Arc::new(move |x: &[f64]| p.eval(x))
            }
            Data::Builtin { eval, .. } => eval.clone(),
            Data::Radial(r) => {
                let r = r.clone();
                Arc::new(move |x: &[f64]| r.eval(x))
            }
        }
    }
}

pub struct Problem {
    pub dim: usize,
    f: Data,
    g: Data,
    pub order: usize,
    pub method: Method,
    domain: Option<Domain>,
}

fn ctx(what: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("{what}: {m}")),
        other => other,
    }
}

fn parse_real_value(v: &Value, what: &str) -> Result<Real> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Real::integer(n.as_i64().unwrap())),
        Value::Number(n) => Ok(Real::Float(n.as_f64().unwrap())),
        Value::String(s) => real_from_str(s).map_err(ctx(what)),
        other => Err(Error::Parse(format!("{what}: expected a number, got {other}"))),
    }
}

fn parse_layers(
    arr: &[Value],
    dim: usize,
    what: &str,
) -> Result<(Vec<Layer<Rational>>, Vec<Layer<f64>>, bool)> {
    let mut exact = Vec::new();
    let mut float = Vec::new();
    let mut is_float = false;
    for (j, v) in arr.iter().enumerate() {
        let here = format!("{what}.layers[{j}]");
        match v {
            Value::Object(_) => match AnyPoly::from_json(v, dim).map_err(ctx(&here))? {
                AnyPoly::Exact(p) => {
                    float.push(Layer::Polynomial(p.to_f64()));
                    exact.push(Layer::Polynomial(p));
                }
                AnyPoly::Float(p) => {
                    is_float = true;
                    float.push(Layer::Polynomial(p));
                }
            },
            other => {
                let c = parse_real_value(other, &here)?;
                float.push(Layer::Constant(c.to_f64()));
                match c.as_rational() {
                    Some(r) => exact.push(Layer::Constant(r.clone())),
                    None => is_float = true,
                }
            }
        }
    }
    Ok((exact, float, is_float))
}

fn parse_data(v: &Value, dim: usize, which: &str, order: usize) -> Result<Data> {
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{which}: expected an object")))?;
    let kinds: Vec<&str> = ["taylor", "builtin", "radial"]
        .into_iter()
        .filter(|k| obj.contains_key(*k))
        .collect();
    if kinds.len() != 1 {
        return Err(Error::Parse(format!(
            "{which}: exactly one of \"taylor\", \"builtin\", \"radial\" is required, found {kinds:?}"
        )));
    }
    match kinds[0] {
        "taylor" => Ok(Data::Taylor(
            AnyPoly::from_json(&obj["taylor"], dim).map_err(ctx(&format!("{which}.taylor")))?,
        )),
        "builtin" => {
            let name = obj["builtin"]
                .as_str()
                .ok_or_else(|| Error::Parse(format!("{which}.builtin: expected a name")))?;
            let params = obj.get("params").cloned().unwrap_or(Value::Null);
            let b = builtin(name, &params, order + 2).map_err(ctx(&format!("{which}.builtin")))?;
            if b.dim != dim {
                return Err(Error::Parse(format!(
                    "{which}.builtin: {name} has dimension {}, spec says {dim}",
                    b.dim
                )));
            }
            Ok(Data::Builtin { poly: b.taylor, eval: b.f, domain: b.domain })
        }
        _ => {
            let here = format!("{which}.radial");
            let r = obj["radial"]
                .as_object()
                .ok_or_else(|| Error::Parse(format!("{here}: expected an object")))?;
            let key = if which == "f" { "nu" } else { "lambda" };
            let exponent = parse_real_value(
                r.get(key).ok_or_else(|| Error::Parse(format!("{here}: missing \"{key}\"")))?,
                &format!("{here}.{key}"),
            )?;
            // layers of g are offset by λ - d
            let offset = if which == "f" {
                exponent
            } else {
                &exponent - &Real::integer(dim as i64)
            };
            let layers = r
                .get("layers")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("{here}: missing \"layers\" array")))?;
            let (exact, float, is_float) = parse_layers(layers, dim, &here)?;
            if is_float || !offset.is_exact() {
                Ok(Data::Radial(AnyRadial::Float(RadialCoeffs::new(dim, offset, float)?)))
            } else {
                Ok(Data::Radial(AnyRadial::Exact(RadialCoeffs::new(dim, offset, exact)?)))
            }
        }
    }
}

fn parse_domain(v: &Value, dim: usize) -> Result<Domain> {
    if let Some(r) = v.get("ball") {
        let r = r
            .as_f64()
            .ok_or_else(|| Error::Parse("domain.ball: expected a radius".into()))?;
        return Ok(Domain::Ball(r));
    }
    if let Some(b) = v.get("box").and_then(Value::as_array) {
        let axes = b
            .iter()
            .map(|a| match a.as_array().map(|p| p.as_slice()) {
                Some([lo, hi]) => match (lo.as_f64(), hi.as_f64()) {
                    (Some(lo), Some(hi)) => Ok((lo, hi)),
                    _ => Err(Error::Parse("domain.box: bounds must be numbers".into())),
                },
                _ => Err(Error::Parse("domain.box: each axis must be [lo, hi]".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.len() != dim {
            return Err(Error::Parse(format!(
                "domain.box: {} axes for dimension {dim}",
                axes.len()
            )));
        }
        return Ok(Domain::Box(axes));
    }
    Err(Error::Parse("domain: expected {\"box\": [...]} or {\"ball\": r}".into()))
}

impl Problem {
    pub fn from_json_str(text: &str, order_override: Option<usize>) -> Result<Problem> {
        // serde_json already reports the line and column
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let dim = v
            .get("dimension")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing positive integer \"dimension\"".into()))?
            as usize;
        if dim == 0 {
            return Err(Error::Parse("\"dimension\" must be at least 1".into()));
        }
        let order = match order_override {
            Some(n) => n,
            None => v.get("order").and_then(Value::as_u64).unwrap_or(4) as usize,
        };
        let f = parse_data(
            v.get("f").ok_or_else(|| Error::Parse("missing \"f\"".into()))?,
            dim,
            "f",
            order,
        )?;
        let g = match v.get("g") {
            Some(g) => parse_data(g, dim, "g", order)?,
            None => Data::Taylor(AnyPoly::Exact(TaylorPoly::constant(dim, 0, Rational::from_integer(1.into())))),
        };
        let method = match v.get("pathway").and_then(Value::as_str) {
            Some(s) => s.parse().map_err(ctx("pathway"))?,
            None => Method::Auto,
        };
        let domain = v.get("domain").map(|d| parse_domain(d, dim)).transpose()?;
        Ok(Problem { dim, f, g, order, method, domain })
    }

    /// Most specific applicable pathway for `Method::Auto`.
    pub fn resolve(&self, method: Method) -> Pathway {
        if let Method::Fixed(p) = method {
            return p;
        }
        match (self.f.poly(), self.g.poly()) {
            (Some(f), Some(_)) => {
                let f = f.to_f64();
                if f.min_order() == Some(2) && SpectralDecomp::new(&f.hessian()).is_ok() {
                    Pathway::Nondegenerate
                } else if f
                    .min_order()
                    .is_some_and(|n| f.layer(n).sphere_constant().is_some())
                {
                    Pathway::Taylor
                } else {
                    Pathway::General
                }
            }
            _ => match &self.f {
                Data::Radial(r) if radial_leading_constant(r) => Pathway::F0Const,
                _ => Pathway::General,
            },
        }
    }

    pub fn expand(&self, method: Method) -> Result<Expansion> {
        let pathway = self.resolve(method);
        let order = self.order;
        match pathway {
            Pathway::Nondegenerate => {
                let (f, g) = self.taylor_pair(pathway)?;
                match (f, g) {
                    (AnyPoly::Exact(f), AnyPoly::Exact(g)) => nondeg(&f, &g, order),
                    (f, g) => nondeg(&f.to_f64(), &g.to_f64(), order),
                }
            }
            Pathway::Taylor => {
                let (f, g) = self.taylor_pair(pathway)?;
                match (f, g) {
                    (AnyPoly::Exact(f), AnyPoly::Exact(g)) => taylor_coeffs(&f, &g, order),
                    (f, g) => taylor_coeffs(&f.to_f64(), &g.to_f64(), order),
                }
            }
            Pathway::OneDim => {
                if self.dim != 1 {
                    return Err(Error::PathwayMismatch(format!(
                        "the one-dim pathway needs d = 1, got d = {}",
                        self.dim
                    )));
                }
                let (f, g) = self.taylor_pair(pathway)?;
                match (f, g) {
                    (AnyPoly::Exact(f), AnyPoly::Exact(g)) => oned(&f, &g, order),
                    (f, g) => oned(&f.to_f64(), &g.to_f64(), order),
                }
            }
            Pathway::General | Pathway::F0Const => {
                let (f, g) = self.radial_pair()?;
                match (f, g) {
                    (AnyRadial::Exact(f), AnyRadial::Exact(g)) if pathway == Pathway::F0Const => {
                        f0const_coeffs(&f, &g, order)
                    }
                    (f, g) => {
                        let (f, g) = (f.to_f64(), g.to_f64());
                        if pathway == Pathway::F0Const {
                            f0const_coeffs(&f, &g, order)
                        } else {
                            general_coeffs(&f, &g, order)
                        }
                    }
                }
            }
        }
    }

    fn taylor_pair(&self, pathway: Pathway) -> Result<(AnyPoly, AnyPoly)> {
        match (self.f.poly(), self.g.poly()) {
            (Some(f), Some(g)) => Ok((f, g)),
            _ => Err(Error::PathwayMismatch(format!(
                "the {pathway} pathway needs Taylor data for f and g; radial data only supports general or f0-const"
            ))),
        }
    }

    fn radial_pair(&self) -> Result<(AnyRadial, AnyRadial)> {
        let f = match &self.f {
            Data::Radial(r) => r.clone(),
            other => {
                let p = other.poly().expect("non-radial data has a polynomial");
                let nu = p
                    .to_f64()
                    .min_order()
                    .ok_or_else(|| Error::Hypothesis("f is identically zero".into()))?;
                radialize_any(&p, nu, self.order + 1)?
            }
        };
        let g = match &self.g {
            Data::Radial(r) => r.clone(),
            other => radialize_any(&other.poly().expect("polynomial"), 0, self.order + 1)?,
        };
        // bring both to the same field
        Ok(match (f, g) {
            (AnyRadial::Exact(f), AnyRadial::Exact(g)) => (AnyRadial::Exact(f), AnyRadial::Exact(g)),
            (f, g) => (AnyRadial::Float(f.to_f64()), AnyRadial::Float(g.to_f64())),
        })
    }

    /// The integrand for direct quadrature; `None` for the domain means the default ball was used.
    pub fn integrand(&self) -> Result<(IntegrandSpec, bool)> {
        let builtin_domain = match &self.f {
            Data::Builtin { domain, .. } => Some(domain.clone()),
            _ => None,
        };
        let (domain, defaulted) = match (&self.domain, builtin_domain) {
            (Some(d), _) => (d.clone(), false),
            (None, Some(d)) => (d, false),
            (None, None) => (Domain::Ball(1.0), true),
        };
        let spec = IntegrandSpec::new(self.dim, self.f.evaluator(), self.g.evaluator(), domain)?;
        Ok((spec, defaulted))
    }
}

fn radial_leading_constant(r: &AnyRadial) -> bool {
    match r {
        AnyRadial::Exact(r) => r.is_leading_constant(),
        AnyRadial::Float(r) => r.is_leading_constant(),
    }
}

fn radialize_any(p: &AnyPoly, leading: usize, layers: usize) -> Result<AnyRadial> {
    Ok(match p {
        AnyPoly::Exact(p) => AnyRadial::Exact(radialize(p, leading, layers)?),
        AnyPoly::Float(p) => AnyRadial::Float(radialize(p, leading, layers)?),
    })
}

fn nondeg<T: NondegenerateRoute>(f: &TaylorPoly<T>, g: &TaylorPoly<T>, order: usize) -> Result<Expansion> {
    nondegenerate_coeffs(f, g, order)
}

/// `f = x^ν Σ a_j x^j`, `g = Σ b_j x^j` read off 1-D Taylor data.
fn oned<T: Scalar>(f: &TaylorPoly<T>, g: &TaylorPoly<T>, order: usize) -> Result<Expansion> {
    f.check_critical_zero()?;
    let nu = f
        .min_order()
        .ok_or_else(|| Error::Hypothesis("f is identically zero".into()))?;
    if nu % 2 == 1 {
        return Err(Error::Hypothesis(format!(
            "f must vanish to even order at its minimum, found order {nu}"
        )));
    }
    let coeff = |p: &TaylorPoly<T>, n: usize| p.coeff(&laplace_core::multiindex::MultiIndex::new(vec![n as u32]));
    let a: Vec<T> = (0..=order).map(|j| coeff(f, nu + j)).collect();
    let b: Vec<T> = (0..=order).map(|j| coeff(g, j)).collect();
    oned_coeffs(&a, &b, &Real::integer(nu as i64), order)
}
