//! Radial power series, partial ordinary Bell polynomials and series reversion.

use crate::error::{Error, Result};
use crate::number::{gen_binomial, Real, Scalar};

/// Memo of partial ordinary Bell polynomials `f_m^(r)` for one coefficient list.
///
/// `f_m^(r)` is the sum of all ordered products of `r` coefficients whose
/// subscripts add up to `m`. Filled bottom-up with
/// `f_m^(r) = Σ_{j=r-1}^{m-1} f_{m-j} f_j^(r-1)`, starting from `f_m^(0) = [m = 0]`.
#[derive(Debug, Clone)]
pub struct BellTable<T> {
    table: Vec<Vec<T>>,
}

impl<T: Scalar> BellTable<T> {
    /// `coeffs[i]` is `f_{i+1}`; the table covers `0 <= r <= m <= coeffs.len()`.
    pub fn new(coeffs: &[T]) -> Self {
        let n = coeffs.len();
        let mut table: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        let mut base = vec![T::zero(); n + 1];
        base[0] = T::one();
        table.push(base);
        for r in 1..=n {
            let prev = &table[r - 1];
            let row: Vec<T> = (0..=n)
                .map(|m| {
                    if m < r {
                        return T::zero();
                    }
                    T::sum_all(
                        (r - 1..m).map(|j| coeffs[m - j - 1].clone() * prev[j].clone()),
                    )
                })
                .collect();
            table.push(row);
        }
        BellTable { table }
    }

    pub fn max_order(&self) -> usize {
        self.table.len() - 1
    }

    /// `f_m^(r)`; zero whenever `r > m`.
    pub fn get(&self, m: usize, r: usize) -> T {
        if r > m {
            return T::zero();
        }
        self.table[r][m].clone()
    }
}

/// One-shot `f_m^(r)`.
pub fn bell<T: Scalar>(coeffs: &[T], m: usize, r: usize) -> T {
    let n = coeffs.len().min(m);
    BellTable::new(&coeffs[..n]).get(m, r)
}

/// Coefficients `c_0..c_n` of `(1 + a_1 x + a_2 x² + ...)^p`, by the J.C.P. Miller recurrence.
///
/// `a[0]` is ignored and taken to be 1.
pub fn unit_series_power<T: Scalar>(a: &[T], p: &T, n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n + 1];
    c[0] = T::one();
    for m in 1..=n {
        let terms = (1..=m.min(a.len().saturating_sub(1))).map(|k| {
            let w = T::from_i64(k as i64) * (p.clone() + T::one()) - T::from_i64(m as i64);
            w * a[k].clone() * c[m - k].clone()
        });
        c[m] = T::sum_all(terms) / T::from_i64(m as i64);
    }
    c
}

/// `u^ν = ρ^ν Σ a_j ρ^j`, truncated after `a_N`.
#[derive(Debug, Clone)]
pub struct ScalarSeries<T> {
    pub nu: Real,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> ScalarSeries<T> {
    pub fn new(nu: Real, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs at least a₀".into()));
        }
        Ok(ScalarSeries { nu, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// `ρ^q = u^q Σ b_j u^j`.
#[derive(Debug, Clone)]
pub struct InvertedSeries<T> {
    pub q: Real,
    pub nu: Real,
    /// `b_j / a₀^{-(j+q)/ν}`, which lives in the coefficient field.
    pub normalized: Vec<T>,
    /// `b_j`, exact whenever `a₀^{-(j+q)/ν}` has a closed form.
    pub coeffs: Vec<Real>,
}

impl<T> InvertedSeries<T> {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn check_inversion_input<T: Scalar>(series: &ScalarSeries<T>, q: &Real) -> Result<()> {
    if series.nu.is_zero() {
        return Err(Error::InvalidInput("ν must be nonzero".into()));
    }
    if !q.is_positive() {
        return Err(Error::InvalidInput(format!("q must be positive, got {q}")));
    }
    if series.coeffs[0].to_f64() <= 0.0 || series.coeffs[0] == T::zero() {
        return Err(Error::Hypothesis(format!(
            "series reversion needs a₀ > 0, got {:?}",
            series.coeffs[0]
        )));
    }
    Ok(())
}

fn field_value<T: Scalar>(x: &Real, what: &str) -> Result<T> {
    T::from_real(x).ok_or_else(|| {
        Error::InvalidInput(format!(
            "{what} = {x} is not representable in exact arithmetic; use floating mode"
        ))
    })
}

/// Frame's reversion: `b_j = q/(j+q) a₀^{-(j+q)/ν} Σ_{r=1}^{j} binom(-(j+q)/ν, r) a₀^{-r} a_j^(r)`,
/// with `b₀ = a₀^{-q/ν}`.
pub fn invert<T: Scalar>(series: &ScalarSeries<T>, q: &Real) -> Result<InvertedSeries<T>> {
    check_inversion_input(series, q)?;
    let n = series.order();
    let a0 = series.coeffs[0].clone();
    let a0_inv = T::one() / a0.clone();
    let bells = BellTable::new(&series.coeffs[1..]);
    let a0_real = a0.to_real();
    let mut normalized = Vec::with_capacity(n + 1);
    let mut coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let jq = &Real::integer(j as i64) + q;
        let exponent = -(&jq / &series.nu);
        let beta = if j == 0 {
            T::one()
        } else {
            let e: T = field_value(&exponent, "-(j+q)/ν")?;
            let mut a0_pow = T::one();
            let sum = T::sum_all((1..=j).map(|r| {
                a0_pow = a0_pow.clone() * a0_inv.clone();
                gen_binomial(&e, r) * a0_pow.clone() * bells.get(j, r)
            }));
            let ratio: T = field_value(&(q / &jq), "q/(j+q)")?;
            ratio * sum
        };
        let scale = a0_real.pow(&exponent)?;
        coeffs.push(&scale * &beta.to_real());
        normalized.push(beta);
    }
    Ok(InvertedSeries {
        q: q.clone(),
        nu: series.nu.clone(),
        normalized,
        coeffs,
    })
}

/// Composes `ρ(u(ρ))` formally and returns the largest coefficient of
/// `ρ(u(ρ)) - ρ` through `ρ^{N+1}`. Exactly zero in rational mode.
///
/// Only `q = 1` is meaningful; fractional powers of a series need branch choices.
pub fn compose_check<T: Scalar>(series: &ScalarSeries<T>, inv: &InvertedSeries<T>) -> Result<Real> {
    if !(inv.q.approx_eq(&Real::one(), 0.0)) {
        return Err(Error::InvalidInput(
            "compose_check is defined for q = 1 only".into(),
        ));
    }
    if inv.order() != series.order() {
        return Err(Error::InvalidInput(format!(
            "truncation orders differ: series N = {}, inverse N = {}",
            series.order(),
            inv.order()
        )));
    }
    check_inversion_input(series, &inv.q)?;
    let n = series.order();
    let a0 = series.coeffs[0].clone();
    let unit: Vec<T> = series
        .coeffs
        .iter()
        .map(|a| a.clone() / a0.clone())
        .collect();
    let a0_real = a0.to_real();

    // ρ(u) = Σ b_j u^{j+1} with u = ρ a₀^{1/ν} Ã(ρ)^{1/ν}, Ã = A / a₀.
    let mut composed: Vec<Real> = vec![Real::zero(); n + 1];
    for j in 0..=n {
        let p = &Real::integer(j as i64 + 1) / &series.nu;
        let p_t: T = field_value(&p, "(j+1)/ν")?;
        let weight = &inv.coeffs[j] * &a0_real.pow(&p)?;
        let power = unit_series_power(&unit, &p_t, n - j);
        for (m, c) in power.into_iter().enumerate() {
            composed[j + m] = &composed[j + m] + &(&weight * &c.to_real());
        }
    }
    let mut worst = Real::zero();
    for (m, c) in composed.into_iter().enumerate() {
        let target = if m == 0 { Real::one() } else { Real::zero() };
        let diff = &c - &target;
        let mag = if diff.to_f64() < 0.0 { -diff } else { diff };
        if mag.to_f64() > worst.to_f64() || (worst.is_zero() && !mag.is_zero()) {
            worst = mag;
        }
    }
    Ok(worst)
}
