//! Small dense linear algebra: symmetric eigendecomposition and exact congruence.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::number::{Rational, Scalar};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.len();
    let c = m.first().map_or(0, Vec::len);
    (0..c).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn matmul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| T::sum_all((0..inner).map(|k| row[k].clone() * b[k][j].clone())))
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting (by magnitude in floating mode).
pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.len();
    let mut a: Matrix<T> = m.clone();
    let mut inv = identity::<T>(n);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| a[r][col] != T::zero())
            .max_by(|&r, &s| {
                a[r][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&a[s][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col] == T::zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
                inv[r][j] = inv[r][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by Gaussian elimination.
pub fn determinant<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.len();
    let mut a = m.clone();
    let mut det = T::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| a[r][col] != T::zero()) else {
            return T::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = T::zero() - det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            let factor = a[r][col].clone() / p.clone();
            for j in col..n {
                a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
            }
        }
    }
    det
}

fn frobenius(m: &Matrix<f64>) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvalues (descending) and matching unit eigenvectors of a symmetric matrix.
///
/// Cyclic Jacobi rotations until the off-diagonal norm drops below `1e-14 ‖H‖`
/// or 50 sweeps have run. Each eigenvector is signed so that its first
/// nonzero component is positive.
pub fn jacobi_eigen(h: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let n = h.len();
    let mut a = h.clone();
    let mut v = identity::<f64>(n);
    let threshold = 1e-14 * frobenius(h);
    for _ in 0..50 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = (0..n).map(|k| v[k][i]).collect();
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-14) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            col
        })
        .collect();
    (values, vectors)
}

/// `H = Qᵀ D Q` with `Q` orthogonal, and the normalizing map `P = √D Q`.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub hessian: Matrix<f64>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Rows are eigenvectors.
    pub q: Matrix<f64>,
    pub p: Matrix<f64>,
    pub det: f64,
}

impl SpectralDecomp {
    /// Fails with a degeneracy error unless `λ_min > 1e-10 λ_max`.
    pub fn new(hessian: &Matrix<f64>) -> Result<SpectralDecomp> {
        let n = hessian.len();
        if n == 0 || hessian.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("Hessian must be square".into()));
        }
        let (eigenvalues, q) = jacobi_eigen(hessian);
        let max = eigenvalues[0];
        let min = eigenvalues[n - 1];
        if !(max > 0.0) || !(min > 1e-10 * max) {
            return Err(Error::Degenerate(format!(
                "Hessian eigenvalues {eigenvalues:?} are not all positive"
            )));
        }
        let p = q
            .iter()
            .zip(&eigenvalues)
            .map(|(row, lam)| row.iter().map(|x| lam.sqrt() * x).collect())
            .collect();
        let det = eigenvalues.iter().product();
        Ok(SpectralDecomp {
            hessian: hessian.clone(),
            eigenvalues,
            q,
            p,
            det,
        })
    }

    /// `P⁻¹ = Qᵀ D^{-1/2}`, the map with `x = P⁻¹ y`.
    pub fn p_inverse(&self) -> Matrix<f64> {
        let n = self.q.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.q[j][i] / self.eigenvalues[j].sqrt())
                    .collect()
            })
            .collect()
    }
}

/// Exact congruence `H = L D Lᵀ` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct Ldl {
    pub l: Matrix<Rational>,
    pub diag: Vec<Rational>,
}

impl Ldl {
    /// Fails with a degeneracy error if any pivot is not positive.
    pub fn new(h: &Matrix<Rational>) -> Result<Ldl> {
        let n = h.len();
        let mut l = identity::<Rational>(n);
        let mut diag = vec![Rational::zero(); n];
        for j in 0..n {
            let mut dj = h[j][j].clone();
            for k in 0..j {
                dj -= &l[j][k] * &l[j][k] * &diag[k];
            }
            if !dj.is_positive() {
                return Err(Error::Degenerate(format!(
                    "Hessian is not positive definite (pivot {j} is {dj})"
                )));
            }
            for i in j + 1..n {
                let mut s = h[i][j].clone();
                for k in 0..j {
                    s -= &l[i][k] * &l[j][k] * &diag[k];
                }
                l[i][j] = s / &dj;
            }
            diag[j] = dj;
        }
        Ok(Ldl { l, diag })
    }

    pub fn det(&self) -> Rational {
        self.diag.iter().fold(Rational::one(), |acc, d| acc * d)
    }

    /// `L⁻ᵀ`, the map with `x = L⁻ᵀ z`, under which `xᵀ H x = Σ D_i z_i²`.
    pub fn substitution(&self) -> Matrix<Rational> {
        transpose(&inverse(&self.l).expect("unit triangular"))
    }
}
