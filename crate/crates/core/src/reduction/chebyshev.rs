//! Chebyshev interpolation of self- and coupling-dynamics, returned in the
//! monomial basis the effective map is assembled from.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{horner, ClampMode, CouplingTerm, DynamicsModel};
use crate::error::{Error, Result};

/// Points per fitted coefficient on the residual grid.
const OVERSAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevFit {
    pub interval: (f64, f64),
    pub degree: usize,
    /// Monomial coefficients, `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<f64>,
    /// Max absolute error on the oversampled grid.
    pub residual: f64,
}

impl ChebyshevFit {
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }
}

/// Tensor-product fit of a coupling function `g(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    pub interval: (f64, f64),
    pub degrees: (usize, usize),
    /// `d[p - 1][q - 1]` multiplies `x_i^(p-1) x_j^(q-1)`.
    pub d: Vec<Vec<f64>>,
    /// `c[l - 1] = sum_{p+q-1=l} d_{p,q}`.
    pub collapsed: Vec<f64>,
    pub residual: f64,
}

impl CouplingFit {
    pub fn eval(&self, xi: f64, xj: f64) -> f64 {
        let rows: Vec<f64> = self.d.iter().map(|row| horner(row, xj)).collect();
        horner(&rows, xi)
    }

    /// Non-zero `d_{p,q}` as coupling terms.
    pub fn terms(&self) -> Vec<CouplingTerm> {
        let mut out = Vec::new();
        for (p, row) in self.d.iter().enumerate() {
            for (q, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    out.push(CouplingTerm::new(p + 1, q + 1, c));
                }
            }
        }
        out
    }
}

fn check_interval((a, b): (f64, f64)) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("fit interval [{a}, {b}] is empty or not finite")))
    }
}

/// First-kind Chebyshev nodes on `[-1, 1]` for a degree-`degree` interpolant.
fn nodes(degree: usize) -> Vec<f64> {
    let n = degree + 1;
    (0..n)
        .map(|k| (PI * (k as f64 + 0.5) / n as f64).cos())
        .collect()
}

fn to_interval((a, b): (f64, f64), t: f64) -> f64 {
    0.5 * (a + b) + 0.5 * (b - a) * t
}

/// `T_j(t)` for `j = 0..=degree`.
fn chebyshev_values(degree: usize, t: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(degree + 1);
    v.push(1.0);
    if degree >= 1 {
        v.push(t);
    }
    for j in 2..=degree {
        v.push(2.0 * t * v[j - 1] - v[j - 2]);
    }
    v
}

/// Row `j` holds the monomial coefficients (in `x`) of `T_j(t(x))` where `t`
/// maps `[a, b]` onto `[-1, 1]`.
fn monomial_basis(degree: usize, (a, b): (f64, f64)) -> Vec<Vec<f64>> {
    // T_j in powers of t
    let mut in_t: Vec<Vec<f64>> = vec![vec![1.0]];
    if degree >= 1 {
        in_t.push(vec![0.0, 1.0]);
    }
    for j in 2..=degree {
        let mut next = vec![0.0; j + 1];
        for (k, c) in in_t[j - 1].iter().enumerate() {
            next[k + 1] += 2.0 * c;
        }
        for (k, c) in in_t[j - 2].iter().enumerate() {
            next[k] -= c;
        }
        in_t.push(next);
    }
    let scale = 2.0 / (b - a);
    let shift = -(a + b) / (b - a);
    in_t.iter()
        .map(|poly| {
            // Horner in the polynomial ring: acc = acc * (scale x + shift) + c
            let mut acc: Vec<f64> = Vec::new();
            for &c in poly.iter().rev() {
                let mut next = vec![0.0; acc.len() + 1];
                for (k, v) in acc.iter().enumerate() {
                    next[k] += shift * v;
                    next[k + 1] += scale * v;
                }
                next[0] += c;
                acc = next;
            }
            acc.resize(degree + 1, 0.0);
            acc
        })
        .collect()
}

/// Chebyshev-basis coefficients from samples at the Chebyshev nodes.
fn chebyshev_coefficients(samples: &[f64], node_values: &[Vec<f64>]) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|j| {
            let s: f64 = samples.iter().zip(node_values).map(|(f, t)| f * t[j]).sum();
            let w = if j == 0 { 1.0 } else { 2.0 };
            w * s / n as f64
        })
        .collect()
}

fn sample<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample { at: x })
    }
}

fn grid((a, b): (f64, f64), points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| a + (b - a) * k as f64 / (points - 1) as f64)
}

/// Degree-`degree` Chebyshev interpolant of `f` on `interval`, in monomial form.
pub fn chebyshev_fit_1d<F: Fn(f64) -> f64>(f: F, interval: (f64, f64), degree: usize) -> Result<ChebyshevFit> {
    check_interval(interval)?;
    let ts = nodes(degree);
    let node_values: Vec<Vec<f64>> = ts.iter().map(|&t| chebyshev_values(degree, t)).collect();
    let samples = ts
        .iter()
        .map(|&t| sample(&f, to_interval(interval, t)))
        .collect::<Result<Vec<f64>>>()?;
    let cheb = chebyshev_coefficients(&samples, &node_values);
    let basis = monomial_basis(degree, interval);
    let mut coeffs = vec![0.0; degree + 1];
    for (c, row) in cheb.iter().zip(&basis) {
        for (acc, v) in coeffs.iter_mut().zip(row) {
            *acc += c * v;
        }
    }
    let mut residual: f64 = 0.0;
    for x in grid(interval, OVERSAMPLE * (degree + 1) + 1) {
        residual = residual.max((sample(&f, x)? - horner(&coeffs, x)).abs());
    }
    Ok(ChebyshevFit {
        interval,
        degree,
        coeffs,
        residual,
    })
}

/// Tensor-product Chebyshev interpolant of `g(x_i, x_j)` on `interval^2`,
/// with degree `degrees.0` in `x_i` and `degrees.1` in `x_j`.
pub fn chebyshev_fit_2d<G: Fn(f64, f64) -> f64>(
    g: G,
    interval: (f64, f64),
    degrees: (usize, usize),
) -> Result<CouplingFit> {
    check_interval(interval)?;
    let (dp, dq) = degrees;
    let (tp, tq) = (nodes(dp), nodes(dq));
    let vp: Vec<Vec<f64>> = tp.iter().map(|&t| chebyshev_values(dp, t)).collect();
    let vq: Vec<Vec<f64>> = tq.iter().map(|&t| chebyshev_values(dq, t)).collect();

    let mut samples = vec![vec![0.0; tq.len()]; tp.len()];
    for (a, &ti) in tp.iter().enumerate() {
        for (b, &tj) in tq.iter().enumerate() {
            let (xi, xj) = (to_interval(interval, ti), to_interval(interval, tj));
            let v = g(xi, xj);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { at: xi });
            }
            samples[a][b] = v;
        }
    }
    // coefficients along x_j for every x_i node, then along x_i
    let along_q: Vec<Vec<f64>> = samples.iter().map(|row| chebyshev_coefficients(row, &vq)).collect();
    let mut cheb = vec![vec![0.0; dq + 1]; dp + 1];
    for k in 0..=dq {
        let column: Vec<f64> = along_q.iter().map(|row| row[k]).collect();
        for (j, c) in chebyshev_coefficients(&column, &vp).into_iter().enumerate() {
            cheb[j][k] = c;
        }
    }
    let (bp, bq) = (monomial_basis(dp, interval), monomial_basis(dq, interval));
    let mut d = vec![vec![0.0; dq + 1]; dp + 1];
    for (j, row) in cheb.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for p in 0..=dp {
                for q in 0..=dq {
                    d[p][q] += c * bp[j][p] * bq[k][q];
                }
            }
        }
    }
    let mut collapsed = vec![0.0; dp + dq + 1];
    for (p, row) in d.iter().enumerate() {
        for (q, &c) in row.iter().enumerate() {
            collapsed[p + q] += c;
        }
    }
    let mut fit = CouplingFit {
        interval,
        degrees,
        d,
        collapsed,
        residual: 0.0,
    };
    let mut residual: f64 = 0.0;
    for xi in grid(interval, OVERSAMPLE * (dp + 1) + 1) {
        for xj in grid(interval, OVERSAMPLE * (dq + 1) + 1) {
            let v = g(xi, xj);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { at: xi });
            }
            residual = residual.max((v - fit.eval(xi, xj)).abs());
        }
    }
    fit.residual = residual;
    Ok(fit)
}

/// `[min(0, lo), max(1, hi)]` over the observed states.
pub fn default_fit_interval(states: &[f64]) -> (f64, f64) {
    let lo = states.iter().copied().fold(0.0, f64::min);
    let hi = states.iter().copied().fold(1.0, f64::max);
    (lo, hi)
}

/// Builds a polynomial [`DynamicsModel`] by fitting each node's self- and
/// coupling-dynamics on `interval`.
pub fn fit_dynamics<F, G>(
    n_nodes: usize,
    self_dynamics: F,
    coupling_dynamics: G,
    interval: (f64, f64),
    self_degree: usize,
    coupling_degrees: (usize, usize),
    clamp: ClampMode,
) -> Result<DynamicsModel>
where
    F: Fn(usize, f64) -> f64,
    G: Fn(usize, f64, f64) -> f64,
{
    let mut self_coeffs = Vec::with_capacity(n_nodes);
    let mut coupling = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        self_coeffs.push(chebyshev_fit_1d(|x| self_dynamics(i, x), interval, self_degree)?.coeffs);
        coupling.push(chebyshev_fit_2d(|a, b| coupling_dynamics(i, a, b), interval, coupling_degrees)?.terms());
    }
    DynamicsModel::new(self_coeffs, coupling, clamp)
}
