use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::EffectiveSystem;
use crate::dynamics::{horner, SteadyStateRecord};
use crate::error::{Error, Result};

/// Residual tolerance a reported fixed point must meet.
pub const ROOT_TOL: f64 = 1e-10;
/// Companion eigenvalues with a smaller imaginary part are treated as real.
pub const IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub x: f64,
    /// Slope of the map at `x`.
    pub multiplier: f64,
    /// `|multiplier| < 1`.
    pub stable: bool,
}

/// Real fixed points of the effective map, in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub roots: Vec<FixedPoint>,
}

impl FixedPointReport {
    pub fn stable(&self) -> impl Iterator<Item = &FixedPoint> {
        self.roots.iter().filter(|r| r.stable)
    }
}

/// Fixed points of `x -> sum_k d[k] x^k` (power-indexed `d`), i.e. the real
/// roots of `R(x) = sum_k d[k] x^k - x`.
pub fn fixed_points_of(d: &[f64]) -> Result<FixedPointReport> {
    let mut residual = d.to_vec();
    if residual.len() < 2 {
        residual.resize(2, 0.0);
    }
    residual[1] -= 1.0;
    let scale = residual.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::DegeneratePolynomial);
    }
    while residual.last().is_some_and(|v| v.abs() <= 1e-15 * scale) {
        residual.pop();
    }

    let mut xs = real_roots(&residual);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    let sys = EffectiveSystem::from_parameters(d.to_vec());
    let roots = xs
        .into_iter()
        .map(|x| {
            // drops the sign of a negative zero
            let x = x + 0.0;
            let multiplier = sys.slope(x);
            FixedPoint {
                x,
                multiplier,
                stable: multiplier.abs() < 1.0,
            }
        })
        .collect();
    Ok(FixedPointReport { roots })
}

pub fn fixed_points(sys: &EffectiveSystem) -> Result<FixedPointReport> {
    fixed_points_of(&sys.d)
}

/// Real roots of `sum_k c[k] x^k` with a non-zero leading coefficient.
fn real_roots(c: &[f64]) -> Vec<f64> {
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        3 => {
            let (a, b, k) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * k;
            if disc < 0.0 {
                let imag = (-disc).sqrt() / (2.0 * a.abs());
                if imag < IMAG_TOL {
                    vec![-b / (2.0 * a)]
                } else {
                    Vec::new()
                }
            } else {
                // avoids cancellation between -b and sqrt(disc)
                let q = -0.5 * (b + b.signum_or_one() * disc.sqrt());
                if q == 0.0 {
                    vec![0.0, 0.0]
                } else {
                    vec![q / a, k / q]
                }
            }
        }
        _ => companion_roots(c),
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

fn companion_roots(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
    comp.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < IMAG_TOL * z.re.abs().max(1.0))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..50 {
                let (f, df) = (horner(c, x), horner(&deriv, x));
                if df == 0.0 || f == 0.0 {
                    break;
                }
                let next = x - f / df;
                if !next.is_finite() {
                    break;
                }
                let done = (next - x).abs() <= 1e-16 * x.abs().max(1.0);
                x = next;
                if done {
                    break;
                }
            }
            x
        })
        .collect()
}

/// Distance from a simulated point to the manifold, and the branch used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseError {
    pub err: f64,
    pub root: f64,
    pub root_stable: bool,
}

/// Vertical distance from `x_eff` to the closest stable fixed point, or to
/// the closest fixed point of any kind when none is stable.
pub fn project_onto_manifold(x_eff: f64, report: &FixedPointReport) -> Result<CollapseError> {
    let pick = |it: &mut dyn Iterator<Item = &FixedPoint>| {
        it.min_by(|a, b| (a.x - x_eff).abs().total_cmp(&(b.x - x_eff).abs()))
            .copied()
    };
    let root = pick(&mut report.stable())
        .or_else(|| pick(&mut report.roots.iter()))
        .ok_or(Error::NoManifoldSolution)?;
    Ok(CollapseError {
        err: (x_eff - root.x).abs(),
        root: root.x,
        root_stable: root.stable,
    })
}

/// `err = |x_eff - x_eff(d_1..d_S)|` for a simulated steady state.
pub fn collapse_error(record: &SteadyStateRecord, sys: &EffectiveSystem) -> Result<CollapseError> {
    project_onto_manifold(record.x_eff, &fixed_points(sys)?)
}
