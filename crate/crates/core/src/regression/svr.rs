//! ε-insensitive support vector regression with an RBF kernel, trained by
//! sequential minimal optimization with second-order working-set selection.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::Standardizer;
use crate::{math, Error, Result};

/// Stopping tolerance on the maximal KKT violation.
pub const KKT_TOLERANCE: f64 = 1e-3;
/// Update budget, in passes over the training rows.
pub const MAX_PASSES: usize = 10_000;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Gamma {
    /// 1 / number of features.
    InverseFeatures,
    Value(f64),
}

impl Gamma {
    pub fn resolve(self, arity: usize) -> f64 {
        match self {
            Gamma::InverseFeatures => 1.0 / arity.max(1) as f64,
            Gamma::Value(g) => g,
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::InverseFeatures => f.write_str("1/p"),
            Gamma::Value(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub gamma: Gamma,
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    math::exp(-gamma * d2)
}

/// Dual solution over the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrSolution {
    pub alpha: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve the dual on already-transformed rows.
pub fn solve(x: &[Vec<f64>], y: &[f64], c: f64, epsilon: f64, gamma: f64) -> SvrSolution {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = rbf(&x[i], &x[j], gamma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let m = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let kern = |s: usize, t: usize| k[(s % n) * n + (t % n)];
    // signed Q_st = y_s y_t K
    let q = |s: usize, t: usize| sign(s) * sign(t) * kern(s, t);

    let mut beta = vec![0.0; m];
    let mut grad: Vec<f64> = (0..m).map(|t| if t < n { epsilon - y[t] } else { epsilon + y[t - n] }).collect();
    let at_upper = |b: f64| b >= c;
    let at_lower = |b: f64| b <= 0.0;

    let budget = MAX_PASSES.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget {
        // i: maximal violator
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..m {
            if sign(t) > 0.0 {
                if !at_upper(beta[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i = t;
                }
            } else if !at_lower(beta[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i = t;
            }
        }
        // j: largest second-order decrease
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut obj_min = f64::INFINITY;
        if i != usize::MAX {
            let qii = q(i, i);
            for t in 0..m {
                let yi_qit = sign(i) * q(i, t);
                if sign(t) > 0.0 {
                    if !at_lower(beta[t]) {
                        let diff = gmax + grad[t];
                        if grad[t] >= gmax2 {
                            gmax2 = grad[t];
                        }
                        if diff > 0.0 {
                            let quad = qii + q(t, t) - 2.0 * yi_qit;
                            let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                            if obj <= obj_min {
                                obj_min = obj;
                                j = t;
                            }
                        }
                    }
                } else if !at_upper(beta[t]) {
                    let diff = gmax - grad[t];
                    if -grad[t] >= gmax2 {
                        gmax2 = -grad[t];
                    }
                    if diff > 0.0 {
                        let quad = qii + q(t, t) + 2.0 * yi_qit;
                        let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                        if obj <= obj_min {
                            obj_min = obj;
                            j = t;
                        }
                    }
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax + gmax2 < KKT_TOLERANCE {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (beta[i], beta[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let quad = { let v = q(i, i) + q(j, j) + 2.0 * qij; if v > 0.0 { v } else { TAU } };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = beta[i] - beta[j];
            beta[i] += delta;
            beta[j] += delta;
            if diff > 0.0 {
                if beta[j] < 0.0 {
                    beta[j] = 0.0;
                    beta[i] = diff;
                }
                if beta[i] > c {
                    beta[i] = c;
                    beta[j] = c - diff;
                }
            } else {
                if beta[i] < 0.0 {
                    beta[i] = 0.0;
                    beta[j] = -diff;
                }
                if beta[j] > c {
                    beta[j] = c;
                    beta[i] = c + diff;
                }
            }
        } else {
            let quad = { let v = q(i, i) + q(j, j) - 2.0 * qij; if v > 0.0 { v } else { TAU } };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = beta[i] + beta[j];
            beta[i] -= delta;
            beta[j] += delta;
            if sum > c {
                if beta[i] > c {
                    beta[i] = c;
                    beta[j] = sum - c;
                }
                if beta[j] > c {
                    beta[j] = c;
                    beta[i] = sum - c;
                }
            } else {
                if beta[j] < 0.0 {
                    beta[j] = 0.0;
                    beta[i] = sum;
                }
                if beta[i] < 0.0 {
                    beta[i] = 0.0;
                    beta[j] = sum;
                }
            }
        }
        let (di, dj) = (beta[i] - old_i, beta[j] - old_j);
        for t in 0..m {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // rho from free variables, else the midpoint of the feasible interval
    let (mut ub, mut lb, mut sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..m {
        let yg = sign(t) * grad[t];
        if at_upper(beta[t]) {
            if sign(t) < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if at_lower(beta[t]) {
            if sign(t) > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };

    SvrSolution {
        alpha: beta[..n].to_vec(),
        alpha_star: beta[n..].to_vec(),
        bias: -rho,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvrModel {
    pub standardizer: Standardizer,
    pub gamma: f64,
    /// Standardized support rows.
    pub support: Vec<Vec<f64>>,
    /// α − α* per support row.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SvrModel {
    pub fn fit(x: &[&[f64]], y: &[f64], params: SvrParams) -> Result<Self> {
        if !(params.c > 0.0) || !(params.epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "SVR needs C > 0 and epsilon >= 0, got C={} epsilon={}",
                params.c, params.epsilon
            )));
        }
        let standardizer = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.apply(r)).collect();
        let gamma = params.gamma.resolve(standardizer.mean.len());
        if !(gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("SVR gamma must be positive, got {gamma}")));
        }
        let sol = solve(&z, y, params.c, params.epsilon, gamma);
        let mut support = Vec::new();
        let mut coef = Vec::new();
        for (row, (a, b)) in z.into_iter().zip(sol.alpha.iter().zip(&sol.alpha_star)) {
            if a - b != 0.0 {
                support.push(row);
                coef.push(a - b);
            }
        }
        Ok(Self {
            standardizer,
            gamma,
            support,
            coef,
            bias: sol.bias,
            iterations: sol.iterations,
            converged: sol.converged,
        })
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.apply(row);
        self.bias + self.support.iter().zip(&self.coef).map(|(s, c)| c * rbf(&z, s, self.gamma)).sum::<f64>()
    }
}
