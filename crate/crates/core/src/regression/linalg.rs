//! Dense symmetric eigen-decomposition (cyclic Jacobi) for the normal equations.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Row-major square matrix.
pub(crate) struct Square {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }
}

/// Eigenvalues and column eigenvectors of a symmetric matrix.
pub(crate) fn symmetric_eigen(mut a: Square) -> (Vec<f64>, Square) {
    let n = a.n;
    let mut v = Square::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let norm: f64 = a.data.iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(i, j))
            .sum();
        if off <= 1e-30 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a.get(p, p), a.get(q, q));
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| a.get(i, i)).collect(), v)
}

/// Minimum-norm solution of `a·x = b` for symmetric positive semi-definite `a`,
/// dropping eigen-directions below `rel_tol · λ_max`.
pub(crate) fn psd_solve(a: Square, b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = a.n;
    let (values, vecs) = symmetric_eigen(a);
    let top = values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * top;
    let mut x = vec![0.0; n];
    for k in 0..n {
        if values[k] <= cutoff || values[k] <= 0.0 {
            continue;
        }
        let proj: f64 = (0..n).map(|i| vecs.get(i, k) * b[i]).sum::<f64>() / values[k];
        for i in 0..n {
            x[i] += proj * vecs.get(i, k);
        }
    }
    x
}
