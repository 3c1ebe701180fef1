//! Four-parameter logistic `y = L + (U − L) / (1 + exp(−k (x − x0)))` fitted by
//! least squares with a Nelder–Mead simplex search.

use alloc::vec;
use alloc::vec::Vec;

use crate::{math, Error, Result};

const MAX_ITERATIONS: usize = 20_000;
const MAX_RESTARTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogisticFit {
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    pub slope: f64,
    /// Root-mean-squared residual.
    pub rmse: f64,
}

impl LogisticFit {
    pub fn eval(&self, x: f64) -> f64 {
        logistic([self.lower, self.upper, self.midpoint, self.slope], x)
    }
}

pub fn logistic(p: [f64; 4], x: f64) -> f64 {
    let [lower, upper, mid, slope] = p;
    lower + (upper - lower) / (1.0 + math::exp(-slope * (x - mid)))
}

fn rss(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let p = [p[0], p[1], p[2], p[3]];
    let s: f64 = x.iter().zip(y).map(|(&xi, &yi)| {
        let r = yi - logistic(p, xi);
        r * r
    }).sum();
    if s.is_nan() { f64::INFINITY } else { s }
}

struct Outcome {
    x: Vec<f64>,
    f: f64,
    converged: bool,
    iterations: usize,
}

/// Nelder–Mead with standard coefficients (1, 2, 0.5, 0.5).
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    steps: &[f64],
    max_iter: usize,
    ftol_abs: f64,
) -> Outcome {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut iterations = 0;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())))
            .fold(0.0, f64::max);
        let ftol = ftol_abs + 1e-13 * values[0].abs();
        if spread <= ftol && diameter <= 1e-10 {
            return Outcome { x: simplex.swap_remove(0), f: values[0], converged: true, iterations };
        }
        if iterations >= max_iter {
            return Outcome { x: simplex.swap_remove(0), f: values[0], converged: false, iterations };
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect()
        };
        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = along(0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(-0.5);
            let fc = f(&c);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
    }
}

/// Least-squares logistic fit from the start `L = min y`, `U = max y`,
/// `x0 = median x`, `k = ±1` (sign of the rank correlation of x and y).
///
/// The returned residual is never worse than the constant-mean fit.
pub fn fit_logistic(x: &[f64], y: &[f64]) -> Result<LogisticFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("x and y differ in length".into()));
    }
    if x.len() < 4 {
        return Err(Error::InvalidArgument("logistic fit needs at least 4 points".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input".into()));
    }
    let n = x.len() as f64;
    let sorted_y = math::sorted(y);
    let (y_min, y_max) = (sorted_y[0], sorted_y[sorted_y.len() - 1]);
    let x_mid = math::median(x).unwrap_or(0.0);
    let y_mean = math::mean(y).unwrap_or(0.0);
    let sst: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let finish = |p: &[f64], f: f64| LogisticFit {
        lower: p[0],
        upper: p[1],
        midpoint: p[2],
        slope: p[3],
        rmse: math::sqrt(f.max(0.0) / n),
    };
    if sst == 0.0 {
        return Ok(finish(&[y_min, y_max, x_mid, 1.0], 0.0));
    }
    let slope0 = match math::spearman(x, y) {
        Ok(r) if r < 0.0 => -1.0,
        _ => 1.0,
    };
    let sorted_x = math::sorted(x);
    let x_range = sorted_x[sorted_x.len() - 1] - sorted_x[0];
    let y_step = 0.1 * (y_max - y_min);
    let x_step = if x_range > 0.0 { 0.1 * x_range } else { 1.0 };
    let steps = [y_step, y_step, x_step, 0.5];
    let objective = |p: &[f64]| rss(p, x, y);
    let ftol_abs = 1e-24 * sst;

    let mut remaining = MAX_ITERATIONS;
    let run = |start: Vec<f64>, remaining: &mut usize| -> Outcome {
        let mut best = nelder_mead(&objective, &start, &steps, *remaining, ftol_abs);
        *remaining -= best.iterations;
        for _ in 0..MAX_RESTARTS {
            if *remaining == 0 {
                break;
            }
            let again = nelder_mead(&objective, &best.x, &steps, *remaining, ftol_abs);
            *remaining -= again.iterations;
            let improved = again.f < best.f - 1e-14 * best.f.abs() - ftol_abs;
            let converged = again.converged;
            if again.f <= best.f {
                best = again;
            }
            if !improved && converged {
                best.converged = true;
                break;
            }
        }
        best
    };
    let mut best = run(vec![y_min, y_max, x_mid, slope0], &mut remaining);
    if best.f > sst {
        let alt = run(vec![y_mean, y_mean, x_mid, slope0], &mut remaining);
        if alt.f <= best.f {
            best = alt;
        }
    }
    if !best.converged {
        return Err(Error::NotConverged {
            what: "logistic fit",
            iterations: MAX_ITERATIONS - remaining,
            best: best.x,
            objective: best.f,
        });
    }
    Ok(finish(&best.x, best.f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn recovers_generating_parameters() {
        let truth = [10.0, 90.0, 0.3, -12.0];
        let x = grid(50);
        let y: Vec<f64> = x.iter().map(|&v| logistic(truth, v)).collect();
        let fit = fit_logistic(&x, &y).unwrap();
        let got = [fit.lower, fit.upper, fit.midpoint, fit.slope];
        for (g, t) in got.iter().zip(truth) {
            assert!((g - t).abs() < 1e-3, "{got:?} vs {truth:?}");
        }
        assert!(fit.rmse < 1e-6);
    }

    #[test]
    fn constant_data() {
        let x = grid(10);
        let fit = fit_logistic(&x, &[42.0; 10]).unwrap();
        assert_eq!(fit.rmse, 0.0);
        assert!((fit.upper - fit.lower).abs() < 1e-12);
    }

    #[test]
    fn increasing_data_gets_positive_slope() {
        let x = grid(20);
        let y: Vec<f64> = x.iter().map(|v| v * v * 3.0 + v).collect();
        assert!(fit_logistic(&x, &y).unwrap().slope > 0.0);
    }

    #[test]
    fn needs_four_points() {
        assert!(fit_logistic(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(48))]
        #[test]
        fn never_worse_than_constant_mean(ys in proptest::collection::vec(0.0f64..100.0, 4..30)) {
            let x = grid(ys.len());
            if let Ok(fit) = fit_logistic(&x, &ys) {
                let sd = math::population_std(&ys).unwrap();
                proptest::prop_assert!(fit.rmse <= sd + 1e-9);
            }
        }
    }
}
