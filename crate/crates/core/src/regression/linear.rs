use alloc::vec::Vec;

use super::linalg::{psd_solve, Square};
use super::Standardizer;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlrParams {
    /// Ridge penalty on the standardized weights; 0 is ordinary least squares.
    pub lambda: f64,
}

/// Least squares on standardized features. Rank-deficient systems get the
/// minimum-norm solution.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub standardizer: Standardizer,
    /// Weights in standardized space.
    pub weights: Vec<f64>,
    /// Intercept in standardized space (the training mean of y).
    pub intercept: f64,
}

impl LinearModel {
    pub fn fit(x: &[&[f64]], y: &[f64], params: MlrParams) -> Self {
        let standardizer = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.apply(r)).collect();
        let p = standardizer.mean.len();
        let y_mean = y.iter().sum::<f64>() / y.len() as f64;

        let mut gram = Square::zeros(p);
        let mut rhs = alloc::vec![0.0; p];
        for (row, &t) in z.iter().zip(y) {
            for i in 0..p {
                rhs[i] += row[i] * (t - y_mean);
                for j in i..p {
                    gram.data[i * p + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                gram.data[i * p + j] = gram.data[j * p + i];
            }
            gram.data[i * p + i] += params.lambda;
        }
        let weights = psd_solve(gram, &rhs, 1e-12);
        Self { standardizer, weights, intercept: y_mean }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.apply(row);
        self.intercept + z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Weights and intercept mapped back to raw feature units.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let w: Vec<f64> = self.weights.iter().zip(&self.standardizer.std).map(|(w, s)| w / s).collect();
        let b = self.intercept - w.iter().zip(&self.standardizer.mean).map(|(w, m)| w * m).sum::<f64>();
        (w, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_linear_data() {
        let x: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64 * 0.7 - 2.0, ((i * 7) % 5) as f64 + 0.1 * i as f64])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] - 3.0 * r[1] + 1.0).collect();
        let rows: Vec<&[f64]> = x.iter().map(|r| r.as_slice()).collect();
        let m = LinearModel::fit(&rows, &y, MlrParams { lambda: 0.0 });
        let (w, b) = m.raw_coefficients();
        assert!((w[0] - 2.0).abs() < 1e-9 && (w[1] + 3.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
        let rmse = (x.iter().zip(&y).map(|(r, t)| (m.predict(r) - t).powi(2)).sum::<f64>() / 10.0).sqrt();
        assert!(rmse < 1e-9);
    }

    #[test]
    fn zero_vector_maps_to_raw_intercept() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0 + i as f64, 3.0 - 0.5 * (i * i) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| 0.5 * r[0] + r[1] - 4.0).collect();
        let rows: Vec<&[f64]> = x.iter().map(|r| r.as_slice()).collect();
        let m = LinearModel::fit(&rows, &y, MlrParams { lambda: 0.0 });
        // f(0) = ȳ − Σ w_k m_k / s_k
        let expected = m.intercept
            - m.weights.iter().zip(&m.standardizer.mean).zip(&m.standardizer.std).map(|((w, mu), s)| w * mu / s).sum::<f64>();
        assert!((m.predict(&[0.0, 0.0]) - expected).abs() < 1e-12);
        assert!((expected + 4.0).abs() < 1e-9);
    }

    #[test]
    fn duplicated_column_splits_weight() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| 2.0 * i as f64).collect();
        let rows: Vec<&[f64]> = x.iter().map(|r| r.as_slice()).collect();
        let m = LinearModel::fit(&rows, &y, MlrParams { lambda: 0.0 });
        assert!((m.weights[0] - m.weights[1]).abs() < 1e-9);
        assert!((m.predict(&[3.0, 3.0]) - 6.0).abs() < 1e-9);
    }
}
