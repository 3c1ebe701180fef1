use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub srocc: f64,
    pub plcc: f64,
    pub rmse: f64,
}

/// Pearson linear correlation, no remapping applied.
pub fn plcc(x: &[f64], y: &[f64]) -> Result<f64> {
    math::pearson(x, y)
}

/// Spearman rank correlation with average ranks for ties.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<f64> {
    math::spearman(x, y)
}

pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::Empty("rmse input"));
    }
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(math::sqrt(sse / x.len() as f64))
}

pub fn metrics(predicted: &[f64], mos: &[f64]) -> Result<Metrics> {
    Ok(Metrics {
        srocc: srocc(predicted, mos)?,
        plcc: plcc(predicted, mos)?,
        rmse: rmse(predicted, mos)?,
    })
}

/// Join external predictions to MOS by video id and score them.
pub fn score_external(predictions: &BTreeMap<String, f64>, mos: &BTreeMap<String, f64>) -> Result<Metrics> {
    let missing_predictions: Vec<String> = mos.keys().filter(|k| !predictions.contains_key(*k)).cloned().collect();
    let missing_mos: Vec<String> = predictions.keys().filter(|k| !mos.contains_key(*k)).cloned().collect();
    if !missing_predictions.is_empty() || !missing_mos.is_empty() {
        return Err(Error::IdMismatch { missing_predictions, missing_mos });
    }
    let p: Vec<f64> = predictions.values().copied().collect();
    let m: Vec<f64> = mos.values().copied().collect();
    metrics(&p, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn perfect_linear() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let m = metrics(&x, &y).unwrap();
        assert!((m.plcc - 1.0).abs() < 1e-12 && (m.srocc - 1.0).abs() < 1e-12);
        let direct = (x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 10.0).sqrt();
        assert_eq!(m.rmse, direct);
    }

    #[test]
    fn cubic_is_rank_perfect_only() {
        let x: Vec<f64> = (-5..=5).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert!((srocc(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!(plcc(&x, &y).unwrap() < 1.0);
    }

    #[test]
    fn tied_ranks() {
        // ranks (1, 2.5, 2.5, 4) vs (1, 3, 2, 4): Sxy = 4.5, Sxx = 4.5, Syy = 5
        let expected = 4.5 / (4.5f64 * 5.0).sqrt();
        assert!((srocc(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_errors() {
        assert!(matches!(plcc(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance(_))));
        assert!(matches!(srocc(&[1.0, 2.0], &[3.0, 3.0]), Err(Error::ZeroVariance(_))));
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn external_join() {
        let mos: BTreeMap<String, f64> = [("a", 10.0), ("b", 30.0), ("c", 20.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let m = score_external(&mos, &mos).unwrap();
        assert!((m.srocc - 1.0).abs() < 1e-12 && (m.plcc - 1.0).abs() < 1e-12 && m.rmse == 0.0);
        let neg: BTreeMap<String, f64> = mos.iter().map(|(k, v)| (k.clone(), -v)).collect();
        assert!((score_external(&neg, &mos).unwrap().srocc + 1.0).abs() < 1e-12);
        let mut partial = mos.clone();
        partial.remove("b");
        partial.insert("z".into(), 1.0);
        match score_external(&partial, &mos) {
            Err(Error::IdMismatch { missing_predictions, missing_mos }) => {
                assert_eq!(missing_predictions, vec!["b".to_string()]);
                assert_eq!(missing_mos, vec!["z".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }
}
