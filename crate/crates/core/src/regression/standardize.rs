use alloc::vec::Vec;

use crate::math;

/// Per-feature centering and scaling from training rows. Features with zero
/// spread keep a scale of 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Self {
        let p = rows.first().map_or(0, |r| r.len());
        let n = rows.len() as f64;
        let mut mean = alloc::vec![0.0; p];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r.iter()) {
                *m += x / n;
            }
        }
        let mut std = alloc::vec![0.0; p];
        for r in rows {
            for ((s, x), m) in std.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (x - m) * (x - m) / n;
            }
        }
        for s in &mut std {
            *s = math::sqrt(*s);
            if !(*s > 0.0) {
                *s = 1.0;
            }
        }
        Self { mean, std }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.mean).zip(&self.std).map(|((x, m), s)| (x - m) / s).collect()
    }
}
