//! Medcouple and the skew-adjusted upper boxplot fence.

use alloc::vec::Vec;

use crate::{math, Error, Result};

/// Exponent weight `b` in `Q3 + 1.5·e^{b·MC}·IQR`.
pub const FENCE_SKEW_WEIGHT: f64 = 3.0;

/// Robust skewness in `[−1, 1]`, evaluated over all `O(n²)` pairs.
///
/// With `m` the median, every pair `x_i ≤ m ≤ x_j` contributes
/// `((x_j − m) − (m − x_i)) / (x_j − x_i)`. Pairs where both values equal `m`
/// use the sign kernel: with the `k` tied values indexed `0..k` on each side,
/// the pair `(p, q)` scores `sign(k − 1 − p − q)`.
pub fn medcouple(samples: &[f64]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument("medcouple needs at least 3 samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("medcouple input must be finite".into()));
    }
    let mut sorted = math::sorted(samples);
    let m = math::median_sorted(&sorted).unwrap_or(0.0);
    sorted.reverse();
    // descending: upper half ends with the tied block, lower half starts with it
    let upper: Vec<f64> = sorted.iter().copied().filter(|&x| x >= m).collect();
    let lower: Vec<f64> = sorted.iter().copied().filter(|&x| x <= m).collect();
    let ties = upper.iter().filter(|&&x| x == m).count();
    let first_tie = upper.len() - ties;

    let mut kernel = Vec::with_capacity(upper.len() * lower.len());
    for (p, &hi) in upper.iter().enumerate() {
        for (q, &lo) in lower.iter().enumerate() {
            let h = if hi == m && lo == m {
                let s = ties as isize - 1 - (p - first_tie) as isize - q as isize;
                s.signum() as f64
            } else {
                ((hi - m) - (m - lo)) / (hi - lo)
            };
            kernel.push(h);
        }
    }
    kernel.sort_by(f64::total_cmp);
    Ok(math::median_sorted(&kernel).unwrap_or(0.0))
}

/// First and third quartiles by linear interpolation at one-based positions
/// `0.25(n−1)+1` and `0.75(n−1)+1` of the sorted sample.
pub fn quartiles(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Empty("quartile input"));
    }
    let s = math::sorted(samples);
    Ok((
        math::quantile_sorted(&s, 0.25).unwrap_or(s[0]),
        math::quantile_sorted(&s, 0.75).unwrap_or(s[s.len() - 1]),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fence {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub mc: f64,
    /// Values strictly above this are outliers.
    pub fence: f64,
}

/// `Q3 + 1.5·e^{3·MC}·IQR`; collapses to `Q3` when the IQR is zero.
pub fn rejection_fence(samples: &[f64]) -> Result<Fence> {
    if samples.len() < 4 {
        return Err(Error::InvalidArgument("rejection fence needs at least 4 samples".into()));
    }
    let (q1, q3) = quartiles(samples)?;
    let iqr = q3 - q1;
    let mc = medcouple(samples)?;
    let fence = if iqr == 0.0 {
        q3
    } else {
        q3 + 1.5 * math::exp(FENCE_SKEW_WEIGHT * mc) * iqr
    };
    Ok(Fence { q1, q3, iqr, mc, fence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn symmetric_is_zero() {
        assert_eq!(medcouple(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 0.0);
        assert_eq!(medcouple(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap(), 0.0);
    }

    #[test]
    fn right_skewed_by_hand() {
        // m = 3; upper = [100, 4, 3], lower = [3, 2, 1], k = 1
        let h = |xj: f64, xi: f64| ((xj - 3.0) - (3.0 - xi)) / (xj - xi);
        let mut expected = vec![
            h(100.0, 3.0),
            h(100.0, 2.0),
            h(100.0, 1.0),
            h(4.0, 3.0),
            h(4.0, 2.0),
            h(4.0, 1.0),
            0.0, // tie (3, 3) with k = 1: sign(0)
            h(3.0, 2.0),
            h(3.0, 1.0),
        ];
        expected.sort_by(f64::total_cmp);
        assert_eq!(medcouple(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap(), expected[4]);
    }

    #[test]
    fn tied_block_kernel() {
        // all equal: k = n, kernel matrix is sign(k − 1 − p − q), antisymmetric → 0
        assert_eq!(medcouple(&[7.0; 6]).unwrap(), 0.0);
        assert_eq!(medcouple(&[7.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn needs_three() {
        assert!(medcouple(&[1.0, 2.0]).is_err());
        assert!(rejection_fence(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn fence_one_to_eight() {
        let s: Vec<f64> = (1..=8).map(f64::from).collect();
        let f = rejection_fence(&s).unwrap();
        assert_eq!((f.q1, f.q3, f.iqr, f.mc), (2.75, 6.25, 3.5, 0.0));
        assert_eq!(f.fence, 6.25 + 1.5 * 3.5);
    }

    #[test]
    fn degenerate_iqr() {
        let f = rejection_fence(&[2.0; 5]).unwrap();
        assert_eq!((f.iqr, f.fence), (0.0, 2.0));
    }

    proptest::proptest! {
        #[test]
        fn affine_equivariant(
            xs in proptest::collection::vec(-50i32..50, 3..20),
            a in 1i32..4,
            b in -20i32..20,
        ) {
            let x: Vec<f64> = xs.iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = xs.iter().map(|&v| (a * v + b) as f64).collect();
            let (mx, my) = (medcouple(&x).unwrap(), medcouple(&y).unwrap());
            proptest::prop_assert!((mx - my).abs() < 1e-12, "{} vs {}", mx, my);
        }

        #[test]
        fn bounded(xs in proptest::collection::vec(-1e3f64..1e3, 3..30)) {
            let mc = medcouple(&xs).unwrap();
            proptest::prop_assert!((-1.0..=1.0).contains(&mc));
        }
    }
}
