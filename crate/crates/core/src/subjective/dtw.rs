//! Dynamic time warping with a Sakoe–Chiba band.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Band radius in samples. At 1 Hz this caps alignment shifts at 5 s.
pub const DEFAULT_BAND: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// Accumulated absolute-difference cost along the optimal path.
    pub total_cost: f64,
    /// `total_cost` divided by the sequence length. Unlike a per-path-cell
    /// average this never grows when the band widens.
    pub distance: f64,
    /// Cells `(waveform index, reference index)` from `(0, 0)` to the end.
    pub path: Vec<(usize, usize)>,
    /// The waveform on the reference time axis: each reference sample takes
    /// the mean of the waveform samples matched to it.
    pub warped: Vec<f64>,
}

/// Per-second means of a frame sequence; a trailing partial second is
/// averaged over the frames it has.
pub fn downsample(frames: &[f64], frames_per_second: usize) -> Vec<f64> {
    assert!(frames_per_second > 0);
    frames
        .chunks(frames_per_second)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

/// Aligns `waveform` to `reference` with cells restricted to `|i − j| ≤ band`.
///
/// Backtracking breaks ties by preferring the diagonal step, then the step
/// that advanced only the waveform, then the step that advanced only the
/// reference.
pub fn dtw_align(waveform: &[f64], reference: &[f64], band: usize) -> Result<Alignment> {
    let n = waveform.len();
    if n == 0 || reference.is_empty() {
        return Err(Error::Empty("dtw input"));
    }
    if reference.len() != n {
        return Err(Error::InvalidArgument(alloc::format!(
            "dtw needs equal lengths, got {} and {}",
            n,
            reference.len()
        )));
    }
    let inf = f64::INFINITY;
    let mut acc = vec![inf; n * n];
    let at = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        let lo = i.saturating_sub(band);
        let hi = (i + band).min(n - 1);
        for j in lo..=hi {
            let cost = (waveform[i] - reference[j]).abs();
            let best_prev = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 { acc[at(i - 1, j - 1)] } else { inf };
                let up = if i > 0 { acc[at(i - 1, j)] } else { inf };
                let left = if j > 0 { acc[at(i, j - 1)] } else { inf };
                diag.min(up).min(left)
            };
            acc[at(i, j)] = cost + best_prev;
        }
    }
    let total_cost = acc[at(n - 1, n - 1)];

    let mut path = vec![(n - 1, n - 1)];
    let (mut i, mut j) = (n - 1, n - 1);
    while (i, j) != (0, 0) {
        let diag = if i > 0 && j > 0 { acc[at(i - 1, j - 1)] } else { inf };
        let up = if i > 0 { acc[at(i - 1, j)] } else { inf };
        let left = if j > 0 { acc[at(i, j - 1)] } else { inf };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();

    let mut sums = vec![(0.0, 0usize); n];
    for &(i, j) in &path {
        sums[j].0 += waveform[i];
        sums[j].1 += 1;
    }
    let warped = sums.iter().map(|&(s, c)| s / c as f64).collect();
    Ok(Alignment { total_cost, distance: total_cost / n as f64, path, warped })
}
