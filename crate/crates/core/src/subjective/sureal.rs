//! Subject-model maximum likelihood: every score is modeled as
//! `s_ij = ψ_j + Δ_i + v_i·X` with `X ~ N(0, 1)`.
//!
//! The log-likelihood `Σ −ln v_i − (s_ij − ψ_j − Δ_i)² / (2 v_i²)` is maximized by
//! cyclic coordinate Newton–Raphson sweeps (ψ, then Δ, then v). The model is
//! translation-degenerate in (ψ, Δ); after each sweep Δ is recentered to mean
//! zero and the shift moved into ψ, which leaves every residual unchanged.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::EndpointScores;
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurealOptions {
    /// Stop once no parameter moves by more than this in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Lower bound on every v_i; keeps the likelihood bounded for subjects
    /// whose residuals vanish.
    pub v_floor: f64,
}

impl Default for SurealOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_sweeps: 10_000, v_floor: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveredQuality {
    pub videos: Vec<String>,
    pub subjects: Vec<String>,
    /// True quality per video, aligned with `videos`.
    pub psi: Vec<f64>,
    /// Bias per subject, aligned with `subjects`; sums to zero.
    pub delta: Vec<f64>,
    /// Inconsistency per subject.
    pub v: Vec<f64>,
    pub loglik: f64,
    /// Log-likelihood after each sweep.
    pub history: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

struct Observation {
    subject: usize,
    video: usize,
    score: f64,
}

struct Problem {
    obs: Vec<Observation>,
    by_subject: Vec<Vec<usize>>,
    by_video: Vec<Vec<usize>>,
}

impl Problem {
    fn loglik(&self, psi: &[f64], delta: &[f64], v: &[f64]) -> f64 {
        self.obs
            .iter()
            .map(|o| {
                let r = o.score - psi[o.video] - delta[o.subject];
                let vi = v[o.subject];
                -math::ln(vi) - r * r / (2.0 * vi * vi)
            })
            .sum()
    }

    fn residual(&self, o: &Observation, psi: &[f64], delta: &[f64]) -> f64 {
        o.score - psi[o.video] - delta[o.subject]
    }
}

fn index_of(names: &[String], name: &str) -> usize {
    names.binary_search_by(|n| n.as_str().cmp(name)).unwrap_or_else(|_| unreachable!())
}

fn components(subjects: &[String], videos: &[String], obs: &[Observation]) -> Vec<Vec<String>> {
    // union-find over subjects (0..ns) and videos (ns..)
    let ns = subjects.len();
    let mut parent: Vec<usize> = (0..ns + videos.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for o in obs {
        let (a, b) = (find(&mut parent, o.subject), find(&mut parent, ns + o.video));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for node in 0..parent.len() {
        let root = find(&mut parent, node);
        let label = if node < ns {
            format!("subject:{}", subjects[node])
        } else {
            format!("video:{}", videos[node - ns])
        };
        groups.entry(root).or_default().push(label);
    }
    groups.into_values().collect()
}

/// Coordinate-wise maximizer step for one v_i: a Newton step on
/// `−n ln v − R / (2v²)`, falling back to the exact maximizer `√(R/n)` when the
/// step would not improve the objective.
fn update_v(v: f64, n: f64, rss: f64, floor: f64) -> f64 {
    let objective = |v: f64| -n * math::ln(v) - rss / (2.0 * v * v);
    if rss == 0.0 {
        return floor;
    }
    let grad = -n / v + rss / (v * v * v);
    let hess = n / (v * v) - 3.0 * rss / (v * v * v * v);
    let exact = math::sqrt(rss / n).max(floor);
    if hess < 0.0 {
        let stepped = (v - grad / hess).max(floor);
        if stepped.is_finite() && objective(stepped) >= objective(exact) {
            return stepped;
        }
    }
    exact
}

/// Recovers ψ, Δ and v from endpoint scores keyed by `(subject, video)`.
pub fn sureal_recover(scores: &EndpointScores, options: SurealOptions) -> Result<RecoveredQuality> {
    if scores.is_empty() {
        return Err(Error::Empty("score matrix"));
    }
    let mut subjects: Vec<String> = scores.keys().map(|(s, _)| s.clone()).collect();
    subjects.dedup();
    let mut videos: Vec<String> = scores.keys().map(|(_, v)| v.clone()).collect();
    videos.sort();
    videos.dedup();

    let obs: Vec<Observation> = scores
        .iter()
        .map(|((s, v), &score)| Observation {
            subject: index_of(&subjects, s),
            video: index_of(&videos, v),
            score,
        })
        .collect();
    let mut by_subject = vec![Vec::new(); subjects.len()];
    let mut by_video = vec![Vec::new(); videos.len()];
    for (k, o) in obs.iter().enumerate() {
        by_subject[o.subject].push(k);
        by_video[o.video].push(k);
    }
    if let Some(j) = by_video.iter().position(|r| r.len() < 2) {
        return Err(Error::InvalidArgument(format!(
            "video {} is rated by fewer than two subjects",
            videos[j]
        )));
    }
    if let Some(i) = by_subject.iter().position(|r| r.len() < 2) {
        return Err(Error::InvalidArgument(format!(
            "subject {} rated fewer than two videos",
            subjects[i]
        )));
    }
    let comps = components(&subjects, &videos, &obs);
    if comps.len() > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let problem = Problem { obs, by_subject, by_video };
    let floor = options.v_floor;

    let mut psi: Vec<f64> = problem
        .by_video
        .iter()
        .map(|rows| rows.iter().map(|&k| problem.obs[k].score).sum::<f64>() / rows.len() as f64)
        .collect();
    let mut delta = vec![0.0; subjects.len()];
    let mut v: Vec<f64> = problem
        .by_subject
        .iter()
        .map(|rows| {
            let rss: f64 = rows
                .iter()
                .map(|&k| {
                    let r = problem.residual(&problem.obs[k], &psi, &delta);
                    r * r
                })
                .sum();
            math::sqrt(rss / rows.len() as f64).max(floor)
        })
        .collect();

    let mut history = vec![problem.loglik(&psi, &delta, &v)];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < options.max_sweeps {
        sweeps += 1;
        let (psi_old, delta_old, v_old) = (psi.clone(), delta.clone(), v.clone());

        // ψ_j: the likelihood is quadratic in ψ_j, so one Newton step is exact.
        for (j, rows) in problem.by_video.iter().enumerate() {
            let (mut grad, mut curv) = (0.0, 0.0);
            for &k in rows {
                let o = &problem.obs[k];
                let w = 1.0 / (v[o.subject] * v[o.subject]);
                grad += w * problem.residual(o, &psi, &delta);
                curv += w;
            }
            psi[j] += grad / curv;
        }
        // Δ_i: same, with a single weight per subject.
        for (i, rows) in problem.by_subject.iter().enumerate() {
            let grad: f64 = rows.iter().map(|&k| problem.residual(&problem.obs[k], &psi, &delta)).sum();
            delta[i] += grad / rows.len() as f64;
        }
        for (i, rows) in problem.by_subject.iter().enumerate() {
            let rss: f64 = rows
                .iter()
                .map(|&k| {
                    let r = problem.residual(&problem.obs[k], &psi, &delta);
                    r * r
                })
                .sum();
            v[i] = update_v(v[i], rows.len() as f64, rss, floor);
        }
        let shift = delta.iter().sum::<f64>() / delta.len() as f64;
        delta.iter_mut().for_each(|d| *d -= shift);
        psi.iter_mut().for_each(|p| *p += shift);

        history.push(problem.loglik(&psi, &delta, &v));
        let moved = psi
            .iter()
            .zip(&psi_old)
            .chain(delta.iter().zip(&delta_old))
            .chain(v.iter().zip(&v_old))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if moved < options.tolerance {
            converged = true;
            break;
        }
    }
    let loglik = *history.last().unwrap_or(&f64::NEG_INFINITY);
    Ok(RecoveredQuality { videos, subjects, psi, delta, v, loglik, history, sweeps, converged })
}

impl RecoveredQuality {
    /// Gradient of the log-likelihood: `(∂/∂ψ, ∂/∂Δ projected onto ΣΔ = 0,
    /// ∂/∂v)`. Entries for v at `v_floor` are zeroed when the gradient points
    /// below the floor.
    pub fn gradient(&self, scores: &EndpointScores, v_floor: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut g_psi = vec![0.0; self.psi.len()];
        let mut g_delta = vec![0.0; self.delta.len()];
        let mut g_v = vec![0.0; self.v.len()];
        for ((s, vid), &score) in scores {
            let i = index_of(&self.subjects, s);
            let j = index_of(&self.videos, vid);
            let vi = self.v[i];
            let r = score - self.psi[j] - self.delta[i];
            g_psi[j] += r / (vi * vi);
            g_delta[i] += r / (vi * vi);
            g_v[i] += -1.0 / vi + r * r / (vi * vi * vi);
        }
        let mean = g_delta.iter().sum::<f64>() / g_delta.len() as f64;
        g_delta.iter_mut().for_each(|g| *g -= mean);
        for (g, &vi) in g_v.iter_mut().zip(&self.v) {
            if vi <= v_floor && *g < 0.0 {
                *g = 0.0;
            }
        }
        (g_psi, g_delta, g_v)
    }

    /// Least-squares affine map of ψ onto each video's raw mean score, applied
    /// to ψ. Returns per-video MOS aligned with `videos`.
    pub fn rescaled_to_raw_means(&self, scores: &EndpointScores) -> Vec<f64> {
        let mut sums = vec![(0.0, 0usize); self.videos.len()];
        for ((_, vid), &score) in scores {
            if let Ok(j) = self.videos.binary_search(vid) {
                sums[j].0 += score;
                sums[j].1 += 1;
            }
        }
        let raw: Vec<f64> = sums.iter().map(|&(s, n)| if n > 0 { s / n as f64 } else { 0.0 }).collect();
        let mp = math::mean(&self.psi).unwrap_or(0.0);
        let mr = math::mean(&raw).unwrap_or(0.0);
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (p, r) in self.psi.iter().zip(&raw) {
            sxy += (p - mp) * (r - mr);
            sxx += (p - mp) * (p - mp);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 1.0 };
        let intercept = mr - slope * mp;
        self.psi.iter().map(|p| intercept + slope * p).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn scores(entries: &[(&str, &str, f64)]) -> EndpointScores {
        entries.iter().map(|&(s, v, x)| ((s.into(), v.into()), x)).collect()
    }

    #[test]
    fn zero_residual_case() {
        let mut e = Vec::new();
        for s in ["s1", "s2", "s3"] {
            e.push((s, "A", 80.0));
            e.push((s, "B", 40.0));
        }
        let q = sureal_recover(&scores(&e), SurealOptions::default()).unwrap();
        assert_eq!(q.videos, ["A", "B"]);
        assert!((q.psi[0] - 80.0).abs() < 1e-9 && (q.psi[1] - 40.0).abs() < 1e-9);
        assert!(q.delta.iter().all(|d| d.abs() < 1e-9));
        assert!(q.v.iter().all(|&v| v == 1e-4));
        assert!(q.converged);
    }

    #[test]
    fn constant_offset_subject() {
        let quality = [20.0, 35.0, 50.0, 65.0, 80.0];
        let mut m = EndpointScores::new();
        for s in 0..10 {
            for (j, q) in quality.iter().enumerate() {
                let offset = if s == 0 { 10.0 } else { 0.0 };
                m.insert((format!("s{s:02}"), format!("v{j}")), q + offset);
            }
        }
        let q = sureal_recover(&m, SurealOptions::default()).unwrap();
        // closed form under ΣΔ = 0: the offset subject sits 10 above the rest
        let others = &q.delta[1..];
        assert!((q.delta[0] - 9.0).abs() < 1e-6, "{:?}", q.delta);
        assert!(others.iter().all(|d| (d + 1.0).abs() < 1e-6));
        assert!((q.delta[0] - others[0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn disconnected_graph_is_reported() {
        let m = scores(&[
            ("a", "v1", 10.0),
            ("a", "v2", 20.0),
            ("b", "v1", 12.0),
            ("b", "v2", 25.0),
            ("c", "v3", 50.0),
            ("c", "v4", 60.0),
            ("d", "v3", 55.0),
            ("d", "v4", 70.0),
        ]);
        match sureal_recover(&m, SurealOptions::default()) {
            Err(Error::Disconnected { components }) => {
                assert_eq!(components.len(), 2);
                assert!(components[0].contains(&"subject:a".into()));
                assert!(components[1].contains(&"video:v4".into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn under_rated_video_rejected() {
        let m = scores(&[("a", "v1", 10.0), ("a", "v2", 20.0), ("b", "v1", 12.0)]);
        assert!(matches!(sureal_recover(&m, SurealOptions::default()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn noisy_recovery_is_monotone_and_stationary() {
        let mut rng = SeededRng::new(11);
        let mut m = EndpointScores::new();
        let psi: Vec<f64> = (0..12).map(|_| 20.0 + 60.0 * rng.unit()).collect();
        for s in 0..30 {
            let bias = 10.0 * (rng.unit() - 0.5);
            let noise = 2.0 + 4.0 * rng.unit();
            for (j, p) in psi.iter().enumerate() {
                m.insert((format!("s{s:02}"), format!("v{j:02}")), p + bias + noise * rng.normal());
            }
        }
        let q = sureal_recover(&m, SurealOptions::default()).unwrap();
        assert!(q.converged);
        assert!(q.v.iter().all(|&v| v > 1.0), "{:?}", q.v);
        for w in q.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs(), "{} then {}", w[0], w[1]);
        }
        let (a, b, c) = q.gradient(&m, 1e-4);
        let norm = a.iter().chain(&b).chain(&c).map(|g| g * g).sum::<f64>();
        assert!(math::sqrt(norm) < 1e-6, "gradient norm {}", math::sqrt(norm));
        assert!(q.delta.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn noise_free_ordering_is_exact() {
        let mut m = EndpointScores::new();
        for s in 0..6 {
            for j in 0..8 {
                m.insert((format!("s{s}"), format!("v{j}")), 10.0 * j as f64 + 3.0 * s as f64);
            }
        }
        let q = sureal_recover(&m, SurealOptions::default()).unwrap();
        let truth: Vec<f64> = (0..8).map(|j| j as f64).collect();
        assert_eq!(math::spearman(&q.psi, &truth).unwrap(), 1.0);
    }
}
