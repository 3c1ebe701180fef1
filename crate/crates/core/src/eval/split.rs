use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::regression::Dataset;
use crate::rng::SeededRng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub test_sources: Vec<String>,
}

/// Whole sources are moved to the test side, in seeded random order, until
/// the test side holds at least `test_fraction` of the rows. At least one
/// source always stays in training.
pub fn content_split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in data.rows() {
        *counts.entry(r.source_id.as_str()).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "content split needs at least 2 distinct sources, got {}",
            counts.len()
        )));
    }
    let mut sources: Vec<&str> = counts.keys().copied().collect();
    SeededRng::new(seed).shuffle(&mut sources);
    let target = test_fraction * data.len() as f64;
    let mut test_set = BTreeSet::new();
    let mut test_rows = 0usize;
    for s in &sources[..sources.len() - 1] {
        if test_rows as f64 >= target {
            break;
        }
        test_set.insert(*s);
        test_rows += counts[s];
    }

    let mut split = Split { train: Vec::new(), test: Vec::new(), test_sources: Vec::new() };
    for (i, r) in data.rows().iter().enumerate() {
        if test_set.contains(r.source_id.as_str()) {
            split.test.push(i);
        } else {
            split.train.push(i);
        }
    }
    split.test_sources = test_set.iter().map(|s| String::from(*s)).collect();
    check_disjoint(data, &split)?;
    Ok(split)
}

pub fn check_disjoint(data: &Dataset, split: &Split) -> Result<()> {
    let train: BTreeSet<&str> = split.train.iter().map(|&i| data.rows()[i].source_id.as_str()).collect();
    for &i in &split.test {
        let s = data.rows()[i].source_id.as_str();
        if train.contains(s) {
            return Err(Error::SplitOverlap(s.into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::Sample;

    fn data(sizes: &[usize]) -> Dataset {
        let mut rows = Vec::new();
        for (s, &n) in sizes.iter().enumerate() {
            for v in 0..n {
                rows.push(Sample {
                    video_id: format!("s{s}_{v}"),
                    source_id: format!("s{s}"),
                    features: alloc::vec![v as f64],
                    mos: 50.0,
                });
            }
        }
        Dataset::new(alloc::vec!["x".into()], rows).unwrap()
    }

    #[test]
    fn two_sources_one_goes_to_test() {
        let d = data(&[5, 5]);
        for seed in 0..10 {
            let s = content_split(&d, 0.2, seed).unwrap();
            assert_eq!(s.test.len(), 5);
            assert_eq!(s.test_sources.len(), 1);
        }
    }

    #[test]
    fn partition_and_reproducible() {
        let d = data(&[3, 2, 4, 1, 3, 3, 2, 5, 1, 2]);
        let a = content_split(&d, 0.2, 42).unwrap();
        assert_eq!(a, content_split(&d, 0.2, 42).unwrap());
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..d.len()).collect::<Vec<_>>());
        assert!(a.test.len() as f64 >= 0.2 * d.len() as f64);
        check_disjoint(&d, &a).unwrap();
    }

    #[test]
    fn overlap_detected() {
        let d = data(&[2, 2]);
        let bad = Split { train: alloc::vec![0, 2], test: alloc::vec![1, 3], test_sources: Vec::new() };
        assert!(matches!(check_disjoint(&d, &bad), Err(Error::SplitOverlap(_))));
    }

    #[test]
    fn single_source_rejected() {
        assert!(content_split(&data(&[6]), 0.2, 0).is_err());
    }
}
