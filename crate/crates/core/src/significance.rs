//! Selection of significant points in the dimension-2 persistence diagram.
//!
//! Finite positive-persistence pairs are projected to their distance from
//! the diagonal and partitioned into two clusters by the exact 1D
//! two-cluster split of their logarithms: sort, try every boundary between
//! distinct values, keep the split with the smallest within-cluster sum of
//! squares. The higher cluster is significant. This is the deterministic
//! closed form of 2-means in one dimension.
//!
//! The split runs in log scale because component features live at
//! different absolute scales: a thin tube and a large cavity are both real
//! surfaces, and on raw values the cheapest split isolates the single
//! largest persistence instead of separating features from sampling noise.
//! Ratios, not differences, are what distinguish the two.

use crate::persistence::PersistenceDiagram;
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignificanceError {
    #[error("no finite positive-persistence pairs in the requested dimension")]
    EmptyDiagram,
}

/// Result of the two-cluster split. Ids index the value list handed to
/// `split_significant` (for `classify_2pd`, they index `pd.pairs`).
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceSplit<S> {
    pub significant: Vec<u32>,
    pub noise: Vec<u32>,
    /// A persistence value strictly between the clusters (0 when everything
    /// is significant).
    pub threshold: S,
    /// True when max/min persistence < 2: the clusters are close enough
    /// that the significance call is questionable.
    pub ambiguous: bool,
}

/// Distances of finite `dim`-pairs from the diagonal, `(d - b) / sqrt(2)`,
/// in pair order. Errors unless at least one such pair has positive
/// persistence.
pub fn project_persistence<S: Real>(
    pd: &PersistenceDiagram<S>,
    dim: u8,
) -> Result<Vec<(u32, S)>, SignificanceError> {
    let mut out = Vec::new();
    let mut any_positive = false;
    for (i, p) in pd.pairs.iter().enumerate() {
        if p.dim != dim {
            continue;
        }
        if let Some(death) = p.death {
            let proj = (death - p.birth) / S::cast(2.0).sqrt();
            any_positive |= proj > S::zero();
            out.push((i as u32, proj));
        }
    }
    if !any_positive {
        return Err(SignificanceError::EmptyDiagram);
    }
    Ok(out)
}

/// Resolution limit of the split: values this far below the maximum are
/// binned as noise before clustering. Pocket artifacts of sampling and
/// roundoff spread their persistences over many decades, and with that
/// whole tail on the log axis the cheapest two-cluster boundary falls
/// inside the noise instead of at the feature gap. A real component this
/// much smaller than the dominant one is below what the split can
/// distinguish from such artifacts.
const REL_FLOOR: f64 = 1e-3;

/// Exact two-cluster split of positive persistence values, computed on
/// their logarithms. Single values and all-equal inputs come back entirely
/// significant. Ties in the split cost resolve toward fewer significant
/// values.
pub fn split_significant<S: Real>(values: &[S]) -> SignificanceSplit<S> {
    assert!(!values.is_empty(), "split_significant needs at least one value");
    let m = values.len();
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.sort_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .expect("finite persistences")
            .then(a.cmp(&b))
    });
    let sorted: Vec<f64> = order.iter().map(|&i| values[i as usize].to_f64_exact()).collect();
    assert!(sorted[0] > 0.0, "persistence values must be positive");

    // lo = values consigned to noise by the relative floor. The maximum
    // itself always survives, so candidates are never empty.
    let floor = sorted[m - 1] * REL_FLOOR;
    let lo = sorted.partition_point(|&v| v < floor);

    // Comparable-persistence warning, judged among the clustered values
    // only; floored artifacts say nothing about how close the real
    // contenders are.
    let ratio_ambiguous = sorted[m - 1] < 2.0 * sorted[lo];
    let logs: Vec<f64> = sorted[lo..].iter().map(|&v| v.ln()).collect();
    let n = logs.len();

    let mut pre_s = vec![0.0f64; n + 1];
    let mut pre_q = vec![0.0f64; n + 1];
    for (i, &v) in logs.iter().enumerate() {
        pre_s[i + 1] = pre_s[i] + v;
        pre_q[i + 1] = pre_q[i] + v * v;
    }
    let sse = |a: usize, b: usize| -> f64 {
        // Sum of squared deviations of logs[a..b] from its mean.
        let len = (b - a) as f64;
        let s = pre_s[b] - pre_s[a];
        let q = pre_q[b] - pre_q[a];
        q - s * s / len
    };

    // k = size of the low candidate cluster; only boundaries between
    // strictly different values are real two-cluster partitions.
    let mut best: Option<(f64, usize)> = None;
    for k in 1..n {
        if logs[k - 1] == logs[k] {
            continue;
        }
        let cost = sse(0, k) + sse(k, n);
        // <= : on equal cost the later boundary wins, which marks fewer
        // values significant.
        if best.is_none_or(|(bc, _)| cost <= bc) {
            best = Some((cost, k));
        }
    }

    // Geometric midpoint of the boundary values: strictly between them and
    // meaningful on the ratio scale the split was computed on.
    let cut = match best {
        None => lo,
        Some((_, k)) => lo + k,
    };
    let mut noise: Vec<u32> = order[..cut].to_vec();
    let mut significant: Vec<u32> = order[cut..].to_vec();
    noise.sort_unstable();
    significant.sort_unstable();
    let threshold = if cut == 0 {
        S::zero()
    } else {
        S::cast((sorted[cut - 1] * sorted[cut]).sqrt())
    };
    SignificanceSplit { significant, noise, threshold, ambiguous: ratio_ambiguous }
}

/// Projects the finite positive-persistence 2-pairs of `pd` and splits
/// them. Ids in the result index `pd.pairs`; the threshold is in
/// persistence units (splitting persistences or their diagonal projections
/// gives the same partition, the two differ by a constant factor).
pub fn classify_2pd<S: Real>(
    pd: &PersistenceDiagram<S>,
) -> Result<SignificanceSplit<S>, SignificanceError> {
    let projected = project_persistence(pd, 2)?;
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for (i, proj) in projected {
        if proj > S::zero() {
            ids.push(i);
            values.push(pd.pairs[i as usize].persistence());
        }
    }
    let split = split_significant(&values);
    Ok(SignificanceSplit {
        significant: split.significant.iter().map(|&k| ids[k as usize]).collect(),
        noise: split.noise.iter().map(|&k| ids[k as usize]).collect(),
        threshold: split.threshold,
        ambiguous: split.ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn split_ids(values: &[f64]) -> (Vec<u32>, Vec<u32>) {
        let s = split_significant(values);
        (s.significant, s.noise)
    }

    #[test]
    fn well_separated_clusters() {
        let (sig, noise) = split_ids(&[2.0, 1.9, 0.05, 0.04, 0.06]);
        assert_eq!(sig, vec![0, 1]);
        assert_eq!(noise, vec![2, 3, 4]);
    }

    #[test]
    fn single_value_is_significant() {
        let s = split_significant(&[1.0]);
        assert_eq!(s.significant, vec![0]);
        assert!(s.noise.is_empty());
        assert!(s.ambiguous);
    }

    #[test]
    fn all_equal_values_are_significant() {
        let s = split_significant(&[0.7, 0.7, 0.7]);
        assert_eq!(s.significant, vec![0, 1, 2]);
        assert!(s.noise.is_empty());
    }

    #[test]
    fn ambiguity_flag_tracks_ratio() {
        assert!(split_significant(&[1.0, 1.9]).ambiguous);
        assert!(!split_significant(&[1.0, 2.0]).ambiguous);
        assert!(!split_significant(&[0.1, 3.0]).ambiguous);
    }

    #[test]
    fn features_at_different_scales_are_both_significant() {
        // A thin tube next to a large cavity: on raw values the cheapest
        // split isolates 0.95 alone; the ratio scale keeps both features.
        let mut values = vec![0.95, 0.24];
        for i in 0..40 {
            values.push(0.006 + (i as f64) * 0.0005);
        }
        let s = split_significant(&values);
        assert_eq!(s.significant, vec![0, 1]);
        assert_eq!(s.noise.len(), 40);
    }

    #[test]
    fn roundoff_scale_values_are_noise_not_anchors() {
        // 1e-12 is forty log-units below the rest; were it clustered, the
        // cheapest boundary would isolate it and call 0.01 significant.
        let s = split_significant(&[1.0, 0.5, 0.01, 1e-12]);
        assert_eq!(s.significant, vec![0, 1]);
        assert_eq!(s.noise, vec![2, 3]);
    }

    #[test]
    fn three_large_among_small_with_gap() {
        let mut values = vec![5.0, 5.2, 4.8];
        for i in 0..47 {
            values.push(0.3 + (i as f64) * 0.003);
        }
        let s = split_significant(&values);
        assert_eq!(s.significant, vec![0, 1, 2]);
        assert_eq!(s.noise.len(), 47);
        assert!(!s.ambiguous);
        assert!(s.threshold > 0.441 && s.threshold < 4.8);
    }

    fn floor_of(values: &[f64]) -> f64 {
        values.iter().cloned().fold(f64::MIN, f64::max) * 1e-3
    }

    fn brute_force_best_sse(values: &[f64]) -> f64 {
        let floor = floor_of(values);
        let mut sorted: Vec<f64> =
            values.iter().filter(|&&v| v >= floor).map(|v| v.ln()).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = sorted.len();
        if m < 2 {
            return 0.0;
        }
        let sse = |xs: &[f64]| -> f64 {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean) * (x - mean)).sum()
        };
        let mut best = f64::INFINITY;
        for k in 1..m {
            best = best.min(sse(&sorted[..k]) + sse(&sorted[k..]));
        }
        best
    }

    fn achieved_sse(values: &[f64], split: &SignificanceSplit<f64>) -> f64 {
        let floor = floor_of(values);
        let sse = |ids: &[u32]| -> f64 {
            let xs: Vec<f64> = ids
                .iter()
                .map(|&i| values[i as usize])
                .filter(|&v| v >= floor)
                .map(|v| v.ln())
                .collect();
            if xs.is_empty() {
                return 0.0;
            }
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean) * (x - mean)).sum()
        };
        sse(&split.significant) + sse(&split.noise)
    }

    proptest! {
        #[test]
        fn split_matches_exhaustive_minimum(values in prop::collection::vec(0.001f64..100.0, 2..60)) {
            let split = split_significant(&values);
            let got = achieved_sse(&values, &split);
            let want = brute_force_best_sse(&values);
            // Identical arithmetic is not guaranteed between the prefix-sum
            // and the direct evaluation, so compare with a tight tolerance.
            prop_assert!((got - want).abs() <= 1e-6 * (1.0 + want.abs()));
            // Monotone threshold: every significant value strictly exceeds
            // every noise value.
            if let (Some(min_sig), Some(max_noise)) = (
                split.significant.iter().map(|&i| values[i as usize]).min_by(|a, b| a.partial_cmp(b).unwrap()),
                split.noise.iter().map(|&i| values[i as usize]).max_by(|a, b| a.partial_cmp(b).unwrap()),
            ) {
                prop_assert!(min_sig > max_noise);
            }
        }

        #[test]
        fn scaling_by_powers_of_two_keeps_partition(
            values in prop::collection::vec(0.001f64..100.0, 1..40),
            exp in -3i32..6,
        ) {
            let scaled: Vec<f64> = values.iter().map(|v| v * 2f64.powi(exp)).collect();
            let a = split_significant(&values);
            let b = split_significant(&scaled);
            prop_assert_eq!(a.significant, b.significant);
            prop_assert_eq!(a.noise, b.noise);
        }
    }
}
