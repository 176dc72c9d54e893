//! m-TOPSIS ranking of alternatives over minimized criteria.
//!
//! Columns are vector-normalized and weighted; the ideal point collects the
//! column minima, the anti-ideal the maxima. The modified variant scores
//! each alternative by its distance in the (D+, D-) plane to the reference
//! (min D+, max D-) and ranks ascending; the classic closeness-coefficient
//! ranking stays available for comparison. Ties break toward lower first
//! column (cost), then input order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::float::sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Reference-point variant in the (D+, D-) plane; score 0 is best.
    Modified,
    /// Classic closeness coefficient D-/(D+ + D-); higher is better.
    Classic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingResult {
    /// Vector-normalized matrix (constant columns zeroed).
    pub normalized: Vec<Vec<f64>>,
    /// Normalized and weighted matrix.
    pub weighted: Vec<Vec<f64>>,
    /// Euclidean distance to the ideal (column minima).
    pub d_plus: Vec<f64>,
    /// Euclidean distance to the anti-ideal (column maxima).
    pub d_minus: Vec<f64>,
    /// Method-specific score (Modified: distance, ascending; Classic:
    /// closeness, descending).
    pub score: Vec<f64>,
    /// 1-based rank per alternative; a permutation of 1..=n.
    pub rank: Vec<usize>,
    /// Weights actually used (normalized to sum 1).
    pub weights: Vec<f64>,
    pub method: RankMethod,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RankError {
    NoAlternatives,
    RaggedMatrix,
    /// Weights must be positive and match the criterion count.
    BadWeights(String),
}

impl core::fmt::Display for RankError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RankError::NoAlternatives => write!(f, "no alternatives to rank"),
            RankError::RaggedMatrix => write!(f, "criterion matrix rows differ in length"),
            RankError::BadWeights(msg) => write!(f, "bad weights: {msg}"),
        }
    }
}

/// Ranks a criterion matrix (rows = alternatives, all criteria minimized).
pub fn mtopsis_rank(matrix: &[Vec<f64>], weights: &[f64], method: RankMethod) -> Result<RankingResult, RankError> {
    let n = matrix.len();
    if n == 0 {
        return Err(RankError::NoAlternatives);
    }
    let k = matrix[0].len();
    if matrix.iter().any(|row| row.len() != k) {
        return Err(RankError::RaggedMatrix);
    }
    if weights.len() != k {
        return Err(RankError::BadWeights(format!("{} weights for {k} criteria", weights.len())));
    }
    if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(RankError::BadWeights("weights must be positive and finite".into()));
    }
    let wsum: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / wsum).collect();

    let mut warnings = Vec::new();
    let mut normalized = vec![vec![0.0; k]; n];
    for c in 0..k {
        let constant = matrix.iter().all(|row| row[c] == matrix[0][c]);
        if constant {
            warnings.push(format!("criterion {c} is constant and carries no information"));
            continue;
        }
        let norm = sqrt(matrix.iter().map(|row| row[c] * row[c]).sum::<f64>());
        if norm == 0.0 {
            continue;
        }
        for (i, row) in matrix.iter().enumerate() {
            normalized[i][c] = row[c] / norm;
        }
    }
    let weighted: Vec<Vec<f64>> = normalized
        .iter()
        .map(|row| row.iter().zip(weights.iter()).map(|(v, w)| v * w).collect())
        .collect();

    let ideal: Vec<f64> = (0..k).map(|c| weighted.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min)).collect();
    let anti: Vec<f64> = (0..k).map(|c| weighted.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max)).collect();

    let d_plus: Vec<f64> = weighted
        .iter()
        .map(|r| sqrt(r.iter().zip(ideal.iter()).map(|(v, b)| (v - b) * (v - b)).sum::<f64>()))
        .collect();
    let d_minus: Vec<f64> = weighted
        .iter()
        .map(|r| sqrt(r.iter().zip(anti.iter()).map(|(v, b)| (v - b) * (v - b)).sum::<f64>()))
        .collect();

    let score: Vec<f64> = match method {
        RankMethod::Modified => {
            let ref_dp = d_plus.iter().copied().fold(f64::INFINITY, f64::min);
            let ref_dm = d_minus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            d_plus
                .iter()
                .zip(d_minus.iter())
                .map(|(&dp, &dm)| sqrt((dp - ref_dp) * (dp - ref_dp) + (dm - ref_dm) * (dm - ref_dm)))
                .collect()
        }
        RankMethod::Classic => d_plus
            .iter()
            .zip(d_minus.iter())
            .map(|(&dp, &dm)| if dp + dm > 0.0 { dm / (dp + dm) } else { 1.0 })
            .collect(),
    };

    // order: better first; ties by lower first column then input order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let primary = match method {
            RankMethod::Modified => score[a].partial_cmp(&score[b]),
            RankMethod::Classic => score[b].partial_cmp(&score[a]),
        }
        .unwrap_or(core::cmp::Ordering::Equal);
        primary
            .then_with(|| {
                if k > 0 {
                    matrix[a][0].partial_cmp(&matrix[b][0]).unwrap_or(core::cmp::Ordering::Equal)
                } else {
                    core::cmp::Ordering::Equal
                }
            })
            .then_with(|| a.cmp(&b))
    });
    let mut rank = vec![0usize; n];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }

    Ok(RankingResult { normalized, weighted, d_plus, d_minus, score, rank, weights, method, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchors() -> Vec<Vec<f64>> {
        vec![
            vec![61.4, 22.0, 51.6],
            vec![84.8, 16.6, 263.9],
            vec![76.9, 21.3, 49.1],
        ]
    }

    #[test]
    fn anchor_triple_matches_the_frozen_hand_computation() {
        // expected values computed independently from the definition
        let r = mtopsis_rank(&anchors(), &[1.0, 1.0, 1.0], RankMethod::Modified).unwrap();
        let dp = [0.051766856837164706, 0.26873562385275557, 0.06004133810728821];
        let dm = [0.26576490228756916, 0.051677007311665024, 0.26281026099521015];
        let sc = [0.0, 0.30480989589493235, 0.008786179229684403];
        for i in 0..3 {
            assert!((r.d_plus[i] - dp[i]).abs() < 1e-12, "d_plus[{i}] = {}", r.d_plus[i]);
            assert!((r.d_minus[i] - dm[i]).abs() < 1e-12, "d_minus[{i}] = {}", r.d_minus[i]);
            assert!((r.score[i] - sc[i]).abs() < 1e-12, "score[{i}] = {}", r.score[i]);
        }
        assert_eq!(r.rank, vec![1, 3, 2], "cost anchor must rank first");
    }

    #[test]
    fn doubling_the_ghg_weight_weakly_improves_the_ghg_anchor() {
        let equal = mtopsis_rank(&anchors(), &[1.0, 1.0, 1.0], RankMethod::Modified).unwrap();
        let heavy = mtopsis_rank(&anchors(), &[1.0, 2.0, 1.0], RankMethod::Modified).unwrap();
        assert!(heavy.rank[1] <= equal.rank[1]);
        // frozen from the same hand computation: the low-GHG risk anchor
        // takes over the top spot
        assert_eq!(heavy.rank, vec![2, 3, 1]);
    }

    #[test]
    fn classic_variant_agrees_on_the_anchor_order() {
        let r = mtopsis_rank(&anchors(), &[1.0, 1.0, 1.0], RankMethod::Classic).unwrap();
        let cc = [0.8369710891916501, 0.16128267828850615, 0.8140280603404215];
        for i in 0..3 {
            assert!((r.score[i] - cc[i]).abs() < 1e-12);
        }
        assert_eq!(r.rank, vec![1, 3, 2]);
    }

    #[test]
    fn single_alternative_ranks_first_with_zero_score() {
        let r = mtopsis_rank(&[vec![5.0, 1.0, 2.0]], &[1.0, 1.0, 1.0], RankMethod::Modified).unwrap();
        assert_eq!(r.rank, vec![1]);
        assert_eq!(r.score[0], 0.0);
    }

    #[test]
    fn constant_columns_zero_out_with_a_warning() {
        let m = vec![vec![3.0, 7.0], vec![4.0, 7.0]];
        let r = mtopsis_rank(&m, &[1.0, 1.0], RankMethod::Modified).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.normalized[0][1], 0.0);
        assert_eq!(r.normalized[1][1], 0.0);
        assert_eq!(r.rank, vec![1, 2]);
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(mtopsis_rank(&anchors(), &[1.0, 0.0, 1.0], RankMethod::Modified).is_err());
        assert!(mtopsis_rank(&anchors(), &[1.0, 1.0], RankMethod::Modified).is_err());
        assert!(mtopsis_rank(&[], &[1.0], RankMethod::Modified).is_err());
    }
}
