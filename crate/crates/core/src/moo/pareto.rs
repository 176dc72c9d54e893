//! Nondominated filtering of criterion triples (all minimized).

use alloc::vec::Vec;

/// True when `a` is at least as good everywhere and strictly better
/// somewhere.
pub fn dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let mut strict = false;
    for k in 0..3 {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            strict = true;
        }
    }
    strict
}

/// Indices of the maximal nondominated subset, incremental-archive style.
/// Duplicate triples coalesce onto their first occurrence. The result is
/// sorted by (first, second, third) criterion.
pub fn nondominated_indices(points: &[[f64; 3]]) -> Vec<usize> {
    let mut archive: Vec<usize> = Vec::new();
    'candidates: for (i, p) in points.iter().enumerate() {
        let mut k = 0;
        while k < archive.len() {
            let q = &points[archive[k]];
            if dominates(q, p) || q == p {
                continue 'candidates;
            }
            if dominates(p, q) {
                archive.swap_remove(k);
            } else {
                k += 1;
            }
        }
        archive.push(i);
    }
    archive.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    archive
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Direct definitional check, the independent route the filter is
    /// compared against.
    fn oracle(points: &[[f64; 3]]) -> Vec<usize> {
        let mut kept: Vec<usize> = (0..points.len())
            .filter(|&i| {
                let not_dominated = points.iter().all(|q| !dominates(q, &points[i]));
                let first_copy = points[..i].iter().all(|q| q != &points[i]);
                not_dominated && first_copy
            })
            .collect();
        kept.sort_by(|&a, &b| {
            points[a]
                .partial_cmp(&points[b])
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        kept
    }

    #[test]
    fn dominated_point_drops() {
        let pts = vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]];
        assert_eq!(nondominated_indices(&pts), vec![0]);
    }

    #[test]
    fn incomparable_points_both_stay() {
        let pts = vec![[1.0, 2.0, 3.0], [3.0, 2.0, 1.0]];
        assert_eq!(nondominated_indices(&pts), vec![0, 1]);
    }

    #[test]
    fn duplicates_coalesce_onto_the_first() {
        let pts = vec![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.5, 9.0, 9.0]];
        assert_eq!(nondominated_indices(&pts), vec![2, 0]);
    }

    #[test]
    fn random_clouds_match_the_definitional_oracle() {
        // simple deterministic LCG so the test stays no_std-friendly
        let mut state: u64 = 0x9E3779B97F4A7C15;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / ((1u64 << 31) as f64)
        };
        for round in 0..20 {
            let n = 50 + (round % 4) * 50;
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    // quantized coordinates create plenty of ties/duplicates
                    [
                        (next() * 8.0) as i64 as f64,
                        (next() * 8.0) as i64 as f64,
                        (next() * 8.0) as i64 as f64,
                    ]
                })
                .collect();
            assert_eq!(nondominated_indices(&pts), oracle(&pts), "round {round}");
        }
    }
}
