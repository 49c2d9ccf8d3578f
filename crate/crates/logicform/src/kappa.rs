//! Fleiss' kappa over a fixed-rater-count rating matrix.

use serde::{Deserialize, Serialize};

/// Item-by-category rating counts: `counts[i][j]` raters put item `i` in
/// category `j`, with the same number of raters for every item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct RatingMatrix {
    counts: Vec<Vec<u32>>,
    raters: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KappaError {
    #[error("rating matrix has no items")]
    NoItems,
    #[error("need at least 2 categories, got {got}")]
    TooFewCategories { got: usize },
    #[error("need at least 2 raters per item, got {got}")]
    TooFewRaters { got: u32 },
    #[error("row {row} has {got} categories, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row} sums to {got} raters, expected {expected}")]
    UnevenRaters { row: usize, expected: u32, got: u32 },
    #[error("chance agreement is 1: every rating falls in one category")]
    DegenerateAgreement,
}

impl RatingMatrix {
    pub fn new(counts: Vec<Vec<u32>>) -> Result<RatingMatrix, KappaError> {
        let first = counts.first().ok_or(KappaError::NoItems)?;
        let width = first.len();
        if width < 2 {
            return Err(KappaError::TooFewCategories { got: width });
        }
        let raters: u32 = first.iter().sum();
        if raters < 2 {
            return Err(KappaError::TooFewRaters { got: raters });
        }
        for (row, r) in counts.iter().enumerate() {
            if r.len() != width {
                return Err(KappaError::RaggedRow {
                    row,
                    expected: width,
                    got: r.len(),
                });
            }
            let got: u32 = r.iter().sum();
            if got != raters {
                return Err(KappaError::UnevenRaters {
                    row,
                    expected: raters,
                    got,
                });
            }
        }
        Ok(RatingMatrix { counts, raters })
    }

    pub fn n_items(&self) -> usize {
        self.counts.len()
    }

    pub fn n_categories(&self) -> usize {
        self.counts[0].len()
    }

    pub fn raters_per_item(&self) -> u32 {
        self.raters
    }

    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    /// Optional preprocessing: drop items where no two raters agree at all
    /// (every per-category count ≤ 1). Errors if nothing is left.
    pub fn drop_full_disagreement(&self) -> Result<RatingMatrix, KappaError> {
        let kept: Vec<Vec<u32>> = self
            .counts
            .iter()
            .filter(|row| row.iter().any(|&c| c > 1))
            .cloned()
            .collect();
        RatingMatrix::new(kept)
    }
}

impl TryFrom<Vec<Vec<u32>>> for RatingMatrix {
    type Error = KappaError;
    fn try_from(counts: Vec<Vec<u32>>) -> Result<Self, Self::Error> {
        RatingMatrix::new(counts)
    }
}

impl From<RatingMatrix> for Vec<Vec<u32>> {
    fn from(m: RatingMatrix) -> Vec<Vec<u32>> {
        m.counts
    }
}

/// Chance-corrected multi-rater agreement:
/// `(observed − expected) / (1 − expected)`, where per-item observed
/// agreement is the fraction of concordant rater pairs and expected
/// agreement is the sum of squared category frequencies.
pub fn fleiss_kappa(m: &RatingMatrix) -> Result<f64, KappaError> {
    let n = m.raters as f64;
    let n_items = m.n_items() as f64;
    let mut p_bar = 0.0f64;
    let mut col_totals = vec![0u64; m.n_categories()];
    for row in m.counts() {
        let mut pairs = 0.0f64;
        for (j, &c) in row.iter().enumerate() {
            col_totals[j] += u64::from(c);
            pairs += f64::from(c) * f64::from(c);
        }
        p_bar += (pairs - n) / (n * (n - 1.0));
    }
    p_bar /= n_items;
    let total = n_items * n;
    let p_e: f64 = col_totals
        .iter()
        .map(|&t| (t as f64 / total).powi(2))
        .sum();
    if p_e >= 1.0 {
        return Err(KappaError::DegenerateAgreement);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand::rngs::StdRng;

    #[test]
    fn perfect_agreement_is_exactly_one() {
        let m = RatingMatrix::new(vec![vec![4, 0, 0], vec![0, 4, 0], vec![0, 0, 4]]).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn two_rater_swap_is_exactly_minus_one() {
        let m = RatingMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), -1.0);
    }

    #[test]
    fn unanimous_single_category_is_degenerate() {
        let m = RatingMatrix::new(vec![vec![3, 0], vec![3, 0]]).unwrap();
        assert_eq!(fleiss_kappa(&m), Err(KappaError::DegenerateAgreement));
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        assert_eq!(RatingMatrix::new(vec![]), Err(KappaError::NoItems));
        assert_eq!(
            RatingMatrix::new(vec![vec![5]]),
            Err(KappaError::TooFewCategories { got: 1 })
        );
        assert_eq!(
            RatingMatrix::new(vec![vec![1, 0]]),
            Err(KappaError::TooFewRaters { got: 1 })
        );
        assert_eq!(
            RatingMatrix::new(vec![vec![2, 1], vec![1, 1]]),
            Err(KappaError::UnevenRaters {
                row: 1,
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            RatingMatrix::new(vec![vec![2, 1], vec![1, 1, 1]]),
            Err(KappaError::RaggedRow {
                row: 1,
                expected: 2,
                got: 3
            })
        );
    }

    #[test]
    fn random_ratings_score_near_zero() {
        let mut rng = StdRng::seed_from_u64(909);
        let rows: Vec<Vec<u32>> = (0..200)
            .map(|_| {
                let mut row = vec![0u32; 4];
                for _ in 0..5 {
                    row[rng.gen_range(0..4)] += 1;
                }
                row
            })
            .collect();
        let kappa = fleiss_kappa(&RatingMatrix::new(rows).unwrap()).unwrap();
        assert!(kappa.abs() < 0.1, "kappa = {kappa}");
    }

    #[test]
    fn invariant_under_item_and_category_permutation() {
        let mut rng = StdRng::seed_from_u64(4242);
        let mut rows: Vec<Vec<u32>> = (0..40)
            .map(|_| {
                let mut row = vec![0u32; 5];
                for _ in 0..6 {
                    row[rng.gen_range(0..5)] += 1;
                }
                row
            })
            .collect();
        let base = fleiss_kappa(&RatingMatrix::new(rows.clone()).unwrap()).unwrap();
        rows.shuffle(&mut rng);
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..5).collect();
            p.shuffle(&mut rng);
            p
        };
        for row in &mut rows {
            let old = row.clone();
            for (j, &src) in perm.iter().enumerate() {
                row[j] = old[src];
            }
        }
        let shuffled = fleiss_kappa(&RatingMatrix::new(rows).unwrap()).unwrap();
        assert!((base - shuffled).abs() < 1e-12);
    }

    #[test]
    fn drop_full_disagreement_filters_rows() {
        let m = RatingMatrix::new(vec![vec![1, 1, 1], vec![3, 0, 0], vec![0, 2, 1]]).unwrap();
        let kept = m.drop_full_disagreement().unwrap();
        assert_eq!(kept.n_items(), 2);
        let all_spread = RatingMatrix::new(vec![vec![1, 1, 1]]).unwrap();
        assert_eq!(
            all_spread.drop_full_disagreement(),
            Err(KappaError::NoItems)
        );
    }

    /// Exact value as an integer fraction, kept in i128 throughout:
    /// with `A = Σ n_ij² − N·n`, `D1 = N·n·(n−1)`, `B = Σ_j (Σ_i n_ij)²`,
    /// `D2 = (N·n)²`, kappa is `(A·D2 − B·D1) / (D1·(D2 − B))`.
    fn exact_kappa(counts: &[Vec<u32>]) -> Option<(i128, i128)> {
        let n_items = counts.len() as i128;
        let n: i128 = counts[0].iter().map(|&c| i128::from(c)).sum();
        let a: i128 = counts
            .iter()
            .flat_map(|r| r.iter())
            .map(|&c| i128::from(c) * i128::from(c))
            .sum::<i128>()
            - n_items * n;
        let d1 = n_items * n * (n - 1);
        let width = counts[0].len();
        let b: i128 = (0..width)
            .map(|j| {
                let t: i128 = counts.iter().map(|r| i128::from(r[j])).sum();
                t * t
            })
            .sum();
        let d2 = (n_items * n) * (n_items * n);
        if d2 == b {
            return None;
        }
        Some((a * d2 - b * d1, d1 * (d2 - b)))
    }

    #[test]
    fn matches_exact_arithmetic_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(777);
        let mut checked = 0;
        while checked < 100 {
            let items = rng.gen_range(2..=30usize);
            let cats = rng.gen_range(2..=8usize);
            let raters = rng.gen_range(2..=9u32);
            let rows: Vec<Vec<u32>> = (0..items)
                .map(|_| {
                    let mut row = vec![0u32; cats];
                    for _ in 0..raters {
                        row[rng.gen_range(0..cats)] += 1;
                    }
                    row
                })
                .collect();
            let m = RatingMatrix::new(rows.clone()).unwrap();
            match (fleiss_kappa(&m), exact_kappa(&rows)) {
                (Ok(got), Some((num, den))) => {
                    let want = num as f64 / den as f64;
                    assert!(
                        (got - want).abs() <= 1e-9,
                        "got {got}, want {want} = {num}/{den}"
                    );
                    checked += 1;
                }
                (Err(KappaError::DegenerateAgreement), None) => {}
                (lhs, rhs) => panic!("disagree: {lhs:?} vs {rhs:?}"),
            }
        }
    }
}
