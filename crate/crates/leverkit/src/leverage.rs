//! Leverage scores with respect to arbitrary singular-vector sets, statistical
//! leverages, and the closed-form row-scaling update.

use crate::error::{Error, Result};
use crate::linalg::{svd_dm, DenseMatrix, IndexSet, SvdFactors, DEFAULT_RANK_TOL};

/// Per-column leverage scores with respect to a singular-vector set R.
///
/// `scores[i]` is the squared norm of row i+1 of V restricted to the columns
/// in R. Each score lies in [0, 1] and the scores sum to |R|.
#[derive(Debug, Clone)]
pub struct LeverageScores {
    scores: Vec<f64>,
    source_set: IndexSet,
}

impl LeverageScores {
    /// Build from precomputed scores, e.g. read back from a report. Validates
    /// the frame invariants: every score in [0, 1] (within 1e-12) and the
    /// total equal to |R| within 1e-9.
    pub fn from_scores(scores: Vec<f64>, source_set: IndexSet) -> Result<Self> {
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&s) {
                return Err(Error::InvalidParameter(format!(
                    "score {s} at column {} outside [0, 1]",
                    i + 1
                )));
            }
        }
        let total: f64 = scores.iter().sum();
        let expect = source_set.len() as f64;
        if (total - expect).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "scores sum to {total}, expected |R| = {expect}"
            )));
        }
        Ok(Self { scores, source_set })
    }

    /// Scores in natural column order (position 0 is column 1).
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn source_set(&self) -> &IndexSet {
        &self.source_set
    }

    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// Score of a 1-based column index.
    pub fn score_of(&self, col_1based: usize) -> Option<f64> {
        self.scores.get(col_1based.checked_sub(1)?).copied()
    }
}

/// Diagonal of the projector X X^+ (one value per row of X), plus the rank of X.
#[derive(Debug, Clone)]
pub struct StatisticalLeverages {
    values: Vec<f64>,
    rank: usize,
}

impl StatisticalLeverages {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Leverage scores of every column with respect to the set `r`.
///
/// Standard rank-k scores are the special case r = {1, ..., k}. Errors when
/// `r` references an index beyond the numerical rank, since scores over
/// nullspace directions are not defined by the factorization.
pub fn generalized_leverage_scores(fac: &SvdFactors, r: &IndexSet) -> Result<LeverageScores> {
    if r.max() > fac.numerical_rank() {
        return Err(Error::IndexBeyondRank { index: r.max(), rank: fac.numerical_rank() });
    }
    let vt = fac.vt();
    let n = vt.ncols();
    let mut scores = vec![0.0; n];
    for &i in r.indices() {
        let row = i - 1;
        for (col, s) in scores.iter_mut().enumerate() {
            let v = vt[(row, col)];
            *s += v * v;
        }
    }
    Ok(LeverageScores { scores, source_set: r.clone() })
}

/// Rank-k leverage scores: the prefix case R = {1, ..., k}.
pub fn rank_k_leverage_scores(fac: &SvdFactors, k: usize) -> Result<LeverageScores> {
    generalized_leverage_scores(fac, &IndexSet::prefix(k)?)
}

/// Statistical leverages: the diagonal of X X^+, computed through an
/// orthonormal basis of the column space (row norms of U).
pub fn statistical_leverages(x: &DenseMatrix) -> Result<StatisticalLeverages> {
    let fac = svd_dm(x.as_dmatrix(), DEFAULT_RANK_TOL, None)?;
    let u = fac.u();
    let values = (0..u.nrows()).map(|r| u.row(r).iter().map(|v| v * v).sum()).collect();
    Ok(StatisticalLeverages { values, rank: fac.numerical_rank() })
}

/// Leverages of X after scaling row `row_1based` by `alpha`, via the
/// closed-form rank-one update rather than re-factorizing:
///
/// l_i' = alpha^2 l_i / (1 + (alpha^2 - 1) l_i)
/// l_j' = l_j - (alpha^2 - 1) (x_j^T (X^T X)^{-1} x_i)^2 / (1 + (alpha^2 - 1) l_i)
///
/// Requires full column rank. Errors when the shared denominator falls below
/// 1e-12 in magnitude (the scaling would drop the rank, e.g. alpha = 0 on a
/// leverage-1 row).
pub fn scaled_leverage_update(
    x: &DenseMatrix,
    row_1based: usize,
    alpha: f64,
) -> Result<StatisticalLeverages> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    let (n, k) = (x.rows(), x.cols());
    if row_1based == 0 || row_1based > n {
        return Err(Error::InvalidParameter(format!("row index {row_1based} out of range 1..={n}")));
    }
    let fac = svd_dm(x.as_dmatrix(), DEFAULT_RANK_TOL, None)?;
    if fac.numerical_rank() < k {
        return Err(Error::RankDeficient { rank: fac.numerical_rank(), cols: k });
    }

    let u = fac.u();
    let leverages: Vec<f64> = (0..n).map(|r| u.row(r).iter().map(|v| v * v).sum()).collect();
    let i = row_1based - 1;
    let a2m1 = alpha * alpha - 1.0;
    let denom = 1.0 + a2m1 * leverages[i];
    if denom.abs() < 1e-12 {
        return Err(Error::SingularUpdate { denominator: denom });
    }

    // cross terms g_j = x_j^T (X^T X)^{-1} x_i through the factors:
    // (X^T X)^{-1} = V Sigma^{-2} V^T, so g = X V Sigma^{-2} V^T x_i.
    let xm = x.as_dmatrix();
    let xi = xm.row(i).transpose();
    let vt = fac.vt();
    let mut w = vt * &xi; // k-vector: V^T x_i
    for (t, &s) in fac.sigma().iter().enumerate() {
        w[t] /= s * s;
    }
    let g = xm * (vt.transpose() * w); // n-vector

    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        if j == i {
            values.push(alpha * alpha * leverages[i] / denom);
        } else {
            values.push(leverages[j] - a2m1 * g[j] * g[j] / denom);
        }
    }
    Ok(StatisticalLeverages { values, rank: k })
}
