//! Dense decompositions, orthonormalization, projections, and principal angles.
//!
//! Everything downstream (leverage scores, selection, bound verifiers) is built
//! on the types here. All rank decisions are made through one SVD path with a
//! shared relative cutoff so that the verifiers never disagree with the
//! algorithms about what the rank of a matrix is. Pseudoinverses are never
//! formed explicitly; projections go through an orthonormal basis instead.
//!
//! Index conventions: singular-vector and column indices exposed through
//! [`IndexSet`] and the selection types are 1-based (matching the report and
//! CLI formats); raw element access on [`DenseMatrix`] is 0-based.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Relative singular-value cutoff used when no explicit tolerance is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Column-major dense real matrix with validated, finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Build from column-major data. Rejects empty shapes, length mismatches
    /// and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, len: data.len() });
        }
        for (pos, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: pos % rows, col: pos / rows, value: v });
            }
        }
        Ok(Self { inner: DMatrix::from_column_slice(rows, cols, &data) })
    }

    /// Build from a generator over (row, col).
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        let m = DMatrix::from_fn(rows, cols, f);
        Self::from_dmatrix(m)
    }

    /// Wrap an existing matrix, validating the same invariants as [`new`](Self::new).
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EmptyMatrix { rows: m.nrows(), cols: m.ncols() });
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c, value: v });
                }
            }
        }
        Ok(Self { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: DMatrix::identity(n, n) }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    /// Element access, 0-based.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.inner.iter().map(|v| v * v).sum()
    }

    /// Extract the submatrix of the given 1-based columns, in the given order.
    /// Duplicates are allowed (they do not change the spanned subspace).
    pub fn column_subset(&self, cols_1based: &[usize]) -> Result<DenseMatrix> {
        if cols_1based.is_empty() {
            return Err(Error::EmptyMatrix { rows: self.rows(), cols: 0 });
        }
        let n = self.cols();
        for &c in cols_1based {
            if c == 0 || c > n {
                return Err(Error::InvalidParameter(format!(
                    "column index {c} out of range 1..={n}"
                )));
            }
        }
        let m = DMatrix::from_fn(self.rows(), cols_1based.len(), |r, j| {
            self.inner[(r, cols_1based[j] - 1)]
        });
        Ok(DenseMatrix { inner: m })
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.inner
    }
}

impl std::ops::Deref for DenseMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &Self::Target {
        &self.inner
    }
}

/// Sorted set of 1-based singular-vector indices (the R of the generalized
/// scores; also the T of the CCA second pass).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Build from arbitrary order; sorts ascending. Rejects empty input,
    /// zeros and duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::BadIndexSet("empty index set".into()));
        }
        indices.sort_unstable();
        if indices[0] == 0 {
            return Err(Error::BadIndexSet("indices are 1-based; found 0".into()));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadIndexSet(format!("duplicate index in {indices:?}")));
        }
        Ok(Self { indices })
    }

    /// The prefix set {1, ..., k}.
    pub fn prefix(k: usize) -> Result<Self> {
        Self::new((1..=k).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn max(&self) -> usize {
        *self.indices.last().unwrap()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// True when the set is exactly {1, ..., len}.
    pub fn is_prefix(&self) -> bool {
        self.indices.iter().enumerate().all(|(p, &i)| i == p + 1)
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Truncated singular value decomposition with a recorded rank decision.
///
/// `u` is m x rho with orthonormal columns, `vt` is rho x n with orthonormal
/// rows, `sigma` is non-increasing and every retained value exceeds
/// `rank_tol * sigma[0]`. A numerically zero input yields rho = 0 and is
/// flagged degenerate.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    vt: DMatrix<f64>,
    numerical_rank: usize,
    rank_tol: f64,
    capped: bool,
    degenerate: bool,
}

impl SvdFactors {
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Non-increasing retained singular values.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn vt(&self) -> &DMatrix<f64> {
        &self.vt
    }

    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// True when truncation was forced by a `max_rank` cap rather than the
    /// singular-value cutoff.
    pub fn is_capped(&self) -> bool {
        self.capped
    }

    /// True when the input was numerically zero (empty factors).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// 1-based singular value access: `sigma_at(1)` is the largest.
    pub fn sigma_at(&self, index_1based: usize) -> Result<f64> {
        if index_1based == 0 || index_1based > self.numerical_rank {
            return Err(Error::IndexBeyondRank { index: index_1based, rank: self.numerical_rank });
        }
        Ok(self.sigma[index_1based - 1])
    }

    /// The submatrix U_R of left singular vectors indexed by `r` (1-based).
    pub fn u_columns(&self, r: &IndexSet) -> Result<DMatrix<f64>> {
        if r.max() > self.numerical_rank {
            return Err(Error::IndexBeyondRank { index: r.max(), rank: self.numerical_rank });
        }
        let idx = r.indices();
        Ok(DMatrix::from_fn(self.u.nrows(), idx.len(), |row, j| self.u[(row, idx[j] - 1)]))
    }

    /// U * diag(sigma) * Vt, for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        if self.numerical_rank == 0 {
            return DMatrix::zeros(self.u.nrows(), self.vt.ncols());
        }
        let mut scaled = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * &self.vt
    }
}

/// Truncated SVD with relative cutoff and optional rank cap.
///
/// The numerical rank is the number of singular values exceeding
/// `rank_tol * sigma_1`, further capped by `max_rank` if given. Retained
/// right singular vectors are sign-canonicalized (the largest-magnitude
/// entry of each V column is made positive, first occurrence on ties) so
/// results are stable across backends. Near-equal singular values keep the
/// descending-sigma order produced here; no perturbation is applied.
pub fn svd(a: &DenseMatrix, rank_tol: f64, max_rank: Option<usize>) -> Result<SvdFactors> {
    svd_dm(a.as_dmatrix(), rank_tol, max_rank)
}

pub(crate) fn svd_dm(a: &DMatrix<f64>, rank_tol: f64, max_rank: Option<usize>) -> Result<SvdFactors> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must lie in (0, 1), got {rank_tol}"
        )));
    }
    if let Some(c) = max_rank {
        if c == 0 {
            return Err(Error::InvalidParameter("max_rank must be >= 1".into()));
        }
    }
    let (m, n) = (a.nrows(), a.ncols());
    // same convergence epsilon nalgebra's SVD::new uses; a tighter one makes
    // the deflation loop misbehave on exactly rank-deficient inputs
    let dec = a.clone().try_svd(true, true, 5.0 * f64::EPSILON, 0).ok_or(Error::SvdFailed)?;
    let u_full = dec.u.expect("u requested");
    let vt_full = dec.v_t.expect("v_t requested");
    let sv = dec.singular_values;

    // Descending order; stable on ties.
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());

    let sigma_max = sv[order[0]];
    if sigma_max <= 0.0 {
        return Ok(SvdFactors {
            u: DMatrix::zeros(m, 0),
            sigma: Vec::new(),
            vt: DMatrix::zeros(0, n),
            numerical_rank: 0,
            rank_tol,
            capped: false,
            degenerate: true,
        });
    }

    let by_tol = order.iter().filter(|&&i| sv[i] > rank_tol * sigma_max).count();
    let rank = max_rank.map_or(by_tol, |c| by_tol.min(c));
    let capped = rank < by_tol;

    let mut u = DMatrix::zeros(m, rank);
    let mut vt = DMatrix::zeros(rank, n);
    let mut sigma = Vec::with_capacity(rank);
    for (out, &src) in order.iter().take(rank).enumerate() {
        sigma.push(sv[src]);
        u.column_mut(out).copy_from(&u_full.column(src));
        vt.row_mut(out).copy_from(&vt_full.row(src));
    }

    // Sign canonicalization on V columns (rows of vt).
    for i in 0..rank {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for j in 0..n {
            let v = vt[(i, j)].abs();
            if v > best_abs {
                best_abs = v;
                best = j;
            }
        }
        if vt[(i, best)] < 0.0 {
            for j in 0..n {
                vt[(i, j)] = -vt[(i, j)];
            }
            for r in 0..m {
                u[(r, i)] = -u[(r, i)];
            }
        }
    }

    Ok(SvdFactors { u, sigma, vt, numerical_rank: rank, rank_tol, capped, degenerate: false })
}

/// Orthonormal basis of the column space of `a`, with as many columns as the
/// numerical rank of `a`. Errors on a numerically zero matrix.
pub fn orthonormal_basis(a: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let q = basis_dm(a.as_dmatrix(), rank_tol, "orthonormal_basis")?;
    Ok(DenseMatrix { inner: q })
}

pub(crate) fn basis_dm(a: &DMatrix<f64>, rank_tol: f64, context: &'static str) -> Result<DMatrix<f64>> {
    let fac = svd_dm(a, rank_tol, None)?;
    if fac.numerical_rank == 0 {
        return Err(Error::ZeroRank { context });
    }
    Ok(fac.u)
}

/// Projection energy ||C C^+ B||_F^2, computed as ||Q_c^T B||_F^2 through an
/// orthonormal basis of `c`. A numerically zero `c` projects onto the trivial
/// subspace and yields 0.
pub fn projection_energy(c: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if c.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "projection_energy",
            left_rows: c.rows(),
            left_cols: c.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    projection_energy_dm(c.as_dmatrix(), b.as_dmatrix(), DEFAULT_RANK_TOL)
}

pub(crate) fn projection_energy_dm(c: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64) -> Result<f64> {
    let fac = svd_dm(c, rank_tol, None)?;
    if fac.numerical_rank == 0 {
        return Ok(0.0);
    }
    let proj = fac.u.transpose() * b;
    Ok(proj.iter().map(|v| v * v).sum())
}

/// Energy of `b` captured by an already-orthonormal basis `q`: ||q^T b||_F^2.
pub(crate) fn captured_energy(q: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let proj = q.transpose() * b;
    proj.iter().map(|v| v * v).sum()
}

/// Cosines of the principal angles between the column spaces of `f` and `g`:
/// the singular values of Q_f^T Q_g, clamped into [0, 1], non-increasing.
pub fn principal_angle_cosines(f: &DenseMatrix, g: &DenseMatrix) -> Result<Vec<f64>> {
    if f.rows() != g.rows() {
        return Err(Error::DimensionMismatch {
            context: "principal_angle_cosines",
            left_rows: f.rows(),
            left_cols: f.cols(),
            right_rows: g.rows(),
            right_cols: g.cols(),
        });
    }
    let qf = basis_dm(f.as_dmatrix(), DEFAULT_RANK_TOL, "principal_angle_cosines")?;
    let qg = basis_dm(g.as_dmatrix(), DEFAULT_RANK_TOL, "principal_angle_cosines")?;
    let prod = qf.transpose() * qg;
    let mut cos: Vec<f64> = prod.singular_values().iter().map(|&s| s.clamp(0.0, 1.0)).collect();
    cos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(cos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: usize, cols: usize, row_major: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |r, c| row_major[r * cols + c]).unwrap()
    }

    fn seeded(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn svd_diagonal() {
        let a = mat(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        assert_eq!(fac.numerical_rank(), 3);
        assert_abs_diff_eq!(fac.sigma()[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fac.sigma()[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fac.sigma()[2], 1.0, epsilon = 1e-12);
        // U and V equal the identity up to column signs; canonicalized positive.
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(fac.u()[(i, j)], expect, epsilon = 1e-12);
                assert_abs_diff_eq!(fac.vt()[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn svd_rank_one_symmetric() {
        let a = mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        assert_eq!(fac.numerical_rank(), 1);
        assert_abs_diff_eq!(fac.sigma()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn svd_zero_matrix_degenerate() {
        let a = DenseMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        assert!(fac.is_degenerate());
        assert_eq!(fac.numerical_rank(), 0);
        assert_eq!(fac.sigma().len(), 0);
    }

    #[test]
    fn svd_reconstruction_error_small() {
        let a = seeded(8, 5, 7);
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        let rec = fac.reconstruct();
        let sigma1 = fac.sigma()[0];
        for r in 0..8 {
            for c in 0..5 {
                assert!((rec[(r, c)] - a.get(r, c)).abs() < 1e-8 * sigma1);
            }
        }
        // orthonormality of factors
        let utu = fac.u().transpose() * fac.u();
        let vvt = fac.vt() * fac.vt().transpose();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((utu[(i, j)] - expect).abs() < 1e-10);
                assert!((vvt[(i, j)] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn svd_truncation_cap() {
        let a = seeded(6, 6, 11);
        let fac = svd(&a, DEFAULT_RANK_TOL, Some(2)).unwrap();
        assert_eq!(fac.numerical_rank(), 2);
        assert!(fac.is_capped());
    }

    #[test]
    fn basis_identity_and_rank_deficient() {
        let q = orthonormal_basis(&DenseMatrix::identity(3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(q.cols(), 3);
        let qtq = q.as_dmatrix().transpose() * q.as_dmatrix();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(qtq[(i, j)], expect, epsilon = 1e-12);
            }
        }

        // single column normalizes
        let v = mat(2, 1, &[1.0, 1.0]);
        let q = orthonormal_basis(&v, DEFAULT_RANK_TOL).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((q.get(0, 0).abs() - s).abs() < 1e-12 && (q.get(1, 0).abs() - s).abs() < 1e-12);

        // dependent columns collapse to one
        let a = mat(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        let q = orthonormal_basis(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(q.cols(), 1);
        assert!((q.get(0, 0).abs() - s).abs() < 1e-12);

        // zero matrix has no basis
        let z = DenseMatrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert!(orthonormal_basis(&z, DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn projection_energy_examples() {
        let b = mat(2, 1, &[0.3, -0.4]);
        let full = projection_energy(&DenseMatrix::identity(2), &b).unwrap();
        assert_abs_diff_eq!(full, b.frob_norm_sq(), epsilon = 1e-12);

        let e1 = mat(2, 1, &[1.0, 0.0]);
        let e2 = mat(2, 1, &[0.0, 1.0]);
        assert_abs_diff_eq!(projection_energy(&e1, &e2).unwrap(), 0.0, epsilon = 1e-15);

        let c = mat(2, 1, &[1.0, 1.0]);
        assert_abs_diff_eq!(projection_energy(&c, &e1).unwrap(), 0.5, epsilon = 1e-12);

        // all-zero c projects to nothing
        let z = DenseMatrix::new(2, 1, vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(projection_energy(&z, &b).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn principal_angle_examples() {
        let e1 = mat(2, 1, &[1.0, 0.0]);
        let e2 = mat(2, 1, &[0.0, 1.0]);
        let diag = mat(2, 1, &[1.0, 1.0]);

        let same = principal_angle_cosines(&e1, &e1).unwrap();
        assert_eq!(same.len(), 1);
        assert_abs_diff_eq!(same[0], 1.0, epsilon = 1e-12);

        let orth = principal_angle_cosines(&e1, &e2).unwrap();
        assert_abs_diff_eq!(orth[0], 0.0, epsilon = 1e-12);

        let mid = principal_angle_cosines(&e1, &diag).unwrap();
        assert_abs_diff_eq!(mid[0], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);

        let z = DenseMatrix::new(2, 1, vec![0.0, 0.0]).unwrap();
        assert!(principal_angle_cosines(&z, &e1).is_err());
    }

    #[test]
    fn angle_cosines_match_captured_energy() {
        // sum of squared cosines equals ||Q_f^T Q_g||_F^2
        let f = seeded(7, 3, 21);
        let g = seeded(7, 2, 22);
        let cos = principal_angle_cosines(&f, &g).unwrap();
        let qf = basis_dm(f.as_dmatrix(), DEFAULT_RANK_TOL, "t").unwrap();
        let qg = basis_dm(g.as_dmatrix(), DEFAULT_RANK_TOL, "t").unwrap();
        let frob: f64 = captured_energy(&qf, &qg);
        let sumsq: f64 = cos.iter().map(|c| c * c).sum();
        assert_abs_diff_eq!(frob, sumsq, epsilon = 1e-10);
    }

    #[test]
    fn index_set_basics() {
        let r = IndexSet::new(vec![4, 2]).unwrap();
        assert_eq!(r.indices(), &[2, 4]);
        assert_eq!(r.max(), 4);
        assert!(!r.is_prefix());
        assert!(IndexSet::prefix(3).unwrap().is_prefix());
        assert!(IndexSet::new(vec![]).is_err());
        assert!(IndexSet::new(vec![0, 1]).is_err());
        assert!(IndexSet::new(vec![1, 1]).is_err());
    }

    #[test]
    fn column_subset_extracts_1based() {
        let a = mat(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = a.column_subset(&[3, 1]).unwrap();
        assert_eq!(s.cols(), 2);
        assert_eq!(s.get(0, 0), 3.0);
        assert_eq!(s.get(1, 0), 6.0);
        assert_eq!(s.get(0, 1), 1.0);
        assert!(a.column_subset(&[4]).is_err());
        assert!(a.column_subset(&[0]).is_err());
    }
}
