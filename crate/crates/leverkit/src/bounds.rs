//! Verifiers for the inequalities behind the selection guarantees, and the
//! power-law column-count formula.

use crate::error::{Error, Result};
use crate::leverage::{generalized_leverage_scores, rank_k_leverage_scores};
use crate::linalg::{
    basis_dm, captured_energy, svd_dm, DenseMatrix, IndexSet, SvdFactors, DEFAULT_RANK_TOL,
};
use crate::selection::{sigma_mu_omega, SigmaOmegaMode};

/// Default absolute tolerance on bound slack. The checked quantities are
/// differences of Frobenius norms of projectors; 1e-8 absorbs accumulated
/// SVD error at the dimensions this crate targets.
pub const DEFAULT_BOUND_TOL: f64 = 1e-8;

/// One verified inequality: left side, right side, and whether
/// lhs - rhs >= -tol held.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub tol: f64,
    /// Human-readable labels: the sets and singular values involved.
    pub context: String,
}

impl BoundReport {
    fn new(name: &'static str, lhs: f64, rhs: f64, tol: f64, context: String) -> Self {
        let slack = lhs - rhs;
        Self { name, lhs, rhs, slack, satisfied: slack >= -tol, tol, context }
    }
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: lhs={:.12e} rhs={:.12e} slack={:.3e} satisfied={} ({})",
            self.name, self.lhs, self.rhs, self.slack, self.satisfied, self.context
        )
    }
}

fn validate_columns(s: &[usize], n: usize) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("column selection is empty".into()));
    }
    let mut seen = vec![false; n + 1];
    for &c in s {
        if c == 0 || c > n {
            return Err(Error::InvalidParameter(format!("column index {c} out of range 1..={n}")));
        }
        if seen[c] {
            return Err(Error::InvalidParameter(format!("duplicate column index {c}")));
        }
        seen[c] = true;
    }
    Ok(())
}

/// The top-k angle bound: ||C C^+ U_k||_F^2 >= ||V_k^T S||_F^2 for any
/// column subset C = AS. The right side is the sum of the rank-k leverage
/// scores of the selected columns.
pub fn verify_topk_bound(a: &DenseMatrix, s: &[usize], k: usize) -> Result<BoundReport> {
    let fac = svd_dm(a.as_dmatrix(), DEFAULT_RANK_TOL, None)?;
    if k == 0 || k > fac.numerical_rank() {
        return Err(Error::IndexBeyondRank { index: k, rank: fac.numerical_rank() });
    }
    validate_columns(s, a.cols())?;

    let c = a.column_subset(s)?;
    let qc = basis_dm(c.as_dmatrix(), DEFAULT_RANK_TOL, "verify_topk_bound")?;
    let u_k = fac.u_columns(&IndexSet::prefix(k)?)?;
    let lhs = captured_energy(&qc, &u_k);

    let scores = rank_k_leverage_scores(&fac, k)?;
    let rhs: f64 = s.iter().map(|&j| scores.scores()[j - 1]).sum();

    Ok(BoundReport::new(
        "theorem.topk_angles",
        lhs,
        rhs,
        DEFAULT_BOUND_TOL,
        format!("k={k} |S|={}", s.len()),
    ))
}

/// The general-set angle bound under both sigma_omega conventions, plus the
/// epsilon form when its premise holds.
#[derive(Debug, Clone)]
pub struct GeneralBoundChecks {
    /// lhs >= mass - (sigma_omega^2/sigma_mu^2)(|R| - mass), proof convention
    /// (sigma_omega over M = { i < max R, i not in R }).
    pub lemma_proof: BoundReport,
    /// Same inequality with sigma_omega over the full complement of R.
    pub lemma_statement: BoundReport,
    /// lhs >= mass - epsilon, emitted when mass >= |R| - eps sigma_mu^2 /
    /// (2 sigma_omega^2) under the proof convention.
    pub epsilon_form: Option<BoundReport>,
    /// ||V_R^T S||_F^2, shared by all right-hand sides.
    pub mass: f64,
}

impl GeneralBoundChecks {
    pub fn all_satisfied(&self) -> bool {
        self.lemma_proof.satisfied
            && self.lemma_statement.satisfied
            && self.epsilon_form.as_ref().is_none_or(|r| r.satisfied)
    }

    pub fn reports(&self) -> Vec<&BoundReport> {
        let mut out = vec![&self.lemma_proof, &self.lemma_statement];
        if let Some(r) = &self.epsilon_form {
            out.push(r);
        }
        out
    }
}

/// Verify ||C C^+ U_R||_F^2 against the generalized-leverage-score mass for
/// an arbitrary index set R, reporting both sigma_omega conventions. When the
/// epsilon-form premise holds for the supplied `epsilon`, that form is
/// checked as well.
pub fn verify_general_bound(
    a: &DenseMatrix,
    s: &[usize],
    r: &IndexSet,
    epsilon: f64,
) -> Result<GeneralBoundChecks> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let fac = svd_dm(a.as_dmatrix(), DEFAULT_RANK_TOL, None)?;
    if r.max() > fac.numerical_rank() {
        return Err(Error::IndexBeyondRank { index: r.max(), rank: fac.numerical_rank() });
    }
    validate_columns(s, a.cols())?;

    let c = a.column_subset(s)?;
    let qc = basis_dm(c.as_dmatrix(), DEFAULT_RANK_TOL, "verify_general_bound")?;
    let u_r = fac.u_columns(r)?;
    let lhs = captured_energy(&qc, &u_r);

    let scores = generalized_leverage_scores(&fac, r)?;
    let mass: f64 = s.iter().map(|&j| scores.scores()[j - 1]).sum();
    let r_len = r.len() as f64;

    let mut reports = Vec::with_capacity(2);
    for mode in [SigmaOmegaMode::Proof, SigmaOmegaMode::Statement] {
        let (mu, omega) = sigma_mu_omega(&fac, r, mode)?;
        let rhs = mass - (omega * omega) / (mu * mu) * (r_len - mass);
        let name = match mode {
            SigmaOmegaMode::Proof => "lemma.general_angles[proof]",
            SigmaOmegaMode::Statement => "lemma.general_angles[statement]",
        };
        reports.push(BoundReport::new(
            name,
            lhs,
            rhs,
            DEFAULT_BOUND_TOL,
            format!("R={r} |S|={} sigma_mu={mu:.6e} sigma_omega={omega:.6e} ({mode})", s.len()),
        ));
    }
    let lemma_statement = reports.pop().unwrap();
    let lemma_proof = reports.pop().unwrap();

    let (mu, omega) = sigma_mu_omega(&fac, r, SigmaOmegaMode::Proof)?;
    let premise = omega == 0.0 || mass >= r_len - epsilon * mu * mu / (2.0 * omega * omega);
    let epsilon_form = premise.then(|| {
        BoundReport::new(
            "theorem.epsilon_form",
            lhs,
            mass - epsilon,
            DEFAULT_BOUND_TOL,
            format!("R={r} epsilon={epsilon} (premise met, proof convention)"),
        )
    });

    Ok(GeneralBoundChecks { lemma_proof, lemma_statement, epsilon_form, mass })
}

/// The GCSS guarantee value (1 - epsilon)(1 - delta) ||B||_F^2.
pub fn gcss_bound_value(epsilon: f64, delta: f64, b: &DenseMatrix) -> f64 {
    (1.0 - epsilon) * (1.0 - delta) * b.frob_norm_sq()
}

/// The sparse-CCA guarantee value (1 - epsilon)^2 (1 - delta)^2 q.
pub fn cca_bound_value(epsilon: f64, delta: f64, q: f64) -> f64 {
    (1.0 - epsilon).powi(2) * (1.0 - delta).powi(2) * q
}

/// Number of columns sufficient to reach mass k - eps sigma_mu^2 / (2
/// sigma_omega^2) when the scores decay as l_i = l_1 / i^(1+eta):
///
/// c = max{ (4 k so^2 / (eps sm^2))^(1/(1+eta)) - 1,
///          (4 k so^2 / (eps eta sm^2))^(1/eta) - 1 }
///
/// rounded up and clamped to at least 1 (both branches go to -1 when
/// sigma_omega = 0).
pub fn powerlaw_column_count(
    k: usize,
    epsilon: f64,
    eta: f64,
    sigma_omega: f64,
    sigma_mu: f64,
) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    if !(sigma_mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma_mu must be positive, got {sigma_mu}"
        )));
    }
    if sigma_omega < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma_omega must be non-negative, got {sigma_omega}"
        )));
    }
    let ratio_sq = (sigma_omega * sigma_omega) / (sigma_mu * sigma_mu);
    let base = 4.0 * k as f64 * ratio_sq / epsilon;
    let first = base.powf(1.0 / (1.0 + eta)) - 1.0;
    let second = (base / eta).powf(1.0 / eta) - 1.0;
    let c = first.max(second).ceil();
    Ok(if c < 1.0 { 1 } else { c as usize })
}

/// sigma_1 / sigma_rho: the loosest admissible sigma_omega/sigma_mu
/// replacement (any index set's ratio is bounded by the condition number).
/// None for a degenerate (zero) factorization.
pub fn condition_number(fac: &SvdFactors) -> Option<f64> {
    if fac.numerical_rank() == 0 {
        return None;
    }
    Some(fac.sigma()[0] / fac.sigma()[fac.numerical_rank() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn mat(rows: usize, cols: usize, row_major: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |r, c| row_major[r * cols + c]).unwrap()
    }

    fn seeded(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn topk_equality_with_all_columns() {
        let a = seeded(6, 5, 1);
        for k in 1..=3 {
            let rep = verify_topk_bound(&a, &[1, 2, 3, 4, 5], k).unwrap();
            assert!(rep.satisfied);
            assert_abs_diff_eq!(rep.lhs, k as f64, epsilon = 1e-9);
            assert_abs_diff_eq!(rep.rhs, k as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn topk_disjoint_subspaces() {
        let a = mat(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let rep = verify_topk_bound(&a, &[3], 1).unwrap();
        assert_abs_diff_eq!(rep.lhs, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.rhs, 0.0, epsilon = 1e-12);
        assert!(rep.satisfied);
    }

    #[test]
    fn topk_rejects_bad_input() {
        let a = seeded(4, 4, 2);
        assert!(verify_topk_bound(&a, &[], 1).is_err());
        assert!(verify_topk_bound(&a, &[1, 1], 1).is_err());
        assert!(verify_topk_bound(&a, &[5], 1).is_err());
        assert!(verify_topk_bound(&a, &[1], 9).is_err());
    }

    #[test]
    fn general_bound_full_selection() {
        let a = seeded(7, 6, 3);
        let r = IndexSet::new(vec![2, 5]).unwrap();
        let checks =
            verify_general_bound(&a, &[1, 2, 3, 4, 5, 6], &r, 0.2).unwrap();
        assert!(checks.all_satisfied());
        assert_abs_diff_eq!(checks.lemma_proof.lhs, r.len() as f64, epsilon = 1e-9);
        assert!(checks.mass <= r.len() as f64 + 1e-9);
    }

    #[test]
    fn prefix_set_recovers_topk_bound() {
        // with R = {1..k}, M is empty, sigma_omega = 0, and the proof-side
        // rhs equals the mass exactly
        let a = seeded(6, 6, 4);
        let r = IndexSet::prefix(2).unwrap();
        let checks = verify_general_bound(&a, &[2, 4], &r, 0.2).unwrap();
        assert_abs_diff_eq!(checks.lemma_proof.rhs, checks.mass, epsilon = 1e-12);
        let topk = verify_topk_bound(&a, &[2, 4], 2).unwrap();
        assert_abs_diff_eq!(topk.rhs, checks.mass, epsilon = 1e-12);
    }

    #[test]
    fn proof_convention_is_never_looser() {
        let a = seeded(9, 7, 5);
        for (s, r) in [
            (vec![1, 4, 6], vec![3, 5]),
            (vec![2, 3], vec![2, 4, 6]),
            (vec![5], vec![1, 6]),
        ] {
            let checks =
                verify_general_bound(&a, &s, &IndexSet::new(r).unwrap(), 0.2).unwrap();
            assert!(checks.lemma_proof.rhs >= checks.lemma_statement.rhs - 1e-12);
            assert!(checks.lemma_proof.satisfied);
            assert!(checks.lemma_statement.satisfied);
        }
    }

    #[test]
    fn bound_values() {
        let b = seeded(4, 2, 6);
        let bn = b.frob_norm_sq();
        assert_abs_diff_eq!(gcss_bound_value(0.0, 0.0, &b), bn, epsilon = 1e-12);
        assert_abs_diff_eq!(gcss_bound_value(1.0, 0.3, &b), 0.0, epsilon = 1e-12);
        let two = DenseMatrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(gcss_bound_value(0.1, 0.1, &two), 1.62, epsilon = 1e-12);

        assert_abs_diff_eq!(cca_bound_value(0.0, 0.0, 2.5), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cca_bound_value(0.3, 1.0, 2.5), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cca_bound_value(0.1, 0.1, 3.0), 0.9_f64.powi(4) * 3.0, epsilon = 1e-12);

        // monotone decreasing in epsilon and delta
        assert!(gcss_bound_value(0.2, 0.1, &b) < gcss_bound_value(0.1, 0.1, &b));
        assert!(cca_bound_value(0.1, 0.2, 3.0) < cca_bound_value(0.1, 0.1, 3.0));
    }

    #[test]
    fn powerlaw_count_examples() {
        assert_eq!(powerlaw_column_count(4, 1.0, 1.0, 1.0, 1.0).unwrap(), 15);
        assert_eq!(powerlaw_column_count(5, 0.5, 1.0, 0.0, 1.0).unwrap(), 1);
        assert_eq!(powerlaw_column_count(10, 0.5, 2.0, 2.0, 1.0).unwrap(), 12);
        assert!(powerlaw_column_count(5, 0.5, 1.0, 1.0, 0.0).is_err());
        assert!(powerlaw_column_count(5, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn condition_number_wrapper() {
        let a = mat(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let fac = svd_dm(a.as_dmatrix(), DEFAULT_RANK_TOL, None).unwrap();
        assert_abs_diff_eq!(condition_number(&fac).unwrap(), 3.0, epsilon = 1e-12);
    }
}
