//! The selection algorithms: generalized deterministic leverage-score sampling
//! for GCSS, its two-sided variant for sparse CCA, and the greedy and
//! uniform-random baselines they are compared against.

use crate::error::{Error, Result};
use crate::leverage::{generalized_leverage_scores, LeverageScores};
use crate::linalg::{
    captured_energy, projection_energy_dm, svd_dm, DenseMatrix, IndexSet, SvdFactors,
    DEFAULT_RANK_TOL,
};
use crate::par::{for_each_mut, map_indexed, Exec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which convention defines sigma_omega for an index set R.
///
/// The bound's statement takes the maximum singular value outside R; its
/// proof only needs the maximum over M = { i : i < max(R), i not in R },
/// which is never larger. Verifiers and algorithms default to the proof
/// convention; the statement convention is available for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaOmegaMode {
    #[default]
    Proof,
    Statement,
}

impl std::fmt::Display for SigmaOmegaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaOmegaMode::Proof => write!(f, "proof"),
            SigmaOmegaMode::Statement => write!(f, "statement"),
        }
    }
}

/// (sigma_mu, sigma_omega) for the set `r` under the given convention.
/// sigma_omega is 0 when the relevant complement is empty.
pub fn sigma_mu_omega(fac: &SvdFactors, r: &IndexSet, mode: SigmaOmegaMode) -> Result<(f64, f64)> {
    let rho = fac.numerical_rank();
    if r.max() > rho {
        return Err(Error::IndexBeyondRank { index: r.max(), rank: rho });
    }
    // singular values are non-increasing, so the minimum over R sits at max(R)
    let sigma_mu = fac.sigma_at(r.max())?;
    let limit = match mode {
        SigmaOmegaMode::Proof => r.max(),
        SigmaOmegaMode::Statement => rho + 1,
    };
    // the largest singular value outside R is at the smallest missing index
    let mut sigma_omega = 0.0;
    for i in 1..limit {
        if !r.contains(i) {
            sigma_omega = fac.sigma_at(i)?;
            break;
        }
    }
    Ok((sigma_mu, sigma_omega))
}

/// Ordered column selection produced by mass-threshold sampling.
#[derive(Debug, Clone)]
pub struct ColumnSelection {
    indices: Vec<usize>,
    achieved_mass: f64,
    threshold: f64,
    satisfied: bool,
}

impl ColumnSelection {
    /// 1-based column indices in selection order (non-increasing score).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn achieved_mass(&self) -> f64 {
        self.achieved_mass
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn satisfied(&self) -> bool {
        self.satisfied
    }
}

/// Outcome of the singular-set step (step 1 of the GCSS algorithm).
#[derive(Debug, Clone)]
pub struct SingularSetChoice {
    pub set: IndexSet,
    /// ||U_R^T B||_F^2 achieved by the chosen set.
    pub energy: f64,
    /// The energy target that was aimed for.
    pub target: f64,
    pub target_met: bool,
}

/// All candidate singular indices with their projection energies onto `b`,
/// sorted by energy descending, ties broken by lower index.
pub(crate) fn rank_indices_by_energy(fac: &SvdFactors, b: &DMatrix<f64>) -> Vec<(usize, f64)> {
    let proj = fac.u().transpose() * b; // rho x p
    let mut ranked: Vec<(usize, f64)> = (0..fac.numerical_rank())
        .map(|i| (i + 1, proj.row(i).iter().map(|v| v * v).sum()))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked
}

pub(crate) fn choose_singular_set_with_target(
    fac: &SvdFactors,
    b: &DMatrix<f64>,
    target: f64,
    size_cap: Option<usize>,
) -> Result<SingularSetChoice> {
    if fac.numerical_rank() == 0 {
        return Err(Error::ZeroRank { context: "choose_singular_set" });
    }
    if fac.u().nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            context: "choose_singular_set",
            left_rows: fac.u().nrows(),
            left_cols: fac.numerical_rank(),
            right_rows: b.nrows(),
            right_cols: b.ncols(),
        });
    }
    let ranked = rank_indices_by_energy(fac, b);
    let tol = 1e-12 * target.abs().max(1.0);

    let take = match size_cap {
        Some(cap) => {
            if cap == 0 {
                return Err(Error::InvalidParameter("r size cap must be >= 1".into()));
            }
            cap.min(ranked.len())
        }
        None => {
            let mut cum = 0.0;
            let mut take = 0;
            for (pos, &(_, e)) in ranked.iter().enumerate() {
                cum += e;
                take = pos + 1;
                if cum >= target - tol {
                    break;
                }
            }
            take
        }
    };

    let chosen: Vec<usize> = ranked[..take].iter().map(|&(i, _)| i).collect();
    let energy: f64 = ranked[..take].iter().map(|&(_, e)| e).sum();
    Ok(SingularSetChoice {
        set: IndexSet::new(chosen)?,
        energy,
        target,
        target_met: energy >= target - tol,
    })
}

/// Step 1 of the GCSS algorithm: the shortest energy-greedy set R with
/// ||U_R^T B||_F^2 >= (1 - delta) ||B||_F^2, or the top-`size_cap` indices
/// when a cap is given (the experimental mode). When even the full set
/// misses the target (B has mass outside the range of A), the full set is
/// returned with `target_met` false; the caller decides what to do.
pub fn choose_singular_set(
    fac: &SvdFactors,
    b: &DenseMatrix,
    delta: f64,
    size_cap: Option<usize>,
) -> Result<SingularSetChoice> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let b_norm_sq = b.frob_norm_sq();
    if b_norm_sq <= 0.0 {
        return Err(Error::InvalidParameter("target matrix B is zero".into()));
    }
    choose_singular_set_with_target(fac, b.as_dmatrix(), (1.0 - delta) * b_norm_sq, size_cap)
}

/// Step 2 of the GCSS algorithm: deterministically take columns in
/// non-increasing score order (ties by lower index) until the cumulative
/// mass reaches `threshold`, with a 1e-9 absolute slack. At least one column
/// is always taken. Errors when the threshold exceeds the total mass.
pub fn select_columns_to_mass(scores: &LeverageScores, threshold: f64) -> Result<ColumnSelection> {
    let total = scores.total();
    if threshold > total + 1e-12 {
        return Err(Error::UnsatisfiableMass {
            threshold,
            total,
            shortfall: threshold - total,
        });
    }
    let mut order: Vec<usize> = (0..scores.scores().len()).collect();
    order.sort_by(|&a, &b| {
        scores.scores()[b].partial_cmp(&scores.scores()[a]).unwrap().then(a.cmp(&b))
    });

    let mut indices = Vec::new();
    let mut cum = 0.0;
    for &col in &order {
        indices.push(col + 1);
        cum += scores.scores()[col];
        if cum >= threshold - 1e-9 {
            break;
        }
    }
    Ok(ColumnSelection { indices, achieved_mass: cum, threshold, satisfied: true })
}

/// Options for [`gcss`]. `r_override` pins the singular set explicitly,
/// `r_size_cap` switches step 1 to a fixed-size set; otherwise R is grown
/// until it captures a (1 - delta) fraction of ||B||_F^2.
#[derive(Debug, Clone)]
pub struct GcssOptions {
    pub epsilon: f64,
    pub delta: f64,
    pub r_size_cap: Option<usize>,
    pub r_override: Option<IndexSet>,
    pub sigma_omega_mode: SigmaOmegaMode,
    pub rank_tol: f64,
}

impl GcssOptions {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            r_size_cap: None,
            r_override: None,
            sigma_omega_mode: SigmaOmegaMode::default(),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Result of the GCSS algorithm with everything needed to audit its bound.
#[derive(Debug, Clone)]
pub struct GcssResult {
    pub selection: ColumnSelection,
    pub r_set: IndexSet,
    pub sigma_mu: f64,
    pub sigma_omega: f64,
    /// ||C C^+ B||_F^2 for the selected columns C.
    pub objective: f64,
    /// The guarantee value (1 - epsilon)(1 - delta) ||B||_F^2.
    pub bound: f64,
    pub b_norm_sq: f64,
    /// ||U_R^T B||_F^2 achieved in step 1 and its target.
    pub r_energy: f64,
    pub r_target: f64,
    pub r_target_met: bool,
    /// True when both internal thresholds were met, i.e. the bound is claimed.
    pub thresholds_met: bool,
}

/// Generalized deterministic leverage-score sampling for GCSS.
///
/// Composes the singular-set choice (delta), generalized leverage scores,
/// and mass-threshold selection with threshold |R| - eps^2 sigma_mu^2 / (8
/// sigma_omega^2). When sigma_omega is 0 the threshold degenerates to |R|
/// (select to full mass). Guarantee when both thresholds are met:
/// objective >= (1 - epsilon)(1 - delta) ||B||_F^2.
pub fn gcss(a: &DenseMatrix, b: &DenseMatrix, opts: &GcssOptions) -> Result<GcssResult> {
    for (name, v) in [("epsilon", opts.epsilon), ("delta", opts.delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "gcss",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let fac = svd_dm(a.as_dmatrix(), opts.rank_tol, None)?;
    if fac.numerical_rank() == 0 {
        return Err(Error::ZeroRank { context: "gcss" });
    }
    let b_norm_sq = b.frob_norm_sq();

    let choice = match &opts.r_override {
        Some(r) => {
            let u_r = fac.u_columns(r)?;
            let energy = captured_energy(&u_r, b.as_dmatrix());
            let target = (1.0 - opts.delta) * b_norm_sq;
            SingularSetChoice {
                set: r.clone(),
                energy,
                target,
                target_met: energy >= target - 1e-12 * target.abs().max(1.0),
            }
        }
        None => choose_singular_set(&fac, b, opts.delta, opts.r_size_cap)?,
    };

    let (sigma_mu, sigma_omega) = sigma_mu_omega(&fac, &choice.set, opts.sigma_omega_mode)?;
    let r_len = choice.set.len() as f64;
    let threshold = if sigma_omega > 0.0 {
        r_len - opts.epsilon.powi(2) * sigma_mu.powi(2) / (8.0 * sigma_omega.powi(2))
    } else {
        r_len
    };

    let scores = generalized_leverage_scores(&fac, &choice.set)?;
    let selection = match select_columns_to_mass(&scores, threshold) {
        Ok(sel) => sel,
        Err(Error::UnsatisfiableMass { threshold, total, .. }) => {
            // partial result: take everything, flag unsatisfied, claim no bound
            let mut order: Vec<usize> = (1..=scores.scores().len()).collect();
            order.sort_by(|&x, &y| {
                scores.scores()[y - 1]
                    .partial_cmp(&scores.scores()[x - 1])
                    .unwrap()
                    .then(x.cmp(&y))
            });
            ColumnSelection { indices: order, achieved_mass: total, threshold, satisfied: false }
        }
        Err(e) => return Err(e),
    };

    let c = a.column_subset(selection.indices())?;
    let objective = projection_energy_dm(c.as_dmatrix(), b.as_dmatrix(), opts.rank_tol)?;
    let bound = (1.0 - opts.epsilon) * (1.0 - opts.delta) * b_norm_sq;
    let thresholds_met = choice.target_met && selection.satisfied;

    Ok(GcssResult {
        selection,
        r_set: choice.set,
        sigma_mu,
        sigma_omega,
        objective,
        bound,
        b_norm_sq,
        r_energy: choice.energy,
        r_target: choice.target,
        r_target_met: choice.target_met,
        thresholds_met,
    })
}

/// Options for [`sparse_cca`].
#[derive(Debug, Clone)]
pub struct CcaOptions {
    pub epsilon: f64,
    pub delta: f64,
    pub sigma_omega_mode: SigmaOmegaMode,
    pub rank_tol: f64,
}

impl CcaOptions {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            sigma_omega_mode: SigmaOmegaMode::default(),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Result of the two-sided sparse CCA selection.
#[derive(Debug, Clone)]
pub struct CcaResult {
    /// Columns selected from A and from B.
    pub s_a: ColumnSelection,
    pub s_b: ColumnSelection,
    pub r_set: IndexSet,
    pub t_set: IndexSet,
    /// q = ||Q_A^T Q_B||_F^2, the total sum of squared canonical correlations.
    pub q: f64,
    /// q' = ||Q_AS^T Q_B||_F^2 after the first selection pass.
    pub q_prime: f64,
    /// ||W^T W'||_F^2 for orthonormal bases W, W' of AS and BS'.
    pub achieved: f64,
    /// (1 - epsilon)^2 (1 - delta)^2 q.
    pub bound: f64,
    pub r_target_met: bool,
    pub t_target_met: bool,
    pub thresholds_met: bool,
}

/// Generalized deterministic leverage-score sampling for sparse CCA.
///
/// Runs the one-sided selection twice: columns of A against Q_B, then columns
/// of B against Q_AS. Inputs are used as given; callers wanting CCA semantics
/// must mean-center columns beforehand (see `io::split_columns`).
pub fn sparse_cca(a: &DenseMatrix, b: &DenseMatrix, opts: &CcaOptions) -> Result<CcaResult> {
    for (name, v) in [("epsilon", opts.epsilon), ("delta", opts.delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "sparse_cca",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let fac_a = svd_dm(a.as_dmatrix(), opts.rank_tol, None)?;
    let fac_b = svd_dm(b.as_dmatrix(), opts.rank_tol, None)?;
    if fac_a.numerical_rank() == 0 || fac_b.numerical_rank() == 0 {
        return Err(Error::ZeroRank { context: "sparse_cca" });
    }
    let q_a = fac_a.u();
    let q_b = fac_b.u();
    let q = captured_energy(q_a, q_b);

    // pass 1: columns of A against Q_B
    let s_a = one_sided_pass(&fac_a, q_b, (1.0 - opts.delta) * q, opts)?;
    let c = a.column_subset(s_a.selection.indices())?;
    let q_as = crate::linalg::basis_dm(c.as_dmatrix(), opts.rank_tol, "sparse_cca")?;
    let q_prime = captured_energy(&q_as, q_b);

    // pass 2: columns of B against Q_AS
    let s_b = one_sided_pass(&fac_b, &q_as, (1.0 - opts.delta) * q_prime, opts)?;
    let c_b = b.column_subset(s_b.selection.indices())?;
    let w_prime = crate::linalg::basis_dm(c_b.as_dmatrix(), opts.rank_tol, "sparse_cca")?;
    let achieved = captured_energy(&q_as, &w_prime);

    let bound = (1.0 - opts.epsilon).powi(2) * (1.0 - opts.delta).powi(2) * q;
    let thresholds_met = s_a.target_met && s_a.selection.satisfied
        && s_b.target_met && s_b.selection.satisfied;

    Ok(CcaResult {
        s_a: s_a.selection,
        s_b: s_b.selection,
        r_set: s_a.set,
        t_set: s_b.set,
        q,
        q_prime,
        achieved,
        bound,
        r_target_met: s_a.target_met,
        t_target_met: s_b.target_met,
        thresholds_met,
    })
}

struct OneSidedPass {
    selection: ColumnSelection,
    set: IndexSet,
    target_met: bool,
}

fn one_sided_pass(
    fac: &SvdFactors,
    target_basis: &DMatrix<f64>,
    energy_target: f64,
    opts: &CcaOptions,
) -> Result<OneSidedPass> {
    let choice = choose_singular_set_with_target(fac, target_basis, energy_target, None)?;
    let (sigma_mu, sigma_omega) = sigma_mu_omega(fac, &choice.set, opts.sigma_omega_mode)?;
    let r_len = choice.set.len() as f64;
    let threshold = if sigma_omega > 0.0 {
        r_len - opts.epsilon.powi(2) * sigma_mu.powi(2) / (8.0 * sigma_omega.powi(2))
    } else {
        r_len
    };
    let scores = generalized_leverage_scores(fac, &choice.set)?;
    let selection = select_columns_to_mass(&scores, threshold)?;
    Ok(OneSidedPass { selection, set: choice.set, target_met: choice.target_met })
}

/// Result of the greedy forward-selection baseline.
#[derive(Debug, Clone)]
pub struct GreedyResult {
    /// 1-based column indices in pick order.
    pub indices: Vec<usize>,
    /// ||C_t C_t^+ B||_F^2 after each pick; non-decreasing.
    pub trace: Vec<f64>,
    /// True when every remaining column had zero marginal gain before k picks.
    pub stopped_early: bool,
}

// Residuals are rebuilt from the original columns against the accumulated
// basis every REORTH_EVERY picks to control floating-point drift.
const REORTH_EVERY: usize = 50;

/// Greedy GCSS: repeatedly add the column of `a` that maximizes the increase
/// of ||C C^+ B||_F^2 (ties by lower index), with rank-one residual updates
/// so each iteration costs O(mn).
pub fn greedy_gcss(a: &DenseMatrix, b: &DenseMatrix, k: usize) -> Result<GreedyResult> {
    greedy_gcss_with_exec(a, b, k, Exec::Auto)
}

/// Sequential twin of [`greedy_gcss`]; produces identical values.
pub fn greedy_gcss_serial(a: &DenseMatrix, b: &DenseMatrix, k: usize) -> Result<GreedyResult> {
    greedy_gcss_with_exec(a, b, k, Exec::Serial)
}

pub(crate) fn greedy_gcss_with_exec(
    a: &DenseMatrix,
    b: &DenseMatrix,
    k: usize,
    exec: Exec,
) -> Result<GreedyResult> {
    let (m, n) = (a.rows(), a.cols());
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k must lie in 1..={n}, got {k}")));
    }
    if m != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "greedy_gcss",
            left_rows: m,
            left_cols: n,
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let am = a.as_dmatrix();
    let bm = b.as_dmatrix();
    let col_norms: Vec<f64> = (0..n).map(|j| am.column(j).norm()).collect();
    let gain_floor = 1e-14 * b.frob_norm_sq().max(1.0);

    // Per-candidate state: the residual r_j of column j against the picked
    // basis, and w_j = B^T r_j so gains never touch B again. Both admit
    // rank-one downdates per pick, keeping each iteration at O(n(m+p)).
    struct Candidate {
        residual: DVector<f64>,
        target_proj: DVector<f64>,
        picked: bool,
    }
    let mut cands: Vec<Candidate> = (0..n)
        .map(|j| {
            let residual = am.column(j).into_owned();
            let target_proj = bm.transpose() * &residual;
            Candidate { residual, target_proj, picked: false }
        })
        .collect();

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut indices = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    let mut objective = 0.0;
    let mut stopped_early = false;

    for pick in 0..k {
        // marginal gain of column j: ||B^T r_j||^2 / ||r_j||^2
        let mut best: Option<(usize, f64)> = None;
        for (j, c) in cands.iter().enumerate() {
            if c.picked {
                continue;
            }
            let rn_sq = c.residual.norm_squared();
            if rn_sq.sqrt() <= 1e-12 * col_norms[j].max(1e-300) {
                continue; // column exhausted by the current basis
            }
            let gain = c.target_proj.norm_squared() / rn_sq;
            if best.is_none_or(|(_, bg)| gain > bg) {
                best = Some((j, gain));
            }
        }
        let (j_star, gain) = match best {
            Some((j, g)) if g > gain_floor => (j, g),
            _ => {
                stopped_early = true;
                break;
            }
        };

        let q = cands[j_star].residual.normalize();
        let bq = bm.transpose() * &q;
        cands[j_star].picked = true;
        indices.push(j_star + 1);
        objective += gain;
        trace.push(objective);
        basis.push(q.clone());

        if (pick + 1) % REORTH_EVERY == 0 {
            // rebuild from the original columns against the accumulated basis
            for_each_mut(exec, &mut cands, |j, c| {
                if c.picked {
                    return;
                }
                let mut r = am.column(j).into_owned();
                for qv in &basis {
                    let coef = qv.dot(&r);
                    r.axpy(-coef, qv, 1.0);
                }
                c.target_proj = bm.transpose() * &r;
                c.residual = r;
            });
        } else {
            for_each_mut(exec, &mut cands, |_, c| {
                if c.picked {
                    return;
                }
                let coef = q.dot(&c.residual);
                c.residual.axpy(-coef, &q, 1.0);
                c.target_proj.axpy(-coef, &bq, 1.0);
            });
        }
    }

    Ok(GreedyResult { indices, trace, stopped_early })
}

/// One trial of the uniform-random baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTrial {
    /// Sorted 1-based column indices drawn for this trial.
    pub columns: Vec<usize>,
    pub objective: f64,
}

/// Per-trial objectives and their mean for the uniform-random baseline.
#[derive(Debug, Clone)]
pub struct RandomBaselineResult {
    pub trials: Vec<RandomTrial>,
    pub mean: f64,
}

/// The columns drawn for trial `trial` of a run seeded with `seed`: a partial
/// Fisher-Yates shuffle driven by ChaCha8 seeded with `seed` on stream
/// `trial + 1`. Exposed so external tooling can re-derive any trial.
pub fn trial_columns(n_cols: usize, k: usize, seed: u64, trial: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    let mut pool: Vec<usize> = (1..=n_cols).collect();
    for i in 0..k {
        let j = rng.random_range(i..n_cols);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Uniform-random baseline: `trials` draws of k distinct columns, each scored
/// by ||C C^+ B||_F^2. Per-trial seeds derive from (seed, trial index), so
/// parallel and serial runs return identical values.
pub fn random_baseline(
    a: &DenseMatrix,
    b: &DenseMatrix,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<RandomBaselineResult> {
    random_baseline_with_exec(a, b, k, trials, seed, Exec::Auto)
}

/// Sequential twin of [`random_baseline`]; produces identical values.
pub fn random_baseline_serial(
    a: &DenseMatrix,
    b: &DenseMatrix,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<RandomBaselineResult> {
    random_baseline_with_exec(a, b, k, trials, seed, Exec::Serial)
}

pub(crate) fn random_baseline_with_exec(
    a: &DenseMatrix,
    b: &DenseMatrix,
    k: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<RandomBaselineResult> {
    let n = a.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k must lie in 1..={n}, got {k}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "random_baseline",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }

    let results = map_indexed(exec, trials, |t| {
        let columns = trial_columns(n, k, seed, t as u64);
        let c = a.column_subset(&columns).expect("validated indices");
        let objective = projection_energy_dm(c.as_dmatrix(), b.as_dmatrix(), DEFAULT_RANK_TOL)
            .expect("projection on validated inputs");
        RandomTrial { columns, objective }
    });
    let mean = results.iter().map(|t| t.objective).sum::<f64>() / trials as f64;
    Ok(RandomBaselineResult { trials: results, mean })
}
