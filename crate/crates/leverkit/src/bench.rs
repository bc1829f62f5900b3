//! Benchmark harness: the retained-rank sweep over |R| fractions and k values
//! comparing GLS selection against greedy and uniform-random baselines, and
//! the adversarial-instance sweep over theta.

use crate::error::{Error, Result};
use crate::instances::altschuler_instance;
use crate::io::{fmt_f64, RunParams, RunReport, Timings};
use crate::leverage::generalized_leverage_scores;
use crate::linalg::{captured_energy, projection_energy_dm, svd_dm, DenseMatrix, IndexSet, SvdFactors};
use crate::par::{map_indexed, Exec};
use crate::selection::{greedy_gcss_with_exec, rank_indices_by_energy};
use std::time::Instant;

/// Which algorithms a bench sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Gls,
    Greedy,
    Random,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gls" => Ok(Algorithm::Gls),
            "greedy" => Ok(Algorithm::Greedy),
            "random" => Ok(Algorithm::Random),
            other => Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Sweep configuration. The defaults reproduce the experimental protocol:
/// candidates capped to the leading singular values carrying 75% of
/// ||A||_F^2, |R| set to 1/10, 1/4 and 1/2 of that retained rank.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub retained_energy: f64,
    pub r_fractions: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Trials and seed for the random baseline.
    pub trials: usize,
    pub seed: u64,
    pub rank_tol: f64,
    /// Timings are medians over this many repetitions.
    pub timing_reps: usize,
    /// Omit timing fields from reports (reports become byte-stable).
    pub dry_run: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            retained_energy: 0.75,
            r_fractions: vec![0.1, 0.25, 0.5],
            k_grid: Vec::new(),
            algorithms: vec![Algorithm::Gls, Algorithm::Greedy, Algorithm::Random],
            trials: 100,
            seed: 0,
            rank_tol: crate::linalg::DEFAULT_RANK_TOL,
            timing_reps: 3,
            dry_run: false,
        }
    }
}

/// Number of leading singular values whose squared sum reaches `fraction` of
/// the total squared spectrum. At least 1.
pub fn retained_rank(fac: &SvdFactors, fraction: f64) -> usize {
    let total: f64 = fac.sigma().iter().map(|s| s * s).sum();
    let target = fraction * total;
    let mut cum = 0.0;
    for (i, s) in fac.sigma().iter().enumerate() {
        cum += s * s;
        if cum >= target - 1e-12 * total.max(1.0) {
            return i + 1;
        }
    }
    fac.numerical_rank().max(1)
}

/// Run the sweep. Cells may execute concurrently; all reported values are
/// pure functions of the inputs and seed, so parallel and serial runs agree.
pub fn run_bench(a: &DenseMatrix, b: &DenseMatrix, cfg: &BenchConfig) -> Result<Vec<RunReport>> {
    run_bench_exec(a, b, cfg, Exec::Auto)
}

/// Sequential twin of [`run_bench`]; produces identical values.
pub fn run_bench_serial(a: &DenseMatrix, b: &DenseMatrix, cfg: &BenchConfig) -> Result<Vec<RunReport>> {
    run_bench_exec(a, b, cfg, Exec::Serial)
}

struct BenchCtx<'a> {
    a: &'a DenseMatrix,
    b: &'a DenseMatrix,
    fac: SvdFactors,
    svd_ms: f64,
    denominator: f64,
    retained: usize,
    /// (index, energy) over all retained candidates, energy-descending.
    ranked: Vec<(usize, f64)>,
    cfg: &'a BenchConfig,
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Gls { fraction: f64, k: usize },
    Greedy { k: usize },
    Random { k: usize },
}

fn run_bench_exec(
    a: &DenseMatrix,
    b: &DenseMatrix,
    cfg: &BenchConfig,
    exec: Exec,
) -> Result<Vec<RunReport>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "run_bench",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    if !(cfg.retained_energy > 0.0 && cfg.retained_energy <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "retained_energy must lie in (0, 1], got {}",
            cfg.retained_energy
        )));
    }
    if cfg.r_fractions.is_empty() || cfg.r_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::InvalidParameter("r_fractions must be non-empty, each in (0, 1]".into()));
    }
    if cfg.k_grid.is_empty() {
        return Err(Error::InvalidParameter("k_grid must be non-empty".into()));
    }
    if let Some(&bad) = cfg.k_grid.iter().find(|&&k| k == 0 || k > a.cols()) {
        return Err(Error::InvalidParameter(format!(
            "k = {bad} outside 1..={} in k_grid",
            a.cols()
        )));
    }
    if cfg.algorithms.is_empty() {
        return Err(Error::InvalidParameter("no algorithms selected".into()));
    }
    if cfg.timing_reps == 0 {
        return Err(Error::InvalidParameter("timing_reps must be >= 1".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }

    // SVD once per input, reused by every cell
    let (fac, svd_ms) = timed(cfg.timing_reps, || svd_dm(a.as_dmatrix(), cfg.rank_tol, None))?;
    let fac = fac?;
    if fac.numerical_rank() == 0 {
        return Err(Error::ZeroRank { context: "run_bench" });
    }
    let denominator = captured_energy(fac.u(), b.as_dmatrix());
    let retained = retained_rank(&fac, cfg.retained_energy);
    let ranked: Vec<(usize, f64)> = rank_indices_by_energy(&fac, b.as_dmatrix())
        .into_iter()
        .filter(|&(i, _)| i <= retained)
        .collect();

    let ctx = BenchCtx { a, b, fac, svd_ms, denominator, retained, ranked, cfg };

    let mut cells = Vec::new();
    for alg in &cfg.algorithms {
        match alg {
            Algorithm::Gls => {
                for &fraction in &cfg.r_fractions {
                    for &k in &cfg.k_grid {
                        cells.push(Cell::Gls { fraction, k });
                    }
                }
            }
            Algorithm::Greedy => {
                for &k in &cfg.k_grid {
                    cells.push(Cell::Greedy { k });
                }
            }
            Algorithm::Random => {
                for &k in &cfg.k_grid {
                    cells.push(Cell::Random { k });
                }
            }
        }
    }

    let reports = map_indexed(exec, cells.len(), |i| run_cell(&ctx, cells[i], exec));
    Ok(reports)
}

fn run_cell(ctx: &BenchCtx<'_>, cell: Cell, exec: Exec) -> RunReport {
    match cell {
        Cell::Gls { fraction, k } => gls_cell(ctx, fraction, k),
        Cell::Greedy { k } => greedy_cell(ctx, k, exec),
        Cell::Random { k } => random_cell(ctx, k, exec),
    }
}

fn ratio_of(objective: f64, denominator: f64) -> Option<f64> {
    if denominator > 1e-300 {
        Some(objective / denominator)
    } else {
        Some(0.0)
    }
}

fn gls_cell(ctx: &BenchCtx<'_>, fraction: f64, k: usize) -> RunReport {
    let mut rep = RunReport::new("gls", "bench-input");
    rep.r_fraction = Some(fraction);
    rep.params = RunParams {
        k: Some(k),
        rank_tol: Some(ctx.cfg.rank_tol),
        ..RunParams::default()
    };

    let r_size = ((fraction * ctx.retained as f64).round() as usize)
        .clamp(1, ctx.ranked.len().max(1));
    rep.params.r_size = Some(r_size);

    // selection, timed end to end: build R, score, order, truncate to k
    let work = || -> Result<Vec<usize>> {
        let chosen: Vec<usize> = ctx.ranked[..r_size].iter().map(|&(i, _)| i).collect();
        let r_set = IndexSet::new(chosen)?;
        let scores = generalized_leverage_scores(&ctx.fac, &r_set)?;
        let mut order: Vec<usize> = (0..scores.scores().len()).collect();
        order.sort_by(|&x, &y| {
            scores.scores()[y].partial_cmp(&scores.scores()[x]).unwrap().then(x.cmp(&y))
        });
        Ok(order[..k].iter().map(|&c| c + 1).collect())
    };
    let (first, selection_ms) = match timed(ctx.cfg.timing_reps, work) {
        Ok(v) => v,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    let selected = match first {
        Ok(s) => s,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };

    match objective_of(ctx, &selected) {
        Ok(obj) => {
            rep.objective = obj;
            rep.objective_ratio = ratio_of(obj, ctx.denominator);
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    rep.selected = selected;
    if !ctx.cfg.dry_run {
        rep.timings = Some(Timings {
            svd_ms: ctx.svd_ms,
            selection_ms,
            total_ms: ctx.svd_ms + selection_ms,
        });
    }
    rep
}

fn greedy_cell(ctx: &BenchCtx<'_>, k: usize, exec: Exec) -> RunReport {
    let mut rep = RunReport::new("greedy", "bench-input");
    rep.params = RunParams { k: Some(k), ..RunParams::default() };
    let (first, selection_ms) =
        match timed(ctx.cfg.timing_reps, || greedy_gcss_with_exec(ctx.a, ctx.b, k, exec)) {
            Ok(v) => v,
            Err(e) => {
                rep.error = Some(e.to_string());
                return rep;
            }
        };
    match first {
        Ok(res) => {
            rep.objective = res.trace.last().copied().unwrap_or(0.0);
            rep.objective_ratio = ratio_of(rep.objective, ctx.denominator);
            rep.selected = res.indices;
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    if !ctx.cfg.dry_run {
        rep.timings =
            Some(Timings { svd_ms: ctx.svd_ms, selection_ms, total_ms: ctx.svd_ms + selection_ms });
    }
    rep
}

fn random_cell(ctx: &BenchCtx<'_>, k: usize, exec: Exec) -> RunReport {
    let mut rep = RunReport::new("random", "bench-input");
    rep.params = RunParams {
        k: Some(k),
        seed: Some(ctx.cfg.seed),
        trials: Some(ctx.cfg.trials),
        ..RunParams::default()
    };
    let (first, selection_ms) = match timed(ctx.cfg.timing_reps, || {
        crate::selection::random_baseline_with_exec(ctx.a, ctx.b, k, ctx.cfg.trials, ctx.cfg.seed, exec)
    }) {
        Ok(v) => v,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    match first {
        Ok(res) => {
            rep.objective = res.mean;
            rep.objective_ratio = ratio_of(res.mean, ctx.denominator);
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    if !ctx.cfg.dry_run {
        rep.timings =
            Some(Timings { svd_ms: ctx.svd_ms, selection_ms, total_ms: ctx.svd_ms + selection_ms });
    }
    rep
}

fn objective_of(ctx: &BenchCtx<'_>, selected: &[usize]) -> Result<f64> {
    let c = ctx.a.column_subset(selected)?;
    projection_energy_dm(c.as_dmatrix(), ctx.b.as_dmatrix(), ctx.cfg.rank_tol)
}

/// Run `f` `reps` times on a monotonic clock; return the first result and the
/// median elapsed milliseconds.
fn timed<T>(reps: usize, mut f: impl FnMut() -> T) -> Result<(T, f64)> {
    let mut out = None;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t0 = Instant::now();
        let v = f();
        samples.push(t0.elapsed().as_secs_f64() * 1e3);
        if out.is_none() {
            out = Some(v);
        }
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = samples[samples.len() / 2];
    Ok((out.expect("reps >= 1"), median))
}

/// One row of the adversarial-instance sweep.
#[derive(Debug, Clone)]
pub struct Fig1Row {
    pub theta: f64,
    /// ||u_last^T B||^2: energy of B on the last left singular vector.
    pub last_vector_energy: f64,
    /// ||U_{1..rho-1}^T B||^2: energy on all the others.
    pub rest_energy: f64,
    /// ||V_R^T S||_F^2 for S = columns {1, 2} and R = {last index}.
    pub pair_mass: f64,
    /// The guarantee value implied by the achieved step quantities.
    pub bound: f64,
}

/// Sweep the adversarial instance over `thetas`, reporting for each theta the
/// energy split of B across the last singular vector and the rest, the score
/// mass of the optimal pair {1, 2} with respect to R = {last}, and the
/// implied guarantee value.
pub fn figure1_sweep(n: usize, thetas: &[f64]) -> Result<Vec<Fig1Row>> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("theta list is empty".into()));
    }
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let inst = altschuler_instance(n, theta)?;
        let fac = svd_dm(inst.a.as_dmatrix(), crate::linalg::DEFAULT_RANK_TOL, None)?;
        let rho = fac.numerical_rank();
        let r_last = IndexSet::new(vec![rho])?;

        let u = fac.u();
        let bm = inst.b.as_dmatrix();
        let proj = u.transpose() * bm; // rho x 1
        let last_vector_energy = proj[(rho - 1, 0)].powi(2);
        let rest_energy: f64 =
            (0..rho - 1).map(|i| proj[(i, 0)].powi(2)).sum();

        let scores = generalized_leverage_scores(&fac, &r_last)?;
        let pair_mass = scores.scores()[0] + scores.scores()[1];

        // implied parameters: delta from the achieved energy, epsilon from the
        // achieved mass through the step-2 threshold, both clamped
        let sigma_mu = fac.sigma_at(rho)?;
        let sigma_omega = fac.sigma_at(1)?; // M = {1..rho-1} for R = {last}
        let delta_eff = (1.0 - last_vector_energy).clamp(0.0, 1.0);
        let eps_eff =
            (8.0 * (1.0 - pair_mass).max(0.0) * sigma_omega.powi(2) / sigma_mu.powi(2)).sqrt();
        let bound =
            ((1.0 - eps_eff) * (1.0 - delta_eff) * inst.b.frob_norm_sq()).max(0.0);

        rows.push(Fig1Row { theta, last_vector_energy, rest_energy, pair_mass, bound });
    }
    Ok(rows)
}

/// CSV rendering of a figure-1 sweep, one row per theta.
pub fn fig1_csv(rows: &[Fig1Row]) -> String {
    let mut out = String::from("theta,u_last_energy,u_rest_energy,pair_mass,bound\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.theta),
            fmt_f64(r.last_vector_energy),
            fmt_f64(r.rest_energy),
            fmt_f64(r.pair_mass),
            fmt_f64(r.bound)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn seeded(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn strip_timings(mut reports: Vec<RunReport>) -> Vec<RunReport> {
        for r in &mut reports {
            r.timings = None;
        }
        reports
    }

    #[test]
    fn full_rank_grid_hits_ratio_one() {
        let a = DenseMatrix::from_fn(3, 3, |r, c| if r == c { (3 - r) as f64 } else { 0.0 }).unwrap();
        let w = seeded(3, 2, 1);
        let b = DenseMatrix::from_dmatrix(a.as_dmatrix() * w.as_dmatrix()).unwrap();
        let cfg = BenchConfig { k_grid: vec![3], trials: 4, ..BenchConfig::default() };
        let reports = run_bench(&a, &b, &cfg).unwrap();
        for r in &reports {
            assert!(r.error.is_none(), "row error: {:?}", r.error);
            let ratio = r.objective_ratio.unwrap();
            assert_abs_diff_eq!(ratio, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn deterministic_and_serial_equal() {
        let a = seeded(20, 12, 5);
        let b = seeded(20, 4, 6);
        let cfg = BenchConfig { k_grid: vec![2, 5, 9], trials: 6, seed: 77, ..BenchConfig::default() };
        let r1 = strip_timings(run_bench(&a, &b, &cfg).unwrap());
        let r2 = strip_timings(run_bench(&a, &b, &cfg).unwrap());
        assert_eq!(r1, r2);
        let rs = strip_timings(run_bench_serial(&a, &b, &cfg).unwrap());
        assert_eq!(r1, rs);
    }

    #[test]
    fn ratios_bounded_and_greedy_monotone_in_k() {
        let a = seeded(15, 10, 9);
        let b = seeded(15, 3, 10);
        let cfg = BenchConfig { k_grid: vec![1, 3, 6, 10], trials: 5, ..BenchConfig::default() };
        let reports = run_bench(&a, &b, &cfg).unwrap();
        let mut greedy_prev = -1.0;
        for r in &reports {
            let ratio = r.objective_ratio.unwrap();
            assert!((-1e-9..=1.0 + 1e-9).contains(&ratio), "ratio {ratio} out of range");
            if r.algorithm == "greedy" {
                assert!(r.objective >= greedy_prev - 1e-12);
                greedy_prev = r.objective;
            }
        }
    }

    #[test]
    fn gls_selections_are_prefixes_across_k() {
        let a = seeded(18, 14, 21);
        let b = seeded(18, 5, 22);
        let cfg = BenchConfig { k_grid: vec![2, 6, 11], trials: 2, ..BenchConfig::default() };
        let reports = run_bench(&a, &b, &cfg).unwrap();
        for &fraction in &cfg.r_fractions {
            let mut gls: Vec<&RunReport> = reports
                .iter()
                .filter(|r| r.algorithm == "gls" && r.r_fraction == Some(fraction))
                .collect();
            gls.sort_by_key(|r| r.params.k.unwrap());
            for w in gls.windows(2) {
                let small = &w[0].selected;
                let big = &w[1].selected;
                assert_eq!(&big[..small.len()], small.as_slice());
            }
        }
    }

    #[test]
    fn retained_rank_energy_fraction() {
        let a = DenseMatrix::from_fn(4, 4, |r, c| {
            if r == c {
                [4.0, 2.0, 1.0, 0.5][r]
            } else {
                0.0
            }
        })
        .unwrap();
        let fac = svd_dm(a.as_dmatrix(), crate::linalg::DEFAULT_RANK_TOL, None).unwrap();
        // squared spectrum 16, 4, 1, 0.25 (total 21.25): 75% is reached by
        // the first value alone, 95% (20.19) needs three
        assert_eq!(retained_rank(&fac, 0.75), 1);
        assert_eq!(retained_rank(&fac, 0.95), 3);
        assert_eq!(retained_rank(&fac, 1.0), 4);
    }

    #[test]
    fn fig1_rows_decompose_b() {
        let rows = figure1_sweep(6, &[0.5, 0.1]).unwrap();
        for r in &rows {
            assert_abs_diff_eq!(r.last_vector_energy + r.rest_energy, 1.0, epsilon = 1e-9);
            assert!(r.pair_mass <= 1.0 + 1e-9);
            assert!(r.bound >= 0.0);
        }
        let csv = fig1_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("theta,"));
    }
}
