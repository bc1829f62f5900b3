//! Synthetic instance generators: the adversarial greedy example, matrices
//! with power-law leverage decay, and seeded random low-rank ensembles.
//! Every generator is a pure function of its parameters and seed.

use crate::error::{Error, Result};
use crate::linalg::{svd_dm, DenseMatrix, DEFAULT_RANK_TOL};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Generator name plus the parameters needed to rebuild the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMetadata {
    pub generator: String,
    pub params: Vec<(String, String)>,
}

impl InstanceMetadata {
    fn new(generator: &str, params: &[(&str, String)]) -> Self {
        Self {
            generator: generator.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

impl std::fmt::Display for InstanceMetadata {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.generator, parts.join(","))
    }
}

/// A basis matrix, a target matrix, and how they were made.
#[derive(Debug, Clone)]
pub struct InstancePair {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub metadata: InstanceMetadata,
}

/// The adversarial construction on which greedy selection stalls: over the
/// standard basis e_0..e_n (e_0 is coordinate row 1), A has columns
///
///   e_1,  theta e_0 + e_1,  2 theta e_0 + e_2,  ...,  2 theta e_0 + e_n
///
/// and B is the single column e_0. The pair {1, 2} spans e_0 exactly
/// (theta e_0 = col 2 - col 1), but every later column looks better to a
/// one-step objective gain.
pub fn altschuler_instance(n: usize, theta: f64) -> Result<InstancePair> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1], got {theta}")));
    }
    let dim = n + 1;
    let mut a = DMatrix::zeros(dim, dim);
    a[(1, 0)] = 1.0; // e_1
    a[(0, 1)] = theta; // theta e_0 + e_1
    a[(1, 1)] = 1.0;
    for j in 2..=n {
        let col = j; // 0-based column index j holds 2 theta e_0 + e_j
        a[(0, col)] = 2.0 * theta;
        a[(j, col)] = 1.0;
    }
    let mut b = DMatrix::zeros(dim, 1);
    b[(0, 0)] = 1.0;
    Ok(InstancePair {
        a: DenseMatrix::from_dmatrix(a)?,
        b: DenseMatrix::from_dmatrix(b)?,
        metadata: InstanceMetadata::new(
            "altschuler",
            &[("n", n.to_string()), ("theta", format!("{theta}"))],
        ),
    })
}

/// Matrix whose rank-k leverage scores follow a power-law decay, plus the
/// targets it was built against.
#[derive(Debug, Clone)]
pub struct PowerlawInstance {
    pub matrix: DenseMatrix,
    /// Feasible target scores (sum k, each <= 1).
    pub target_scores: Vec<f64>,
    /// Rank-k scores recomputed from the assembled matrix.
    pub achieved_scores: Vec<f64>,
    /// Leading entries pinned at 1 to keep the targets feasible.
    pub saturated: usize,
    pub metadata: InstanceMetadata,
}

/// Spectrum ratio used by the power-law generator: sigma_{i+1}/sigma_i.
const POWERLAW_SPECTRUM_DECAY: f64 = 0.9;

/// Build A = U Sigma V^T whose rank-k leverage scores decay as
/// l_i proportional to 1 / i^(1+eta).
///
/// Valid leverage scores must lie in [0, 1] and sum to exactly k, so the raw
/// normalization k * w_i / sum(w) is infeasible whenever it pushes the head
/// above 1; in that case the head is pinned at 1 and the tail keeps the exact
/// power-law proportions (the closest feasible decay). The realized frame is
/// found by alternating column rescaling with row re-orthonormalization, up
/// to 200 sweeps, and the result is checked against the targets at 5%
/// relative. The spectrum decays geometrically by 0.9 per index, so the
/// prefix-set ratio sigma_{k+1}/sigma_k is 0.9.
pub fn powerlaw_instance(
    m: usize,
    n: usize,
    k: usize,
    eta: f64,
    seed: u64,
) -> Result<PowerlawInstance> {
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..=min(m, n) = {}, got {k}",
            m.min(n)
        )));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
    }

    let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-(1.0 + eta))).collect();
    let (target, saturated) = feasible_targets(&weights, k)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = frame_with_column_masses(&target, k, saturated, &mut rng)?; // k x n

    // complete V to rank rho and pair with a decaying spectrum
    let rho = m.min(n);
    let v = extend_orthonormal(&frame.transpose(), rho, &mut rng)?; // n x rho
    let u = random_orthonormal(m, rho, &mut rng); // m x rho
    let sigma: Vec<f64> = (0..rho).map(|i| POWERLAW_SPECTRUM_DECAY.powi(i as i32)).collect();

    let mut us = u.clone();
    for (j, &s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(s);
    }
    let a = DenseMatrix::from_dmatrix(&us * v.transpose())?;

    // verify the realized decay against the targets
    let fac = svd_dm(a.as_dmatrix(), DEFAULT_RANK_TOL, None)?;
    let achieved: Vec<f64> = (0..n)
        .map(|col| (0..k).map(|i| fac.vt()[(i, col)].powi(2)).sum())
        .collect();
    let worst = target
        .iter()
        .zip(&achieved)
        .map(|(&t, &a)| if t > 1e-9 { (a - t).abs() / t } else { (a - t).abs() })
        .fold(0.0, f64::max);
    if worst > 0.05 {
        return Err(Error::NotConverged(format!(
            "power-law frame deviates {:.2}% from target scores",
            worst * 100.0
        )));
    }

    Ok(PowerlawInstance {
        matrix: a,
        target_scores: target,
        achieved_scores: achieved,
        saturated,
        metadata: InstanceMetadata::new(
            "powerlaw",
            &[
                ("m", m.to_string()),
                ("n", n.to_string()),
                ("k", k.to_string()),
                ("eta", format!("{eta}")),
                ("seed", seed.to_string()),
                ("saturated", saturated.to_string()),
            ],
        ),
    })
}

/// Targets t_i = c * w_i capped at 1, summing to exactly k: the smallest
/// saturated head count whose proportional tail stays below 1.
fn feasible_targets(weights: &[f64], k: usize) -> Result<(Vec<f64>, usize)> {
    let n = weights.len();
    for head in 0..=k {
        let remaining = (k - head) as f64;
        let tail_sum: f64 = weights[head..].iter().sum();
        if remaining == 0.0 || tail_sum == 0.0 {
            let mut t = vec![0.0; n];
            t[..head].fill(1.0);
            return Ok((t, head));
        }
        let scale = remaining / tail_sum;
        let tail_max = weights[head..].iter().cloned().fold(0.0, f64::max) * scale;
        if tail_max <= 1.0 {
            let mut t = vec![1.0; head];
            t.extend(weights[head..].iter().map(|w| w * scale));
            return Ok((t, head));
        }
    }
    Err(Error::InfeasibleDecay(format!(
        "cannot place mass {k} across {n} scores bounded by 1"
    )))
}

/// A k x n matrix with orthonormal rows whose squared column norms equal
/// `target`. Saturated head columns become standard basis vectors exactly;
/// the tail is realized by alternating column rescaling and Loewdin row
/// orthonormalization of a random start.
fn frame_with_column_masses(
    target: &[f64],
    k: usize,
    saturated: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DMatrix<f64>> {
    let n = target.len();
    let mut w = DMatrix::zeros(k, n);
    for i in 0..saturated {
        w[(i, i)] = 1.0;
    }
    let k_tail = k - saturated;
    if k_tail == 0 {
        return Ok(w);
    }
    let n_tail = n - saturated;
    let tail_target = &target[saturated..];

    let mut tail = DMatrix::from_fn(k_tail, n_tail, |_, _| gauss(rng));
    let mut last_dev = f64::INFINITY;
    for _ in 0..200 {
        for j in 0..n_tail {
            let norm_sq: f64 = tail.column(j).norm_squared();
            if norm_sq > 0.0 {
                let s = (tail_target[j] / norm_sq).sqrt();
                tail.column_mut(j).scale_mut(s);
            }
        }
        loewdin_rows(&mut tail)?;
        last_dev = (0..n_tail)
            .map(|j| {
                let t = tail_target[j];
                let got = tail.column(j).norm_squared();
                if t > 1e-9 { (got - t).abs() / t } else { (got - t).abs() }
            })
            .fold(0.0, f64::max);
        if last_dev < 1e-12 {
            break;
        }
    }
    if last_dev > 0.05 {
        return Err(Error::NotConverged(format!(
            "column-mass scaling stalled at {:.2}% relative deviation",
            last_dev * 100.0
        )));
    }
    w.view_mut((saturated, saturated), (k_tail, n_tail)).copy_from(&tail);
    Ok(w)
}

/// Replace the rows of `w` by their symmetric (Loewdin) orthonormalization:
/// w <- (w w^T)^{-1/2} w. Minimal-perturbation choice among orthonormalizers.
fn loewdin_rows(w: &mut DMatrix<f64>) -> Result<()> {
    let gram = &*w * w.transpose();
    let eig = nalgebra::SymmetricEigen::new(gram);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-14) {
        return Err(Error::NotConverged("frame rows became linearly dependent".into()));
    }
    let mut inv_sqrt = eig.eigenvectors.clone();
    for (j, l) in eig.eigenvalues.iter().enumerate() {
        inv_sqrt.column_mut(j).scale_mut(1.0 / l.sqrt());
    }
    let transform = inv_sqrt * eig.eigenvectors.transpose();
    *w = transform * &*w;
    Ok(())
}

fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(rows, cols, |_, _| gauss(rng));
    g.qr().q()
}

/// Extend `base` (orthonormal columns) to `cols` orthonormal columns by
/// Gram-Schmidt over random directions.
fn extend_orthonormal(
    base: &DMatrix<f64>,
    cols: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DMatrix<f64>> {
    let n = base.nrows();
    let have = base.ncols();
    assert!(cols >= have && cols <= n);
    let mut out = DMatrix::zeros(n, cols);
    out.view_mut((0, 0), (n, have)).copy_from(base);
    let mut filled = have;
    let mut attempts = 0;
    while filled < cols {
        attempts += 1;
        if attempts > 50 * cols {
            return Err(Error::NotConverged("orthonormal extension stalled".into()));
        }
        let mut v: DVector<f64> = DVector::from_fn(n, |_, _| gauss(rng));
        for _ in 0..2 {
            for j in 0..filled {
                let c = out.column(j).dot(&v);
                v.axpy(-c, &out.column(j).into_owned(), 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            out.column_mut(filled).copy_from(&(v / norm));
            filled += 1;
        }
    }
    Ok(out)
}

/// Seeded random pair: A is a rank-`rank` product plus `noise` times a
/// Gaussian perturbation (entrywise standard deviation), and B mixes the
/// columns of A, plus a `noise`-scaled free component when noise > 0.
/// With noise = 0 the numerical rank of A is exactly `rank` and B lies in
/// the range of A.
pub fn random_lowrank_instance(
    m: usize,
    n: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> Result<InstancePair> {
    if rank == 0 || rank > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "rank must lie in 1..=min(m, n) = {}, got {rank}",
            m.min(n)
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (rank as f64).sqrt();
    let g1 = DMatrix::from_fn(m, rank, |_, _| gauss(&mut rng) * scale);
    let g2 = DMatrix::from_fn(rank, n, |_, _| gauss(&mut rng));
    let mut a = g1 * g2;
    if noise > 0.0 {
        for v in a.iter_mut() {
            *v += noise * gauss(&mut rng);
        }
    }

    let p = rank.div_ceil(2);
    let mix_scale = 1.0 / (n as f64).sqrt();
    let w = DMatrix::from_fn(n, p, |_, _| gauss(&mut rng) * mix_scale);
    let mut b = &a * w;
    if noise > 0.0 {
        for v in b.iter_mut() {
            *v += noise * gauss(&mut rng);
        }
    }

    Ok(InstancePair {
        a: DenseMatrix::from_dmatrix(a)?,
        b: DenseMatrix::from_dmatrix(b)?,
        metadata: InstanceMetadata::new(
            "lowrank",
            &[
                ("m", m.to_string()),
                ("n", n.to_string()),
                ("rank", rank.to_string()),
                ("noise", format!("{noise}")),
                ("seed", seed.to_string()),
            ],
        ),
    })
}
