//! Property tests for the structural invariants: projector identities,
//! basis invariance, the closed-form leverage update, and selection
//! determinism.

mod common;

use common::{center_columns, uniform_matrix};
use leverkit::{
    generalized_leverage_scores, gcss, orthonormal_basis, projection_energy,
    scaled_leverage_update, select_columns_to_mass, sparse_cca, statistical_leverages, svd,
    CcaOptions, DenseMatrix, GcssOptions, IndexSet, LeverageScores, DEFAULT_RANK_TOL,
};
use proptest::prelude::*;

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (2..=max_dim, 2..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-1.0..1.0f64, m * n)
            .prop_map(move |data| DenseMatrix::new(m, n, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projector_identities(a in matrix_strategy(7)) {
        let q = match orthonormal_basis(&a, DEFAULT_RANK_TOL) {
            Ok(q) => q,
            Err(_) => return Ok(()), // numerically zero draw
        };
        let qm = q.as_dmatrix();
        let h = qm * qm.transpose();
        let h2 = &h * &h;
        let m = a.rows();
        for i in 0..m {
            for j in 0..m {
                prop_assert!((h2[(i, j)] - h[(i, j)]).abs() < 1e-9);
            }
            // diagonal equals the squared norm of the column
            let col_sq: f64 = (0..m).map(|j| h[(j, i)] * h[(j, i)]).sum();
            prop_assert!((h[(i, i)] - col_sq).abs() < 1e-9);
        }
        let trace: f64 = (0..m).map(|i| h[(i, i)]).sum();
        prop_assert!((trace - q.cols() as f64).abs() < 1e-8);
    }

    #[test]
    fn projection_energy_basis_invariance(
        a in matrix_strategy(6),
        scales in proptest::collection::vec(0.1..4.0f64, 6),
    ) {
        let b = DenseMatrix::from_fn(a.rows(), 2, |r, c| ((r + 2 * c) as f64).sin()).unwrap();
        let base = projection_energy(&a, &b).unwrap();
        // rescale columns by an invertible diagonal: same span, same energy
        let scaled = DenseMatrix::from_fn(a.rows(), a.cols(), |r, c| {
            a.get(r, c) * scales[c % scales.len()]
        }).unwrap();
        let after = projection_energy(&scaled, &b).unwrap();
        prop_assert!((base - after).abs() < 1e-9 * base.max(1.0));
        prop_assert!(base >= -1e-12 && base <= b.frob_norm_sq() + 1e-9);
    }

    #[test]
    fn svd_idempotent_on_retained_subspace(a in matrix_strategy(7)) {
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        if fac.numerical_rank() == 0 {
            return Ok(());
        }
        let rec = DenseMatrix::from_dmatrix(fac.reconstruct()).unwrap();
        let fac2 = svd(&rec, DEFAULT_RANK_TOL, None).unwrap();
        prop_assert_eq!(fac.numerical_rank(), fac2.numerical_rank());
        for (s1, s2) in fac.sigma().iter().zip(fac2.sigma()) {
            prop_assert!((s1 - s2).abs() < 1e-9 * fac.sigma()[0].max(1.0));
        }
    }

    #[test]
    fn leverage_update_matches_refactorization(
        x in matrix_strategy(8),
        row in 0usize..8,
        alpha in 0.0..4.0f64,
    ) {
        // tall full-column-rank inputs only
        if x.rows() <= x.cols() {
            return Ok(());
        }
        let fac = svd(&x, DEFAULT_RANK_TOL, None).unwrap();
        if fac.numerical_rank() < x.cols() {
            return Ok(());
        }
        let i = 1 + row % x.rows();
        let updated = match scaled_leverage_update(&x, i, alpha) {
            Ok(u) => u,
            Err(_) => return Ok(()), // singular update (rank drop) is flagged, skip
        };
        let scaled = DenseMatrix::from_fn(x.rows(), x.cols(), |r, c| {
            if r == i - 1 { alpha * x.get(r, c) } else { x.get(r, c) }
        }).unwrap();
        let oracle = statistical_leverages(&scaled).unwrap();
        for (got, want) in updated.values().iter().zip(oracle.values()) {
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0),
                "update {got} vs oracle {want}");
        }
    }

    #[test]
    fn mass_selection_is_deterministic_and_minimal(
        raw in proptest::collection::vec(0.0..1.0f64, 2..12),
        frac in 0.05..0.999f64,
    ) {
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Ok(());
        }
        let scores: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let scores = LeverageScores::from_scores(scores, IndexSet::prefix(1).unwrap()).unwrap();
        let threshold = frac; // total mass is 1
        let s1 = select_columns_to_mass(&scores, threshold).unwrap();
        let s2 = select_columns_to_mass(&scores, threshold).unwrap();
        prop_assert_eq!(s1.indices(), s2.indices());
        prop_assert!(s1.achieved_mass() >= threshold - 1e-9);
        // dropping the last selected column must fall below the threshold
        if s1.len() > 1 {
            let last = *s1.indices().last().unwrap();
            let partial = s1.achieved_mass() - scores.scores()[last - 1];
            prop_assert!(partial < threshold - 1e-9 + 1e-15);
        }
    }

    #[test]
    fn gcss_bound_holds_when_thresholds_met(
        seed_like in 0u64..500,
        eps in 0.05..0.8f64,
        delta in 0.05..0.8f64,
    ) {
        let mut rng = common::rng(seed_like);
        let a = uniform_matrix(9, 5, &mut rng);
        let w = uniform_matrix(5, 2, &mut rng);
        let b = DenseMatrix::from_dmatrix(a.as_dmatrix() * w.as_dmatrix()).unwrap();
        let res = gcss(&a, &b, &GcssOptions::new(eps, delta)).unwrap();
        if res.thresholds_met {
            prop_assert!(res.objective >= res.bound - 1e-8,
                "objective {} below bound {}", res.objective, res.bound);
        }
        prop_assert!(res.objective <= b.frob_norm_sq() + 1e-9);
    }

    #[test]
    fn cca_bound_holds_when_thresholds_met(seed_like in 0u64..500) {
        let mut rng = common::rng(seed_like.wrapping_add(9000));
        let a = center_columns(&uniform_matrix(10, 4, &mut rng));
        let b = center_columns(&uniform_matrix(10, 3, &mut rng));
        let res = sparse_cca(&a, &b, &CcaOptions::new(0.25, 0.25)).unwrap();
        prop_assert!(res.achieved <= res.q + 1e-9);
        if res.thresholds_met {
            prop_assert!(res.achieved >= res.bound - 1e-8,
                "achieved {} below bound {}", res.achieved, res.bound);
        }
    }

    #[test]
    fn generalized_scores_are_a_frame(a in matrix_strategy(7)) {
        let fac = svd(&a, DEFAULT_RANK_TOL, None).unwrap();
        let rho = fac.numerical_rank();
        if rho < 2 {
            return Ok(());
        }
        let r = IndexSet::new(vec![1, rho]).unwrap();
        let scores = generalized_leverage_scores(&fac, &r).unwrap();
        let total = scores.total();
        prop_assert!((total - r.len() as f64).abs() < 1e-9);
        for &s in scores.scores() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        }
    }
}
