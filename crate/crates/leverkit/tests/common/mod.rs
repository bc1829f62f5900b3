use leverkit::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0)).unwrap()
}

/// Columns of `m` have their means subtracted (CCA preprocessing).
pub fn center_columns(m: &DenseMatrix) -> DenseMatrix {
    let mut inner = m.as_dmatrix().clone();
    for mut col in inner.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.add_scalar_mut(-mean);
    }
    DenseMatrix::from_dmatrix(inner).unwrap()
}

/// Random non-empty subset of {1, ..., n}.
pub fn random_subset(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (1..=n).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}
