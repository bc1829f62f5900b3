//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel site in this crate maps an index range through a pure
//! function, so parallel and sequential execution produce identical values.
//! With the `parallel` feature disabled the helpers degrade to plain
//! sequential maps.

/// Execution mode for operations with data-parallel inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Use rayon when the `parallel` feature is enabled.
    #[default]
    Auto,
    /// Force sequential execution regardless of features.
    Serial,
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Exec::Auto => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        Exec::Serial => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(_exec: Exec, n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn for_each_mut<T, F>(exec: Exec, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    match exec {
        Exec::Auto => {
            use rayon::prelude::*;
            items.par_iter_mut().enumerate().for_each(|(i, t)| f(i, t));
        }
        Exec::Serial => {
            for (i, t) in items.iter_mut().enumerate() {
                f(i, t);
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_mut<T, F>(_exec: Exec, items: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    for (i, t) in items.iter_mut().enumerate() {
        f(i, t);
    }
}
