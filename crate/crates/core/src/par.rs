//! Thin layer over rayon so every data-parallel loop has a sequential twin.
//!
//! All helpers preserve index order in their output and never split a
//! floating-point reduction across threads, so results do not depend on the
//! schedule or on whether the `parallel` feature is enabled.

/// Rows below this count are processed on the calling thread.
#[cfg(feature = "parallel")]
pub(crate) const MIN_PAR_LEN: usize = 128;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Writes `f(i)` into `out[i]`, in parallel when `out` is long enough.
#[cfg(feature = "parallel")]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if out.len() < MIN_PAR_LEN {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    } else {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(MIN_PAR_LEN / 4)
            .for_each(|(i, o)| *o = f(i));
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}
