//! Order-stable parallel reductions.
//!
//! Work is split into fixed-size chunks independent of the thread count;
//! chunk partials are combined by a pairwise tree in index order, so every
//! result is bit-identical across runs and pool sizes.

use rayon::prelude::*;

use crate::error::Result;

const CHUNK: usize = 128;

pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub(crate) fn par_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Like [`par_sum`], returning the error of the lowest failing index.
pub(crate) fn par_try_sum<F>(len: usize, f: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<Result<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            let vals = (lo..hi).map(&f).collect::<Result<Vec<f64>>>()?;
            Ok(pairwise_sum(&vals))
        })
        .collect();
    let partials = partials.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&partials))
}

pub(crate) fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

pub(crate) fn par_try_map<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let out: Vec<Result<T>> = (0..len).into_par_iter().map(f).collect();
    out.into_iter().collect()
}
