//! Deterministic parallel evaluation over ordered grids.

use rayon::prelude::*;

use crate::{Error, Result};

/// Rows are handed to workers in contiguous chunks of this many points.
pub const CHUNK: usize = 1024;

/// Default cap on the number of evaluations one grid may request.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Points `start, start + step, …` up to `end` (inclusive within rounding).
pub fn linspace_step(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return Err(Error::InvalidSpec(format!(
            "bad range [{start}, {end}] with step {step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

pub(crate) fn check_cap(evaluations: u64, cap: u64) -> Result<()> {
    if evaluations > cap {
        Err(Error::GridTooLarge {
            requested: evaluations,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `f` applied to every point, in order, on `workers` threads (all cores when `None`).
pub fn par_map<T, F>(points: &[f64], workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let run = || -> Result<Vec<T>> {
        let chunks: Vec<Result<Vec<T>>> = points
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|&p| f(p)).collect())
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for c in chunks {
            out.extend(c?);
        }
        Ok(out)
    };
    match workers {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidSpec(format!("cannot start {n} workers: {e}")))?
            .install(run),
    }
}
