//! Residual bootstrap for the HOI measures and IAAFT surrogates for MIR.
//!
//! Replicate `k` always draws from stream `k` of `cfg.seed`, and replicates
//! are collected in index order, so results do not depend on the thread count.

use hoinet_core::lagcov::process_covariances;
use hoinet_core::measures::{analyze_with, pairs, HoiEngine};
use hoinet_core::significance::{HoiSignificance, SignificanceConfig, SignificanceMethod, SignificanceResult};
use hoinet_core::var::{derive_seed, fit_least_squares, propagate, stream_rng, FittedVar};
use hoinet_core::{DenseMatrix, HoiValues, TimeSeries};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{HoiError, Result};

/// Fits, then computes every measure through the restricted models of order `q`.
pub fn estimate(series: &TimeSeries, order: usize, q: usize) -> hoinet_core::Result<(FittedVar, HoiValues)> {
    let fitted = fit_least_squares(series, order)?;
    let values = analyze_model(&fitted, q)?;
    Ok((fitted, values))
}

fn analyze_model(fitted: &FittedVar, q: usize) -> hoinet_core::Result<HoiValues> {
    let covs = process_covariances(&fitted.model, q)?;
    analyze_with(&mut HoiEngine::new(&covs, q)?)
}

/// Runs `attempt(k)` for `k = 0, 1, …` until `n` succeed, giving up after
/// `3n` attempts. Successes are returned in attempt order.
fn replicates<T, F>(n: usize, attempt: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> hoinet_core::Result<T> + Sync,
{
    let cap = 3 * n;
    let mut done = Vec::with_capacity(n);
    let mut next = 0;
    let mut failed = 0;
    let mut last_err = None;
    while done.len() < n {
        if next >= cap {
            return Err(HoiError::ReplicatesExhausted {
                attempts: next,
                failed,
                last: last_err.expect("a failure occurred"),
            });
        }
        let batch = (n - done.len()).min(cap - next);
        let results: Vec<_> = (next..next + batch).into_par_iter().map(|k| attempt(k as u64)).collect();
        next += batch;
        for r in results {
            match r {
                Ok(v) => done.push(v),
                Err(e) => {
                    failed += 1;
                    last_err = Some(e);
                }
            }
        }
    }
    Ok(done)
}

/// Regenerates a series of `n_samples` from `fitted` driven by residual rows
/// drawn with replacement (whole rows, keeping zero-lag correlation).
pub fn resampled_series<R: Rng + ?Sized>(
    fitted: &FittedVar,
    n_samples: usize,
    burn_in: usize,
    rng: &mut R,
) -> hoinet_core::Result<TimeSeries> {
    let res = &fitted.residuals;
    let n = res.cols();
    let total = n_samples + burn_in;
    let mut data = Vec::with_capacity(total * n);
    for _ in 0..total {
        data.extend_from_slice(res.row(rng.random_range(0..res.rows())));
    }
    propagate(&fitted.model, &DenseMatrix::new(total, n, data)?, burn_in)
}

/// Observed values plus bootstrap verdicts for every gradient, local OIR and the OIR.
#[derive(Clone, Debug)]
pub struct BootstrapOutcome {
    pub fitted: FittedVar,
    pub observed: HoiValues,
    pub significance: HoiSignificance,
}

pub fn bootstrap_hoi(series: &TimeSeries, order: usize, q: usize, cfg: &SignificanceConfig) -> Result<BootstrapOutcome> {
    cfg.validate()?;
    let (fitted, observed) = estimate(series, order, q)?;
    let t = series.n_samples();
    let reps = replicates(cfg.n_replicates, |k| {
        let mut rng = stream_rng(cfg.seed, k);
        let boot = resampled_series(&fitted, t, cfg.burn_in, &mut rng)?;
        estimate(&boot, order, q).map(|(_, v)| v)
    })?;
    let boot = |observed: f64, pick: &dyn Fn(&HoiValues) -> f64| {
        SignificanceResult::from_distribution(
            observed,
            reps.iter().map(pick).collect(),
            cfg.alpha,
            SignificanceMethod::Bootstrap,
        )
    };
    let gradient = (0..observed.n_nodes)
        .map(|j| boot(observed.gradient[j], &|v| v.gradient[j]))
        .collect::<hoinet_core::Result<Vec<_>>>()?;
    let local_oir = (0..observed.local_oir.len())
        .map(|k| boot(observed.local_oir[k], &|v| v.local_oir[k]))
        .collect::<hoinet_core::Result<Vec<_>>>()?;
    let oir = boot(observed.oir, &|v| v.oir)?;
    Ok(BootstrapOutcome { fitted, observed, significance: HoiSignificance { gradient, local_oir, oir } })
}

pub const IAAFT_MAX_ITER: usize = 100;

/// Iterative amplitude-adjusted Fourier transform surrogate: same values,
/// approximately the same power spectrum, randomized phases.
///
/// # Panics
/// If `column` has fewer than 16 values.
pub fn iaaft_surrogate(column: &[f64], seed: u64, max_iter: usize) -> Vec<f64> {
    let n = column.len();
    assert!(n >= 16, "IAAFT needs at least 16 samples, got {n}");
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = column.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    let amplitudes: Vec<f64> = buf.iter().map(|c| c.norm()).collect();

    let mut rng = stream_rng(seed, 0);
    let mut s = column.to_vec();
    s.shuffle(&mut rng);
    let mut ranks: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..max_iter {
        for (b, &x) in buf.iter_mut().zip(&s) {
            *b = Complex::new(x, 0.0);
        }
        fwd.process(&mut buf);
        for (b, &a) in buf.iter_mut().zip(&amplitudes) {
            let norm = b.norm();
            *b = if norm > 0.0 { *b * (a / norm) } else { Complex::new(a, 0.0) };
        }
        inv.process(&mut buf);
        order.sort_by(|&a, &b| buf[a].re.total_cmp(&buf[b].re));
        for (r, &idx) in order.iter().enumerate() {
            s[idx] = sorted[r];
        }
        if order == ranks {
            break;
        }
        ranks.clone_from(&order);
    }
    s
}

/// Replaces every column with an independent IAAFT surrogate; column seeds
/// come from `(seed, column)`.
pub fn surrogate_series(series: &TimeSeries, seed: u64) -> hoinet_core::Result<TimeSeries> {
    let cols: Vec<Vec<f64>> = series
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| iaaft_surrogate(c, derive_seed(seed, j as u64), IAAFT_MAX_ITER))
        .collect();
    TimeSeries::from_columns(&cols)
}

/// Surrogate test of the MIR of every pair (ordered as `pairs`).
///
/// Each replicate surrogates all columns independently, refits the full model
/// at `order` and recomputes every MIR, so the single-pair test
/// [`mir_significance`] is exactly the corresponding entry of this one.
pub fn mir_significance_all(
    series: &TimeSeries,
    order: usize,
    q: usize,
    cfg: &SignificanceConfig,
) -> Result<(Vec<f64>, Vec<SignificanceResult>)> {
    cfg.validate()?;
    if series.n_samples() < 16 {
        return Err(HoiError::usage("surrogate tests need at least 16 samples"));
    }
    let (_, observed) = estimate(series, order, q)?;
    let reps = replicates(cfg.n_replicates, |k| {
        let surr = surrogate_series(series, derive_seed(cfg.seed, k))?;
        estimate(&surr, order, q).map(|(_, v)| v.mir)
    })?;
    let results = (0..observed.mir.len())
        .map(|k| {
            SignificanceResult::from_distribution(
                observed.mir[k],
                reps.iter().map(|m| m[k]).collect(),
                cfg.alpha,
                SignificanceMethod::Surrogate,
            )
        })
        .collect::<hoinet_core::Result<Vec<_>>>()?;
    Ok((observed.mir, results))
}

pub fn mir_significance(
    series: &TimeSeries,
    i: usize,
    j: usize,
    order: usize,
    q: usize,
    cfg: &SignificanceConfig,
) -> Result<SignificanceResult> {
    let n = series.n_nodes();
    if i == j || i >= n || j >= n {
        return Err(HoiError::usage(format!("invalid node pair ({i}, {j}) for {n} nodes")));
    }
    let k = pairs(n).iter().position(|&p| p == (i.min(j), i.max(j))).expect("valid pair");
    let (_, mut results) = mir_significance_all(series, order, q, cfg)?;
    Ok(results.swap_remove(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicates_redraw_and_cap() {
        let got = replicates(5, |k| if k % 2 == 0 { Ok(k) } else { Err(hoinet_core::Error::RankDeficientRegressors) }).unwrap();
        assert_eq!(got, vec![0, 2, 4, 6, 8]);
        let e = replicates(4, |_| -> hoinet_core::Result<u64> { Err(hoinet_core::Error::RankDeficientRegressors) });
        assert!(matches!(e, Err(HoiError::ReplicatesExhausted { attempts: 12, failed: 12, .. })));
    }

    #[test]
    fn iaaft_preserves_values() {
        let x: Vec<f64> = (0..64).map(|i| ((i * 37) % 64) as f64 * 0.5 - 3.0).collect();
        let s = iaaft_surrogate(&x, 7, IAAFT_MAX_ITER);
        let (mut a, mut b) = (x.clone(), s.clone());
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        assert_ne!(s, x);
        assert_eq!(s, iaaft_surrogate(&x, 7, IAAFT_MAX_ITER));
    }

    #[test]
    #[should_panic]
    fn iaaft_short_series() {
        iaaft_surrogate(&[1.0; 8], 0, 10);
    }
}
