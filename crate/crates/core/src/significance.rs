//! Percentile confidence bounds and significance verdicts for bootstrap and
//! surrogate distributions.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceConfig {
    pub alpha: f64,
    pub n_replicates: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        Self { alpha: 0.05, n_replicates: 100, seed: 0, burn_in: crate::var::DEFAULT_BURN_IN }
    }
}

impl SignificanceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha must lie in (0, 1)"));
        }
        if self.n_replicates < 20 {
            return Err(Error::invalid("at least 20 replicates are needed"));
        }
        if self.alpha * (self.n_replicates as f64) < 1.0 {
            return Err(Error::invalid("alpha * n_replicates must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignificanceMethod {
    /// Two-sided: zero outside the central `1 − α` bootstrap interval.
    Bootstrap,
    /// One-sided: observed value above the `1 − α` surrogate percentile.
    Surrogate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub observed: f64,
    /// Replicate values, sorted ascending.
    pub distribution: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub significant: bool,
    pub method: SignificanceMethod,
    pub alpha: f64,
}

impl SignificanceResult {
    /// Builds the verdict from an observed value and its replicate distribution.
    pub fn from_distribution(
        observed: f64,
        mut distribution: Vec<f64>,
        alpha: f64,
        method: SignificanceMethod,
    ) -> Result<Self> {
        if distribution.is_empty() {
            return Err(Error::invalid("empty replicate distribution"));
        }
        if distribution.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite replicate value"));
        }
        distribution.sort_by(f64::total_cmp);
        let lower = percentile_sorted(&distribution, 100.0 * alpha / 2.0);
        let upper = percentile_sorted(&distribution, 100.0 * (1.0 - alpha / 2.0));
        let significant = verdict(observed, &distribution, alpha, method);
        Ok(Self { observed, distribution, lower, upper, significant, method, alpha })
    }

    /// Recomputes the verdict from the stored distribution.
    pub fn recompute(&self) -> bool {
        verdict(self.observed, &self.distribution, self.alpha, self.method)
    }

    /// `(1 − α)` percentile of the distribution, the surrogate threshold.
    pub fn threshold(&self) -> f64 {
        percentile_sorted(&self.distribution, 100.0 * (1.0 - self.alpha))
    }
}

fn verdict(observed: f64, sorted: &[f64], alpha: f64, method: SignificanceMethod) -> bool {
    match method {
        SignificanceMethod::Bootstrap => {
            let lo = percentile_sorted(sorted, 100.0 * alpha / 2.0);
            let hi = percentile_sorted(sorted, 100.0 * (1.0 - alpha / 2.0));
            !(lo <= 0.0 && 0.0 <= hi)
        }
        SignificanceMethod::Surrogate => observed > percentile_sorted(sorted, 100.0 * (1.0 - alpha)),
    }
}

/// Percentile `pct ∈ [0, 100]` of ascending data, interpolating linearly
/// between order statistics at rank `(n − 1)·pct/100`.
pub fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * (pct / 100.0).clamp(0.0, 1.0);
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Significance of every HOI measure in one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoiSignificance {
    pub gradient: Vec<SignificanceResult>,
    /// Ordered as [`crate::measures::pairs`].
    pub local_oir: Vec<SignificanceResult>,
    pub oir: SignificanceResult,
}

/// Bootstrap (HOI) and surrogate (MIR) results for one network; either may be absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkSignificance {
    pub hoi: Option<HoiSignificance>,
    /// Ordered as [`crate::measures::pairs`].
    pub mir: Option<Vec<SignificanceResult>>,
}
