//! Series/model → network pipeline shared by the CLI and the star harness.

use hoinet_core::netout::{assemble, Metadata, SourceKind};
use hoinet_core::significance::{NetworkSignificance, SignificanceConfig};
use hoinet_core::var::{derive_seed, select_order, zscore, OrderCriterion};
use hoinet_core::{analyze, HoiNetwork, TimeSeries, VarModel, DEFAULT_RESTRICTED_LAG};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signif::{bootstrap_hoi, estimate, mir_significance_all};

pub const DEFAULT_MAX_ORDER: usize = 10;

/// Model order: a fixed `p`, or the minimizer of an information criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderChoice {
    Fixed(usize),
    Criterion(OrderCriterion),
}

impl Default for OrderChoice {
    fn default() -> Self {
        Self::Criterion(OrderCriterion::Bic)
    }
}

impl std::str::FromStr for OrderChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Self::Criterion(OrderCriterion::Aic)),
            "bic" => Ok(Self::Criterion(OrderCriterion::Bic)),
            other => match other.parse::<usize>() {
                Ok(p) if p >= 1 => Ok(Self::Fixed(p)),
                _ => Err(format!("expected a positive order, `aic` or `bic`, got `{s}`")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub zscore: bool,
    pub order: OrderChoice,
    pub max_order: usize,
    pub q: usize,
    /// Runs the bootstrap (HOI) and surrogate (MIR) tests when present.
    pub significance: Option<SignificanceConfig>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            zscore: true,
            order: OrderChoice::default(),
            max_order: DEFAULT_MAX_ORDER,
            q: DEFAULT_RESTRICTED_LAG,
            significance: None,
        }
    }
}

/// RFC 3339 UTC time, or `SOURCE_DATE_EPOCH` when set (for reproducible files).
pub fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse::<i64>().ok());
    let t = match fixed.and_then(|s| chrono::DateTime::from_timestamp(s, 0)) {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn resolve_order(series: &TimeSeries, choice: OrderChoice, max_order: usize) -> Result<usize> {
    Ok(match choice {
        OrderChoice::Fixed(p) => p,
        OrderChoice::Criterion(c) => select_order(series, max_order, c)?,
    })
}

/// Estimated network of a recorded series. The surrogate tests use seed
/// `derive_seed(cfg.seed, 1)`, the bootstrap `cfg.seed` itself.
pub fn analyze_series(series: &TimeSeries, opts: &AnalysisOptions) -> Result<HoiNetwork> {
    let prepared = if opts.zscore { zscore(series)? } else { series.clone() };
    let p = resolve_order(&prepared, opts.order, opts.max_order)?;
    let (values, signif) = match &opts.significance {
        Some(cfg) => {
            let boot = bootstrap_hoi(&prepared, p, opts.q, cfg)?;
            let surr_cfg = SignificanceConfig { seed: derive_seed(cfg.seed, 1), ..*cfg };
            let (_, mir) = mir_significance_all(&prepared, p, opts.q, &surr_cfg)?;
            let sig = NetworkSignificance { hoi: Some(boot.significance), mir: Some(mir) };
            (boot.observed, Some(sig))
        }
        None => (estimate(&prepared, p, opts.q)?.1, None),
    };
    let meta = Metadata {
        source: SourceKind::SeriesEstimated,
        n_samples: Some(series.n_samples()),
        order: p,
        restricted_lag: opts.q,
        alpha: opts.significance.map(|c| c.alpha),
        seeds: opts.significance.map(|c| vec![c.seed]).unwrap_or_default(),
        timestamp: timestamp(),
    };
    Ok(assemble(&values, signif.as_ref(), meta, series.labels())?)
}

/// Exact network of a model.
pub fn analyze_var_model(model: &VarModel, q: usize, labels: Option<&[String]>) -> Result<HoiNetwork> {
    let meta = Metadata {
        source: SourceKind::ModelAnalytic,
        n_samples: None,
        order: model.order(),
        restricted_lag: q,
        alpha: None,
        seeds: Vec::new(),
        timestamp: timestamp(),
    };
    Ok(assemble(&analyze(model, q)?, None, meta, labels)?)
}
