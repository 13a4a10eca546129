//! Run configuration for `analyze`: a JSON file whose fields may each be
//! overridden by flags, resolved into concrete settings that are written
//! next to the outputs.

use std::path::{Path, PathBuf};

use hoinet_core::significance::SignificanceConfig;
use hoinet_core::var::DEFAULT_BURN_IN;
use hoinet_core::DEFAULT_RESTRICTED_LAG;
use serde::{Deserialize, Serialize};

use crate::error::{HoiError, Result};
use crate::io::{read_json, OutputFormat};
use crate::pipeline::{AnalysisOptions, OrderChoice, DEFAULT_MAX_ORDER};

/// Every field optional; unset fields take the defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub order: Option<OrderChoice>,
    pub max_order: Option<usize>,
    pub q: Option<usize>,
    pub alpha: Option<f64>,
    pub n_replicates: Option<usize>,
    pub seed: Option<u64>,
    pub burn_in: Option<usize>,
    pub zscore: Option<bool>,
    pub signif: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Fields set in `flags` win over fields set here.
    pub fn overridden_by(self, flags: RunConfig) -> Self {
        Self {
            input: flags.input.or(self.input),
            model: flags.model.or(self.model),
            order: flags.order.or(self.order),
            max_order: flags.max_order.or(self.max_order),
            q: flags.q.or(self.q),
            alpha: flags.alpha.or(self.alpha),
            n_replicates: flags.n_replicates.or(self.n_replicates),
            seed: flags.seed.or(self.seed),
            burn_in: flags.burn_in.or(self.burn_in),
            zscore: flags.zscore.or(self.zscore),
            signif: flags.signif.or(self.signif),
            out_dir: flags.out_dir.or(self.out_dir),
            formats: flags.formats.or(self.formats),
        }
    }

    pub fn resolve(self) -> Result<ResolvedConfig> {
        let source = match (self.input, self.model) {
            (Some(p), None) => InputSource::Series(p),
            (None, Some(p)) => InputSource::Model(p),
            (Some(_), Some(_)) => return Err(HoiError::usage("give either an input series or a model, not both")),
            (None, None) => return Err(HoiError::usage("no input series or model given")),
        };
        let significance = SignificanceConfig {
            alpha: self.alpha.unwrap_or(0.05),
            n_replicates: self.n_replicates.unwrap_or(100),
            seed: self.seed.unwrap_or(0),
            burn_in: self.burn_in.unwrap_or(DEFAULT_BURN_IN),
        };
        significance.validate()?;
        let signif = self.signif.unwrap_or(false);
        if signif && matches!(source, InputSource::Model(_)) {
            return Err(HoiError::usage("significance tests apply to recorded series, not to a model"));
        }
        let q = self.q.unwrap_or(DEFAULT_RESTRICTED_LAG);
        if q == 0 {
            return Err(HoiError::usage("q must be at least 1"));
        }
        let max_order = self.max_order.unwrap_or(DEFAULT_MAX_ORDER);
        if max_order == 0 || self.order == Some(OrderChoice::Fixed(0)) {
            return Err(HoiError::usage("model orders start at 1"));
        }
        let mut formats = self.formats.unwrap_or_else(|| vec![OutputFormat::Json, OutputFormat::Csv]);
        formats.dedup();
        if formats.is_empty() {
            return Err(HoiError::usage("no output format selected"));
        }
        Ok(ResolvedConfig {
            source,
            analysis: AnalysisOptions {
                zscore: self.zscore.unwrap_or(true),
                order: self.order.unwrap_or_default(),
                max_order,
                q,
                significance: signif.then_some(significance),
            },
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            formats,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSource {
    Series(PathBuf),
    Model(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub source: InputSource,
    pub analysis: AnalysisOptions,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"input": "a.csv", "q": 10, "order": "aic", "alpha": 0.1}"#).unwrap();
        let flags = RunConfig { q: Some(5), ..Default::default() };
        let r = file.overridden_by(flags).resolve().unwrap();
        assert_eq!(r.analysis.q, 5);
        assert_eq!(r.analysis.order, "aic".parse().unwrap());
        assert_eq!(r.source, InputSource::Series("a.csv".into()));
        assert!(r.analysis.zscore);
        assert!(r.analysis.significance.is_none());
    }

    #[test]
    fn invalid_combinations() {
        assert!(RunConfig::default().resolve().is_err());
        let both = RunConfig { input: Some("a".into()), model: Some("b".into()), ..Default::default() };
        assert!(both.resolve().is_err());
        let sig_model = RunConfig { model: Some("b".into()), signif: Some(true), ..Default::default() };
        assert!(sig_model.resolve().is_err());
        let bad_alpha = RunConfig { input: Some("a".into()), alpha: Some(1.5), ..Default::default() };
        assert!(bad_alpha.resolve().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"inptu": "x"}"#).is_err());
    }
}
