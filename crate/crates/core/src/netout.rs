//! Node/link/network representation of the measures.
//!
//! Nodes carry entropy rate and OIR gradient, links carry MIR and local OIR,
//! and the network carries the OIR. Each HOI value is classified as synergy,
//! balance or redundancy.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{pairs, HoiValues};
use crate::significance::{NetworkSignificance, SignificanceMethod, SignificanceResult};

/// Values within this distance of zero are balanced when no test was run.
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynergyRedundancyClass {
    Synergy,
    Balanced,
    Redundancy,
}

impl SynergyRedundancyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Synergy => "synergy",
            Self::Balanced => "balanced",
            Self::Redundancy => "redundancy",
        }
    }

    /// With a verdict, the sign counts only if significant; without one,
    /// only values beyond [`BALANCE_TOL`] count.
    pub fn classify(value: f64, significant: Option<bool>) -> Self {
        let counts = match significant {
            Some(sig) => sig && value != 0.0,
            None => value.abs() > BALANCE_TOL,
        };
        match (counts, value < 0.0) {
            (false, _) => Self::Balanced,
            (true, true) => Self::Synergy,
            (true, false) => Self::Redundancy,
        }
    }
}

impl core::str::FromStr for SynergyRedundancyClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synergy" => Ok(Self::Synergy),
            "balanced" => Ok(Self::Balanced),
            "redundancy" => Ok(Self::Redundancy),
            other => Err(Error::invalid(format!("unknown class `{other}`"))),
        }
    }
}

/// Test outcome attached to one value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub method: SignificanceMethod,
    /// `100·α/2` percentile of the replicate distribution.
    pub lower: f64,
    /// `100·(1 − α/2)` percentile of the replicate distribution.
    pub upper: f64,
    /// Surrogate tests only: the `100·(1 − α)` percentile compared against.
    pub threshold: Option<f64>,
    pub significant: bool,
}

impl From<&SignificanceResult> for Significance {
    fn from(r: &SignificanceResult) -> Self {
        let threshold = (r.method == SignificanceMethod::Surrogate).then(|| r.threshold());
        Self { method: r.method, lower: r.lower, upper: r.upper, threshold, significant: r.significant }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    ModelAnalytic,
    SeriesEstimated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub source: SourceKind,
    pub n_samples: Option<usize>,
    /// Order `p` of the full model.
    pub order: usize,
    /// Order `q` of the restricted models.
    pub restricted_lag: usize,
    pub alpha: Option<f64>,
    pub seeds: Vec<u64>,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub index: usize,
    pub label: String,
    pub entropy_rate: f64,
    pub gradient: f64,
    pub gradient_significance: Option<Significance>,
    pub class: SynergyRedundancyClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub i: usize,
    pub j: usize,
    pub mir: f64,
    pub mir_significance: Option<Significance>,
    pub local_oir: f64,
    pub local_oir_significance: Option<Significance>,
    /// Class of the local OIR.
    pub class: SynergyRedundancyClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalRecord {
    pub oir: f64,
    pub oir_significance: Option<Significance>,
    pub class: SynergyRedundancyClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoiNetwork {
    pub metadata: Metadata,
    pub nodes: Vec<NodeRecord>,
    pub links: Vec<LinkRecord>,
    pub global: GlobalRecord,
}

impl HoiNetwork {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn link(&self, i: usize, j: usize) -> Option<&LinkRecord> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.links.iter().find(|l| l.i == a && l.j == b)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// Builds the network representation, attaching verdicts and classes.
pub fn assemble(
    values: &HoiValues,
    signif: Option<&NetworkSignificance>,
    meta: Metadata,
    labels: Option<&[String]>,
) -> Result<HoiNetwork> {
    let n = values.n_nodes;
    let n_links = n * (n.saturating_sub(1)) / 2;
    if values.entropy_rates.len() != n
        || values.gradient.len() != n
        || values.mir.len() != n_links
        || values.local_oir.len() != n_links
    {
        return Err(Error::dims("measure vectors do not match the node count"));
    }
    let labels = match labels {
        Some(l) if l.len() == n => l.to_vec(),
        Some(l) => return Err(Error::dims(format!("{} labels for {n} nodes", l.len()))),
        None => default_labels(n),
    };
    let hoi = signif.and_then(|s| s.hoi.as_ref());
    let mir_sig = signif.and_then(|s| s.mir.as_ref());
    if meta.source == SourceKind::ModelAnalytic && (hoi.is_some() || mir_sig.is_some()) {
        return Err(Error::invalid("analytic networks carry no significance results"));
    }
    if let Some(h) = hoi {
        if h.gradient.len() != n || h.local_oir.len() != n_links {
            return Err(Error::dims("bootstrap results do not match the network"));
        }
    }
    if let Some(m) = mir_sig {
        if m.len() != n_links {
            return Err(Error::dims("surrogate results do not match the network"));
        }
    }

    let nodes = (0..n)
        .map(|i| {
            let sig = hoi.map(|h| Significance::from(&h.gradient[i]));
            NodeRecord {
                index: i,
                label: labels[i].clone(),
                entropy_rate: values.entropy_rates[i],
                gradient: values.gradient[i],
                gradient_significance: sig,
                class: SynergyRedundancyClass::classify(values.gradient[i], sig.map(|s| s.significant)),
            }
        })
        .collect();
    let links = pairs(n)
        .into_iter()
        .enumerate()
        .map(|(k, (i, j))| {
            let sig = hoi.map(|h| Significance::from(&h.local_oir[k]));
            LinkRecord {
                i,
                j,
                mir: values.mir[k],
                mir_significance: mir_sig.map(|m| Significance::from(&m[k])),
                local_oir: values.local_oir[k],
                local_oir_significance: sig,
                class: SynergyRedundancyClass::classify(values.local_oir[k], sig.map(|s| s.significant)),
            }
        })
        .collect();
    let gsig = hoi.map(|h| Significance::from(&h.oir));
    let global = GlobalRecord {
        oir: values.oir,
        oir_significance: gsig,
        class: SynergyRedundancyClass::classify(values.oir, gsig.map(|s| s.significant)),
    };
    Ok(HoiNetwork { metadata: meta, nodes, links, global })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::analyze;
    use crate::numerics::DenseMatrix;
    use crate::significance::HoiSignificance;
    use crate::var::{build_star_model, StarConfig, StarVariant, VarModel};
    use alloc::vec;

    fn meta(source: SourceKind) -> Metadata {
        Metadata {
            source,
            n_samples: None,
            order: 1,
            restricted_lag: 20,
            alpha: None,
            seeds: vec![],
            timestamp: String::from("1970-01-01T00:00:00Z"),
        }
    }

    fn analytic(model: &VarModel) -> HoiNetwork {
        assemble(&analyze(model, 20).unwrap(), None, meta(SourceKind::ModelAnalytic), None).unwrap()
    }

    #[test]
    fn classification_rules() {
        use SynergyRedundancyClass::*;
        assert_eq!(SynergyRedundancyClass::classify(0.2, Some(true)), Redundancy);
        assert_eq!(SynergyRedundancyClass::classify(-0.2, Some(true)), Synergy);
        assert_eq!(SynergyRedundancyClass::classify(0.2, Some(false)), Balanced);
        assert_eq!(SynergyRedundancyClass::classify(5e-10, None), Balanced);
        assert_eq!(SynergyRedundancyClass::classify(-2e-9, None), Synergy);
    }

    #[test]
    fn mediator_node3_balanced() {
        let net = analytic(&build_star_model(&StarConfig::mediator(0.0)).unwrap());
        assert_eq!(net.nodes[2].class, SynergyRedundancyClass::Balanced);
        for j in [0, 1, 3, 4] {
            assert_eq!(net.link(2, j).unwrap().class, SynergyRedundancyClass::Balanced);
        }
    }

    #[test]
    fn source_all_redundant() {
        let net = analytic(&build_star_model(&StarConfig::new(StarVariant::Source)).unwrap());
        assert!(net.nodes.iter().all(|n| n.class == SynergyRedundancyClass::Redundancy));
        assert!(net.links.iter().all(|l| l.class == SynergyRedundancyClass::Redundancy));
        assert_eq!(net.global.class, SynergyRedundancyClass::Redundancy);
        assert_eq!(net.nodes.len(), 5);
        assert_eq!(net.links.len(), 10);
        assert_eq!(net.nodes[0].label, "X1");
    }

    #[test]
    fn independent_all_balanced() {
        let m = VarModel::white_noise(DenseMatrix::identity(4), 1).unwrap();
        let net = analytic(&m);
        assert!(net.nodes.iter().all(|n| n.class == SynergyRedundancyClass::Balanced));
        assert!(net.links.iter().all(|l| l.class == SynergyRedundancyClass::Balanced));
        assert_eq!(net.global.class, SynergyRedundancyClass::Balanced);
    }

    #[test]
    fn dimension_checks() {
        let v = analyze(&build_star_model(&StarConfig::new(StarVariant::Sink)).unwrap(), 20).unwrap();
        let mut bad = v.clone();
        bad.gradient.pop();
        assert!(matches!(assemble(&bad, None, meta(SourceKind::ModelAnalytic), None), Err(Error::DimensionMismatch(_))));
        let labels = vec![String::from("a")];
        assert!(assemble(&v, None, meta(SourceKind::ModelAnalytic), Some(&labels)).is_err());
    }

    #[test]
    fn analytic_rejects_significance() {
        let v = analyze(&build_star_model(&StarConfig::new(StarVariant::Sink)).unwrap(), 20).unwrap();
        let r = |x: f64| {
            SignificanceResult::from_distribution(x, vec![x - 1.0, x, x + 1.0], 0.05, SignificanceMethod::Bootstrap)
                .unwrap()
        };
        let sig = NetworkSignificance {
            hoi: Some(HoiSignificance {
                gradient: v.gradient.iter().map(|&x| r(x)).collect(),
                local_oir: v.local_oir.iter().map(|&x| r(x)).collect(),
                oir: r(v.oir),
            }),
            mir: None,
        };
        assert!(assemble(&v, Some(&sig), meta(SourceKind::ModelAnalytic), None).is_err());
        let net = assemble(&v, Some(&sig), meta(SourceKind::SeriesEstimated), None).unwrap();
        // every interval here straddles zero
        assert!(net.nodes.iter().all(|n| n.class == SynergyRedundancyClass::Balanced));
        assert!(net.nodes[0].gradient_significance.is_some());
    }
}
