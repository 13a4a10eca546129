//! Information-dynamic measures of a linear Gaussian network.
//!
//! Every measure reduces to log-determinants of restricted-model residual
//! covariances:
//!
//! - entropy rate `H_Y = ½ (M ln 2πe + ln|Σ_{W_Y}|)`;
//! - mutual information rate `I_{Y;Z} = H_Y + H_Z − H_{YZ}`;
//! - O-information rate `Ω_X = (N−2) H_X + Σ_j (H_{X_j} − H_{X^j})`;
//! - gradient `Δ_j = Σ_{i≠j} I_{X_j;X^{ij}} + (2−N) I_{X_j;X^j}`;
//! - local O-information rate
//!   `I_{X_i;X_j;X^{ij}} = I_{X_i;X_j} + I_{X_i;X^{ij}} − I_{X_i;X^i}`.
//!
//! Here `X^j` is every node but `j` and `X^{ij}` every node but `i` and `j`.
//! Positive values mean redundancy dominates, negative values synergy.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lagcov::{process_covariances, restricted_residual_cov, LagCovarianceSet, RestrictedOptions, SubsetIndex};
use crate::math;
use crate::numerics::Cholesky;
use crate::var::VarModel;

/// `ln(2πe)`.
pub const LN_2PI_E: f64 = 2.837_877_066_409_345_5;

/// Negative mutual-information rates above `-MIR_CLAMP` are reported as zero.
pub const MIR_CLAMP: f64 = 1e-9;

/// Unordered node pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(n_nodes: usize) -> Vec<(usize, usize)> {
    (0..n_nodes).flat_map(|i| (i + 1..n_nodes).map(move |j| (i, j))).collect()
}

/// Position of the unordered pair `{i, j}` in [`pairs`].
pub fn pair_index(n_nodes: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(a != b && b < n_nodes);
    a * (2 * n_nodes - a - 1) / 2 + (b - a - 1)
}

/// Memoizing evaluator over one set of lag covariances.
///
/// Residual log-determinants are cached by sorted subset, so each distinct
/// restricted model is solved once however many measures share it.
pub struct HoiEngine<'a> {
    covs: &'a LagCovarianceSet,
    q: usize,
    opts: RestrictedOptions,
    cache: BTreeMap<Vec<usize>, f64>,
}

impl<'a> HoiEngine<'a> {
    pub fn new(covs: &'a LagCovarianceSet, q: usize) -> Result<Self> {
        if q == 0 || q > covs.max_lag() {
            return Err(Error::invalid(alloc::format!("restricted lag {q} must lie in 1..={}", covs.max_lag())));
        }
        Ok(Self { covs, q, opts: RestrictedOptions::default(), cache: BTreeMap::new() })
    }

    pub fn with_ridge(mut self, ridge: Option<f64>) -> Self {
        self.opts.ridge = ridge;
        self.cache.clear();
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.covs.n_nodes()
    }

    /// Number of distinct restricted models solved so far.
    pub fn solved_subsets(&self) -> usize {
        self.cache.len()
    }

    /// `ln|Σ_{W_Y}|` of the restricted model of `subset`.
    pub fn log_det(&mut self, subset: &[usize]) -> Result<f64> {
        let mut key = subset.to_vec();
        key.sort_unstable();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let idx = SubsetIndex::new(key.clone(), self.n_nodes())?;
        let cov = restricted_residual_cov(self.covs, &idx, self.q, self.opts)?;
        let v = Cholesky::factor(&cov)?.log_det();
        self.cache.insert(key, v);
        Ok(v)
    }

    pub fn entropy_rate(&mut self, subset: &[usize]) -> Result<f64> {
        Ok(0.5 * (subset.len() as f64 * LN_2PI_E + self.log_det(subset)?))
    }

    pub fn mir(&mut self, y: &[usize], z: &[usize]) -> Result<f64> {
        if y.is_empty() || z.is_empty() {
            return Err(Error::invalid("MIR needs two non-empty subsets"));
        }
        if y.iter().any(|i| z.contains(i)) {
            return Err(Error::invalid("MIR subsets must be disjoint"));
        }
        let yz: Vec<usize> = y.iter().chain(z).copied().collect();
        let v = 0.5 * (self.log_det(y)? + self.log_det(z)? - self.log_det(&yz)?);
        Ok(if v < 0.0 && v > -MIR_CLAMP { 0.0 } else { v })
    }

    /// O-information rate of the processes in `nodes`.
    pub fn oir(&mut self, nodes: &[usize]) -> Result<f64> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::invalid("O-information rate needs at least two nodes"));
        }
        if n == 2 {
            return Ok(0.0);
        }
        let mut total = (n as f64 - 2.0) * self.entropy_rate(nodes)?;
        for &j in nodes {
            total += self.entropy_rate(&[j])? - self.entropy_rate(&others(nodes, &[j]))?;
        }
        Ok(total)
    }

    /// Gradient of the O-information rate of `nodes` with respect to node `j`.
    pub fn gradient(&mut self, nodes: &[usize], j: usize) -> Result<f64> {
        let n = nodes.len();
        check_member(nodes, j)?;
        if n < 3 {
            return Ok(0.0);
        }
        let mut total = (2.0 - n as f64) * self.mir(&[j], &others(nodes, &[j]))?;
        for &i in nodes.iter().filter(|&&i| i != j) {
            total += self.mir(&[j], &others(nodes, &[i, j]))?;
        }
        Ok(total)
    }

    /// Local O-information rate of the link `i`–`j` within `nodes`, as one
    /// log-determinant ratio over seven restricted models.
    pub fn local_oir(&mut self, nodes: &[usize], i: usize, j: usize) -> Result<f64> {
        check_member(nodes, i)?;
        check_member(nodes, j)?;
        if i == j {
            return Err(Error::invalid("local O-information rate needs two distinct nodes"));
        }
        if nodes.len() < 3 {
            return Ok(0.0);
        }
        let num = self.log_det(&[i])?
            + self.log_det(&[j])?
            + self.log_det(&others(nodes, &[i, j]))?
            + self.log_det(nodes)?;
        let den = self.log_det(&[i, j])? + self.log_det(&others(nodes, &[j]))? + self.log_det(&others(nodes, &[i]))?;
        Ok(0.5 * (num - den))
    }

    /// Same quantity as [`HoiEngine::local_oir`], through three MIR evaluations.
    pub fn local_oir_via_mir(&mut self, nodes: &[usize], i: usize, j: usize) -> Result<f64> {
        check_member(nodes, i)?;
        check_member(nodes, j)?;
        if nodes.len() < 3 {
            return Ok(0.0);
        }
        Ok(self.mir(&[i], &[j])? + self.mir(&[i], &others(nodes, &[i, j]))? - self.mir(&[i], &others(nodes, &[i]))?)
    }
}

fn others(nodes: &[usize], drop: &[usize]) -> Vec<usize> {
    nodes.iter().copied().filter(|i| !drop.contains(i)).collect()
}

fn check_member(nodes: &[usize], j: usize) -> Result<()> {
    if nodes.contains(&j) {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("node {j} is not part of the analyzed set")))
    }
}

fn full(covs: &LagCovarianceSet) -> Vec<usize> {
    (0..covs.n_nodes()).collect()
}

pub fn entropy_rate(covs: &LagCovarianceSet, subset: &SubsetIndex, q: usize) -> Result<f64> {
    HoiEngine::new(covs, q)?.entropy_rate(subset.indices())
}

pub fn mir(covs: &LagCovarianceSet, y: &SubsetIndex, z: &SubsetIndex, q: usize) -> Result<f64> {
    HoiEngine::new(covs, q)?.mir(y.indices(), z.indices())
}

pub fn oir(covs: &LagCovarianceSet, q: usize) -> Result<f64> {
    if covs.n_nodes() == 2 {
        return Ok(0.0);
    }
    HoiEngine::new(covs, q)?.oir(&full(covs))
}

pub fn oir_gradient(covs: &LagCovarianceSet, j: usize, q: usize) -> Result<f64> {
    if covs.n_nodes() < 3 {
        return Err(Error::invalid("the gradient needs at least three nodes"));
    }
    HoiEngine::new(covs, q)?.gradient(&full(covs), j)
}

pub fn local_oir(covs: &LagCovarianceSet, i: usize, j: usize, q: usize) -> Result<f64> {
    if covs.n_nodes() < 3 {
        return Err(Error::invalid("the local O-information rate needs at least three nodes"));
    }
    HoiEngine::new(covs, q)?.local_oir(&full(covs), i, j)
}

/// Every node-, link- and network-level measure of one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoiValues {
    pub n_nodes: usize,
    /// `H_{X_i}` per node.
    pub entropy_rates: Vec<f64>,
    /// OIR gradient per node.
    pub gradient: Vec<f64>,
    /// `I_{X_i;X_j}` per pair, ordered as [`pairs`].
    pub mir: Vec<f64>,
    /// Local OIR per pair, ordered as [`pairs`].
    pub local_oir: Vec<f64>,
    pub oir: f64,
}

impl HoiValues {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.n_nodes)
    }

    pub fn mir_of(&self, i: usize, j: usize) -> f64 {
        self.mir[pair_index(self.n_nodes, i, j)]
    }

    pub fn local_oir_of(&self, i: usize, j: usize) -> f64 {
        self.local_oir[pair_index(self.n_nodes, i, j)]
    }
}

/// All measures of `model` with restricted models of order `q`.
pub fn analyze(model: &VarModel, q: usize) -> Result<HoiValues> {
    let covs = process_covariances(model, q)?;
    analyze_covariances(&covs, q)
}

pub fn analyze_covariances(covs: &LagCovarianceSet, q: usize) -> Result<HoiValues> {
    let mut engine = HoiEngine::new(covs, q)?;
    analyze_with(&mut engine)
}

pub fn analyze_with(engine: &mut HoiEngine<'_>) -> Result<HoiValues> {
    let n = engine.n_nodes();
    if n < 2 {
        return Err(Error::invalid("a network needs at least two nodes"));
    }
    let nodes: Vec<usize> = (0..n).collect();
    let entropy_rates = nodes.iter().map(|&i| engine.entropy_rate(&[i])).collect::<Result<Vec<_>>>()?;
    let gradient = nodes.iter().map(|&j| engine.gradient(&nodes, j)).collect::<Result<Vec<_>>>()?;
    let links = pairs(n);
    let mir = links.iter().map(|&(i, j)| engine.mir(&[i], &[j])).collect::<Result<Vec<_>>>()?;
    let local_oir = links.iter().map(|&(i, j)| engine.local_oir(&nodes, i, j)).collect::<Result<Vec<_>>>()?;
    let oir = engine.oir(&nodes)?;
    Ok(HoiValues { n_nodes: n, entropy_rates, gradient, mir, local_oir, oir })
}

/// Entropy rate of a scalar white noise with variance `var`.
pub fn gaussian_entropy_rate(var: f64) -> f64 {
    0.5 * (LN_2PI_E + math::ln(var))
}
