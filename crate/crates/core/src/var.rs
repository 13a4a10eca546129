//! Vector autoregressive models: definition, simulation, least-squares
//! identification, order selection, and the five-node star benchmark.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::numerics::{spectral_radius, Cholesky, DenseMatrix, STABILITY_MARGIN, SYMMETRY_TOL};

/// Burn-in samples discarded by default when simulating.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Random stream used by every stochastic routine: ChaCha8 seeded from a
/// 64-bit seed with the stream id selecting an independent keystream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent 64-bit seed for child task `stream` of `seed` (splitmix64
/// finalizer), used when a task itself needs a whole family of streams.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `X_n = Σ_k A_k X_{n−k} + U_n` with `Cov(U_n) = innovation_cov`.
///
/// Construction checks that the innovation covariance is symmetric positive
/// definite and the companion matrix has spectral radius below one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVarModel", into = "RawVarModel")]
pub struct VarModel {
    n_nodes: usize,
    coeffs: Vec<DenseMatrix>,
    innovation_cov: DenseMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawVarModel {
    n_nodes: usize,
    order: usize,
    coeffs: Vec<DenseMatrix>,
    innovation_cov: DenseMatrix,
}

impl TryFrom<RawVarModel> for VarModel {
    type Error = Error;
    fn try_from(raw: RawVarModel) -> Result<Self> {
        if raw.order != raw.coeffs.len() {
            return Err(Error::dims(alloc::format!(
                "order {} but {} coefficient matrices",
                raw.order,
                raw.coeffs.len()
            )));
        }
        if raw.innovation_cov.rows() != raw.n_nodes {
            return Err(Error::dims("innovation_cov size differs from n_nodes"));
        }
        VarModel::new(raw.coeffs, raw.innovation_cov)
    }
}

impl From<VarModel> for RawVarModel {
    fn from(m: VarModel) -> Self {
        RawVarModel { n_nodes: m.n_nodes, order: m.coeffs.len(), coeffs: m.coeffs, innovation_cov: m.innovation_cov }
    }
}

impl VarModel {
    pub fn new(coeffs: Vec<DenseMatrix>, innovation_cov: DenseMatrix) -> Result<Self> {
        let n = innovation_cov.rows();
        if !innovation_cov.is_square() {
            return Err(Error::dims("innovation covariance must be square"));
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("model order must be at least 1"));
        }
        if coeffs.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::dims("coefficient matrices must be n_nodes x n_nodes"));
        }
        if !innovation_cov.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::invalid("innovation covariance is not symmetric"));
        }
        let innovation_cov = innovation_cov.symmetrized();
        Cholesky::factor(&innovation_cov)?;
        let model = Self { n_nodes: n, coeffs, innovation_cov };
        let radius = model.companion_radius()?;
        if radius >= 1.0 - STABILITY_MARGIN {
            return Err(Error::UnstableSystem { radius });
        }
        Ok(model)
    }

    /// Order-`order` model with zero coefficients and the given innovation covariance.
    pub fn white_noise(innovation_cov: DenseMatrix, order: usize) -> Result<Self> {
        let n = innovation_cov.rows();
        Self::new(vec![DenseMatrix::zeros(n, n); order.max(1)], innovation_cov)
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[DenseMatrix] {
        &self.coeffs
    }

    pub fn innovation_cov(&self) -> &DenseMatrix {
        &self.innovation_cov
    }

    /// Block companion matrix stacking `order` lags into an order-1 system.
    pub fn companion(&self) -> DenseMatrix {
        let (n, p) = (self.n_nodes, self.order());
        let mut c = DenseMatrix::zeros(n * p, n * p);
        for (k, a) in self.coeffs.iter().enumerate() {
            c.set_block(0, k * n, a);
        }
        for i in n..n * p {
            c[(i, i - n)] = 1.0;
        }
        c
    }

    /// Innovation covariance of the companion system: `Σ_U` in the top-left block.
    pub fn companion_innovation_cov(&self) -> DenseMatrix {
        let (n, p) = (self.n_nodes, self.order());
        let mut c = DenseMatrix::zeros(n * p, n * p);
        c.set_block(0, 0, &self.innovation_cov);
        c
    }

    pub fn companion_radius(&self) -> Result<f64> {
        spectral_radius(&self.companion())
    }

    /// Reorders the nodes: node `perm[i]` of `self` becomes node `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n_nodes)?;
        let coeffs = self.coeffs.iter().map(|a| a.select(perm, perm)).collect();
        Self::new(coeffs, self.innovation_cov.select(perm, perm))
    }

    /// Model of the process with node `node` multiplied by `c`.
    pub fn rescaled(&self, node: usize, c: f64) -> Result<Self> {
        if node >= self.n_nodes || c == 0.0 {
            return Err(Error::invalid("bad rescaling"));
        }
        let n = self.n_nodes;
        let mut d = vec![1.0; n];
        d[node] = c;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let mut b = a.clone();
                for i in 0..n {
                    for j in 0..n {
                        b[(i, j)] = a[(i, j)] * d[i] / d[j];
                    }
                }
                b
            })
            .collect();
        let mut s = self.innovation_cov.clone();
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] *= d[i] * d[j];
            }
        }
        Self::new(coeffs, s)
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::invalid("permutation has wrong length"));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::invalid("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// A realization: `n_samples` rows, one column per node.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: DenseMatrix,
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: DenseMatrix, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != values.cols() {
                return Err(Error::dims("one label per column expected"));
            }
        }
        Ok(Self { values, labels })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let t = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != t) {
            return Err(Error::dims("columns differ in length"));
        }
        let mut data = Vec::with_capacity(n * t);
        for s in 0..t {
            data.extend(columns.iter().map(|c| c[s]));
        }
        Self::new(DenseMatrix::new(t, n, data)?, None)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_nodes() {
            return Err(Error::dims("one label per column expected"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_samples()).map(|t| self.values[(t, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_nodes()).map(|j| self.column(j)).collect()
    }

    /// Series restricted to the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.n_nodes()) {
            return Err(Error::invalid("column index out of range"));
        }
        let rows: Vec<usize> = (0..self.n_samples()).collect();
        let labels = self.labels.as_ref().map(|l| cols.iter().map(|&c| l[c].clone()).collect());
        Self::new(self.values.select(&rows, cols), labels)
    }

    /// Per-column `(mean, sample variance with denominator T − 1)`.
    pub fn column_moments(&self) -> Vec<(f64, f64)> {
        let t = self.n_samples() as f64;
        (0..self.n_nodes())
            .map(|j| {
                let mean = (0..self.n_samples()).map(|s| self.values[(s, j)]).sum::<f64>() / t;
                let ss: f64 = (0..self.n_samples()).map(|s| {
                    let d = self.values[(s, j)] - mean;
                    d * d
                }).sum();
                (mean, ss / (t - 1.0))
            })
            .collect()
    }
}

/// Role of the hub (node 1) in the five-node star benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarVariant {
    /// Hub drives every leaf.
    Source,
    /// Every leaf drives the hub.
    Sink,
    /// Leaves 4 and 5 drive the hub, which drives leaves 2 and 3.
    Mediator,
}

impl StarVariant {
    pub const ALL: [StarVariant; 3] = [StarVariant::Source, StarVariant::Sink, StarVariant::Mediator];

    pub fn name(self) -> &'static str {
        match self {
            StarVariant::Source => "source",
            StarVariant::Sink => "sink",
            StarVariant::Mediator => "mediator",
        }
    }
}

impl core::str::FromStr for StarVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(StarVariant::Source),
            "sink" => Ok(StarVariant::Sink),
            "mediator" => Ok(StarVariant::Mediator),
            other => Err(Error::invalid(alloc::format!("unknown star variant `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    pub variant: StarVariant,
    /// Hub–leaf coefficient of the source and sink variants, and hub→2 in the mediator.
    pub coupling: f64,
    /// Leaf→hub coefficients from nodes 4 and 5 in the mediator.
    pub inflow: f64,
    /// Hub→node-3 coefficient in the mediator variant, in `[0, 0.3]`.
    pub a31: f64,
}

impl StarConfig {
    pub const DEFAULT_COUPLING: f64 = 0.3;
    /// With this inflow the mediator is clearly synergistic when node 3 is
    /// isolated and balanced (|OIR| < 1e-3) once `a31 = 0.3` matches hub→2.
    pub const DEFAULT_INFLOW: f64 = 2.0;

    pub fn new(variant: StarVariant) -> Self {
        Self {
            variant,
            coupling: Self::DEFAULT_COUPLING,
            inflow: Self::DEFAULT_INFLOW,
            a31: Self::DEFAULT_COUPLING,
        }
    }

    pub fn mediator(a31: f64) -> Self {
        Self { a31, ..Self::new(StarVariant::Mediator) }
    }
}

/// Five-node, order-1 star model with unit innovations.
///
/// Node 1 (index 0) is the hub. Entry `(i, j)` of the coefficient matrix is
/// the effect of node `j` at lag 1 on node `i`.
pub fn build_star_model(cfg: &StarConfig) -> Result<VarModel> {
    if !cfg.coupling.is_finite() || !cfg.inflow.is_finite() || !(0.0..=0.3).contains(&cfg.a31) {
        return Err(Error::invalid("star coupling must be finite and a31 within [0, 0.3]"));
    }
    let c = cfg.coupling;
    let mut a = DenseMatrix::zeros(5, 5);
    match cfg.variant {
        StarVariant::Source => (1..5).for_each(|j| a[(j, 0)] = c),
        StarVariant::Sink => (1..5).for_each(|j| a[(0, j)] = c),
        StarVariant::Mediator => {
            a[(1, 0)] = c;
            a[(2, 0)] = cfg.a31;
            a[(0, 3)] = cfg.inflow;
            a[(0, 4)] = cfg.inflow;
        }
    }
    VarModel::new(vec![a], DenseMatrix::identity(5))
}

/// Iterates the model over the given innovation rows from a zero initial
/// state, dropping the first `burn_in` outputs.
pub fn propagate(model: &VarModel, innovations: &DenseMatrix, burn_in: usize) -> Result<TimeSeries> {
    let (n, p) = (model.n_nodes(), model.order());
    if innovations.cols() != n {
        return Err(Error::dims("innovations must have one column per node"));
    }
    let total = innovations.rows();
    if total <= burn_in {
        return Err(Error::invalid("burn-in leaves no samples"));
    }
    let mut x = vec![0.0; total * n];
    for t in 0..total {
        let (past, cur) = x.split_at_mut(t * n);
        let cur = &mut cur[..n];
        cur.copy_from_slice(innovations.row(t));
        for (k, a) in model.coeffs().iter().enumerate().take(t.min(p)) {
            let prev = &past[(t - k - 1) * n..(t - k) * n];
            for (i, c) in cur.iter_mut().enumerate() {
                *c += a.row(i).iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
            }
        }
    }
    let values = DenseMatrix::new(total - burn_in, n, x.split_off(burn_in * n))?;
    TimeSeries::new(values, None)
}

/// Gaussian realization of `model` with `n_samples` retained samples.
pub fn simulate(model: &VarModel, n_samples: usize, burn_in: usize, seed: u64) -> Result<TimeSeries> {
    simulate_stream(model, n_samples, burn_in, seed, 0)
}

/// As [`simulate`], drawing from stream `stream` of `seed`.
pub fn simulate_stream(
    model: &VarModel,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    stream: u64,
) -> Result<TimeSeries> {
    simulate_with_rng(model, n_samples, burn_in, &mut stream_rng(seed, stream))
}

pub fn simulate_with_rng<R: Rng + ?Sized>(
    model: &VarModel,
    n_samples: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<TimeSeries> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let n = model.n_nodes();
    let chol = Cholesky::factor(model.innovation_cov())?;
    let l = chol.factor_lower();
    let total = n_samples + burn_in;
    let mut u = DenseMatrix::zeros(total, n);
    let mut z = vec![0.0; n];
    for t in 0..total {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..n {
            u[(t, i)] = l.row(i)[..=i].iter().zip(&z).map(|(a, b)| a * b).sum();
        }
    }
    propagate(model, &u, burn_in)
}

/// Least-squares VAR fit with its residuals.
#[derive(Clone, Debug)]
pub struct FittedVar {
    pub model: VarModel,
    /// Residual rows, one per regression equation (`n_samples − order` rows).
    pub residuals: DenseMatrix,
}

struct OlsFit {
    coeffs: Vec<DenseMatrix>,
    residuals: DenseMatrix,
    residual_cov: DenseMatrix,
}

/// Regression of `x_n` on `[x_{n−1} … x_{n−order}]` for `n ≥ start`, after
/// centering each column on its full-series mean.
fn ols(series: &TimeSeries, order: usize, start: usize) -> Result<OlsFit> {
    let (t, n) = (series.n_samples(), series.n_nodes());
    debug_assert!(start >= order);
    let means: Vec<f64> = series.column_moments().into_iter().map(|(m, _)| m).collect();
    let x = |s: usize, j: usize| series.values()[(s, j)] - means[j];
    let rows = t - start;
    let k = n * order;
    let mut z = DenseMatrix::zeros(rows, k);
    let mut y = DenseMatrix::zeros(rows, n);
    for (r, s) in (start..t).enumerate() {
        for j in 0..n {
            y[(r, j)] = x(s, j);
        }
        for lag in 1..=order {
            for j in 0..n {
                z[(r, (lag - 1) * n + j)] = x(s - lag, j);
            }
        }
    }
    let zt = z.transpose();
    let gram = zt.matmul(&z);
    let chol = Cholesky::factor(&gram).map_err(|_| Error::RankDeficientRegressors)?;
    if chol.condition_estimate() > 1e12 {
        return Err(Error::RankDeficientRegressors);
    }
    let beta = chol.solve(&zt.matmul(&y));
    let residuals = y.sub(&z.matmul(&beta));
    let residual_cov = residuals.transpose().matmul(&residuals).scale(1.0 / rows as f64).symmetrized();
    let coeffs = (0..order).map(|lag| beta.block(lag * n, 0, n, n).transpose()).collect();
    Ok(OlsFit { coeffs, residuals, residual_cov })
}

fn check_fit_length(series: &TimeSeries, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::invalid("order must be at least 1"));
    }
    if series.n_samples() <= series.n_nodes() * order + 10 {
        return Err(Error::invalid(alloc::format!(
            "{} samples are too few for order {} with {} nodes",
            series.n_samples(),
            order,
            series.n_nodes()
        )));
    }
    Ok(())
}

/// Ordinary least-squares identification of an order-`order` VAR.
///
/// Columns are centered first; the innovation covariance is the residual
/// covariance with denominator `n_samples − order`.
pub fn fit_least_squares(series: &TimeSeries, order: usize) -> Result<FittedVar> {
    check_fit_length(series, order)?;
    let fit = ols(series, order, order)?;
    let model = VarModel::new(fit.coeffs, fit.residual_cov)?;
    Ok(FittedVar { model, residuals: fit.residuals })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderCriterion {
    Aic,
    Bic,
}

/// Criterion value for each order `1..=max_order`, all fitted on the common
/// sample that starts at `max_order`.
pub fn order_criteria(series: &TimeSeries, max_order: usize, criterion: OrderCriterion) -> Result<Vec<f64>> {
    if max_order == 0 {
        return Err(Error::invalid("max_order must be at least 1"));
    }
    check_fit_length(series, max_order)?;
    let n = series.n_nodes() as f64;
    let rows = (series.n_samples() - max_order) as f64;
    let penalty = match criterion {
        OrderCriterion::Aic => 2.0,
        OrderCriterion::Bic => math::ln(rows),
    };
    (1..=max_order)
        .map(|p| {
            let fit = ols(series, p, max_order)?;
            let log_det = Cholesky::factor(&fit.residual_cov).map_err(|_| Error::RankDeficientRegressors)?.log_det();
            Ok(rows * log_det + penalty * n * n * p as f64)
        })
        .collect()
}

/// Order in `1..=max_order` minimizing the criterion; ties go to the smaller order.
pub fn select_order(series: &TimeSeries, max_order: usize, criterion: OrderCriterion) -> Result<usize> {
    let values = order_criteria(series, max_order, criterion)?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    Ok(best + 1)
}

/// Per-column standardization to mean 0 and unit variance (denominator `T − 1`).
pub fn zscore(series: &TimeSeries) -> Result<TimeSeries> {
    let moments = series.column_moments();
    for (j, &(_, var)) in moments.iter().enumerate() {
        if var <= 0.0 || !var.is_finite() {
            return Err(Error::ZeroVariance { column: j });
        }
    }
    let t = series.n_samples();
    let mut out = series.values().clone();
    for s in 0..t {
        for (j, &(mean, var)) in moments.iter().enumerate() {
            out[(s, j)] = (out[(s, j)] - mean) / math::sqrt(var);
        }
    }
    TimeSeries::new(out, series.labels.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagcov::process_covariances;

    fn sample_lag_cov(s: &TimeSeries, lag: usize) -> DenseMatrix {
        let (t, n) = (s.n_samples(), s.n_nodes());
        let mut c = DenseMatrix::zeros(n, n);
        for r in lag..t {
            for i in 0..n {
                for j in 0..n {
                    c[(i, j)] += s.values()[(r, i)] * s.values()[(r - lag, j)];
                }
            }
        }
        c.scale(1.0 / (t - lag) as f64)
    }

    #[test]
    fn star_variants_structure() {
        let m0 = build_star_model(&StarConfig::mediator(0.0)).unwrap();
        assert!(m0.coeffs()[0].row(2).iter().all(|&v| v == 0.0));
        let m3 = build_star_model(&StarConfig::mediator(0.3)).unwrap();
        assert_eq!(m3.coeffs()[0][(2, 0)], 0.3);
        for v in StarVariant::ALL {
            let m = build_star_model(&StarConfig::new(v)).unwrap();
            assert_eq!(m.companion_radius().unwrap(), 0.0);
            assert!(m.coeffs()[0].diag().iter().all(|&d| d == 0.0));
        }
        let src = build_star_model(&StarConfig::new(StarVariant::Source)).unwrap();
        assert_eq!(src.coeffs()[0][(3, 0)], 0.3);
        let sink = build_star_model(&StarConfig::new(StarVariant::Sink)).unwrap();
        assert_eq!(sink.coeffs()[0][(0, 3)], 0.3);
    }

    #[test]
    fn star_rejects_out_of_range_a31() {
        assert!(build_star_model(&StarConfig::mediator(0.31)).is_err());
        assert!(build_star_model(&StarConfig::mediator(-0.01)).is_err());
    }

    #[test]
    fn white_noise_sample_covariance() {
        let m = VarModel::white_noise(DenseMatrix::identity(3), 1).unwrap();
        let s = simulate(&m, 100_000, 100, 1).unwrap();
        let c = sample_lag_cov(&s, 0);
        assert!(c.sub(&DenseMatrix::identity(3)).max_abs() < 0.02);
    }

    #[test]
    fn simulate_is_deterministic() {
        let m = build_star_model(&StarConfig::new(StarVariant::Sink)).unwrap();
        let a = simulate(&m, 500, 10, 42).unwrap();
        let b = simulate(&m, 500, 10, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_stream(&m, 500, 10, 42, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simulate_matches_theoretical_lag_covariances() {
        let m = build_star_model(&StarConfig::new(StarVariant::Source)).unwrap();
        let s = simulate(&m, 1_000_000, DEFAULT_BURN_IN, 3).unwrap();
        let covs = process_covariances(&m, 2).unwrap();
        for lag in 0..=2 {
            let emp = sample_lag_cov(&s, lag);
            assert!(emp.sub(&covs.sigmas()[lag]).max_abs() < 0.01, "lag {lag}");
        }
    }

    #[test]
    fn correlated_innovations_are_reproduced() {
        let cov = DenseMatrix::from_rows(&[&[1.0, 0.6], &[0.6, 2.0]]).unwrap();
        let m = VarModel::white_noise(cov.clone(), 1).unwrap();
        let s = simulate(&m, 200_000, 0, 9).unwrap();
        assert!(sample_lag_cov(&s, 0).sub(&cov).max_abs() < 0.03);
    }

    #[test]
    fn fit_recovers_mediator() {
        let truth = build_star_model(&StarConfig::mediator(0.3)).unwrap();
        let s = simulate(&truth, 10_000, DEFAULT_BURN_IN, 11).unwrap();
        let fit = fit_least_squares(&s, 1).unwrap();
        assert!((fit.model.coeffs()[0][(2, 0)] - 0.3).abs() < 0.05);
        assert!(fit.model.innovation_cov().sub(&DenseMatrix::identity(5)).max_abs() < 0.05);
        assert_eq!(fit.residuals.rows(), 9_999);
    }

    #[test]
    fn fit_white_noise_has_small_coefficients() {
        let m = VarModel::white_noise(DenseMatrix::identity(4), 1).unwrap();
        let s = simulate(&m, 5000, 0, 5).unwrap();
        let fit = fit_least_squares(&s, 1).unwrap();
        assert!(fit.model.coeffs()[0].max_abs() < 0.05);
    }

    #[test]
    fn fit_converges_over_seeds() {
        let truth = build_star_model(&StarConfig::mediator(0.3)).unwrap();
        for seed in 0..10 {
            let s = simulate(&truth, 50_000, DEFAULT_BURN_IN, seed).unwrap();
            let fit = fit_least_squares(&s, 1).unwrap();
            let err = fit.model.coeffs()[0].sub(&truth.coeffs()[0]).max_abs();
            assert!(err < 0.03, "seed {seed}: {err}");
        }
    }

    #[test]
    fn fit_rejects_constant_column() {
        let cols = vec![(0..100).map(|v| libm::sin(v as f64)).collect::<Vec<_>>(), vec![3.0; 100]];
        let s = TimeSeries::from_columns(&cols).unwrap();
        assert!(matches!(fit_least_squares(&s, 1), Err(Error::RankDeficientRegressors)));
    }

    #[test]
    fn fit_rejects_short_series() {
        let s = TimeSeries::from_columns(&[vec![0.1; 12], vec![0.2; 12]]).unwrap();
        assert!(matches!(fit_least_squares(&s, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn select_order_star_bic() {
        let m = build_star_model(&StarConfig::mediator(0.3)).unwrap();
        let hits = (0..100)
            .filter(|&seed| {
                let s = simulate(&m, 1000, DEFAULT_BURN_IN, seed).unwrap();
                select_order(&s, 5, OrderCriterion::Bic).unwrap() == 1
            })
            .count();
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn select_order_white_noise_is_one() {
        let m = VarModel::white_noise(DenseMatrix::identity(2), 1).unwrap();
        let s = simulate(&m, 2000, 0, 8).unwrap();
        assert_eq!(select_order(&s, 4, OrderCriterion::Bic).unwrap(), 1);
    }

    #[test]
    fn select_order_ar2() {
        let a1 = DenseMatrix::from_rows(&[&[0.2]]).unwrap();
        let a2 = DenseMatrix::from_rows(&[&[-0.6]]).unwrap();
        let m = VarModel::new(vec![a1, a2], DenseMatrix::identity(1)).unwrap();
        for crit in [OrderCriterion::Aic, OrderCriterion::Bic] {
            let hits = (0..20)
                .filter(|&seed| select_order(&simulate(&m, 1000, 200, seed).unwrap(), 6, crit).unwrap() == 2)
                .count();
            assert!(hits >= 16, "{crit:?}: {hits}");
        }
    }

    #[test]
    fn select_order_invariant_under_zscore() {
        let m = build_star_model(&StarConfig::new(StarVariant::Sink)).unwrap();
        for seed in 0..5 {
            let s = simulate(&m, 400, 100, seed).unwrap();
            let z = zscore(&s).unwrap();
            for crit in [OrderCriterion::Aic, OrderCriterion::Bic] {
                assert_eq!(select_order(&s, 4, crit).unwrap(), select_order(&z, 4, crit).unwrap());
            }
        }
    }

    #[test]
    fn zscore_properties() {
        let m = VarModel::white_noise(DenseMatrix::identity(2), 1).unwrap();
        let s = simulate(&m, 1000, 0, 2).unwrap();
        let shifted = TimeSeries::from_columns(&[
            s.column(0).iter().map(|v| v + 50.0).collect(),
            s.column(1).iter().map(|v| v * 10.0).collect(),
        ])
        .unwrap();
        let z = zscore(&shifted).unwrap();
        for (mean, var) in z.column_moments() {
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
        let z0 = zscore(&s).unwrap();
        assert!(z.values().sub(z0.values()).max_abs() < 1e-12);
        let zz = zscore(&z).unwrap();
        assert!(zz.values().sub(z.values()).max_abs() < 1e-12);
    }

    #[test]
    fn zscore_rejects_constant() {
        let s = TimeSeries::from_columns(&[vec![1.0, 2.0, 3.0], vec![4.0; 3]]).unwrap();
        assert_eq!(zscore(&s), Err(Error::ZeroVariance { column: 1 }));
    }

    #[test]
    fn model_rejects_unstable_and_bad_cov() {
        let a = DenseMatrix::from_rows(&[&[1.1]]).unwrap();
        assert!(matches!(VarModel::new(vec![a], DenseMatrix::identity(1)), Err(Error::UnstableSystem { .. })));
        let bad = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(VarModel::white_noise(bad, 1).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn star_grid_is_valid(v in 0usize..3, a31 in 0.0f64..=0.3, coupling in -0.9f64..0.9, inflow in -3.0f64..3.0) {
                let cfg = StarConfig { variant: StarVariant::ALL[v], coupling, inflow, a31 };
                let m = build_star_model(&cfg).unwrap();
                prop_assert_eq!(m.companion_radius().unwrap(), 0.0);
                prop_assert_eq!(m.innovation_cov(), &DenseMatrix::identity(5));
            }
        }
    }
}
