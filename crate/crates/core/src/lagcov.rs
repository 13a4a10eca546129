//! Lagged covariances of the full VAR process, and restricted models of
//! arbitrary node subsets derived from them (no refitting).
//!
//! The covariances `Σ_k = E[X_n X_{n−k}ᵀ]` for `k < p` come from the
//! discrete Lyapunov equation of the companion system; larger lags follow the
//! Yule–Walker recursion `Σ_k = Σ_l A_l Σ_{k−l}`. A restricted model of a
//! subset `Y` regresses `Y_n` on `q` of its own lags using the block-Toeplitz
//! covariance of those lags.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{solve_discrete_lyapunov, Cholesky, DenseMatrix, MAX_CONDITION};
use crate::var::VarModel;

/// `sigmas[k] = E[X_n X_{n−k}ᵀ]` for `k = 0..=max_lag`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagCovarianceSet {
    sigmas: Vec<DenseMatrix>,
}

impl LagCovarianceSet {
    /// Wraps precomputed lag covariances; `sigmas[0]` must be symmetric positive definite.
    pub fn new(sigmas: Vec<DenseMatrix>) -> Result<Self> {
        let first = sigmas.first().ok_or_else(|| Error::invalid("no lag covariances"))?;
        let n = first.rows();
        if sigmas.iter().any(|s| s.rows() != n || s.cols() != n) {
            return Err(Error::dims("lag covariances must all be n_nodes x n_nodes"));
        }
        Cholesky::factor(&first.symmetrized())?;
        Ok(Self { sigmas })
    }

    pub fn n_nodes(&self) -> usize {
        self.sigmas[0].rows()
    }

    pub fn max_lag(&self) -> usize {
        self.sigmas.len() - 1
    }

    pub fn sigmas(&self) -> &[DenseMatrix] {
        &self.sigmas
    }

    /// `E[X_n X_{n−k}ᵀ]` for any signed lag, using `Σ_{−k} = Σ_kᵀ`.
    pub fn at(&self, k: isize) -> DenseMatrix {
        if k >= 0 {
            self.sigmas[k as usize].clone()
        } else {
            self.sigmas[(-k) as usize].transpose()
        }
    }

    /// Largest Yule–Walker residual `‖Σ_k − Σ_l A_l Σ_{k−l}‖∞` over `k = 1..=max_lag`.
    pub fn yule_walker_residual(&self, model: &VarModel) -> f64 {
        (1..=self.max_lag())
            .map(|k| {
                let mut r = self.sigmas[k].clone();
                for (l, a) in model.coeffs().iter().enumerate() {
                    r = r.sub(&a.matmul(&self.at(k as isize - l as isize - 1)));
                }
                r.max_abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Ordered list of distinct node indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex(Vec<usize>);

impl SubsetIndex {
    pub fn new(indices: Vec<usize>, n_nodes: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("subset must not be empty"));
        }
        for (k, &i) in indices.iter().enumerate() {
            if i >= n_nodes {
                return Err(Error::invalid(alloc::format!("node {i} out of range for {n_nodes} nodes")));
            }
            if indices[..k].contains(&i) {
                return Err(Error::invalid(alloc::format!("node {i} repeated in subset")));
            }
        }
        Ok(Self(indices))
    }

    pub fn full(n_nodes: usize) -> Self {
        Self((0..n_nodes).collect())
    }

    pub fn single(i: usize) -> Self {
        Self(alloc::vec![i])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    /// Same nodes, ascending.
    pub fn sorted(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable();
        Self(v)
    }

    /// This subset minus the listed nodes; `None` when nothing is left.
    pub fn without(&self, drop: &[usize]) -> Option<Self> {
        let v: Vec<usize> = self.0.iter().copied().filter(|i| !drop.contains(i)).collect();
        (!v.is_empty()).then_some(Self(v))
    }

    pub fn is_disjoint(&self, other: &SubsetIndex) -> bool {
        self.0.iter().all(|i| !other.contains(*i))
    }

    pub fn union(&self, other: &SubsetIndex) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().copied().filter(|i| !self.contains(*i)));
        Self(v)
    }
}

/// Restricted autoregression of a subset on `max_lag` of its own lags.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedModel {
    pub subset: SubsetIndex,
    /// `coeffs[k]` multiplies `Y_{n−k−1}`.
    pub coeffs: Vec<DenseMatrix>,
    pub residual_cov: DenseMatrix,
}

impl RestrictedModel {
    pub fn max_lag(&self) -> usize {
        self.coeffs.len()
    }
}

/// Lag covariances of `model` up to `max_lag`.
pub fn process_covariances(model: &VarModel, max_lag: usize) -> Result<LagCovarianceSet> {
    let (n, p) = (model.n_nodes(), model.order());
    let stacked = solve_discrete_lyapunov(&model.companion(), &model.companion_innovation_cov())?;
    let mut sigmas: Vec<DenseMatrix> = (0..p.min(max_lag + 1)).map(|k| stacked.block(0, k * n, n, n)).collect();
    if sigmas.len() == p {
        // Σ_{−k} = Σ_kᵀ for the lags reaching before the stacked window.
        for k in p..=max_lag {
            let mut s = DenseMatrix::zeros(n, n);
            for (l, a) in model.coeffs().iter().enumerate() {
                let lag = k as isize - l as isize - 1;
                let prev = if lag >= 0 { sigmas[lag as usize].clone() } else { sigmas[(-lag) as usize].transpose() };
                s = s.add(&a.matmul(&prev));
            }
            sigmas.push(s);
        }
    }
    sigmas[0] = sigmas[0].symmetrized();
    LagCovarianceSet::new(sigmas)
}

/// Options for [`restricted_model_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RestrictedOptions {
    /// Ridge `ε` added to the diagonal of the lag covariance before solving.
    pub ridge: Option<f64>,
}

pub fn restricted_model(covs: &LagCovarianceSet, subset: &SubsetIndex, max_lag: usize) -> Result<RestrictedModel> {
    restricted_model_with(covs, subset, max_lag, RestrictedOptions::default())
}

pub fn restricted_model_with(
    covs: &LagCovarianceSet,
    subset: &SubsetIndex,
    max_lag: usize,
    opts: RestrictedOptions,
) -> Result<RestrictedModel> {
    let solved = RestrictedSolve::new(covs, subset, max_lag, opts)?;
    let mut beta_t = solved.z.clone();
    solved.chol.backward_solve(&mut beta_t);
    let m = subset.len();
    let coeffs = (0..max_lag).map(|k| beta_t.block(k * m, 0, m, m).transpose()).collect();
    Ok(RestrictedModel { subset: subset.clone(), coeffs, residual_cov: solved.residual_cov })
}

/// Residual covariance only, skipping the coefficient back-substitution.
pub(crate) fn restricted_residual_cov(
    covs: &LagCovarianceSet,
    subset: &SubsetIndex,
    max_lag: usize,
    opts: RestrictedOptions,
) -> Result<DenseMatrix> {
    Ok(RestrictedSolve::new(covs, subset, max_lag, opts)?.residual_cov)
}

struct RestrictedSolve {
    chol: Cholesky,
    /// `L⁻¹ Cᵀ` where `C = [Σ_{Y,1} … Σ_{Y,q}]`.
    z: DenseMatrix,
    residual_cov: DenseMatrix,
}

impl RestrictedSolve {
    fn new(covs: &LagCovarianceSet, subset: &SubsetIndex, q: usize, opts: RestrictedOptions) -> Result<Self> {
        if q == 0 || q > covs.max_lag() {
            return Err(Error::invalid(alloc::format!(
                "restricted lag {q} must lie in 1..={}",
                covs.max_lag()
            )));
        }
        SubsetIndex::new(subset.indices().to_vec(), covs.n_nodes())?;
        let idx = subset.indices();
        let m = idx.len();
        let sub: Vec<DenseMatrix> = covs.sigmas()[..=q].iter().map(|s| s.select(idx, idx)).collect();

        // Γ[a, b] = E[Y_{n−1−a} Y_{n−1−b}ᵀ] = Σ_{b−a}
        let mut gamma = DenseMatrix::zeros(m * q, m * q);
        for a in 0..q {
            gamma.set_block(a * m, a * m, &sub[0]);
            for b in a + 1..q {
                gamma.set_block(a * m, b * m, &sub[b - a]);
                gamma.set_block(b * m, a * m, &sub[b - a].transpose());
            }
        }
        let mut gamma = gamma.symmetrized();
        if let Some(eps) = opts.ridge {
            gamma.add_diag(eps);
        }
        let chol = Cholesky::factor(&gamma).map_err(|_| Error::SingularSolve { condition: f64::INFINITY })?;
        let condition = chol.condition_estimate();
        if condition > MAX_CONDITION {
            return Err(Error::SingularSolve { condition });
        }
        // Cᵀ stacks Σ_{Y,k}ᵀ vertically.
        let mut z = DenseMatrix::zeros(m * q, m);
        for k in 0..q {
            z.set_block(k * m, 0, &sub[k + 1].transpose());
        }
        chol.forward_solve(&mut z);
        let residual_cov = sub[0].sub(&z.transpose().matmul(&z)).symmetrized();
        Cholesky::factor(&residual_cov)?;
        Ok(Self { chol, z, residual_cov })
    }
}
