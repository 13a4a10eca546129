//! Star-network study: analytic networks of the three hub configurations,
//! and a Monte Carlo sweep of the mediator over `a31` and series length with
//! bootstrap detection rates and bias/std summaries.
//!
//! Each (a31, length) cell is written to `cells/` as soon as it completes; a
//! rerun with the same settings loads finished cells instead of recomputing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hoinet_core::measures::pairs;
use hoinet_core::significance::SignificanceConfig;
use hoinet_core::var::{build_star_model, derive_seed, simulate_stream, StarConfig, StarVariant, DEFAULT_BURN_IN};
use hoinet_core::{analyze, HoiNetwork, HoiValues, DEFAULT_RESTRICTED_LAG};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HoiError, Result};
use crate::io::{read_json, write_json, write_network, OutputFormat};
use crate::pipeline::analyze_var_model;
use crate::signif::{bootstrap_hoi, estimate};

/// Largest `a31` of the sweep.
pub const A31_MAX: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproConfig {
    pub grid: Vec<f64>,
    pub lengths: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    /// Order of the fitted model.
    pub order: usize,
    pub q: usize,
    pub coupling: f64,
    pub inflow: f64,
    pub burn_in: usize,
    /// Bootstrap settings; without them only the estimates are collected.
    pub significance: Option<SignificanceConfig>,
}

impl Default for ReproConfig {
    fn default() -> Self {
        let star = StarConfig::new(StarVariant::Mediator);
        Self {
            grid: grid_from_steps(11),
            lengths: vec![250, 500, 1000],
            runs: 100,
            seed: 0,
            order: 1,
            q: DEFAULT_RESTRICTED_LAG,
            coupling: star.coupling,
            inflow: star.inflow,
            burn_in: DEFAULT_BURN_IN,
            significance: Some(SignificanceConfig::default()),
        }
    }
}

/// `steps` equally spaced values over `[0, A31_MAX]`; one step gives `[0]`.
pub fn grid_from_steps(steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps).map(|i| ((i as f64 * A31_MAX / (steps - 1) as f64) * 1e12).round() / 1e12).collect(),
    }
}

impl ReproConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.lengths.is_empty() || self.runs == 0 {
            return Err(HoiError::usage("grid, lengths and runs must be non-empty"));
        }
        if let Some(a) = self.grid.iter().find(|a| !(0.0..=A31_MAX).contains(*a)) {
            return Err(HoiError::usage(format!("a31 = {a} outside [0, {A31_MAX}]")));
        }
        if let Some(c) = &self.significance {
            c.validate()?;
        }
        Ok(())
    }

    pub fn mediator(&self, a31: f64) -> StarConfig {
        StarConfig { a31, coupling: self.coupling, inflow: self.inflow, ..StarConfig::new(StarVariant::Mediator) }
    }

    /// Everything that determines a cell's content except its coordinates.
    fn fingerprint(&self) -> String {
        let c = Self { grid: Vec::new(), lengths: Vec::new(), ..self.clone() };
        serde_json::to_string(&c).expect("finite config")
    }
}

/// One realization: estimates, plus verdicts when bootstrapped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub gradient: Vec<f64>,
    pub local_oir: Vec<f64>,
    pub oir: f64,
    pub gradient_sig: Option<Vec<bool>>,
    pub local_oir_sig: Option<Vec<bool>>,
    pub oir_sig: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub a31: f64,
    pub length: usize,
    pub fingerprint: String,
    pub records: Vec<RunRecord>,
    /// Realizations whose fit or bootstrap failed; excluded from the rates.
    pub failed: usize,
}

impl CellResult {
    fn rate(&self, flag: impl Fn(&RunRecord) -> Option<bool>) -> Option<f64> {
        let flags: Vec<bool> = self.records.iter().filter_map(flag).collect();
        (!flags.is_empty()).then(|| flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64)
    }

    /// Fraction of realizations whose gradient test on node `j` rejects.
    pub fn gradient_rate(&self, j: usize) -> Option<f64> {
        self.rate(|r| r.gradient_sig.as_ref().map(|s| s[j]))
    }

    /// As [`Self::gradient_rate`] for the local OIR of pair index `k`.
    pub fn local_oir_rate(&self, k: usize) -> Option<f64> {
        self.rate(|r| r.local_oir_sig.as_ref().map(|s| s[k]))
    }

    pub fn oir_rate(&self) -> Option<f64> {
        self.rate(|r| r.oir_sig)
    }
}

/// Stream id of realization `run` in cell `(g, l)`.
fn run_stream(g: usize, l: usize, run: usize) -> u64 {
    ((g as u64) << 40) | ((l as u64) << 24) | run as u64
}

fn run_one(cfg: &ReproConfig, g: usize, l: usize, run: usize) -> Result<RunRecord> {
    let model = build_star_model(&cfg.mediator(cfg.grid[g]))?;
    let stream = run_stream(g, l, run);
    let series = simulate_stream(&model, cfg.lengths[l], cfg.burn_in, cfg.seed, stream)?;
    Ok(match &cfg.significance {
        Some(sc) => {
            let sc = SignificanceConfig { seed: derive_seed(cfg.seed, stream), ..*sc };
            let out = bootstrap_hoi(&series, cfg.order, cfg.q, &sc)?;
            let s = &out.significance;
            RunRecord {
                gradient: out.observed.gradient,
                local_oir: out.observed.local_oir,
                oir: out.observed.oir,
                gradient_sig: Some(s.gradient.iter().map(|r| r.significant).collect()),
                local_oir_sig: Some(s.local_oir.iter().map(|r| r.significant).collect()),
                oir_sig: Some(s.oir.significant),
            }
        }
        None => {
            let (_, v) = estimate(&series, cfg.order, cfg.q)?;
            RunRecord {
                gradient: v.gradient,
                local_oir: v.local_oir,
                oir: v.oir,
                gradient_sig: None,
                local_oir_sig: None,
                oir_sig: None,
            }
        }
    })
}

pub fn run_cell(cfg: &ReproConfig, g: usize, l: usize) -> CellResult {
    let outcomes: Vec<Result<RunRecord>> = (0..cfg.runs).into_par_iter().map(|r| run_one(cfg, g, l, r)).collect();
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    CellResult {
        a31: cfg.grid[g],
        length: cfg.lengths[l],
        fingerprint: cfg.fingerprint(),
        records: outcomes.into_iter().filter_map(|o| o.ok()).collect(),
        failed,
    }
}

fn cell_path(dir: &Path, a31: f64, length: usize) -> PathBuf {
    dir.join(format!("a31_{a31:.4}_T{length}.json"))
}

/// Runs every cell, reusing finished cells found in `cell_dir`.
pub fn sweep(cfg: &ReproConfig, cell_dir: Option<&Path>) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    if let Some(d) = cell_dir {
        std::fs::create_dir_all(d).map_err(|e| HoiError::io(d, e))?;
    }
    let fp = cfg.fingerprint();
    let mut cells = Vec::new();
    for g in 0..cfg.grid.len() {
        for l in 0..cfg.lengths.len() {
            let path = cell_dir.map(|d| cell_path(d, cfg.grid[g], cfg.lengths[l]));
            let cached = path
                .as_deref()
                .filter(|p| p.exists())
                .and_then(|p| read_json::<CellResult>(p).ok())
                .filter(|c| c.fingerprint == fp && c.a31 == cfg.grid[g] && c.length == cfg.lengths[l]);
            let cell = match cached {
                Some(c) => c,
                None => {
                    let c = run_cell(cfg, g, l);
                    if let Some(p) = &path {
                        write_json(p, &c)?;
                    }
                    c
                }
            };
            if cell.records.is_empty() {
                return Err(HoiError::usage(format!(
                    "every realization failed at a31 = {}, T = {}",
                    cell.a31, cell.length
                )));
            }
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Measure names in table order: `(family, i, j)` with pair indices ordered as `pairs`.
fn measure_slots(n: usize) -> Vec<(&'static str, Option<usize>, Option<usize>)> {
    let mut v: Vec<_> = (0..n).map(|j| ("gradient", Some(j), None)).collect();
    v.extend(pairs(n).into_iter().map(|(i, j)| ("local_oir", Some(i), Some(j))));
    v.push(("oir", None, None));
    v
}

fn slot_value(v: (&[f64], &[f64], f64), slot: usize) -> f64 {
    let (gradient, local, oir) = v;
    let n = gradient.len();
    if slot < n {
        gradient[slot]
    } else if slot < n + local.len() {
        local[slot - n]
    } else {
        oir
    }
}

fn opt_index(i: Option<usize>) -> String {
    i.map(|i| i.to_string()).unwrap_or_default()
}

/// Long-format detection table: `a31,length,measure,i,j,detected,runs,rate`.
pub fn detection_table(cells: &[CellResult]) -> String {
    let mut out = String::from("a31,length,measure,i,j,detected,runs,rate\n");
    for c in cells {
        let Some(first) = c.records.first() else { continue };
        if first.oir_sig.is_none() {
            continue;
        }
        let n = first.gradient.len();
        for (slot, (name, i, j)) in measure_slots(n).into_iter().enumerate() {
            let rate = if slot < n {
                c.gradient_rate(slot)
            } else if slot < n + first.local_oir.len() {
                c.local_oir_rate(slot - n)
            } else {
                c.oir_rate()
            }
            .expect("bootstrapped cell");
            let runs = c.records.len();
            let detected = (rate * runs as f64).round() as usize;
            let _ = writeln!(out, "{},{},{name},{},{},{detected},{runs},{rate}", c.a31, c.length, opt_index(i), opt_index(j));
        }
    }
    out
}

/// Per-cell estimate statistics against the analytic values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateStats {
    pub a31: f64,
    pub length: usize,
    pub measure: String,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub truth: f64,
    pub mean: f64,
    pub std: f64,
    /// Mean absolute error of the estimates.
    pub mae: f64,
}

pub fn estimate_stats(cfg: &ReproConfig, cells: &[CellResult]) -> Result<Vec<EstimateStats>> {
    let mut out = Vec::new();
    for c in cells {
        let truth = analyze(&build_star_model(&cfg.mediator(c.a31))?, cfg.q)?;
        let n = truth.n_nodes;
        for (slot, (name, i, j)) in measure_slots(n).into_iter().enumerate() {
            let xs: Vec<f64> =
                c.records.iter().map(|r| slot_value((&r.gradient, &r.local_oir, r.oir), slot)).collect();
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0) } else { 0.0 };
            let truth_v = slot_value((&truth.gradient, &truth.local_oir, truth.oir), slot);
            let mae = xs.iter().map(|x| (x - truth_v).abs()).sum::<f64>() / m;
            out.push(EstimateStats {
                a31: c.a31,
                length: c.length,
                measure: name.into(),
                i,
                j,
                truth: truth_v,
                mean,
                std: var.sqrt(),
                mae,
            });
        }
    }
    Ok(out)
}

/// Averages over conditions and elements, for one family and length, of the
/// systematic bias `|mean − truth|`, the mean absolute error, and the std.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasStd {
    pub length: usize,
    pub measure: String,
    pub bias: f64,
    pub mae: f64,
    pub std: f64,
}

pub fn bias_std_summary(stats: &[EstimateStats]) -> Vec<BiasStd> {
    let mut lengths: Vec<usize> = stats.iter().map(|s| s.length).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let mut out = Vec::new();
    for &t in &lengths {
        for family in ["gradient", "local_oir", "oir"] {
            let sel: Vec<_> = stats.iter().filter(|s| s.length == t && s.measure == family).collect();
            if sel.is_empty() {
                continue;
            }
            let k = sel.len() as f64;
            out.push(BiasStd {
                length: t,
                measure: family.into(),
                bias: sel.iter().map(|s| (s.mean - s.truth).abs()).sum::<f64>() / k,
                mae: sel.iter().map(|s| s.mae).sum::<f64>() / k,
                std: sel.iter().map(|s| s.std).sum::<f64>() / k,
            });
        }
    }
    out
}

pub fn estimate_table(stats: &[EstimateStats]) -> String {
    let mut out = String::from("a31,length,measure,i,j,truth,mean,bias,mae,std\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.a31,
            s.length,
            s.measure,
            opt_index(s.i),
            opt_index(s.j),
            s.truth,
            s.mean,
            s.mean - s.truth,
            s.mae,
            s.std
        );
    }
    out
}

pub fn bias_std_table(summary: &[BiasStd]) -> String {
    let mut out = String::from("length,measure,bias,mae,std\n");
    for b in summary {
        let _ = writeln!(out, "{},{},{},{},{}", b.length, b.measure, b.bias, b.mae, b.std);
    }
    out
}

/// The four analytic reference networks: source, sink, and the mediator at
/// both ends of the `a31` range.
pub fn analytic_networks(cfg: &ReproConfig) -> Result<Vec<(String, HoiNetwork)>> {
    let base = |v| StarConfig { coupling: cfg.coupling, inflow: cfg.inflow, ..StarConfig::new(v) };
    let mut out = Vec::new();
    for v in [StarVariant::Source, StarVariant::Sink] {
        out.push((v.name().to_string(), analyze_var_model(&build_star_model(&base(v))?, cfg.q, None)?));
    }
    for a31 in [0.0, A31_MAX] {
        let net = analyze_var_model(&build_star_model(&cfg.mediator(a31))?, cfg.q, None)?;
        out.push((format!("mediator_a31_{a31}"), net));
    }
    Ok(out)
}

pub fn analytic_values(cfg: &ReproConfig, a31: f64) -> Result<HoiValues> {
    Ok(analyze(&build_star_model(&cfg.mediator(a31))?, cfg.q)?)
}

/// Everything: analytic networks, the sweep, and the summary tables, under `dir`.
pub fn run(cfg: &ReproConfig, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let put = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| HoiError::io(p, e))
    };
    for (name, net) in analytic_networks(cfg)? {
        write_network(&dir.join("analytic"), &name, &net, formats)?;
    }
    let cells = sweep(cfg, Some(&dir.join("cells")))?;
    if cfg.significance.is_some() {
        put("detection.csv", &detection_table(&cells))?;
    }
    let stats = estimate_stats(cfg, &cells)?;
    put("estimates.csv", &estimate_table(&stats))?;
    put("bias_std.csv", &bias_std_table(&bias_std_summary(&stats)))?;
    Ok(cells)
}
