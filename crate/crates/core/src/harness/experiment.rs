//! Seeded Monte Carlo over sample sizes and bandwidths.
//!
//! Replications are the unit of parallel work. Each one draws from its own
//! substream of (seed, n, replication), and results are folded in replication
//! order, so every aggregate is independent of the thread count.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::{fit_rate_slope, MeanVar};
use crate::adaptive::{oracle_from_values, select_from_values, PenaltyTable};
use crate::ecf::{InverseVariant, SplitSample};
use crate::error::{Error, Result};
use crate::estimator::{risk_bound, RateForm, smoothed_target, theoretical_rate, QuadratureSpec, SampleSpectrum, SpectralSetup};
use crate::models::LevyModel;
use crate::{par, rng};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellStats {
    pub m: usize,
    pub variant: InverseVariant,
    pub mean: f64,
    pub bias2: f64,
    pub variance: f64,
    pub mse: f64,
    pub count: usize,
}

impl CellStats {
    fn from_errors(m: usize, variant: InverseVariant, theta: f64, acc: &MeanVar) -> Self {
        let bias = acc.mean();
        Self { m, variant, mean: theta + bias, bias2: bias * bias, variance: acc.var_pop(), mse: acc.mean_square(), count: acc.count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub t: f64,
    pub replications_used: usize,
    pub failures: usize,
    pub cells: Vec<CellStats>,
    /// Standard error of each cell's MSE, aligned with `cells`.
    pub mse_stderr: Vec<f64>,
    /// Bandwidth with the smallest Monte Carlo MSE for the configured inverse.
    pub oracle_bandwidth_m: usize,
    pub oracle_bandwidth_mse: f64,
    pub m_star: usize,
    /// |θ − θ_{m*}|² + sup_{k≥m*}|θ_k − θ_{m*}|² + pen(m*).
    pub oracle_bound: f64,
    /// Monte Carlo MSE of the log-truncated estimator at m*.
    pub oracle_mse: f64,
    pub adaptive: Option<AdaptiveStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveStats {
    pub mse: f64,
    pub bias2: f64,
    pub variance: f64,
    pub mse_stderr: f64,
    pub m_hat_histogram: BTreeMap<usize, usize>,
    pub oracle_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub quantity: String,
    pub slope: f64,
    pub stderr: f64,
    pub theoretical: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub theta: f64,
    /// θ_m over the bandwidth grid.
    pub targets: Vec<f64>,
    pub sizes: Vec<SizeReport>,
    pub slopes: Vec<SlopeFit>,
}

impl RiskReport {
    pub fn size(&self, n: usize) -> Option<&SizeReport> {
        self.sizes.iter().find(|s| s.n == n)
    }

    pub fn slope(&self, quantity: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.quantity == quantity)
    }
}

/// Everything a replication needs that does not depend on the sample.
struct Context<'a> {
    cfg: &'a ExperimentConfig,
    theta: f64,
    /// Spectral setups at nodes, 2·nodes, … up to the cap.
    setups: Vec<SpectralSetup>,
}

struct RepOutcome {
    errs_neumann: Vec<f64>,
    errs_log: Vec<f64>,
    selection: Option<(usize, f64)>,
}

impl Context<'_> {
    fn evaluate(&self, setup: &SpectralSetup, sample: &SplitSample) -> Result<RepOutcome> {
        let cfg = self.cfg;
        let spectrum = SampleSpectrum::new(setup, sample, &cfg.penalty.truncation())?;
        let mut errs_neumann = Vec::with_capacity(cfg.m_grid.len());
        let mut errs_log = Vec::with_capacity(cfg.m_grid.len());
        let mut log_values = Vec::with_capacity(cfg.m_grid.len());
        for &m in &cfg.m_grid {
            errs_neumann.push(spectrum.estimate(setup, m, InverseVariant::NeumannIndicator)?.theta_hat - self.theta);
            let v = spectrum.estimate(setup, m, InverseVariant::LogTruncated)?.theta_hat;
            errs_log.push(v - self.theta);
            log_values.push(v);
        }
        let selection = if cfg.adaptive {
            let table = PenaltyTable::stochastic(setup, &spectrum, &cfg.m_grid, &cfg.penalty)?;
            let sel = select_from_values(&log_values, &table, cfg.penalty.positive_part)?;
            Some((sel.m_hat, sel.theta_hat_adaptive - self.theta))
        } else {
            None
        };
        Ok(RepOutcome { errs_neumann, errs_log, selection })
    }

    /// One replication; on non-convergence the node count doubles up to the cap.
    fn replicate(&self, n: usize, rep: usize) -> Result<RepOutcome> {
        let mut r = rng::substream(self.cfg.seed, n, rep);
        let sample = self.cfg.model.sample_increments_with(n, &mut r)?;
        let mut last = None;
        for setup in &self.setups {
            match self.evaluate(setup, &sample) {
                Err(e @ Error::QuadratureNotConverged { .. }) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one spectral setup"))
    }
}

fn setups_for(cfg: &ExperimentConfig) -> Result<Vec<SpectralSetup>> {
    let max_m = *cfg.m_grid.last().expect("validated grid");
    let mut quad = cfg.quad;
    let mut out = vec![SpectralSetup::new(&cfg.functional, &cfg.kernel, &quad, max_m)?];
    while quad.check && quad.nodes * 2 <= quad.max_nodes {
        quad = quad.doubled();
        out.push(SpectralSetup::new(&cfg.functional, &cfg.kernel, &quad, max_m)?);
    }
    Ok(out)
}

/// θ_m over the grid of the configuration.
pub fn smoothed_targets(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.m_grid.iter().map(|&m| smoothed_target(&cfg.model, &cfg.functional, &cfg.kernel, m, &cfg.quad)).collect()
}

/// Deterministic pen(m) over the grid at sample size n.
pub fn deterministic_pens(cfg: &ExperimentConfig, n: usize) -> Result<Vec<f64>> {
    let max_m = *cfg.m_grid.last().expect("validated grid");
    let quad = QuadratureSpec { check: false, ..cfg.quad };
    let setup = SpectralSetup::new(&cfg.functional, &cfg.kernel, &quad, max_m)?;
    let table = PenaltyTable::deterministic(&setup, &cfg.model, n, &cfg.m_grid, &cfg.penalty)?;
    Ok(cfg.m_grid.iter().map(|&m| table.pen(m).expect("grid entry")).collect())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RiskReport> {
    cfg.validate()?;
    let theta = cfg.model.true_theta(&cfg.functional)?;
    let targets = smoothed_targets(cfg)?;
    let ctx = Context { cfg, theta, setups: setups_for(cfg)? };
    let mut sizes = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let outcomes = par::map_range(cfg.replications, |rep| ctx.replicate(n, rep));
        sizes.push(aggregate(cfg, theta, &targets, n, outcomes)?);
    }
    let slopes = fit_slopes(cfg, &sizes)?;
    Ok(RiskReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), theta, targets, sizes, slopes })
}

fn aggregate(cfg: &ExperimentConfig, theta: f64, targets: &[f64], n: usize, outcomes: Vec<Result<RepOutcome>>) -> Result<SizeReport> {
    let k = cfg.m_grid.len();
    let mut neu = vec![MeanVar::default(); k];
    let mut log = vec![MeanVar::default(); k];
    let mut neu_sq = vec![MeanVar::default(); k];
    let mut log_sq = vec![MeanVar::default(); k];
    let mut ad = MeanVar::default();
    let mut ad_sq = MeanVar::default();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut failures = 0;
    for outcome in outcomes {
        let o = match outcome {
            Ok(o) => o,
            Err(Error::QuadratureNotConverged { .. }) => {
                failures += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for i in 0..k {
            neu[i].push(o.errs_neumann[i]);
            log[i].push(o.errs_log[i]);
            neu_sq[i].push(o.errs_neumann[i].powi(2));
            log_sq[i].push(o.errs_log[i].powi(2));
        }
        if let Some((m_hat, err)) = o.selection {
            ad.push(err);
            ad_sq.push(err * err);
            *hist.entry(m_hat).or_insert(0) += 1;
        }
    }
    if failures * 100 > cfg.replications {
        return Err(Error::TooManyFailures { failed: failures, total: cfg.replications });
    }
    let used = cfg.replications - failures;
    let se = |acc: &MeanVar| (acc.var_sample() / acc.count.max(1) as f64).sqrt();
    let mut cells = Vec::with_capacity(2 * k);
    let mut mse_stderr = Vec::with_capacity(2 * k);
    for (variant, accs, sqs) in [
        (InverseVariant::NeumannIndicator, &neu, &neu_sq),
        (InverseVariant::LogTruncated, &log, &log_sq),
    ] {
        for i in 0..k {
            cells.push(CellStats::from_errors(cfg.m_grid[i], variant, theta, &accs[i]));
            mse_stderr.push(se(&sqs[i]));
        }
    }
    let primary = if cfg.inverse == InverseVariant::NeumannIndicator { &cells[..k] } else { &cells[k..] };
    let best = *primary.iter().fold(&primary[0], |b, c| if c.mse < b.mse { c } else { b });

    let pens = deterministic_pens(cfg, n)?;
    let oracle = oracle_from_values(&cfg.m_grid, targets.to_vec(), pens);
    let i_star = cfg.m_grid.iter().position(|&m| m == oracle.m_star).expect("m* in grid");
    let oracle_bound = oracle.oracle_bound(theta);
    let oracle_mse = cells[k + i_star].mse;

    let adaptive = cfg.adaptive.then(|| AdaptiveStats {
        mse: ad.mean_square(),
        bias2: ad.mean() * ad.mean(),
        variance: ad.var_pop(),
        mse_stderr: se(&ad_sq),
        m_hat_histogram: hist,
        oracle_ratio: ratio(ad.mean_square(), oracle_bound),
    });
    Ok(SizeReport {
        n,
        t: cfg.model.delta() * n as f64,
        replications_used: used,
        failures,
        cells,
        mse_stderr,
        oracle_bandwidth_m: best.m,
        oracle_bandwidth_mse: best.mse,
        m_star: oracle.m_star,
        oracle_bound,
        oracle_mse,
        adaptive,
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 { 0.0 } else { num / den }
}

fn fit_slopes(cfg: &ExperimentConfig, sizes: &[SizeReport]) -> Result<Vec<SlopeFit>> {
    if sizes.len() < 4 {
        return Ok(Vec::new());
    }
    let theoretical = match &cfg.rate {
        Some(spec) => {
            let t_lo = sizes[0].t;
            let t_hi = sizes[sizes.len() - 1].t;
            let mid = (t_lo * t_hi).sqrt();
            Some(theoretical_rate(spec, mid)?.slope_at(mid))
        }
        None => None,
    };
    let mut out = Vec::new();
    let mut fit = |quantity: &str, pts: Vec<(f64, f64)>, theo: Option<f64>| {
        // a quantity that is identically zero (e.g. the zero model) has no slope
        if pts.iter().all(|p| p.1 > 0.0) {
            if let Ok((slope, stderr)) = fit_rate_slope(&pts) {
                out.push(SlopeFit { quantity: quantity.into(), slope, stderr, theoretical: theo });
            }
        }
    };
    fit("oracle_bandwidth_mse", sizes.iter().map(|s| (s.t, s.oracle_bandwidth_mse)).collect(), theoretical);
    fit("oracle_mse", sizes.iter().map(|s| (s.t, s.oracle_mse)).collect(), None);
    if cfg.adaptive {
        fit("adaptive_mse", sizes.iter().map(|s| (s.t, s.adaptive.as_ref().map_or(0.0, |a| a.mse))).collect(), None);
    }
    Ok(out)
}

/// Deterministic oracle quantities per sample size: θ_m, pen(m), m*, and the
/// two risk-bound terms per bandwidth.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub schema_version: u32,
    pub theta: f64,
    pub m_grid: Vec<usize>,
    pub targets: Vec<f64>,
    pub sizes: Vec<OracleSize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSize {
    pub n: usize,
    pub m_star: usize,
    pub pens: Vec<f64>,
    pub criterion: Vec<f64>,
    pub bias2: Vec<f64>,
    pub var_bound: Vec<f64>,
}

pub fn run_oracle_check(cfg: &ExperimentConfig) -> Result<OracleCheck> {
    cfg.validate()?;
    let theta = cfg.model.true_theta(&cfg.functional)?;
    let targets = smoothed_targets(cfg)?;
    let mut sizes = Vec::new();
    for &n in &cfg.n_list {
        let pens = deterministic_pens(cfg, n)?;
        let oracle = oracle_from_values(&cfg.m_grid, targets.clone(), pens.clone());
        let bounds = par::map_range(cfg.m_grid.len(), |i| {
            risk_bound(&cfg.model, &cfg.functional, &cfg.kernel, cfg.m_grid[i], n, &cfg.window, &cfg.quad)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        sizes.push(OracleSize {
            n,
            m_star: oracle.m_star,
            pens,
            criterion: oracle.criterion.values().copied().collect(),
            bias2: bounds.iter().map(|b| b.0).collect(),
            var_bound: bounds.iter().map(|b| b.1).collect(),
        });
    }
    Ok(OracleCheck { schema_version: SCHEMA_VERSION, theta, m_grid: cfg.m_grid.clone(), targets, sizes })
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub t: f64,
    pub form: RateForm,
    pub exponent: f64,
    pub local_slope: f64,
    pub value: f64,
}

/// Theoretical rate r_{Δ,n} for each configured sample size.
pub fn rate_table(cfg: &ExperimentConfig) -> Result<Vec<RateRow>> {
    let spec = cfg.rate.as_ref().ok_or_else(|| Error::Config("rates need mu_smoothness (and optionally regime, f_index)".into()))?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let t = cfg.model.delta() * n as f64;
            let r = theoretical_rate(spec, t)?;
            Ok(RateRow { n, t, form: r.form, exponent: r.exponent, local_slope: r.slope_at(t), value: r.value })
        })
        .collect()
}

/// Mean over replications of sup_u w(u)|φ̂ₙ(u) − φ(u)| on the grid `step·j`,
/// 0 ≤ j < len, for each sample size.
pub fn deviation_study(model: &LevyModel, n_list: &[usize], replications: usize, seed: u64, step: f64, len: usize, delta: f64) -> Result<Vec<(usize, f64)>> {
    n_list
        .iter()
        .map(|&n| {
            let stats = par::map_range(replications, |rep| -> Result<f64> {
                let mut r = rng::substream(seed, n, rep);
                let sample = model.sample_increments_with(n, &mut r)?;
                let table = crate::ecf::EcfTable::build(&sample, step, len, 0);
                Ok(table.weighted_deviation(model, delta))
            });
            let mut acc = MeanVar::default();
            for s in stats {
                acc.push(s?);
            }
            Ok((n, acc.mean()))
        })
        .collect()
}
