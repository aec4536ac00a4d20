//! Penalized bandwidth selection: stochastic and deterministic penalties,
//! pairwise comparison corrections Ĥ²(m,k), the cutoff m̂ and the oracle m*.
//!
//! Every integral over ℝ runs on the same symmetric trapezoid grid as the
//! estimator; integrands here are even in u so only j ≥ 0 is evaluated.
//! Δ_{m,k}FK is taken in the almost-everywhere sense (for m = 0 the coarse
//! term vanishes identically), which is what the integrals see.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::ecf::{weight, InverseVariant, SplitSample, TruncationConfig};
use crate::error::{Error, Result};
use crate::estimator::{smoothed_target, EstimateRecord, QuadratureSpec, SampleSpectrum, SpectralSetup};
use crate::functionals::{Functional, Kernel};
use crate::models::{LevyModel, VarianceWindow};
use crate::par;

/// How the nested logarithms in λ̃ are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaGrouping {
    /// [log log A]² · log A · log B
    SquaredLogLog,
    /// log((log A)²) · log A · log B
    LogOfSquaredLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyConfig {
    pub kappa: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub c1: f64,
    pub cpen: f64,
    /// May be +∞, in which case only the sup-norm branch is used.
    pub cbar1: f64,
    pub cbar2: f64,
    pub positive_part: bool,
    pub grouping: LambdaGrouping,
}

pub fn kappa_for(c1: f64, gamma: f64) -> f64 {
    2.0 * ((4.0 * c1).sqrt() + gamma)
}

pub fn cpen_for(c1: f64, gamma: f64) -> f64 {
    64f64.max(16.0 * (2.0 * c1 + gamma))
}

impl PenaltyConfig {
    pub fn new(c1: f64, gamma: f64, delta: f64, eta: f64, cbar1: f64, cbar2: f64) -> Result<Self> {
        let cfg = Self {
            kappa: kappa_for(c1, gamma),
            gamma,
            delta,
            eta,
            c1,
            cpen: cpen_for(c1, gamma),
            cbar1,
            cbar2,
            positive_part: false,
            grouping: LambdaGrouping::SquaredLogLog,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for a model: c1 = 1, γ = 0.1, δ = 0.25, the model's η and
    /// C̄1 = C1, C̄2 = C2 from its characteristic quantities.
    pub fn for_model(model: &LevyModel, win: &VarianceWindow) -> Result<Self> {
        let (c1, c2) = model.variance_constants(win);
        // the zero model has C1 = C2 = 0; keep the constants positive
        let cbar1 = if c1 > 0.0 { c1 } else { f64::MIN_POSITIVE };
        let cbar2 = if c2 > 0.0 { c2 } else { f64::MIN_POSITIVE };
        Self::new(1.0, 0.1, 0.25, model.default_eta(), cbar1, cbar2)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("gamma", self.gamma)?;
        pos("delta", self.delta)?;
        pos("eta", self.eta)?;
        pos("c1", self.c1)?;
        pos("cbar2", self.cbar2)?;
        if !(self.cbar1 > 0.0) {
            return Err(Error::InvalidParameter(format!("cbar1 must be positive, got {}", self.cbar1)));
        }
        let kmin = kappa_for(self.c1, self.gamma);
        if !(self.kappa.is_finite() && self.kappa >= kmin * (1.0 - 1e-12)) {
            return Err(Error::InvalidParameter(format!("kappa must be at least {kmin}, got {}", self.kappa)));
        }
        let cmin = cpen_for(self.c1, self.gamma);
        if !(self.cpen.is_finite() && self.cpen >= cmin * (1.0 - 1e-12)) {
            return Err(Error::InvalidParameter(format!("cpen must be at least {cmin}, got {}", self.cpen)));
        }
        Ok(())
    }

    pub fn truncation(&self) -> TruncationConfig {
        TruncationConfig { kappa: self.kappa, delta: self.delta, gamma: self.gamma, variant: InverseVariant::LogTruncated }
    }
}

fn clamp_e(z: f64) -> f64 {
    z.max(std::f64::consts::E)
}

/// (σ̃², x̃) from |Ff(−u_j)/φ(u_j)| tabulated for j ≥ 0 (φ is φ̌ₙ or the true φ).
#[allow(clippy::too_many_arguments)]
pub fn sigma_x_from_ratio(
    ratio: &[f64],
    step: f64,
    kernel: &Kernel,
    m: usize,
    k: usize,
    half_k: usize,
    n: usize,
    cfg: &PenaltyConfig,
) -> Result<(f64, f64)> {
    let weighted = weight_ratio(ratio, step, cfg.delta);
    sigma_x_weighted(&weighted, step, kernel, m, k, half_k, n, cfg)
}

/// |Ff/φ|·w⁻¹ on the grid.
fn weight_ratio(ratio: &[f64], step: f64, delta: f64) -> Vec<f64> {
    ratio.iter().enumerate().map(|(j, &r)| if r == 0.0 { 0.0 } else { r / weight(j as f64 * step, delta) }).collect()
}

#[allow(clippy::too_many_arguments)]
fn sigma_x_weighted(
    weighted: &[f64],
    step: f64,
    kernel: &Kernel,
    m: usize,
    k: usize,
    half_k: usize,
    n: usize,
    cfg: &PenaltyConfig,
) -> Result<(f64, f64)> {
    if k <= m {
        return Err(Error::InvalidBandPair { m, k });
    }
    let reach = half_k.min(weighted.len().saturating_sub(1));
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for (j, &r) in weighted.iter().enumerate().take(reach + 1) {
        if r == 0.0 {
            continue;
        }
        let d = kernel.diff_ae(m, k, j as f64 * step).abs();
        if d == 0.0 {
            continue;
        }
        let c = if j == 0 || j == half_k { 1.0 } else { 2.0 };
        let v = r * d;
        l1 += c * v;
        l2 += c * v * v;
    }
    l1 *= step;
    l2 *= step;
    let sup_branch = cfg.cbar2 * l1 * l1;
    let branch = if cfg.cbar1.is_finite() { (cfg.cbar1 * l2).min(sup_branch) } else { sup_branch };
    let sigma2 = branch / (2.0 * PI * PI);
    let x = l1 / (2.0 * PI * (n as f64).sqrt());
    Ok((sigma2, x))
}

/// σ̃²_{m,k} and x̃_{m,k} from the log-truncated inverse of the sample.
pub fn sigma_x_tilde(
    sample: &SplitSample,
    f: &Functional,
    kernel: &Kernel,
    m: usize,
    k: usize,
    cfg: &PenaltyConfig,
    q: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if k <= m {
        return Err(Error::InvalidBandPair { m, k });
    }
    let setup = SpectralSetup::new(f, kernel, q, k)?;
    let spectrum = SampleSpectrum::new(&setup, sample, &cfg.truncation())?;
    let ratio = stochastic_ratio(&setup, &spectrum);
    sigma_x_from_ratio(&ratio, setup.step(), kernel, m, k, q.half_len(k), sample.n(), cfg)
}

/// λ̃_{m,k}; every logarithm argument is clamped below at e.
pub fn lambda_tilde(x: f64, sigma2: f64, m: usize, k: usize, n: usize, cfg: &PenaltyConfig) -> Result<f64> {
    if k <= m {
        return Err(Error::InvalidBandPair { m, k });
    }
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let gap = (k - m) as f64;
    let log_a = clamp_e(n as f64 * x * gap).ln();
    let nested = match cfg.grouping {
        LambdaGrouping::SquaredLogLog => clamp_e(log_a).ln().powi(2),
        LambdaGrouping::LogOfSquaredLog => clamp_e(log_a * log_a).ln(),
    };
    let log_b = clamp_e(x * x * gap * gap).ln();
    let first = 8.0 / cfg.eta * nested * log_a * log_b;
    let second = clamp_e(sigma2 * gap * gap).ln();
    Ok(first.max(second))
}

/// Ĥ²(m,k) from its factors.
pub fn correction_from(lambda: f64, sigma2: f64, x: f64, n: usize, cfg: &PenaltyConfig) -> f64 {
    let nf = n as f64;
    let kappa_term = 16.0 * (2.5 * cfg.kappa).powi(2) * nf.ln();
    (cfg.cpen * cfg.c1 * lambda * lambda + kappa_term) * sigma2.max(x * x) / nf
}

/// Stochastic correction Ĥ̃²(m,k).
pub fn correction(
    m: usize,
    k: usize,
    sample: &SplitSample,
    f: &Functional,
    kernel: &Kernel,
    cfg: &PenaltyConfig,
    q: &QuadratureSpec,
) -> Result<f64> {
    let (s2, x) = sigma_x_tilde(sample, f, kernel, m, k, cfg, q)?;
    let n = sample.n();
    let lam = lambda_tilde(x, s2, m, k, n, cfg)?;
    Ok(correction_from(lam, s2, x, n, cfg))
}

/// Where a penalty gets its inverse characteristic function from.
#[derive(Debug, Clone, Copy)]
pub enum PenaltySource<'a> {
    /// Log-truncated inverse of the sample (p̃en).
    Sample(&'a SplitSample),
    /// True φ_Δ of the model at sample size n (pen).
    Model { model: &'a LevyModel, n: usize },
}

/// pen(m) = Ĥ²(0, m) for the chosen source.
pub fn pen(m: usize, source: PenaltySource<'_>, f: &Functional, kernel: &Kernel, cfg: &PenaltyConfig, q: &QuadratureSpec) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("bandwidth index m must be at least 1".into()));
    }
    match source {
        PenaltySource::Sample(sample) => correction(0, m, sample, f, kernel, cfg, q),
        PenaltySource::Model { model, n } => {
            let setup = SpectralSetup::new(f, kernel, q, m)?;
            let ratio = deterministic_ratio(&setup, model);
            let (s2, x) = sigma_x_from_ratio(&ratio, setup.step(), kernel, 0, m, q.half_len(m), n, cfg)?;
            let lam = lambda_tilde(x, s2, 0, m, n, cfg)?;
            Ok(correction_from(lam, s2, x, n, cfg))
        }
    }
}

fn stochastic_ratio(setup: &SpectralSetup, spectrum: &SampleSpectrum) -> Vec<f64> {
    setup.f_half().iter().zip(spectrum.inv_log_abs()).map(|(fv, inv)| fv.norm() * inv).collect()
}

fn deterministic_ratio(setup: &SpectralSetup, model: &LevyModel) -> Vec<f64> {
    let step = setup.step();
    setup.f_half().iter().enumerate().map(|(j, fv)| fv.norm() / model.char_fn(j as f64 * step).norm()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PenaltyVariant {
    Stochastic,
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairPenalty {
    pub m: usize,
    pub k: usize,
    pub sigma2: f64,
    pub x: f64,
    pub lambda: f64,
    pub corr_h2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyTable {
    m_grid: Vec<usize>,
    n: usize,
    variant: PenaltyVariant,
    pairs: Vec<PairPenalty>,
    #[serde(skip)]
    index: BTreeMap<(usize, usize), usize>,
}

pub fn validate_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("bandwidth grid must be strictly ascending positive integers".into()));
    }
    Ok(())
}

impl PenaltyTable {
    /// Table from |Ff/φ| on the setup grid; pairs are evaluated in parallel.
    pub fn from_ratio(
        setup: &SpectralSetup,
        ratio: &[f64],
        grid: &[usize],
        n: usize,
        variant: PenaltyVariant,
        cfg: &PenaltyConfig,
    ) -> Result<Self> {
        validate_grid(grid)?;
        if *grid.last().unwrap() > setup.max_m() {
            return Err(Error::InvalidParameter("bandwidth grid exceeds the spectral setup".into()));
        }
        let mut keys = Vec::new();
        for (i, &m) in grid.iter().enumerate() {
            keys.push((0, m));
            for &k in &grid[i + 1..] {
                keys.push((m, k));
            }
        }
        let step = setup.step();
        let quad = setup.quad();
        let kernel = setup.kernel();
        let weighted = weight_ratio(ratio, step, cfg.delta);
        let pairs: Vec<Result<PairPenalty>> = par::map_range(keys.len(), |i| {
            let (m, k) = keys[i];
            let (sigma2, x) = sigma_x_weighted(&weighted, step, kernel, m, k, quad.half_len(k), n, cfg)?;
            let lambda = lambda_tilde(x, sigma2, m, k, n, cfg)?;
            Ok(PairPenalty { m, k, sigma2, x, lambda, corr_h2: correction_from(lambda, sigma2, x, n, cfg) })
        });
        let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
        let index = pairs.iter().enumerate().map(|(i, p)| ((p.m, p.k), i)).collect();
        Ok(Self { m_grid: grid.to_vec(), n, variant, pairs, index })
    }

    pub fn stochastic(setup: &SpectralSetup, spectrum: &SampleSpectrum, grid: &[usize], cfg: &PenaltyConfig) -> Result<Self> {
        let ratio = stochastic_ratio(setup, spectrum);
        Self::from_ratio(setup, &ratio, grid, spectrum.table().n(), PenaltyVariant::Stochastic, cfg)
    }

    pub fn deterministic(setup: &SpectralSetup, model: &LevyModel, n: usize, grid: &[usize], cfg: &PenaltyConfig) -> Result<Self> {
        let ratio = deterministic_ratio(setup, model);
        Self::from_ratio(setup, &ratio, grid, n, PenaltyVariant::Deterministic, cfg)
    }

    pub fn m_grid(&self) -> &[usize] {
        &self.m_grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> PenaltyVariant {
        self.variant
    }

    pub fn pairs(&self) -> &[PairPenalty] {
        &self.pairs
    }

    pub fn pair(&self, m: usize, k: usize) -> Option<&PairPenalty> {
        self.index.get(&(m, k)).map(|&i| &self.pairs[i])
    }

    pub fn corr_h2(&self, m: usize, k: usize) -> Option<f64> {
        self.pair(m, k).map(|p| p.corr_h2)
    }

    pub fn pen(&self, m: usize) -> Option<f64> {
        self.corr_h2(0, m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub m_hat: usize,
    pub criterion: BTreeMap<usize, f64>,
    pub theta_hat_adaptive: f64,
}

/// m̂ from estimates aligned with `table.m_grid()`.
pub fn select_from_values(theta: &[f64], table: &PenaltyTable, positive_part: bool) -> Result<SelectionResult> {
    let grid = table.m_grid();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if theta.len() != grid.len() {
        return Err(Error::InvalidParameter("estimates and penalty table cover different grids".into()));
    }
    let mut criterion = BTreeMap::new();
    let mut best = (0usize, f64::INFINITY);
    for (i, &m) in grid.iter().enumerate() {
        let mut sup = if i + 1 == grid.len() { 0.0 } else { f64::NEG_INFINITY };
        for (j, &k) in grid.iter().enumerate().skip(i + 1) {
            let h2 = table.corr_h2(m, k).ok_or(Error::InvalidBandPair { m, k })?;
            sup = sup.max((theta[j] - theta[i]).powi(2) - h2);
        }
        if positive_part {
            sup = sup.max(0.0);
        }
        let c = sup + table.pen(m).ok_or(Error::InvalidBandPair { m: 0, k: m })?;
        criterion.insert(m, c);
        if c < best.1 {
            best = (i, c);
        }
    }
    Ok(SelectionResult { m_hat: grid[best.0], criterion, theta_hat_adaptive: theta[best.0] })
}

/// m̂ = argmin_m [sup_{k>m}(|θ̂_k − θ̂_m|² − Ĥ²(m,k)) + pen(m)], ties to the smallest m.
pub fn select_m_hat(estimates: &BTreeMap<usize, EstimateRecord>, table: &PenaltyTable, cfg: &PenaltyConfig) -> Result<SelectionResult> {
    if estimates.keys().ne(table.m_grid().iter()) {
        return Err(Error::InvalidParameter("estimates and penalty table cover different grids".into()));
    }
    let theta: Vec<f64> = estimates.values().map(|r| r.theta_hat).collect();
    select_from_values(&theta, table, cfg.positive_part)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub m_star: usize,
    pub criterion: BTreeMap<usize, f64>,
    /// θ_m on the grid.
    pub targets: Vec<f64>,
    /// Deterministic pen(m) on the grid.
    pub pens: Vec<f64>,
}

impl OracleResult {
    /// |θ − θ_{m*}|² + sup_{k≥m*}|θ_k − θ_{m*}|² + pen(m*).
    pub fn oracle_bound(&self, theta: f64) -> f64 {
        let i = self.criterion.keys().position(|&m| m == self.m_star).unwrap();
        (theta - self.targets[i]).powi(2) + self.criterion[&self.m_star]
    }
}

/// m* = argmin_m [sup_{k≥m}|θ_k − θ_m|² + pen(m)] with deterministic θ_m and pen.
pub fn oracle_m_star(
    model: &LevyModel,
    f: &Functional,
    kernel: &Kernel,
    grid: &[usize],
    n: usize,
    cfg: &PenaltyConfig,
    q: &QuadratureSpec,
) -> Result<OracleResult> {
    validate_grid(grid)?;
    let max_m = *grid.last().unwrap();
    let targets = grid.iter().map(|&m| smoothed_target(model, f, kernel, m, q)).collect::<Result<Vec<_>>>()?;
    let setup = SpectralSetup::new(f, kernel, &QuadratureSpec { check: false, ..*q }, max_m)?;
    let table = PenaltyTable::deterministic(&setup, model, n, grid, cfg)?;
    let pens: Vec<f64> = grid.iter().map(|&m| table.pen(m).unwrap()).collect();
    Ok(oracle_from_values(grid, targets, pens))
}

pub fn oracle_from_values(grid: &[usize], targets: Vec<f64>, pens: Vec<f64>) -> OracleResult {
    let mut criterion = BTreeMap::new();
    let mut best = (0usize, f64::INFINITY);
    for (i, &m) in grid.iter().enumerate() {
        let sup = targets[i..].iter().map(|t| (t - targets[i]).powi(2)).fold(0.0, f64::max);
        let c = sup + pens[i];
        criterion.insert(m, c);
        if c < best.1 {
            best = (i, c);
        }
    }
    OracleResult { m_star: grid[best.0], criterion, targets, pens }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::JumpLaw;

    fn cfg() -> PenaltyConfig {
        PenaltyConfig::new(1.0, 0.1, 0.25, 0.5, 2.0, 2.0).unwrap()
    }

    #[test]
    fn constants_follow_c1_and_gamma() {
        let c = cfg();
        assert!((c.kappa - 4.2).abs() < 1e-15);
        assert_eq!(c.cpen, 64.0);
        let big = PenaltyConfig::new(3.0, 0.1, 0.25, 0.5, 1.0, 1.0).unwrap();
        assert!((big.cpen - 16.0 * 6.1).abs() < 1e-12);
        assert!(PenaltyConfig { kappa: 1.0, ..c }.validate().is_err());
        assert!(PenaltyConfig::new(1.0, 0.1, 0.25, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lambda_all_clamped() {
        let c = cfg();
        assert_eq!(lambda_tilde(0.0, 0.0, 1, 2, 100, &c).unwrap(), 16.0);
        let c4 = PenaltyConfig { eta: 10.0, ..c };
        assert_eq!(lambda_tilde(0.0, 0.0, 1, 2, 100, &c4).unwrap(), 1.0);
        assert!(lambda_tilde(0.0, 0.0, 2, 2, 100, &c).is_err());
        assert!(lambda_tilde(0.0, 0.0, 1, 2, 1, &c).is_err());
    }

    #[test]
    fn lambda_monotone_in_x() {
        let c = cfg();
        let (m, k, n) = (2, 5, 1000);
        let x0 = std::f64::consts::E / (n as f64 * 3.0);
        let mut prev = 0.0;
        for i in 0..200 {
            let x = x0 * 1.1f64.powi(i);
            let l = lambda_tilde(x, 0.3, m, k, n, &c).unwrap();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn zero_functional_has_zero_penalties() {
        let s = LevyModel::compound_poisson(1.0, JumpLaw::Exponential { scale: 1.0 }, 1.0)
            .unwrap()
            .sample_increments(40, 3)
            .unwrap();
        let q = QuadratureSpec::default();
        let f = Functional::zero();
        assert_eq!(sigma_x_tilde(&s, &f, &Kernel::sinc(), 1, 3, &cfg(), &q).unwrap(), (0.0, 0.0));
        assert_eq!(correction(1, 3, &s, &f, &Kernel::sinc(), &cfg(), &q).unwrap(), 0.0);
        assert_eq!(pen(2, PenaltySource::Sample(&s), &f, &Kernel::sinc(), &cfg(), &q).unwrap(), 0.0);
        assert!(sigma_x_tilde(&s, &f, &Kernel::sinc(), 3, 3, &cfg(), &q).is_err());
    }

    #[test]
    fn selection_examples() {
        let model = LevyModel::zero(1.0).unwrap();
        let q = QuadratureSpec::default();
        let setup = SpectralSetup::new(&Functional::gaussian(), &Kernel::sinc(), &q, 5).unwrap();
        let single = PenaltyTable::deterministic(&setup, &model, 100, &[5], &cfg()).unwrap();
        assert_eq!(select_from_values(&[0.3], &single, false).unwrap().m_hat, 5);

        let three = PenaltyTable::deterministic(&setup, &model, 100, &[1, 2, 3], &cfg()).unwrap();
        let r = select_from_values(&[0.0, 0.0, 0.0], &three, false).unwrap();
        assert_eq!(r.m_hat, 1);
        assert!(select_from_values(&[0.0], &three, false).is_err());
    }

    #[test]
    fn hand_built_selection() {
        let mk = |m, k, h| PairPenalty { m, k, sigma2: 0.0, x: 0.0, lambda: 0.0, corr_h2: h };
        let pairs = vec![mk(0, 1, 0.1), mk(0, 2, 0.2), mk(0, 3, 0.3), mk(1, 2, 0.0), mk(1, 3, 0.0), mk(2, 3, 0.0)];
        let index = pairs.iter().enumerate().map(|(i, p)| ((p.m, p.k), i)).collect();
        let table = PenaltyTable { m_grid: vec![1, 2, 3], n: 10, variant: PenaltyVariant::Stochastic, pairs, index };
        let r = select_from_values(&[0.0, 1.0, 1.0], &table, false).unwrap();
        let c: Vec<f64> = r.criterion.values().copied().collect();
        assert!((c[0] - 1.1).abs() < 1e-15 && (c[1] - 0.2).abs() < 1e-15 && (c[2] - 0.3).abs() < 1e-15);
        assert_eq!(r.m_hat, 2);
        assert_eq!(r.theta_hat_adaptive, 1.0);
    }

    #[test]
    fn oracle_trivial_cases() {
        let z = LevyModel::zero(1.0).unwrap();
        let q = QuadratureSpec::default();
        let f = Functional::zero();
        assert_eq!(oracle_m_star(&z, &f, &Kernel::sinc(), &[2, 4, 8], 100, &cfg(), &q).unwrap().m_star, 2);
        let cp = LevyModel::compound_poisson(1.0, JumpLaw::Exponential { scale: 1.0 }, 1.0).unwrap();
        assert_eq!(oracle_m_star(&cp, &Functional::gaussian(), &Kernel::sinc(), &[7], 100, &cfg(), &q).unwrap().m_star, 7);
        assert!(oracle_m_star(&cp, &Functional::gaussian(), &Kernel::sinc(), &[], 100, &cfg(), &q).is_err());
    }

    #[test]
    fn deterministic_pen_nondecreasing_for_sinc() {
        let cp = LevyModel::compound_poisson(1.0, JumpLaw::Exponential { scale: 1.0 }, 1.0).unwrap();
        let q = QuadratureSpec::default();
        let f = Functional::dirac(1.0);
        let setup = SpectralSetup::new(&f, &Kernel::sinc(), &q, 8).unwrap();
        let grid: Vec<usize> = (1..=8).collect();
        let t = PenaltyTable::deterministic(&setup, &cp, 1000, &grid, &cfg()).unwrap();
        for w in grid.windows(2) {
            assert!(t.pen(w[1]).unwrap() >= t.pen(w[0]).unwrap());
        }
    }
}
