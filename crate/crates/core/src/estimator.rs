//! Frequency-domain kernel estimator of θ = ⟨f, μ⟩, the smoothed target θ_m,
//! the non-asymptotic risk bound and the theoretical rate tables.
//!
//! All band integrals use the trapezoid rule on the uniform symmetric grid
//! u_j = j·step, |j| ≤ H_m, covering [−π m s, π m s] (s = support scale).
//! The spacing depends only on [`QuadratureSpec`], not on m, so grids for
//! different bandwidths nest and one ECF table serves a whole bandwidth grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::ecf::{log_floor, log_truncated_from, neumann_inverse_from, EcfTable, InverseVariant, SplitSample, TruncationConfig};
use crate::error::{Error, Result};
use crate::functionals::{lower_integer, Functional, Kernel, KernelKind};
use crate::models::{LevyModel, VarianceWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadRule {
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Subintervals per unit bandwidth; band m uses m·nodes, so the default
    /// puts 8192 nodes on the m = 64 band.
    pub nodes: usize,
    pub rule: QuadRule,
    pub support_scale: f64,
    /// Accepted change between the grid and its every-other-node subgrid,
    /// relative to the L1 mass of the integrand, for deterministic integrals.
    pub tolerance: f64,
    /// Same for sample-based estimates. The truncated inverses jump where
    /// |φ̂ₙ| crosses its threshold, so these integrands converge only at
    /// first order in the node spacing and need a looser test.
    pub sample_tolerance: f64,
    /// Largest `nodes` tried before giving up.
    pub max_nodes: usize,
    pub check: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 128, rule: QuadRule::Trapezoid, support_scale: 1.0, tolerance: 1e-6, sample_tolerance: 1e-3, max_nodes: 2048, check: true }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        Self { nodes, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 || !self.nodes.is_multiple_of(4) {
            return Err(Error::InvalidParameter(format!(
                "quadrature nodes must be a multiple of 4 and at least 16, got {}",
                self.nodes
            )));
        }
        if !(self.support_scale.is_finite() && self.support_scale >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "support scale must be at least 1, got {}",
                self.support_scale
            )));
        }
        if !(self.tolerance > 0.0 && self.sample_tolerance > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        2.0 * PI * self.support_scale / self.nodes as f64
    }

    /// Index H_m of the outermost node for bandwidth m.
    pub fn half_len(&self, m: usize) -> usize {
        m * self.nodes / 2
    }

    pub fn doubled(&self) -> Self {
        Self { nodes: self.nodes * 2, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub m: usize,
    pub theta_hat: f64,
    pub imag_residual: f64,
    pub variant: InverseVariant,
    pub nodes: usize,
}

/// Trapezoid sum over |j| ≤ half of `weight(j)·f(j)·g(j)` for Hermitian
/// factors given on j ≥ 0. Returns (full-grid sum, every-other-node sum, L1 mass),
/// each already multiplied by its spacing.
fn band_sum(
    f_half: &[Complex64],
    g_half: &[Complex64],
    half: usize,
    step: f64,
    rule: QuadRule,
    kern: impl Fn(f64) -> f64,
) -> (Complex64, Complex64, f64) {
    let reach = half.min(f_half.len().saturating_sub(1)).min(g_half.len().saturating_sub(1));
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    let h = half as isize;
    let r = reach as isize;
    for j in -r..=r {
        let a = j.unsigned_abs();
        let (fv, gv) = if j < 0 { (f_half[a].conj(), g_half[a].conj()) } else { (f_half[a], g_half[a]) };
        let (wf, wc) = rule_weights(rule, j, h);
        let v = fv * gv * kern(j as f64 * step);
        fine += v * wf;
        mass += v.norm() * wf;
        coarse += v * wc;
    }
    (fine * step, coarse * (2.0 * step), mass * step)
}

/// Weights of node j on the full grid and on the every-other-node subgrid.
fn rule_weights(rule: QuadRule, j: isize, h: isize) -> (f64, f64) {
    match rule {
        QuadRule::Trapezoid => {
            let w = if j.abs() == h { 0.5 } else { 1.0 };
            (w, if (j + h) % 2 == 0 { w } else { 0.0 })
        }
    }
}

/// Ff(−u_j) tabulated for j ≥ 0, truncated where it underflows to zero.
#[derive(Debug, Clone)]
pub struct SpectralSetup {
    functional: Functional,
    kernel: Kernel,
    quad: QuadratureSpec,
    max_m: usize,
    f_half: Vec<Complex64>,
}

impl SpectralSetup {
    pub fn new(f: &Functional, kernel: &Kernel, quad: &QuadratureSpec, max_m: usize) -> Result<Self> {
        quad.validate()?;
        if max_m == 0 {
            return Err(Error::InvalidParameter("bandwidth index m must be at least 1".into()));
        }
        let step = quad.step();
        let mut len = quad.half_len(max_m) + 1;
        if let Some(band) = f.numerical_band() {
            len = len.min((band / step).ceil() as usize + 1);
        }
        let f_half: Vec<Complex64> = (0..len).map(|j| f.fourier(-(j as f64) * step)).collect();
        if f_half.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonIntegrable(format!("{:?} has non-finite Fourier values on the band", f.kind())));
        }
        Ok(Self { functional: *f, kernel: *kernel, quad: *quad, max_m, f_half })
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    pub fn step(&self) -> f64 {
        self.quad.step()
    }

    pub fn f_half(&self) -> &[Complex64] {
        &self.f_half
    }

    /// Number of nonnegative nodes at which the sample spectrum is needed.
    pub fn needed_len(&self) -> usize {
        self.f_half.len()
    }

    fn integrate(&self, g_half: &[Complex64], m: usize) -> (Complex64, Complex64, f64) {
        let k = self.kernel;
        let mf = m as f64;
        band_sum(&self.f_half, g_half, self.quad.half_len(m), self.step(), self.quad.rule, |u| k.ft(u / mf))
    }

    fn check(&self, fine: f64, coarse: f64, mass: f64, tol: f64) -> Result<()> {
        if !self.quad.check {
            return Ok(());
        }
        let change = (fine - coarse).abs();
        let scale = mass.max(fine.abs());
        if change <= tol * scale || scale == 0.0 {
            Ok(())
        } else {
            Err(Error::QuadratureNotConverged { nodes: self.quad.nodes, change: change / scale })
        }
    }
}

/// ECF table of one sample with the estimator integrands for both inverses.
#[derive(Debug, Clone)]
pub struct SampleSpectrum {
    table: EcfTable,
    g_neumann: Vec<Complex64>,
    g_log: Vec<Complex64>,
    /// |1/φ̌ₙ(u_j)| for the log-truncated inverse.
    inv_log_abs: Vec<f64>,
}

impl SampleSpectrum {
    pub fn new(setup: &SpectralSetup, sample: &SplitSample, trunc: &TruncationConfig) -> Result<Self> {
        trunc.validate()?;
        let len = setup.needed_len();
        let table = EcfTable::build(sample, setup.step(), len, len);
        Self::from_table(table, trunc)
    }

    pub fn from_table(table: EcfTable, trunc: &TruncationConfig) -> Result<Self> {
        let n = table.n();
        let delta = table.delta();
        let step = table.step();
        let scale = Complex64::new(0.0, -1.0 / delta);
        let mut g_neumann = Vec::with_capacity(table.len());
        let mut g_log = Vec::with_capacity(table.len());
        let mut inv_log_abs = Vec::with_capacity(table.len());
        let can_log = n >= 2;
        for j in 0..table.len() {
            let phi = table.phi(j as isize);
            let num = table.dphi(j as isize) * scale;
            g_neumann.push(num * neumann_inverse_from(phi, delta, n));
            if can_log {
                let floor = log_floor(n, j as f64 * step, trunc.kappa, trunc.delta)?;
                let inv = log_truncated_from(phi, floor).inv();
                g_log.push(num * inv);
                inv_log_abs.push(inv.norm());
            }
        }
        Ok(Self { table, g_neumann, g_log, inv_log_abs })
    }

    pub fn table(&self) -> &EcfTable {
        &self.table
    }

    pub fn inv_log_abs(&self) -> &[f64] {
        &self.inv_log_abs
    }

    /// θ̂ for bandwidth m with the requested inverse.
    pub fn estimate(&self, setup: &SpectralSetup, m: usize, variant: InverseVariant) -> Result<EstimateRecord> {
        if m == 0 || m > setup.max_m() {
            return Err(Error::InvalidParameter(format!("m = {m} outside 1..={}", setup.max_m())));
        }
        let g = match variant {
            InverseVariant::NeumannIndicator => &self.g_neumann,
            InverseVariant::LogTruncated => {
                if self.g_log.is_empty() {
                    return Err(Error::SampleTooSmall { n: self.table.n(), min: 2 });
                }
                &self.g_log
            }
        };
        let (fine, coarse, mass) = setup.integrate(g, m);
        let norm = 1.0 / (2.0 * PI);
        let theta = fine.re * norm;
        setup.check(theta, coarse.re * norm, mass * norm, setup.quad().sample_tolerance)?;
        Ok(EstimateRecord { m, theta_hat: theta, imag_residual: (fine.im * norm).abs(), variant, nodes: setup.quad().nodes })
    }
}

/// Kernel estimator θ̂ for a single bandwidth. When `q.check` is set the
/// node count doubles until the subgrid test passes or `q.max_nodes` is hit.
pub fn kernel_estimate(
    sample: &SplitSample,
    f: &Functional,
    kernel: &Kernel,
    m: usize,
    cfg: &TruncationConfig,
    q: &QuadratureSpec,
) -> Result<EstimateRecord> {
    let mut quad = *q;
    loop {
        let setup = SpectralSetup::new(f, kernel, &quad, m)?;
        let spectrum = SampleSpectrum::new(&setup, sample, cfg)?;
        match spectrum.estimate(&setup, m, cfg.variant) {
            Err(Error::QuadratureNotConverged { .. }) if quad.nodes * 2 <= quad.max_nodes => quad = quad.doubled(),
            other => return other,
        }
    }
}

/// θ_m = Re (1/2π) ∫ Ff(−u) FK(u/m) Fμ(u) du from the analytic Fμ.
pub fn smoothed_target(model: &LevyModel, f: &Functional, kernel: &Kernel, m: usize, q: &QuadratureSpec) -> Result<f64> {
    if model.is_zero() {
        return Ok(0.0);
    }
    let mut quad = *q;
    loop {
        let setup = SpectralSetup::new(f, kernel, &quad, m)?;
        let step = setup.step();
        let g: Vec<Complex64> = (0..setup.needed_len()).map(|j| model.mu_fourier(j as f64 * step)).collect();
        let (fine, coarse, mass) = setup.integrate(&g, m);
        let norm = 1.0 / (2.0 * PI);
        match setup.check(fine.re * norm, coarse.re * norm, mass * norm, quad.tolerance) {
            Ok(()) => return Ok(fine.re * norm),
            Err(Error::QuadratureNotConverged { .. }) if quad.nodes * 2 <= quad.max_nodes => quad = quad.doubled(),
            Err(e) => return Err(e),
        }
    }
}

/// (2|θ − θ_m|², T⁻¹/(2π²) · min{C1 branch, C2 branch}) at h = 1/m.
pub fn risk_bound(
    model: &LevyModel,
    f: &Functional,
    kernel: &Kernel,
    m: usize,
    n: usize,
    win: &VarianceWindow,
    q: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::SampleTooSmall { n, min: 1 });
    }
    if model.is_zero() {
        return Ok((0.0, 0.0));
    }
    let theta = model.true_theta(f)?;
    let theta_m = smoothed_target(model, f, kernel, m, q)?;
    let bias2 = 2.0 * (theta - theta_m).powi(2);
    let (c1, c2) = model.variance_constants(win);
    let (l2, l1) = ratio_integrals(model, f, kernel, m, q)?;
    let c2_branch = c2 * l1 * l1;
    let branch = if c1.is_finite() { (c1 * l2).min(c2_branch) } else { c2_branch };
    let t = model.delta() * n as f64;
    Ok((bias2, branch / (2.0 * PI * PI * t)))
}

/// (∫|FK(u/m)|²|Ff(−u)/φ_Δ(u)|² du, ∫|FK(u/m)||Ff(−u)/φ_Δ(u)| du).
pub fn ratio_integrals(model: &LevyModel, f: &Functional, kernel: &Kernel, m: usize, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let quad = QuadratureSpec { check: false, ..*q };
    let setup = SpectralSetup::new(f, kernel, &quad, m)?;
    let step = setup.step();
    let ratio: Vec<f64> = setup
        .f_half()
        .iter()
        .enumerate()
        .map(|(j, fv)| fv.norm() / model.char_fn(j as f64 * step).norm())
        .collect();
    let mf = m as f64;
    let half = quad.half_len(m);
    let reach = half.min(ratio.len() - 1);
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for (j, r) in ratio.iter().enumerate().take(reach + 1) {
        let w = if j == 0 || j == half { 1.0 } else { 2.0 };
        let k = kernel.ft(j as f64 * step / mf).abs();
        l1 += w * k * r;
        l2 += w * k * k * r * r;
    }
    Ok((l2 * step, l1 * step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Sobolev,
    Hoelder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSpec {
    /// Smoothness of μ.
    pub a: f64,
    /// Decay index of f.
    pub s: f64,
    pub beta: f64,
    pub rho: f64,
    pub delta: f64,
    pub c1_finite: bool,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RateForm {
    /// T^{exponent}
    Power,
    /// (log T) T^{exponent}
    LogTimesPower,
    /// ((log T)/Δ)^{exponent}
    LogPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateDescriptor {
    pub form: RateForm,
    pub exponent: f64,
    pub value: f64,
}

impl RateDescriptor {
    /// Local log-log slope of the rate at T (equals the exponent for pure powers).
    pub fn slope_at(&self, t: f64) -> f64 {
        match self.form {
            RateForm::Power => self.exponent,
            RateForm::LogTimesPower => self.exponent + 1.0 / t.ln(),
            RateForm::LogPower => self.exponent / t.ln(),
        }
    }
}

const TIE: f64 = 1e-12;

/// Rate r_{Δ,n} from the Sobolev (global) or Hölder (local) rate table.
pub fn theoretical_rate(spec: &RateSpec, t: f64) -> Result<RateDescriptor> {
    if !(spec.a + spec.s > 0.0) {
        return Err(Error::InvalidParameter(format!("rate tables need a > −s, got a = {}, s = {}", spec.a, spec.s)));
    }
    if !(t > 1.0) || !(spec.delta > 0.0) {
        return Err(Error::InvalidParameter("rate needs T > 1 and Δ > 0".into()));
    }
    let (a, s, db) = (spec.a, spec.s, spec.delta * spec.beta);
    let power = |e: f64| RateDescriptor { form: RateForm::Power, exponent: e, value: t.powf(e) };
    let log_power = || RateDescriptor { form: RateForm::LogTimesPower, exponent: -1.0, value: t.ln() / t };
    if spec.rho > 0.0 {
        if !s.is_finite() {
            return Err(Error::InvalidParameter("supersmooth rates need a finite decay index s".into()));
        }
        let e = -(2.0 * a + 2.0 * s) / spec.rho;
        let base = t.ln() / spec.delta;
        return Ok(RateDescriptor { form: RateForm::LogPower, exponent: e, value: base.powf(e) });
    }
    // (threshold, exponent denominator offset) per table cell
    let (threshold, extra) = match (spec.regime, spec.c1_finite) {
        (Regime::Sobolev, true) => (db, 0.0),
        (Regime::Sobolev, false) => (db + 0.5, 1.0),
        (Regime::Hoelder, true) => (db + 0.5, 1.0),
        (Regime::Hoelder, false) => (db + 1.0, 2.0),
    };
    let d = s - threshold;
    if d > TIE {
        return Ok(power(-1.0));
    }
    if d.abs() <= TIE {
        // In the Sobolev, finite-C1 column the boundary cell is still parametric.
        return Ok(if matches!((spec.regime, spec.c1_finite), (Regime::Sobolev, true)) { power(-1.0) } else { log_power() });
    }
    Ok(power(-(2.0 * a + 2.0 * s) / (2.0 * a + 2.0 * db + extra)))
}

/// Constants feeding the squared-bias bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BiasConstants {
    /// Global Sobolev bound: ∫|Ff(−u)|²(1+u²)^s ≤ M_f, same for μ with a.
    Sobolev { m_f: f64, m_mu: f64 },
    /// Local Hölder bound with a user-supplied constant C_B.
    Hoelder { c_b: f64 },
}

/// Squared-bias bound C h^{2a+2s}.
pub fn bias_bound(spec: &RateSpec, h: f64, kernel: &Kernel, constants: &BiasConstants) -> f64 {
    let exp = 2.0 * spec.a + 2.0 * spec.s;
    let hp = h.powf(exp);
    match *constants {
        BiasConstants::Sobolev { m_f, m_mu } => {
            let sup_term = match kernel.kind() {
                KernelKind::Sinc => PI.powf(-exp),
                KernelKind::PolynomialTaper { .. } => {
                    let (l_k, _) = kernel.holder_constants();
                    let order = spec.a + spec.s;
                    let fact: f64 = (1..=lower_integer(order)).map(|i| i as f64).product();
                    (l_k / fact + 2.0 * PI.powf(-order)).powi(2)
                }
            };
            m_f * m_mu * sup_term / (4.0 * PI * PI) * hp
        }
        BiasConstants::Hoelder { c_b } => c_b * hp,
    }
}
