//! Catalog of pure-jump, finite-variation Lévy models.
//!
//! Each model carries its characteristic exponent Ψ and the first two
//! derivatives in closed form, the density of the signed measure
//! μ(dx) = x ν(dx), an exact increment sampler, and ground-truth values of
//! θ = ⟨f, μ⟩ for the functional catalog.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Gamma, Poisson, Uniform};
use serde::Serialize;

use crate::ecf::SplitSample;
use crate::error::{Error, Result};
use crate::functionals::{Functional, FunctionalKind};
use crate::quad;
use crate::rng::{self, SimRng};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Law of a single jump of a compound Poisson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum JumpLaw {
    Exponential { scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModelKind {
    ZeroMeasure,
    CompoundPoisson { intensity: f64, jump: JumpLaw },
    /// ν(dx) = shape · x⁻¹ e^{−x/scale} dx on x > 0.
    GammaSubordinator { shape: f64, scale: f64 },
    /// Difference of two independent gamma subordinators.
    BilateralGamma { shape_pos: f64, scale_pos: f64, shape_neg: f64, scale_neg: f64 },
}

/// Lower envelope |φ₁(u)| ≥ C_φ (1+u²)^{−β/2} e^{−c_φ |u|^ρ} for the law of X₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayProfile {
    pub beta: f64,
    pub rho: f64,
    pub c_phi: f64,
    pub big_c_phi: f64,
}

impl DecayProfile {
    pub fn envelope(&self, u: f64) -> f64 {
        self.big_c_phi * (1.0 + u * u).powf(-0.5 * self.beta) * (-self.c_phi * u.abs().powf(self.rho)).exp()
    }
}

/// Settings for the variance constants C1 and C2 of the risk bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceWindow {
    /// Universal multiplier in front of both constants.
    pub universal_c: f64,
    /// Half-width U of the quadrature window [−U, U].
    pub window: f64,
    /// Grid points used for the sup norms.
    pub sup_points: usize,
}

impl Default for VarianceWindow {
    fn default() -> Self {
        Self { universal_c: 1.0, window: 200.0, sup_points: 20_001 }
    }
}

/// Integrals and sup norms that make up C1 and C2, before the universal factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceComponents {
    pub int_abs_psi2: f64,
    pub int_abs_psi1_sq: f64,
    pub sup_abs_psi2: f64,
    pub sup_abs_psi1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharQuantities {
    /// C1, `f64::INFINITY` when ∫|Ψ''| diverges.
    pub c1: f64,
    pub c2: f64,
    pub components: VarianceComponents,
    pub decay: DecayProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyModel {
    kind: ModelKind,
    delta: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl LevyModel {
    pub fn new(kind: ModelKind, delta: f64) -> Result<Self> {
        positive("delta", delta)?;
        match kind {
            ModelKind::ZeroMeasure => {}
            ModelKind::CompoundPoisson { intensity, jump } => {
                positive("intensity", intensity)?;
                match jump {
                    JumpLaw::Exponential { scale } => positive("jump scale", scale)?,
                    JumpLaw::Gamma { shape, scale } => {
                        positive("jump shape", shape)?;
                        positive("jump scale", scale)?;
                    }
                    JumpLaw::Uniform { lo, hi } => {
                        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                            return Err(Error::InvalidParameter(format!(
                                "uniform jump law needs lo < hi, got [{lo}, {hi}]"
                            )));
                        }
                    }
                }
            }
            ModelKind::GammaSubordinator { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg } => {
                positive("shape_pos", shape_pos)?;
                positive("scale_pos", scale_pos)?;
                positive("shape_neg", shape_neg)?;
                positive("scale_neg", scale_neg)?;
            }
        }
        Ok(Self { kind, delta })
    }

    pub fn zero(delta: f64) -> Result<Self> {
        Self::new(ModelKind::ZeroMeasure, delta)
    }

    pub fn compound_poisson(intensity: f64, jump: JumpLaw, delta: f64) -> Result<Self> {
        Self::new(ModelKind::CompoundPoisson { intensity, jump }, delta)
    }

    pub fn gamma_subordinator(shape: f64, scale: f64, delta: f64) -> Result<Self> {
        Self::new(ModelKind::GammaSubordinator { shape, scale }, delta)
    }

    pub fn bilateral_gamma(shape_pos: f64, scale_pos: f64, shape_neg: f64, scale_neg: f64, delta: f64) -> Result<Self> {
        Self::new(ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg }, delta)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.kind, delta)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ModelKind::ZeroMeasure)
    }

    /// Ψ(u) = ∫ (e^{iux} − 1) ν(dx).
    pub fn char_exponent(&self, u: f64) -> Complex64 {
        self.psi_derivative(u, 0)
    }

    pub fn psi_prime(&self, u: f64) -> Complex64 {
        self.psi_derivative(u, 1)
    }

    pub fn psi_double_prime(&self, u: f64) -> Complex64 {
        self.psi_derivative(u, 2)
    }

    fn psi_derivative(&self, u: f64, order: u32) -> Complex64 {
        match self.kind {
            ModelKind::ZeroMeasure => Complex64::new(0.0, 0.0),
            ModelKind::CompoundPoisson { intensity, jump } => {
                let d = jump_cf_derivative(jump, u, order);
                if order == 0 {
                    intensity * (d - 1.0)
                } else {
                    intensity * d
                }
            }
            ModelKind::GammaSubordinator { shape, scale } => gamma_exponent(shape, scale, u, order),
            ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg } => {
                gamma_exponent(shape_pos, scale_pos, u, order) + gamma_exponent(shape_neg, -scale_neg, u, order)
            }
        }
    }

    /// φ_Δ(u) = exp(Δ Ψ(u)).
    pub fn char_fn(&self, u: f64) -> Complex64 {
        if u == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        (self.delta * self.char_exponent(u)).exp()
    }

    /// Fourier transform of μ, Fμ(u) = Ψ'(u) / i.
    pub fn mu_fourier(&self, u: f64) -> Complex64 {
        self.psi_prime(u) * Complex64::new(0.0, -1.0)
    }

    /// μ(ℝ) = ∫ x ν(dx).
    pub fn mu_total(&self) -> f64 {
        self.mu_fourier(0.0).re
    }

    /// ∫ x² ν(dx), the per-unit-time variance of the process.
    pub fn second_moment(&self) -> f64 {
        -self.psi_double_prime(0.0).re
    }

    /// Default exponential-moment parameter: half the supremum of admissible η.
    pub fn default_eta(&self) -> f64 {
        match self.kind {
            ModelKind::ZeroMeasure => 1.0,
            ModelKind::CompoundPoisson { jump, .. } => match jump {
                JumpLaw::Exponential { scale } | JumpLaw::Gamma { scale, .. } => 0.5 / scale,
                JumpLaw::Uniform { lo, hi } => 0.5 / lo.abs().max(hi.abs()).max(1e-12),
            },
            ModelKind::GammaSubordinator { scale, .. } => 0.5 / scale,
            ModelKind::BilateralGamma { scale_pos, scale_neg, .. } => 0.5 / scale_pos.max(scale_neg),
        }
    }

    /// Whether ∫|Ψ''| < ∞; declared per model rather than detected numerically.
    pub fn c1_is_finite(&self) -> bool {
        !matches!(
            self.kind,
            ModelKind::CompoundPoisson { jump: JumpLaw::Uniform { .. }, .. }
        )
    }

    pub fn decay_profile(&self) -> DecayProfile {
        let poly = |beta: f64, c: f64| DecayProfile { beta, rho: 0.0, c_phi: 0.0, big_c_phi: c };
        match self.kind {
            ModelKind::ZeroMeasure => poly(0.0, 1.0),
            ModelKind::CompoundPoisson { intensity, jump } => match jump {
                // Re φ_J ≥ 0 for exponential jumps.
                JumpLaw::Exponential { .. } => poly(0.0, (-intensity).exp()),
                _ => poly(0.0, (-2.0 * intensity).exp()),
            },
            ModelKind::GammaSubordinator { shape, scale } => poly(shape, scale.max(1.0).powf(-shape)),
            ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg } => poly(
                shape_pos + shape_neg,
                scale_pos.max(1.0).powf(-shape_pos) * scale_neg.max(1.0).powf(-shape_neg),
            ),
        }
    }

    /// Components of C1 and C2 before the universal constant.
    pub fn variance_components(&self, win: &VarianceWindow) -> VarianceComponents {
        if self.is_zero() {
            return VarianceComponents { int_abs_psi2: 0.0, int_abs_psi1_sq: 0.0, sup_abs_psi2: 0.0, sup_abs_psi1: 0.0 };
        }
        let u_max = win.window;
        let abs2 = |u: f64| self.psi_double_prime(u).norm();
        let sq1 = |u: f64| self.psi_prime(u).norm_sqr();
        let over_line = |g: &dyn Fn(f64) -> f64| {
            let core = quad::integrate(g, -u_max, u_max, 1e-11);
            let right = quad::integrate_to_inf(g, u_max, 1e-12);
            let left = quad::integrate_from_neg_inf(g, -u_max, 1e-12);
            core + right + left
        };
        let int_abs_psi2 = if self.c1_is_finite() { over_line(&abs2) } else { f64::INFINITY };
        let int_abs_psi1_sq = over_line(&sq1);
        let pts = win.sup_points.max(3);
        let mut sup2 = abs2(0.0);
        let mut sup1 = sq1(0.0).sqrt();
        for j in 0..pts {
            let u = -u_max + 2.0 * u_max * j as f64 / (pts - 1) as f64;
            sup2 = sup2.max(abs2(u));
            sup1 = sup1.max(sq1(u).sqrt());
        }
        VarianceComponents { int_abs_psi2, int_abs_psi1_sq, sup_abs_psi2: sup2, sup_abs_psi1: sup1 }
    }

    /// (C1, C2) with C1 = C(∫|Ψ''| + 2∫|Ψ'|²) and C2 = C(‖Ψ''‖∞ + 2‖Ψ'‖∞²).
    pub fn variance_constants(&self, win: &VarianceWindow) -> (f64, f64) {
        let q = self.char_quantities(win);
        (q.c1, q.c2)
    }

    pub fn char_quantities(&self, win: &VarianceWindow) -> CharQuantities {
        let c = self.variance_components(win);
        let k = win.universal_c;
        let c1 = if c.int_abs_psi2.is_finite() {
            k * (c.int_abs_psi2 + 2.0 * c.int_abs_psi1_sq)
        } else {
            f64::INFINITY
        };
        let c2 = k * (c.sup_abs_psi2 + 2.0 * c.sup_abs_psi1 * c.sup_abs_psi1);
        CharQuantities { c1, c2, components: c, decay: self.decay_profile() }
    }

    /// Draws one increment X_Δ.
    pub fn draw_increment(&self, rng: &mut SimRng) -> f64 {
        let dt = self.delta;
        match self.kind {
            ModelKind::ZeroMeasure => 0.0,
            ModelKind::CompoundPoisson { intensity, jump } => {
                let count = Poisson::new(intensity * dt).expect("validated intensity").sample(rng) as u64;
                if count == 0 {
                    return 0.0;
                }
                match jump {
                    JumpLaw::Exponential { scale } => gamma_draw(count as f64, scale, rng),
                    JumpLaw::Gamma { shape, scale } => gamma_draw(count as f64 * shape, scale, rng),
                    JumpLaw::Uniform { lo, hi } => {
                        let law = Uniform::new(lo, hi).expect("validated bounds");
                        (0..count).map(|_| law.sample(rng)).sum()
                    }
                }
            }
            ModelKind::GammaSubordinator { shape, scale } => gamma_draw(shape * dt, scale, rng),
            ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg } => {
                let up = gamma_draw(shape_pos * dt, scale_pos, rng);
                let down = gamma_draw(shape_neg * dt, scale_neg, rng);
                up - down
            }
        }
    }

    /// 2n increments from a fresh stream seeded by `seed`.
    pub fn sample_increments(&self, n: usize, seed: u64) -> Result<SplitSample> {
        let mut rng = rng::root(seed);
        self.sample_increments_with(n, &mut rng)
    }

    pub fn sample_increments_with(&self, n: usize, rng: &mut SimRng) -> Result<SplitSample> {
        if n == 0 {
            return Err(Error::SampleTooSmall { n, min: 1 });
        }
        let draws: Vec<f64> = (0..2 * n).map(|_| self.draw_increment(rng)).collect();
        let (ecf_half, deriv_half) = draws.split_at(n);
        SplitSample::new(ecf_half.to_vec(), deriv_half.to_vec(), self.delta)
    }

    /// Density of μ at `x`, or `None` at points where it is not smooth.
    pub fn mu_density(&self, x: f64) -> Option<f64> {
        self.mu_density_derivative(x, 0).ok()
    }

    /// k-th derivative of the μ-density at `x`.
    pub fn mu_density_derivative(&self, x: f64, k: u32) -> Result<f64> {
        if !self.in_density_domain(x) {
            return Err(Error::OutsideDensityDomain { x0: x });
        }
        Ok(match self.kind {
            ModelKind::ZeroMeasure => 0.0,
            ModelKind::CompoundPoisson { intensity, jump } => match jump {
                JumpLaw::Exponential { scale } => {
                    if x > 0.0 {
                        powexp_derivative(intensity / scale, 1.0, 1.0 / scale, x, k)
                    } else {
                        0.0
                    }
                }
                JumpLaw::Gamma { shape, scale } => {
                    if x > 0.0 {
                        let c = intensity / (ln_gamma(shape).exp() * scale.powf(shape));
                        powexp_derivative(c, shape, 1.0 / scale, x, k)
                    } else {
                        0.0
                    }
                }
                JumpLaw::Uniform { lo, hi } => {
                    if x > lo && x < hi {
                        let c = intensity / (hi - lo);
                        match k {
                            0 => c * x,
                            1 => c,
                            _ => 0.0,
                        }
                    } else {
                        0.0
                    }
                }
            },
            ModelKind::GammaSubordinator { shape, scale } => {
                if x > 0.0 {
                    powexp_derivative(shape, 0.0, 1.0 / scale, x, k)
                } else {
                    0.0
                }
            }
            ModelKind::BilateralGamma { shape_pos, scale_pos, shape_neg, scale_neg } => {
                if x > 0.0 {
                    powexp_derivative(shape_pos, 0.0, 1.0 / scale_pos, x, k)
                } else {
                    // −shape_neg · e^{x/scale_neg}
                    -shape_neg * scale_neg.powi(-(k as i32)) * (x / scale_neg).exp()
                }
            }
        })
    }

    /// Points where μ has a C^∞ density: everything except the origin and
    /// the endpoints of a uniform jump law.
    pub fn in_density_domain(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        if x == 0.0 {
            return false;
        }
        match self.kind {
            ModelKind::CompoundPoisson { jump: JumpLaw::Uniform { lo, hi }, .. } => x != lo && x != hi,
            _ => true,
        }
    }

    /// Breakpoints of the μ-density, used to split quadrature.
    fn density_breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        if let ModelKind::CompoundPoisson { jump: JumpLaw::Uniform { lo, hi }, .. } = self.kind {
            b.push(lo);
            b.push(hi);
        }
        b
    }

    /// Support of μ as (lower, upper), possibly infinite.
    fn mu_support(&self) -> (f64, f64) {
        match self.kind {
            ModelKind::ZeroMeasure => (0.0, 0.0),
            ModelKind::CompoundPoisson { jump, .. } => match jump {
                JumpLaw::Uniform { lo, hi } => (lo, hi),
                _ => (0.0, f64::INFINITY),
            },
            ModelKind::GammaSubordinator { .. } => (0.0, f64::INFINITY),
            ModelKind::BilateralGamma { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Ground truth θ = ⟨f, μ⟩ by closed form (point functionals) or
    /// adaptive quadrature of ∫ f(x) g_μ(x) dx (regular functionals).
    pub fn true_theta(&self, f: &Functional) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        match *f.kind() {
            FunctionalKind::Zero => Ok(0.0),
            FunctionalKind::DiracPoint { x0 } => self.mu_density_derivative(x0, 0),
            FunctionalKind::DiracDerivative { x0, order } => {
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                Ok(sign * self.mu_density_derivative(x0, order)?)
            }
            FunctionalKind::Gaussian { .. } | FunctionalKind::CompactBump { .. } => {
                let (mut lo, mut hi) = self.mu_support();
                if let Some((a, b)) = f.support() {
                    lo = lo.max(a);
                    hi = hi.min(b);
                }
                if lo >= hi {
                    return Ok(0.0);
                }
                let mut breaks: Vec<f64> = self.density_breaks();
                breaks.extend(f.kinks());
                if let FunctionalKind::Gaussian { center, .. } = *f.kind() {
                    breaks.push(center);
                }
                breaks.retain(|b| *b > lo && *b < hi);
                breaks.push(lo);
                breaks.push(hi);
                breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breaks"));
                breaks.dedup();
                let integrand = |x: f64| {
                    let g = self.density_value(x);
                    if g == 0.0 { 0.0 } else { f.pointwise(x).unwrap_or(0.0) * g }
                };
                let mut total = 0.0;
                for w in breaks.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    total += match (a.is_finite(), b.is_finite()) {
                        (true, true) => quad::integrate(integrand, a, b, 1e-14),
                        (true, false) => quad::integrate_to_inf(integrand, a, 1e-14),
                        (false, true) => quad::integrate_from_neg_inf(integrand, b, 1e-14),
                        (false, false) => quad::integrate_real_line(integrand, 0.0, 1e-14),
                    };
                }
                Ok(total)
            }
        }
    }

    /// Density value with the one-sided limit at breakpoints (quadrature only).
    fn density_value(&self, x: f64) -> f64 {
        self.mu_density_derivative(x, 0).unwrap_or(0.0)
    }
}

fn gamma_draw(shape: f64, scale: f64, rng: &mut SimRng) -> f64 {
    if shape <= 0.0 {
        return 0.0;
    }
    let g = Gamma::new(shape, scale).expect("positive gamma parameters");
    g.sample(rng)
}

/// Derivative of −shape · log(1 − i·scale·u); negative `scale` gives the
/// mirrored (negative-jump) component.
fn gamma_exponent(shape: f64, scale: f64, u: f64, order: u32) -> Complex64 {
    let base = Complex64::new(1.0, -scale * u);
    match order {
        0 => -shape * base.ln(),
        1 => I * shape * scale / base,
        _ => Complex64::new(-shape * scale * scale, 0.0) / (base * base),
    }
}

/// E[(iJ)^order e^{iuJ}] for the jump law.
fn jump_cf_derivative(jump: JumpLaw, u: f64, order: u32) -> Complex64 {
    match jump {
        JumpLaw::Exponential { scale } => gamma_cf_derivative(1.0, scale, u, order),
        JumpLaw::Gamma { shape, scale } => gamma_cf_derivative(shape, scale, u, order),
        JumpLaw::Uniform { lo, hi } => {
            let moment = uniform_moment_transform(lo, hi, u, order);
            I.powu(order) * moment / (hi - lo)
        }
    }
}

/// Derivatives of (1 − i·scale·u)^{−shape}.
fn gamma_cf_derivative(shape: f64, scale: f64, u: f64, order: u32) -> Complex64 {
    let base = Complex64::new(1.0, -scale * u);
    match order {
        0 => base.powf(-shape),
        1 => I * shape * scale * base.powf(-shape - 1.0),
        _ => -shape * (shape + 1.0) * scale * scale * base.powf(-shape - 2.0),
    }
}

/// ∫_lo^hi x^k e^{iux} dx for k ≤ 2.
fn uniform_moment_transform(lo: f64, hi: f64, u: f64, k: u32) -> Complex64 {
    let reach = lo.abs().max(hi.abs());
    if u.abs() * reach < 0.5 {
        // Taylor series in u; converges fast for |u|·reach < 1/2.
        let mut sum = Complex64::new(0.0, 0.0);
        let mut coef = Complex64::new(1.0, 0.0);
        for j in 0..40u32 {
            let p = (k + j + 1) as i32;
            let m = (hi.powi(p) - lo.powi(p)) / p as f64;
            sum += coef * m;
            coef *= I * u / (j + 1) as f64;
        }
        return sum;
    }
    let iu = I * u;
    let e = |x: f64| Complex64::from_polar(1.0, u * x);
    let i0 = (e(hi) - e(lo)) / iu;
    if k == 0 {
        return i0;
    }
    let i1 = (hi * e(hi) - lo * e(lo)) / iu - i0 / iu;
    if k == 1 {
        return i1;
    }
    (hi * hi * e(hi) - lo * lo * e(lo)) / iu - 2.0 * i1 / iu
}

/// k-th derivative of c · x^p · e^{−b x} at x > 0.
fn powexp_derivative(c: f64, p: f64, b: f64, x: f64, k: u32) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut falling = 1.0;
    for j in 0..=k {
        let term = binom * falling * x.powf(p - j as f64) * (-b).powi((k - j) as i32);
        sum += term;
        falling *= p - j as f64;
        binom *= (k - j) as f64 / (j + 1) as f64;
    }
    c * sum * (-b * x).exp()
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}
