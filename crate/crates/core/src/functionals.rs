//! Test functionals f and band-limited kernels K, both handled through their
//! Fourier transforms.
//!
//! Fourier convention: Ff(u) = ∫ e^{iux} f(x) dx. Decay indices follow
//! |Ff(u)| ≤ C_f (1+|u|)^{−s}: point evaluation has s = 0, the k-th derivative
//! s = −k, and the tent bump s = 2.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FunctionalKind {
    /// f ≡ 0.
    Zero,
    /// f(x) = exp(−(x − center)² / (2 width²)).
    Gaussian { center: f64, width: f64 },
    /// Tent of height 1 on [lo, hi], peak at the midpoint.
    CompactBump { lo: f64, hi: f64 },
    /// f = δ_{x0}.
    DiracPoint { x0: f64 },
    /// f = δ_{x0}^{(order)}, so that ⟨f, μ⟩ = (−1)^order g_μ^{(order)}(x0).
    DiracDerivative { x0: f64, order: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Functional {
    kind: FunctionalKind,
}

impl Functional {
    pub fn new(kind: FunctionalKind) -> Result<Self> {
        match kind {
            FunctionalKind::Gaussian { center, width } => {
                if !(center.is_finite() && width.is_finite() && width > 0.0) {
                    return Err(Error::InvalidParameter(format!("gaussian needs width > 0, got {width}")));
                }
            }
            FunctionalKind::CompactBump { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidParameter(format!("bump needs lo < hi, got [{lo}, {hi}]")));
                }
            }
            FunctionalKind::DiracPoint { x0 } | FunctionalKind::DiracDerivative { x0, .. } => {
                if !x0.is_finite() {
                    return Err(Error::InvalidParameter("dirac location must be finite".into()));
                }
            }
            FunctionalKind::Zero => {}
        }
        Ok(Self { kind })
    }

    pub fn zero() -> Self {
        Self { kind: FunctionalKind::Zero }
    }

    pub fn gaussian() -> Self {
        Self { kind: FunctionalKind::Gaussian { center: 0.0, width: 1.0 } }
    }

    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        Self::new(FunctionalKind::CompactBump { lo, hi })
    }

    pub fn dirac(x0: f64) -> Self {
        Self { kind: FunctionalKind::DiracPoint { x0 } }
    }

    pub fn dirac_derivative(x0: f64, order: u32) -> Self {
        Self { kind: FunctionalKind::DiracDerivative { x0, order } }
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    /// Ff(u).
    pub fn fourier(&self, u: f64) -> Complex64 {
        match self.kind {
            FunctionalKind::Zero => Complex64::new(0.0, 0.0),
            FunctionalKind::Gaussian { center, width } => {
                let amp = width * (2.0 * PI).sqrt() * (-0.5 * width * width * u * u).exp();
                Complex64::from_polar(amp, u * center)
            }
            FunctionalKind::CompactBump { lo, hi } => {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                let t = 0.5 * u * half;
                let sinc = if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
                Complex64::from_polar(half * sinc * sinc, u * mid)
            }
            FunctionalKind::DiracPoint { x0 } => Complex64::from_polar(1.0, u * x0),
            FunctionalKind::DiracDerivative { x0, order } => {
                Complex64::new(0.0, -u).powu(order) * Complex64::from_polar(1.0, u * x0)
            }
        }
    }

    /// Decay index s (infinite for f ≡ 0 and the Gaussian).
    pub fn smoothness(&self) -> f64 {
        match self.kind {
            FunctionalKind::Zero | FunctionalKind::Gaussian { .. } => f64::INFINITY,
            FunctionalKind::CompactBump { .. } => 2.0,
            FunctionalKind::DiracPoint { .. } => 0.0,
            FunctionalKind::DiracDerivative { order, .. } => -(order as f64),
        }
    }

    /// Constant C_f with |Ff(u)| ≤ C_f (1+|u|)^{−s}, for finite s.
    pub fn decay_constant(&self) -> Option<f64> {
        match self.kind {
            FunctionalKind::CompactBump { lo, hi } => {
                // |Ff| ≤ w · min(1, 4/(u w)²) with w = (hi − lo)/2
                let w = 0.5 * (hi - lo);
                Some((4.0 * w).max(16.0 / w))
            }
            FunctionalKind::DiracPoint { .. } | FunctionalKind::DiracDerivative { .. } => Some(1.0),
            _ => None,
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match self.kind {
            FunctionalKind::CompactBump { lo, hi } => Some((lo, hi)),
            FunctionalKind::DiracPoint { x0 } | FunctionalKind::DiracDerivative { x0, .. } => Some((x0, x0)),
            _ => None,
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(
            self.kind,
            FunctionalKind::Zero | FunctionalKind::Gaussian { .. } | FunctionalKind::CompactBump { .. }
        )
    }

    /// Pointwise values for regular functionals.
    pub fn pointwise(&self, x: f64) -> Option<f64> {
        match self.kind {
            FunctionalKind::Zero => Some(0.0),
            FunctionalKind::Gaussian { center, width } => {
                let z = (x - center) / width;
                Some((-0.5 * z * z).exp())
            }
            FunctionalKind::CompactBump { lo, hi } => {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                Some((1.0 - (x - mid).abs() / half).max(0.0))
            }
            _ => None,
        }
    }

    /// Points where the pointwise form is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self.kind {
            FunctionalKind::CompactBump { lo, hi } => vec![lo, 0.5 * (lo + hi), hi],
            _ => Vec::new(),
        }
    }

    /// Largest |u| at which Ff(u) is nonzero in f64, if that is finite.
    pub fn numerical_band(&self) -> Option<f64> {
        match self.kind {
            FunctionalKind::Zero => Some(0.0),
            // e^{−x} underflows to zero beyond x ≈ 745.2
            FunctionalKind::Gaussian { width, .. } => Some((2.0 * 746.0f64).sqrt() / width),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KernelKind {
    /// FK = 1 on [−π, π].
    Sinc,
    /// FK(v) = 1 − (|v|/π)^power on [−π, π].
    PolynomialTaper { power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel {
    kind: KernelKind,
}

impl Kernel {
    pub fn sinc() -> Self {
        Self { kind: KernelKind::Sinc }
    }

    pub fn taper(power: f64) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidParameter(format!("taper power must be positive, got {power}")));
        }
        Ok(Self { kind: KernelKind::PolynomialTaper { power } })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// FK(v); exactly zero outside [−π, π].
    pub fn ft(&self, v: f64) -> f64 {
        let a = v.abs();
        if a > PI {
            return 0.0;
        }
        match self.kind {
            KernelKind::Sinc => 1.0,
            KernelKind::PolynomialTaper { power } => 1.0 - (a / PI).powf(power),
        }
    }

    /// Kernel order: infinite for sinc, the taper power otherwise.
    pub fn order(&self) -> f64 {
        match self.kind {
            KernelKind::Sinc => f64::INFINITY,
            KernelKind::PolynomialTaper { power } => power,
        }
    }

    /// Hölder data (L_K, R_K) of FK: R_K = sup|FK| and L_K the Hölder
    /// constant of the ⟨p⟩-th derivative with exponent p − ⟨p⟩.
    pub fn holder_constants(&self) -> (f64, f64) {
        match self.kind {
            KernelKind::Sinc => (0.0, 1.0),
            KernelKind::PolynomialTaper { power } => {
                let j = lower_integer(power);
                let mut falling = 1.0;
                for i in 0..j {
                    falling *= power - i as f64;
                }
                let alpha = power - j as f64;
                (falling * PI.powf(-power) * 2f64.powf(1.0 - alpha), 1.0)
            }
        }
    }

    /// Δ_{m,k}FK(u) = FK(u/k) − FK(u/m), with FK(u/0) := 0 for u ≠ 0 and 1 at u = 0.
    pub fn diff(&self, m: usize, k: usize, u: f64) -> Result<f64> {
        if k <= m {
            return Err(Error::InvalidBandPair { m, k });
        }
        Ok(self.ft(u / k as f64) - self.scaled_ft(m, u))
    }

    /// Value of Δ_{m,k}FK used inside integrals. Differs from [`Kernel::diff`]
    /// only at the single point u = 0 when m = 0, where the continuous
    /// extension FK(0) is used.
    pub(crate) fn diff_ae(&self, m: usize, k: usize, u: f64) -> f64 {
        let coarse = if m == 0 { 0.0 } else { self.ft(u / m as f64) };
        self.ft(u / k as f64) - coarse
    }

    /// FK(u/m) with the m = 0 convention.
    pub fn scaled_ft(&self, m: usize, u: f64) -> f64 {
        if m == 0 {
            if u == 0.0 { 1.0 } else { 0.0 }
        } else {
            self.ft(u / m as f64)
        }
    }
}

/// ⟨a⟩ = max{k ∈ ℕ : k < a}.
pub fn lower_integer(a: f64) -> u32 {
    let c = a.ceil();
    if c <= 0.0 { 0 } else { (c as u32).saturating_sub(1) }
}
