//! Empirical characteristic functions of a split sample and the two
//! regularized inverses used by the estimators.
//!
//! The first half of the sample feeds φ̂ₙ (and hence the denominator), the
//! second half feeds φ̂′ₙ. Keeping them disjoint makes numerator and
//! denominator independent.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::LevyModel;
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSample {
    ecf_half: Vec<f64>,
    deriv_half: Vec<f64>,
    delta: f64,
}

impl SplitSample {
    pub fn new(ecf_half: Vec<f64>, deriv_half: Vec<f64>, delta: f64) -> Result<Self> {
        if ecf_half.is_empty() {
            return Err(Error::SampleTooSmall { n: 0, min: 1 });
        }
        if ecf_half.len() != deriv_half.len() {
            return Err(Error::InvalidParameter(format!(
                "sample halves differ in length: {} vs {}",
                ecf_half.len(),
                deriv_half.len()
            )));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        if ecf_half.iter().chain(&deriv_half).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("sample contains non-finite values".into()));
        }
        Ok(Self { ecf_half, deriv_half, delta })
    }

    /// Same increments in both halves; handy for hand-checked examples.
    pub fn mirrored(xs: Vec<f64>, delta: f64) -> Result<Self> {
        Self::new(xs.clone(), xs, delta)
    }

    pub fn n(&self) -> usize {
        self.ecf_half.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ecf_half(&self) -> &[f64] {
        &self.ecf_half
    }

    pub fn deriv_half(&self) -> &[f64] {
        &self.deriv_half
    }

    /// φ̂ₙ(u) = n⁻¹ Σ_{k≤n} e^{iuZ_k}.
    pub fn ecf(&self, u: f64) -> Complex64 {
        if u == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &z in &self.ecf_half {
            let (s, c) = (u * z).sin_cos();
            acc += Complex64::new(c, s);
        }
        acc / self.n() as f64
    }

    /// φ̂′ₙ(u) = n⁻¹ Σ_{k>n} i Z_k e^{iuZ_k}.
    pub fn ecf_deriv(&self, u: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &z in &self.deriv_half {
            let (s, c) = (u * z).sin_cos();
            acc += z * Complex64::new(c, s);
        }
        Complex64::new(0.0, 1.0) * acc / self.n() as f64
    }

    /// Indicator-truncated inverse 1(|φ̂| ≥ (Δn)^{−1/2}) / φ̂.
    pub fn neumann_inverse(&self, u: f64) -> Complex64 {
        neumann_inverse_from(self.ecf(u), self.delta, self.n())
    }

    /// φ̌ₙ(u): φ̂ₙ(u) when it clears the floor, the floor itself otherwise.
    pub fn log_truncated_cf(&self, u: f64, cfg: &TruncationConfig) -> Result<Complex64> {
        let floor = log_floor(self.n(), u, cfg.kappa, cfg.delta)?;
        Ok(log_truncated_from(self.ecf(u), floor))
    }

    /// Max over `grid` of w(u)|φ̂ₙ(u) − φ_Δ(u)|.
    pub fn uniform_deviation_stat(&self, model: &LevyModel, grid: &[f64], delta: f64) -> f64 {
        grid.iter()
            .map(|&u| weight(u, delta) * (self.ecf(u) - model.char_fn(u)).norm())
            .fold(0.0, f64::max)
    }
}

/// w(u) = (log(e + |u|))^{−1/2−δ}.
pub fn weight(u: f64, delta: f64) -> f64 {
    (std::f64::consts::E + u.abs()).ln().powf(-0.5 - delta)
}

pub fn neumann_inverse_from(phi_hat: Complex64, delta: f64, n: usize) -> Complex64 {
    let norm = phi_hat.norm();
    if norm > 0.0 && norm >= (delta * n as f64).powf(-0.5) {
        phi_hat.inv()
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Floor κ (log n)^{1/2} w(u)^{−1} n^{−1/2}.
pub fn log_floor(n: usize, u: f64, kappa: f64, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let nf = n as f64;
    Ok(kappa * nf.ln().sqrt() / (weight(u, delta) * nf.sqrt()))
}

pub fn log_truncated_from(phi_hat: Complex64, floor: f64) -> Complex64 {
    if phi_hat.norm() >= floor {
        phi_hat
    } else {
        Complex64::new(floor, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InverseVariant {
    NeumannIndicator,
    LogTruncated,
}

impl InverseVariant {
    pub fn label(&self) -> &'static str {
        match self {
            InverseVariant::NeumannIndicator => "neumann",
            InverseVariant::LogTruncated => "log_truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationConfig {
    pub kappa: f64,
    /// Exponent δ of the weight function.
    pub delta: f64,
    pub gamma: f64,
    pub variant: InverseVariant,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        let c1: f64 = 1.0;
        let gamma = 0.1;
        Self { kappa: 2.0 * ((4.0 * c1).sqrt() + gamma), delta: 0.25, gamma, variant: InverseVariant::LogTruncated }
    }
}

impl TruncationConfig {
    pub fn neumann() -> Self {
        Self { variant: InverseVariant::NeumannIndicator, ..Self::default() }
    }

    pub fn with_variant(self, variant: InverseVariant) -> Self {
        Self { variant, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("delta", self.delta), ("gamma", self.gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

const BLOCK: usize = 256;

/// Σ_k w_k e^{i j·step·x_k} for j = 0..len.
///
/// Grid points are processed in blocks of 256. Each block starts from exact
/// `sin_cos` values and advances by complex rotation, so rounding drift stays
/// below 256 ulps. Sums within a block run in a fixed lane order; the result
/// is bit-identical for every thread count.
pub fn grid_sums(xs: &[f64], weights: &[f64], step: f64, len: usize) -> Vec<Complex64> {
    debug_assert_eq!(xs.len(), weights.len());
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 || xs.is_empty() {
        return out;
    }
    let (rot_re, rot_im): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .map(|&x| {
            let (s, c) = (step * x).sin_cos();
            (c, s)
        })
        .unzip();
    par::for_each_chunk_mut(&mut out, BLOCK, |block, chunk| {
        let j0 = block * BLOCK;
        let mut cr = Vec::with_capacity(xs.len());
        let mut ci = Vec::with_capacity(xs.len());
        for &x in xs {
            let (s, c) = (j0 as f64 * step * x).sin_cos();
            cr.push(c);
            ci.push(s);
        }
        for slot in chunk.iter_mut() {
            *slot = rotate_accumulate(&mut cr, &mut ci, &rot_re, &rot_im, weights);
        }
    });
    out
}

#[inline]
fn rotate_accumulate(cr: &mut [f64], ci: &mut [f64], rr: &[f64], ri: &[f64], w: &[f64]) -> Complex64 {
    const LANES: usize = 4;
    let n = cr.len();
    let split = n - n % LANES;
    let mut acc_r = [0.0f64; LANES];
    let mut acc_i = [0.0f64; LANES];
    let (cr_main, cr_tail) = cr.split_at_mut(split);
    let (ci_main, ci_tail) = ci.split_at_mut(split);
    for ((((a, b), p), q), wt) in cr_main
        .chunks_exact_mut(LANES)
        .zip(ci_main.chunks_exact_mut(LANES))
        .zip(rr[..split].chunks_exact(LANES))
        .zip(ri[..split].chunks_exact(LANES))
        .zip(w[..split].chunks_exact(LANES))
    {
        for l in 0..LANES {
            let (x, y) = (a[l], b[l]);
            acc_r[l] += wt[l] * x;
            acc_i[l] += wt[l] * y;
            a[l] = x * p[l] - y * q[l];
            b[l] = x * q[l] + y * p[l];
        }
    }
    let mut sr = (acc_r[0] + acc_r[1]) + (acc_r[2] + acc_r[3]);
    let mut si = (acc_i[0] + acc_i[1]) + (acc_i[2] + acc_i[3]);
    for (t, (a, b)) in cr_tail.iter_mut().zip(ci_tail.iter_mut()).enumerate() {
        let k = split + t;
        let (x, y) = (*a, *b);
        sr += w[k] * x;
        si += w[k] * y;
        *a = x * rr[k] - y * ri[k];
        *b = x * ri[k] + y * rr[k];
    }
    Complex64::new(sr, si)
}

/// φ̂ₙ and φ̂′ₙ tabulated on the half grid u_j = j·step, j = 0..len.
/// Values at −u_j follow from φ̂(−u) = conj φ̂(u) and φ̂′(−u) = −conj φ̂′(u).
#[derive(Debug, Clone)]
pub struct EcfTable {
    step: f64,
    n: usize,
    delta: f64,
    phi: Vec<Complex64>,
    dphi: Vec<Complex64>,
}

impl EcfTable {
    /// Tabulates φ̂ₙ on `len` points and φ̂′ₙ on the first `deriv_len` of them.
    pub fn build(sample: &SplitSample, step: f64, len: usize, deriv_len: usize) -> Self {
        let n = sample.n();
        let ones = vec![1.0; n];
        let inv_n = 1.0 / n as f64;
        let mut phi: Vec<Complex64> = grid_sums(sample.ecf_half(), &ones, step, len)
            .into_iter()
            .map(|z| z * inv_n)
            .collect();
        if let Some(first) = phi.first_mut() {
            *first = Complex64::new(1.0, 0.0);
        }
        let dphi = grid_sums(sample.deriv_half(), sample.deriv_half(), step, deriv_len.min(len))
            .into_iter()
            .map(|z| Complex64::new(-z.im, z.re) * inv_n)
            .collect();
        Self { step, n, delta: sample.delta(), phi, dphi }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// φ̂ₙ(j·step) for signed j.
    pub fn phi(&self, j: isize) -> Complex64 {
        let v = self.phi[j.unsigned_abs()];
        if j < 0 { v.conj() } else { v }
    }

    /// φ̂′ₙ(j·step) for signed j; zero beyond the tabulated derivative range.
    pub fn dphi(&self, j: isize) -> Complex64 {
        match self.dphi.get(j.unsigned_abs()) {
            Some(v) if j < 0 => -v.conj(),
            Some(v) => *v,
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn phi_half(&self) -> &[Complex64] {
        &self.phi
    }

    /// Max over the tabulated grid (and its mirror) of w(u)|φ̂ₙ(u) − φ_Δ(u)|.
    pub fn weighted_deviation(&self, model: &LevyModel, delta: f64) -> f64 {
        self.phi
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let u = j as f64 * self.step;
                weight(u, delta) * (p - model.char_fn(u)).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::JumpLaw;
    use std::f64::consts::PI;

    fn zeros(n: usize) -> SplitSample {
        SplitSample::mirrored(vec![0.0; n], 1.0).unwrap()
    }

    #[test]
    fn split_sample_validation() {
        assert!(SplitSample::new(vec![], vec![], 1.0).is_err());
        assert!(SplitSample::new(vec![1.0], vec![1.0, 2.0], 1.0).is_err());
        assert!(SplitSample::new(vec![1.0], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn ecf_examples() {
        assert_eq!(zeros(4).ecf(2.3), Complex64::new(1.0, 0.0));
        let s = SplitSample::new(vec![1.0, -1.0], vec![1.0, -1.0], 1.0).unwrap();
        assert_eq!(s.ecf(0.0), Complex64::new(1.0, 0.0));
        assert!(s.ecf(PI / 2.0).norm() < 1e-15);
        assert!(s.ecf_deriv(PI).norm() < 1e-15);
        let d = SplitSample::new(vec![0.0], vec![2.0], 1.0).unwrap();
        assert_eq!(d.ecf_deriv(0.0), Complex64::new(0.0, 2.0));
        assert_eq!(zeros(3).ecf_deriv(1.7), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(0.0, 0.3), 1.0);
        let e = std::f64::consts::E;
        assert!((weight(e * e - e, 0.5) - 0.5).abs() < 1e-15);
        let w: Vec<f64> = [10.0, 1e3, 1e6].iter().map(|&u| weight(u, 0.25)).collect();
        assert!(w[0] > w[1] && w[1] > w[2] && w[2] > 0.0);
        assert_eq!(weight(-7.0, 0.25), weight(7.0, 0.25));
    }

    #[test]
    fn neumann_examples() {
        assert_eq!(zeros(4).neumann_inverse(1.0), Complex64::new(1.0, 0.0));
        let s = SplitSample::new(vec![1.0, -1.0], vec![1.0, -1.0], 1.0).unwrap();
        assert_eq!(s.neumann_inverse(PI / 2.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn log_truncated_examples() {
        let cfg = TruncationConfig { kappa: 1.0, delta: 0.25, ..Default::default() };
        assert_eq!(zeros(100).log_truncated_cf(0.0, &cfg).unwrap(), Complex64::new(1.0, 0.0));
        let floor = log_floor(100, 0.0, 1.0, 0.25).unwrap();
        assert!((floor - 100f64.ln().sqrt() / 10.0).abs() < 1e-15);
        let s = SplitSample::new(vec![1.0, -1.0], vec![1.0, -1.0], 1.0).unwrap();
        let v = s.log_truncated_cf(PI / 2.0, &cfg).unwrap();
        assert_eq!(v, Complex64::new(log_floor(2, PI / 2.0, 1.0, 0.25).unwrap(), 0.0));
        let one = SplitSample::new(vec![1.0], vec![1.0], 1.0).unwrap();
        assert!(matches!(one.log_truncated_cf(0.0, &cfg), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn grid_sums_match_direct_evaluation() {
        let model = LevyModel::compound_poisson(1.0, JumpLaw::Exponential { scale: 1.0 }, 1.0).unwrap();
        let s = model.sample_increments(37, 5).unwrap();
        let step = 0.013;
        let table = EcfTable::build(&s, step, 700, 600);
        for j in [-599isize, -300, -1, 0, 1, 255, 256, 257, 599] {
            let u = j as f64 * step;
            assert!((table.phi(j) - s.ecf(u)).norm() < 1e-13, "j={j}");
            assert!((table.dphi(j) - s.ecf_deriv(u)).norm() < 1e-13, "j={j}");
        }
        assert_eq!(table.dphi(650), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn deviation_stat_zero_measure() {
        let m = LevyModel::zero(1.0).unwrap();
        let s = m.sample_increments(10, 1).unwrap();
        let grid: Vec<f64> = (-50..=50).map(|j| j as f64 * 0.1).collect();
        assert_eq!(s.uniform_deviation_stat(&m, &grid, 0.25), 0.0);
    }
}
