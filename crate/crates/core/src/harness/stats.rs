//! Streaming moments and log-log slope fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Welford mean/variance accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MeanVar {
    pub count: usize,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &MeanVar) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Variance with divisor N.
    pub fn var_pop(&self) -> f64 {
        if self.count == 0 { 0.0 } else { (self.m2 / self.count as f64).max(0.0) }
    }

    /// Variance with divisor N − 1.
    pub fn var_sample(&self) -> f64 {
        if self.count < 2 { 0.0 } else { (self.m2 / (self.count - 1) as f64).max(0.0) }
    }

    /// Mean of squares, mean² + population variance.
    pub fn mean_square(&self) -> f64 {
        self.mean * self.mean + self.var_pop()
    }
}

/// OLS slope of log(mse) on log(n) and its standard error.
pub fn fit_rate_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 {
        return Err(Error::InvalidParameter(format!("slope fit needs at least 4 points, got {}", points.len())));
    }
    if let Some(&(n, v)) = points.iter().find(|(n, v)| !(*v > 0.0 && v.is_finite() && *n > 0.0)) {
        return Err(Error::InvalidParameter(format!("slope fit needs positive finite values, got ({n}, {v})")));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    let stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0].iter().map(|&n| (n, 3.0 / n)).collect();
        let (s, e) = fit_rate_slope(&pts).unwrap();
        assert!((s + 1.0).abs() < 1e-12 && e < 1e-12);
        let flat: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, 0.2)).collect();
        assert!(fit_rate_slope(&flat).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(fit_rate_slope(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_rate_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
        assert!(fit_rate_slope(&[(2.0, 1.0); 4]).is_err());
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let pts: Vec<(f64, f64)> = (9..=14)
                .map(|k| {
                    let n = 2f64.powi(k);
                    let noise: f64 = rng.random_range(-1.0..1.0);
                    (n, n.powf(-0.6) * (1.0 + 0.05 * noise))
                })
                .collect();
            let (s, _) = fit_rate_slope(&pts).unwrap();
            assert!((s + 0.6).abs() < 0.05);
        }
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 * 0.37 - 3.0).collect();
        let mut all = MeanVar::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = MeanVar::default();
        let mut b = MeanVar::default();
        xs[..11].iter().for_each(|&x| a.push(x));
        xs[11..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count, all.count);
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.var_pop() - all.var_pop()).abs() < 1e-12);
    }
}
