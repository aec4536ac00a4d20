//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` and blank lines are ignored; unknown keys are an
//! error so typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::adaptive::{LambdaGrouping, PenaltyConfig};
use crate::ecf::InverseVariant;
use crate::error::{Error, Result};
use crate::estimator::{QuadRule, QuadratureSpec, RateSpec, Regime};
use crate::functionals::{Functional, FunctionalKind, Kernel};
use crate::models::{JumpLaw, LevyModel, ModelKind, VarianceWindow};

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: LevyModel,
    pub functional: Functional,
    pub kernel: Kernel,
    pub n_list: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub penalty: PenaltyConfig,
    pub quad: QuadratureSpec,
    /// Inverse used for the fixed-bandwidth risk surface and rate fits;
    /// adaptive selection always uses the log-truncated inverse.
    pub inverse: InverseVariant,
    pub window: VarianceWindow,
    /// Smoothness a of μ for the theoretical exponent, if known.
    pub rate: Option<RateSpec>,
    pub adaptive: bool,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Minimal configuration around a model/functional/kernel triple.
    pub fn new(model: LevyModel, functional: Functional, kernel: Kernel) -> Result<Self> {
        let window = VarianceWindow::default();
        let penalty = PenaltyConfig::for_model(&model, &window)?;
        Ok(Self {
            model,
            functional,
            kernel,
            n_list: vec![1000],
            m_grid: (1..=16).collect(),
            replications: 100,
            seed: 1,
            penalty,
            quad: QuadratureSpec::default(),
            inverse: InverseVariant::NeumannIndicator,
            window,
            rate: None,
            adaptive: true,
            out_dir: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_list must be nonempty and strictly ascending".into()));
        }
        if self.n_list[0] < 2 {
            return Err(Error::Config("sample sizes must be at least 2".into()));
        }
        crate::adaptive::validate_grid(&self.m_grid)?;
        self.penalty.validate()?;
        self.quad.validate()?;
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = Pairs::parse(text)?;
        let cfg = build(&mut kv)?;
        kv.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Pairs {
    map: BTreeMap<String, String>,
}

impl Pairs {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_string();
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse_num(&v).map(Some).ok_or_else(|| Error::Config(format!("{key}: cannot parse {v:?}"))),
        }
    }

    fn num_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key).as_deref() {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(Error::Config(format!("{key}: expected true/false, got {v:?}"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            return Err(Error::Config(format!("unknown key {k}")));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Option<T> {
    v.replace('_', "").parse().ok()
}

/// Parses `1..64`, `1,2,4,8` or tokens like `2^9`.
fn parse_list(key: &str, v: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("{key}: cannot parse list {v:?}"));
    let token = |t: &str| -> Result<usize> {
        let t = t.trim();
        if let Some((b, e)) = t.split_once('^') {
            let b: usize = parse_num(b).ok_or_else(bad)?;
            let e: u32 = parse_num(e).ok_or_else(bad)?;
            b.checked_pow(e).ok_or_else(bad)
        } else {
            parse_num(t).ok_or_else(bad)
        }
    };
    if let Some((lo, hi)) = v.split_once("..") {
        let (lo, hi) = (token(lo)?, token(hi)?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    v.split(',').map(token).collect()
}

fn build(kv: &mut Pairs) -> Result<ExperimentConfig> {
    let step = kv.num_or("sampling_step", 1.0)?;
    let model_name = kv.take("model").unwrap_or_else(|| "compound_poisson".into());
    let kind = match model_name.as_str() {
        "zero" => ModelKind::ZeroMeasure,
        "compound_poisson" => {
            let jump = match kv.take("jump").as_deref().unwrap_or("exponential") {
                "exponential" => JumpLaw::Exponential { scale: kv.num_or("jump_scale", 1.0)? },
                "gamma" => JumpLaw::Gamma { shape: kv.num_or("jump_shape", 2.0)?, scale: kv.num_or("jump_scale", 1.0)? },
                "uniform" => JumpLaw::Uniform { lo: kv.num_or("jump_lo", 0.0)?, hi: kv.num_or("jump_hi", 1.0)? },
                other => return Err(Error::Config(format!("unknown jump law {other}"))),
            };
            ModelKind::CompoundPoisson { intensity: kv.num_or("intensity", 1.0)?, jump }
        }
        "gamma" => ModelKind::GammaSubordinator { shape: kv.num_or("shape", 1.0)?, scale: kv.num_or("scale", 1.0)? },
        "bilateral_gamma" => ModelKind::BilateralGamma {
            shape_pos: kv.num_or("shape_pos", 1.0)?,
            scale_pos: kv.num_or("scale_pos", 1.0)?,
            shape_neg: kv.num_or("shape_neg", 1.0)?,
            scale_neg: kv.num_or("scale_neg", 1.0)?,
        },
        other => return Err(Error::Config(format!("unknown model {other}"))),
    };
    let model = LevyModel::new(kind, step)?;

    let fkind = match kv.take("functional").as_deref().unwrap_or("gaussian") {
        "zero" => FunctionalKind::Zero,
        "gaussian" => FunctionalKind::Gaussian { center: kv.num_or("center", 0.0)?, width: kv.num_or("width", 1.0)? },
        "bump" => FunctionalKind::CompactBump { lo: kv.num_or("supp_lo", 0.5)?, hi: kv.num_or("supp_hi", 1.5)? },
        "dirac" => FunctionalKind::DiracPoint { x0: kv.num_or("x0", 1.0)? },
        "dirac_deriv" => FunctionalKind::DiracDerivative { x0: kv.num_or("x0", 1.0)?, order: kv.num_or("order", 1)? },
        other => return Err(Error::Config(format!("unknown functional {other}"))),
    };
    let functional = Functional::new(fkind)?;
    let kernel = match kv.take("kernel").as_deref().unwrap_or("sinc") {
        "sinc" => Kernel::sinc(),
        "taper" => Kernel::taper(kv.num_or("taper_power", 2.0)?)?,
        other => return Err(Error::Config(format!("unknown kernel {other}"))),
    };

    let mut cfg = ExperimentConfig::new(model, functional, kernel)?;
    if let Some(v) = kv.take("n_list") {
        cfg.n_list = parse_list("n_list", &v)?;
    }
    if let Some(v) = kv.take("m_grid") {
        cfg.m_grid = parse_list("m_grid", &v)?;
    }
    cfg.replications = kv.num_or("replications", cfg.replications)?;
    cfg.seed = kv.num_or("seed", cfg.seed)?;
    cfg.adaptive = kv.flag("adaptive", true)?;
    cfg.out_dir = kv.take("out_dir").map(PathBuf::from);

    cfg.window.universal_c = kv.num_or("universal_c", cfg.window.universal_c)?;
    cfg.window.window = kv.num_or("variance_window", cfg.window.window)?;

    let mut q = QuadratureSpec::default();
    q.nodes = kv.num_or("quad_nodes", q.nodes)?;
    q.rule = match kv.take("quad_rule").as_deref().unwrap_or("trapezoid") {
        "trapezoid" => QuadRule::Trapezoid,
        other => return Err(Error::Config(format!("unknown quadrature rule {other}"))),
    };
    q.support_scale = kv.num_or("support_scale", q.support_scale)?;
    q.tolerance = kv.num_or("quad_tol", q.tolerance)?;
    q.sample_tolerance = kv.num_or("quad_sample_tol", q.sample_tolerance)?;
    q.max_nodes = kv.num_or("quad_max_nodes", q.max_nodes)?;
    q.check = kv.flag("quad_check", q.check)?;
    cfg.quad = q;

    cfg.inverse = match kv.take("inverse").as_deref().unwrap_or("neumann") {
        "neumann" => InverseVariant::NeumannIndicator,
        "log_truncated" => InverseVariant::LogTruncated,
        other => return Err(Error::Config(format!("unknown inverse {other}"))),
    };

    // Penalty constants: κ and c^pen follow c1 and γ unless given explicitly.
    let (c1m, c2m) = cfg.model.variance_constants(&cfg.window);
    let c1 = kv.num_or("c1", 1.0)?;
    let gamma = kv.num_or("gamma", 0.1)?;
    let delta = kv.num_or("delta", 0.25)?;
    let eta = kv.num_or("eta", cfg.model.default_eta())?;
    let cbar1 = match kv.take("cbar1").as_deref() {
        None => if c1m > 0.0 { c1m } else { f64::MIN_POSITIVE },
        Some("inf") => f64::INFINITY,
        Some(v) => parse_num(v).ok_or_else(|| Error::Config(format!("cbar1: cannot parse {v:?}")))?,
    };
    let cbar2 = kv.num_or("cbar2", if c2m > 0.0 { c2m } else { f64::MIN_POSITIVE })?;
    let mut pen = PenaltyConfig::new(c1, gamma, delta, eta, cbar1, cbar2)?;
    pen.kappa = kv.num_or("kappa", pen.kappa)?;
    pen.cpen = kv.num_or("cpen", pen.cpen)?;
    pen.positive_part = kv.flag("positive_part", false)?;
    pen.grouping = match kv.take("lambda_grouping").as_deref().unwrap_or("squared_loglog") {
        "squared_loglog" => LambdaGrouping::SquaredLogLog,
        "log_of_squared_log" => LambdaGrouping::LogOfSquaredLog,
        other => return Err(Error::Config(format!("unknown lambda grouping {other}"))),
    };
    cfg.penalty = pen;

    if let Some(a) = kv.num::<f64>("mu_smoothness")? {
        let decay = cfg.model.decay_profile();
        let regime = match kv.take("regime").as_deref().unwrap_or("sobolev") {
            "sobolev" => Regime::Sobolev,
            "hoelder" | "holder" => Regime::Hoelder,
            other => return Err(Error::Config(format!("unknown regime {other}"))),
        };
        cfg.rate = Some(RateSpec {
            a,
            s: kv.num_or("f_index", cfg.functional.smoothness())?,
            beta: kv.num_or("beta", decay.beta)?,
            rho: kv.num_or("rho", decay.rho)?,
            delta: step,
            c1_finite: cfg.model.c1_is_finite(),
            regime,
        });
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("x", "1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_list("x", "2^9, 2^10,4096").unwrap(), vec![512, 1024, 4096]);
        assert!(parse_list("x", "4..1").is_err());
        assert!(parse_list("x", "a,b").is_err());
    }

    #[test]
    fn parse_full_config() {
        let text = "# demo\nmodel = gamma\nshape = 2\nfunctional = dirac\nx0 = 0.5\nkernel = taper\ntaper_power = 3\n\
                    n_list = 2^9..2^9\nm_grid = 1,2,4\nreplications = 7\nseed = 99\nquad_nodes = 256\ninverse = log_truncated\n\
                    positive_part = true\nmu_smoothness = 1.5\nregime = hoelder\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.model.kind(), ModelKind::GammaSubordinator { shape: 2.0, scale: 1.0 });
        assert_eq!(c.m_grid, vec![1, 2, 4]);
        assert_eq!(c.n_list, vec![512]);
        assert_eq!(c.replications, 7);
        assert_eq!(c.quad.nodes, 256);
        assert!(c.penalty.positive_part);
        assert_eq!(c.inverse, InverseVariant::LogTruncated);
        let r = c.rate.unwrap();
        assert_eq!((r.a, r.s, r.beta, r.regime), (1.5, 0.0, 2.0, Regime::Hoelder));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("modle = gamma").is_err());
        assert!(ExperimentConfig::parse("model = gamma\nmodel = zero").is_err());
        assert!(ExperimentConfig::parse("replications = 0").is_err());
        assert!(ExperimentConfig::parse("n_list = 100, 50").is_err());
        assert!(ExperimentConfig::parse("no equals sign").is_err());
        assert!(ExperimentConfig::parse("kappa = 1").is_err());
    }
}
