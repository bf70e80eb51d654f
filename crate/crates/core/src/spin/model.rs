use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    sample_iid, DeterminantalSampler, GaussianLevelSetSampler, IsingSampler, SpinConfiguration,
    Window, BETA_CRITICAL_2D,
};
use crate::error::{Error, Result};

fn default_sweeps() -> u32 {
    200
}

fn default_burn_in() -> u32 {
    2000
}

/// Parameters of a spin model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Iid {
        p: f64,
    },
    GaussianLevelSet {
        a: f64,
        u: f64,
    },
    Ising {
        beta: f64,
        h: f64,
        #[serde(default = "default_sweeps")]
        sweeps: u32,
        #[serde(default = "default_burn_in")]
        burn_in: u32,
        /// User assertion that `beta < beta_c` when `h = 0`.
        #[serde(default)]
        high_temperature: bool,
    },
    Determinantal {
        kappa: f64,
        alpha: f64,
    },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Iid { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::param("model.p", format!("{p} is outside [0, 1]")));
                }
            }
            ModelSpec::GaussianLevelSet { a, u } => {
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::param("model.a", format!("{a} must be positive")));
                }
                if !u.is_finite() {
                    return Err(Error::param("model.u", "level must be finite"));
                }
            }
            ModelSpec::Ising {
                beta,
                h,
                sweeps,
                burn_in,
                high_temperature,
            } => {
                if !(beta > 0.0) || !beta.is_finite() {
                    return Err(Error::param("model.beta", format!("{beta} must be positive")));
                }
                if !h.is_finite() {
                    return Err(Error::param("model.h", "field must be finite"));
                }
                if sweeps == 0 {
                    return Err(Error::param("model.sweeps", "must be positive"));
                }
                if burn_in == 0 {
                    return Err(Error::param("model.burn_in", "must be positive"));
                }
                if h == 0.0 && !high_temperature {
                    return Err(Error::param(
                        "model.high_temperature",
                        "with h = 0 the clustering regime requires asserting beta < beta_c",
                    ));
                }
            }
            ModelSpec::Determinantal { kappa, alpha } => {
                if !(kappa > 0.0 && kappa <= 1.0) {
                    return Err(Error::param("model.kappa", format!("{kappa} is outside (0, 1]")));
                }
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::param("model.alpha", format!("{alpha} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Whether samples are only approximately distributed (MCMC).
    pub fn is_approximate(&self) -> bool {
        matches!(self, ModelSpec::Ising { .. })
    }

    /// Build the per-window sampler (factorizations etc. happen once here).
    pub fn prepare(&self, window: &Arc<Window>) -> Result<PreparedModel> {
        self.validate()?;
        Ok(match *self {
            ModelSpec::Iid { p } => PreparedModel::Iid {
                window: window.clone(),
                p,
            },
            ModelSpec::GaussianLevelSet { a, u } => {
                PreparedModel::GaussianLevelSet(GaussianLevelSetSampler::new(window.clone(), a, u)?)
            }
            ModelSpec::Ising {
                beta,
                h,
                sweeps,
                burn_in,
                high_temperature,
            } => {
                if h == 0.0 && high_temperature && window.kind().lattice_dim() == Some(2) && beta >= BETA_CRITICAL_2D {
                    return Err(Error::param(
                        "model.beta",
                        format!("{beta} is not below the 2D critical value {BETA_CRITICAL_2D:.6}"),
                    ));
                }
                PreparedModel::Ising(IsingSampler::new(window.clone(), beta, h, sweeps, burn_in)?)
            }
            ModelSpec::Determinantal { kappa, alpha } => {
                PreparedModel::Determinantal(DeterminantalSampler::new(window.clone(), kappa, alpha)?)
            }
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Iid { p } => write!(f, "iid(p={p})"),
            ModelSpec::GaussianLevelSet { a, u } => write!(f, "gaussian_level_set(a={a},u={u})"),
            ModelSpec::Ising {
                beta,
                h,
                sweeps,
                burn_in,
                ..
            } => write!(f, "ising(beta={beta},h={h},sweeps={sweeps},burn_in={burn_in})"),
            ModelSpec::Determinantal { kappa, alpha } => {
                write!(f, "determinantal(kappa={kappa},alpha={alpha})")
            }
        }
    }
}

/// A model bound to a window, ready to draw replicates.
#[derive(Debug, Clone)]
pub enum PreparedModel {
    Iid { window: Arc<Window>, p: f64 },
    GaussianLevelSet(GaussianLevelSetSampler),
    Ising(IsingSampler),
    Determinantal(DeterminantalSampler),
}

impl PreparedModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        match self {
            PreparedModel::Iid { window, p } => sample_iid(window, *p, rng),
            PreparedModel::GaussianLevelSet(s) => s.sample(rng),
            PreparedModel::Ising(s) => s.sample(rng),
            PreparedModel::Determinantal(s) => s.sample(rng),
        }
    }

    pub fn window(&self) -> &Arc<Window> {
        match self {
            PreparedModel::Iid { window, .. } => window,
            PreparedModel::GaussianLevelSet(s) => s.window(),
            PreparedModel::Ising(s) => s.window(),
            PreparedModel::Determinantal(s) => s.window(),
        }
    }

    /// Success probability when the model is i.i.d.
    pub fn iid_p(&self) -> Option<f64> {
        match self {
            PreparedModel::Iid { p, .. } => Some(*p),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tagged_models() {
        let m: ModelSpec = toml::from_str("kind = \"iid\"\np = 0.25").unwrap();
        assert_eq!(m, ModelSpec::Iid { p: 0.25 });
        let m: ModelSpec = toml::from_str("kind = \"ising\"\nbeta = 0.2\nh = 0.5").unwrap();
        assert!(matches!(m, ModelSpec::Ising { sweeps: 200, burn_in: 2000, .. }));
        assert!(toml::from_str::<ModelSpec>("kind = \"iid\"\np = 0.25\nq = 1").is_err());
    }

    #[test]
    fn validation_ranges() {
        assert!(ModelSpec::Iid { p: 1.5 }.validate().is_err());
        let ising = ModelSpec::Ising {
            beta: 0.2,
            h: 0.0,
            sweeps: 10,
            burn_in: 10,
            high_temperature: false,
        };
        assert!(ising.validate().is_err());
        assert!(ModelSpec::Determinantal { kappa: 1.2, alpha: 1.0 }.validate().is_err());
        assert!(ModelSpec::GaussianLevelSet { a: -1.0, u: 0.0 }.validate().is_err());
    }
}
