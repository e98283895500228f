//! Enhancement tunables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vibration::LambdaParam;

/// Probe gammas for fitting the lightness-gain curve: at least four,
/// strictly increasing, all in `(0, 5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GammaSequence(Vec<f64>);

impl GammaSequence {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "gamma sequence needs at least four values, got {}",
                gammas.len()
            )));
        }
        if gammas.iter().any(|&g| !(g > 0.0 && g <= 5.0)) {
            return Err(Error::InvalidParameter(format!(
                "gamma values must lie in (0, 5], got {gammas:?}"
            )));
        }
        if gammas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "gamma sequence must be strictly increasing, got {gammas:?}"
            )));
        }
        Ok(Self(gammas))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Default for GammaSequence {
    fn default() -> Self {
        Self(vec![0.3, 0.8, 1.3, 1.8])
    }
}

impl TryFrom<Vec<f64>> for GammaSequence {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<GammaSequence> for Vec<f64> {
    fn from(value: GammaSequence) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnhanceConfig {
    /// Joint factor of the energy model.
    pub lambda: LambdaParam,
    pub gammas: GammaSequence,
    /// Target mean-lightness gain of the global stage.
    pub dv_star: f64,
    /// Lightness threshold separating dark (weight 1) from bright (weight 0).
    pub seg_threshold: f64,
    /// Downsampling rate applied before segmentation.
    pub downsample: usize,
    /// Internal subsampling rate of the fast guided filter.
    pub gf_subsample: usize,
    /// Guided filter regularizer.
    pub eta: f64,
    /// Working range the selected gamma is clamped to.
    pub gamma_clamp: (f64, f64),
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            lambda: LambdaParam::default(),
            gammas: GammaSequence::default(),
            dv_star: 0.25,
            seg_threshold: 0.5,
            downsample: 2,
            gf_subsample: 10,
            eta: 0.04,
            gamma_clamp: (0.1, 5.0),
        }
    }
}

impl EnhanceConfig {
    /// Checks the fields the type system does not already guarantee.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dv_star > 0.0 && self.dv_star < 1.0) {
            return bad(format!("dv_star must lie in (0, 1), got {}", self.dv_star));
        }
        if !(self.seg_threshold > 0.0 && self.seg_threshold < 1.0) {
            return bad(format!(
                "segmentation threshold must lie in (0, 1), got {}",
                self.seg_threshold
            ));
        }
        if self.downsample == 0 {
            return bad("downsample rate must be a positive integer".into());
        }
        if self.gf_subsample == 0 {
            return bad("guided filter subsample rate must be a positive integer".into());
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        let (lo, hi) = self.gamma_clamp;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return bad(format!(
                "gamma clamp must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            ));
        }
        Ok(())
    }
}
