//! Energy model of a critically damped membrane vibration.
//!
//! A photon stimulus of intensity `m` excites a membrane of stiffness `k`.
//! At critical damping the displacement is `s(t) = e^(-beta t) (c1 + c2 t)`
//! with `beta = sqrt(k / m)`. The energy spent over one vibration splits into
//! a repulsive part that does not depend on the stimulus and a perceived
//! stimulation part; dividing the latter over the natural period gives the
//! cycle stimulation energy.
//!
//! Fixing `c1 = 1 / (2 sqrt(2) pi)`, `c2 = sqrt(2 (lambda - 1))` and
//! `k = 4 pi^2 lambda^2 / (lambda - 1)` collapses the constants into a single
//! joint factor `lambda` in `(1, 2]` and normalizes the stimulation energy so
//! that it maps intensity `0 -> 0` and `1 -> 1`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the vibration model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VibrationParams {
    pub c1: f64,
    pub c2: f64,
    /// Membrane stiffness.
    pub k: f64,
    /// Stimulus intensity.
    pub m: f64,
    /// Damping rate.
    pub beta: f64,
}

impl VibrationParams {
    /// Parameters at critical damping, `beta = sqrt(k / m)`.
    ///
    /// For `m = 0` the damping rate is infinite; the energies stay finite.
    pub fn critical(c1: f64, c2: f64, k: f64, m: f64) -> Result<Self> {
        let p = Self {
            c1,
            c2,
            k,
            m,
            beta: (k / m).sqrt(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with an explicit damping rate (not necessarily critical).
    pub fn with_damping(c1: f64, c2: f64, k: f64, m: f64, beta: f64) -> Result<Self> {
        let p = Self { c1, c2, k, m, beta };
        p.validate()?;
        Ok(p)
    }

    /// Rebinds the stimulus intensity, keeping critical damping.
    pub fn with_stimulus(self, m: f64) -> Self {
        Self {
            m,
            beta: (self.k / m).sqrt(),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.c1, self.c2, self.k, self.m]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.k > 0.0) || !(self.c2 >= 0.0) || !(self.m >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "vibration parameters need finite values with k > 0, c2 >= 0, m >= 0; got {self:?}"
            )));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "damping rate must be non-negative, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Natural angular frequency `sqrt(k / m)`; only meaningful for `m > 0`.
    pub fn natural_frequency(&self) -> f64 {
        (self.k / self.m).sqrt()
    }
}

/// The joint factor `lambda` in `(1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LambdaParam(f64);

impl LambdaParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 1.0 && lambda <= 2.0 {
            Ok(Self(lambda))
        } else {
            Err(Error::InvalidParameter(format!(
                "lambda must lie in (1, 2], got {lambda}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for LambdaParam {
    fn default() -> Self {
        Self(2.0)
    }
}

impl TryFrom<f64> for LambdaParam {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<LambdaParam> for f64 {
    fn from(value: LambdaParam) -> Self {
        value.0
    }
}

pub fn displacement(t: f64, p: &VibrationParams) -> f64 {
    (-p.beta * t).exp() * (p.c1 + p.c2 * t)
}

/// Time derivative of [`displacement`].
pub fn velocity(t: f64, p: &VibrationParams) -> f64 {
    let decay = (-p.beta * t).exp();
    p.c2 * decay - p.beta * decay * (p.c1 + p.c2 * t)
}

/// Energy the membrane spends rejecting the stimulus, `k c1^2 / 2`.
pub fn repulsive_energy(p: &VibrationParams) -> f64 {
    0.5 * p.k * p.c1 * p.c1
}

/// Perceived stimulation energy `c1 c2 sqrt(k m) - c2^2 m / 2`.
pub fn stimulation_energy_raw(p: &VibrationParams) -> f64 {
    p.c1 * p.c2 * (p.k * p.m).sqrt() - 0.5 * p.c2 * p.c2 * p.m
}

/// Stimulation energy per natural period,
/// `c1 c2 k / (2 pi) - c2^2 sqrt(k m) / (4 pi)`.
///
/// Total in `m >= 0`. It equals `natural_frequency / (2 pi)` times
/// [`stimulation_energy_raw`] only for `m > 0`, where the frequency exists.
pub fn cycle_energy_raw(p: &VibrationParams) -> f64 {
    p.c1 * p.c2 * p.k / (2.0 * PI) - p.c2 * p.c2 * (p.k * p.m).sqrt() / (4.0 * PI)
}

/// Normalized constants for a joint factor. The stimulus `m` is left at 0;
/// bind it with [`VibrationParams::with_stimulus`].
pub fn lambda_to_params(lambda: LambdaParam) -> VibrationParams {
    let l = lambda.get();
    let k = 4.0 * PI * PI * l * l / (l - 1.0);
    VibrationParams {
        c1: 1.0 / (2.0 * SQRT_2 * PI),
        c2: (2.0 * (l - 1.0)).sqrt(),
        k,
        m: 0.0,
        beta: f64::INFINITY,
    }
}

/// Normalized stimulation energy `lambda sqrt(i) + (1 - lambda) i`.
#[inline]
pub fn epsilon_s(lambda: LambdaParam, i: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&i), "intensity {i} outside [0, 1]");
    let l = lambda.get();
    l * i.sqrt() + (1.0 - l) * i
}

/// Normalized cycle energy `lambda^2 / sqrt(lambda - 1) - lambda sqrt((lambda - 1) i)`.
///
/// Strictly decreasing in `i` and positive on `[0, 1]`.
#[inline]
pub fn cycle_energy(lambda: LambdaParam, i: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&i), "intensity {i} outside [0, 1]");
    let l = lambda.get();
    l * l / (l - 1.0).sqrt() - l * ((l - 1.0) * i).sqrt()
}
