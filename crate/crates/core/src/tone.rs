//! Global lightness enhancement.
//!
//! Each channel is mapped by an energy-weighted gamma curve
//! `C = I^g E(I) / (I_max^g E(I_max))`, where `E` is the normalized cycle
//! energy. Because `E` decreases with intensity, dark pixels gain more than
//! bright ones. The gamma `g` is selected per image: the lightness plane is
//! probed with a short gamma sequence, the resulting mean-lightness gains are
//! fitted with `dv = c + 1/(a g + b)` and the curve is inverted at the target
//! gain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::EnhanceConfig;
use crate::curve_fit::{self, CurveParams, FitProblem};
use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};
use crate::ops::rgb_to_v;
use crate::vibration::{cycle_energy, LambdaParam};

/// Gamma used when the lightness gain is flat in gamma and any choice is
/// equivalent.
pub const FLAT_CURVE_GAMMA: f64 = 1.0;

/// The per-pixel tone curve family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToneCurve {
    /// Gamma weighted by the cycle stimulation energy.
    CellEnergy(LambdaParam),
    /// Classic normalized power law `(I / I_max)^g`.
    PlainGamma,
}

impl ToneCurve {
    pub fn apply(&self, plane: &Plane, gamma: f64) -> Plane {
        match *self {
            ToneCurve::CellEnergy(lambda) => modified_gamma_map(plane, lambda, gamma),
            ToneCurve::PlainGamma => plain_gamma_map(plane, gamma),
        }
    }
}

/// Energy-weighted gamma correction of one plane, normalized at the plane
/// maximum and clamped to `[0, 1]`.
///
/// For small gammas the curve overshoots 1 below `I_max`; those samples are
/// clamped. An all-zero plane is returned unchanged.
pub fn modified_gamma_map(plane: &Plane, lambda: LambdaParam, gamma: f64) -> Plane {
    let curve = |i: f64| i.powf(gamma) * cycle_energy(lambda, i);
    normalized_map(plane, curve)
}

/// `(I / I_max)^gamma`; an all-zero plane is returned unchanged.
pub fn plain_gamma_map(plane: &Plane, gamma: f64) -> Plane {
    normalized_map(plane, |i: f64| i.powf(gamma))
}

fn normalized_map(plane: &Plane, curve: impl Fn(f64) -> f64) -> Plane {
    let max = plane.max();
    if !(max > 0.0) {
        return plane.clone();
    }
    let max = max.min(1.0);
    let norm = curve(max);
    plane.map(|i| (curve(i.clamp(0.0, 1.0)) / norm).clamp(0.0, 1.0))
}

/// Mean of the nonzero samples; 0 when there are none.
pub fn mean_nonzero_lightness(plane: &Plane) -> f64 {
    let (sum, count) = plane
        .as_slice()
        .iter()
        .filter(|&&v| v != 0.0)
        .fold((0.0, 0usize), |(s, n), &v| (s + v, n + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Lightness gain `mean_nonzero(map(v, g)) - mean_nonzero(v)` for each probe gamma.
pub fn lightness_gains(v_plane: &Plane, gammas: &[f64], curve: ToneCurve) -> Result<Vec<f64>> {
    let base = mean_nonzero_lightness(v_plane);
    if base == 0.0 {
        return Err(Error::EmptyLightness);
    }
    Ok(gammas
        .par_iter()
        .map(|&g| mean_nonzero_lightness(&curve.apply(v_plane, g)) - base)
        .collect())
}

/// Probes the lightness plane with the configured gammas and fits the
/// gain curve. Returns the curve and the measured gains.
pub fn perceive_curve(v_plane: &Plane, cfg: &EnhanceConfig) -> Result<(CurveParams, Vec<f64>)> {
    perceive_curve_with(
        v_plane,
        cfg.gammas.as_slice(),
        ToneCurve::CellEnergy(cfg.lambda),
    )
}

pub fn perceive_curve_with(
    v_plane: &Plane,
    gammas: &[f64],
    curve: ToneCurve,
) -> Result<(CurveParams, Vec<f64>)> {
    let gains = lightness_gains(v_plane, gammas, curve)?;
    let problem = FitProblem::new(gammas, &gains)?;
    Ok((curve_fit::fit(&problem), gains))
}

/// Outcome of inverting the gain curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSolution {
    /// Gamma to apply, inside the clamp range.
    pub gamma: f64,
    /// Exact solution of the curve equation, when one exists.
    pub unclamped: Option<f64>,
    pub warning: Option<String>,
}

/// Solves `dv_star = c + 1/(a g + b)` for `g` and clamps it to `clamp`.
///
/// When no positive finite gamma reaches the target, the clamp endpoint
/// whose curve value is nearest the target is returned with a warning.
pub fn invert_curve(
    params: &CurveParams,
    dv_star: f64,
    clamp: (f64, f64),
) -> Result<GammaSolution> {
    if params.degenerate {
        return Err(Error::UncontrollableLightness);
    }
    let (lo, hi) = clamp;
    let gap = dv_star - params.c;
    let exact = (gap != 0.0 && params.a != 0.0)
        .then(|| (1.0 / gap - params.b) / params.a)
        .filter(|g| g.is_finite());

    match exact {
        Some(g) if g > 0.0 => {
            let clamped = g.clamp(lo, hi);
            let warning = (clamped != g)
                .then(|| format!("gamma {g:.4} for target gain {dv_star} clamped to {clamped}"));
            if let Some(w) = &warning {
                log::warn!("{w}");
            }
            Ok(GammaSolution {
                gamma: clamped,
                unclamped: Some(g),
                warning,
            })
        }
        _ => {
            let miss = |g: f64| {
                curve_fit::evaluate(params, g).map_or(f64::INFINITY, |v| (v - dv_star).abs())
            };
            let gamma = if miss(lo) <= miss(hi) { lo } else { hi };
            let warning = format!(
                "target gain {dv_star} is not reachable by a positive gamma \
                 (curve asymptote {:.4}); using {gamma}",
                params.c
            );
            log::warn!("{warning}");
            Ok(GammaSolution {
                gamma,
                unclamped: exact,
                warning: Some(warning),
            })
        }
    }
}

/// Applies the energy-weighted gamma to each RGB channel with its own maximum.
pub fn apply_global(image: &ImageF, lambda: LambdaParam, gamma: f64) -> Result<ImageF> {
    image.require_rgb()?;
    let planes: Vec<Plane> = image
        .planes()
        .par_iter()
        .map(|p| modified_gamma_map(p, lambda, gamma))
        .collect();
    ImageF::from_planes(planes)
}

#[derive(Debug, Clone)]
pub struct GlobalEnhancement {
    pub image: ImageF,
    pub gamma_star: f64,
    pub params: CurveParams,
    pub dv_sequence: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Picks the gamma for a fitted curve; flat curves fall back to
/// [`FLAT_CURVE_GAMMA`].
pub fn select_gamma(params: &CurveParams, cfg: &EnhanceConfig) -> (f64, Vec<String>) {
    match invert_curve(params, cfg.dv_star, cfg.gamma_clamp) {
        Ok(sol) => (sol.gamma, sol.warning.into_iter().collect()),
        Err(_) => {
            let gamma = FLAT_CURVE_GAMMA.clamp(cfg.gamma_clamp.0, cfg.gamma_clamp.1);
            (
                gamma,
                vec![format!(
                    "lightness gain does not depend on gamma (flat at {:.4}); using gamma {gamma}",
                    params.c
                )],
            )
        }
    }
}

/// Two-phase global enhancement: fit the gain curve on the HSV value plane,
/// then map every RGB channel with the gamma that hits `cfg.dv_star`.
pub fn enhance_global(image: &ImageF, cfg: &EnhanceConfig) -> Result<GlobalEnhancement> {
    cfg.validate()?;
    let v = rgb_to_v(image)?;
    let (params, dv_sequence) = perceive_curve(&v, cfg)?;
    let (gamma_star, warnings) = select_gamma(&params, cfg);
    let enhanced = apply_global(image, cfg.lambda, gamma_star)?;
    Ok(GlobalEnhancement {
        image: enhanced,
        gamma_star,
        params,
        dv_sequence,
        warnings,
    })
}

/// One sample of a gamma sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub dv_measured: f64,
    pub dv_fitted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub params: CurveParams,
    pub rows: Vec<SweepRow>,
    pub sweep_mse: f64,
}

/// Gamma grid `lo, lo + step, ...` up to `hi` inclusive (with rounding slack).
pub fn sweep_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && step > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sweep needs 0 < lo <= hi and step > 0, got {lo}:{hi}:{step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Fits the curve from the configured probe gammas, then compares it with
/// gains measured on a dense grid.
pub fn gamma_sweep(
    v_plane: &Plane,
    cfg: &EnhanceConfig,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<Sweep> {
    let grid = sweep_grid(lo, hi, step)?;
    let (params, _) = perceive_curve(v_plane, cfg)?;
    let measured = lightness_gains(v_plane, &grid, ToneCurve::CellEnergy(cfg.lambda))?;
    let rows = grid
        .iter()
        .zip(&measured)
        .map(|(&gamma, &dv_measured)| {
            Ok(SweepRow {
                gamma,
                dv_measured,
                dv_fitted: curve_fit::evaluate(&params, gamma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep_mse = rows
        .iter()
        .map(|r| (r.dv_fitted - r.dv_measured).powi(2))
        .sum::<f64>()
        / rows.len() as f64;
    Ok(Sweep {
        params,
        rows,
        sweep_mse,
    })
}

/// Mean squared error of the fitted curve over `[lo, hi]` in steps of `step`.
pub fn gamma_sweep_mse(
    v_plane: &Plane,
    cfg: &EnhanceConfig,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<f64> {
    gamma_sweep(v_plane, cfg, lo, hi, step).map(|s| s.sweep_mse)
}
