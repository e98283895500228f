//! Full-reference and order-based quality scores.

mod loe;
mod ssim;

use serde::{Deserialize, Serialize};

pub use self::loe::{loe, loe_planes, LOE_SHORT_SIDE};
pub use self::ssim::{mssim, ssim_plane, SSIM_WINDOW};

use crate::error::{Error, Result};
use crate::image::ImageF;
use crate::ops::{rgb_to_lab, rgb_to_s, rgb_to_v};
use crate::tone::mean_nonzero_lightness;

/// PSNR reported for (numerically) identical images.
pub const PSNR_CAP: f64 = 99.0;
/// MSE below which two images count as identical.
pub const PSNR_MSE_FLOOR: f64 = 1e-10;

fn check_pair(a: &ImageF, b: &ImageF) -> Result<()> {
    a.require_rgb()?;
    b.require_rgb()?;
    Error::check_dims(a.dims(), b.dims())
}

/// Mean CIE76 color difference between corresponding pixels.
pub fn delta_e(enhanced: &ImageF, reference: &ImageF) -> Result<f64> {
    check_pair(enhanced, reference)?;
    let (la, lb) = (rgb_to_lab(enhanced)?, rgb_to_lab(reference)?);
    let n = la.plane(0).len();
    let total: f64 = (0..n)
        .map(|i| {
            (0..3)
                .map(|c| {
                    let d = la.plane(c).as_slice()[i] - lb.plane(c).as_slice()[i];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    Ok(total / n as f64)
}

/// Mean squared error over all channels and pixels.
pub fn mse(a: &ImageF, b: &ImageF) -> Result<f64> {
    check_pair(a, b)?;
    let (sum, n) = a
        .planes()
        .iter()
        .zip(b.planes())
        .flat_map(|(p, q)| p.as_slice().iter().zip(q.as_slice()))
        .fold((0.0, 0usize), |(s, n), (x, y)| {
            (s + (x - y) * (x - y), n + 1)
        });
    Ok(sum / n as f64)
}

/// Peak signal-to-noise ratio for unit peak; [`PSNR_CAP`] when the MSE is
/// below [`PSNR_MSE_FLOOR`].
pub fn psnr(a: &ImageF, b: &ImageF) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse < PSNR_MSE_FLOOR {
        return Ok(PSNR_CAP);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Lightness gain, saturation loss and lightness-saturation gap of a fused
/// image relative to its input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticalStates {
    pub dv_m: f64,
    pub ds_m: f64,
    pub d_m: f64,
}

impl StatisticalStates {
    /// Builds the states from the four channel means.
    pub fn from_means(f_vm: f64, i_vm: f64, f_sm: f64, i_sm: f64) -> Self {
        Self {
            dv_m: f_vm - i_vm,
            ds_m: i_sm - f_sm,
            d_m: f_vm - f_sm,
        }
    }
}

/// Value means skip zero pixels; saturation means use every pixel.
pub fn statistical_states(fused: &ImageF, input: &ImageF) -> Result<StatisticalStates> {
    check_pair(fused, input)?;
    let f_vm = mean_nonzero_lightness(&rgb_to_v(fused)?);
    let i_vm = mean_nonzero_lightness(&rgb_to_v(input)?);
    let f_sm = rgb_to_s(fused)?.mean();
    let i_sm = rgb_to_s(input)?.mean();
    Ok(StatisticalStates::from_means(f_vm, i_vm, f_sm, i_sm))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub id: String,
    pub delta_e: f64,
    pub psnr: f64,
    pub mssim: f64,
    pub loe: f64,
    pub dv_m: f64,
    pub ds_m: f64,
    pub d_m: f64,
}

impl MetricsReport {
    /// Scores `enhanced` against `reference`. Order error and statistical
    /// states are measured against `low` when given, else against `reference`.
    pub fn compute(
        id: impl Into<String>,
        enhanced: &ImageF,
        reference: &ImageF,
        low: Option<&ImageF>,
    ) -> Result<Self> {
        let base = low.unwrap_or(reference);
        check_pair(enhanced, base)?;
        let states = statistical_states(enhanced, base)?;
        Ok(Self {
            id: id.into(),
            delta_e: delta_e(enhanced, reference)?,
            psnr: psnr(enhanced, reference)?,
            mssim: mssim(enhanced, reference)?,
            loe: loe(enhanced, base)?,
            dv_m: states.dv_m,
            ds_m: states.ds_m,
            d_m: states.d_m,
        })
    }
}
