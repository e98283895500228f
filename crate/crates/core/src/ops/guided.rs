use serde::{Deserialize, Serialize};

use super::box_filter::box_filter;
use super::resample::{resize_plane, Resample};
use crate::error::{Error, Result};
use crate::image::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidedFilterParams {
    /// Window radius at full resolution.
    pub radius: usize,
    /// Internal subsampling rate; 1 runs the exact filter.
    pub subsample: usize,
    /// Regularizer added to the local guide variance.
    pub eta: f64,
}

impl GuidedFilterParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius == 0 || self.subsample == 0 || !(self.eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "guided filter needs radius >= 1, subsample >= 1, eta > 0; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Window radius on the subsampled grid, never below 1.
    pub fn scaled_radius(&self) -> usize {
        ((self.radius as f64 / self.subsample as f64).round() as usize).max(1)
    }
}

/// Exact guided filter with the given window radius.
pub fn guided_filter(guide: &Plane, input: &Plane, radius: usize, eta: f64) -> Result<Plane> {
    guided_filter_fast(
        guide,
        input,
        &GuidedFilterParams {
            radius,
            subsample: 1,
            eta,
        },
    )
}

/// Fast guided filter. The local linear model `q = a I + b` is estimated on
/// guide and input subsampled by `params.subsample`; the smoothed
/// coefficients are upsampled and applied to the full-resolution guide.
pub fn guided_filter_fast(
    guide: &Plane,
    input: &Plane,
    params: &GuidedFilterParams,
) -> Result<Plane> {
    Error::check_dims(guide.dims(), input.dims())?;
    params.validate()?;
    let (w, h) = guide.dims();
    let r = params.subsample;
    let (sw, sh) = (w.div_ceil(r), h.div_ceil(r));
    let radius = params.scaled_radius();

    let g = resize_plane(guide, sw, sh, Resample::Bilinear)?;
    let p = resize_plane(input, sw, sh, Resample::Bilinear)?;

    let mean_i = box_filter(&g, radius);
    let mean_p = box_filter(&p, radius);
    let corr_ip = box_filter(&g.zip_map(&p, |a, b| a * b)?, radius);
    let corr_ii = box_filter(&g.map(|a| a * a), radius);

    let n = sw * sh;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let mi = mean_i.as_slice()[k];
        let mp = mean_p.as_slice()[k];
        let cov = corr_ip.as_slice()[k] - mi * mp;
        let var = corr_ii.as_slice()[k] - mi * mi;
        let ak = cov / (var + params.eta);
        a.push(ak);
        b.push(mp - ak * mi);
    }
    let mean_a = box_filter(&Plane::new(sw, sh, a)?, radius);
    let mean_b = box_filter(&Plane::new(sw, sh, b)?, radius);

    let mean_a = resize_plane(&mean_a, w, h, Resample::Bilinear)?;
    let mean_b = resize_plane(&mean_b, w, h, Resample::Bilinear)?;
    let out = guide
        .as_slice()
        .iter()
        .zip(mean_a.as_slice().iter().zip(mean_b.as_slice()))
        .map(|(&i, (&a, &b))| a * i + b)
        .collect();
    Plane::new(w, h, out)
}
