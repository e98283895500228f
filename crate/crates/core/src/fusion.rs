//! Local fusion of the globally enhanced image with the input.
//!
//! Dark regions of the input (lightness below a threshold) take the enhanced
//! pixels, bright regions keep the input. The binary mask is computed on a
//! downsampled lightness plane and softened by a fast guided filter guided by
//! the enhanced image's lightness, so the blend follows image structure.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::EnhanceConfig;
use crate::curve_fit::CurveParams;
use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};
use crate::ops::{guided_filter_fast, resize_plane, rgb_to_v, GuidedFilterParams, Resample};
use crate::tone;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightStage {
    Rough,
    Fine,
}

/// Per-pixel weight of the enhanced image in the blend.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    pub plane: Plane,
    pub stage: WeightStage,
}

/// Binary mask: 1 where the lightness is strictly below `threshold`.
pub fn segment_rough(v_small: &Plane, threshold: f64) -> WeightMap {
    WeightMap {
        plane: v_small.map(|v| if v < threshold { 1.0 } else { 0.0 }),
        stage: WeightStage::Rough,
    }
}

/// Largest window radius that fits the shorter side: `floor((min - 1) / 2)`.
pub fn dynamic_radius(width: usize, height: usize) -> Result<usize> {
    let min = width.min(height);
    if min < 3 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: 3,
        });
    }
    Ok((min - 1) / 2)
}

/// Filter settings for refining a mask on `c_v_small`: dynamic radius of that
/// plane plus the configured subsample rate and regularizer.
pub fn refine_params(c_v_small: &Plane, cfg: &EnhanceConfig) -> Result<GuidedFilterParams> {
    Ok(GuidedFilterParams {
        radius: dynamic_radius(c_v_small.width(), c_v_small.height())?,
        subsample: cfg.gf_subsample,
        eta: cfg.eta,
    })
}

/// Guided-filters the rough mask with `c_v_small` as guide, upsamples the
/// result to `full_size` and clamps it to `[0, 1]`.
pub fn refine_weights(
    c_v_small: &Plane,
    rough: &WeightMap,
    params: &GuidedFilterParams,
    full_size: (usize, usize),
) -> Result<WeightMap> {
    Error::check_dims(c_v_small.dims(), rough.plane.dims())?;
    let filtered = guided_filter_fast(c_v_small, &rough.plane, params)?;
    let full = resize_plane(&filtered, full_size.0, full_size.1, Resample::Bilinear)?;
    Ok(WeightMap {
        plane: full.map(|w| w.clamp(0.0, 1.0)),
        stage: WeightStage::Fine,
    })
}

/// Per-channel blend `w * enhanced + (1 - w) * input`.
pub fn fuse(input: &ImageF, enhanced: &ImageF, weights: &WeightMap) -> Result<ImageF> {
    input.require_rgb()?;
    enhanced.require_rgb()?;
    Error::check_dims(input.dims(), enhanced.dims())?;
    Error::check_dims(input.dims(), weights.plane.dims())?;
    if weights.stage != WeightStage::Fine {
        log::debug!("fusing with a rough weight map");
    }
    let w = weights.plane.as_slice();
    let planes = input
        .planes()
        .iter()
        .zip(enhanced.planes())
        .map(|(x, c)| {
            let data = x
                .as_slice()
                .iter()
                .zip(c.as_slice())
                .zip(w)
                .map(|((&x, &c), &w)| {
                    let (lo, hi) = if x < c { (x, c) } else { (c, x) };
                    (w * c + (1.0 - w) * x).clamp(lo, hi)
                })
                .collect();
            Plane::new(x.width(), x.height(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    ImageF::from_planes(planes)
}

/// Wall-clock time per pipeline stage, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub curve_fit_ms: f64,
    pub global_ms: f64,
    pub filter_ms: f64,
    pub fuse_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub gamma_star: f64,
    pub curve: CurveParams,
    pub dv_sequence: Vec<f64>,
    /// Guided filter window radius on the downsampled plane.
    pub radius: usize,
    pub warnings: Vec<String>,
    pub timings: StageTimings,
}

/// Intermediate planes of one run, kept for inspection and tests.
#[derive(Debug, Clone)]
pub struct Enhancement {
    pub output: ImageF,
    pub global: ImageF,
    pub rough: WeightMap,
    pub fine: WeightMap,
    pub diagnostics: Diagnostics,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the whole pipeline and keeps the intermediate results.
pub fn enhance_detailed(input: &ImageF, cfg: &EnhanceConfig) -> Result<Enhancement> {
    cfg.validate()?;
    input.require_rgb()?;
    let start = Instant::now();
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let v = rgb_to_v(input)?;
    let (curve, dv_sequence) = tone::perceive_curve(&v, cfg)?;
    let (gamma_star, warnings) = tone::select_gamma(&curve, cfg);
    timings.curve_fit_ms = ms_since(t);

    let t = Instant::now();
    let global = tone::apply_global(input, cfg.lambda, gamma_star)?;
    timings.global_ms = ms_since(t);

    let t = Instant::now();
    let (w, h) = input.dims();
    let (sw, sh) = (w.div_ceil(cfg.downsample), h.div_ceil(cfg.downsample));
    let v_small = resize_plane(&v, sw, sh, Resample::Bilinear)?;
    let c_v_small = resize_plane(&rgb_to_v(&global)?, sw, sh, Resample::Bilinear)?;
    let rough = segment_rough(&v_small, cfg.seg_threshold);
    let params = refine_params(&c_v_small, cfg)?;
    let fine = refine_weights(&c_v_small, &rough, &params, (w, h))?;
    timings.filter_ms = ms_since(t);

    let t = Instant::now();
    let output = fuse(input, &global, &fine)?;
    timings.fuse_ms = ms_since(t);
    timings.total_ms = ms_since(start);

    Ok(Enhancement {
        output,
        global,
        rough,
        fine,
        diagnostics: Diagnostics {
            gamma_star,
            curve,
            dv_sequence,
            radius: params.radius,
            warnings,
            timings,
        },
    })
}

/// Enhances an RGB image: global energy-weighted gamma, then mask-guided
/// fusion with the input.
pub fn enhance_full(input: &ImageF, cfg: &EnhanceConfig) -> Result<(ImageF, Diagnostics)> {
    enhance_detailed(input, cfg).map(|e| (e.output, e.diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::guided_filter;
    use proptest::prelude::*;

    #[test]
    fn segmentation_is_strict() {
        let v = Plane::from_rows(&[&[0.2, 0.7], &[0.5, 0.4]]);
        let w = segment_rough(&v, 0.5);
        assert_eq!(w.stage, WeightStage::Rough);
        assert_eq!(w.plane, Plane::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]));
        assert!(segment_rough(&Plane::filled(3, 3, 0.1), 0.5)
            .plane
            .as_slice()
            .iter()
            .all(|&v| v == 1.0));
        assert!(segment_rough(&Plane::filled(3, 3, 0.9), 0.5)
            .plane
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn dynamic_radius_values() {
        assert_eq!(dynamic_radius(500, 375).unwrap(), 187);
        assert_eq!(dynamic_radius(2000, 1312).unwrap(), 655);
        assert_eq!(dynamic_radius(3, 3).unwrap(), 1);
        assert!(matches!(
            dynamic_radius(2, 10),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    fn rough(plane: Plane) -> WeightMap {
        WeightMap {
            plane,
            stage: WeightStage::Rough,
        }
    }

    fn gf(radius: usize, subsample: usize) -> GuidedFilterParams {
        GuidedFilterParams {
            radius,
            subsample,
            eta: 0.04,
        }
    }

    #[test]
    fn constant_masks_survive_refinement() {
        let guide = Plane::from_fn(30, 20, |x, y| ((x * 3 + y * 5) % 17) as f64 / 17.0);
        for value in [0.0, 1.0] {
            let fine = refine_weights(
                &guide,
                &rough(Plane::filled(30, 20, value)),
                &gf(9, 10),
                (61, 39),
            )
            .unwrap();
            assert_eq!(fine.stage, WeightStage::Fine);
            assert_eq!(fine.plane.dims(), (61, 39));
            assert!(fine
                .plane
                .as_slice()
                .iter()
                .all(|&w| (w - value).abs() < 1e-6));
        }
    }

    #[test]
    fn refine_rejects_size_mismatch() {
        let guide = Plane::filled(10, 10, 0.3);
        let mask = rough(Plane::filled(10, 9, 1.0));
        assert!(refine_weights(&guide, &mask, &gf(4, 1), (20, 20)).is_err());
    }

    #[test]
    fn step_edge_is_preserved() {
        let (w, h) = (80, 40);
        let edge = 40;
        let guide = Plane::from_fn(w, h, |x, _| if x < edge { 0.15 } else { 0.85 });
        let mask = rough(Plane::from_fn(
            w,
            h,
            |x, _| if x < edge { 1.0 } else { 0.0 },
        ));
        let params = gf(dynamic_radius(w, h).unwrap(), 1);
        let fine = refine_weights(&guide, &mask, &params, (w, h)).unwrap();
        let oracle = guided_filter(&guide, &mask.plane, params.radius, params.eta).unwrap();

        let row = |p: &Plane| p.row(h / 2).to_vec();
        let (f, o) = (row(&fine.plane), row(&oracle));
        // monotone non-increasing across the edge
        assert!(f.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        // the half-way crossing stays within 2 px of the edge
        let cross = f.iter().position(|&v| v < 0.5).unwrap();
        assert!(
            (cross as i64 - edge as i64).abs() <= 2,
            "crossing at {cross}"
        );
        for (a, b) in f.iter().zip(&o) {
            assert!((a - b.clamp(0.0, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn locally_constant_mask_is_reproduced() {
        // small radius so the corners sit more than two windows from the edge
        let (w, h) = (60, 60);
        let guide = Plane::from_fn(w, h, |x, y| 0.2 + 0.6 * ((x + y) % 7) as f64 / 7.0);
        let mask = rough(Plane::from_fn(w, h, |x, _| if x < 30 { 1.0 } else { 0.0 }));
        let fine = refine_weights(&guide, &mask, &gf(3, 1), (w, h)).unwrap();
        for y in 0..h {
            for x in (0..20).chain(40..60) {
                let expected = mask.plane.get(x, y);
                assert!((fine.plane.get(x, y) - expected).abs() <= 1e-3);
            }
        }
    }

    #[test]
    fn fuse_weight_extremes() {
        let x = ImageF::rgb_from_fn(4, 3, |i, j| [0.1 * i as f64, 0.05 * j as f64, 0.2]);
        let c = ImageF::rgb_from_fn(4, 3, |i, j| {
            [0.2 + 0.1 * i as f64, 0.9, 0.3 + 0.1 * j as f64]
        });
        let fine = |v| WeightMap {
            plane: Plane::filled(4, 3, v),
            stage: WeightStage::Fine,
        };
        assert_eq!(fuse(&x, &c, &fine(1.0)).unwrap(), c);
        assert_eq!(fuse(&x, &c, &fine(0.0)).unwrap(), x);
        let zero = ImageF::rgb_filled(4, 3, [0.0; 3]);
        let one = ImageF::rgb_filled(4, 3, [1.0; 3]);
        let half = fuse(&zero, &one, &fine(0.5)).unwrap();
        assert!(half
            .planes()
            .iter()
            .all(|p| p.as_slice().iter().all(|&v| v == 0.5)));
        assert!(fuse(
            &x,
            &c,
            &WeightMap {
                plane: Plane::filled(3, 3, 0.5),
                stage: WeightStage::Fine
            }
        )
        .is_err());
    }

    fn scene(w: usize, h: usize) -> ImageF {
        ImageF::rgb_from_fn(w, h, |x, y| {
            let fx = x as f64 / w as f64;
            let fy = y as f64 / h as f64;
            let base = 0.05 + 0.25 * fx * fy + 0.05 * (9.0 * fx).sin().abs();
            let window = if (0.6..0.8).contains(&fx) && fy < 0.3 {
                0.6
            } else {
                0.0
            };
            [
                base + window,
                0.8 * base + window,
                0.6 * base + 0.9 * window,
            ]
        })
    }

    #[test]
    fn full_pipeline_shapes_and_determinism() {
        let img = scene(97, 61);
        for (r_down, r_gf) in [(1, 1), (2, 10), (3, 4)] {
            let cfg = EnhanceConfig {
                downsample: r_down,
                gf_subsample: r_gf,
                ..EnhanceConfig::default()
            };
            let a = enhance_detailed(&img, &cfg).unwrap();
            let b = enhance_detailed(&img, &cfg).unwrap();
            assert_eq!(a.output.dims(), img.dims());
            assert_eq!(a.output, b.output);
            assert!(a
                .fine
                .plane
                .as_slice()
                .iter()
                .all(|w| (0.0..=1.0).contains(w)));
        }
    }

    #[test]
    fn bright_and_dark_extremes() {
        let bright = ImageF::rgb_from_fn(40, 30, |x, y| {
            [0.6 + 0.01 * x as f64, 0.55 + 0.01 * y as f64, 0.7]
        });
        let (out, _) = enhance_full(&bright, &EnhanceConfig::default()).unwrap();
        assert!(out.max_abs_diff(&bright) <= 0.02);

        let dark = ImageF::rgb_from_fn(40, 30, |x, y| {
            [0.05 + 0.005 * x as f64, 0.1, 0.02 + 0.004 * y as f64]
        });
        let e = enhance_detailed(&dark, &EnhanceConfig::default()).unwrap();
        assert!(e.output.max_abs_diff(&e.global) <= 0.02);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fused_pixels_between_sources(
            xs in proptest::collection::vec(0.0f64..=1.0, 36),
            cs in proptest::collection::vec(0.0f64..=1.0, 36),
            ws in proptest::collection::vec(0.0f64..=1.0, 12),
        ) {
            let mk = |v: &[f64]| ImageF::rgb(
                Plane::new(4, 3, v[0..12].to_vec()).unwrap(),
                Plane::new(4, 3, v[12..24].to_vec()).unwrap(),
                Plane::new(4, 3, v[24..36].to_vec()).unwrap(),
            ).unwrap();
            let (x, c) = (mk(&xs), mk(&cs));
            let w = WeightMap { plane: Plane::new(4, 3, ws).unwrap(), stage: WeightStage::Fine };
            let f = fuse(&x, &c, &w).unwrap();
            for ch in 0..3 {
                for ((&fv, &xv), &cv) in f.plane(ch).as_slice().iter()
                    .zip(x.plane(ch).as_slice()).zip(c.plane(ch).as_slice()) {
                    prop_assert!(fv >= xv.min(cv) && fv <= xv.max(cv));
                }
            }
        }
    }
}
