use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};
use crate::ops::luma_bt601;

/// Side of the Gaussian SSIM window.
pub const SSIM_WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = 0.01 * 0.01;
const C2: f64 = 0.03 * 0.03;

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian filter keeping only windows fully inside the plane.
fn filter_valid(data: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let src = &data[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k
                .iter()
                .zip(&src[x..x + SSIM_WINDOW])
                .map(|(a, b)| a * b)
                .sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for (i, &kv) in k.iter().enumerate() {
            let src = &rows[(y + i) * ow..(y + i + 1) * ow];
            for (o, s) in out[y * ow..(y + 1) * ow].iter_mut().zip(src) {
                *o += kv * s;
            }
        }
    }
    out
}

/// Mean SSIM of two single-channel planes with unit dynamic range.
pub fn ssim_plane(a: &Plane, b: &Plane) -> Result<f64> {
    Error::check_dims(a.dims(), b.dims())?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: SSIM_WINDOW,
        });
    }
    let k = gaussian_kernel();
    let (x, y) = (a.as_slice(), b.as_slice());
    let prod = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| u * v).collect::<Vec<_>>();
    let mu_x = filter_valid(x, w, h, &k);
    let mu_y = filter_valid(y, w, h, &k);
    let xx = filter_valid(&prod(x, x), w, h, &k);
    let yy = filter_valid(&prod(y, y), w, h, &k);
    let xy = filter_valid(&prod(x, y), w, h, &k);

    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let sxx = xx[i] - mx * mx;
            let syy = yy[i] - my * my;
            let sxy = xy[i] - mx * my;
            ((2.0 * mx * my + C1) * (2.0 * sxy + C2))
                / ((mx * mx + my * my + C1) * (sxx + syy + C2))
        })
        .sum();
    Ok(total / n as f64)
}

/// Mean SSIM on the BT.601 luma of two RGB images.
pub fn mssim(a: &ImageF, b: &ImageF) -> Result<f64> {
    Error::check_dims(a.dims(), b.dims())?;
    ssim_plane(&luma_bt601(a)?, &luma_bt601(b)?)
}
