use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resample {
    #[default]
    Bilinear,
    Nearest,
}

/// Source coordinate of output index `i`. Corner samples align with corner
/// samples; a single output sample reads the source center.
#[inline]
fn source_coord(i: usize, src_len: usize, dst_len: usize) -> f64 {
    if dst_len == 1 {
        (src_len - 1) as f64 / 2.0
    } else {
        (i * (src_len - 1)) as f64 / (dst_len - 1) as f64
    }
}

/// Per-output-index `(lower index, upper index, weight of upper)`.
fn taps(src_len: usize, dst_len: usize) -> Vec<(usize, usize, f64)> {
    (0..dst_len)
        .map(|i| {
            let s = source_coord(i, src_len, dst_len);
            let i0 = (s.floor() as usize).min(src_len - 1);
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

pub fn resize_plane(plane: &Plane, width: usize, height: usize, method: Resample) -> Result<Plane> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "resize target must be positive, got {width}x{height}"
        )));
    }
    if plane.dims() == (width, height) {
        return Ok(plane.clone());
    }
    let (sw, sh) = plane.dims();
    let src = plane.as_slice();
    let mut out = Vec::with_capacity(width * height);
    match method {
        Resample::Nearest => {
            let xs: Vec<usize> = (0..width)
                .map(|x| source_coord(x, sw, width).round() as usize)
                .collect();
            for y in 0..height {
                let row = source_coord(y, sh, height).round() as usize * sw;
                out.extend(xs.iter().map(|&sx| src[row + sx]));
            }
        }
        Resample::Bilinear => {
            let xt = taps(sw, width);
            let yt = taps(sh, height);
            for &(y0, y1, ty) in &yt {
                let (r0, r1) = (&src[y0 * sw..(y0 + 1) * sw], &src[y1 * sw..(y1 + 1) * sw]);
                for &(x0, x1, tx) in &xt {
                    // a + t (b - a) keeps constant regions exact
                    let top = r0[x0] + tx * (r0[x1] - r0[x0]);
                    let bot = r1[x0] + tx * (r1[x1] - r1[x0]);
                    out.push(top + ty * (bot - top));
                }
            }
        }
    }
    Plane::new(width, height, out)
}

/// Resamples every plane of an image.
pub fn resize(image: &ImageF, width: usize, height: usize, method: Resample) -> Result<ImageF> {
    let planes = image
        .planes()
        .iter()
        .map(|p| resize_plane(p, width, height, method))
        .collect::<Result<Vec<_>>>()?;
    ImageF::from_planes(planes)
}
