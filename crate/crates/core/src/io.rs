//! 8-bit PNG/JPEG decode and encode.

use std::path::Path;

use image::{ColorType, DynamicImage, ImageError, RgbImage};

use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};

fn map_err(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

/// Converts a decoded image to `[0, 1]` RGB. Gray inputs are replicated,
/// alpha is dropped; anything wider than 8 bits per channel is rejected.
pub fn from_dynamic(img: DynamicImage) -> std::result::Result<ImageF, String> {
    match img.color() {
        ColorType::L8 | ColorType::La8 | ColorType::Rgb8 | ColorType::Rgba8 => {}
        other => return Err(format!("only 8-bit images are supported, got {other:?}")),
    }
    let rgb = img.into_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let mut planes = [vec![0.0; w * h], vec![0.0; w * h], vec![0.0; w * h]];
    for (i, px) in rgb.pixels().enumerate() {
        for c in 0..3 {
            planes[c][i] = f64::from(px[c]) / 255.0;
        }
    }
    let [r, g, b] = planes.map(|d| Plane::new(w, h, d).expect("buffer matches dimensions"));
    Ok(ImageF::rgb(r, g, b).expect("planes share dimensions"))
}

/// Quantizes to 8 bits with `round(clamp(v, 0, 1) * 255)`.
pub fn to_rgb8(image: &ImageF) -> Result<RgbImage> {
    image.require_rgb()?;
    let (w, h) = image.dims();
    let mut out = RgbImage::new(w as u32, h as u32);
    for (px, rgb) in out.pixels_mut().zip(image.rgb_pixels()) {
        for c in 0..3 {
            px[c] = (rgb[c].clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    Ok(out)
}

pub fn load_rgb(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| map_err(path, e))?;
    from_dynamic(img).map_err(|message| Error::Decode {
        path: path.to_path_buf(),
        message,
    })
}

/// Writes an RGB image; the format follows the file extension.
pub fn save_rgb(image: &ImageF, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    to_rgb8(image)?.save(path).map_err(|e| map_err(path, e))
}
