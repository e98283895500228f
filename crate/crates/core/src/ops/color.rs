use crate::error::Result;
use crate::image::{ImageF, Plane};

fn per_pixel(image: &ImageF, f: impl Fn([f64; 3]) -> f64) -> Result<Plane> {
    image.require_rgb()?;
    let data = image.rgb_pixels().map(f).collect();
    Plane::new(image.width(), image.height(), data)
}

/// HSV value channel, `max(r, g, b)`.
pub fn rgb_to_v(image: &ImageF) -> Result<Plane> {
    per_pixel(image, |[r, g, b]| r.max(g).max(b))
}

/// HSV saturation, `(max - min) / max`, with black mapped to 0.
pub fn rgb_to_s(image: &ImageF) -> Result<Plane> {
    per_pixel(image, |[r, g, b]| {
        let max = r.max(g).max(b);
        if max <= 0.0 {
            0.0
        } else {
            (max - r.min(g).min(b)) / max
        }
    })
}

/// ITU-R BT.601 luma.
pub fn luma_bt601(image: &ImageF) -> Result<Plane> {
    per_pixel(image, |[r, g, b]| 0.299 * r + 0.587 * g + 0.114 * b)
}

// sRGB primaries to CIE XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

#[inline]
fn srgb_decode(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// CIELAB of one sRGB triple in `[0, 1]`. The white point is the XYZ image
/// of sRGB white, so `(1, 1, 1)` lands on `(100, 0, 0)`.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let lin = rgb.map(srgb_decode);
    let mut xyz = [0.0; 3];
    for (out, row) in xyz.iter_mut().zip(&RGB_TO_XYZ) {
        let white: f64 = row.iter().sum();
        *out = (row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]) / white;
    }
    let [fx, fy, fz] = xyz.map(lab_f);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Converts an sRGB image to a 3-plane CIELAB image (D65).
pub fn rgb_to_lab(image: &ImageF) -> Result<ImageF> {
    image.require_rgb()?;
    let n = image.width() * image.height();
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for px in image.rgb_pixels() {
        let lab = srgb_to_lab(px);
        for (p, v) in planes.iter_mut().zip(lab) {
            p.push(v);
        }
    }
    let [l, a, b] = planes;
    let (w, h) = image.dims();
    ImageF::rgb(
        Plane::new(w, h, l)?,
        Plane::new(w, h, a)?,
        Plane::new(w, h, b)?,
    )
}
