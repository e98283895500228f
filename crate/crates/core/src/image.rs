//! Planar floating-point images.

use crate::error::{Error, Result};

/// A single channel of `width * height` samples in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "plane dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane from nested rows. Panics on ragged input; meant for tests
    /// and small literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == width), "ragged rows");
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(width, height, data).expect("non-empty rows")
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("positive dimensions")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two planes of equal size.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        Error::check_dims(self.dims(), other.dims())?;
        Ok(Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// A 1- or 3-channel planar image. RGB and derived lightness/weight planes
/// hold values in `[0, 1]`; LAB images are exempt from that range.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    planes: Vec<Plane>,
}

impl ImageF {
    pub fn gray(plane: Plane) -> Self {
        Self {
            width: plane.width,
            height: plane.height,
            planes: vec![plane],
        }
    }

    pub fn rgb(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        Error::check_dims(r.dims(), g.dims())?;
        Error::check_dims(r.dims(), b.dims())?;
        Ok(Self {
            width: r.width,
            height: r.height,
            planes: vec![r, g, b],
        })
    }

    pub fn from_planes(planes: Vec<Plane>) -> Result<Self> {
        match planes.len() {
            1 => Ok(Self::gray(planes.into_iter().next().unwrap())),
            3 => {
                let mut it = planes.into_iter();
                let (r, g, b) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                Self::rgb(r, g, b)
            }
            n => Err(Error::ChannelCount {
                expected: 3,
                actual: n,
            }),
        }
    }

    /// A uniformly colored RGB image.
    pub fn rgb_filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        Self {
            width,
            height,
            planes: rgb
                .iter()
                .map(|&v| Plane::filled(width, height, v))
                .collect(),
        }
    }

    /// Builds an RGB image from a per-pixel closure.
    pub fn rgb_from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut planes = [
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
        ];
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                for (plane, v) in planes.iter_mut().zip(px) {
                    plane.push(v);
                }
            }
        }
        let [r, g, b] = planes;
        Self::rgb(
            Plane::new(width, height, r).expect("positive dimensions"),
            Plane::new(width, height, g).unwrap(),
            Plane::new(width, height, b).unwrap(),
        )
        .unwrap()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn plane(&self, c: usize) -> &Plane {
        &self.planes[c]
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        match self.planes.len() {
            1 => {
                let v = self.planes[0].get(x, y);
                [v, v, v]
            }
            _ => [
                self.planes[0].get(x, y),
                self.planes[1].get(x, y),
                self.planes[2].get(x, y),
            ],
        }
    }

    pub(crate) fn require_rgb(&self) -> Result<()> {
        if self.planes.len() == 3 {
            Ok(())
        } else {
            Err(Error::ChannelCount {
                expected: 3,
                actual: self.planes.len(),
            })
        }
    }

    /// Iterates `[r, g, b]` triples in row-major order.
    pub(crate) fn rgb_pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let [r, g, b] = [&self.planes[0], &self.planes[1], &self.planes[2]];
        r.data
            .iter()
            .zip(&g.data)
            .zip(&b.data)
            .map(|((&r, &g), &b)| [r, g, b])
    }

    pub fn map_planes(&self, f: impl Fn(&Plane) -> Plane) -> ImageF {
        ImageF {
            width: self.width,
            height: self.height,
            planes: self.planes.iter().map(f).collect(),
        }
    }

    /// Largest absolute per-sample difference. Panics on mismatched shapes.
    pub fn max_abs_diff(&self, other: &ImageF) -> f64 {
        assert_eq!(self.dims(), other.dims());
        assert_eq!(self.channels(), other.channels());
        self.planes
            .iter()
            .zip(&other.planes)
            .flat_map(|(a, b)| a.data.iter().zip(&b.data).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Plane::new(0, 3, vec![]).is_err());
        assert!(Plane::new(2, 2, vec![0.0; 3]).is_err());
        let a = Plane::filled(2, 2, 0.0);
        let b = Plane::filled(3, 2, 0.0);
        assert!(matches!(
            ImageF::rgb(a.clone(), a.clone(), b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ImageF::from_planes(vec![a.clone(), a]),
            Err(Error::ChannelCount { actual: 2, .. })
        ));
    }

    #[test]
    fn row_major_layout() {
        let p = Plane::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(p.dims(), (3, 2));
        assert_eq!(p.get(2, 0), 3.0);
        assert_eq!(p.get(0, 1), 4.0);
        assert_eq!(p.row(1), &[4.0, 5.0, 6.0]);
    }
}
