use crate::image::Plane;

/// Mean over the `(2 radius + 1)^2` window around each pixel. Windows are
/// truncated at the borders and normalized by the number of in-bounds
/// samples, so there is no padding bias.
pub fn box_filter(plane: &Plane, radius: usize) -> Plane {
    if radius == 0 {
        return plane.clone();
    }
    let (w, h) = plane.dims();
    let src = plane.as_slice();
    let stride = w + 1;

    // summed-area table with a zero guard row and column
    let mut sat = vec![0.0f64; stride * (h + 1)];
    for y in 0..h {
        let mut run = 0.0;
        for x in 0..w {
            run += src[y * w + x];
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + run;
        }
    }

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius + 1).min(h);
        for x in 0..w {
            let x0 = x.saturating_sub(radius);
            let x1 = (x + radius + 1).min(w);
            let sum = sat[y1 * stride + x1] - sat[y0 * stride + x1] - sat[y1 * stride + x0]
                + sat[y0 * stride + x0];
            out.push(sum / ((y1 - y0) * (x1 - x0)) as f64);
        }
    }
    Plane::new(w, h, out).expect("same dimensions as input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct window average.
    fn naive(plane: &Plane, r: usize) -> Plane {
        let (w, h) = plane.dims();
        Plane::from_fn(w, h, |x, y| {
            let mut s = 0.0;
            let mut n = 0;
            for yy in y.saturating_sub(r)..(y + r + 1).min(h) {
                for xx in x.saturating_sub(r)..(x + r + 1).min(w) {
                    s += plane.get(xx, yy);
                    n += 1;
                }
            }
            s / n as f64
        })
    }

    #[test]
    fn impulse_response() {
        let p = Plane::from_rows(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let out = box_filter(&p, 1);
        assert!((out.get(1, 1) - 1.0 / 9.0).abs() < 1e-15);
        assert!((out.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((out.get(1, 0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_is_identity() {
        let p = Plane::from_fn(5, 4, |x, y| (x * y) as f64 / 20.0);
        assert_eq!(box_filter(&p, 0), p);
    }

    #[test]
    fn full_window_preserves_mean() {
        let p = Plane::from_fn(9, 6, |x, y| ((x * 7 + y * 3) % 5) as f64 / 5.0);
        let out = box_filter(&p, 20);
        for &v in out.as_slice() {
            assert!((v - p.mean()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn matches_naive_window(
            data in proptest::collection::vec(0.0f64..=1.0, 48), r in 0usize..9,
        ) {
            let p = Plane::new(8, 6, data).unwrap();
            let fast = box_filter(&p, r);
            let slow = naive(&p, r);
            for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn constants_are_fixed_points(v in 0.0f64..=1.0, r in 0usize..30) {
            let out = box_filter(&Plane::filled(23, 17, v), r);
            prop_assert!(out.as_slice().iter().all(|&x| (x - v).abs() < 1e-12));
        }
    }
}
