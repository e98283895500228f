use crate::error::{Error, Result};
use crate::image::{ImageF, Plane};
use crate::ops::{resize_plane, rgb_to_v, Resample};

/// Short side the lightness planes are reduced to before counting.
pub const LOE_SHORT_SIDE: usize = 100;

fn downsampled(plane: &Plane) -> Result<Plane> {
    let (w, h) = plane.dims();
    let short = w.min(h);
    if short <= LOE_SHORT_SIDE {
        return Ok(plane.clone());
    }
    let scale = LOE_SHORT_SIDE as f64 / short as f64;
    let dw = ((w as f64 * scale).round() as usize).max(1);
    let dh = ((h as f64 * scale).round() as usize).max(1);
    resize_plane(plane, dw, dh, Resample::Nearest)
}

/// Fenwick tree over ranks, counting inserted elements.
struct Fenwick(Vec<u32>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    fn add(&mut self, rank: usize) {
        let mut i = rank + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted ranks `<= rank`.
    fn prefix(&self, rank: usize) -> u64 {
        let mut i = rank + 1;
        let mut s = 0u64;
        while i > 0 {
            s += u64::from(self.0[i]);
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Rank of each sample among the distinct values, plus, per sample, how many
/// samples are `<=` it.
fn ranks(values: &[f64]) -> (Vec<usize>, Vec<u64>) {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    let rank = values
        .iter()
        .map(|v| distinct.partition_point(|d| d.total_cmp(v).is_lt()))
        .collect();
    let below = values
        .iter()
        .map(|v| sorted.partition_point(|d| d.total_cmp(v).is_le()) as u64)
        .collect();
    (rank, below)
}

/// Order error between two equally sized lightness planes, without
/// downsampling: mean over `x` of the number of `y` where `L(x) >= L(y)` and
/// `L'(x) >= L'(y)` disagree.
pub fn loe_planes(enhanced: &Plane, original: &Plane) -> Result<f64> {
    Error::check_dims(enhanced.dims(), original.dims())?;
    let (l, lp) = (original.as_slice(), enhanced.as_slice());
    let n = l.len();
    if n == 0 {
        return Ok(0.0);
    }
    let (_, below_l) = ranks(l);
    let (rank_lp, below_lp) = ranks(lp);

    // |{y : L(y) <= L(x) and L'(y) <= L'(x)}| by sweeping L in ascending
    // order, inserting ties as a block before querying them.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| l[i].total_cmp(&l[j]));
    let mut tree = Fenwick::new(n);
    let mut both = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && l[order[end]] == l[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            tree.add(rank_lp[i]);
        }
        for &i in &order[start..end] {
            both[i] = tree.prefix(rank_lp[i]);
        }
        start = end;
    }

    let total: u64 = (0..n).map(|i| below_l[i] + below_lp[i] - 2 * both[i]).sum();
    Ok(total as f64 / n as f64)
}

/// Lightness order error of `enhanced` relative to `original`, using
/// `max(r, g, b)` lightness on planes reduced to a short side of about
/// [`LOE_SHORT_SIDE`] samples.
pub fn loe(enhanced: &ImageF, original: &ImageF) -> Result<f64> {
    Error::check_dims(enhanced.dims(), original.dims())?;
    let le = downsampled(&rgb_to_v(enhanced)?)?;
    let lo = downsampled(&rgb_to_v(original)?)?;
    loe_planes(&le, &lo)
}
