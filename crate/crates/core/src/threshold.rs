//! Binarization: local adaptive thresholding from local mean and mean
//! deviation, and Otsu's global threshold as a baseline.
//!
//! Both operators return the set of pixels strictly *above* their threshold.
//! When the crack is the dark class (the usual case for an inverted
//! bottom-hat image) the crack mask is the complement; see [`Polarity`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage, IntegralImage, MAX_LEVEL};

/// Bias `k` in `[0, 1]` and odd window side `w >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinghParams {
    pub k: f64,
    pub w: usize,
}

impl Default for SinghParams {
    fn default() -> Self {
        Self { k: 0.06, w: 51 }
    }
}

impl SinghParams {
    pub fn new(k: f64, w: usize) -> Result<Self> {
        let p = Self { k, w };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.k) {
            return Err(Error::InvalidParameter(format!(
                "bias k must be in [0, 1], got {}",
                self.k
            )));
        }
        if self.w < 3 || self.w % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "window w must be odd and >= 3, got {}",
                self.w
            )));
        }
        Ok(())
    }
}

/// Which side of the threshold is crack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Cracks are darker than their surroundings: crack = not above threshold.
    #[default]
    Dark,
    /// Cracks are brighter: crack = above threshold.
    Bright,
}

impl Polarity {
    pub fn crack_mask(self, above: BinaryMask) -> BinaryMask {
        match self {
            Polarity::Dark => above.complement(),
            Polarity::Bright => above,
        }
    }
}

/// Deviations this close to 1 make `∂ / (1 - ∂)` blow up; such pixels are
/// treated as maximally above threshold.
pub const DEVIATION_POLE_EPS: f64 = 1e-9;

/// Local threshold `T = m·[1 + k·(∂/(1−∂) − 1)]` with `∂ = I − m`.
/// Returns `None` at the pole `∂ = 1`.
#[inline]
pub fn singh_local_threshold(intensity: f64, mean: f64, k: f64) -> Option<f64> {
    let dev = intensity - mean;
    let denom = 1.0 - dev;
    if denom.abs() < DEVIATION_POLE_EPS {
        return None;
    }
    Some(mean * (1.0 + k * (dev / denom - 1.0)))
}

/// Strict comparison: `I = T` is not above.
#[inline]
pub fn singh_is_above(intensity: f64, mean: f64, k: f64) -> bool {
    match singh_local_threshold(intensity, mean, k) {
        Some(t) => intensity > t,
        None => true,
    }
}

/// Local adaptive threshold. Intensities are read on the 8-bit grid
/// (`level / 255`) and local means come from an integral image, so the cost
/// per pixel does not depend on `w`.
pub fn singh_threshold(img: &GrayImage, p: &SinghParams) -> Result<BinaryMask> {
    p.validate()?;
    let ii = IntegralImage::new(img);
    let (w, h) = (img.width(), img.height());
    let mut bits = vec![false; w * h];
    bits.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, bit) in row.iter_mut().enumerate() {
            let (sum, count) = ii.window_sum(x, y, p.w);
            let mean = crate::raster::integral::level_mean(sum, count);
            let intensity = f64::from(img.level(x, y)) / MAX_LEVEL;
            *bit = singh_is_above(intensity, mean, p.k);
        }
    });
    BinaryMask::from_bits(w, h, bits)
}

/// Crack mask from the local threshold under the given polarity.
pub fn singh_binarize(img: &GrayImage, p: &SinghParams, polarity: Polarity) -> Result<BinaryMask> {
    Ok(polarity.crack_mask(singh_threshold(img, p)?))
}

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[crate::raster::to_level(v) as usize] += 1;
    }
    hist
}

/// Otsu level `t`: the class split `{<= t} | {> t}` with maximal
/// between-class variance. Ties go to the smallest `t`. A single-valued
/// histogram returns that value.
pub fn otsu_level(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(l, &c)| l as u64 * c).sum();

    // Between-class variance is proportional to D² / (n0·n1) with
    // D = N·S0 − n0·S. Kept as an exact fraction: quotient and remainder.
    let mut best: Option<(u8, u128, u128, u128)> = None;
    let (mut n0, mut s0) = (0u64, 0u64);
    for t in 0..255usize {
        n0 += hist[t];
        s0 += t as u64 * hist[t];
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let d = (total as i128 * s0 as i128 - n0 as i128 * total_sum as i128).unsigned_abs();
        let num = d * d;
        let den = n0 as u128 * n1 as u128;
        let (q, r) = (num / den, num % den);
        let better = match best {
            None => true,
            Some((_, bq, br, bden)) => q > bq || (q == bq && r * bden > br * den),
        };
        if better {
            best = Some((t as u8, q, r, den));
        }
    }
    match best {
        Some((t, ..)) => t,
        // at most one occupied level
        None => hist.iter().position(|&c| c > 0).unwrap_or(0) as u8,
    }
}

/// Pixels strictly above the Otsu level.
pub fn otsu_threshold(img: &GrayImage) -> BinaryMask {
    let t = otsu_level(&histogram(img));
    BinaryMask::from_fn(img.width(), img.height(), |x, y| img.level(x, y) > t)
}

pub fn otsu_binarize(img: &GrayImage, polarity: Polarity) -> BinaryMask {
    polarity.crack_mask(otsu_threshold(img))
}
