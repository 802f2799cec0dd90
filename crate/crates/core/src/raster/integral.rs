use super::{GrayImage, PixelCoord, MAX_LEVEL};
use crate::error::{Error, Result};

/// Summed-area table over the 8-bit levels of an image.
///
/// Stored with a zero guard row and column so that `table[(y+1)(w+1) + x+1]`
/// holds the sum over `[0, x] x [0, y]`. Integer accumulation keeps every
/// entry exact: a 2^32-pixel image of level 255 still fits in `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    table: Vec<u64>,
}

#[cfg(test)]
thread_local! {
    static LOOKUPS: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0u64;
            for x in 0..w {
                row += u64::from(img.level(x, y));
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
            }
        }
        Self {
            width: w,
            height: h,
            table,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    fn lookup(&self, gx: usize, gy: usize) -> u64 {
        #[cfg(test)]
        LOOKUPS.with(|c| c.set(c.get() + 1));
        self.table[gy * (self.width + 1) + gx]
    }

    /// Cumulative sum `g(x, y)` over all pixels with column `<= x` and row `<= y`.
    pub fn sum_to(&self, x: usize, y: usize) -> u64 {
        self.table[(y + 1) * (self.width + 1) + x + 1]
    }

    /// Sum over the inclusive rectangle `[x0, x1] x [y0, y1]` from four lookups.
    #[inline]
    pub fn rect_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        debug_assert!(x0 <= x1 && y0 <= y1 && x1 < self.width && y1 < self.height);
        let a = self.lookup(x1 + 1, y1 + 1);
        let b = self.lookup(x0, y1 + 1);
        let c = self.lookup(x1 + 1, y0);
        let d = self.lookup(x0, y0);
        a + d - b - c
    }

    /// Level sum and in-bounds pixel count of the `w x w` window centered on
    /// `(x, y)`, clipped to the image.
    #[inline]
    pub(crate) fn window_sum(&self, x: usize, y: usize, w: usize) -> (u64, u64) {
        let half = w / 2;
        let x0 = x.saturating_sub(half);
        let y0 = y.saturating_sub(half);
        let x1 = (x + half).min(self.width - 1);
        let y1 = (y + half).min(self.height - 1);
        let count = ((x1 - x0 + 1) * (y1 - y0 + 1)) as u64;
        (self.rect_sum(x0, y0, x1, y1), count)
    }

    /// Mean normalized intensity over the odd `w x w` window centered on
    /// `center`. Windows reaching past the border are clipped and divided by
    /// the number of in-bounds pixels.
    pub fn window_mean(&self, center: PixelCoord, w: usize) -> Result<f64> {
        if center.x >= self.width || center.y >= self.height {
            return Err(Error::OutOfBounds {
                x: center.x,
                y: center.y,
                width: self.width,
                height: self.height,
            });
        }
        if w < 3 || w % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "window size must be odd and >= 3, got {w}"
            )));
        }
        let (sum, count) = self.window_sum(center.x, center.y, w);
        Ok(level_mean(sum, count))
    }
}

#[inline]
pub(crate) fn level_mean(sum: u64, count: u64) -> f64 {
    sum as f64 / (count as f64 * MAX_LEVEL)
}
