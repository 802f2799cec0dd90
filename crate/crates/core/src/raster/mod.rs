//! Raster data model shared by every pipeline stage.
//!
//! Intensities live on the normalized `[0, 1]` scale. Operations that need
//! exact arithmetic (integral images, histograms, file I/O) work on the 8-bit
//! level `round(v * 255)` of each pixel.

pub(crate) mod integral;
pub mod pgm;

pub use integral::IntegralImage;

use crate::error::{Error, Result};

/// Largest 8-bit level; the normalized scale maps `[0, 255]` onto `[0, 1]`.
pub const MAX_LEVEL: f64 = 255.0;

/// Zero-based pixel coordinate: `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Normalized grayscale raster stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidImage(format!(
            "{len} samples do not fill a {width}x{height} raster"
        )));
    }
    Ok(())
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some((i, v)) = pixels
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidImage(format!(
                "intensity {v} at index {i} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Constant image.
    ///
    /// # Panics
    /// Panics if a dimension is zero or `value` is outside `[0, 1]`.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("valid constant image")
    }

    /// Image from 8-bit levels, each mapped to `level / 255`.
    pub fn from_levels(width: usize, height: usize, levels: &[u8]) -> Result<Self> {
        check_dims(width, height, levels.len())?;
        Ok(Self {
            width,
            height,
            pixels: levels.iter().map(|&l| f64::from(l) / MAX_LEVEL).collect(),
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel; values are
    /// clamped into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!((0.0..=1.0).contains(&v));
        self.pixels[y * self.width + x] = v;
    }

    /// 8-bit level of one pixel, `round(v * 255)`.
    #[inline]
    pub fn level(&self, x: usize, y: usize) -> u8 {
        to_level(self.get(x, y))
    }

    pub fn to_levels(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| to_level(v)).collect()
    }

    /// Snaps every pixel onto the 8-bit grid.
    pub fn quantized(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .map(|&v| f64::from(to_level(v)) / MAX_LEVEL)
                .collect(),
        }
    }

    pub fn same_dims(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Applies `f` to every pixel, clamping the result into `[0, 1]`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| f(v).clamp(0.0, 1.0)).collect(),
        }
    }

    /// Rescales so the maximum becomes 1. All-zero images are returned as is.
    pub fn normalized_to_max(&self) -> Self {
        let max = self.pixels.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return self.clone();
        }
        self.map(|v| v / max)
    }
}

#[inline]
pub(crate) fn to_level(v: f64) -> u8 {
    (v * MAX_LEVEL).round().clamp(0.0, MAX_LEVEL) as u8
}

/// Gray inversion, `v -> 1 - v`.
pub fn invert(img: &GrayImage) -> GrayImage {
    img.map(|v| 1.0 - v)
}

/// Boolean raster; `true` marks foreground (crack).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask.
    ///
    /// # Panics
    /// Panics if a dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.bits[y * width + x] = f(x, y);
            }
        }
        mask
    }

    /// Foreground wherever the image is strictly positive.
    pub fn from_image(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            bits: img.pixels().iter().map(|&v| v > 0.0).collect(),
        }
    }

    pub fn from_coords(
        width: usize,
        height: usize,
        coords: impl IntoIterator<Item = PixelCoord>,
    ) -> Result<Self> {
        let mut mask = Self::new(width, height);
        for c in coords {
            if c.x >= width || c.y >= height {
                return Err(Error::OutOfBounds {
                    x: c.x,
                    y: c.y,
                    width,
                    height,
                });
            }
            mask.set(c.x, c.y, true);
        }
        Ok(mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Like [`get`](Self::get) but `false` for coordinates outside the mask.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| PixelCoord::new(i % w, i / w))
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn check_same(&self, other: &BinaryMask) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            })
        }
    }

    pub fn union(&self, other: &BinaryMask) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a || b))
    }

    pub fn intersection(&self, other: &BinaryMask) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a && b))
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Foreground as 1.0, background as 0.0.
    pub fn to_image(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_intensity() {
        assert!(GrayImage::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(GrayImage::new(0, 1, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn invert_examples() {
        let img = GrayImage::new(1, 1, vec![0.0]).unwrap();
        assert_eq!(invert(&img).pixels(), &[1.0]);
        let img = GrayImage::new(2, 1, vec![0.25, 0.75]).unwrap();
        assert_eq!(invert(&img).pixels(), &[0.75, 0.25]);
    }

    #[test]
    fn level_rounds_to_nearest() {
        let img = GrayImage::new(3, 1, vec![0.0, 128.0 / 255.0, 1.0]).unwrap();
        assert_eq!(img.to_levels(), vec![0, 128, 255]);
    }

    #[test]
    fn foreground_is_raster_ordered() {
        let mask = BinaryMask::from_fn(3, 2, |x, y| (x + y) % 2 == 0);
        let coords: Vec<_> = mask.foreground().collect();
        assert_eq!(
            coords,
            vec![
                PixelCoord::new(0, 0),
                PixelCoord::new(2, 0),
                PixelCoord::new(1, 1)
            ]
        );
        assert_eq!(mask.count(), 3);
    }

    #[test]
    fn union_rejects_mismatched_masks() {
        let a = BinaryMask::new(2, 2);
        let b = BinaryMask::new(3, 2);
        assert!(matches!(a.union(&b), Err(Error::DimensionMismatch { .. })));
    }
}
