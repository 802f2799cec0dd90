//! Median filtering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborhoodShape {
    Square,
    Cross,
    Disk,
}

/// Filter window. `size` is the odd side length for square and cross
/// windows and the radius for disks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub shape: NeighborhoodShape,
    pub size: usize,
}

impl Default for Neighborhood {
    fn default() -> Self {
        Self::square(3)
    }
}

impl Neighborhood {
    pub fn square(side: usize) -> Self {
        Self {
            shape: NeighborhoodShape::Square,
            size: side,
        }
    }

    pub fn cross(side: usize) -> Self {
        Self {
            shape: NeighborhoodShape::Cross,
            size: side,
        }
    }

    pub fn disk(radius: usize) -> Self {
        Self {
            shape: NeighborhoodShape::Disk,
            size: radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.shape {
            NeighborhoodShape::Square | NeighborhoodShape::Cross
                if self.size == 0 || self.size % 2 == 0 =>
            {
                Err(Error::InvalidParameter(format!(
                    "{:?} neighborhood needs an odd side length, got {}",
                    self.shape, self.size
                )))
            }
            _ => Ok(()),
        }
    }

    /// Offsets `(dx, dy)` in raster order; always contains `(0, 0)`.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = match self.shape {
            NeighborhoodShape::Square | NeighborhoodShape::Cross => self.size / 2,
            NeighborhoodShape::Disk => self.size,
        } as isize;
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let keep = match self.shape {
                    NeighborhoodShape::Square => true,
                    NeighborhoodShape::Cross => dx == 0 || dy == 0,
                    NeighborhoodShape::Disk => dx * dx + dy * dy <= r * r,
                };
                if keep {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

/// Median over the in-bounds part of the neighborhood of every pixel. When
/// border clipping leaves an even count, the lower of the two middle values
/// is taken.
pub fn median_filter(img: &GrayImage, nb: &Neighborhood) -> Result<GrayImage> {
    nb.validate()?;
    let offsets = nb.offsets();
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let mut values = Vec::with_capacity(offsets.len());
        for (x, dst) in row.iter_mut().enumerate() {
            values.clear();
            for &(dx, dy) in &offsets {
                let (sx, sy) = (x as isize + dx, y as isize + dy);
                if sx >= 0 && sy >= 0 && (sx as usize) < w && (sy as usize) < h {
                    values.push(img.get(sx as usize, sy as usize));
                }
            }
            let mid = (values.len() - 1) / 2;
            let (_, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
            *dst = *m;
        }
    });
    GrayImage::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_isolated_speck() {
        let img = GrayImage::new(3, 3, vec![0., 0., 0., 0., 1., 0., 0., 0., 0.]).unwrap();
        let out = median_filter(&img, &Neighborhood::default()).unwrap();
        assert_eq!(out.get(1, 1), 0.0);
    }

    #[test]
    fn constant_image_unchanged() {
        let img = GrayImage::filled(7, 5, 0.4);
        for nb in [
            Neighborhood::square(3),
            Neighborhood::cross(5),
            Neighborhood::disk(2),
        ] {
            assert_eq!(median_filter(&img, &nb).unwrap(), img);
        }
    }

    #[test]
    fn even_count_takes_lower_middle() {
        // corner of a 3x3 square sees 4 values
        let img = GrayImage::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let out = median_filter(&img, &Neighborhood::square(3)).unwrap();
        assert_eq!(out.get(0, 0), 0.2);
    }

    #[test]
    fn shapes_contain_origin() {
        for nb in [
            Neighborhood::square(1),
            Neighborhood::cross(3),
            Neighborhood::disk(0),
            Neighborhood::disk(3),
        ] {
            assert!(nb.offsets().contains(&(0, 0)));
        }
        assert_eq!(Neighborhood::cross(3).offsets().len(), 5);
        assert_eq!(Neighborhood::disk(1).offsets().len(), 5);
        assert!(Neighborhood::square(4).validate().is_err());
    }

    #[test]
    fn step_edge_preserved_away_from_border() {
        let img = GrayImage::from_fn(12, 12, |x, _| if x < 6 { 0.2 } else { 0.9 });
        let out = median_filter(&img, &Neighborhood::square(3)).unwrap();
        for y in 1..11 {
            for x in 1..11 {
                assert_eq!(out.get(x, y), img.get(x, y));
            }
        }
    }
}
