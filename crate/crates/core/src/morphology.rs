//! Flat grayscale morphology and binary mask cleanup.
//!
//! Structuring elements are flat (zero height), so erosion and dilation
//! reduce to neighborhood minimum and maximum. Offsets that fall outside the
//! image are skipped rather than padded.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementShape {
    Square,
    Disk,
}

/// Flat, origin-symmetric structuring element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    shape: ElementShape,
    size: usize,
    /// Horizontal half-extent of the element on each row `dy = -r..=r`.
    row_half_widths: Vec<usize>,
}

impl StructuringElement {
    /// Square with odd side length.
    pub fn square(side: usize) -> Result<Self> {
        if side == 0 || side % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "square element needs an odd side, got {side}"
            )));
        }
        let half = side / 2;
        Ok(Self {
            shape: ElementShape::Square,
            size: side,
            row_half_widths: vec![half; side],
        })
    }

    /// All offsets with `dx² + dy² <= r²`.
    pub fn disk(radius: usize) -> Self {
        let r = radius as i64;
        let row_half_widths = (-r..=r)
            .map(|dy| {
                let rem = r * r - dy * dy;
                let mut h = (rem as f64).sqrt() as i64;
                while h * h > rem {
                    h -= 1;
                }
                while (h + 1) * (h + 1) <= rem {
                    h += 1;
                }
                h as usize
            })
            .collect();
        Self {
            shape: ElementShape::Disk,
            size: radius,
            row_half_widths,
        }
    }

    pub fn shape(&self) -> ElementShape {
        self.shape
    }

    /// Side length for squares, radius for disks.
    pub fn size(&self) -> usize {
        self.size
    }

    fn vertical_reach(&self) -> isize {
        (self.row_half_widths.len() / 2) as isize
    }

    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.vertical_reach();
        let mut out = Vec::new();
        for (row, &h) in self.row_half_widths.iter().enumerate() {
            let h = h as isize;
            for dx in -h..=h {
                out.push((dx, row as isize - r));
            }
        }
        out
    }
}

/// Sliding-window extreme over `[x - half, x + half]` clipped to the row,
/// using a monotonic deque.
fn sliding_extreme(row: &[f64], half: usize, out: &mut [f64], keep_front: fn(f64, f64) -> bool) {
    let n = row.len();
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(2 * half + 1);
    let mut next = 0;
    for x in 0..n {
        let hi = (x + half).min(n - 1);
        while next <= hi {
            while let Some(&back) = deque.back() {
                if keep_front(row[back], row[next]) {
                    break;
                }
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = x.saturating_sub(half);
        while deque.front().is_some_and(|&i| i < lo) {
            deque.pop_front();
        }
        out[x] = row[*deque.front().expect("window is nonempty")];
    }
}

fn flat_extreme(f: &GrayImage, b: &StructuringElement, minimum: bool) -> GrayImage {
    let (w, h) = (f.width(), f.height());
    let keep_front: fn(f64, f64) -> bool = if minimum {
        |front, new| front < new
    } else {
        |front, new| front > new
    };
    let pick = if minimum { f64::min } else { f64::max };

    let mut halves: Vec<usize> = b.row_half_widths.clone();
    halves.sort_unstable();
    halves.dedup();
    // one row-extreme image per distinct half-width
    let row_extremes: Vec<Vec<f64>> = halves
        .par_iter()
        .map(|&half| {
            let mut img = vec![0.0; w * h];
            for (src, dst) in f.pixels().chunks(w).zip(img.chunks_mut(w)) {
                sliding_extreme(src, half, dst, keep_front);
            }
            img
        })
        .collect();
    let layer_of: Vec<&[f64]> = b
        .row_half_widths
        .iter()
        .map(|hw| row_extremes[halves.binary_search(hw).unwrap()].as_slice())
        .collect();

    let reach = b.vertical_reach();
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let mut first = true;
        for (i, layer) in layer_of.iter().enumerate() {
            let sy = y as isize + i as isize - reach;
            if sy < 0 || sy as usize >= h {
                continue;
            }
            let src = &layer[sy as usize * w..(sy as usize + 1) * w];
            if first {
                row.copy_from_slice(src);
                first = false;
            } else {
                for (d, &s) in row.iter_mut().zip(src) {
                    *d = pick(*d, s);
                }
            }
        }
    });
    GrayImage::new(w, h, out).expect("extremes of valid intensities")
}

/// Flat erosion: neighborhood minimum over in-bounds offsets.
pub fn gray_erode(f: &GrayImage, b: &StructuringElement) -> GrayImage {
    flat_extreme(f, b, true)
}

/// Flat dilation: neighborhood maximum over in-bounds offsets.
pub fn gray_dilate(f: &GrayImage, b: &StructuringElement) -> GrayImage {
    flat_extreme(f, b, false)
}

pub fn gray_open(f: &GrayImage, b: &StructuringElement) -> GrayImage {
    gray_dilate(&gray_erode(f, b), b)
}

pub fn gray_close(f: &GrayImage, b: &StructuringElement) -> GrayImage {
    gray_erode(&gray_dilate(f, b), b)
}

/// Closing minus the original. Dark structures narrower than the element
/// respond strongly; everything else stays near zero.
pub fn bottom_hat(f: &GrayImage, b: &StructuringElement) -> GrayImage {
    let closed = gray_close(f, b);
    let pixels = closed
        .pixels()
        .iter()
        .zip(f.pixels())
        .map(|(&c, &v)| (c - v).clamp(0.0, 1.0))
        .collect();
    GrayImage::new(f.width(), f.height(), pixels).expect("clamped difference")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "8")]
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Self::Four),
            8 => Ok(Self::Eight),
            _ => Err(Error::InvalidParameter(format!(
                "connectivity must be 4 or 8, got {n}"
            ))),
        }
    }

    pub fn count(self) -> u8 {
        match self {
            Self::Four => 4,
            Self::Eight => 8,
        }
    }

    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Self::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Self::Eight => &RING,
        }
    }
}

/// 8-neighborhood in ring order starting north, clockwise (y grows down).
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Labels foreground components; returns per-pixel labels (0 = background)
/// and the area of each label (index 0 unused).
pub fn label_components(m: &BinaryMask, connectivity: Connectivity) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (m.width(), m.height());
    let mut labels = vec![0u32; w * h];
    let mut areas = vec![0usize];
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !m.bits()[start] || labels[start] != 0 {
            continue;
        }
        let label = areas.len() as u32;
        let mut area = 0;
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            area += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if m.get_signed(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if labels[j] == 0 {
                        labels[j] = label;
                        stack.push(j);
                    }
                }
            }
        }
        areas.push(area);
    }
    (labels, areas)
}

/// Drops every foreground component smaller than `min_area` pixels.
pub fn remove_small_components(
    m: &BinaryMask,
    min_area: usize,
    connectivity: Connectivity,
) -> Result<BinaryMask> {
    if min_area == 0 {
        return Err(Error::InvalidParameter("min_area must be >= 1".into()));
    }
    let (labels, areas) = label_components(m, connectivity);
    let bits = labels
        .iter()
        .map(|&l| l != 0 && areas[l as usize] >= min_area)
        .collect();
    BinaryMask::from_bits(m.width(), m.height(), bits)
}

/// True for a foreground pixel at the tip of a branch: its foreground
/// neighbors form a single contiguous run of at most three pixels around
/// the 8-neighborhood ring. A lone neighbor is the simplest case; a run of
/// two or three covers tips that touch a thicker trunk diagonally.
fn is_endpoint(m: &BinaryMask, x: usize, y: usize) -> bool {
    let ring: [bool; 8] =
        RING.map(|(dx, dy)| m.get_signed(x as isize + dx, y as isize + dy));
    let count = ring.iter().filter(|&&b| b).count();
    if count == 0 || count > 3 {
        return false;
    }
    let runs = (0..8).filter(|&i| ring[i] && !ring[(i + 7) % 8]).count();
    runs == 1
}

/// Removes branch tips `iterations` times. Each pass deletes all current
/// endpoints simultaneously; closed loops and isolated pixels are untouched.
pub fn binary_spur_prune(m: &BinaryMask, iterations: usize) -> BinaryMask {
    let mut cur = m.clone();
    for _ in 0..iterations {
        let tips: Vec<_> = cur
            .foreground()
            .filter(|c| is_endpoint(&cur, c.x, c.y))
            .collect();
        if tips.is_empty() {
            break;
        }
        for c in tips {
            cur.set(c.x, c.y, false);
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &GrayImage, b: &StructuringElement, minimum: bool) -> GrayImage {
        let offsets = b.offsets();
        GrayImage::from_fn(f.width(), f.height(), |x, y| {
            let vals = offsets.iter().filter_map(|&(dx, dy)| {
                let (sx, sy) = (x as isize + dx, y as isize + dy);
                (sx >= 0 && sy >= 0 && (sx as usize) < f.width() && (sy as usize) < f.height())
                    .then(|| f.get(sx as usize, sy as usize))
            });
            if minimum {
                vals.fold(f64::INFINITY, f64::min)
            } else {
                vals.fold(f64::NEG_INFINITY, f64::max)
            }
        })
    }

    #[test]
    fn disk_membership() {
        for r in 0..8usize {
            let d = StructuringElement::disk(r);
            let offs = d.offsets();
            let ri = r as isize;
            for dy in -ri..=ri {
                for dx in -ri..=ri {
                    assert_eq!(offs.contains(&(dx, dy)), dx * dx + dy * dy <= ri * ri);
                }
            }
            for &(dx, dy) in &offs {
                assert!(offs.contains(&(-dx, -dy)));
            }
        }
    }

    #[test]
    fn dark_pixel_erodes_to_disk() {
        let mut f = GrayImage::filled(11, 11, 1.0);
        f.set(5, 5, 0.0);
        let out = gray_erode(&f, &StructuringElement::disk(2));
        for y in 0..11isize {
            for x in 0..11isize {
                let inside = (x - 5).pow(2) + (y - 5).pow(2) <= 4;
                assert_eq!(out.get(x as usize, y as usize), if inside { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn bright_pixel_dilates_to_disk() {
        let mut f = GrayImage::filled(9, 9, 0.0);
        f.set(4, 4, 1.0);
        let out = gray_dilate(&f, &StructuringElement::disk(2));
        assert_eq!(out.pixels().iter().filter(|&&v| v == 1.0).count(), 13);
    }

    #[test]
    fn sliding_matches_brute_on_ramp() {
        let f = GrayImage::from_fn(23, 17, |x, y| ((x * 31 + y * 17) % 101) as f64 / 100.0);
        for b in [
            StructuringElement::disk(3),
            StructuringElement::square(5).unwrap(),
            StructuringElement::disk(12),
        ] {
            assert_eq!(gray_erode(&f, &b), brute(&f, &b, true));
            assert_eq!(gray_dilate(&f, &b), brute(&f, &b, false));
        }
    }

    #[test]
    fn constant_image_fixed() {
        let f = GrayImage::filled(8, 6, 0.3);
        let b = StructuringElement::disk(2);
        assert_eq!(gray_erode(&f, &b), f);
        assert_eq!(gray_dilate(&f, &b), f);
        assert_eq!(gray_open(&f, &b), f);
        assert_eq!(gray_close(&f, &b), f);
        assert!(bottom_hat(&f, &b).pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn isolated_pixel_removed() {
        let mut m = BinaryMask::new(5, 5);
        m.set(2, 2, true);
        let out = remove_small_components(&m, 2, Connectivity::Eight).unwrap();
        assert!(out.is_empty());
        assert_eq!(remove_small_components(&m, 1, Connectivity::Eight).unwrap(), m);
        assert!(remove_small_components(&m, 0, Connectivity::Four).is_err());
    }

    #[test]
    fn large_component_survives_specks() {
        let mut m = BinaryMask::new(40, 40);
        for y in 5..15 {
            for x in 5..15 {
                m.set(x, y, true);
            }
        }
        for (x, y) in [(30, 30), (30, 5), (5, 30)] {
            for i in 0..3 {
                m.set(x + i, y, true);
            }
        }
        let out = remove_small_components(&m, 10, Connectivity::Eight).unwrap();
        assert_eq!(out.count(), 100);
        assert!(out.get(5, 5) && !out.get(30, 30));
    }

    #[test]
    fn diagonal_connectivity_matters() {
        let m = BinaryMask::from_fn(4, 4, |x, y| x == y);
        let (_, four) = label_components(&m, Connectivity::Four);
        let (_, eight) = label_components(&m, Connectivity::Eight);
        assert_eq!(four.len() - 1, 4);
        assert_eq!(eight.len() - 1, 1);
    }

    #[test]
    fn prune_stub_and_trunk_ends() {
        // trunk on row 3, x = 0..10; stub at (5,4), (5,5)
        let mut m = BinaryMask::new(12, 8);
        for x in 0..10 {
            m.set(x, 3, true);
        }
        m.set(5, 4, true);
        m.set(5, 5, true);
        let out = binary_spur_prune(&m, 2);
        assert!(!out.get(5, 4) && !out.get(5, 5));
        assert_eq!(out.count(), 6);
        assert!((2..8).all(|x| out.get(x, 3)));
        assert_eq!(binary_spur_prune(&m, 0), m);
    }

    #[test]
    fn prune_leaves_loops_alone() {
        let m = BinaryMask::from_fn(10, 10, |x, y| {
            (2..=7).contains(&x) && (2..=7).contains(&y) && (x == 2 || x == 7 || y == 2 || y == 7)
        });
        assert_eq!(binary_spur_prune(&m, 5), m);
    }
}
