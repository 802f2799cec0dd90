//! Brute-force reference implementations and random fixtures.
#![allow(dead_code)]

use pavecrack::eval::PixelSet;
use pavecrack::raster::MAX_LEVEL;
use pavecrack::{BinaryMask, GrayImage, PixelCoord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 8-bit image with side lengths in `1..=max_side`.
pub fn random_image(rng: &mut ChaCha8Rng, max_side: usize) -> GrayImage {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    let levels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
    GrayImage::from_levels(w, h, &levels).unwrap()
}

/// Random image with few distinct levels, so ties are common.
pub fn random_coarse_image(rng: &mut ChaCha8Rng, max_side: usize) -> GrayImage {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    let palette: Vec<u8> = (0..rng.gen_range(1..5)).map(|_| rng.gen()).collect();
    let levels: Vec<u8> = (0..w * h)
        .map(|_| palette[rng.gen_range(0..palette.len())])
        .collect();
    GrayImage::from_levels(w, h, &levels).unwrap()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, span: usize) -> PixelSet {
    PixelSet::new((0..n).map(|_| PixelCoord::new(rng.gen_range(0..span), rng.gen_range(0..span))))
}

pub fn level(img: &GrayImage, x: usize, y: usize) -> u64 {
    u64::from(img.level(x, y))
}

pub fn brute_rect_sum(img: &GrayImage, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
    let mut s = 0;
    for y in y0..=y1 {
        for x in x0..=x1 {
            s += level(img, x, y);
        }
    }
    s
}

/// In-bounds pixels of the `w x w` window around `(x, y)`.
fn clipped_window(img: &GrayImage, x: usize, y: usize, w: usize) -> Vec<(usize, usize)> {
    let half = (w / 2) as i64;
    let mut out = Vec::new();
    for dy in -half..=half {
        for dx in -half..=half {
            let (sx, sy) = (x as i64 + dx, y as i64 + dy);
            if sx >= 0 && sy >= 0 && (sx as usize) < img.width() && (sy as usize) < img.height() {
                out.push((sx as usize, sy as usize));
            }
        }
    }
    out
}

pub fn brute_window_mean(img: &GrayImage, x: usize, y: usize, w: usize) -> f64 {
    let win = clipped_window(img, x, y, w);
    let sum: f64 = win.iter().map(|&(sx, sy)| f64::from(img.level(sx, sy)) / MAX_LEVEL).sum();
    sum / win.len() as f64
}

#[derive(Clone, Copy, Debug)]
pub enum Shape {
    Square(usize),
    Cross(usize),
    Disk(usize),
}

impl Shape {
    pub fn contains(self, dx: i64, dy: i64) -> bool {
        match self {
            Shape::Square(side) => {
                let h = (side / 2) as i64;
                dx.abs() <= h && dy.abs() <= h
            }
            Shape::Cross(side) => {
                let h = (side / 2) as i64;
                (dx == 0 && dy.abs() <= h) || (dy == 0 && dx.abs() <= h)
            }
            Shape::Disk(r) => dx * dx + dy * dy <= (r * r) as i64,
        }
    }

    fn reach(self) -> i64 {
        match self {
            Shape::Square(s) | Shape::Cross(s) => (s / 2) as i64,
            Shape::Disk(r) => r as i64,
        }
    }
}

fn neighborhood(img: &GrayImage, x: usize, y: usize, shape: Shape) -> Vec<f64> {
    let r = shape.reach();
    let mut vals = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let (sx, sy) = (x as i64 + dx, y as i64 + dy);
            if shape.contains(dx, dy)
                && sx >= 0
                && sy >= 0
                && (sx as usize) < img.width()
                && (sy as usize) < img.height()
            {
                vals.push(img.get(sx as usize, sy as usize));
            }
        }
    }
    vals
}

pub fn brute_median(img: &GrayImage, shape: Shape) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut v = neighborhood(img, x, y, shape);
        v.sort_by(f64::total_cmp);
        v[(v.len() - 1) / 2]
    })
}

pub fn brute_erode(img: &GrayImage, shape: Shape) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        neighborhood(img, x, y, shape).into_iter().fold(f64::INFINITY, f64::min)
    })
}

pub fn brute_dilate(img: &GrayImage, shape: Shape) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        neighborhood(img, x, y, shape).into_iter().fold(f64::NEG_INFINITY, f64::max)
    })
}

/// Pixels with `I > m·[1 + k·((I−m)/(1−(I−m)) − 1)]`, local mean by direct
/// summation; the pole counts as above.
pub fn brute_singh(img: &GrayImage, k: f64, w: usize) -> BinaryMask {
    BinaryMask::from_fn(img.width(), img.height(), |x, y| {
        let m = brute_window_mean(img, x, y, w);
        let i = f64::from(img.level(x, y)) / MAX_LEVEL;
        let d = i - m;
        if (1.0 - d).abs() < 1e-9 {
            return true;
        }
        i > m * (1.0 + k * (d / (1.0 - d) - 1.0))
    })
}

/// Otsu level by maximizing `ω0·ω1·(μ0 − μ1)²` directly; first maximum wins.
pub fn brute_otsu(img: &GrayImage) -> u8 {
    let levels: Vec<u8> = img.to_levels();
    let n = levels.len() as f64;
    let mut best = (f64::NEG_INFINITY, None);
    for t in 0..255u8 {
        let lo: Vec<f64> = levels.iter().filter(|&&l| l <= t).map(|&l| f64::from(l)).collect();
        let hi: Vec<f64> = levels.iter().filter(|&&l| l > t).map(|&l| f64::from(l)).collect();
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (w0, w1) = (lo.len() as f64 / n, hi.len() as f64 / n);
        let var = w0 * w1 * (mean(&lo) - mean(&hi)).powi(2);
        if var > best.0 * (1.0 + 1e-12) {
            best = (var, Some(t));
        }
    }
    best.1.unwrap_or_else(|| *levels.iter().min().unwrap())
}

pub fn brute_directed_hausdorff(a: &PixelSet, b: &PixelSet) -> f64 {
    a.points()
        .iter()
        .map(|p| {
            b.points()
                .iter()
                .map(|q| (p.x as f64 - q.x as f64).hypot(p.y as f64 - q.y as f64))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn brute_sm(a: &PixelSet, b: &PixelSet, tau: f64) -> f64 {
    let matched = |from: &PixelSet, to: &PixelSet| {
        from.points()
            .iter()
            .filter(|p| {
                to.points()
                    .iter()
                    .any(|q| (p.x as f64 - q.x as f64).hypot(p.y as f64 - q.y as f64) <= tau)
            })
            .count()
    };
    100.0 * (matched(a, b) + matched(b, a)) as f64 / (a.len() + b.len()) as f64
}

pub fn max_abs_diff(a: &GrayImage, b: &GrayImage) -> f64 {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
