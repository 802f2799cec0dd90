//! Scoring a detected crack mask against a reference mask.
//!
//! Distances are Euclidean in pixel units. Directed Hausdorff distances are
//! read off an exact squared Euclidean distance transform, so they match a
//! brute-force min/max bit for bit.
//!
//! The similarity score `SM` uses a buffered-match definition: the share of
//! pixels of either set lying within `tau` of the other set,
//!
//! ```text
//! SM = 100 · (|{a ∈ A : d(a, B) ≤ τ}| + |{b ∈ B : d(b, A) ≤ τ}|) / (|A| + |B|)
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, PixelCoord};

/// Label attached to reported SM values.
pub const SM_DEFINITION: &str = "buffered-match";

pub const DEFAULT_TAU: f64 = 2.0;

/// Deduplicated set of pixel coordinates, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PixelSet {
    points: Vec<PixelCoord>,
}

impl PixelSet {
    pub fn new(points: impl IntoIterator<Item = PixelCoord>) -> Self {
        let mut points: Vec<_> = points.into_iter().collect();
        points.sort_unstable_by_key(|p| (p.y, p.x));
        points.dedup();
        Self { points }
    }

    pub fn from_mask(mask: &BinaryMask) -> Self {
        Self {
            points: mask.foreground().collect(),
        }
    }

    pub fn points(&self) -> &[PixelCoord] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let first = self.points.first()?;
        Some(self.points.iter().fold(
            (first.x, first.y, first.x, first.y),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        ))
    }
}

const FAR: i64 = i64::MAX;

/// Lower envelope of parabolas `(q − v)² + f(v)` over the finite samples.
fn edt_1d(f: &[i64], out: &mut [i64]) {
    let sites: Vec<usize> = (0..f.len()).filter(|&i| f[i] != FAR).collect();
    if sites.is_empty() {
        out.fill(FAR);
        return;
    }
    let key = |q: usize| f[q] as f64 + (q * q) as f64;
    let meet = |q: usize, v: usize| (key(q) - key(v)) / (2.0 * (q as f64 - v as f64));

    let mut v = vec![sites[0]];
    let mut z = vec![f64::NEG_INFINITY];
    for &q in &sites[1..] {
        let mut s = meet(q, *v.last().unwrap());
        while s <= *z.last().unwrap() {
            v.pop();
            z.pop();
            s = meet(q, *v.last().unwrap());
        }
        v.push(q);
        z.push(s);
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as i64 - v[k] as i64;
        *o = d * d + f[v[k]];
    }
}

/// Exact squared distance to the nearest point of a set, over a window.
struct DistanceMap {
    x0: usize,
    y0: usize,
    width: usize,
    d2: Vec<i64>,
}

impl DistanceMap {
    /// Transform of `target` over the box `[x0, x1] x [y0, y1]`, which must
    /// contain every target point.
    fn new(target: &PixelSet, (x0, y0, x1, y1): (usize, usize, usize, usize)) -> Self {
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut grid = vec![FAR; w * h];
        for p in target.points() {
            grid[(p.y - y0) * w + (p.x - x0)] = 0;
        }
        let mut col = vec![0; h];
        let mut col_out = vec![0; h];
        for x in 0..w {
            for y in 0..h {
                col[y] = grid[y * w + x];
            }
            edt_1d(&col, &mut col_out);
            for y in 0..h {
                grid[y * w + x] = col_out[y];
            }
        }
        let mut row_out = vec![0; w];
        for row in grid.chunks_mut(w) {
            edt_1d(row, &mut row_out);
            row.copy_from_slice(&row_out);
        }
        Self {
            x0,
            y0,
            width: w,
            d2: grid,
        }
    }

    fn at(&self, p: PixelCoord) -> i64 {
        self.d2[(p.y - self.y0) * self.width + (p.x - self.x0)]
    }
}

fn joint_bounds(a: &PixelSet, b: &PixelSet) -> Result<(usize, usize, usize, usize)> {
    let (Some(ba), Some(bb)) = (a.bounds(), b.bounds()) else {
        return Err(Error::EmptySet);
    };
    Ok((ba.0.min(bb.0), ba.1.min(bb.1), ba.2.max(bb.2), ba.3.max(bb.3)))
}

/// Squared distance from each point of `from` to the nearest point of `to`.
fn nearest_sq(from: &PixelSet, to: &PixelSet) -> Result<Vec<i64>> {
    let map = DistanceMap::new(to, joint_bounds(from, to)?);
    Ok(from.points().iter().map(|&p| map.at(p)).collect())
}

/// `h(A, B) = max over a in A of the distance from a to B`.
pub fn directed_hausdorff(a: &PixelSet, b: &PixelSet) -> Result<f64> {
    let worst = nearest_sq(a, b)?.into_iter().max().unwrap_or(0);
    Ok((worst as f64).sqrt())
}

/// `H(A, B) = max(h(A, B), h(B, A))`.
pub fn hausdorff(a: &PixelSet, b: &PixelSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "search radius must be finite and >= 0, got {tau}"
        )))
    }
}

fn matched(sq: &[i64], tau: f64) -> usize {
    sq.iter().filter(|&&d| (d as f64).sqrt() <= tau).count()
}

/// Buffered-match similarity in `[0, 100]`.
pub fn sm_score(detected: &PixelSet, reference: &PixelSet, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let ab = nearest_sq(detected, reference)?;
    let ba = nearest_sq(reference, detected)?;
    Ok(sm_from_counts(
        matched(&ab, tau),
        matched(&ba, tau),
        detected.len(),
        reference.len(),
    ))
}

fn sm_from_counts(ma: usize, mb: usize, na: usize, nb: usize) -> f64 {
    100.0 * (ma + mb) as f64 / (na + nb) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// `h(detected, reference)`.
    pub h_ab: f64,
    /// `h(reference, detected)`.
    pub h_ba: f64,
    pub hausdorff: f64,
    pub sm: f64,
    pub sm_definition: &'static str,
    pub detected_count: usize,
    pub reference_count: usize,
    pub tau: f64,
    /// Physical size of one pixel; when set, the distances above are
    /// already multiplied by it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_scale: Option<f64>,
}

impl EvalReport {
    /// Rescales the reported distances to physical units. `tau` and `SM`
    /// stay in pixels.
    pub fn with_pixel_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pixel scale must be positive, got {scale}"
            )));
        }
        self.h_ab *= scale;
        self.h_ba *= scale;
        self.hausdorff *= scale;
        self.pixel_scale = Some(scale);
        Ok(self)
    }
}

/// Scores `detected` against `reference` with search radius `tau`.
pub fn evaluate(detected: &BinaryMask, reference: &BinaryMask, tau: f64) -> Result<EvalReport> {
    if !detected.same_dims(reference) {
        return Err(Error::DimensionMismatch {
            left_width: detected.width(),
            left_height: detected.height(),
            right_width: reference.width(),
            right_height: reference.height(),
        });
    }
    check_tau(tau)?;
    let a = PixelSet::from_mask(detected);
    let b = PixelSet::from_mask(reference);
    let ab = nearest_sq(&a, &b)?;
    let ba = nearest_sq(&b, &a)?;
    let h_ab = (ab.iter().copied().max().unwrap_or(0) as f64).sqrt();
    let h_ba = (ba.iter().copied().max().unwrap_or(0) as f64).sqrt();
    Ok(EvalReport {
        h_ab,
        h_ba,
        hausdorff: h_ab.max(h_ba),
        sm: sm_from_counts(matched(&ab, tau), matched(&ba, tau), a.len(), b.len()),
        sm_definition: SM_DEFINITION,
        detected_count: a.len(),
        reference_count: b.len(),
        tau,
        pixel_scale: None,
    })
}
