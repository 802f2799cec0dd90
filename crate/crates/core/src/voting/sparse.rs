//! Sparse voting: votes are only received at existing tokens.

use rayon::prelude::*;

use super::field::{FieldKind, OrientedStickFields, VotingField, DEFAULT_STICK_ORIENTATIONS};
use super::tensor::{Eigen2, SymTensor2};
use crate::error::Result;
use crate::raster::{BinaryMask, GrayImage, PixelCoord};

const NO_TOKEN: u32 = u32::MAX;

/// Tensors attached to a sparse set of pixels, kept in raster order.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenField {
    width: usize,
    height: usize,
    coords: Vec<PixelCoord>,
    tensors: Vec<SymTensor2>,
    index: Vec<u32>,
}

impl TokenField {
    /// One token per foreground pixel, each holding `tensor`.
    pub fn from_mask(mask: &BinaryMask, tensor: SymTensor2) -> Self {
        let coords: Vec<_> = mask.foreground().collect();
        let tensors = vec![tensor; coords.len()];
        Self::assemble(mask.width(), mask.height(), coords, tensors)
    }

    /// Foreground pixels carry no orientation, so they start as ball tensors.
    pub fn encode_ball(mask: &BinaryMask) -> Self {
        Self::from_mask(mask, SymTensor2::BALL)
    }

    fn assemble(
        width: usize,
        height: usize,
        coords: Vec<PixelCoord>,
        tensors: Vec<SymTensor2>,
    ) -> Self {
        let mut index = vec![NO_TOKEN; width * height];
        for (i, c) in coords.iter().enumerate() {
            index[c.y * width + c.x] = i as u32;
        }
        Self {
            width,
            height,
            coords,
            tensors,
            index,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[PixelCoord] {
        &self.coords
    }

    pub fn tensors(&self) -> &[SymTensor2] {
        &self.tensors
    }

    pub fn tensor_at(&self, c: PixelCoord) -> Option<SymTensor2> {
        if c.x >= self.width || c.y >= self.height {
            return None;
        }
        match self.index[c.y * self.width + c.x] {
            NO_TOKEN => None,
            i => Some(self.tensors[i as usize]),
        }
    }

    fn with_tensors(&self, tensors: Vec<SymTensor2>) -> Self {
        debug_assert_eq!(tensors.len(), self.coords.len());
        Self {
            width: self.width,
            height: self.height,
            coords: self.coords.clone(),
            tensors,
            index: self.index.clone(),
        }
    }

    /// Keeps the tokens for which `keep(i)` holds.
    pub fn retain_indices(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let (coords, tensors): (Vec<_>, Vec<_>) = (0..self.len())
            .filter(|&i| keep(i))
            .map(|i| (self.coords[i], self.tensors[i]))
            .unzip();
        Self::assemble(self.width, self.height, coords, tensors)
    }

    pub fn to_mask(&self) -> BinaryMask {
        BinaryMask::from_coords(self.width, self.height, self.coords.iter().copied())
            .expect("token coordinates are in bounds")
    }

    pub fn eigen(&self) -> Vec<Eigen2> {
        self.tensors.iter().map(SymTensor2::eigen).collect()
    }

    pub fn saliency(&self) -> SaliencyMaps {
        SaliencyMaps::from_tokens(self)
    }

    /// Sums, for every token, `vote(voter, dx, dy)` over all other tokens
    /// within `radius`, where `(dx, dy)` is receiver minus voter. Voters are
    /// visited in raster order for every receiver, so the parallel gather is
    /// bit-identical to a sequential scatter.
    fn gather(
        &self,
        radius: usize,
        vote: impl Fn(usize, isize, isize) -> SymTensor2 + Sync,
    ) -> Vec<SymTensor2> {
        let r = radius as isize;
        let (w, h) = (self.width as isize, self.height as isize);
        self.coords
            .par_iter()
            .map(|rc| {
                let (rx, ry) = (rc.x as isize, rc.y as isize);
                let mut acc = SymTensor2::ZERO;
                for vy in (ry - r).max(0)..=(ry + r).min(h - 1) {
                    let row = &self.index[(vy * w) as usize..((vy + 1) * w) as usize];
                    for vx in (rx - r).max(0)..=(rx + r).min(w - 1) {
                        let vi = row[vx as usize];
                        if vi == NO_TOKEN || (vx == rx && vy == ry) {
                            continue;
                        }
                        acc += vote(vi as usize, rx - vx, ry - vy);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Accumulates votes from every token onto every other token within the
/// field radius. A ball field is weighted by each voter's ball component
/// `λ2`; a stick field is rotated to each voter's normal `e1` and weighted
/// by its stick component `λ1 − λ2`.
pub fn sparse_vote(tokens: &TokenField, field: &VotingField) -> Result<TokenField> {
    match field.kind() {
        FieldKind::Ball => Ok(sparse_ball_vote(tokens, field)),
        FieldKind::Stick => {
            let bank = OrientedStickFields::new(field.sigma(), DEFAULT_STICK_ORIENTATIONS)?;
            Ok(sparse_stick_vote(tokens, &bank))
        }
    }
}

pub fn sparse_ball_vote(tokens: &TokenField, field: &VotingField) -> TokenField {
    let weights: Vec<f64> = tokens
        .tensors
        .iter()
        .map(|t| t.eigen().ball_saliency())
        .collect();
    let acc = tokens.gather(field.radius(), |v, dx, dy| {
        let wgt = weights[v];
        if wgt == 0.0 {
            SymTensor2::ZERO
        } else {
            field.at(dx, dy) * wgt
        }
    });
    tokens.with_tensors(acc)
}

pub fn sparse_stick_vote(tokens: &TokenField, bank: &OrientedStickFields) -> TokenField {
    let voters: Vec<(usize, f64)> = tokens
        .tensors
        .iter()
        .map(|t| {
            let e = t.eigen();
            (bank.bin(e.normal_angle()), e.stick_saliency())
        })
        .collect();
    let acc = tokens.gather(bank.radius(), |v, dx, dy| {
        let (bin, wgt) = voters[v];
        if wgt == 0.0 {
            SymTensor2::ZERO
        } else {
            bank.field(bin).at(dx, dy) * wgt
        }
    });
    tokens.with_tensors(acc)
}

/// Dense stick (`λ1 − λ2`) and ball (`λ2`) saliency; zero off-token.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMaps {
    pub width: usize,
    pub height: usize,
    pub stick: Vec<f64>,
    pub ball: Vec<f64>,
}

impl SaliencyMaps {
    pub fn from_tokens(tokens: &TokenField) -> Self {
        let n = tokens.width * tokens.height;
        let mut stick = vec![0.0; n];
        let mut ball = vec![0.0; n];
        for (c, t) in tokens.coords.iter().zip(&tokens.tensors) {
            let e = t.eigen();
            let i = c.y * tokens.width + c.x;
            stick[i] = e.stick_saliency();
            ball[i] = e.ball_saliency();
        }
        Self {
            width: tokens.width,
            height: tokens.height,
            stick,
            ball,
        }
    }

    pub fn max_stick(&self) -> f64 {
        self.stick.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_ball(&self) -> f64 {
        self.ball.iter().copied().fold(0.0, f64::max)
    }

    fn to_image(&self, values: &[f64]) -> GrayImage {
        let max = values.iter().copied().fold(0.0, f64::max);
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        GrayImage::new(
            self.width,
            self.height,
            values.iter().map(|v| (v * scale).clamp(0.0, 1.0)).collect(),
        )
        .expect("normalized saliency")
    }

    /// Stick saliency scaled so its maximum is 1.
    pub fn stick_image(&self) -> GrayImage {
        self.to_image(&self.stick)
    }

    /// Ball saliency scaled so its maximum is 1.
    pub fn ball_image(&self) -> GrayImage {
        self.to_image(&self.ball)
    }
}
