//! Two-round sparse ball/stick voting that separates cracks from the false
//! cracks left by binarization.
//!
//! Round one votes with ball fields at `sigma_ball`, drops tokens with very
//! low curve saliency, stores a thresholded ball-saliency mask (junctions),
//! then votes with a small-scale stick field. Round two re-encodes the
//! survivors and repeats with a large-scale stick field. The result is the
//! union of the final stick mask and the stored ball mask, cleaned with
//! small-component removal and spur pruning.
//!
//! All thresholds are fractions of the maximum saliency of their round.

use serde::{Deserialize, Serialize};

use super::field::{build_ball_field, OrientedStickFields, DEFAULT_STICK_ORIENTATIONS};
use super::sparse::{sparse_ball_vote, sparse_stick_vote, SaliencyMaps, TokenField};
use crate::error::{Error, Result};
use crate::morphology::{binary_spur_prune, remove_small_components, Connectivity};
use crate::raster::BinaryMask;

pub const DEFAULT_BALL_ANGLES: usize = 180;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiScaleParams {
    pub sigma_ball: f64,
    /// Ball scale for round two; `None` reuses `sigma_ball`.
    pub sigma_ball2: Option<f64>,
    pub sigma_stick1: f64,
    pub sigma_stick2: f64,
    pub t_stick1: f64,
    pub t_ball: f64,
    pub t_stick2: f64,
    pub t_stick3: f64,
    pub min_area: usize,
    pub spur_iterations: usize,
    pub ball_angles: usize,
    pub stick_orientations: usize,
}

impl Default for MultiScaleParams {
    fn default() -> Self {
        Self {
            sigma_ball: 5.0,
            sigma_ball2: None,
            sigma_stick1: 5.0,
            sigma_stick2: 15.0,
            t_stick1: 0.05,
            t_ball: 0.30,
            t_stick2: 0.20,
            t_stick3: 0.25,
            min_area: 20,
            spur_iterations: 3,
            ball_angles: DEFAULT_BALL_ANGLES,
            stick_orientations: DEFAULT_STICK_ORIENTATIONS,
        }
    }
}

impl MultiScaleParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, s) in [
            ("sigma_ball", self.sigma_ball),
            ("sigma_ball2", self.sigma_ball2.unwrap_or(self.sigma_ball)),
            ("sigma_stick1", self.sigma_stick1),
            ("sigma_stick2", self.sigma_stick2),
        ] {
            if !(s.is_finite() && s > 0.0) {
                return bad(format!("{name} must be positive, got {s}"));
            }
        }
        if self.sigma_stick1 >= self.sigma_stick2 {
            return bad(format!(
                "sigma_stick1 ({}) must be smaller than sigma_stick2 ({})",
                self.sigma_stick1, self.sigma_stick2
            ));
        }
        for (name, t) in [
            ("t_stick1", self.t_stick1),
            ("t_ball", self.t_ball),
            ("t_stick2", self.t_stick2),
            ("t_stick3", self.t_stick3),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("{name} must be in [0, 1], got {t}"));
            }
        }
        if self.t_stick2 >= self.t_stick3 {
            return bad(format!(
                "t_stick2 ({}) must be smaller than t_stick3 ({})",
                self.t_stick2, self.t_stick3
            ));
        }
        if self.min_area == 0 {
            return bad("min_area must be >= 1".into());
        }
        if self.ball_angles < 8 {
            return bad(format!("ball_angles must be >= 8, got {}", self.ball_angles));
        }
        if self.stick_orientations < 4 || self.stick_orientations % 2 != 0 {
            return bad(format!(
                "stick_orientations must be even and >= 4, got {}",
                self.stick_orientations
            ));
        }
        Ok(())
    }

    fn sigma_ball_round2(&self) -> f64 {
        self.sigma_ball2.unwrap_or(self.sigma_ball)
    }
}

/// Saliency snapshots emitted while enhancing, for debugging dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotingStage {
    Round1Ball,
    Round1Stick,
    Round2Ball,
    Round2Stick,
}

impl VotingStage {
    pub fn name(self) -> &'static str {
        match self {
            Self::Round1Ball => "round1_ball",
            Self::Round1Stick => "round1_stick",
            Self::Round2Ball => "round2_ball",
            Self::Round2Stick => "round2_stick",
        }
    }
}

/// Tokens whose stick saliency is strictly above `fraction` of the maximum.
fn stick_above(tokens: &TokenField, sal: &SaliencyMaps, fraction: f64) -> BinaryMask {
    let cut = fraction * sal.max_stick();
    threshold_tokens(tokens, &sal.stick, cut)
}

fn threshold_tokens(tokens: &TokenField, values: &[f64], cut: f64) -> BinaryMask {
    let w = tokens.width();
    BinaryMask::from_coords(
        tokens.width(),
        tokens.height(),
        tokens
            .coords()
            .iter()
            .copied()
            .filter(|c| values[c.y * w + c.x] > cut),
    )
    .expect("token coordinates are in bounds")
}

/// Ball vote, then drop tokens with stick saliency below `t_stick1` of
/// the maximum. Returns the voted tokens, the survivors and the saliency.
fn ball_round(
    mask: &BinaryMask,
    sigma: f64,
    angles: usize,
    t_stick1: Option<f64>,
) -> Result<(TokenField, SaliencyMaps)> {
    let field = build_ball_field(sigma, angles)?;
    let voted = sparse_ball_vote(&TokenField::encode_ball(mask), &field);
    let sal = voted.saliency();
    let survivors = match t_stick1 {
        Some(t) => {
            let cut = t * sal.max_stick();
            let w = voted.width();
            let coords = voted.coords().to_vec();
            voted.retain_indices(|i| sal.stick[coords[i].y * w + coords[i].x] >= cut)
        }
        None => voted,
    };
    Ok((survivors, sal))
}

/// One ball pass at `sigma_ball` (with the conservative `t_stick1` filter)
/// followed by one stick pass at `sigma_stick`, thresholded at `t_stick` of
/// the maximum stick saliency.
pub fn stick_pass(
    mask: &BinaryMask,
    sigma_ball: f64,
    sigma_stick: f64,
    t_stick1: f64,
    t_stick: f64,
) -> Result<BinaryMask> {
    if mask.is_empty() {
        return Ok(mask.clone());
    }
    let (tokens, _) = ball_round(mask, sigma_ball, DEFAULT_BALL_ANGLES, Some(t_stick1))?;
    let bank = OrientedStickFields::new(sigma_stick, DEFAULT_STICK_ORIENTATIONS)?;
    let voted = sparse_stick_vote(&tokens, &bank);
    Ok(stick_above(&voted, &voted.saliency(), t_stick))
}

/// Both voting rounds followed by [`cleanup`].
pub fn multiscale_enhance(mask: &BinaryMask, p: &MultiScaleParams) -> Result<BinaryMask> {
    multiscale_enhance_traced(mask, p, |_, _| {})
}

/// [`multiscale_enhance`] reporting the saliency maps of every voting pass
/// to `observe`.
pub fn multiscale_enhance_traced(
    mask: &BinaryMask,
    p: &MultiScaleParams,
    observe: impl FnMut(VotingStage, &SaliencyMaps),
) -> Result<BinaryMask> {
    cleanup(&multiscale_vote(mask, p, observe)?, p)
}

/// The two voting rounds without cleanup: the union of the round-two stick
/// mask and the round-one ball mask.
pub fn multiscale_vote(
    mask: &BinaryMask,
    p: &MultiScaleParams,
    mut observe: impl FnMut(VotingStage, &SaliencyMaps),
) -> Result<BinaryMask> {
    p.validate()?;
    if mask.is_empty() {
        return Ok(mask.clone());
    }

    // round one
    let (survivors, ball_sal) = ball_round(mask, p.sigma_ball, p.ball_angles, Some(p.t_stick1))?;
    observe(VotingStage::Round1Ball, &ball_sal);
    let all_tokens = TokenField::encode_ball(mask);
    let ball_mask = threshold_tokens(&all_tokens, &ball_sal.ball, p.t_ball * ball_sal.max_ball());

    let bank1 = OrientedStickFields::new(p.sigma_stick1, p.stick_orientations)?;
    let voted1 = sparse_stick_vote(&survivors, &bank1);
    let sal1 = voted1.saliency();
    observe(VotingStage::Round1Stick, &sal1);
    let stick_mask1 = stick_above(&voted1, &sal1, p.t_stick2);

    // round two
    let stick_mask2 = if stick_mask1.is_empty() {
        stick_mask1
    } else {
        let (tokens2, ball_sal2) =
            ball_round(&stick_mask1, p.sigma_ball_round2(), p.ball_angles, None)?;
        observe(VotingStage::Round2Ball, &ball_sal2);
        let bank2 = OrientedStickFields::new(p.sigma_stick2, p.stick_orientations)?;
        let voted2 = sparse_stick_vote(&tokens2, &bank2);
        let sal2 = voted2.saliency();
        observe(VotingStage::Round2Stick, &sal2);
        stick_above(&voted2, &sal2, p.t_stick3)
    };

    stick_mask2.union(&ball_mask)
}

/// Small-component removal followed by spur pruning.
pub fn cleanup(mask: &BinaryMask, p: &MultiScaleParams) -> Result<BinaryMask> {
    let cleaned = remove_small_components(mask, p.min_area, Connectivity::Eight)?;
    Ok(binary_spur_prune(&cleaned, p.spur_iterations))
}
