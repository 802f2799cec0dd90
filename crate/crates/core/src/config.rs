//! Pipeline configuration.
//!
//! The file format is flat TOML: one typed `key = value` per parameter.
//! Missing keys take their defaults; unknown keys are rejected so that a
//! misspelled parameter cannot silently fall back to a default.
//!
//! | key | type | default |
//! |---|---|---|
//! | `median_shape` | `"square"`, `"cross"`, `"disk"` | `"square"` |
//! | `median_size` | odd side, or radius for disks | `3` |
//! | `bottomhat_radius` | disk radius | `15` |
//! | `singh_k` | bias in `[0, 1]` | `0.06` |
//! | `singh_w` | odd window side | `51` |
//! | `polarity` | `"dark"` or `"bright"` | `"dark"` |
//! | `sigma_ball` | round-one ball scale | `5.0` |
//! | `sigma_ball2` | round-two ball scale | `sigma_ball` |
//! | `sigma_stick1` | round-one stick scale | `5.0` |
//! | `sigma_stick2` | round-two stick scale | `15.0` |
//! | `t_stick1` | stick pre-filter fraction | `0.05` |
//! | `t_ball` | ball mask fraction | `0.30` |
//! | `t_stick2` | round-one stick fraction | `0.20` |
//! | `t_stick3` | round-two stick fraction | `0.25` |
//! | `min_area` | cleanup component size | `20` |
//! | `spur_iterations` | cleanup pruning passes | `3` |
//! | `ball_angles` | ball field orientations | `180` |
//! | `stick_orientations` | rotated stick fields | `72` |
//! | `tau` | evaluation search radius | `2.0` |
//! | `dump_saliency` | write saliency maps | `false` |
//!
//! With `polarity = "dark"` the bottom-hat response is inverted before
//! thresholding and cracks are the pixels at or below the local threshold.
//! With `"bright"` the response is thresholded directly and cracks are the
//! pixels above it.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::eval::DEFAULT_TAU;
use crate::filter::{Neighborhood, NeighborhoodShape};
use crate::morphology::StructuringElement;
use crate::threshold::{Polarity, SinghParams};
use crate::voting::{MultiScaleParams, DEFAULT_BALL_ANGLES, DEFAULT_STICK_ORIENTATIONS};

/// Accepts TOML integers where a float is expected (`sigma_ball = 5`).
fn float<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        F(f64),
        I(i64),
    }
    Ok(match Num::deserialize(d)? {
        Num::F(v) => v,
        Num::I(v) => v as f64,
    })
}

fn opt_float<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    float(d).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub median_shape: NeighborhoodShape,
    pub median_size: usize,
    pub bottomhat_radius: usize,
    #[serde(deserialize_with = "float")]
    pub singh_k: f64,
    pub singh_w: usize,
    pub polarity: Polarity,
    #[serde(deserialize_with = "float")]
    pub sigma_ball: f64,
    #[serde(
        deserialize_with = "opt_float",
        skip_serializing_if = "Option::is_none"
    )]
    pub sigma_ball2: Option<f64>,
    #[serde(deserialize_with = "float")]
    pub sigma_stick1: f64,
    #[serde(deserialize_with = "float")]
    pub sigma_stick2: f64,
    #[serde(deserialize_with = "float")]
    pub t_stick1: f64,
    #[serde(deserialize_with = "float")]
    pub t_ball: f64,
    #[serde(deserialize_with = "float")]
    pub t_stick2: f64,
    #[serde(deserialize_with = "float")]
    pub t_stick3: f64,
    pub min_area: usize,
    pub spur_iterations: usize,
    pub ball_angles: usize,
    pub stick_orientations: usize,
    #[serde(deserialize_with = "float")]
    pub tau: f64,
    pub dump_saliency: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let ms = MultiScaleParams::default();
        let singh = SinghParams::default();
        Self {
            median_shape: NeighborhoodShape::Square,
            median_size: 3,
            bottomhat_radius: 15,
            singh_k: singh.k,
            singh_w: singh.w,
            polarity: Polarity::Dark,
            sigma_ball: ms.sigma_ball,
            sigma_ball2: ms.sigma_ball2,
            sigma_stick1: ms.sigma_stick1,
            sigma_stick2: ms.sigma_stick2,
            t_stick1: ms.t_stick1,
            t_ball: ms.t_ball,
            t_stick2: ms.t_stick2,
            t_stick3: ms.t_stick3,
            min_area: ms.min_area,
            spur_iterations: ms.spur_iterations,
            ball_angles: DEFAULT_BALL_ANGLES,
            stick_orientations: DEFAULT_STICK_ORIENTATIONS,
            tau: DEFAULT_TAU,
            dump_saliency: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(flatten(&e.to_string())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.median().validate()?;
        self.singh().validate()?;
        self.multiscale().validate()?;
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be finite and >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn median(&self) -> Neighborhood {
        Neighborhood {
            shape: self.median_shape,
            size: self.median_size,
        }
    }

    pub fn bottomhat_element(&self) -> StructuringElement {
        StructuringElement::disk(self.bottomhat_radius)
    }

    pub fn singh(&self) -> SinghParams {
        SinghParams {
            k: self.singh_k,
            w: self.singh_w,
        }
    }

    pub fn multiscale(&self) -> MultiScaleParams {
        MultiScaleParams {
            sigma_ball: self.sigma_ball,
            sigma_ball2: self.sigma_ball2,
            sigma_stick1: self.sigma_stick1,
            sigma_stick2: self.sigma_stick2,
            t_stick1: self.t_stick1,
            t_ball: self.t_ball,
            t_stick2: self.t_stick2,
            t_stick3: self.t_stick3,
            min_area: self.min_area,
            spur_iterations: self.spur_iterations,
            ball_angles: self.ball_angles,
            stick_orientations: self.stick_orientations,
        }
    }
}

fn flatten(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}
