//! End-to-end detection and single-stage runs.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::filter::median_filter;
use crate::morphology::bottom_hat;
use crate::raster::{invert, BinaryMask, GrayImage};
use crate::threshold::{otsu_binarize, singh_binarize, Polarity};
use crate::voting::{cleanup, multiscale_vote, SaliencyMaps, VotingStage};

/// A single pipeline step that can be run in isolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Median,
    Bottomhat,
    Binarize,
    Otsu,
    Enhance,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Median,
        Stage::Bottomhat,
        Stage::Binarize,
        Stage::Otsu,
        Stage::Enhance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Median => "median",
            Stage::Bottomhat => "bottomhat",
            Stage::Binarize => "binarize",
            Stage::Otsu => "otsu",
            Stage::Enhance => "enhance",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Stage::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown stage {s:?}, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Output of a single stage.
#[derive(Debug, Clone, PartialEq)]
pub enum StageOutput {
    Image(GrayImage),
    Mask(BinaryMask),
}

/// Runs one stage on `input` as given:
///
/// - `median`, `bottomhat`: filtered grayscale image
/// - `binarize`, `otsu`: crack mask under the configured polarity
/// - `enhance`: tensor voting and cleanup on the mask `input > 0`
pub fn run_stage(stage: Stage, input: &GrayImage, cfg: &PipelineConfig) -> Result<StageOutput> {
    let out = match stage {
        Stage::Median => median_filter(input, &cfg.median()).map(StageOutput::Image),
        Stage::Bottomhat => Ok(StageOutput::Image(bottom_hat(
            input,
            &cfg.bottomhat_element(),
        ))),
        Stage::Binarize => {
            singh_binarize(input, &cfg.singh(), cfg.polarity).map(StageOutput::Mask)
        }
        Stage::Otsu => Ok(StageOutput::Mask(otsu_binarize(input, cfg.polarity))),
        Stage::Enhance => {
            let p = cfg.multiscale();
            multiscale_vote(&BinaryMask::from_image(input), &p, |_, _| {})
                .and_then(|m| cleanup(&m, &p))
                .map(StageOutput::Mask)
        }
    };
    out.map_err(|e| e.in_stage(stage.name()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
}

/// Foreground counts after each mask-producing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub binarized: usize,
    pub voted: usize,
    pub cleaned: usize,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub mask: BinaryMask,
    pub counts: StageCounts,
    pub timings: Vec<StageTiming>,
    /// Saliency of every voting pass; empty unless requested.
    pub saliency: Vec<(VotingStage, SaliencyMaps)>,
}

fn timed<T>(
    timings: &mut Vec<StageTiming>,
    stage: &'static str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    timings.push(StageTiming {
        stage,
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(out)
}

/// Median, bottom-hat, inversion, local threshold, multiscale voting and
/// cleanup. Saliency maps are kept when `cfg.dump_saliency` is set.
pub fn detect(img: &GrayImage, cfg: &PipelineConfig) -> Result<Detection> {
    cfg.validate()?;
    let mut timings = Vec::with_capacity(6);
    let smoothed = timed(&mut timings, "median", || median_filter(img, &cfg.median()))?;
    let hat = timed(&mut timings, "bottomhat", || {
        Ok(bottom_hat(&smoothed, &cfg.bottomhat_element()))
    })?;
    let binary = timed(&mut timings, "binarize", || {
        let source = match cfg.polarity {
            Polarity::Dark => invert(&hat),
            Polarity::Bright => hat,
        };
        singh_binarize(&source, &cfg.singh(), cfg.polarity)
    })?;
    let p = cfg.multiscale();
    let mut saliency = Vec::new();
    let voted = timed(&mut timings, "enhance", || {
        multiscale_vote(&binary, &p, |stage, maps| {
            if cfg.dump_saliency {
                saliency.push((stage, maps.clone()));
            }
        })
    })?;
    let mask = timed(&mut timings, "cleanup", || cleanup(&voted, &p))?;
    Ok(Detection {
        counts: StageCounts {
            binarized: binary.count(),
            voted: voted.count(),
            cleaned: mask.count(),
        },
        mask,
        timings,
        saliency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_names_round_trip() {
        for st in Stage::ALL {
            assert_eq!(st.name().parse::<Stage>().unwrap(), st);
        }
        let err = "tophat".parse::<Stage>().unwrap_err();
        assert!(err.to_string().contains("tophat"));
    }

    #[test]
    fn flat_image_detects_nothing() {
        let img = GrayImage::filled(64, 48, 0.6);
        let det = detect(&img, &PipelineConfig::default()).unwrap();
        assert!(det.mask.is_empty());
        assert_eq!(det.counts.binarized, 0);
        let names: Vec<_> = det.timings.iter().map(|t| t.stage).collect();
        assert_eq!(
            names,
            ["median", "bottomhat", "binarize", "enhance", "cleanup"]
        );
    }

    #[test]
    fn stage_errors_carry_stage_name() {
        let cfg = PipelineConfig {
            median_size: 4,
            ..Default::default()
        };
        let err = run_stage(Stage::Median, &GrayImage::filled(8, 8, 0.5), &cfg).unwrap_err();
        assert_eq!(err.stage(), Some("median"));
        assert_eq!(err.kind(), "invalid_parameter");
    }

    #[test]
    fn dump_collects_every_pass() {
        let img = GrayImage::from_fn(96, 64, |x, y| {
            if (30..34).contains(&y) && (10..86).contains(&x) {
                0.2
            } else {
                0.7
            }
        });
        let cfg = PipelineConfig {
            dump_saliency: true,
            ..Default::default()
        };
        let det = detect(&img, &cfg).unwrap();
        assert_eq!(det.saliency.len(), 4);
        assert!(det.mask.count() > 0);
    }
}
