//! Pavement crack detection on grayscale road-surface feature images.
//!
//! The detection pipeline runs in four stages:
//!
//! 1. **Preprocess**: median filtering, then a morphological bottom-hat that
//!    flattens illumination and suppresses bright lane markings.
//! 2. **Binarize**: local adaptive thresholding on integral-image means
//!    (Otsu's global threshold is kept as a baseline).
//! 3. **Enhance**: two rounds of sparse ball/stick tensor voting at
//!    increasing scale, filtering tokens by stick and ball saliency.
//! 4. **Clean up**: small-component removal and spur pruning.
//!
//! Detections are scored against reference masks with directed/symmetric
//! Hausdorff distances and a buffered-match similarity score ([`eval`]).

pub mod config;
pub mod error;
pub mod eval;
pub mod filter;
pub mod morphology;
pub mod pipeline;
pub mod raster;
pub mod synth;
pub mod threshold;
pub mod voting;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport, PixelSet};
pub use raster::{BinaryMask, GrayImage, IntegralImage, PixelCoord};
