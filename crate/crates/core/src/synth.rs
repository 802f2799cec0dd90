//! Synthetic road-surface scenes with exact ground truth.
//!
//! A scene is a background (optionally with a horizontal illumination ramp),
//! bright lane stripes, small dark specks and dark crack polylines, plus
//! uniform noise. Cracks, stripes and specks are rasterized by pixel-center
//! distance, so the ground-truth mask is exactly the set of crack pixels.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polyline {
    /// Vertices in pixel coordinates (x, y).
    pub points: Vec<[f64; 2]>,
    pub width: f64,
    pub intensity: f64,
}

impl Polyline {
    /// Distance from `(x, y)` to the nearest point of the polyline.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        if self.points.len() == 1 {
            let [px, py] = self.points[0];
            return (x - px).hypot(y - py);
        }
        self.points
            .windows(2)
            .map(|seg| segment_distance([x, y], seg[0], seg[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|s| (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1]))
            .sum()
    }

    fn covers(&self, x: f64, y: f64) -> bool {
        self.distance(x, y) <= self.width / 2.0
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - (a[0] + t * dx)).hypot(p[1] - (a[1] + t * dy))
}

fn default_background() -> f64 {
    0.7
}

fn default_speck_intensity() -> f64 {
    0.25
}

fn default_speck_radius() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSceneSpec {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_background")]
    pub background: f64,
    /// Uniform noise is drawn from `[-noise_amplitude, noise_amplitude]`.
    #[serde(default)]
    pub noise_amplitude: f64,
    /// Brightness added linearly across x, from `-gradient/2` on the left
    /// edge to `+gradient/2` on the right. Applies to every element.
    #[serde(default)]
    pub gradient: f64,
    #[serde(default)]
    pub speck_count: usize,
    #[serde(default = "default_speck_intensity")]
    pub speck_intensity: f64,
    /// Specks are squares of side `2·speck_radius + 1`, placed clear of
    /// cracks.
    #[serde(default = "default_speck_radius")]
    pub speck_radius: usize,
    #[serde(default)]
    pub cracks: Vec<Polyline>,
    #[serde(default)]
    pub stripes: Vec<Polyline>,
}

/// A rendered scene and its masks.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub image: GrayImage,
    /// Exact crack pixels.
    pub crack: BinaryMask,
    /// Speck pixels not covered by a crack.
    pub noise: BinaryMask,
    /// Stripe pixels not covered by a crack.
    pub stripes: BinaryMask,
}

impl SyntheticSceneSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| {
            Error::Config(e.to_string().split_whitespace().collect::<Vec<_>>().join(" "))
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scene spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!(
                "scene dimensions must be positive, got {}x{}",
                self.width, self.height
            ));
        }
        let unit = |name: &str, v: f64| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                bad(format!("{name} must be in [0, 1], got {v}"))
            }
        };
        unit("background", self.background)?;
        unit("noise_amplitude", self.noise_amplitude)?;
        unit("gradient", self.gradient.abs())?;
        unit("speck_intensity", self.speck_intensity)?;
        for (kind, lines) in [("crack", &self.cracks), ("stripe", &self.stripes)] {
            for (i, l) in lines.iter().enumerate() {
                if l.points.is_empty() {
                    return bad(format!("{kind} {i} has no points"));
                }
                if !(l.width.is_finite() && l.width > 0.0) {
                    return bad(format!("{kind} {i} width must be positive"));
                }
                unit(&format!("{kind} {i} intensity"), l.intensity)?;
            }
        }
        Ok(())
    }

    /// Cracks too wide for a bottom-hat with the given disk radius.
    pub fn warnings(&self, bottomhat_radius: usize) -> Vec<String> {
        self.cracks
            .iter()
            .enumerate()
            .filter(|(_, c)| c.width >= 2.0 * bottomhat_radius as f64)
            .map(|(i, c)| {
                format!(
                    "crack {i} width {} is not below twice the bottom-hat radius {}",
                    c.width, bottomhat_radius
                )
            })
            .collect()
    }

    pub fn render(&self) -> Result<SyntheticScene> {
        self.validate()?;
        let (w, h) = (self.width, self.height);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let ramp = |x: usize| {
            if w > 1 {
                self.gradient * (x as f64 / (w - 1) as f64 - 0.5)
            } else {
                0.0
            }
        };

        let mut base = vec![self.background; w * h];
        let mut stripes = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let (fx, fy) = (x as f64, y as f64);
                for s in &self.stripes {
                    if s.covers(fx, fy) {
                        base[y * w + x] = s.intensity;
                        stripes[y * w + x] = true;
                    }
                }
            }
        }

        let mut noise = vec![false; w * h];
        let r = self.speck_radius;
        for _ in 0..self.speck_count {
            let Some((cx, cy)) = self.speck_center(&mut rng) else {
                continue;
            };
            for y in cy.saturating_sub(r)..=(cy + r).min(h - 1) {
                for x in cx.saturating_sub(r)..=(cx + r).min(w - 1) {
                    base[y * w + x] = self.speck_intensity;
                    noise[y * w + x] = true;
                }
            }
        }

        let mut crack = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let (fx, fy) = (x as f64, y as f64);
                for c in &self.cracks {
                    if c.covers(fx, fy) {
                        base[y * w + x] = c.intensity;
                        crack[y * w + x] = true;
                    }
                }
            }
        }

        let amp = self.noise_amplitude;
        let pixels: Vec<f64> = (0..w * h)
            .map(|i| {
                let n = if amp > 0.0 {
                    rng.gen_range(-amp..=amp)
                } else {
                    0.0
                };
                base[i] + ramp(i % w) + n
            })
            .collect();
        let image = GrayImage::from_fn(w, h, |x, y| pixels[y * w + x]).quantized();

        for i in 0..w * h {
            if crack[i] {
                noise[i] = false;
                stripes[i] = false;
            }
        }
        Ok(SyntheticScene {
            image,
            crack: BinaryMask::from_bits(w, h, crack)?,
            noise: BinaryMask::from_bits(w, h, noise)?,
            stripes: BinaryMask::from_bits(w, h, stripes)?,
        })
    }

    /// Uniform speck center whose square stays at least two pixels clear
    /// of every crack, or `None` if no such spot was found.
    fn speck_center(&self, rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
        const ATTEMPTS: usize = 64;
        let reach = std::f64::consts::SQRT_2 * self.speck_radius as f64 + 2.0;
        (0..ATTEMPTS).find_map(|_| {
            let cx = rng.gen_range(0..self.width);
            let cy = rng.gen_range(0..self.height);
            let (fx, fy) = (cx as f64, cy as f64);
            self.cracks
                .iter()
                .all(|c| c.distance(fx, fy) > c.width / 2.0 + reach)
                .then_some((cx, cy))
        })
    }

    /// A `size x size` scene with one meandering crack, a lane stripe and
    /// `speck_count` noise specks, all placed from `seed`.
    pub fn noisy_crack(seed: u64, size: usize, speck_count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c4ac);
        let s = size as f64;
        let vertical = rng.gen_bool(0.5);
        let n = 5;
        let mut points = Vec::with_capacity(n);
        let mut across = rng.gen_range(0.35 * s..0.7 * s);
        for i in 0..n {
            let along = 0.1 * s + 0.8 * s * i as f64 / (n - 1) as f64;
            points.push(if vertical {
                [across, along]
            } else {
                [along, across]
            });
            across = (across + rng.gen_range(-0.12 * s..0.12 * s)).clamp(0.3 * s, 0.85 * s);
        }
        let width = rng.gen_range(3.0..7.0);
        // keep the gap between stripe and border wider than a bottom-hat disk
        let lane = rng.gen_range(40.0..40.0 + 0.05 * s);
        let stripe = if vertical {
            vec![[lane, 0.0], [lane, s - 1.0]]
        } else {
            vec![[0.0, lane], [s - 1.0, lane]]
        };
        Self {
            width: size,
            height: size,
            seed,
            background: 0.7,
            noise_amplitude: 0.03,
            gradient: 0.0,
            speck_count,
            speck_intensity: 0.25,
            speck_radius: 1,
            cracks: vec![Polyline {
                points,
                width,
                intensity: 0.25,
            }],
            stripes: vec![Polyline {
                points: stripe,
                width: 16.0,
                intensity: 0.95,
            }],
        }
    }
}
