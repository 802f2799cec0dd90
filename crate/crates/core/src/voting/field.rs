//! Stick votes, the decay function and precomputed voting fields.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::tensor::SymTensor2;
use crate::error::{Error, Result};

/// Fields are zeroed where the decay drops below this.
pub const DECAY_CUTOFF: f64 = 0.01;

/// Stick votes are only cast within this angle of the voter tangent.
pub const MAX_VOTE_ANGLE: f64 = FRAC_PI_4;

const ANGLE_EPS: f64 = 1e-12;

/// Curvature weight `c = −16·ln(0.1)·(σ − 1)/π²`, floored at zero so the
/// decay stays in `[0, 1]` for `σ < 1`.
pub fn curvature_weight(sigma: f64) -> f64 {
    (-16.0 * 0.1f64.ln() * (sigma - 1.0) / (PI * PI)).max(0.0)
}

/// Decay `DF(s, κ, σ) = exp(−(s² + c·κ²)/σ²)`.
pub fn decay(s: f64, kappa: f64, sigma: f64) -> f64 {
    let c = curvature_weight(sigma);
    (-(s * s + c * kappa * kappa) / (sigma * sigma)).exp()
}

/// Osculating-arc geometry between a voter and a receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoteGeometry {
    /// Straight-line distance.
    pub l: f64,
    /// Angle between the voter tangent and the voter→receiver direction.
    pub theta: f64,
    /// Arc length `θl / sin θ`.
    pub s: f64,
    /// Curvature `2 sin θ / l`.
    pub kappa: f64,
}

impl VoteGeometry {
    pub fn new(l: f64, theta: f64) -> Self {
        let a = theta.abs();
        if a == 0.0 || l == 0.0 {
            return Self {
                l,
                theta,
                s: l,
                kappa: 0.0,
            };
        }
        Self {
            l,
            theta,
            s: a * l / a.sin(),
            kappa: 2.0 * a.sin() / l,
        }
    }

    /// Geometry of `offset` seen from a voter with unit `normal`. The angle
    /// is folded into `(−π/2, π/2]`, i.e. measured against whichever
    /// direction of the tangent points towards the receiver.
    pub fn from_offset(normal: [f64; 2], offset: (f64, f64)) -> Self {
        let tangent = [normal[1], -normal[0]];
        let along = offset.0 * tangent[0] + offset.1 * tangent[1];
        let across = offset.0 * normal[0] + offset.1 * normal[1];
        let l = offset.0.hypot(offset.1);
        let theta = if along == 0.0 {
            FRAC_PI_2
        } else {
            (across / along).atan()
        };
        Self::new(l, theta)
    }
}

fn stick_vote_parts(normal: [f64; 2], offset: (f64, f64), sigma: f64) -> (SymTensor2, f64) {
    let g = VoteGeometry::from_offset(normal, offset);
    if g.l == 0.0 || g.theta.abs() > MAX_VOTE_ANGLE + ANGLE_EPS {
        return (SymTensor2::ZERO, 0.0);
    }
    let df = decay(g.s, g.kappa, sigma);
    let (s2, c2) = (2.0 * g.theta).sin_cos();
    let tangent = [normal[1], -normal[0]];
    // (−sin 2θ, cos 2θ) in the voter's (tangent, normal) frame
    let cast = [
        c2 * normal[0] - s2 * tangent[0],
        c2 * normal[1] - s2 * tangent[1],
    ];
    (SymTensor2::outer(cast) * df, df)
}

/// Vote cast by a unit stick with the given `normal` on a receiver at
/// `offset`. Zero for coincident points and outside the ±45° cone.
pub fn stick_vote(normal: [f64; 2], offset: (f64, f64), sigma: f64) -> SymTensor2 {
    stick_vote_parts(normal, offset, sigma).0
}

/// Unit normal at `angle` from the x axis.
pub fn normal_at(angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    [c, s]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Stick,
    Ball,
}

/// Vote tensors precomputed on the integer offsets `[−radius, radius]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingField {
    kind: FieldKind,
    sigma: f64,
    radius: usize,
    grid: Vec<SymTensor2>,
}

/// `ceil(3σ)`.
pub fn field_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scale σ must be positive, got {sigma}"
        )))
    }
}

impl VotingField {
    fn build(
        kind: FieldKind,
        sigma: f64,
        mut value: impl FnMut(isize, isize) -> SymTensor2,
    ) -> Self {
        let radius = field_radius(sigma);
        let r = radius as isize;
        let mut grid = Vec::with_capacity((2 * radius + 1).pow(2));
        for dy in -r..=r {
            for dx in -r..=r {
                let l2 = (dx * dx + dy * dy) as f64;
                grid.push(if l2 > (radius * radius) as f64 {
                    SymTensor2::ZERO
                } else {
                    value(dx, dy)
                });
            }
        }
        Self {
            kind,
            sigma,
            radius,
            grid,
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Tensor at offset `(dx, dy)`; zero outside the grid.
    #[inline]
    pub fn at(&self, dx: isize, dy: isize) -> SymTensor2 {
        let r = self.radius as isize;
        if dx.abs() > r || dy.abs() > r {
            return SymTensor2::ZERO;
        }
        let side = 2 * r + 1;
        self.grid[((dy + r) * side + dx + r) as usize]
    }

    /// Offsets with a nonzero tensor.
    pub fn support(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let r = self.radius as isize;
        let side = 2 * r + 1;
        self.grid
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_zero())
            .map(move |(i, _)| (i as isize % side - r, i as isize / side - r))
    }
}

fn oriented_stick_field(sigma: f64, normal: [f64; 2]) -> VotingField {
    VotingField::build(FieldKind::Stick, sigma, |dx, dy| {
        let (t, df) = stick_vote_parts(normal, (dx as f64, dy as f64), sigma);
        if df < DECAY_CUTOFF {
            SymTensor2::ZERO
        } else {
            t
        }
    })
}

/// Stick field for the canonical voter with normal `+y`.
pub fn build_stick_field(sigma: f64) -> Result<VotingField> {
    check_sigma(sigma)?;
    Ok(oriented_stick_field(sigma, [0.0, 1.0]))
}

/// Ball field: the stick field averaged over `n_angles` voter orientations
/// spread uniformly over `[0, π)`.
///
/// For each offset only the orientations inside the ±45° cone contribute,
/// so the average is taken as a midpoint rule over that quarter turn
/// (`ceil(n_angles / 2)` samples). Aligning the samples with the cone keeps
/// the cutoff discontinuity out of the quadrature and the result converges
/// as `O(n_angles⁻²)`.
pub fn build_ball_field(sigma: f64, n_angles: usize) -> Result<VotingField> {
    check_sigma(sigma)?;
    if n_angles < 8 {
        return Err(Error::InvalidParameter(format!(
            "ball field needs at least 8 orientations, got {n_angles}"
        )));
    }
    let samples = n_angles.div_ceil(2);
    let step = FRAC_PI_2 / samples as f64;
    let weight = 1.0 / (2 * samples) as f64;
    Ok(VotingField::build(FieldKind::Ball, sigma, |dx, dy| {
        let (fx, fy) = (dx as f64, dy as f64);
        let l = fx.hypot(fy);
        if l == 0.0 || decay(l, 0.0, sigma) < DECAY_CUTOFF {
            return SymTensor2::ZERO;
        }
        let direction = fy.atan2(fx);
        let mut acc = SymTensor2::ZERO;
        for j in 0..samples {
            let theta = -FRAC_PI_4 + (j as f64 + 0.5) * step;
            // voter tangent at angle direction − θ, normal a quarter turn on
            let normal = normal_at(direction - theta + FRAC_PI_2);
            acc += stick_vote(normal, (fx, fy), sigma);
        }
        acc * weight
    }))
}

/// Stick fields rotated to `count` voter orientations uniformly covering
/// `[0, π)`. Sparse stick voting snaps each voter's normal to the nearest
/// orientation.
#[derive(Debug, Clone)]
pub struct OrientedStickFields {
    sigma: f64,
    fields: Vec<VotingField>,
}

pub const DEFAULT_STICK_ORIENTATIONS: usize = 72;

impl OrientedStickFields {
    pub fn new(sigma: f64, count: usize) -> Result<Self> {
        check_sigma(sigma)?;
        if count < 4 || count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "orientation count must be even and >= 4, got {count}"
            )));
        }
        let step = PI / count as f64;
        let fields = (0..count)
            .map(|b| oriented_stick_field(sigma, normal_at(b as f64 * step)))
            .collect();
        Ok(Self { sigma, fields })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.fields[0].radius
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Orientation bin for a normal angle (any real value).
    pub fn bin(&self, normal_angle: f64) -> usize {
        let n = self.fields.len();
        let b = (normal_angle.rem_euclid(PI) / (PI / n as f64)).round() as usize;
        b % n
    }

    pub fn field(&self, bin: usize) -> &VotingField {
        &self.fields[bin]
    }
}
