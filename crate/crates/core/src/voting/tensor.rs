use std::ops::{Add, AddAssign, Mul};

/// Symmetric 2x2 tensor `[[t11, t12], [t12, t22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub t11: f64,
    pub t12: f64,
    pub t22: f64,
}

/// Eigen-decomposition with `l1 >= l2`; `e1`, `e2` orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub l1: f64,
    pub l2: f64,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
}

impl Eigen2 {
    /// Curve saliency `λ1 − λ2`.
    pub fn stick_saliency(&self) -> f64 {
        (self.l1 - self.l2).max(0.0)
    }

    /// Point/junction saliency `λ2`, clamped at zero against round-off.
    pub fn ball_saliency(&self) -> f64 {
        self.l2.max(0.0)
    }

    /// Angle of `e1` in `[0, π)`.
    pub fn normal_angle(&self) -> f64 {
        let a = self.e1[1].atan2(self.e1[0]);
        if a < 0.0 {
            a + std::f64::consts::PI
        } else if a >= std::f64::consts::PI {
            a - std::f64::consts::PI
        } else {
            a
        }
    }
}

impl SymTensor2 {
    pub const ZERO: Self = Self {
        t11: 0.0,
        t12: 0.0,
        t22: 0.0,
    };

    /// Ball tensor: the identity.
    pub const BALL: Self = Self {
        t11: 1.0,
        t12: 0.0,
        t22: 1.0,
    };

    pub const fn new(t11: f64, t12: f64, t22: f64) -> Self {
        Self { t11, t12, t22 }
    }

    /// Rank-one tensor `v vᵀ`.
    pub fn outer(v: [f64; 2]) -> Self {
        Self {
            t11: v[0] * v[0],
            t12: v[0] * v[1],
            t22: v[1] * v[1],
        }
    }

    pub fn trace(&self) -> f64 {
        self.t11 + self.t22
    }

    pub fn is_zero(&self) -> bool {
        self.t11 == 0.0 && self.t12 == 0.0 && self.t22 == 0.0
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.t11 - other.t11)
            .abs()
            .max((self.t12 - other.t12).abs())
            .max((self.t22 - other.t22).abs())
    }

    /// `R T Rᵀ` for the counter-clockwise rotation by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let (a, b, d) = (self.t11, self.t12, self.t22);
        Self {
            t11: c * c * a - 2.0 * c * s * b + s * s * d,
            t12: c * s * (a - d) + (c * c - s * s) * b,
            t22: s * s * a + 2.0 * c * s * b + c * c * d,
        }
    }

    /// Closed-form eigen-decomposition.
    pub fn eigen(&self) -> Eigen2 {
        let mean = 0.5 * (self.t11 + self.t22);
        let half_diff = 0.5 * (self.t11 - self.t22);
        let radius = half_diff.hypot(self.t12);
        let angle = 0.5 * self.t12.atan2(half_diff);
        let (s, c) = angle.sin_cos();
        Eigen2 {
            l1: mean + radius,
            l2: mean - radius,
            e1: [c, s],
            e2: [-s, c],
        }
    }

    /// `(λ1 − λ2) e1e1ᵀ + λ2 (e1e1ᵀ + e2e2ᵀ)`.
    pub fn from_eigen(e: &Eigen2) -> Self {
        Self::outer(e.e1) * (e.l1 - e.l2) + (Self::outer(e.e1) + Self::outer(e.e2)) * e.l2
    }
}

pub fn eigen_decompose(t: &SymTensor2) -> Eigen2 {
    t.eigen()
}

impl Add for SymTensor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            t11: self.t11 + o.t11,
            t12: self.t12 + o.t12,
            t22: self.t22 + o.t22,
        }
    }
}

impl AddAssign for SymTensor2 {
    fn add_assign(&mut self, o: Self) {
        self.t11 += o.t11;
        self.t12 += o.t12;
        self.t22 += o.t22;
    }
}

impl Mul<f64> for SymTensor2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            t11: self.t11 * k,
            t12: self.t12 * k,
            t22: self.t22 * k,
        }
    }
}
