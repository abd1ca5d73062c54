//! Frenet–Serret tetrad of the rotating oscillator centre and the Lorentz
//! transformation of lab-frame fields into the instantaneous rest frame.
//!
//! Four-vectors are stored as `[x, y, z, t]` with metric diag(1, 1, 1, −1)
//! and c = 1. Angles are the rotation phase α = Ω₀γτ.

use serde::{Deserialize, Serialize};

use crate::params::RotationConfig;

pub type Vec3 = [f64; 3];
pub type FourVector = [f64; 4];

/// Minkowski metric diag(1, 1, 1, −1).
pub const ETA: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Radial, tangential, axial and velocity legs of the rotating frame,
/// each with lab-coordinate components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tetrad {
    pub mu1: FourVector,
    pub mu2: FourVector,
    pub mu3: FourVector,
    pub mu4: FourVector,
}

impl Tetrad {
    pub fn legs(&self) -> [FourVector; 4] {
        [self.mu1, self.mu2, self.mu3, self.mu4]
    }

    /// Largest deviation of μ₍ₐ₎·μ₍ᵦ₎ from η₍ₐᵦ₎.
    pub fn orthonormality_defect(&self) -> f64 {
        let legs = self.legs();
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let target = if a == b { ETA[a] } else { 0.0 };
                worst = worst.max((minkowski_dot(&legs[a], &legs[b]) - target).abs());
            }
        }
        worst
    }
}

/// Electric and magnetic field at a point. Whether the components are lab
/// or instantaneous-frame components depends on where the value came from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldTriple {
    pub e: Vec3,
    pub h: Vec3,
}

impl FieldTriple {
    pub fn new(e: Vec3, h: Vec3) -> Self {
        Self { e, h }
    }

    /// E·H, invariant under boosts and rotations.
    pub fn invariant_dot(&self) -> f64 {
        dot3(&self.e, &self.h)
    }

    /// E² − H², invariant under boosts and rotations.
    pub fn invariant_square(&self) -> f64 {
        dot3(&self.e, &self.e) - dot3(&self.h, &self.h)
    }
}

pub fn tetrad_at(alpha_angle: f64, config: &RotationConfig) -> Tetrad {
    let (s, c) = alpha_angle.sin_cos();
    let g = config.gamma;
    let bg = config.beta * g;
    Tetrad {
        mu1: [c, s, 0.0, 0.0],
        mu2: [-g * s, g * c, 0.0, bg],
        mu3: [0.0, 0.0, 1.0, 0.0],
        mu4: [-bg * s, bg * c, 0.0, g],
    }
}

/// Four-velocity of the equilibrium point projected onto the tetrad,
/// U₍ₐ₎ = μⁱ₍ₐ₎Uᵢ. Always (0, 0, 0, −1) for a valid tetrad.
pub fn four_velocity_check(tetrad: &Tetrad, _config: &RotationConfig) -> FourVector {
    // U^i = μ₍₄₎^i with c = 1; the Minkowski dot lowers the index.
    let u = tetrad.mu4;
    let legs = tetrad.legs();
    [
        minkowski_dot(&legs[0], &u),
        minkowski_dot(&legs[1], &u),
        minkowski_dot(&legs[2], &u),
        minkowski_dot(&legs[3], &u),
    ]
}

/// Proper acceleration in the rotating frame, in units of cΩ₀.
pub fn proper_acceleration(config: &RotationConfig) -> FourVector {
    [-config.a_ratio, 0.0, 0.0, 0.0]
}

/// Lab fields at the oscillator centre → instantaneous-frame components.
pub fn to_instantaneous_frame(
    lab: &FieldTriple,
    alpha_angle: f64,
    config: &RotationConfig,
) -> FieldTriple {
    let (s, c) = alpha_angle.sin_cos();
    let g = config.gamma;
    let bg = config.beta * g;
    let [e1, e2, e3] = lab.e;
    let [h1, h2, h3] = lab.h;
    FieldTriple {
        e: [
            g * (e1 * c + e2 * s) + bg * h3,
            -e1 * s + e2 * c,
            g * e3 - bg * (h1 * c + h2 * s),
        ],
        h: [
            g * (h1 * c + h2 * s) - bg * e3,
            -h1 * s + h2 * c,
            g * h3 + bg * (e1 * c + e2 * s),
        ],
    }
}
