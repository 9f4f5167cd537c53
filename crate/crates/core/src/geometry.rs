//! Minkowski events, the unit de Sitter 3-hyperboloid `x·x = -1`, and real
//! Lorentz transformations.
//!
//! Signature is `(+,-,-,-)` throughout, natural units `c = 1`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A contravariant four-vector `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { t: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Minkowski product `a·b = a⁰b⁰ - a⃗·b⃗`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    /// Minkowski square `a·a`.
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }

    /// Largest absolute component, used for tolerances.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Four-velocity of a particle moving with rapidity `eta` along the unit
    /// direction `axis`.
    pub fn velocity(eta: f64, axis: [f64; 3]) -> Self {
        let n = unit3(axis);
        let s = eta.sinh();
        Self::new(eta.cosh(), s * n[0], s * n[1], s * n[2])
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.t,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("four-vector index {i} out of range"),
        }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self.scale(-1.0)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v.scale(self)
    }
}

/// A point `(ψ, θ, φ)` on the unit de Sitter 3-hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidPoint {
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl HyperboloidPoint {
    pub const fn new(psi: f64, theta: f64, phi: f64) -> Self {
        Self { psi, theta, phi }
    }

    /// Inverse of [`embed`] for a spacelike unit vector.
    pub fn from_four_vector(x: &FourVector) -> Self {
        let psi = x.t.asinh();
        let r = x.spatial_norm();
        let theta = if r > 0.0 { (x.z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        let mut phi = x.y.atan2(x.x);
        if phi < 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        Self { psi, theta, phi }
    }

    /// Unit direction `n(θ, φ)`.
    pub fn direction(&self) -> [f64; 3] {
        unit_direction(self.theta, self.phi)
    }
}

pub fn unit_direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn unit3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

/// Embeds `(ψ, θ, φ)` as `x⁰ = sinh ψ`, `x⃗ = cosh ψ · n(θ, φ)`.
pub fn embed(p: HyperboloidPoint) -> FourVector {
    let n = p.direction();
    let c = p.psi.cosh();
    FourVector::new(p.psi.sinh(), c * n[0], c * n[1], c * n[2])
}

/// A real 4×4 matrix acting on contravariant components, `x'^μ = Λ^μ_ν x^ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzMatrix(pub [[f64; 4]; 4]);

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

impl LorentzMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self(m)
    }

    /// Pure boost with rapidity `eta` along `axis`.
    ///
    /// Maps the rest four-velocity `(1,0,0,0)` to `FourVector::velocity(eta, axis)`.
    pub fn boost(eta: f64, axis: [f64; 3]) -> Self {
        let n = unit3(axis);
        let (ch, sh) = (eta.cosh(), eta.sinh());
        let mut m = [[0.0; 4]; 4];
        m[0][0] = ch;
        for i in 0..3 {
            m[0][i + 1] = sh * n[i];
            m[i + 1][0] = sh * n[i];
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i + 1][j + 1] = delta + (ch - 1.0) * n[i] * n[j];
            }
        }
        Self(m)
    }

    /// Active rotation by `angle` about `axis` (right-hand rule).
    pub fn rotation(angle: f64, axis: [f64; 3]) -> Self {
        let n = unit3(axis);
        let (s, c) = angle.sin_cos();
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let mut cross = 0.0;
                for k in 0..3 {
                    cross += levi_civita(i, k, j) * n[k];
                }
                m[i + 1][j + 1] = c * delta + (1.0 - c) * n[i] * n[j] + s * cross;
            }
        }
        Self(m)
    }

    /// A random proper orthochronous transformation: rotation followed by a
    /// boost of rapidity uniform in `[0, max_rapidity]` along a random axis.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> Self {
        let axis = random_unit(rng);
        let rot_axis = random_unit(rng);
        let angle = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let eta = rng.gen_range(0.0..=max_rapidity);
        Self::boost(eta, axis).compose(&Self::rotation(angle, rot_axis))
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let a = v.to_array();
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| self.0[mu][nu] * a[nu]).sum();
        }
        FourVector::from_array(out)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &LorentzMatrix) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(m)
    }

    /// Inverse via `Λ⁻¹ = η Λᵀ η`.
    pub fn inverse(&self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = METRIC[i] * self.0[j][i] * METRIC[j];
            }
        }
        Self(m)
    }

    /// `max |Λᵀ η Λ - η|`, zero for an exact Lorentz transformation.
    pub fn metric_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let g: f64 = (0..4).map(|k| self.0[k][i] * METRIC[k] * self.0[k][j]).sum();
                let target = if i == j { METRIC[i] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}
