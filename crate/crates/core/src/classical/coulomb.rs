use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::FourVector;

const VELOCITY_TOL: f64 = 1e-10;

/// A point charge moving uniformly through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCharge {
    pub q: f64,
    pub u: FourVector,
}

impl PointCharge {
    pub fn new(q: f64, u: FourVector) -> Result<Self> {
        check_velocity(&u)?;
        Ok(Self { q, u })
    }

    pub fn at_rest(q: f64) -> Self {
        Self { q, u: FourVector::new(1.0, 0.0, 0.0, 0.0) }
    }

    /// Moving with rapidity `eta` along `axis`.
    pub fn boosted(q: f64, eta: f64, axis: [f64; 3]) -> Self {
        Self { q, u: FourVector::velocity(eta, axis) }
    }
}

fn check_velocity(u: &FourVector) -> Result<()> {
    if !u.is_finite() || (u.square() - 1.0).abs() > VELOCITY_TOL || u.t <= 0.0 {
        return invalid(format!("four-velocity must satisfy u·u = 1, u⁰ > 0 (u·u = {})", u.square()));
    }
    Ok(())
}

/// `A^μ(x) = q u^μ / √((u·x)² - x·x)`.
pub fn boosted_coulomb(charge: &PointCharge, x: &FourVector) -> Result<FourVector> {
    check_velocity(&charge.u)?;
    let ux = charge.u.dot(x);
    let d2 = ux * ux - x.square();
    if !(d2 > 0.0) {
        return Err(Error::Singular(format!("x = {x:?} lies on the worldline")));
    }
    Ok(charge.u.scale(charge.q / d2.sqrt()))
}

/// Momentum-space Bremsstrahlung potential `(q/2π)(u/(u·p) - v/(v·p))`.
pub fn bremsstrahlung_momentum(q: f64, u: &FourVector, v: &FourVector, p: &FourVector) -> Result<FourVector> {
    check_velocity(u)?;
    check_velocity(v)?;
    let up = u.dot(p);
    let vp = v.dot(p);
    let scale = p.max_abs() * u.max_abs().max(v.max_abs());
    if !(up.abs() > 1e-14 * scale) || !(vp.abs() > 1e-14 * scale) {
        return Err(Error::Singular(format!("degenerate denominator u·p = {up}, v·p = {vp}")));
    }
    let k = q / (2.0 * PI);
    Ok((u.scale(1.0 / up) - v.scale(1.0 / vp)).scale(k))
}
