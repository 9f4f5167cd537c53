//! S⁰ / S⁰⁰ test functions, their moments, and pairings with fields on ℝ⁴.
//!
//! Two families of probes are provided:
//!
//! * one-dimensional probes, given either in position space (Gaussian and
//!   Hermite–Gaussian controls) or spectrally as `φ̃(p) = poly(p)·s0_window(p, a)`;
//! * conic probes on ℝ⁴, an angular bump around the time axis times a radial
//!   profile. The `MomentFree` profile makes every moment of order `≤ N` vanish,
//!   so the probe annihilates polynomials up to degree `N`.
//!
//! In ℝ⁴ we use polar coordinates `x = r(cos α, sin α n)`, `α` the angle from
//! the time axis, so the forward cone is `α < π/4` and `d⁴x = r³ sin²α dr dα dΩ`.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::FourVector;
use crate::quadrature::{fd_weights, gauss_legendre_on};
use crate::sphere::SphereGrid;

/// `exp(-a²/|p|² - |p|²/a²)`, and 0 at the origin.
pub fn s0_window(p: &[f64], a: f64) -> f64 {
    let r2: f64 = p.iter().map(|x| x * x).sum();
    if r2 == 0.0 {
        return 0.0;
    }
    (-(a * a) / r2 - r2 / (a * a)).exp()
}

fn window_u(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / (u * u) - u * u).exp()
    }
}

/// Smooth bump supported on `[lo, hi]`, equal to 1 at the midpoint.
fn bump(x: f64, lo: f64, hi: f64) -> f64 {
    let u = (2.0 * x - lo - hi) / (hi - lo);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestClass {
    Schwartz,
    /// Moments up to `order` vanish.
    S00 { order: usize },
}

/// Radial part of a conic probe in units of its scale `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `s0_window(r, a)` alone.
    S0Window,
    /// `π_{N+1}(r/a)·s0_window(r, a)` with `π_{N+1}` orthogonal to all lower
    /// degrees for the weight `r³ s0_window`, so radial moments `r^{3+j}`,
    /// `j ≤ N`, vanish.
    MomentFree { order: usize },
}

/// Where a conic probe lives relative to the light cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportHint {
    InsideCone,
    OutsideCone,
    Straddles,
    Whole,
}

/// Serialisable probe definition, `{type, params}` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Probe {
    /// `bump(α)·(1 + n_z/2)·R(r)` on ℝ⁴.
    Conic { alpha_lo: f64, alpha_hi: f64, scale: f64, profile: RadialProfile },
    /// One-dimensional element given by its Fourier transform
    /// `φ̃(p) = Σ c_k p^k · s0_window(p, a)`.
    Spectral { scale: f64, poly: Vec<f64> },
    /// `exp(-x²/2σ²)` on ℝ.
    Gaussian { sigma: f64 },
    /// `Σ c_k x^k · exp(-x²/2)` on ℝ.
    HermiteGaussian { coeffs: Vec<f64> },
}

/// Orthogonal polynomial `π_{N+1}` from a three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
struct OrthPoly {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    norm: f64,
}

impl OrthPoly {
    fn eval(&self, u: f64) -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..self.alpha.len() {
            let next = (u - self.alpha[k]) * cur - self.beta[k] * prev;
            prev = cur;
            cur = next;
        }
        cur / self.norm
    }
}

/// Trapezoid nodes in `t = ln u` covering the window support.
fn radial_nodes(n: usize) -> (Vec<f64>, f64) {
    let (t0, t1) = (0.04f64.ln(), 9.0f64.ln());
    let dt = (t1 - t0) / (n - 1) as f64;
    ((0..n).map(|i| (t0 + i as f64 * dt).exp()).collect(), dt)
}

const RADIAL_NODES: usize = 240;

/// Stieltjes procedure for the measure `u³ w(u) du`.
fn stieltjes(degree: usize) -> OrthPoly {
    let (u, dt) = radial_nodes(2 * RADIAL_NODES);
    let w: Vec<f64> = u.iter().map(|&x| x.powi(4) * window_u(x) * dt).collect();
    let n = u.len();
    let mut prev = vec![0.0; n];
    let mut cur = vec![1.0; n];
    let mut alpha = Vec::with_capacity(degree);
    let mut beta = Vec::with_capacity(degree);
    let mut norm_prev = 1.0;
    for k in 0..degree {
        let norm: f64 = (0..n).map(|i| w[i] * cur[i] * cur[i]).sum();
        let a: f64 = (0..n).map(|i| w[i] * u[i] * cur[i] * cur[i]).sum::<f64>() / norm;
        let b = if k == 0 { 0.0 } else { norm / norm_prev };
        let next: Vec<f64> = (0..n).map(|i| (u[i] - a) * cur[i] - b * prev[i]).collect();
        alpha.push(a);
        beta.push(b);
        norm_prev = norm;
        prev = cur;
        cur = next;
    }
    let peak = cur.iter().zip(&u).map(|(p, &x)| (p * window_u(x)).abs()).fold(0.0, f64::max);
    OrthPoly { alpha, beta, norm: peak }
}

/// A probe with any precomputed data it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Probe", try_from = "Probe")]
pub struct TestFunction {
    probe: Probe,
    poly: Option<OrthPoly>,
}

impl From<TestFunction> for Probe {
    fn from(t: TestFunction) -> Self {
        t.probe
    }
}

impl TryFrom<Probe> for TestFunction {
    type Error = Error;
    fn try_from(p: Probe) -> Result<Self> {
        TestFunction::new(p)
    }
}

impl TestFunction {
    pub fn new(probe: Probe) -> Result<Self> {
        let mut poly = None;
        match &probe {
            Probe::Conic { alpha_lo, alpha_hi, scale, profile } => {
                if !(0.0 <= *alpha_lo && alpha_lo < alpha_hi && *alpha_hi <= PI) {
                    return invalid("conic probe needs 0 ≤ α_lo < α_hi ≤ π");
                }
                if !(*scale > 0.0) {
                    return invalid("probe scale must be positive");
                }
                if let RadialProfile::MomentFree { order } = profile {
                    if *order > 16 {
                        return invalid("moment-free order above 16 is not supported");
                    }
                    poly = Some(stieltjes(order + 1));
                }
            }
            Probe::Spectral { scale, poly } => {
                if !(*scale > 0.0) || poly.is_empty() {
                    return invalid("spectral probe needs a positive scale and a polynomial");
                }
            }
            Probe::Gaussian { sigma } => {
                if !(*sigma > 0.0) {
                    return invalid("Gaussian width must be positive");
                }
            }
            Probe::HermiteGaussian { coeffs } => {
                if coeffs.is_empty() {
                    return invalid("Hermite–Gaussian probe needs coefficients");
                }
            }
        }
        Ok(Self { probe, poly })
    }

    /// S⁰⁰ conic probe inside the forward cone.
    pub fn inside_cone(scale: f64, profile: RadialProfile) -> Result<Self> {
        Self::new(Probe::Conic { alpha_lo: 0.15, alpha_hi: 0.65, scale, profile })
    }

    /// Conic probe in the exterior region `π/4 < α < 3π/4`.
    pub fn outside_cone(scale: f64, profile: RadialProfile) -> Result<Self> {
        Self::new(Probe::Conic { alpha_lo: 1.0, alpha_hi: 2.1, scale, profile })
    }

    pub fn probe(&self) -> &Probe {
        &self.probe
    }

    pub fn dimension(&self) -> usize {
        match self.probe {
            Probe::Conic { .. } => 4,
            _ => 1,
        }
    }

    pub fn class(&self) -> TestClass {
        match &self.probe {
            Probe::Conic { profile: RadialProfile::MomentFree { order }, .. } => TestClass::S00 { order: *order },
            Probe::Spectral { .. } => TestClass::S00 { order: usize::MAX },
            _ => TestClass::Schwartz,
        }
    }

    pub fn support(&self) -> SupportHint {
        match self.probe {
            Probe::Conic { alpha_lo, alpha_hi, .. } => {
                if alpha_hi < FRAC_PI_4 {
                    SupportHint::InsideCone
                } else if alpha_lo > FRAC_PI_4 && alpha_hi < 3.0 * FRAC_PI_4 {
                    SupportHint::OutsideCone
                } else {
                    SupportHint::Straddles
                }
            }
            _ => SupportHint::Whole,
        }
    }

    /// Same probe dilated so that the new probe is `φ(λ x)`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        match &self.probe {
            Probe::Conic { alpha_lo, alpha_hi, scale, profile } => Self::new(Probe::Conic {
                alpha_lo: *alpha_lo,
                alpha_hi: *alpha_hi,
                scale: scale / lambda,
                profile: *profile,
            }),
            _ => invalid("dilation is implemented for conic probes"),
        }
    }

    fn radial(&self, r: f64) -> f64 {
        match &self.probe {
            Probe::Conic { scale, profile, .. } => {
                let u = r / scale;
                match profile {
                    RadialProfile::S0Window => window_u(u),
                    RadialProfile::MomentFree { .. } => {
                        self.poly.as_ref().expect("built in new").eval(u) * window_u(u)
                    }
                }
            }
            _ => unreachable!("radial profile of a non-conic probe"),
        }
    }

    fn angular(&self, alpha: f64, nz: f64) -> f64 {
        match self.probe {
            Probe::Conic { alpha_lo, alpha_hi, .. } => bump(alpha, alpha_lo, alpha_hi) * (1.0 + 0.5 * nz),
            _ => unreachable!("angular profile of a non-conic probe"),
        }
    }

    /// Fourier transform of a spectral probe.
    pub fn spectral_value(&self, p: f64) -> Result<f64> {
        match &self.probe {
            Probe::Spectral { scale, poly } => {
                Ok(poly.iter().rev().fold(0.0, |acc, c| acc * p + c) * s0_window(&[p], *scale))
            }
            Probe::Gaussian { sigma } => Ok((2.0 * PI).sqrt() * sigma * (-0.5 * (p * sigma).powi(2)).exp()),
            _ => invalid("probe has no closed-form Fourier transform"),
        }
    }

    /// Value at a point of ℝ¹ or ℝ⁴.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch(format!("{}-point for a {}-d probe", x.len(), self.dimension())));
        }
        match &self.probe {
            Probe::Conic { .. } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    return Ok(0.0);
                }
                let alpha = (x[0] / r).clamp(-1.0, 1.0).acos();
                let s = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                let nz = if s > 0.0 { x[3] / s } else { 0.0 };
                Ok(self.angular(alpha, nz) * self.radial(r))
            }
            Probe::Spectral { scale, .. } => {
                // φ(x) = (1/2π) ∫ φ̃(p) e^{ipx} dp, trapezoid over the window support
                let pmax = 9.0 * scale;
                let n = 4001;
                let dp = 2.0 * pmax / (n - 1) as f64;
                let mut acc = 0.0;
                for i in 0..n {
                    let p = -pmax + i as f64 * dp;
                    acc += self.spectral_value(p)? * (p * x[0]).cos();
                }
                Ok(acc * dp / (2.0 * PI))
            }
            Probe::Gaussian { sigma } => Ok((-0.5 * (x[0] / sigma).powi(2)).exp()),
            Probe::HermiteGaussian { coeffs } => {
                Ok(coeffs.iter().rev().fold(0.0, |acc, c| acc * x[0] + c) * (-0.5 * x[0] * x[0]).exp())
            }
        }
    }
}

/// Moments of a probe up to total order `n`, with the largest magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub max_abs: f64,
    /// `(multi-index, moment)` for every `|α| ≤ n`.
    pub moments: Vec<(Vec<usize>, f64)>,
}

fn multi_indices(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for idx in &out {
            let used: usize = idx.iter().sum();
            for k in 0..=(n - used) {
                let mut v = idx.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Moments `∫ x^α φ(x) dx`, `|α| ≤ n`, by quadrature.
///
/// Position-space probes use a Gauss–Legendre rule on `|x| ≤ 12σ`; spectral
/// probes use `∫ x^k φ = i^k φ̃^{(k)}(0)` with finite differences of the
/// transform; conic probes use a nested polar rule twice as fine as the
/// one that built their radial profile.
pub fn moments_vanish_check(phi: &TestFunction, n: usize) -> Result<MomentReport> {
    let moments = match &phi.probe {
        Probe::Gaussian { sigma } => position_moments(phi, n, 12.0 * sigma)?,
        Probe::HermiteGaussian { .. } => position_moments(phi, n, 12.0)?,
        Probe::Spectral { scale, .. } => spectral_moments(phi, n, *scale)?,
        Probe::Conic { .. } => conic_moments(phi, n)?,
    };
    let max_abs = moments.iter().map(|(_, m)| m.abs()).fold(0.0, f64::max);
    if !max_abs.is_finite() {
        return Err(Error::NonConvergent("moment quadrature produced non-finite values".into()));
    }
    Ok(MomentReport { max_abs, moments })
}

fn position_moments(phi: &TestFunction, n: usize, half_width: f64) -> Result<Vec<(Vec<usize>, f64)>> {
    let (x, w) = gauss_legendre_on(200, -half_width, half_width);
    let vals: Vec<f64> = x.iter().map(|&xi| phi.eval(&[xi])).collect::<Result<_>>()?;
    Ok((0..=n)
        .map(|k| {
            let m = x.iter().zip(&w).zip(&vals).map(|((xi, wi), v)| wi * v * xi.powi(k as i32)).sum();
            (vec![k], m)
        })
        .collect())
}

fn spectral_moments(phi: &TestFunction, n: usize, scale: f64) -> Result<Vec<(Vec<usize>, f64)>> {
    let h = scale / 100.0;
    let half = n as i64 / 2 + 2;
    let nodes: Vec<f64> = (-half..=half).map(|j| j as f64 * h).collect();
    let vals: Vec<f64> = nodes.iter().map(|&p| phi.spectral_value(p)).collect::<Result<_>>()?;
    Ok((0..=n)
        .map(|k| {
            let w = fd_weights(0.0, &nodes, k);
            let d: f64 = w.iter().zip(&vals).map(|(a, b)| a * b).sum();
            // x^k moment is i^k φ̃^{(k)}(0); its magnitude is |φ̃^{(k)}(0)|
            (vec![k], d)
        })
        .collect())
}

fn conic_moments(phi: &TestFunction, n: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let rule = conic_rule_points(phi, 2);
    // radial integrals Σ r^{|α|} r⁴ R dt for each total degree
    let radial: Vec<f64> = (0..=n).map(|s| rule.radial.iter().map(|(r, w)| w * r.powi(s as i32)).sum()).collect();
    Ok(multi_indices(4, n)
        .into_iter()
        .map(|idx| {
            let deg: usize = idx.iter().sum();
            let ang: f64 = rule
                .angular
                .iter()
                .map(|(om, w)| w * (0..4).map(|i| om[i].powi(idx[i] as i32)).product::<f64>())
                .sum();
            (idx, radial[deg] * ang)
        })
        .collect())
}

struct ConicPoints {
    radial: Vec<(f64, f64)>,
    /// Unit 4-direction `ω` and weight (angular measure times the angular profile).
    angular: Vec<([f64; 4], f64)>,
}

fn conic_rule_points(f: &TestFunction, refine: usize) -> ConicPoints {
    let (scale, lo, hi) = match f.probe {
        Probe::Conic { scale, alpha_lo, alpha_hi, .. } => (scale, alpha_lo, alpha_hi),
        _ => unreachable!("conic rule of a non-conic probe"),
    };
    let (u, dt) = radial_nodes(RADIAL_NODES * refine);
    let radial = u
        .iter()
        .map(|&x| {
            let r = x * scale;
            (r, r.powi(4) * f.radial(r) * dt)
        })
        .collect();
    let (alphas, aw) = gauss_legendre_on(48 * refine, lo, hi);
    let sphere = SphereGrid::gauss_for_degree(12 * refine);
    let mut angular = Vec::with_capacity(alphas.len() * sphere.len());
    for (&a, &wa) in alphas.iter().zip(&aw) {
        let (sa, ca) = a.sin_cos();
        for k in 0..sphere.len() {
            let (th, ph) = sphere.point(k);
            let nv = crate::geometry::unit_direction(th, ph);
            let w = wa * sa * sa * sphere.weight(k) * f.angular(a, nv[2]);
            if w != 0.0 {
                angular.push(([ca, sa * nv[0], sa * nv[1], sa * nv[2]], w));
            }
        }
    }
    ConicPoints { radial, angular }
}

/// `⟨F, φ⟩ = ∫ F(x) φ(x) d⁴x` for a conic probe, with `∫ |F φ|` alongside.
pub fn pair(field: &dyn Fn(&FourVector) -> f64, phi: &TestFunction) -> Result<(f64, f64)> {
    if phi.dimension() != 4 {
        return invalid("pairings on ℝ⁴ need a conic probe");
    }
    let rule = conic_rule_points(phi, 1);
    let mut acc = 0.0;
    let mut abs = 0.0;
    for (om, wa) in &rule.angular {
        for (r, wr) in &rule.radial {
            if *wr == 0.0 {
                continue;
            }
            let x = FourVector::new(r * om[0], r * om[1], r * om[2], r * om[3]);
            let v = field(&x) * wa * wr;
            if !v.is_finite() {
                return Err(Error::Singular(format!("field is not finite at {x:?}")));
            }
            acc += v;
            abs += v.abs();
        }
    }
    Ok((acc, abs))
}

/// `|⟨F, φ_in⟩| / |⟨F, φ_out⟩|` for probes inside and outside the light cone.
///
/// A pairing counts as vanishing when it is below `1e-10` of `∫|Fφ|`; an
/// error is returned if the denominator vanishes.
pub fn cone_support_check(
    field: &dyn Fn(&FourVector) -> f64,
    inside: &TestFunction,
    outside: &TestFunction,
) -> Result<f64> {
    if inside.support() != SupportHint::InsideCone {
        return invalid("inside probe must be supported inside the forward cone");
    }
    if outside.support() != SupportHint::OutsideCone {
        return invalid("outside probe must be supported outside the cone");
    }
    let (pin, ain) = pair(field, inside)?;
    let (pout, aout) = pair(field, outside)?;
    let vanishes = |p: f64, a: f64| p.abs() <= 1e-10 * a || a == 0.0;
    if vanishes(pout, aout) {
        let which = if vanishes(pin, ain) { "inside and outside" } else { "outside only" };
        return Err(Error::VanishingPairing(which.into()));
    }
    Ok(pin.abs() / pout.abs())
}

/// Coulomb field continued by zero into the light cone: `1/|x⃗|` where
/// `|x⃗| > |x⁰|`, else 0.
pub fn exterior_coulomb(x: &FourVector) -> f64 {
    let r = x.spatial_norm();
    if r > x.t.abs() {
        1.0 / r
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_values() {
        assert_eq!(s0_window(&[0.0, 0.0, 0.0], 1.0), 0.0);
        assert!((s0_window(&[0.0, 2.0, 0.0], 2.0) - (-2.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn window_is_flat_at_origin() {
        let a = 1.0;
        let r0 = 1e-3 * a;
        let h = 1e-4 * a;
        let nodes: Vec<f64> = (-4..=4).map(|j| r0 + j as f64 * h).collect();
        let vals: Vec<f64> = nodes.iter().map(|&r| s0_window(&[r], a)).collect();
        for k in 1..=6 {
            let w = fd_weights(r0, &nodes, k);
            let d: f64 = w.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-8);
        }
    }

    #[test]
    fn parity_of_moments() {
        let even = TestFunction::new(Probe::HermiteGaussian { coeffs: vec![1.0, 0.0, 0.3] }).unwrap();
        let odd = TestFunction::new(Probe::HermiteGaussian { coeffs: vec![0.0, 1.0, 0.0, -0.2] }).unwrap();
        let me = moments_vanish_check(&even, 7).unwrap();
        let mo = moments_vanish_check(&odd, 7).unwrap();
        for k in 0..=7 {
            if k % 2 == 1 {
                assert!(me.moments[k].1.abs() < 1e-12);
            } else {
                assert!(mo.moments[k].1.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_is_not_s00() {
        let g = TestFunction::new(Probe::Gaussian { sigma: 1.0 }).unwrap();
        let m = moments_vanish_check(&g, 4).unwrap();
        assert!((m.moments[0].1 - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn moment_free_profile_annihilates_low_moments() {
        let p = TestFunction::outside_cone(1.0, RadialProfile::MomentFree { order: 8 }).unwrap();
        let m = moments_vanish_check(&p, 8).unwrap();
        assert!(m.max_abs < 1e-8, "{}", m.max_abs);
        assert_eq!(m.moments.len(), 495);
    }

    #[test]
    fn probe_json_round_trip() {
        let p = TestFunction::inside_cone(0.7, RadialProfile::MomentFree { order: 4 }).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"type\":\"conic\""));
        let back: TestFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn zero_field_errors() {
        let i = TestFunction::inside_cone(1.0, RadialProfile::S0Window).unwrap();
        let o = TestFunction::outside_cone(1.0, RadialProfile::S0Window).unwrap();
        assert!(matches!(cone_support_check(&|_| 0.0, &i, &o), Err(Error::VanishingPairing(_))));
        assert!(cone_support_check(&|_| 1.0, &o, &i).is_err());
    }
}
