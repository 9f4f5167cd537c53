//! Wave equation and Klein–Gordon normalised modes on the unit de Sitter
//! 3-hyperboloid with metric `ds² = dψ² - cosh²ψ dΩ²`.
//!
//! The d'Alembertian is
//!
//! ```text
//! □f = (1/cosh²ψ) ∂_ψ(cosh²ψ ∂_ψ f) - (1/cosh²ψ) Δ_{S²} f
//! ```
//!
//! and separating `f = f_l(ψ) Y_lm(θ, φ)` gives the radial equation
//! `f'' + 2 tanh ψ f' + l(l+1) f / cosh²ψ = 0`.
//!
//! Positive-frequency convention: with real solutions `u₁(0)=1, u₁'(0)=0` and
//! `u₂(0)=0, u₂'(0)=1`, the radial mode is `f_l = a u₁ - i b u₂` where
//! `a = 1/√(2ω)`, `b = √(ω/2)`, `ω = l + ½`. Then `f_l(0) = a > 0` and the
//! Klein–Gordon norm is `2ab = 1`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::HyperboloidPoint;
use crate::ode::{self, Tolerance};
use crate::quadrature::{fd_weights, linspace};
use crate::sphere::{ylm, SphereGrid, SphereKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default ψ-grid half width.
pub const DEFAULT_PSI_MAX: f64 = 3.0;
/// Default number of ψ nodes.
pub const DEFAULT_PSI_NODES: usize = 601;

/// Uniform ψ axis times a sphere grid. Flat index is `ip * sphere.len() + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductGrid {
    psi: Vec<f64>,
    sphere: SphereGrid,
}

impl ProductGrid {
    pub fn new(psi_min: f64, psi_max: f64, n_psi: usize, sphere: SphereGrid) -> Result<Self> {
        if n_psi < 3 {
            return Err(Error::GridTooCoarse(format!("{n_psi} ψ nodes, need at least 3")));
        }
        if psi_max <= psi_min || !psi_min.is_finite() || !psi_max.is_finite() {
            return invalid("ψ range must be finite and increasing");
        }
        Ok(Self { psi: linspace(psi_min, psi_max, n_psi), sphere })
    }

    /// `|ψ| ≤ psi_max` with `n_psi` nodes.
    pub fn symmetric(psi_max: f64, n_psi: usize, sphere: SphereGrid) -> Result<Self> {
        Self::new(-psi_max, psi_max, n_psi, sphere)
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn sphere(&self) -> &SphereGrid {
        &self.sphere
    }

    pub fn psi_step(&self) -> f64 {
        self.psi[1] - self.psi[0]
    }

    pub fn len(&self) -> usize {
        self.psi.len() * self.sphere.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ip: usize, k: usize) -> usize {
        ip * self.sphere.len() + k
    }

    pub fn point(&self, idx: usize) -> HyperboloidPoint {
        let ns = self.sphere.len();
        let (theta, phi) = self.sphere.point(idx % ns);
        HyperboloidPoint::new(self.psi[idx / ns], theta, phi)
    }

    pub fn points(&self) -> impl Iterator<Item = HyperboloidPoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn sample<F: Fn(HyperboloidPoint) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points().map(f).collect()
    }

    /// Same sphere, ψ step halved (node count `2n - 1`).
    pub fn refined(&self) -> Self {
        let n = self.psi.len();
        Self { psi: linspace(self.psi[0], self.psi[n - 1], 2 * n - 1), sphere: self.sphere.clone() }
    }
}

/// Residual of the discrete wave operator; only interior nodes carry values.
#[derive(Debug, Clone)]
pub struct WaveResidual {
    pub grid: ProductGrid,
    pub values: Vec<Complex64>,
    pub interior: Vec<bool>,
}

impl WaveResidual {
    pub fn max_abs(&self) -> f64 {
        self.max_abs_where(|_| true)
    }

    /// Maximum over interior nodes whose ψ satisfies `keep`.
    pub fn max_abs_where<P: Fn(f64) -> bool>(&self, keep: P) -> f64 {
        let ns = self.grid.sphere.len();
        self.values
            .iter()
            .zip(&self.interior)
            .enumerate()
            .filter(|(i, (_, inside))| **inside && keep(self.grid.psi[i / ns]))
            .map(|(_, (v, _))| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Second-order finite-difference evaluation of `□f` at interior nodes.
///
/// ψ derivatives use central differences. On a uniform sphere grid the
/// angular Laplacian is the conservative five-point stencil; on a
/// Gauss–Legendre grid it is applied spectrally (exact for band-limited data).
pub fn dalembert_ds3(grid: &ProductGrid, field: &[Complex64]) -> Result<WaveResidual> {
    if field.len() != grid.len() {
        return Err(Error::GridMismatch(format!("field has {} samples, grid {}", field.len(), grid.len())));
    }
    let sphere = &grid.sphere;
    if grid.psi.len() < 3 || sphere.n_theta() < 3 || sphere.n_phi() < 3 {
        return Err(Error::GridTooCoarse("wave operator needs ≥ 3 nodes per axis".into()));
    }
    if field.iter().any(|v| !v.is_finite()) {
        return invalid("field contains non-finite samples");
    }
    let ns = sphere.len();
    let np = grid.psi.len();
    let h = grid.psi_step();

    let mut lap = vec![Complex64::new(0.0, 0.0); field.len()];
    let mut ang_interior = vec![true; ns];
    match sphere.kind() {
        SphereKind::GaussLegendre => {
            for ip in 0..np {
                let slice = &field[ip * ns..(ip + 1) * ns];
                let l = sphere.laplacian_spectral(slice)?;
                lap[ip * ns..(ip + 1) * ns].copy_from_slice(&l);
            }
        }
        SphereKind::Uniform => {
            let (nt, nphi) = (sphere.n_theta(), sphere.n_phi());
            let dt = sphere.dtheta().expect("uniform grid has a θ step");
            let dp = sphere.dphi();
            let thetas = sphere.thetas();
            for i in 0..nt {
                for j in 0..nphi {
                    ang_interior[i * nphi + j] = i > 0 && i + 1 < nt;
                }
            }
            for ip in 0..np {
                let base = ip * ns;
                for i in 1..nt - 1 {
                    let st = thetas[i].sin();
                    let sp = (thetas[i] + 0.5 * dt).sin();
                    let sm = (thetas[i] - 0.5 * dt).sin();
                    for j in 0..nphi {
                        let jp = (j + 1) % nphi;
                        let jm = (j + nphi - 1) % nphi;
                        let c = field[base + i * nphi + j];
                        let up = field[base + (i + 1) * nphi + j];
                        let dn = field[base + (i - 1) * nphi + j];
                        let theta_part = (sp * (up - c) - sm * (c - dn)) / (dt * dt * st);
                        let phi_part = (field[base + i * nphi + jp] - c * 2.0 + field[base + i * nphi + jm])
                            / (dp * dp * st * st);
                        lap[base + i * nphi + j] = theta_part + phi_part;
                    }
                }
            }
        }
    }

    let mut values = vec![Complex64::new(0.0, 0.0); field.len()];
    let mut interior = vec![false; field.len()];
    for ip in 1..np - 1 {
        let psi = grid.psi[ip];
        let c2 = psi.cosh().powi(2);
        let th = psi.tanh();
        for k in 0..ns {
            if !ang_interior[k] {
                continue;
            }
            let idx = ip * ns + k;
            let f0 = field[idx];
            let fp = field[idx + ns];
            let fm = field[idx - ns];
            let d2 = (fp - f0 * 2.0 + fm) / (h * h);
            let d1 = (fp - fm) / (2.0 * h);
            values[idx] = d2 + d1 * (2.0 * th) - lap[idx] / c2;
            interior[idx] = true;
        }
    }
    Ok(WaveResidual { grid: grid.clone(), values, interior })
}

/// Result of running the wave operator on three successively halved ψ grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveCertification {
    /// Max residual over `|ψ| ≤ psi_window` on grids `h, h/2, h/4`.
    pub residuals: [f64; 3],
    /// Observed orders `log₂(r_h / r_{h/2})`, `log₂(r_{h/2} / r_{h/4})`.
    pub orders: [f64; 2],
    /// Max of the Richardson combination `(4 R_{h/4} - R_{h/2}) / 3` on shared nodes.
    pub extrapolated: f64,
}

/// Samples `f` on `grid` and its two ψ refinements and measures convergence.
pub fn certify_wave_solution<F>(grid: &ProductGrid, psi_window: f64, f: F) -> Result<WaveCertification>
where
    F: Fn(HyperboloidPoint) -> Complex64,
{
    certify_wave_field(grid, psi_window, |g| Ok(g.sample(&f)))
}

/// As [`certify_wave_solution`], with a sampler that fills a whole grid at once.
pub fn certify_wave_field<S>(grid: &ProductGrid, psi_window: f64, sample: S) -> Result<WaveCertification>
where
    S: Fn(&ProductGrid) -> Result<Vec<Complex64>>,
{
    let g1 = grid.clone();
    let g2 = g1.refined();
    let g3 = g2.refined();
    let keep = |p: f64| p.abs() <= psi_window + 1e-12;
    let r1 = dalembert_ds3(&g1, &sample(&g1)?)?;
    let r2 = dalembert_ds3(&g2, &sample(&g2)?)?;
    let r3 = dalembert_ds3(&g3, &sample(&g3)?)?;
    let residuals = [r1.max_abs_where(keep), r2.max_abs_where(keep), r3.max_abs_where(keep)];
    let order = |a: f64, b: f64| if b > 0.0 { (a / b).log2() } else { f64::INFINITY };
    let orders = [order(residuals[0], residuals[1]), order(residuals[1], residuals[2])];

    // shared nodes: every second node of g3 is a node of g2
    let ns = grid.sphere.len();
    let mut extrapolated = 0.0_f64;
    for ip in 1..g2.psi.len() - 1 {
        if !keep(g2.psi[ip]) {
            continue;
        }
        for k in 0..ns {
            let i2 = ip * ns + k;
            let i3 = 2 * ip * ns + k;
            if r2.interior[i2] && r3.interior[i3] {
                let ext = (r3.values[i3] * 4.0 - r2.values[i2]) / 3.0;
                extrapolated = extrapolated.max(ext.norm());
            }
        }
    }
    Ok(WaveCertification { residuals, orders, extrapolated })
}

fn radial_rhs(l: usize) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let ll = (l * (l + 1)) as f64;
    move |t: f64, y: &[f64; 2]| {
        let c = t.cosh();
        [y[1], -2.0 * t.tanh() * y[1] - ll * y[0] / (c * c)]
    }
}

/// Positive-frequency radial solution `f_l(ψ)` sampled on a ψ grid, with `f_l'`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialMode {
    pub l: usize,
    pub psi: Vec<f64>,
    pub values: Vec<Complex64>,
    pub derivs: Vec<Complex64>,
    /// Klein–Gordon norm measured on the samples after normalisation.
    pub kg_norm: f64,
    /// `f_l = a u₁ - i b u₂` (after normalisation).
    a: f64,
    b: f64,
}

impl RadialMode {
    /// Integrates the radial equation and returns the normalised mode.
    pub fn solve(l: usize, psi: &[f64]) -> Result<Self> {
        if l == 0 {
            return invalid("l = 0 is spanned by {1, tanh ψ} and has no oscillating mode");
        }
        if psi.is_empty() || psi.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("ψ grid must be strictly increasing");
        }
        let omega = l as f64 + 0.5;
        let mut a = 1.0 / (2.0 * omega).sqrt();
        let mut b = (omega / 2.0).sqrt();
        let rhs = radial_rhs(l);
        let tol = Tolerance::default();

        let mut u1 = vec![[0.0; 2]; psi.len()];
        let mut u2 = vec![[0.0; 2]; psi.len()];
        // march outward from ψ = 0 in both directions, node to node
        let split = psi.partition_point(|&p| p < 0.0);
        for (range_fwd, start) in [(true, split), (false, split)] {
            let mut t = 0.0;
            let mut y1 = [1.0, 0.0];
            let mut y2 = [0.0, 1.0];
            let idx: Vec<usize> = if range_fwd { (start..psi.len()).collect() } else { (0..start).rev().collect() };
            for i in idx {
                y1 = ode::integrate(&rhs, t, y1, psi[i], tol)?;
                y2 = ode::integrate(&rhs, t, y2, psi[i], tol)?;
                t = psi[i];
                u1[i] = y1;
                u2[i] = y2;
            }
        }
        let build = |a: f64, b: f64| -> (Vec<Complex64>, Vec<Complex64>) {
            let v = u1.iter().zip(&u2).map(|(p, q)| Complex64::new(a * p[0], -b * q[0])).collect();
            let d = u1.iter().zip(&u2).map(|(p, q)| Complex64::new(a * p[1], -b * q[1])).collect();
            (v, d)
        };
        let (values, derivs) = build(a, b);
        // measure the norm on the sample closest to ψ = 0 and renormalise
        let k = nearest(psi, 0.0);
        let norm = radial_kg_norm(psi[k], values[k], derivs[k]);
        if !(norm > 0.0) {
            return Err(Error::NonConvergent(format!("mode l = {l} has non-positive KG norm {norm}")));
        }
        let s = norm.sqrt();
        a /= s;
        b /= s;
        let (values, derivs) = build(a, b);
        let kg_norm = radial_kg_norm(psi[k], values[k], derivs[k]);
        Ok(Self { l, psi: psi.to_vec(), values, derivs, kg_norm, a, b })
    }

    /// `(f_l(ψ), f_l'(ψ))` at an arbitrary ψ, integrating from ψ = 0.
    pub fn eval(&self, psi: f64) -> Result<(Complex64, Complex64)> {
        let rhs = radial_rhs(self.l);
        let tol = Tolerance::default();
        let y1 = ode::integrate(&rhs, 0.0, [1.0, 0.0], psi, tol)?;
        let y2 = ode::integrate(&rhs, 0.0, [0.0, 1.0], psi, tol)?;
        Ok((Complex64::new(self.a * y1[0], -self.b * y2[0]), Complex64::new(self.a * y1[1], -self.b * y2[1])))
    }

    /// Value at ψ, reusing a grid sample when ψ is a node.
    pub fn value_at(&self, psi: f64) -> Result<Complex64> {
        let k = nearest(&self.psi, psi);
        if (self.psi[k] - psi).abs() < 1e-14 {
            return Ok(self.values[k]);
        }
        Ok(self.eval(psi)?.0)
    }

    /// Max of `|f'' + 2 tanh ψ f' + l(l+1) f / cosh²ψ|` with `f''` taken as a
    /// sixth-order finite difference of the stored `f'` samples.
    ///
    /// Requires a uniform grid with at least seven nodes.
    pub fn ode_residual(&self) -> f64 {
        let n = self.psi.len();
        if n < 7 {
            return f64::NAN;
        }
        let ll = (self.l * (self.l + 1)) as f64;
        let mut worst = 0.0_f64;
        for i in 0..n {
            let lo = i.saturating_sub(3).min(n - 7);
            let nodes = &self.psi[lo..lo + 7];
            let w = fd_weights(self.psi[i], nodes, 1);
            let d2: Complex64 = w.iter().zip(&self.derivs[lo..lo + 7]).map(|(w, d)| d * *w).sum();
            let p = self.psi[i];
            let c = p.cosh();
            let r = d2 + self.derivs[i] * (2.0 * p.tanh()) + self.values[i] * (ll / (c * c));
            worst = worst.max(r.norm());
        }
        worst
    }

    /// Wronskian-form norm evaluated at every sample; returns the worst `|norm - 1|`.
    pub fn kg_norm_drift(&self) -> f64 {
        self.psi
            .iter()
            .zip(self.values.iter().zip(&self.derivs))
            .map(|(p, (v, d))| (radial_kg_norm(*p, *v, *d) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn radial_kg_norm(psi: f64, f: Complex64, df: Complex64) -> f64 {
    // i cosh²ψ (f̄ f' - f f̄') with ∫|Y|² = 1
    let c2 = psi.cosh().powi(2);
    (I * c2 * (f.conj() * df - f * df.conj())).re
}

fn nearest(xs: &[f64], x: f64) -> usize {
    xs.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// A full mode `f_l(ψ) Y_lm(θ, φ)`.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    pub m: i64,
    pub radial: RadialMode,
}

impl ModeFunction {
    pub fn new(radial: RadialMode, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > radial.l {
            return invalid(format!("|m| = {} exceeds l = {}", m.abs(), radial.l));
        }
        Ok(Self { m, radial })
    }

    pub fn l(&self) -> usize {
        self.radial.l
    }

    pub fn eval(&self, p: HyperboloidPoint) -> Result<Complex64> {
        Ok(self.radial.value_at(p.psi)? * ylm(self.radial.l, self.m, p.theta, p.phi))
    }

    /// Values and ψ-derivatives on the slice `ψ = const`.
    pub fn slice(&self, psi: f64, sphere: &SphereGrid) -> Result<SliceData> {
        let (f, df) = self.radial.eval(psi)?;
        let y: Vec<Complex64> = sphere.sample(|t, p| ylm(self.radial.l, self.m, t, p));
        Ok(SliceData {
            psi,
            sphere: sphere.clone(),
            values: y.iter().map(|y| y * f).collect(),
            dpsi: y.iter().map(|y| y * df).collect(),
        })
    }

    /// Samples the mode on a product grid.
    pub fn sample(&self, grid: &ProductGrid) -> Result<Vec<Complex64>> {
        let radial = RadialMode::solve(self.radial.l, grid.psi())?;
        let y: Vec<Complex64> = grid.sphere().sample(|t, p| ylm(self.radial.l, self.m, t, p));
        let mut out = Vec::with_capacity(grid.len());
        for f in &radial.values {
            out.extend(y.iter().map(|y| y * f));
        }
        Ok(out)
    }
}

/// `f_l(ψ) Y_lm(θ, φ)` at a single point, integrating the radial equation.
pub fn mode_function(l: usize, m: i64, p: HyperboloidPoint) -> Result<Complex64> {
    if l == 0 || m.unsigned_abs() as usize > l {
        return invalid(format!("invalid mode (l, m) = ({l}, {m})"));
    }
    let radial = RadialMode::solve(l, &[p.psi])?;
    Ok(radial.values[0] * ylm(l, m, p.theta, p.phi))
}

/// Field values and ψ-derivatives on one Cauchy slice.
#[derive(Debug, Clone)]
pub struct SliceData {
    pub psi: f64,
    pub sphere: SphereGrid,
    pub values: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
}

impl SliceData {
    pub fn conj(&self) -> Self {
        Self {
            psi: self.psi,
            sphere: self.sphere.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            dpsi: self.dpsi.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Linear combination `α·self + β·other` on the same slice.
    pub fn combine(&self, alpha: Complex64, other: &SliceData, beta: Complex64) -> Result<Self> {
        check_same_slice(self, other)?;
        Ok(Self {
            psi: self.psi,
            sphere: self.sphere.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * alpha + b * beta).collect(),
            dpsi: self.dpsi.iter().zip(&other.dpsi).map(|(a, b)| a * alpha + b * beta).collect(),
        })
    }
}

fn check_same_slice(f: &SliceData, g: &SliceData) -> Result<()> {
    if f.sphere != g.sphere || (f.psi - g.psi).abs() > 1e-14 || f.values.len() != g.values.len() {
        return Err(Error::GridMismatch("slices differ in ψ or sphere grid".into()));
    }
    if f.values.len() != f.sphere.len() || f.dpsi.len() != f.sphere.len() {
        return Err(Error::GridMismatch("slice data does not match its sphere grid".into()));
    }
    Ok(())
}

/// Klein–Gordon product `i ∫_{ψ=const} cosh²ψ dΩ (f̄ ∂_ψ g - g ∂_ψ f̄)`.
pub fn kg_inner(f: &SliceData, g: &SliceData) -> Result<Complex64> {
    check_same_slice(f, g)?;
    let integrand: Vec<Complex64> = (0..f.values.len())
        .map(|k| f.values[k].conj() * g.dpsi[k] - g.values[k] * f.dpsi[k].conj())
        .collect();
    Ok(I * f.psi.cosh().powi(2) * f.sphere.integrate(&integrand))
}

/// Writes grid samples as CSV with columns `psi,theta,phi,re,im`.
pub fn write_grid_csv<W: Write>(mut w: W, grid: &ProductGrid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch("values do not match grid".into()));
    }
    writeln!(w, "psi,theta,phi,re,im")?;
    for (p, v) in grid.points().zip(values) {
        writeln!(
            w,
            "{},{},{},{},{}",
            crate::io::fmt_f64(p.psi),
            crate::io::fmt_f64(p.theta),
            crate::io::fmt_f64(p.phi),
            crate::io::fmt_f64(v.re),
            crate::io::fmt_f64(v.im)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn default_psi() -> Vec<f64> {
        linspace(-DEFAULT_PSI_MAX, DEFAULT_PSI_MAX, DEFAULT_PSI_NODES)
    }

    #[test]
    fn l_zero_rejected() {
        assert!(RadialMode::solve(0, &default_psi()).is_err());
        assert!(mode_function(0, 0, HyperboloidPoint::new(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn invalid_m_rejected() {
        assert!(mode_function(1, 2, HyperboloidPoint::new(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn l1_span_contains_sech_squared() {
        let psi = default_psi();
        let m = RadialMode::solve(1, &psi).unwrap();
        // least squares of sech² against {Re f, Im f}
        let target: Vec<f64> = psi.iter().map(|p| 1.0 / p.cosh().powi(2)).collect();
        let b1: Vec<f64> = m.values.iter().map(|v| v.re).collect();
        let b2: Vec<f64> = m.values.iter().map(|v| v.im).collect();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let (g11, g12, g22) = (dot(&b1, &b1), dot(&b1, &b2), dot(&b2, &b2));
        let (r1, r2) = (dot(&b1, &target), dot(&b2, &target));
        let det = g11 * g22 - g12 * g12;
        let c1 = (r1 * g22 - r2 * g12) / det;
        let c2 = (g11 * r2 - g12 * r1) / det;
        let resid = target
            .iter()
            .zip(b1.iter().zip(&b2))
            .map(|(t, (x, y))| (t - c1 * x - c2 * y).abs())
            .fold(0.0, f64::max);
        assert!(resid < 1e-8, "residual {resid}");
    }

    #[test]
    fn modes_have_unit_norm_and_small_ode_residual() {
        let psi = default_psi();
        for l in 1..=4 {
            let m = RadialMode::solve(l, &psi).unwrap();
            assert!((m.kg_norm - 1.0).abs() < 1e-8, "l = {l}: norm {}", m.kg_norm);
            assert!(m.kg_norm_drift() < 1e-8, "l = {l}: drift {}", m.kg_norm_drift());
            assert!(m.ode_residual() < 1e-8, "l = {l}: residual {}", m.ode_residual());
            let k = nearest(&psi, 0.0);
            assert!(m.values[k].im.abs() < 1e-15 && m.values[k].re > 0.0);
        }
    }

    #[test]
    fn kg_inner_of_mode_and_conjugate() {
        let sphere = SphereGrid::gauss_for_degree(6);
        let mode = ModeFunction::new(RadialMode::solve(2, &default_psi()).unwrap(), 1).unwrap();
        let s = mode.slice(0.4, &sphere).unwrap();
        let n = kg_inner(&s, &s).unwrap();
        assert!((n - 1.0).norm() < 1e-10, "{n}");
        let c = s.conj();
        let nc = kg_inner(&c, &c).unwrap();
        assert!((nc + 1.0).norm() < 1e-10, "{nc}");
    }

    #[test]
    fn kg_inner_rejects_mismatched_slices() {
        let psi = default_psi();
        let mode = ModeFunction::new(RadialMode::solve(1, &psi).unwrap(), 0).unwrap();
        let a = mode.slice(0.0, &SphereGrid::gauss_for_degree(4)).unwrap();
        let b = mode.slice(0.0, &SphereGrid::gauss_for_degree(5)).unwrap();
        let c = mode.slice(0.3, &SphereGrid::gauss_for_degree(4)).unwrap();
        assert!(kg_inner(&a, &b).is_err());
        assert!(kg_inner(&a, &c).is_err());
    }

    #[test]
    fn mode_node_on_equator() {
        let v = mode_function(1, 0, HyperboloidPoint::new(0.7, PI / 2.0, 0.2)).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let grid = ProductGrid::symmetric(3.0, 41, SphereGrid::new(SphereKind::Uniform, 12, 16).unwrap()).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); grid.len()];
        let r = dalembert_ds3(&grid, &f).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let sphere = SphereGrid::new(SphereKind::Uniform, 4, 4).unwrap();
        let grid = ProductGrid { psi: vec![0.0, 1.0], sphere };
        let f = vec![Complex64::new(0.0, 0.0); grid.len()];
        assert!(matches!(dalembert_ds3(&grid, &f), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn closed_form_l1_solution_converges_second_order_on_uniform_grid() {
        // cos θ / cosh²ψ solves the wave equation; both ψ and θ are discretised
        let f = |p: HyperboloidPoint| Complex64::new(p.theta.cos() / p.psi.cosh().powi(2), 0.0);
        let mut prev: Option<f64> = None;
        for (np, nt) in [(61usize, 16usize), (121, 32), (241, 64)] {
            let sphere = SphereGrid::new(SphereKind::Uniform, nt, 8).unwrap();
            let grid = ProductGrid::symmetric(3.0, np, sphere).unwrap();
            let r = dalembert_ds3(&grid, &grid.sample(f)).unwrap().max_abs();
            if let Some(p) = prev {
                let order: f64 = (p / r).log2();
                assert!((order - 2.0).abs() < 0.2, "order {order}");
            }
            prev = Some(r);
        }
    }
}
