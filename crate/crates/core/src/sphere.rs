//! Quadrature grids on S² and orthonormal spherical harmonics.
//!
//! Harmonics carry the Condon–Shortley phase, `Y_{l,-m} = (-1)^m conj(Y_lm)`,
//! and satisfy `∫ |Y_lm|² dΩ = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;

/// Index of `(l, m)` in a packed harmonic vector: `l² + l + m`.
pub fn lm_index(l: usize, m: i64) -> usize {
    (l * l) + (l as i64 + m) as usize
}

/// Number of harmonics with `l ≤ lmax`.
pub fn lm_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Normalised associated Legendre functions `P̄_l^m(x)` for `0 ≤ m ≤ l ≤ lmax`,
/// packed at `l(l+1)/2 + m`, so that `Y_lm = P̄_l^m(cos θ) e^{imφ}`.
pub fn legendre_table(lmax: usize, x: f64) -> Vec<f64> {
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
    let s = (1.0 - x * x).max(0.0).sqrt();
    p[0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[idx(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[idx(m - 1, m - 1)];
    }
    for m in 0..lmax {
        p[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[idx(m, m)];
    }
    for m in 0..=lmax {
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[idx(l, m)] = a * (x * p[idx(l - 1, m)] - b * p[idx(l - 2, m)]);
        }
    }
    p
}

/// All `Y_lm(θ, φ)` with `l ≤ lmax`, packed by [`lm_index`].
pub fn ylm_all(lmax: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let p = legendre_table(lmax, theta.cos());
    let mut out = vec![Complex64::new(0.0, 0.0); lm_count(lmax)];
    for l in 0..=lmax {
        for m in 0..=l {
            let base = p[l * (l + 1) / 2 + m];
            let e = Complex64::from_polar(1.0, m as f64 * phi);
            out[lm_index(l, m as i64)] = e * base;
            if m > 0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out[lm_index(l, -(m as i64))] = e.conj() * (sign * base);
            }
        }
    }
    out
}

/// A single orthonormal spherical harmonic.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    assert!(m.unsigned_abs() as usize <= l, "|m| must not exceed l");
    let p = legendre_table(l, theta.cos());
    let ma = m.unsigned_abs() as usize;
    let base = p[l * (l + 1) / 2 + ma];
    let e = Complex64::from_polar(1.0, ma as f64 * phi);
    if m >= 0 {
        e * base
    } else {
        let sign = if ma.is_multiple_of(2) { 1.0 } else { -1.0 };
        e.conj() * (sign * base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereKind {
    /// Gauss–Legendre in `cos θ`, uniform in `φ`.
    GaussLegendre,
    /// Cell-centred uniform `θ`, uniform `φ`.
    Uniform,
}

/// Serializable description of a sphere grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub kind: SphereKind,
    pub n_theta: usize,
    pub n_phi: usize,
}

/// Tensor-product quadrature grid on S²; point `(i, j)` lives at `i * n_phi + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SphereSpec", into = "SphereSpec")]
pub struct SphereGrid {
    spec: SphereSpec,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    /// Weight of a θ-ring (already including `sin θ dθ`).
    ring_weights: Vec<f64>,
}

impl From<SphereSpec> for SphereGrid {
    fn from(spec: SphereSpec) -> Self {
        SphereGrid::build(spec)
    }
}

impl From<SphereGrid> for SphereSpec {
    fn from(g: SphereGrid) -> Self {
        g.spec
    }
}

impl SphereGrid {
    pub fn new(kind: SphereKind, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 3 || n_phi < 3 {
            return Err(crate::Error::GridTooCoarse(format!(
                "sphere grid {n_theta}x{n_phi} needs at least 3 nodes per axis"
            )));
        }
        Ok(Self::build(SphereSpec { kind, n_theta, n_phi }))
    }

    /// Gauss–Legendre grid exact for products of harmonics up to degree `2·lmax`.
    pub fn gauss_for_degree(lmax: usize) -> Self {
        let n_theta = lmax + 1;
        let n_phi = 2 * lmax + 2;
        Self::build(SphereSpec { kind: SphereKind::GaussLegendre, n_theta: n_theta.max(3), n_phi: n_phi.max(3) })
    }

    fn build(spec: SphereSpec) -> Self {
        let SphereSpec { kind, n_theta, n_phi } = spec;
        let (thetas, ring_weights) = match kind {
            SphereKind::GaussLegendre => {
                let (x, w) = gauss_legendre(n_theta);
                // descending cos θ gives ascending θ
                let thetas = x.iter().rev().map(|c| c.acos()).collect();
                let weights = w.iter().rev().copied().collect();
                (thetas, weights)
            }
            SphereKind::Uniform => {
                let dt = PI / n_theta as f64;
                let thetas: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * dt).collect();
                let weights = thetas.iter().map(|t| t.sin() * dt).collect();
                (thetas, weights)
            }
        };
        let dphi = 2.0 * PI / n_phi as f64;
        let phis = (0..n_phi).map(|j| j as f64 * dphi).collect();
        Self { spec, thetas, phis, ring_weights }
    }

    pub fn spec(&self) -> SphereSpec {
        self.spec
    }

    pub fn kind(&self) -> SphereKind {
        self.spec.kind
    }

    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.spec.n_phi
    }

    pub fn len(&self) -> usize {
        self.spec.n_theta * self.spec.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.spec.n_phi as f64
    }

    pub fn dtheta(&self) -> Option<f64> {
        match self.spec.kind {
            SphereKind::Uniform => Some(PI / self.spec.n_theta as f64),
            SphereKind::GaussLegendre => None,
        }
    }

    /// `(θ, φ)` of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let n_phi = self.spec.n_phi;
        (self.thetas[k / n_phi], self.phis[k % n_phi])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    /// Quadrature weight of flat index `k`.
    pub fn weight(&self, k: usize) -> f64 {
        self.ring_weights[k / self.spec.n_phi] * self.dphi()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().enumerate().map(|(k, v)| v * self.weight(k)).sum()
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().enumerate().map(|(k, v)| v * self.weight(k)).sum()
    }

    /// Highest degree resolved exactly by analysis on a Gauss–Legendre grid.
    pub fn band_limit(&self) -> usize {
        (self.spec.n_theta - 1).min((self.spec.n_phi - 1) / 2)
    }

    /// Coefficients `a_lm = ∫ f conj(Y_lm) dΩ`, `l ≤ lmax`, by quadrature.
    pub fn analysis(&self, values: &[Complex64], lmax: usize) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len(), "field does not match sphere grid");
        let (nt, np) = (self.spec.n_theta, self.spec.n_phi);
        let dphi = self.dphi();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lm_count(lmax)];
        // φ-transform per ring for m in [-lmax, lmax]
        let mut ring = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
        for i in 0..nt {
            for (mi, slot) in ring.iter_mut().enumerate() {
                let m = mi as i64 - lmax as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..np {
                    acc += values[i * np + j] * Complex64::from_polar(1.0, -(m as f64) * self.phis[j]);
                }
                *slot = acc * dphi;
            }
            let p = legendre_table(lmax, self.thetas[i].cos());
            let w = self.ring_weights[i];
            for l in 0..=lmax {
                for m in -(l as i64)..=(l as i64) {
                    let ma = m.unsigned_abs() as usize;
                    let mut base = p[l * (l + 1) / 2 + ma];
                    if m < 0 && ma % 2 == 1 {
                        base = -base;
                    }
                    coeffs[lm_index(l, m)] += ring[(m + lmax as i64) as usize] * (base * w);
                }
            }
        }
        coeffs
    }

    /// Values of `Σ a_lm Y_lm` on the grid.
    pub fn synthesis(&self, coeffs: &[Complex64], lmax: usize) -> Vec<Complex64> {
        assert!(coeffs.len() >= lm_count(lmax));
        let (nt, np) = (self.spec.n_theta, self.spec.n_phi);
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for i in 0..nt {
            let p = legendre_table(lmax, self.thetas[i].cos());
            for m in -(lmax as i64)..=(lmax as i64) {
                let ma = m.unsigned_abs() as usize;
                let mut ring = Complex64::new(0.0, 0.0);
                for l in ma..=lmax {
                    let mut base = p[l * (l + 1) / 2 + ma];
                    if m < 0 && ma % 2 == 1 {
                        base = -base;
                    }
                    ring += coeffs[lm_index(l, m)] * base;
                }
                if ring == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..np {
                    out[i * np + j] += ring * Complex64::from_polar(1.0, m as f64 * self.phis[j]);
                }
            }
        }
        out
    }

    /// Samples a function of `(θ, φ)` on the grid.
    pub fn sample<F: Fn(f64, f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points().map(|(t, p)| f(t, p)).collect()
    }

    /// `Δ_{S²} f` by harmonic analysis/synthesis up to the band limit.
    ///
    /// Exact for band-limited fields on Gauss–Legendre grids.
    pub fn laplacian_spectral(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.spec.kind != SphereKind::GaussLegendre {
            return invalid("spectral Laplacian needs a Gauss–Legendre grid");
        }
        let lmax = self.band_limit();
        let mut a = self.analysis(values, lmax);
        for l in 0..=lmax {
            let ev = -((l * (l + 1)) as f64);
            for m in -(l as i64)..=(l as i64) {
                a[lm_index(l, m)] *= ev;
            }
        }
        Ok(self.synthesis(&a, lmax))
    }
}

/// Evaluates `Σ a_lm Y_lm(θ, φ)` at one point.
pub fn evaluate_expansion(coeffs: &[Complex64], lmax: usize, theta: f64, phi: f64) -> Complex64 {
    let y = ylm_all(lmax, theta, phi);
    coeffs.iter().zip(&y).map(|(a, y)| a * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lm_packing_is_dense() {
        let mut seen = vec![false; lm_count(4)];
        for l in 0..=4usize {
            for m in -(l as i64)..=(l as i64) {
                let k = lm_index(l, m);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn y10_has_node_on_equator() {
        assert!(ylm(1, 0, PI / 2.0, 0.3).norm() < 1e-16);
        let expect = (3.0 / (4.0 * PI)).sqrt();
        assert!((ylm(1, 0, 0.0, 0.0).re - expect).abs() < 1e-15);
    }

    #[test]
    fn harmonics_orthonormal_by_quadrature() {
        let g = SphereGrid::gauss_for_degree(8);
        for l in 0..=4usize {
            for m in -(l as i64)..=(l as i64) {
                for l2 in 0..=4usize {
                    for m2 in -(l2 as i64)..=(l2 as i64) {
                        let v: Vec<Complex64> =
                            g.sample(|t, p| ylm(l, m, t, p).conj() * ylm(l2, m2, t, p));
                        let s = g.integrate(&v);
                        let expect = if l == l2 && m == m2 { 1.0 } else { 0.0 };
                        assert!((s - expect).norm() < 1e-12, "({l},{m})x({l2},{m2}) = {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn condon_shortley_symmetry() {
        for l in 1..=5usize {
            for m in 1..=(l as i64) {
                let a = ylm(l, -m, 0.7, 1.9);
                let b = ylm(l, m, 0.7, 1.9).conj() * if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn analysis_synthesis_round_trip() {
        let g = SphereGrid::gauss_for_degree(6);
        let mut a = vec![Complex64::new(0.0, 0.0); lm_count(6)];
        for (k, c) in a.iter_mut().enumerate() {
            *c = Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos());
        }
        let v = g.synthesis(&a, 6);
        let back = g.analysis(&v, 6);
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_laplacian_eigenvalue() {
        let g = SphereGrid::gauss_for_degree(5);
        let f = g.sample(|t, p| ylm(3, -2, t, p));
        let lap = g.laplacian_spectral(&f).unwrap();
        for (a, b) in lap.iter().zip(&f) {
            assert!((a + b * 12.0).norm() < 1e-11);
        }
    }
}
