//! SL(2,C) acting on homogeneous functions on the forward light cone.
//!
//! A function of degree `χ` on the cone is stored through its restriction to
//! unit rays `k = (1, n)`; the full value at `ω(1, n)` is `ω^χ f(n)`.
//! Group elements act by `(A·f)(k) = f(Λ(A)⁻¹ k)`, so that `A·(B·f) = (AB)·f`.
//!
//! Sign conventions: `exp(θ n·σ / 2)` is a boost of rapidity `θ` along `n`, and
//! `exp(iθ σ₃/2)` rotates the frame by `θ` about z (`x' = x cos θ + y sin θ`).
//! Generators are `J = i d/dε A(ε)·` with `A(ε) = exp(-iε σ/2)` and
//! `K = i d/dε A(ε)·` with `A(ε) = exp(ε σ/2)`; the Casimirs are
//! `C₁ = J² - K² = l₀² + l₁² - 1` and `C₂ = J·K = -i l₀ l₁`, which puts the
//! principal series `χ = -1 + iν` at `(l₀, l₁) = (0, iν)`.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{FourVector, LorentzMatrix};
use crate::io::fmt_f64;
use crate::sphere::{evaluate_expansion, lm_count, ylm_all, SphereGrid};

type C2x2 = [[Complex64; 2]; 2];

const DET_TOL: f64 = 1e-12;

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn pauli(mu: usize) -> C2x2 {
    let (o, z, i) = (Complex64::new(1.0, 0.0), cz(), Complex64::new(0.0, 1.0));
    match mu {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

fn mul(a: &C2x2, b: &C2x2) -> C2x2 {
    let mut out = [[cz(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &C2x2) -> C2x2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// A unimodular 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    a: C2x2,
}

impl GroupElement {
    pub fn new(a: C2x2) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if (det - 1.0).norm() > DET_TOL || a.iter().flatten().any(|z| !z.is_finite()) {
            return invalid(format!("det A = {det}, expected 1"));
        }
        Ok(Self { a })
    }

    pub fn identity() -> Self {
        Self { a: pauli(0) }
    }

    pub fn matrix(&self) -> C2x2 {
        self.a
    }

    /// `exp(z n·σ/2) = cosh(z/2) I + sinh(z/2) n·σ` for complex `z`.
    fn exp_sigma(z: Complex64, axis: [f64; 3]) -> Self {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (c, s) = ((z / 2.0).cosh(), (z / 2.0).sinh());
        let mut a = [[c, cz()], [cz(), c]];
        for (k, &n) in axis.iter().enumerate() {
            let p = pauli(k + 1);
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j] += s * (n / norm) * p[i][j];
                }
            }
        }
        Self { a }
    }

    /// `exp(α n·σ/2)`: boost with rapidity `α` along `n`.
    pub fn boost(alpha: f64, axis: [f64; 3]) -> Self {
        Self::exp_sigma(Complex64::new(alpha, 0.0), axis)
    }

    /// `exp(iθ n·σ/2)`.
    pub fn rotation(theta: f64, axis: [f64; 3]) -> Self {
        Self::exp_sigma(Complex64::new(0.0, theta), axis)
    }

    /// Random rotation followed by a boost with rapidity at most `max_rapidity`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> Self {
        let mut axis = || {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let s = (1.0 - z * z).sqrt();
            [s * phi.cos(), s * phi.sin(), z]
        };
        let (ba, ra) = (axis(), axis());
        let theta = rng.gen_range(0.0..4.0 * std::f64::consts::PI);
        let alpha = rng.gen_range(0.0..=max_rapidity);
        Self::boost(alpha, ba).compose(&Self::rotation(theta, ra))
    }

    pub fn compose(&self, other: &GroupElement) -> Self {
        Self { a: mul(&self.a, &other.a) }
    }

    pub fn inverse(&self) -> Self {
        let a = &self.a;
        Self { a: [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]] }
    }

    pub fn neg(&self) -> Self {
        let a = &self.a;
        Self { a: [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]] }
    }
}

/// `Λ^μ_ν = ½ Tr(σ_μ A σ_ν A†)`.
pub fn sl2_to_lorentz(g: &GroupElement) -> Result<LorentzMatrix> {
    let g = GroupElement::new(g.a)?;
    let ad = dagger(&g.a);
    let mut m = [[0.0; 4]; 4];
    for (nu, col) in (0..4).map(|nu| (nu, mul(&mul(&g.a, &pauli(nu)), &ad))) {
        for (mu, row) in m.iter_mut().enumerate() {
            let p = mul(&pauli(mu), &col);
            row[nu] = 0.5 * (p[0][0] + p[1][1]).re;
        }
    }
    Ok(LorentzMatrix(m))
}

/// Restriction of a degree-`χ` cone function to the unit-ray sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeFunction {
    pub chi: Complex64,
    pub grid: SphereGrid,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeHeader {
    pub chi_re: f64,
    pub chi_im: f64,
    pub grid: SphereGrid,
}

impl ConeFunction {
    pub fn new(chi: Complex64, grid: SphereGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values on a grid of {}", values.len(), grid.len())));
        }
        Ok(Self { chi, grid, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(chi: Complex64, grid: SphereGrid, f: F) -> Self {
        let values = grid.sample(f);
        Self { chi, grid, values }
    }

    /// `Σ a_lm Y_lm` sampled on `grid`.
    pub fn from_harmonics(chi: Complex64, grid: SphereGrid, coeffs: &[Complex64], lmax: usize) -> Self {
        let values = grid.synthesis(coeffs, lmax);
        Self { chi, grid, values }
    }

    /// Value at `ω(1, n)`.
    pub fn eval_on_cone(&self, k: &FourVector) -> Result<Complex64> {
        let (omega, theta, phi) = ray(k)?;
        let a = self.grid.analysis(&self.values, self.grid.band_limit());
        Ok(Complex64::new(omega, 0.0).powc(self.chi) * evaluate_expansion(&a, self.grid.band_limit(), theta, phi))
    }

    pub fn header(&self) -> ConeHeader {
        ConeHeader { chi_re: self.chi.re, chi_im: self.chi.im, grid: self.grid.clone() }
    }

    /// `theta,phi,re,im` rows; the header goes to a separate JSON file.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,phi,re,im")?;
        for ((t, p), v) in self.grid.points().zip(&self.values) {
            writeln!(w, "{},{},{},{}", fmt_f64(t), fmt_f64(p), fmt_f64(v.re), fmt_f64(v.im))?;
        }
        Ok(())
    }
}

/// `(ω, θ, φ)` with `k = ω(1, n(θ, φ))`.
fn ray(k: &FourVector) -> Result<(f64, f64, f64)> {
    let r = k.spatial_norm();
    if !(k.t > 0.0) || (k.t - r).abs() > 1e-10 * k.t {
        return invalid(format!("{k:?} is not on the forward light cone"));
    }
    let theta = (k.z / r).clamp(-1.0, 1.0).acos();
    let phi = k.y.atan2(k.x);
    Ok((k.t, theta, phi))
}

/// Pulled-back ray data `(ω', θ', φ')` with `Λ⁻¹(1, n) = ω'(1, n')` for every grid point.
fn pullback(g: &GroupElement, grid: &SphereGrid) -> Result<Vec<(f64, f64, f64)>> {
    let inv = sl2_to_lorentz(g)?.inverse();
    grid.points()
        .map(|(t, p)| {
            let n = crate::geometry::unit_direction(t, p);
            let k = inv.apply(&FourVector::new(1.0, n[0], n[1], n[2]));
            // renormalise the null condition lost to rounding
            let r = k.spatial_norm();
            ray(&FourVector::new(r, k.x, k.y, k.z))
        })
        .collect()
}

/// `(A·f)(n) = ω'^χ f(n')`, interpolating `f` by its spherical-harmonic
/// expansion up to the grid's band limit.
pub fn act_homogeneous(g: &GroupElement, f: &ConeFunction) -> Result<ConeFunction> {
    let lmax = f.grid.band_limit();
    let a = f.grid.analysis(&f.values, lmax);
    let mut values = Vec::with_capacity(f.values.len());
    for (omega, theta, phi) in pullback(g, &f.grid)? {
        let v = Complex64::new(omega, 0.0).powc(f.chi) * evaluate_expansion(&a, lmax, theta, phi);
        if !v.is_finite() {
            return Err(Error::NonConvergent(format!("interpolation failed at θ = {theta}, φ = {phi}")));
        }
        values.push(v);
    }
    Ok(ConeFunction { chi: f.chi, grid: f.grid.clone(), values })
}

/// `∫ conj(f) g dΩ`.
pub fn l2_inner(f: &ConeFunction, g: &ConeFunction) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch("cone functions live on different grids".into()));
    }
    let prod: Vec<Complex64> = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).collect();
    Ok(f.grid.integrate(&prod))
}

/// Representation labels `(l₀, l₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepLabels {
    pub l0: f64,
    pub l1: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

/// Matrix of `i d/dε (A(ε)·Y_lm)` in the harmonic basis, `l ≤ lmax`.
fn generator(chi: Complex64, lmax: usize, grid: &SphereGrid, family: impl Fn(f64) -> GroupElement) -> Result<Vec<Vec<Complex64>>> {
    const EPS: f64 = 1e-4;
    let n = lm_count(lmax);
    let mut cols = vec![vec![cz(); n]; n];
    let sampled = |eps: f64| -> Result<Vec<Vec<Complex64>>> {
        // values[k][lm] = ω'^χ Y_lm(n'_k)
        pullback(&family(eps), grid)?
            .into_iter()
            .map(|(omega, theta, phi)| {
                let w = Complex64::new(omega, 0.0).powc(chi);
                Ok(ylm_all(lmax, theta, phi).into_iter().map(|y| w * y).collect())
            })
            .collect()
    };
    let (plus, minus) = (sampled(EPS)?, sampled(-EPS)?);
    for (j, col) in cols.iter_mut().enumerate() {
        let d: Vec<Complex64> = plus.iter().zip(&minus).map(|(p, m)| (p[j] - m[j]) / (2.0 * EPS)).collect();
        let proj = grid.analysis(&d, lmax);
        for (i, c) in col.iter_mut().enumerate() {
            *c = Complex64::new(0.0, 1.0) * proj[i];
        }
    }
    // cols[j][i] is the (i, j) matrix element; transpose to row-major
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

fn matmul_diag(a: &[Vec<Complex64>], b: &[Vec<Complex64>], i: usize) -> Complex64 {
    (0..a.len()).map(|k| a[i][k] * b[k][i]).sum()
}

/// Representation labels of the degree-`χ` action, from finite-difference
/// generators on harmonics up to `lmax`. Casimir diagonals are averaged over
/// `l ≤ lmax - 1`, where truncation does not reach the boost products.
pub fn casimir_labels(chi: Complex64, lmax: usize) -> Result<RepLabels> {
    if lmax < 2 {
        return invalid("casimir_labels needs lmax ≥ 2");
    }
    if chi.im.abs() > 5.0 {
        return invalid("|Im χ| > 5 is outside the stable range");
    }
    let grid = SphereGrid::gauss_for_degree(2 * lmax + 4);
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut j = Vec::new();
    let mut k = Vec::new();
    for ax in axes {
        j.push(generator(chi, lmax, &grid, |e| GroupElement::rotation(-e, ax))?);
        k.push(generator(chi, lmax, &grid, |e| GroupElement::boost(e, ax))?);
    }
    let rows = lm_count(lmax - 1);
    let mut c1 = cz();
    let mut c2 = cz();
    let mut c1_spread = 0.0f64;
    let mut first = None;
    for i in 0..rows {
        let mut d1 = cz();
        let mut d2 = cz();
        for a in 0..3 {
            d1 += matmul_diag(&j[a], &j[a], i) - matmul_diag(&k[a], &k[a], i);
            d2 += matmul_diag(&j[a], &k[a], i);
        }
        let f = *first.get_or_insert(d1);
        c1_spread = c1_spread.max((d1 - f).norm());
        c1 += d1;
        c2 += d2;
    }
    c1 /= rows as f64;
    c2 /= rows as f64;
    if !(c1.is_finite() && c2.is_finite()) || c1_spread > 1e-3 * (1.0 + c1.norm()) {
        return Err(Error::NonConvergent(format!("Casimir C₁ varies across the basis by {c1_spread:.3e}")));
    }
    // l₀², l₁² are the roots of t² - (C₁+1) t - C₂² = 0; l₀² is the smaller one
    let s = c1 + 1.0;
    let disc = (s * s + 4.0 * c2 * c2).sqrt();
    let (r1, r2) = ((s + disc) / 2.0, (s - disc) / 2.0);
    let (l0sq, l1sq) = if r1.norm() <= r2.norm() { (r1, r2) } else { (r2, r1) };
    let l0 = l0sq.re.max(0.0).sqrt();
    let l1 = if l0 < 1e-6 {
        let root = l1sq.sqrt();
        let target = chi + 1.0;
        if (root - target).norm() <= (root + target).norm() { root } else { -root }
    } else {
        Complex64::new(0.0, 1.0) * c2 / l0
    };
    Ok(RepLabels { l0, l1, c1, c2 })
}

/// `(p·k)^{-1+iν}` on the principal branch.
pub fn massive_state_eval(p: &FourVector, k: &FourVector, nu: f64) -> Result<Complex64> {
    let m2 = p.square();
    if !(m2 > 0.0) || !(p.t > 0.0) {
        return invalid("p must be a future-pointing massive momentum");
    }
    let scale = k.max_abs();
    if scale == 0.0 || k.square().abs() > 1e-10 * scale * scale {
        return invalid("k must be a non-zero null vector");
    }
    let pk = p.dot(k);
    if !(pk > 0.0) {
        return Err(Error::Singular(format!("p·k = {pk} is not positive")));
    }
    Ok(Complex64::new(pk, 0.0).powc(Complex64::new(-1.0, nu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_sign() {
        let l = sl2_to_lorentz(&GroupElement::identity()).unwrap();
        assert!(l.max_abs_diff(&LorentzMatrix::identity()) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GroupElement::random(&mut rng, 1.0);
        let a = sl2_to_lorentz(&g).unwrap();
        assert!(a.max_abs_diff(&sl2_to_lorentz(&g.neg()).unwrap()) < 1e-14);
        assert!(a.metric_defect() < 1e-12);
    }

    #[test]
    fn diagonal_element_is_z_boost() {
        let alpha: f64 = 0.8;
        let g = GroupElement::new([
            [Complex64::new((alpha / 2.0).exp(), 0.0), cz()],
            [cz(), Complex64::new((-alpha / 2.0).exp(), 0.0)],
        ])
        .unwrap();
        let l = sl2_to_lorentz(&g).unwrap();
        assert!(l.max_abs_diff(&LorentzMatrix::boost(alpha, [0.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn phase_element_rotates_frame() {
        let th = 0.6;
        let l = sl2_to_lorentz(&GroupElement::rotation(th, [0.0, 0.0, 1.0])).unwrap();
        assert!(l.max_abs_diff(&LorentzMatrix::rotation(-th, [0.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn non_unimodular_rejected() {
        let two = Complex64::new(2.0, 0.0);
        assert!(GroupElement::new([[two, cz()], [cz(), two]]).is_err());
    }

    #[test]
    fn constant_under_z_boost() {
        let grid = SphereGrid::gauss_for_degree(24);
        let chi = Complex64::new(-1.0, 0.0);
        let f = ConeFunction::from_fn(chi, grid.clone(), |_, _| Complex64::new(1.0, 0.0));
        let g = act_homogeneous(&GroupElement::boost(1.0, [0.0, 0.0, 1.0]), &f).unwrap();
        for ((t, _), v) in grid.points().zip(&g.values) {
            // Λ⁻¹(1, n) has time component cosh 1 - sinh 1 cos θ
            let omega = 1f64.cosh() - 1f64.sinh() * t.cos();
            assert!((v - 1.0 / omega).norm() < 1e-12);
        }
    }

    #[test]
    fn inner_products() {
        let grid = SphereGrid::gauss_for_degree(6);
        let chi = Complex64::new(-1.0, 0.0);
        let y10 = ConeFunction::from_fn(chi, grid.clone(), |t, p| crate::sphere::ylm(1, 0, t, p));
        let y20 = ConeFunction::from_fn(chi, grid.clone(), |t, p| crate::sphere::ylm(2, 0, t, p));
        assert!((l2_inner(&y10, &y10).unwrap() - 1.0).norm() < 1e-13);
        assert!(l2_inner(&y10, &y20).unwrap().norm() < 1e-13);
        let other = ConeFunction::from_fn(chi, SphereGrid::gauss_for_degree(5), |_, _| Complex64::new(1.0, 0.0));
        assert!(l2_inner(&y10, &other).is_err());
    }

    #[test]
    fn labels_for_scalar_principal_series() {
        let r = casimir_labels(Complex64::new(-1.0, 0.0), 4).unwrap();
        assert!(r.l0.abs() < 1e-3 && r.l1.norm() < 1e-3, "{r:?}");
        let r = casimir_labels(Complex64::new(-1.0, 2.0), 4).unwrap();
        assert!(r.l0.abs() < 1e-3 && (r.l1 - Complex64::new(0.0, 2.0)).norm() < 1e-3, "{r:?}");
        assert!(r.c2.norm() < 1e-3);
    }

    #[test]
    fn massive_state_values() {
        let p = FourVector::new(2.0, 0.0, 0.0, 0.0);
        let k = FourVector::new(1.0, 0.0, 0.0, 1.0);
        assert!((massive_state_eval(&p, &k, 0.0).unwrap() - 0.5).norm() < 1e-15);
        let v1 = massive_state_eval(&p, &k, 1.3).unwrap();
        let v3 = massive_state_eval(&p, &k.scale(3.0), 1.3).unwrap();
        let expect = Complex64::new(3.0, 0.0).powc(Complex64::new(-1.0, 1.3));
        assert!((v3 - v1 * expect).norm() < 1e-14);
        assert!(massive_state_eval(&p, &FourVector::new(1.0, 0.0, 0.0, 0.5), 0.0).is_err());
        assert!(massive_state_eval(&FourVector::new(-2.0, 0.0, 0.0, 0.0), &k, 0.0).is_err());
    }
}
