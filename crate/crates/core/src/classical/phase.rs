use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::desitter::{ProductGrid, RadialMode};
use crate::error::{invalid, Error, Result};
use crate::geometry::{embed, FourVector, HyperboloidPoint};
use crate::io::fmt_f64;
use crate::sphere::lm_index;

/// Smallest `ψ_max` for which the charge readout is trusted.
pub const MIN_PSI_EXTENT: f64 = 2.5;

const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub point: HyperboloidPoint,
    pub value: f64,
}

/// `S = -e x·A` sampled on a product grid. Points where `A` could not be
/// evaluated hold `NaN` and are listed in `flagged`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseField {
    pub grid: ProductGrid,
    pub values: Vec<f64>,
    pub flagged: Vec<usize>,
}

impl PhaseField {
    pub fn samples(&self) -> impl Iterator<Item = PhaseSample> + '_ {
        self.values.iter().enumerate().map(|(i, &value)| PhaseSample { point: self.grid.point(i), value })
    }
}

/// Samples the phase of a potential on the hyperboloid.
pub fn phase_on_hyperboloid<F>(field: F, grid: &ProductGrid, e: f64) -> PhaseField
where
    F: Fn(&FourVector) -> Result<FourVector>,
{
    let mut values = Vec::with_capacity(grid.len());
    let mut flagged = Vec::new();
    for (i, p) in grid.points().enumerate() {
        let x = embed(p);
        match field(&x) {
            Ok(a) if a.is_finite() => values.push(-e * x.dot(&a)),
            _ => {
                values.push(f64::NAN);
                flagged.push(i);
            }
        }
    }
    PhaseField { grid: grid.clone(), values, flagged }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub l: usize,
    pub m: i64,
    pub c: Complex64,
}

/// `S = S₀ - e Q tanh ψ + Σ_{l≥1,m} (c_lm F_l Y_lm + c.c.)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub q: f64,
    pub s0: f64,
    pub l_max: usize,
    pub coefficients: Vec<ModeCoefficient>,
    /// Largest pointwise gap between the field and its reconstruction.
    pub residual: f64,
    /// Charge readouts `(Ψ, Q(Ψ))` from every symmetric pair with `Ψ ≥ 2.5`.
    pub q_readouts: Vec<(f64, f64)>,
}

impl DecompositionResult {
    pub fn coefficient(&self, l: usize, m: i64) -> Option<Complex64> {
        self.coefficients.iter().find(|c| c.l == l && c.m == m).map(|c| c.c)
    }

    /// Largest `|c_lm|`.
    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.c.norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "Q,{}", fmt_f64(self.q))?;
        writeln!(w, "S0,{}", fmt_f64(self.s0))?;
        writeln!(w, "residual,{}", fmt_f64(self.residual))?;
        writeln!(w, "l,m,re_c,im_c")?;
        for c in &self.coefficients {
            writeln!(w, "{},{},{},{}", c.l, c.m, fmt_f64(c.c.re), fmt_f64(c.c.im))?;
        }
        Ok(())
    }
}

/// Parses the CSV written by [`DecompositionResult::write_csv`]. Charge
/// readouts are not part of the file and come back empty.
pub fn read_decomposition_csv<R: BufRead>(r: R) -> Result<DecompositionResult> {
    let mut lines = r.lines();
    let mut header = |key: &str| -> Result<f64> {
        let line = lines.next().ok_or_else(|| Error::InvalidInput(format!("missing {key} row")))??;
        let (k, v) = line.split_once(',').ok_or_else(|| Error::InvalidInput(format!("bad row {line}")))?;
        if k != key {
            return invalid(format!("expected {key}, found {k}"));
        }
        v.trim().parse().map_err(|_| Error::InvalidInput(format!("bad number in {line}")))
    };
    let q = header("Q")?;
    let s0 = header("S0")?;
    let residual = header("residual")?;
    let cols = lines.next().ok_or_else(|| Error::InvalidInput("missing column header".into()))??;
    if cols.trim() != "l,m,re_c,im_c" {
        return invalid(format!("unexpected column header {cols}"));
    }
    let mut coefficients = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return invalid(format!("bad coefficient row {line}"));
        }
        let bad = || Error::InvalidInput(format!("bad coefficient row {line}"));
        coefficients.push(ModeCoefficient {
            l: f[0].parse().map_err(|_| bad())?,
            m: f[1].parse().map_err(|_| bad())?,
            c: Complex64::new(f[2].parse().map_err(|_| bad())?, f[3].parse().map_err(|_| bad())?),
        });
    }
    let l_max = coefficients.iter().map(|c| c.l).max().unwrap_or(0);
    Ok(DecompositionResult { q, s0, l_max, coefficients, residual, q_readouts: Vec::new() })
}

/// Decomposes a sampled phase field into its charge, constant and
/// oscillating parts up to angular degree `l_max`.
///
/// The grid must be symmetric in ψ, reach `|ψ| ≥ 2.5` and resolve `l_max`
/// on the sphere.
pub fn mode_decompose(field: &PhaseField, l_max: usize, e: f64) -> Result<DecompositionResult> {
    if e == 0.0 || !e.is_finite() {
        return invalid("coupling e must be finite and non-zero");
    }
    if !field.flagged.is_empty() {
        return invalid(format!("{} phase samples are flagged", field.flagged.len()));
    }
    let grid = &field.grid;
    if field.values.len() != grid.len() {
        return Err(Error::GridMismatch("phase values do not match grid".into()));
    }
    let psi = grid.psi();
    let np = psi.len();
    let psi_max = psi[np - 1];
    if psi.iter().zip(psi.iter().rev()).any(|(a, b)| (a + b).abs() > 1e-12 * psi_max.abs().max(1.0)) {
        return Err(Error::GridMismatch("ψ grid must be symmetric about 0".into()));
    }
    if psi_max < MIN_PSI_EXTENT {
        return Err(Error::GridTooCoarse(format!("ψ_max = {psi_max} < {MIN_PSI_EXTENT}")));
    }
    let sphere = grid.sphere();
    if sphere.band_limit() < l_max {
        return Err(Error::GridTooCoarse(format!(
            "sphere resolves l ≤ {}, decomposition asks for {l_max}",
            sphere.band_limit()
        )));
    }
    let ns = sphere.len();
    // per-slice spherical-harmonic coefficients
    let slices: Vec<Vec<Complex64>> = (0..np)
        .map(|ip| {
            let v: Vec<Complex64> = field.values[ip * ns..(ip + 1) * ns].iter().map(|&s| Complex64::new(s, 0.0)).collect();
            sphere.analysis(&v, l_max)
        })
        .collect();
    let y00 = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    let avg: Vec<f64> = slices.iter().map(|c| c[0].re * y00).collect();

    // l = 0 sector is span{1, tanh ψ}
    let mut q_readouts = Vec::new();
    for i in (np / 2..np).rev() {
        let j = np - 1 - i;
        if psi[i] < MIN_PSI_EXTENT {
            break;
        }
        q_readouts.push((psi[i], -(avg[i] - avg[j]) / (2.0 * e * psi[i].tanh())));
    }
    let q = q_readouts[0].1;
    let s0 = avg.iter().zip(avg.iter().rev()).map(|(a, b)| 0.5 * (a + b)).sum::<f64>() / np as f64;

    let mut coefficients = Vec::new();
    let mut per_l: Vec<Option<RadialMode>> = vec![None];
    for l in 1..=l_max {
        per_l.push(Some(RadialMode::solve(l, psi)?));
    }
    // raw (c, d) per (l, m) from s_lm(ψ) = c F + d conj(F)
    let mut raw = vec![(Complex64::default(), Complex64::default()); slices[0].len()];
    for l in 1..=l_max {
        let f = &per_l[l].as_ref().expect("solved above").values;
        let g: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        let h: Complex64 = f.iter().map(|v| v.conj() * v.conj()).sum();
        let cond = (g + h.norm()) / (g - h.norm());
        if !(cond.is_finite() && cond < MAX_CONDITION) {
            return Err(Error::IllConditioned(format!("mode fit for l = {l} has condition {cond:.3e}")));
        }
        let det = g * g - h.norm_sqr();
        for m in -(l as i64)..=(l as i64) {
            let k = lm_index(l, m);
            let b1: Complex64 = f.iter().zip(&slices).map(|(fv, s)| fv.conj() * s[k]).sum();
            let b2: Complex64 = f.iter().zip(&slices).map(|(fv, s)| fv * s[k]).sum();
            // [[g, h], [conj h, g]] [c, d] = [b1, b2]
            let c = (g * b1 - h * b2) / det;
            let d = (g * b2 - h.conj() * b1) / det;
            raw[k] = (c, d);
        }
    }
    for l in 1..=l_max {
        for m in -(l as i64)..=(l as i64) {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let from_minus = raw[lm_index(l, -m)].1.conj() * sign;
            let c = 0.5 * (raw[lm_index(l, m)].0 + from_minus);
            coefficients.push(ModeCoefficient { l, m, c });
        }
    }

    // reconstruction residual
    let mut residual = 0.0f64;
    for ip in 0..np {
        let mut coeffs = vec![Complex64::default(); slices[0].len()];
        coeffs[0] = Complex64::new((s0 - e * q * psi[ip].tanh()) / y00, 0.0);
        for mc in &coefficients {
            let fv = per_l[mc.l].as_ref().expect("solved above").values[ip];
            let sign = if mc.m % 2 == 0 { 1.0 } else { -1.0 };
            // c F Y_lm + conj(c F Y_lm) = c F Y_lm + (-1)^m conj(c F) Y_{l,-m}
            coeffs[lm_index(mc.l, mc.m)] += mc.c * fv;
            coeffs[lm_index(mc.l, -mc.m)] += (mc.c * fv).conj() * sign;
        }
        let rec = sphere.synthesis(&coeffs, l_max);
        for (k, r) in rec.iter().enumerate() {
            residual = residual.max((field.values[ip * ns + k] - r.re).abs());
        }
    }
    Ok(DecompositionResult { q, s0, l_max, coefficients, residual, q_readouts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{boosted_coulomb, PointCharge};
    use crate::desitter::ModeFunction;
    use crate::sphere::{SphereGrid, SphereKind};

    fn grid(n_psi: usize, lmax: usize) -> ProductGrid {
        ProductGrid::symmetric(3.0, n_psi, SphereGrid::gauss_for_degree(lmax)).unwrap()
    }

    #[test]
    fn rest_coulomb_decomposes_to_pure_charge() {
        let g = grid(61, 6);
        let c = PointCharge::at_rest(1.3);
        let pf = phase_on_hyperboloid(|x| boosted_coulomb(&c, x), &g, 1.0);
        let d = mode_decompose(&pf, 4, 1.0).unwrap();
        assert!((d.q - 1.3).abs() < 1e-12);
        assert!(d.s0.abs() < 1e-12);
        assert!(d.max_coefficient() < 1e-10);
        assert!(d.residual < 1e-10);
    }

    #[test]
    fn synthetic_mode_is_recovered() {
        let g = grid(41, 5);
        let c21 = Complex64::new(0.3, -0.2);
        let mf = ModeFunction::new(RadialMode::solve(2, g.psi()).unwrap(), 1).unwrap();
        let samples = mf.sample(&g).unwrap();
        let values: Vec<f64> = samples
            .iter()
            .zip(g.points())
            .map(|(f, p)| 0.4 - 2.0 * 0.7 * p.psi.tanh() + 2.0 * (c21 * f).re)
            .collect();
        let pf = PhaseField { grid: g, values, flagged: vec![] };
        let d = mode_decompose(&pf, 3, 2.0).unwrap();
        assert!((d.q - 0.7).abs() < 1e-10);
        assert!((d.s0 - 0.4).abs() < 1e-10);
        assert!((d.coefficient(2, 1).unwrap() - c21).norm() < 1e-8);
        // the real combination also populates m = -1 through the reality condition
        assert!((d.coefficient(2, -1).unwrap()).norm() < 1e-8);
        assert!(d.residual < 1e-8);
    }

    #[test]
    fn short_psi_range_rejected() {
        let g = ProductGrid::symmetric(2.0, 21, SphereGrid::gauss_for_degree(3)).unwrap();
        let pf = phase_on_hyperboloid(|x| boosted_coulomb(&PointCharge::at_rest(1.0), x), &g, 1.0);
        assert!(matches!(mode_decompose(&pf, 2, 1.0), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let g = ProductGrid::new(-2.8, 3.0, 21, SphereGrid::gauss_for_degree(3)).unwrap();
        let pf = phase_on_hyperboloid(|x| boosted_coulomb(&PointCharge::at_rest(1.0), x), &g, 1.0);
        assert!(matches!(mode_decompose(&pf, 2, 1.0), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn flagged_points_are_nan() {
        let g = ProductGrid::symmetric(3.0, 5, SphereGrid::new(SphereKind::Uniform, 4, 4).unwrap()).unwrap();
        let pf = phase_on_hyperboloid(|_| Err(Error::Singular("test".into())), &g, 1.0);
        assert_eq!(pf.flagged.len(), g.len());
        assert!(pf.values.iter().all(|v| v.is_nan()));
    }

    #[test]
    fn csv_round_trip() {
        let g = grid(41, 4);
        let c = PointCharge::boosted(1.0, 0.6, [1.0, 0.0, 0.0]);
        let pf = phase_on_hyperboloid(|x| boosted_coulomb(&c, x), &g, 1.0);
        let d = mode_decompose(&pf, 3, 1.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = read_decomposition_csv(&buf[..]).unwrap();
        assert_eq!(back.q, d.q);
        assert_eq!(back.residual, d.residual);
        assert_eq!(back.coefficients, d.coefficients);
    }
}
