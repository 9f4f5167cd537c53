use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{embed, FourVector, HyperboloidPoint};

/// Tolerances used to accept an extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Allowed gap between the log-log slope of `|F(λx)|` and `χ`.
    pub slope_tol: f64,
    /// Allowed relative size of the final Richardson correction.
    pub correction_tol: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { slope_tol: 0.05, correction_tol: 1e-2 }
    }
}

/// One rescaled sample `λ^{-χ} F(λx)` and its distance from the extrapolated limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFit {
    pub scale: f64,
    pub value: [f64; 4],
    pub fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub chi: f64,
    pub point: HyperboloidPoint,
    /// Extrapolated `lim λ^{-χ} F(λx)`.
    pub homogeneous: FourVector,
    /// Least-squares slope of `ln |F(λx)|` against `ln λ`.
    pub fitted_exponent: f64,
    /// Estimated order `p` in `λ^{-χ}F(λx) = F_χ(x) + O(λ^{-p})`; infinite when exact.
    pub correction_order: f64,
    pub converged: bool,
    pub scales: Vec<ScaleFit>,
}

/// Extracts the homogeneous part of degree `chi` of a vector field at the
/// hyperboloid point `at`, sampling along the ray `λ x` for `λ` in `schedule`.
///
/// Non-convergence is reported through `converged = false`, never hidden.
pub fn extract_homogeneous<F>(
    field: F,
    chi: f64,
    at: HyperboloidPoint,
    schedule: &[f64],
    opts: ExtractOptions,
) -> Result<ExtractionReport>
where
    F: Fn(&FourVector) -> Result<FourVector>,
{
    if !(chi <= 0.0) {
        return invalid(format!("homogeneity degree must satisfy χ ≤ 0, got {chi}"));
    }
    if schedule.len() < 4 {
        return invalid("scale schedule needs at least 4 entries");
    }
    if schedule[0] <= 0.0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("scale schedule must be positive and strictly increasing");
    }
    let x = embed(at);
    let mut raw = Vec::with_capacity(schedule.len());
    for &lam in schedule {
        let f = field(&x.scale(lam))?;
        if !f.is_finite() {
            return Err(Error::NonConvergent(format!("field is not finite at scale {lam}")));
        }
        raw.push(f);
    }
    let rescaled: Vec<FourVector> = raw.iter().zip(schedule).map(|(f, &lam)| f.scale(lam.powf(-chi))).collect();

    let fitted_exponent = loglog_slope(schedule, &raw);
    let n = schedule.len();
    let g = &rescaled;
    let d1 = (g[n - 1] - g[n - 2]).max_abs();
    let d0 = (g[n - 2] - g[n - 3]).max_abs();
    let size = g[n - 1].max_abs().max(f64::MIN_POSITIVE);
    let (homogeneous, order) = if d1 <= 1e-14 * size {
        (g[n - 1], f64::INFINITY)
    } else {
        let ratio = schedule[n - 1] / schedule[n - 2];
        let p = if d0 > 0.0 { (d0 / d1).ln() / ratio.ln() } else { f64::NAN };
        if p.is_finite() && p > 0.0 {
            let (l1, l0) = (schedule[n - 1].powf(p), schedule[n - 2].powf(p));
            let h = (g[n - 1].scale(l1) - g[n - 2].scale(l0)).scale(1.0 / (l1 - l0));
            (h, p)
        } else {
            (g[n - 1], p)
        }
    };
    let correction = (homogeneous - g[n - 1]).max_abs();
    let slope_ok = if homogeneous.max_abs() == 0.0 {
        true
    } else {
        (fitted_exponent - chi).abs() <= opts.slope_tol
    };
    let converged = slope_ok
        && homogeneous.is_finite()
        && (order.is_infinite() || order > 0.0)
        && correction <= opts.correction_tol * homogeneous.max_abs().max(f64::MIN_POSITIVE);

    let scales = schedule
        .iter()
        .zip(g)
        .map(|(&scale, v)| ScaleFit { scale, value: v.to_array(), fit_residual: (*v - homogeneous).max_abs() })
        .collect();
    Ok(ExtractionReport { chi, point: at, homogeneous, fitted_exponent, correction_order: order, converged, scales })
}

fn loglog_slope(schedule: &[f64], values: &[FourVector]) -> f64 {
    let pts: Vec<(f64, f64)> = schedule
        .iter()
        .zip(values)
        .filter(|(_, v)| v.max_abs() > 0.0)
        .map(|(&l, v)| (l.ln(), v.max_abs().ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Wraps an extraction as a field on spacelike vectors: `x = ρ x̂` maps to
/// `ρ^χ F_χ(x̂)` with `x̂` on the unit hyperboloid.
pub fn homogeneous_sampler<F>(
    field: F,
    chi: f64,
    schedule: Vec<f64>,
    opts: ExtractOptions,
) -> impl Fn(&FourVector) -> Result<FourVector>
where
    F: Fn(&FourVector) -> Result<FourVector>,
{
    move |x: &FourVector| {
        let rho2 = -x.square();
        if !(rho2 > 0.0) {
            return invalid("homogeneous sampler is defined on spacelike vectors only");
        }
        let rho = rho2.sqrt();
        let hat = HyperboloidPoint::from_four_vector(&x.scale(1.0 / rho));
        let rep = extract_homogeneous(&field, chi, hat, &schedule, opts)?;
        if !rep.converged {
            return Err(Error::NonConvergent(format!("extraction did not converge at {hat:?}")));
        }
        Ok(rep.homogeneous.scale(rho.powf(chi)))
    }
}

/// Pairs `(χ₁, χ₂)` with `χ₁ + χ₂ = chi` that can form a Wick product of
/// homogeneous factors. Both degrees are drawn from `allowed`.
pub fn wick_homogeneity_partitions(chi: Complex64, allowed: &[Complex64], tol: f64) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    for &a in allowed {
        for &b in allowed {
            if (a + b - chi).norm() <= tol {
                out.push((a, b));
            }
        }
    }
    out
}

/// A scalar homogeneous field of degree `χ` is admissible when `Re χ ≥ -1`.
pub fn validate_scalar_homogeneity(chi: Complex64) -> bool {
    chi.re.is_finite() && chi.im.is_finite() && chi.re >= -1.0
}
