use serde::{Deserialize, Serialize};

use super::UnitSystem;
use crate::error::{invalid, Error, Result};
use crate::geometry::FourVector;

/// Uniform sample axis `start + i * step`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, n: usize) -> Result<Self> {
        if n == 0 || !(step > 0.0) || !start.is_finite() {
            return invalid("axis needs n ≥ 1 and a positive step");
        }
        Ok(Self { start, step, n })
    }

    /// Cell-centred axis covering `[lo, hi]` with `n` cells.
    pub fn cells(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n == 0 {
            return invalid("cell axis needs hi > lo and n ≥ 1");
        }
        let step = (hi - lo) / n as f64;
        Self::new(lo + 0.5 * step, step, n)
    }

    /// Node axis including both end points.
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return invalid("node axis needs hi > lo and n ≥ 2");
        }
        Self::new(lo, (hi - lo) / (n - 1) as f64, n)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.n - 1)
    }

    /// Extent of the cells centred on the samples.
    pub fn cell_bounds(&self) -> (f64, f64) {
        (self.start - 0.5 * self.step, self.end() + 0.5 * self.step)
    }
}

/// A current density `j^μ` sampled on a (possibly static) space-time grid.
///
/// Samples are cell averages over the spatial box; the current is taken to
/// vanish outside it. Layout is `[[[[j; z]; y]; x]; t]`, flattened.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurrentGrid {
    pub time: Option<Axis>,
    pub x: Axis,
    pub y: Axis,
    pub z: Axis,
    pub j: Vec<[f64; 4]>,
}

impl CurrentGrid {
    pub fn new(time: Option<Axis>, x: Axis, y: Axis, z: Axis, j: Vec<[f64; 4]>) -> Result<Self> {
        let nt = time.map_or(1, |t| t.n);
        if let Some(t) = time {
            if t.n < 4 {
                return Err(Error::GridTooCoarse("time axis needs at least 4 samples for cubic interpolation".into()));
            }
        }
        let expected = nt * x.n * y.n * z.n;
        if j.len() != expected {
            return Err(Error::DimensionMismatch(format!("{} current samples, expected {expected}", j.len())));
        }
        if j.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("current samples must be finite");
        }
        Ok(Self { time, x, y, z, j })
    }

    /// Samples a time-independent current.
    pub fn static_from_fn<F: Fn([f64; 3]) -> [f64; 4]>(x: Axis, y: Axis, z: Axis, f: F) -> Result<Self> {
        let mut j = Vec::with_capacity(x.n * y.n * z.n);
        for ix in 0..x.n {
            for iy in 0..y.n {
                for iz in 0..z.n {
                    j.push(f([x.at(ix), y.at(iy), z.at(iz)]));
                }
            }
        }
        Self::new(None, x, y, z, j)
    }

    /// Samples `j(t, x⃗)` on `time × x × y × z`.
    pub fn from_fn<F: Fn(f64, [f64; 3]) -> [f64; 4]>(time: Axis, x: Axis, y: Axis, z: Axis, f: F) -> Result<Self> {
        let mut j = Vec::with_capacity(time.n * x.n * y.n * z.n);
        for it in 0..time.n {
            let t = time.at(it);
            for ix in 0..x.n {
                for iy in 0..y.n {
                    for iz in 0..z.n {
                        j.push(f(t, [x.at(ix), y.at(iy), z.at(iz)]));
                    }
                }
            }
        }
        Self::new(Some(time), x, y, z, j)
    }

    /// Gaussian charge blob of total charge `q` and width `sigma` (rest frame),
    /// moving with rapidity `eta` along z through the origin at `t = 0`.
    /// A static grid is produced when `time` is `None`, which requires `eta = 0`.
    pub fn gaussian_blob(q: f64, sigma: f64, eta: f64, time: Option<Axis>, x: Axis, y: Axis, z: Axis) -> Result<Self> {
        if !(sigma > 0.0) {
            return invalid("blob width must be positive");
        }
        let norm = q / (2.0 * std::f64::consts::PI * sigma * sigma).powf(1.5);
        let (gamma, beta) = (eta.cosh(), eta.tanh());
        let rho = move |t: f64, p: [f64; 3]| {
            let zr = gamma * (p[2] - beta * t);
            let r2 = p[0] * p[0] + p[1] * p[1] + zr * zr;
            let d = gamma * norm * (-0.5 * r2 / (sigma * sigma)).exp();
            [d, 0.0, 0.0, beta * d]
        };
        match time {
            Some(t) => Self::from_fn(t, x, y, z, rho),
            None if eta == 0.0 => Self::static_from_fn(x, y, z, |p| rho(0.0, p)),
            None => invalid("a moving blob needs a time axis"),
        }
    }

    pub fn is_static(&self) -> bool {
        self.time.is_none()
    }

    pub fn cell_volume(&self) -> f64 {
        self.x.step * self.y.step * self.z.step
    }

    fn spatial_len(&self) -> usize {
        self.x.n * self.y.n * self.z.n
    }

    /// Total charge `∫ j⁰ d³x` on the time slice `it` (0 for static grids).
    pub fn total_charge(&self, it: usize) -> f64 {
        let ns = self.spatial_len();
        self.j[it * ns..(it + 1) * ns].iter().map(|v| v[0]).sum::<f64>() * self.cell_volume()
    }

    /// Distance from `p` to the spatial box, 0 inside it.
    fn distance_to_box(&self, p: [f64; 3]) -> f64 {
        let mut d2 = 0.0;
        for (axis, c) in [(&self.x, p[0]), (&self.y, p[1]), (&self.z, p[2])] {
            let (lo, hi) = axis.cell_bounds();
            let d = (lo - c).max(c - hi).max(0.0);
            d2 += d * d;
        }
        d2.sqrt()
    }

    fn max_cell(&self) -> f64 {
        self.x.step.max(self.y.step).max(self.z.step)
    }
}

/// Retarded potential `A(x) = k ∫ j(x⁰ - |x⃗ - x⃗₁|, x⃗₁) / |x⃗ - x⃗₁| d³x₁`.
///
/// The integral is a midpoint sum over the cells; time samples are
/// interpolated with four-point Lagrange cubics. The field point must stay
/// at least three cell widths outside the sampled box.
pub fn retarded_potential(grid: &CurrentGrid, x: &FourVector, units: UnitSystem) -> Result<FourVector> {
    if !x.is_finite() {
        return invalid("field point must be finite");
    }
    let p = [x.x, x.y, x.z];
    let gap = grid.distance_to_box(p);
    if gap < 3.0 * grid.max_cell() {
        return Err(Error::Singular(format!(
            "field point is {gap:.3e} from the current support, closer than three cells"
        )));
    }
    let ns = grid.spatial_len();
    let mut acc = [0.0f64; 4];
    let mut idx = 0usize;
    for ix in 0..grid.x.n {
        let dx = p[0] - grid.x.at(ix);
        for iy in 0..grid.y.n {
            let dy = p[1] - grid.y.at(iy);
            for iz in 0..grid.z.n {
                let dz = p[2] - grid.z.at(iz);
                let r = (dx * dx + dy * dy + dz * dz).sqrt();
                let j = match grid.time {
                    None => grid.j[idx],
                    Some(t) => interpolate_time(grid, &t, ns, idx, x.t - r)?,
                };
                for mu in 0..4 {
                    acc[mu] += j[mu] / r;
                }
                idx += 1;
            }
        }
    }
    let k = units.prefactor() * grid.cell_volume();
    Ok(FourVector::from_array(acc).scale(k))
}

fn interpolate_time(grid: &CurrentGrid, t: &Axis, ns: usize, cell: usize, tr: f64) -> Result<[f64; 4]> {
    let s = (tr - t.start) / t.step;
    let last = (t.n - 1) as f64;
    if !(s >= -1e-9 && s <= last + 1e-9) {
        return Err(Error::OutOfCoverage(format!(
            "retarded time {tr:.6} outside sampled range [{:.6}, {:.6}]",
            t.start,
            t.end()
        )));
    }
    let i0 = (s.floor() as isize - 1).clamp(0, t.n as isize - 4) as usize;
    let mut out = [0.0; 4];
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (s - (i0 + b) as f64) / (a as f64 - b as f64);
            }
        }
        let v = grid.j[(i0 + a) * ns + cell];
        for mu in 0..4 {
            out[mu] += w * v[mu];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{boosted_coulomb, PointCharge};

    fn static_blob(cells: usize) -> CurrentGrid {
        let r = 0.1;
        let ax = Axis::cells(-r, r, cells).unwrap();
        CurrentGrid::gaussian_blob(1.0, r / 6.0, 0.0, None, ax, ax, ax).unwrap()
    }

    #[test]
    fn static_blob_far_field_is_coulomb() {
        let g = static_blob(16);
        for x in [FourVector::new(0.0, 1.0, 0.0, 0.0), FourVector::new(0.7, 0.3, -0.5, 0.8)] {
            let a = retarded_potential(&g, &x, UnitSystem::Gaussian).unwrap();
            let expect = 1.0 / x.spatial_norm();
            assert!((a.t - expect).abs() < 1e-6 * expect, "{} vs {expect}", a.t);
            assert!(a.x.abs() + a.y.abs() + a.z.abs() < 1e-15);
        }
    }

    #[test]
    fn heaviside_divides_by_four_pi() {
        let g = static_blob(8);
        let x = FourVector::new(0.0, 1.0, 0.0, 0.0);
        let ag = retarded_potential(&g, &x, UnitSystem::Gaussian).unwrap();
        let ah = retarded_potential(&g, &x, UnitSystem::Heaviside).unwrap();
        assert!((ah.t * 4.0 * std::f64::consts::PI - ag.t).abs() < 1e-14);
    }

    #[test]
    fn point_inside_support_is_rejected() {
        let g = static_blob(8);
        let err = retarded_potential(&g, &FourVector::new(0.0, 0.11, 0.0, 0.0), UnitSystem::Gaussian);
        assert!(matches!(err, Err(Error::Singular(_))));
    }

    #[test]
    fn moving_blob_matches_boosted_coulomb() {
        let eta = 0.5;
        let sigma = 1.0 / 6.0;
        let xa = Axis::cells(-1.0, 1.0, 20).unwrap();
        let za = Axis::cells(-1.6, 1.6, 32).unwrap();
        // field point with x⁰ = r so the retarded times straddle t = 0
        let ta = Axis::nodes(-1.5, 1.5, 61).unwrap();
        let g = CurrentGrid::gaussian_blob(1.0, sigma, eta, Some(ta), xa, xa, za).unwrap();
        let x = FourVector::new(10.0, 10.0, 0.0, 0.0);
        let a = retarded_potential(&g, &x, UnitSystem::Gaussian).unwrap();
        let exact = boosted_coulomb(&PointCharge::boosted(1.0, eta, [0.0, 0.0, 1.0]), &x).unwrap();
        assert!((a - exact).max_abs() < 2e-3 * exact.max_abs(), "{a:?} vs {exact:?}");
    }

    #[test]
    fn out_of_coverage_is_reported() {
        let xa = Axis::cells(-0.1, 0.1, 4).unwrap();
        let ta = Axis::nodes(0.0, 1.0, 5).unwrap();
        let g = CurrentGrid::gaussian_blob(1.0, 0.02, 0.0, Some(ta), xa, xa, xa).unwrap();
        let r = retarded_potential(&g, &FourVector::new(0.0, 5.0, 0.0, 0.0), UnitSystem::Gaussian);
        assert!(matches!(r, Err(Error::OutOfCoverage(_))));
    }
}
