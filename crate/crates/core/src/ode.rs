//! Adaptive Dormand–Prince 5(4) integrator for small real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize, F>(f: &F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() / 16.0).min(0.05);
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::NonConvergent(format!("ODE step limit reached at t = {t}")));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::NonConvergent(format!("non-finite ODE state at t = {t}")));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            if (t1 - t).abs() <= 1e-15 * t1.abs().max(1.0) {
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-14 {
            return Err(Error::NonConvergent(format!("ODE step underflow at t = {t}")));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = integrate(&f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, Tolerance::default()).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let y = integrate(&f, 0.0, [1.0], -1.0, Tolerance::default()).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-12);
    }
}
