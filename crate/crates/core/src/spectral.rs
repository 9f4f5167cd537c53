//! Finite spectral checks of the charge/phase pair and charge universality.
//!
//! The circle is "reconstructed" when three things hold on the interior of the
//! charge window: `V` is unitary, the spectrum of `D` is the integer lattice,
//! and `[D, V] = V`. The interior excludes the two extremal eigenvalues of `D`,
//! where the truncated shift stops being an isometry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{commutator, OperatorMatrix};
use crate::io::SCHEMA_VERSION;

/// Tolerances for algebraic identities and for eigenvalue lattices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTolerance {
    pub algebra: f64,
    pub lattice: f64,
}

impl Default for SpectralTolerance {
    fn default() -> Self {
        Self { algebra: 1e-10, lattice: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpectralChecks {
    /// `V†V = VV† = I` on the interior.
    pub unitary_ok: bool,
    /// Distinct eigenvalues of `D` are equally spaced.
    pub lattice_ok: bool,
    /// Every eigenvalue of `D` is an integer.
    pub integer_ok: bool,
    /// `[D, V] = V` on the interior.
    pub shift_ok: bool,
    /// All of the above.
    pub standard: bool,
    /// Set by [`universality_check`] only.
    pub universality_ok: Option<bool>,
}

/// Counterexample explaining a failed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: String,
    /// Neighbouring eigenvalues whose gap breaks the lattice.
    pub eigenvalues: Option<(f64, f64)>,
    /// Species index and its shift constant when `[D, V_i] = κ V_i` with `κ ≠ ±1`.
    pub species: Option<usize>,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub schema_version: u32,
    /// Distinct eigenvalues of `D`, ascending.
    pub spectrum: Vec<f64>,
    /// Common gap of the spectrum, `None` when it is not a lattice.
    pub spacing: Option<f64>,
    /// `κ` in `[D, V] = κV`, reported only when the commutator is proportional to `V`.
    pub kappa: Option<f64>,
    /// Per-species `κ_i` for universality runs.
    pub species_kappa: Vec<f64>,
    pub checks: SpectralChecks,
    pub witness: Option<Witness>,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.checks.standard && self.checks.universality_ok.unwrap_or(true)
    }
}

fn diagonal_of(d: &OperatorMatrix, tol: f64) -> Result<Vec<f64>> {
    let defect = d.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let mut diag = vec![0.0; d.dim()];
    for (i, j, v) in d.triplets() {
        if i != j {
            if v.norm() > tol {
                return invalid("D must be diagonal in the charge basis");
            }
        } else {
            diag[i] = v.re;
        }
    }
    Ok(diag)
}

/// Distinct values, merged within `tol` of the running cluster start.
fn distinct(values: &[f64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&last) if (x - last).abs() <= tol * last.abs().max(1.0) => {}
            _ => out.push(x),
        }
    }
    out
}

/// Common gap of an ascending list, or the most deviant neighbouring pair.
fn lattice_spacing(spectrum: &[f64], tol: f64) -> std::result::Result<Option<f64>, (f64, f64)> {
    if spectrum.len() < 2 {
        return Ok(None);
    }
    let gaps: Vec<f64> = spectrum.windows(2).map(|w| w[1] - w[0]).collect();
    let g0 = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let (k, dev) = gaps
        .iter()
        .enumerate()
        .map(|(k, g)| (k, (g - g0).abs()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    if dev > tol * g0.max(1.0) {
        return Err((spectrum[k], spectrum[k + 1]));
    }
    Ok(Some(gaps.iter().sum::<f64>() / gaps.len() as f64))
}

struct ShiftFit {
    kappa: f64,
    proportional: bool,
}

/// Least-squares `κ` in `[D, V] ≈ κ V` over interior columns.
fn shift_constant(d: &OperatorMatrix, v: &OperatorMatrix, interior: &[bool], tol: f64) -> Result<ShiftFit> {
    let k = commutator(d, v)?;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (i, j, x) in v.triplets() {
        if interior[j] {
            num += x.conj() * k.get(i, j);
            den += x.norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::Singular("V vanishes on the interior".into()));
    }
    let kappa = num / den;
    let resid = k.axpy(-kappa, v)?.max_abs_on_columns(|j| interior[j]);
    Ok(ShiftFit { kappa: kappa.re, proportional: resid <= tol && kappa.im.abs() <= tol })
}

fn unitary_on(v: &OperatorMatrix, interior: &[bool], tol: f64) -> Result<bool> {
    let id = OperatorMatrix::identity(v.dim());
    let vdv = v.adjoint().matmul(v)?.sub(&id)?;
    let vvd = v.matmul(&v.adjoint())?.sub(&id)?;
    Ok(vdv.max_abs_on_columns(|j| interior[j]) <= tol && vvd.max_abs_on_columns(|j| interior[j]) <= tol)
}

fn is_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

/// Checks whether `(V, D)` realises the standard circle on the interior.
pub fn spectral_triple_check(v: &OperatorMatrix, d: &OperatorMatrix, tol: SpectralTolerance) -> Result<SpectralReport> {
    if v.dim() != d.dim() {
        return Err(Error::DimensionMismatch(format!("V is {}, D is {}", v.dim(), d.dim())));
    }
    let diag = diagonal_of(d, tol.algebra)?;
    let spectrum = distinct(&diag, tol.lattice);
    if spectrum.len() < 3 {
        return invalid("D needs at least three distinct eigenvalues to have an interior");
    }
    let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
    let near = |a: f64, b: f64| (a - b).abs() <= tol.lattice * b.abs().max(1.0);
    let interior: Vec<bool> = diag.iter().map(|&x| !near(x, lo) && !near(x, hi)).collect();

    let unitary_ok = unitary_on(v, &interior, tol.algebra)?;
    let lattice = lattice_spacing(&spectrum, tol.lattice);
    let integer_ok = spectrum.iter().all(|&x| is_integer(x, tol.lattice));
    let fit = shift_constant(d, v, &interior, tol.algebra)?;
    let kappa = fit.proportional.then_some(fit.kappa);
    let shift_ok = kappa.is_some_and(|k| (k - 1.0).abs() <= tol.algebra);

    let mut witness = None;
    if let Err(pair) = lattice {
        witness = Some(Witness {
            relation: "spectrum of D is not an arithmetic lattice".into(),
            eigenvalues: Some(pair),
            species: None,
            kappa: None,
        });
    } else if !shift_ok {
        witness = Some(Witness {
            relation: match kappa {
                Some(k) => format!("[D, V] = {k}·V ≠ V"),
                None => "[D, V] is not proportional to V".into(),
            },
            eigenvalues: None,
            species: None,
            kappa,
        });
    } else if !integer_ok {
        let bad = spectrum.iter().copied().find(|&x| !is_integer(x, tol.lattice)).expect("non-integer eigenvalue");
        witness = Some(Witness {
            relation: format!("eigenvalue {bad} of D is not an integer"),
            eigenvalues: Some((bad, bad)),
            species: None,
            kappa: None,
        });
    } else if !unitary_ok {
        witness = Some(Witness {
            relation: "V is not unitary on the interior".into(),
            eigenvalues: None,
            species: None,
            kappa: None,
        });
    }
    let lattice_ok = lattice.is_ok();
    Ok(SpectralReport {
        schema_version: SCHEMA_VERSION,
        spectrum,
        spacing: lattice.ok().flatten(),
        kappa,
        species_kappa: Vec::new(),
        checks: SpectralChecks {
            unitary_ok,
            lattice_ok,
            integer_ok,
            shift_ok,
            standard: unitary_ok && lattice_ok && integer_ok && shift_ok,
            universality_ok: None,
        },
        witness,
    })
}

/// Distance between sectors `i` and `j` of a diagonal `D` whose value on
/// sector `k` is `d[k]`. Admissible `f` obey `|d[k+1] - d[k]|·|f[k+1] - f[k]| ≤ 1`
/// between neighbouring sectors, so the supremum is the sum of `1/|Δd|` along the way.
pub fn connes_distance(d: &[f64], i: usize, j: usize) -> Result<f64> {
    if i >= d.len() || j >= d.len() {
        return invalid(format!("sector index out of range 0..{}", d.len()));
    }
    let (a, b) = (i.min(j), i.max(j));
    Ok(d[a..=b].windows(2).fold(0.0, |acc, w| acc + 1.0 / (w[1] - w[0]).abs()))
}

/// Per-sector values of a diagonal `D`: its distinct eigenvalues, ascending.
pub fn sector_values(d: &OperatorMatrix, tol: SpectralTolerance) -> Result<Vec<f64>> {
    Ok(distinct(&diagonal_of(d, tol.algebra)?, tol.lattice))
}

/// How strictly species charges must agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universality {
    /// Every `|e_i|` equals the common `e`.
    #[default]
    Strict,
    /// Every `|e_i|` is an integer multiple of the smallest one. The shift
    /// relation `[D, V_i] = V_i` is then not required.
    Lenient,
}

/// Largest product lattice assembled by [`universality_check`].
pub const MAX_PRODUCT_STATES: usize = 1_000_000;

/// Builds `D = Q_total / e` on the product of per-species charge windows
/// `[-M, M]`, with `e = max |e_i|`, and checks the shared spectrum and each
/// species shift. Witnesses name a non-lattice spectrum first, then a shift
/// constant `κ_i ≠ ±1`.
pub fn universality_check(
    charges: &[f64],
    charge_bound: usize,
    tol: SpectralTolerance,
    mode: Universality,
) -> Result<SpectralReport> {
    if charges.is_empty() {
        return invalid("species list is empty");
    }
    if charges.iter().any(|&e| e == 0.0 || !e.is_finite()) {
        return invalid("species charges must be finite and non-zero");
    }
    if charge_bound < 1 {
        return invalid("charge window M must be at least 1");
    }
    let k = charges.len();
    let w = 2 * charge_bound + 1;
    let dim = (0..k)
        .try_fold(1usize, |acc, _| acc.checked_mul(w).filter(|&d| d <= MAX_PRODUCT_STATES))
        .ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: MAX_PRODUCT_STATES })?;
    let e_ref = charges.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let digits = |mut idx: usize| {
        let mut out = vec![0i64; k];
        for slot in out.iter_mut().rev() {
            *slot = (idx % w) as i64 - charge_bound as i64;
            idx /= w;
        }
        out
    };
    let diag: Vec<f64> = (0..dim).map(|i| digits(i).iter().zip(charges).map(|(&m, e)| m as f64 * e).sum::<f64>() / e_ref).collect();
    let d = OperatorMatrix::diagonal(&diag.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());

    // species interior: every species away from its window edges
    let interior: Vec<bool> =
        (0..dim).map(|i| digits(i).iter().all(|m| m.unsigned_abs() < charge_bound as u64)).collect();
    let mut species_kappa = Vec::with_capacity(k);
    let mut unitary_ok = true;
    let mut proportional = true;
    for s in 0..k {
        let stride = w.pow((k - 1 - s) as u32);
        let v = OperatorMatrix::from_triplets(
            dim,
            (0..dim).filter(|&i| digits(i)[s] < charge_bound as i64).map(|i| (i + stride, i, Complex64::new(1.0, 0.0))),
        );
        unitary_ok &= unitary_on(&v, &interior, tol.algebra)?;
        let fit = shift_constant(&d, &v, &interior, tol.algebra)?;
        proportional &= fit.proportional;
        species_kappa.push(fit.kappa);
    }

    let spectrum = distinct(&diag, tol.lattice);
    let lattice = lattice_spacing(&spectrum, tol.lattice);
    let integer_ok = spectrum.iter().all(|&x| is_integer(x, tol.lattice));
    let bad_species = species_kappa.iter().position(|kap| (kap.abs() - 1.0).abs() > tol.algebra);
    let shift_ok = proportional && bad_species.is_none();
    let universality_ok = match mode {
        Universality::Strict => shift_ok && lattice.is_ok() && integer_ok,
        Universality::Lenient => {
            let base = charges.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
            charges.iter().all(|e| is_integer(e.abs() / base, tol.lattice))
        }
    };

    let witness = if universality_ok {
        None
    } else if let Err(pair) = lattice {
        Some(Witness {
            relation: "combined spectrum is not an arithmetic lattice".into(),
            eigenvalues: Some(pair),
            species: None,
            kappa: None,
        })
    } else if let Some(s) = bad_species {
        Some(Witness {
            relation: format!("[D, V_{s}] = {}·V_{s} ≠ V_{s}", species_kappa[s]),
            eigenvalues: None,
            species: Some(s),
            kappa: Some(species_kappa[s]),
        })
    } else {
        Some(Witness { relation: "spectrum of D is not integer".into(), eigenvalues: None, species: None, kappa: None })
    };
    let kappa = if proportional && species_kappa.iter().all(|&x| (x - species_kappa[0]).abs() <= tol.algebra) {
        Some(species_kappa[0])
    } else {
        None
    };
    let lattice_ok = lattice.is_ok();
    Ok(SpectralReport {
        schema_version: SCHEMA_VERSION,
        spectrum,
        spacing: lattice.ok().flatten(),
        kappa,
        species_kappa,
        checks: SpectralChecks {
            unitary_ok,
            lattice_ok,
            integer_ok,
            shift_ok,
            standard: unitary_ok && lattice_ok && integer_ok && shift_ok,
            universality_ok: Some(universality_ok),
        },
        witness,
    })
}
