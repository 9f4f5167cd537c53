//! Truncated charge ⊗ boson Fock space.
//!
//! States are `|m; {n_lm}⟩` with charge sector `m ∈ [-M, M]` and one
//! occupation number `n_lm ≤ n_max` per transversal mode `(l, m)`, `1 ≤ l ≤ l_max`.
//! The charge factor carries `Q` and the shift `V`; the boson factor carries the
//! ladder operators `c_lm`, `c_lm†`.

mod sparse;

use serde::{Deserialize, Serialize};

pub use sparse::{commutator, OperatorMatrix};

use crate::desitter::mode_function;
use crate::error::{invalid, Error, Result};
use crate::geometry::HyperboloidPoint;
use crate::io::SCHEMA_VERSION;
use num_complex::Complex64;

/// Largest basis dimension that will be assembled.
pub const MAX_DIMENSION: usize = 1_000_000;

/// Lattice spacing of the charge spectrum in units of `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChargeLattice {
    /// Spectrum `eℤ`.
    Standard,
    /// Spectrum `c e ℤ`.
    Nonstandard { c: f64 },
}

impl ChargeLattice {
    pub fn factor(self) -> f64 {
        match self {
            ChargeLattice::Standard => 1.0,
            ChargeLattice::Nonstandard { c } => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockBasis {
    charge_bound: usize,
    l_max: usize,
    n_max: usize,
    lattice: ChargeLattice,
    modes: Vec<(usize, i64)>,
}

/// Enumerates `(2M+1)·(n_max+1)^{#modes}` basis states, charge-major, then
/// lexicographic in the occupations (first mode most significant).
pub fn build_basis(charge_bound: usize, l_max: usize, n_max: usize) -> Result<FockBasis> {
    if charge_bound < 1 || l_max < 1 || n_max < 1 {
        return invalid("M, l_max and n_max must all be at least 1");
    }
    let modes: Vec<(usize, i64)> =
        (1..=l_max).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect();
    let mut dim = 2 * charge_bound + 1;
    for _ in &modes {
        dim = dim
            .checked_mul(n_max + 1)
            .filter(|&d| d <= MAX_DIMENSION)
            .ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: MAX_DIMENSION })?;
    }
    if dim > MAX_DIMENSION {
        return Err(Error::DimensionOverflow { dim, limit: MAX_DIMENSION });
    }
    Ok(FockBasis { charge_bound, l_max, n_max, lattice: ChargeLattice::Standard, modes })
}

/// Serialisable description of a basis, including its enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisManifest {
    pub schema_version: u32,
    pub charge_bound: usize,
    pub l_max: usize,
    pub n_max: usize,
    pub lattice: ChargeLattice,
    pub modes: Vec<(usize, i64)>,
    pub dimension: usize,
    pub ordering: String,
}

impl FockBasis {
    /// Same states with the charge spectrum rescaled to `c e ℤ`.
    pub fn with_lattice(mut self, lattice: ChargeLattice) -> Result<Self> {
        if let ChargeLattice::Nonstandard { c } = lattice {
            if !(c.is_finite() && c > 0.0) {
                return invalid("lattice factor c must be positive");
            }
        }
        self.lattice = lattice;
        Ok(self)
    }

    pub fn charge_bound(&self) -> usize {
        self.charge_bound
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn lattice(&self) -> ChargeLattice {
        self.lattice
    }

    pub fn modes(&self) -> &[(usize, i64)] {
        &self.modes
    }

    pub fn charge_dim(&self) -> usize {
        2 * self.charge_bound + 1
    }

    pub fn boson_dim(&self) -> usize {
        (self.n_max + 1).pow(self.modes.len() as u32)
    }

    pub fn dim(&self) -> usize {
        self.charge_dim() * self.boson_dim()
    }

    pub fn mode_index(&self, l: usize, m: i64) -> Result<usize> {
        self.modes
            .iter()
            .position(|&p| p == (l, m))
            .ok_or_else(|| Error::InvalidInput(format!("mode ({l}, {m}) not in basis")))
    }

    /// Flat index of `|m; occupations⟩`.
    pub fn index(&self, charge: i64, occupations: &[usize]) -> Result<usize> {
        if charge.unsigned_abs() as usize > self.charge_bound || occupations.len() != self.modes.len() {
            return invalid("state outside the basis");
        }
        let mut b = 0usize;
        for &n in occupations {
            if n > self.n_max {
                return invalid("occupation above n_max");
            }
            b = b * (self.n_max + 1) + n;
        }
        Ok((charge + self.charge_bound as i64) as usize * self.boson_dim() + b)
    }

    /// Inverse of [`index`](Self::index).
    pub fn state(&self, idx: usize) -> (i64, Vec<usize>) {
        let bd = self.boson_dim();
        let charge = (idx / bd) as i64 - self.charge_bound as i64;
        let mut b = idx % bd;
        let mut occ = vec![0usize; self.modes.len()];
        for slot in occ.iter_mut().rev() {
            *slot = b % (self.n_max + 1);
            b /= self.n_max + 1;
        }
        (charge, occ)
    }

    fn charge_of(&self, idx: usize) -> i64 {
        (idx / self.boson_dim()) as i64 - self.charge_bound as i64
    }

    fn occupation_of(&self, idx: usize, mode: usize) -> usize {
        let stride = (self.n_max + 1).pow((self.modes.len() - 1 - mode) as u32);
        (idx % self.boson_dim()) / stride % (self.n_max + 1)
    }

    fn mode_stride(&self, mode: usize) -> usize {
        (self.n_max + 1).pow((self.modes.len() - 1 - mode) as u32)
    }

    /// Interior: charge in `[-M+1, M-1]` and every occupation below `n_max`.
    /// Algebraic identities are asserted on these states.
    pub fn is_interior(&self, idx: usize) -> bool {
        let q = self.charge_of(idx);
        (q.unsigned_abs() as usize) < self.charge_bound
            && (0..self.modes.len()).all(|k| self.occupation_of(idx, k) < self.n_max)
    }

    /// Charge part of the interior only.
    pub fn is_charge_interior(&self, idx: usize) -> bool {
        (self.charge_of(idx).unsigned_abs() as usize) < self.charge_bound
    }

    pub fn manifest(&self) -> BasisManifest {
        BasisManifest {
            schema_version: SCHEMA_VERSION,
            charge_bound: self.charge_bound,
            l_max: self.l_max,
            n_max: self.n_max,
            lattice: self.lattice,
            modes: self.modes.clone(),
            dimension: self.dim(),
            ordering: "charge-major, then occupations lexicographic in mode order".into(),
        }
    }
}

/// `Q|m; n⟩ = m s |m; n⟩` with `s = e` (standard) or `c e` (nonstandard).
pub fn charge_operator(basis: &FockBasis, e: f64) -> Result<OperatorMatrix> {
    if !(e > 0.0 && e.is_finite()) {
        return invalid("e must be positive");
    }
    let s = e * basis.lattice.factor();
    let d: Vec<Complex64> = (0..basis.dim()).map(|i| Complex64::new(basis.charge_of(i) as f64 * s, 0.0)).collect();
    OperatorMatrix::diagonal(&d).verify_hermitian(0.0)
}

/// Charge shift `V|m; n⟩ = |m+1; n⟩`, `V|M; n⟩ = 0`.
pub fn phase_shift_operator(basis: &FockBasis) -> OperatorMatrix {
    let bd = basis.boson_dim();
    let top = basis.charge_bound as i64;
    OperatorMatrix::from_triplets(
        basis.dim(),
        (0..basis.dim())
            .filter(|&i| basis.charge_of(i) < top)
            .map(|i| (i + bd, i, Complex64::new(1.0, 0.0))),
    )
}

/// `c|n⟩ = √(z n)|n-1⟩` on mode `(l, m)`, with `[c, c†] = z` below the cap.
pub fn ladder_operators(basis: &FockBasis, z: f64, l: usize, m: i64) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if !(z > 0.0 && z.is_finite()) {
        return invalid("commutator normalisation z must be positive");
    }
    let k = basis.mode_index(l, m)?;
    let stride = basis.mode_stride(k);
    let c = OperatorMatrix::from_triplets(
        basis.dim(),
        (0..basis.dim()).filter_map(|i| {
            let n = basis.occupation_of(i, k);
            (n > 0).then(|| (i - stride, i, Complex64::new((z * n as f64).sqrt(), 0.0)))
        }),
    );
    let cd = c.adjoint();
    Ok((c, cd))
}

/// Mode values `f_lm(u)` for all `1 ≤ l ≤ l_max` at one hyperboloid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub point: HyperboloidPoint,
    pub values: Vec<((usize, i64), Complex64)>,
}

impl ModeData {
    pub fn at(point: HyperboloidPoint, l_max: usize) -> Result<Self> {
        let mut values = Vec::new();
        for l in 1..=l_max {
            for m in -(l as i64)..=l as i64 {
                values.push(((l, m), mode_function(l, m, point)?));
            }
        }
        Ok(Self { point, values })
    }

    fn get(&self, l: usize, m: i64) -> Option<Complex64> {
        self.values.iter().find(|(k, _)| *k == (l, m)).map(|(_, v)| *v)
    }
}

/// `S(u) - S₀ = -e Q tanh ψ + Σ (c_lm f_lm(u) + c_lm† conj f_lm(u))`.
pub fn phase_operator_at(basis: &FockBasis, modes: &ModeData, e: f64, z: f64) -> Result<OperatorMatrix> {
    let mut s = charge_operator(basis, e)?.scale(Complex64::new(-e * modes.point.psi.tanh(), 0.0));
    for &(l, m) in basis.modes() {
        let f = modes
            .get(l, m)
            .ok_or_else(|| Error::InvalidInput(format!("mode data lacks ({l}, {m})")))?;
        let (c, cd) = ladder_operators(basis, z, l, m)?;
        s = s.axpy(f, &c)?.axpy(f.conj(), &cd)?;
    }
    s.verify_hermitian(1e-12)
}

/// Which tensor factor an operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factorization {
    /// `A = A₁ ⊗ I`.
    Charge,
    /// `A = I ⊗ A₂`.
    Boson,
    /// Multiple of the identity, both at once.
    Scalar,
    Mixed,
}

/// Classifies `A` by reconstructing it from its partial traces.
pub fn factorize(basis: &FockBasis, a: &OperatorMatrix) -> Result<Factorization> {
    if a.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!("operator {} vs basis {}", a.dim(), basis.dim())));
    }
    const TOL: f64 = 1e-10;
    let (cd, bd) = (basis.charge_dim(), basis.boson_dim());
    // A₁ = Tr_B A / d_B and A₂ = Tr_C A / d_C, both kept sparse
    let mut a1 = std::collections::BTreeMap::<(usize, usize), Complex64>::new();
    let mut a2 = std::collections::BTreeMap::<(usize, usize), Complex64>::new();
    for (i, j, v) in a.triplets() {
        let (ci, bi, cj, bj) = (i / bd, i % bd, j / bd, j % bd);
        if bi == bj {
            *a1.entry((ci, cj)).or_default() += v / bd as f64;
        }
        if ci == cj {
            *a2.entry((bi, bj)).or_default() += v / cd as f64;
        }
    }
    let charge_part = OperatorMatrix::from_triplets(
        a.dim(),
        a1.iter().flat_map(|(&(ci, cj), &v)| (0..bd).map(move |b| (ci * bd + b, cj * bd + b, v))),
    );
    let boson_part = OperatorMatrix::from_triplets(
        a.dim(),
        a2.iter().flat_map(|(&(bi, bj), &v)| (0..cd).map(move |c| (c * bd + bi, c * bd + bj, v))),
    );
    let on_charge = a.sub(&charge_part)?.max_abs() <= TOL;
    let on_boson = a.sub(&boson_part)?.max_abs() <= TOL;
    Ok(match (on_charge, on_boson) {
        (true, true) => Factorization::Scalar,
        (true, false) => Factorization::Charge,
        (false, true) => Factorization::Boson,
        (false, false) => Factorization::Mixed,
    })
}

/// True iff `A = A₁ ⊗ I` or `A = I ⊗ A₂` within `1e-10`.
pub fn factorization_check(basis: &FockBasis, a: &OperatorMatrix) -> Result<bool> {
    Ok(factorize(basis, a)? != Factorization::Mixed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(build_basis(1, 1, 1).unwrap().dim(), 24);
        assert_eq!(build_basis(2, 1, 2).unwrap().dim(), 135);
        assert!(build_basis(1, 1, 0).is_err());
        assert!(matches!(build_basis(4, 3, 3), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn index_round_trip() {
        let b = build_basis(2, 1, 2).unwrap();
        for i in 0..b.dim() {
            let (q, occ) = b.state(i);
            assert_eq!(b.index(q, &occ).unwrap(), i);
        }
        assert_eq!(b.state(0), (-2, vec![0, 0, 0]));
        assert_eq!(b.state(1), (-2, vec![0, 0, 1]));
    }

    #[test]
    fn charge_spectrum_and_lattice() {
        let b = build_basis(2, 1, 1).unwrap();
        let q = charge_operator(&b, 1.0).unwrap();
        let mut spec: Vec<i64> = (0..b.dim()).map(|i| q.get(i, i).re as i64).collect();
        spec.dedup();
        assert_eq!(spec, vec![-2, -1, 0, 1, 2]);
        let b = b.with_lattice(ChargeLattice::Nonstandard { c: 1.5 }).unwrap();
        let q = charge_operator(&b, 1.0).unwrap();
        let i = b.index(1, &[0, 0, 0]).unwrap();
        assert_eq!(q.get(i, i).re, 1.5);
    }

    #[test]
    fn shift_is_partial_isometry() {
        let b = build_basis(2, 1, 1).unwrap();
        let v = phase_shift_operator(&b);
        let vdv = v.adjoint().matmul(&v).unwrap();
        for i in 0..b.dim() {
            let expect = if b.state(i).0 < 2 { 1.0 } else { 0.0 };
            assert_eq!(vdv.get(i, i).re, expect);
        }
    }

    #[test]
    fn vacuum_expectation_of_c_cdag() {
        let b = build_basis(1, 1, 2).unwrap();
        let (c, cd) = ladder_operators(&b, 0.25, 1, 0).unwrap();
        let vac = b.index(0, &[0, 0, 0]).unwrap();
        assert!((c.matmul(&cd).unwrap().get(vac, vac) - 0.25).norm() < 1e-15);
        assert!(ladder_operators(&b, 1.0, 2, 0).is_err());
    }

    #[test]
    fn phase_operator_vacuum_expectation_and_centrality() {
        let b = build_basis(1, 1, 2).unwrap();
        let u1 = ModeData::at(HyperboloidPoint::new(0.3, 1.0, 0.5), 1).unwrap();
        let u2 = ModeData::at(HyperboloidPoint::new(-0.7, 2.0, 4.0), 1).unwrap();
        let s1 = phase_operator_at(&b, &u1, 1.0, 1.0).unwrap();
        let s2 = phase_operator_at(&b, &u2, 1.0, 1.0).unwrap();
        let vac = b.index(0, &[0, 0, 0]).unwrap();
        assert_eq!(s1.get(vac, vac), Complex64::new(0.0, 0.0));
        let k = commutator(&s1, &s2).unwrap();
        // oracle: z Σ (f1 conj f2 - conj f1 f2)
        let expect: Complex64 = u1.values.iter().zip(&u2.values).map(|((_, a), (_, b))| a * b.conj() - a.conj() * b).sum();
        for i in (0..b.dim()).filter(|&i| b.is_interior(i)) {
            for (j, v) in k.row(i) {
                let target = if i == j { expect } else { Complex64::new(0.0, 0.0) };
                assert!((v - target).norm() < 1e-12);
            }
            assert!((k.get(i, i) - expect).norm() < 1e-12);
        }
        let q = charge_operator(&b, 1.0).unwrap();
        assert_eq!(commutator(&q, &s1).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn factorization_classification() {
        let b = build_basis(1, 1, 1).unwrap();
        let q = charge_operator(&b, 1.0).unwrap();
        let (c, cd) = ladder_operators(&b, 1.0, 1, 1).unwrap();
        assert_eq!(factorize(&b, &q).unwrap(), Factorization::Charge);
        assert_eq!(factorize(&b, &c).unwrap(), Factorization::Boson);
        assert_eq!(factorize(&b, &OperatorMatrix::identity(b.dim())).unwrap(), Factorization::Scalar);
        let mixed = q.add(&c).unwrap().add(&cd).unwrap();
        assert!(!factorization_check(&b, &mixed).unwrap());
        let product = q.matmul(&c).unwrap();
        assert!(!factorization_check(&b, &product).unwrap());
    }
}
