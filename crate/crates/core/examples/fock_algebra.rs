//! The truncated charge ⊗ boson Fock space: canonical relations of the
//! charge Q, the phase shift V = e^{iS} and the ladder operators c_lm, checked
//! away from the truncation edges.

use spatial_infinity::fock::{
    build_basis, charge_operator, commutator, factorize, ladder_operators, phase_operator_at, phase_shift_operator,
    ModeData, OperatorMatrix,
};
use spatial_infinity::{Complex64, HyperboloidPoint};

fn main() -> spatial_infinity::Result<()> {
    let basis = build_basis(3, 1, 3)?;
    println!("dimension {} = {} charges × {} boson states", basis.dim(), basis.charge_dim(), basis.boson_dim());
    let interior = |i: usize| basis.is_interior(i);
    let (e, z) = (1.0, 0.5);
    let q = charge_operator(&basis, e)?;
    let v = phase_shift_operator(&basis);
    let qv = commutator(&q, &v)?.sub(&v.scale(Complex64::new(e, 0.0)))?;
    println!("[Q, V] − eV on the interior: {:.1e}", qv.max_abs_on_columns(interior));

    let (c, cd) = ladder_operators(&basis, z, 1, 0)?;
    let ccd = commutator(&c, &cd)?.sub(&OperatorMatrix::identity(basis.dim()).scale(Complex64::new(z, 0.0)))?;
    println!("[c, c†] − z on the interior: {:.1e}", ccd.max_abs_on_columns(interior));
    println!("[c, c†] − z at the occupation cap: {:.1e}", ccd.max_abs());
    println!("[Q, c] = {:.1e}, [V, c] = {:.1e}", commutator(&q, &c)?.max_abs(), commutator(&v, &c)?.max_abs());
    println!("Q factorises as {:?}, c as {:?}, Q + c as {:?}", factorize(&basis, &q)?, factorize(&basis, &c)?, factorize(&basis, &q.add(&c)?)?);

    // the quantum phase at two hyperboloid points commutes to a c-number
    let s1 = phase_operator_at(&basis, &ModeData::at(HyperboloidPoint::new(0.2, 0.7, 0.1), 1)?, e, z)?;
    let s2 = phase_operator_at(&basis, &ModeData::at(HyperboloidPoint::new(-0.5, 2.1, 3.0), 1)?, e, z)?;
    let k = commutator(&s1, &s2)?;
    let vac = basis.index(0, &[0, 0, 0])?;
    println!("[S(x), S(y)] on the vacuum: {:.6}", k.get(vac, vac));
    Ok(())
}
