//! SL(2,C) acting on homogeneous functions on the light cone: the L²(S²)
//! norm is invariant exactly for the principal series χ = -1 + iν.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatial_infinity::cone::{act_homogeneous, casimir_labels, l2_inner, massive_state_eval, ConeFunction, GroupElement};
use spatial_infinity::sphere::{ylm, SphereGrid};
use spatial_infinity::{Complex64, FourVector};

fn main() -> spatial_infinity::Result<()> {
    let grid = SphereGrid::gauss_for_degree(32);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = GroupElement::random(&mut rng, 1.0);
    for chi in [Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 1.5), Complex64::new(-0.5, 0.0), Complex64::new(-2.0, 0.0)] {
        let f = ConeFunction::from_fn(chi, grid.clone(), |t, p| ylm(2, 1, t, p) + 0.5 * ylm(0, 0, t, p));
        let h = act_homogeneous(&g, &f)?;
        let ratio = l2_inner(&h, &h)?.re / l2_inner(&f, &f)?.re;
        println!("χ = {chi}: ‖g·f‖² / ‖f‖² = {ratio:.9}");
    }
    for nu in [0.0, 1.0, 2.0] {
        let r = casimir_labels(Complex64::new(-1.0, nu), 4)?;
        println!("ν = {nu}: (l₀, l₁) = ({:.4}, {:.4})", r.l0, r.l1);
    }
    let p = FourVector::new(1.25, 0.0, 0.0, 0.75);
    let k = FourVector::new(1.0, 1.0, 0.0, 0.0);
    println!("massive state (p·k)^(-1+iν) at ν = 1: {:.6}", massive_state_eval(&p, &k, 1.0)?);
    Ok(())
}
