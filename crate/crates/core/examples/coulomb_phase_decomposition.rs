//! The phase field S = -e x·A of a boosted Coulomb potential, decomposed into
//! the charge/phase zero mode and the radiative modes f_l Y_lm.
//!
//! The charge read from the zero mode does not depend on the boost; the
//! boost only feeds the l ≥ 1 coefficients.

use spatial_infinity::classical::{boosted_coulomb, mode_decompose, phase_on_hyperboloid, PointCharge};
use spatial_infinity::desitter::ProductGrid;
use spatial_infinity::sphere::SphereGrid;

fn main() -> spatial_infinity::Result<()> {
    let grid = ProductGrid::symmetric(3.0, 601, SphereGrid::gauss_for_degree(24))?;
    let e = 1.0;
    for eta in [0.0, 0.5, 1.0, 2.0] {
        let charge = PointCharge::boosted(1.0, eta, [0.0, 0.0, 1.0]);
        let phase = phase_on_hyperboloid(|x| boosted_coulomb(&charge, x), &grid, e);
        let d = mode_decompose(&phase, 4, e)?;
        println!("η = {eta}: Q = {:.10}, S0 = {:+.2e}, max |c_lm| = {:.3e}, fit residual {:.1e}", d.q, d.s0, d.max_coefficient(), d.residual);
        if eta == 1.0 {
            for l in 1..=4 {
                println!("    c_{l}0 = {:.4e}", d.coefficient(l, 0).map(|c| c.norm()).unwrap_or(0.0));
            }
        }
    }
    Ok(())
}
