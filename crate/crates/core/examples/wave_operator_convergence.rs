//! Second-order convergence of the discrete wave operator on the hyperboloid.
//!
//! tanh ψ and every mode f_l Y_lm solve the wave equation exactly, so the
//! finite-difference residual measures the discretisation error alone.

use spatial_infinity::desitter::{certify_wave_field, certify_wave_solution, ModeFunction, ProductGrid, RadialMode};
use spatial_infinity::sphere::SphereGrid;
use spatial_infinity::Complex64;

fn main() -> spatial_infinity::Result<()> {
    let l_max = 3;
    for nodes in [151, 301, 601] {
        let grid = ProductGrid::symmetric(3.0, nodes, SphereGrid::gauss_for_degree(l_max + 1))?;
        let cert = certify_wave_solution(&grid, 3.0, |p| Complex64::new(p.psi.tanh(), 0.0))?;
        println!(
            "tanh ψ, {nodes} nodes: residuals {:.2e} {:.2e} {:.2e}, orders {:.3} {:.3}, extrapolated {:.2e}",
            cert.residuals[0], cert.residuals[1], cert.residuals[2], cert.orders[0], cert.orders[1], cert.extrapolated
        );
    }
    let grid = ProductGrid::symmetric(3.0, 601, SphereGrid::gauss_for_degree(l_max + 1))?;
    for l in 1..=l_max {
        let cert = certify_wave_field(&grid, 3.0, |g| ModeFunction::new(RadialMode::solve(l, &g.psi()[..1])?, 1)?.sample(g))?;
        println!("f_{l} Y_{l}1: residual {:.2e}, orders {:.3} {:.3}", cert.residuals[0], cert.orders[0], cert.orders[1]);
    }
    Ok(())
}
