//! Retarded potential of a smooth charge blob, its Coulomb far field and the
//! degree -1 homogeneous part extracted by Richardson scaling.

use spatial_infinity::classical::{
    boosted_coulomb, extract_homogeneous, retarded_potential, Axis, CurrentGrid, ExtractOptions, PointCharge,
    UnitSystem,
};
use spatial_infinity::{FourVector, HyperboloidPoint};

fn main() -> spatial_infinity::Result<()> {
    let r = 0.1;
    let ax = Axis::cells(-r, r, 16)?;
    let blob = CurrentGrid::gaussian_blob(1.0, r / 6.0, 0.0, None, ax, ax, ax)?;
    println!("total charge on the grid: {:.12}", blob.total_charge(0));
    for dist in [0.5, 1.0, 2.0, 5.0] {
        let a = retarded_potential(&blob, &FourVector::new(0.0, dist, 0.0, 0.0), UnitSystem::Gaussian)?;
        println!("r = {dist}: A⁰ = {:.10}, q/r = {:.10}", a.t, 1.0 / dist);
    }

    let schedule: Vec<f64> = (0..=6).map(|k| 2f64.powi(k)).collect();
    let at = HyperboloidPoint::new(0.4, 1.0, 0.3);
    let rep = extract_homogeneous(|x| retarded_potential(&blob, x, UnitSystem::Gaussian), -1.0, at, &schedule, ExtractOptions::default())?;
    let exact = boosted_coulomb(&PointCharge::at_rest(1.0), &spatial_infinity::embed(at))?;
    println!(
        "homogeneous part at ψ = 0.4: A⁰ = {:.8} (point charge {:.8}), fitted exponent {:.4}, converged {}",
        rep.homogeneous.t, exact.t, rep.fitted_exponent, rep.converged
    );

    // a moving blob against the boosted Coulomb field
    let (xa, za) = (Axis::cells(-1.0, 1.0, 20)?, Axis::cells(-1.6, 1.6, 32)?);
    let ta = Axis::nodes(-1.5, 1.5, 61)?;
    let moving = CurrentGrid::gaussian_blob(1.0, 1.0 / 6.0, 0.5, Some(ta), xa, xa, za)?;
    let x = FourVector::new(10.0, 10.0, 0.0, 0.0);
    let a = retarded_potential(&moving, &x, UnitSystem::Gaussian)?;
    let b = boosted_coulomb(&PointCharge::boosted(1.0, 0.5, [0.0, 0.0, 1.0]), &x)?;
    println!("moving blob at η = 0.5: A = {:?}\n               Coulomb: {:?}", a.to_array(), b.to_array());
    Ok(())
}
