//! S⁰⁰ probes: vanishing moments, cone-supported pairings and the scaling law
//! of homogeneous fields.

use spatial_infinity::testspaces::{
    cone_support_check, exterior_coulomb, moments_vanish_check, pair, Probe, RadialProfile, TestFunction,
};

fn main() -> spatial_infinity::Result<()> {
    let s00 = RadialProfile::MomentFree { order: 8 };
    let inside = TestFunction::inside_cone(1.0, s00)?;
    let outside = TestFunction::outside_cone(1.0, s00)?;
    let gaussian = TestFunction::new(Probe::Gaussian { sigma: 1.0 })?;
    for (name, phi) in [("inside", &inside), ("outside", &outside), ("gaussian", &gaussian)] {
        println!("{name:>8}: class {:?}, max moment up to order 8 = {:.2e}", phi.class(), moments_vanish_check(phi, 8)?.max_abs);
    }
    println!("Coulomb exterior ratio: {:.2e}", cone_support_check(&exterior_coulomb, &inside, &outside)?);
    match cone_support_check(&|_| 1.0, &inside, &outside) {
        Ok(r) => println!("constant field ratio: {r:.3}"),
        Err(e) => println!("constant field against S⁰⁰ probes: {e}"),
    }
    let (i0, o0) = (TestFunction::inside_cone(1.0, RadialProfile::S0Window)?, TestFunction::outside_cone(1.0, RadialProfile::S0Window)?);
    println!("constant field ratio with S⁰ windows: {:.3}", cone_support_check(&|_| 1.0, &i0, &o0)?);

    let (p1, _) = pair(&exterior_coulomb, &outside)?;
    for lambda in [0.5, 2.0, 4.0] {
        let (pl, _) = pair(&exterior_coulomb, &outside.dilated(lambda)?)?;
        println!("λ = {lambda}: ⟨A, φ(λ·)⟩ / ⟨A, φ⟩ = {:.6} (λ^-3 = {:.6})", pl / p1, lambda.powi(-3));
    }
    println!("{}", serde_json::to_string(&outside).unwrap());
    Ok(())
}
