//! The Bremsstrahlung potential (q/2π)(u/u·p − v/v·p) is homogeneous of
//! degree -1 in p and Lorentz covariant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatial_infinity::classical::bremsstrahlung_momentum;
use spatial_infinity::{FourVector, LorentzMatrix};

fn main() -> spatial_infinity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = FourVector::new(1.0, 0.0, 0.0, 0.0);
    let v = FourVector::velocity(1.0, [0.0, 0.0, 1.0]);
    let p = FourVector::new(2.0, 0.3, -0.4, 1.1);
    let a = bremsstrahlung_momentum(1.0, &u, &v, &p)?;
    println!("A(p) = {:?}", a.to_array());
    println!("p·A(p) = {:.3e} (transverse)", p.dot(&a));
    for lambda in [0.1, 3.0] {
        let al = bremsstrahlung_momentum(1.0, &u, &v, &p.scale(lambda))?;
        println!("λ = {lambda}: λ A(λp) − A(p) = {:.2e}", (al.scale(lambda) - a).max_abs());
    }
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let lam = LorentzMatrix::random(&mut rng, 1.0);
        let b = bremsstrahlung_momentum(1.0, &lam.apply(&u), &lam.apply(&v), &lam.apply(&p))?;
        worst = worst.max((b - lam.apply(&a)).max_abs() / a.max_abs());
    }
    println!("max relative covariance defect over 100 random Lorentz transformations: {worst:.2e}");
    Ok(())
}
