//! Spectral reconstruction of U(1) from the phase shift V and D = Q/e, and
//! the universality test across particle species.

use spatial_infinity::fock::{build_basis, charge_operator, phase_shift_operator, ChargeLattice};
use spatial_infinity::spectral::{connes_distance, spectral_triple_check, universality_check, SpectralTolerance, Universality};

fn main() -> spatial_infinity::Result<()> {
    let tol = SpectralTolerance::default();
    for c in [1.0, 1.5] {
        let basis = build_basis(4, 1, 1)?.with_lattice(if c == 1.0 { ChargeLattice::Standard } else { ChargeLattice::Nonstandard { c } })?;
        let r = spectral_triple_check(&phase_shift_operator(&basis), &charge_operator(&basis, 1.0)?, tol)?;
        println!("c = {c}: spectrum {:?}, κ = {:?}, standard {}", r.spectrum, r.kappa, r.checks.standard);
        if let Some(w) = r.witness {
            println!("    witness: {}", w.relation);
        }
    }
    for species in [vec![1.0, -1.0, 1.0], vec![1.0, 0.5], vec![1.0, 2f64.sqrt()]] {
        for mode in [Universality::Strict, Universality::Lenient] {
            let r = universality_check(&species, 2, tol, mode)?;
            let why = r.witness.map(|w| w.relation).unwrap_or_default();
            println!("{species:?} {mode:?}: universal {:?} {why}", r.checks.universality_ok.unwrap());
        }
    }
    let d: Vec<f64> = (0..6).map(f64::from).collect();
    let dist: Vec<f64> = (0..6).map(|k| connes_distance(&d, 0, k)).collect::<Result<_, _>>()?;
    println!("Connes distances from charge 0: {dist:?}");
    Ok(())
}
