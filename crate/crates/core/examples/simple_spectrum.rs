//! Exact spectrum of a simple domain against the grid discretisation.

use fermisig::geometry::{validate_domain, Domain, SimpleDomain};
use fermisig::sigop::{build_flat_massless, build_simple};
use fermisig::spectral::spectrum;

fn main() -> fermisig::Result<()> {
    // two diamonds joined by one extra cell in the future of the Cauchy line
    let s = SimpleDomain::from_widths(&[0.4, 0.6], &[(0, 1)]);
    let d = validate_domain(Domain::Simple(s))?;
    let exact = spectrum(&build_simple(&d)?)?;
    println!("volume {:.6}", d.total_volume()?);
    println!("exact  {:?}", exact.eigenvalues);
    for n in [64, 256, 1024] {
        let grid = spectrum(&build_flat_massless(&d, n)?)?;
        let top: Vec<f64> = grid.eigenvalues.iter().take(4).copied().collect();
        println!("n={n:<5} {top:?}  pairing {:.1e}", grid.pairing_defect);
    }
    Ok(())
}
