//! Massive operator on the triangle from the Nyström kernel and from the
//! Fourier–Galerkin basis.

use fermisig::geometry::ValidatedDomain;
use fermisig::quad::QuadratureSpec;
use fermisig::sigop::{build_flat_massless, build_massive_galerkin, build_massive_kernel};
use fermisig::spectral::spectrum;

fn main() -> fermisig::Result<()> {
    let d = ValidatedDomain::triangle(1.0);
    let massless = spectrum(&build_flat_massless(&d, 256)?)?.largest();
    println!("m = 0: |λ1| = {massless:.6}");
    for m in [0.5, 1.0, 2.0] {
        let kernel = spectrum(&build_massive_kernel(&d, m, 128, &QuadratureSpec::gauss(8, 4))?)?;
        let galerkin = spectrum(&build_massive_galerkin(&d, m, 6)?)?;
        println!(
            "m = {m}: kernel |λ1| = {:.6}, galerkin |λ1| = {:.6}, kernel pairing {:.1e}",
            kernel.largest(),
            galerkin.largest(),
            kernel.pairing_defect
        );
    }
    Ok(())
}
