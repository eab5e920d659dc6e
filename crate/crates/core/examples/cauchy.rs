//! Cauchy evolution with the causal propagator: the group property and
//! conservation of the slice norm.

use fermisig::dirac::{evolve_massive, group_property_defect, norm_drift, reference_datum, slice_norm, Grid, SpinorField};
use fermisig::quad::QuadratureSpec;

fn main() -> fermisig::Result<()> {
    let m = 1.0;
    let datum = reference_datum(1.0);
    for n in [64, 128, 256] {
        let e = group_property_defect(m, 0.125, 0.125, Grid::new(n, 1.0), &QuadratureSpec::simpson(2 * n))?;
        println!("n = {n:<4} group property defect {e:.3e}");
    }
    let grid = Grid::new(128, 1.0);
    let psi = evolve_massive(&datum, grid, 0.25, m, &QuadratureSpec::simpson(256))?;
    println!("norm {:.8} -> {:.8}", slice_norm(&SpinorField::sample(grid, &datum)), slice_norm(&psi));
    let drift = norm_drift(m, 0.25, grid, &QuadratureSpec::simpson(256))?;
    println!("drift {:.2e}, quadrature error {:.2e}", drift.drift, drift.quadrature_error);
    Ok(())
}
