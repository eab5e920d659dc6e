//! Recover the conformal factor of a domain from its operator matrix.

use fermisig::geometry::{validate_domain, ConformalDomain, ConformalFactor, Domain, FlatDomain, GraphDomain};
use fermisig::inverse::reconstruct_volume_density;
use fermisig::sigop::build_conformal;

fn main() -> fermisig::Result<()> {
    let base = FlatDomain::Graph(GraphDomain::triangle(1.0));
    let factor = ConformalFactor::expression("1 + 0.5*x*(1 - x)")?;
    let d = validate_domain(Domain::Conformal(ConformalDomain { base, factor }))?;
    let field = reconstruct_volume_density(&build_conformal(&d, 512)?, 32)?;
    let a = field.assess(&d)?;
    println!("{} x {} windows", field.blocks, field.blocks);
    println!("indicator agreement {:.3}", a.indicator_agreement);
    println!("sup relative error of f² {:.2e}", a.sup_relative_error);
    println!("volume {:.6} recovered, {:.6} true", a.recovered_volume, a.true_volume);
    // the diagonal windows straddle the boundary u = w
    for j in 0..field.blocks {
        let row: String = field.values[j].iter().map(|v| if *v > 0.5 { '#' } else { '.' }).collect();
        println!("{row}");
    }
    Ok(())
}
