//! Boundary and conformal-factor expressions, and domain spec files.

use fermisig::cli::parse_domain_spec;
use fermisig::expr::Expression;
use fermisig::sigop::build_flat_massless;
use fermisig::spectral::spectrum;

const SPEC: &str = r#"{
  "schema_version": 1,
  "kind": "graph",
  "b": 2.0,
  "upper": "0.6*min(x, 2 - x)",
  "lower": "-0.3*sin(pi*x/2)",
  "samples": 129
}"#;

fn main() -> fermisig::Result<()> {
    let e = Expression::parse("exp(-t^2) * (1 + 0.1*cos(3*x))")?;
    println!("{} at (t, x) = (0.5, 1) is {:.6}", e.root(), e.eval(0.5, 1.0)?);
    match Expression::parse("sin(x") {
        Err(err) => println!("rejected: {err}"),
        Ok(_) => unreachable!(),
    }

    let spec = parse_domain_spec(SPEC)?;
    let d = spec.validated()?;
    println!("{} domain, volume {:.6}", spec.kind(), d.total_volume()?);
    let r = spectrum(&build_flat_massless(&d, 256)?)?;
    println!("largest eigenvalues {:?}", &r.eigenvalues[..4]);
    Ok(())
}
