//! Trace formulas: light-cone Monte Carlo against eigenvalue sums, and the
//! small-mass expansion of the massive Hilbert–Schmidt norm.

use fermisig::geometry::{validate_domain, Domain, SimpleDomain, ValidatedDomain};
use fermisig::sigop::build_simple;
use fermisig::spectral::{spectrum, trace_s2_massive_mc, trace_theta_mc};

fn main() -> fermisig::Result<()> {
    let s = SimpleDomain::from_widths(&[0.3, 0.5, 0.2], &[(0, 1), (1, 2), (0, 2)]);
    let d = validate_domain(Domain::Simple(s))?;
    let r = spectrum(&build_simple(&d)?)?;
    for q in 1..=3 {
        let mc = trace_theta_mc(&d, q, 400_000, 11)?;
        let exact: f64 = r.eigenvalues.iter().map(|l| l.powi(2 * q as i32)).sum();
        println!("tr S^{}: spectrum {exact:.6e}, monte carlo {:.6e} ± {:.1e}", 2 * q, mc.value, mc.std_error);
    }
    let tri = ValidatedDomain::triangle(1.0);
    for m in [0.1, 0.5, 1.0] {
        let t = trace_s2_massive_mc(&tri, m, 400_000, 5)?;
        println!(
            "m = {m}: ‖S‖² = {:.6e}, volume term {:.6e}, m² term {:.6e}, residual {:.2e} (m⁴ term {:.2e})",
            t.value, t.volume_term, t.m2_term, t.residual, t.m4_term
        );
    }
    Ok(())
}
