//! Curve-length bounds read off from the spectrum, and the eigenvalue
//! decay bound of a graph domain.

use fermisig::geometry::{validate_domain, Domain, GraphDomain, SimpleDomain};
use fermisig::inverse::{bound_spacelike, bound_timelike, cell_diagonal_curves};
use fermisig::sigop::{build_flat_massless, build_simple};
use fermisig::spectral::{decay_bound_report, spectrum};

fn main() -> fermisig::Result<()> {
    let s = SimpleDomain::from_widths(&[0.5, 0.3, 0.7], &[(0, 1), (1, 2)]);
    let d = validate_domain(Domain::Simple(s.clone()))?;
    let r = spectrum(&build_simple(&d)?)?;
    let (timelike, spacelike) = cell_diagonal_curves(&s);
    let worst_t = timelike.iter().map(|c| bound_timelike(&r, &d, c).map(|b| b.margin)).collect::<Result<Vec<_>, _>>()?;
    let worst_s = spacelike.iter().map(|c| bound_spacelike(&r, &d, c).map(|b| b.margin)).collect::<Result<Vec<_>, _>>()?;
    println!("λ1 = {:.6}, tr S+ = {:.6}", r.largest(), r.positive_trace);
    println!("{} timelike curves, smallest margin {:.3e}", timelike.len(), worst_t.iter().copied().fold(f64::INFINITY, f64::min));
    println!("{} spacelike curves, smallest margin {:.3e}", spacelike.len(), worst_s.iter().copied().fold(f64::INFINITY, f64::min));

    let g = GraphDomain::triangle(1.0);
    let gd = validate_domain(Domain::Graph(g.clone()))?;
    let gr = spectrum(&build_flat_massless(&gd, 512)?)?;
    let decay = decay_bound_report(&gr, &g, 0.0, 1e-12);
    println!("triangle decay bound c = {:.3}: holds {}, smallest margin {:.3e}", decay.c, decay.holds, decay.min_margin);
    Ok(())
}
