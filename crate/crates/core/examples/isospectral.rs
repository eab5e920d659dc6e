//! Two different three-cell domains sharing one spectrum.

use fermisig::inverse::isospectral_pair;

fn main() -> fermisig::Result<()> {
    for delta in [0.001, 0.01, 0.05] {
        let p = isospectral_pair(delta)?;
        let (a, b, c) = p.params_t;
        println!("δ = {delta}");
        println!("  T  parameters ({a:.8}, {b:.8}, {c:.8}), widths {:?}", p.domain_t.widths());
        println!("  T̃  parameters (1, 1, {delta}), widths {:?}", p.domain_ttilde.widths());
        println!("  eigenvalues of T*T  {:?}", p.spectrum_t);
        println!("  spectrum difference {:.1e}", p.spectrum_difference);
        println!("  Cauchy line lengths {:.6} vs {:.6}", p.spacelike_length_t, p.spacelike_length_ttilde);
    }
    Ok(())
}
