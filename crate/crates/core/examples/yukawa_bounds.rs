//! Field and relative bounds of the Yukawa interaction on random sub-cutoff states.
//!
//! Run from the crate directory: `cargo run --release --example yukawa_bounds`.

use fockbench::yukawa::bounds::{
    ladder_bound_reports, phi_bound_report, psi_bound_report, relative_bound_report,
};
use fockbench::yukawa::{YukawaConfig, YukawaModel};

fn main() -> fockbench::Result<()> {
    let model = YukawaModel::new(&YukawaConfig::from_file("configs/default.toml".as_ref())?)?;
    let (a, ad) = ladder_bound_reports(&model, 50, 2)?;
    for r in [psi_bound_report(&model, 50, 1)?, phi_bound_report(&model, 50, 1)?, a, ad] {
        println!("{:<40} min margin {:.4e}", r.bound, r.min_margin());
    }
    let rel = relative_bound_report(&model, &[0.5, 0.2, 0.05], 50, 3)?;
    println!("‖χ‖₁ = {:.4}  Cψ = {:.4}", rel.chi_l1, rel.c_psi);
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "ε", "a", "b", "a (lit.)", "b (lit.)");
    for row in &rel.rows {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", row.eps, row.a, row.b, row.a_literal, row.b_literal);
    }
    println!("‖H_I Ψ‖ ≤ a‖H0 Ψ‖ + b‖Ψ‖: min margin {:.4e}", rel.derived.min_margin());
    Ok(())
}
