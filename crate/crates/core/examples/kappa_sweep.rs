//! Ground energy and gap as the coupling is switched on.
//!
//! Run from the crate directory: `cargo run --release --example kappa_sweep`.

use fockbench::yukawa::hvz::kappa_sweep;
use fockbench::yukawa::YukawaConfig;

fn main() -> fockbench::Result<()> {
    let cfg = YukawaConfig::from_file("configs/default.toml".as_ref())?;
    let kappas: Vec<f64> = (0..=8).map(|i| i as f64 * 0.05).collect();
    let report = kappa_sweep(&cfg, &kappas)?;
    print!("{}", report.to_csv());
    println!("# ‖H_I‖ ≤ {:.4}, continuous in κ: {}", report.interaction_norm_bound, report.continuous);
    Ok(())
}
