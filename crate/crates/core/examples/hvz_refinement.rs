//! Gap above E0 and Weyl residuals at λ = M and λ = m across nested refinements.
//!
//! Run from the crate directory: `cargo run --release --example hvz_refinement`.

use fockbench::weyl_probe::WindowSelection;
use fockbench::yukawa::hvz::{hvz_gap_probe, MONOTONE_TOL};
use fockbench::yukawa::YukawaConfig;

fn main() -> fockbench::Result<()> {
    let cfg = YukawaConfig::from_file("configs/hvz.toml".as_ref())?;
    for kappa in [0.0, 0.1] {
        let c = cfg.with_kappa(kappa);
        let out = hvz_gap_probe(&c.level_configs(), &c.lambdas(), WindowSelection::Ground)?;
        println!("κ = {kappa}");
        for l in &out.report.levels {
            println!("  {:<3} dim {:>6}  E0 {:+.8}  gap {:.10?}  ({:?})", l.label, l.dim, l.e0, l.gap, l.method);
        }
        for t in &out.report.tables {
            let mins: Vec<String> = t.rows.iter().map(|r| format!("{:.3e}", r.min_normalized_residual)).collect();
            println!("  λ = {} ({:?}): {}  non-increasing: {}", t.lambda, t.branch, mins.join(" → "), t.non_increasing(MONOTONE_TOL));
        }
    }
    Ok(())
}
