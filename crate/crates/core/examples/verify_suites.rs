//! Every verification suite with its per-check defects.

use fockbench::verify::{run_suite, VerifyOptions, SUITES};

fn main() -> fockbench::Result<()> {
    let opts = VerifyOptions { dims: 1..=4, pairs: 20, samples: 30, ..VerifyOptions::default() };
    for name in SUITES {
        let r = run_suite(name, &opts)?;
        println!("{name} ({})", if r.passed { "pass" } else { "FAIL" });
        for c in &r.checks {
            println!("  {:<52} {:.2e} ≤ {:.0e}", c.name, c.value, c.tol);
        }
    }
    Ok(())
}
