//! Low spectrum of the discretized Yukawa Hamiltonian at a few couplings.
//!
//! Run from the crate directory: `cargo run --release --example yukawa_spectrum`.

use fockbench::linalg::LinearMap;
use fockbench::yukawa::{build_hamiltonian, YukawaConfig, YukawaModel};

fn main() -> fockbench::Result<()> {
    let base = YukawaConfig::from_file("configs/default.toml".as_ref())?;
    println!("ν = min(m, M) = {}", base.nu());
    for kappa in [0.0, 0.1, 0.5] {
        let model = YukawaModel::new(&base.with_kappa(kappa))?;
        let h = build_hamiltonian(&model)?;
        let spec = h.low_spectrum(6, 1e-10)?;
        println!(
            "κ = {kappa:<4} dim {}  E0 = {:+.10}  gap = {:.10?}  {:?}",
            h.dim(),
            spec.ground_energy(),
            spec.gap(1e-9),
            spec.method
        );
    }
    Ok(())
}
