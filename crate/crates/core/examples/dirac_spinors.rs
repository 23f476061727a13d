//! Dirac symbol h_D(p) = α·p + βM and its positive/negative energy spinors.

use fockbench::yukawa::dirac::{dirac_hamiltonian, dirac_spinors, mat_vec};

fn main() {
    let mass = 1.0;
    for p in [[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.3, -0.4, 1.2]] {
        let s = dirac_spinors(p, mass);
        let h = dirac_hamiltonian(p, mass);
        let mut res = 0.0f64;
        for (v, e) in [(s.u[0], s.omega), (s.u[1], s.omega), (s.v[0], -s.omega), (s.v[1], -s.omega)] {
            let hv = mat_vec(&h, &v);
            res = (0..4).map(|i| (hv[i] - v[i] * e).norm()).fold(res, f64::max);
        }
        println!("p = {p:?}  ω = {:.10}  max eigen-residual {res:.1e}", s.omega);
        let comps: Vec<String> = s.u[0].iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
        println!("  u₊ = ({})", comps.join(", "));
    }
}
