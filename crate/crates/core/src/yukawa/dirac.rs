//! Dirac matrices in the Dirac representation and closed-form spinors.

use crate::linalg::C64;

/// Row-major 4x4 complex matrix.
pub type Mat4 = [[C64; 4]; 4];
pub type Spinor = [C64; 4];

const Z: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn pauli(j: usize) -> [[C64; 2]; 2] {
    match j {
        0 => [[Z, ONE], [ONE, Z]],
        1 => [[Z, -I], [I, Z]],
        2 => [[ONE, Z], [Z, -ONE]],
        _ => panic!("Pauli index out of range"),
    }
}

/// `β = diag(I₂, -I₂)`
pub fn beta() -> Mat4 {
    let mut b = [[Z; 4]; 4];
    b[0][0] = ONE;
    b[1][1] = ONE;
    b[2][2] = -ONE;
    b[3][3] = -ONE;
    b
}

/// `α^j = [[0, σ^j], [σ^j, 0]]`, `j = 0, 1, 2`.
pub fn alpha(j: usize) -> Mat4 {
    let s = pauli(j);
    let mut a = [[Z; 4]; 4];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c + 2] = s[r][c];
            a[r + 2][c] = s[r][c];
        }
    }
    a
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[Z; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn mat_vec(a: &Mat4, v: &Spinor) -> Spinor {
    let mut out = [Z; 4];
    for r in 0..4 {
        out[r] = (0..4).map(|k| a[r][k] * v[k]).sum();
    }
    out
}

/// `{a, b} - 2δ I` style defect helper: max entry of `ab + ba - target`.
pub fn anticommutator_defect(a: &Mat4, b: &Mat4, target_scale: f64) -> f64 {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let t = if r == c { C64::new(target_scale, 0.0) } else { Z };
            worst = worst.max((ab[r][c] + ba[r][c] - t).norm());
        }
    }
    worst
}

/// `h_D(p) = α·p + β M`
pub fn dirac_hamiltonian(p: [f64; 3], mass: f64) -> Mat4 {
    let mut h = beta();
    for r in h.iter_mut() {
        for z in r.iter_mut() {
            *z *= mass;
        }
    }
    for (j, &pj) in p.iter().enumerate() {
        let a = alpha(j);
        for r in 0..4 {
            for c in 0..4 {
                h[r][c] += a[r][c] * pj;
            }
        }
    }
    h
}

/// `ω(p) = √(p² + M²)`
pub fn dispersion(p: [f64; 3], mass: f64) -> f64 {
    (p.iter().map(|x| x * x).sum::<f64>() + mass * mass).sqrt()
}

/// Spinors at one momentum; index 0 is `s = +1/2`, index 1 is `s = -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracSpinors {
    pub u: [Spinor; 2],
    pub v: [Spinor; 2],
    pub omega: f64,
}

/// Positive- and negative-energy eigenvectors of `h_D(p)`:
///
/// `u_s = N (χ_s, σ·p χ_s / (E+M))`, `v_s = N (-σ·p χ_s / (E+M), χ_s)`
///
/// with `χ_{+1/2} = (1,0)`, `χ_{-1/2} = (0,1)`, `E = ω_M(p)` and
/// `N = √((E+M)/2E)`. The component carrying `χ_s` is real positive and of
/// largest modulus, and at `p = 0` the four spinors are `e_1..e_4`.
pub fn dirac_spinors(p: [f64; 3], mass: f64) -> DiracSpinors {
    assert!(mass > 0.0, "Dirac mass must be positive");
    let e = dispersion(p, mass);
    let n = ((e + mass) / (2.0 * e)).sqrt();
    let sp = [
        [C64::new(p[2], 0.0), C64::new(p[0], -p[1])],
        [C64::new(p[0], p[1]), C64::new(-p[2], 0.0)],
    ];
    let chi = [[ONE, Z], [Z, ONE]];
    let mut u = [[Z; 4]; 2];
    let mut v = [[Z; 4]; 2];
    for s in 0..2 {
        let spchi = [
            sp[0][0] * chi[s][0] + sp[0][1] * chi[s][1],
            sp[1][0] * chi[s][0] + sp[1][1] * chi[s][1],
        ];
        let k = n / (e + mass);
        u[s] = [chi[s][0] * n, chi[s][1] * n, spchi[0] * k, spchi[1] * k];
        v[s] = [-spchi[0] * k, -spchi[1] * k, chi[s][0] * n, chi[s][1] * n];
    }
    DiracSpinors { u, v, omega: e }
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::{Mat, Side};

    fn dot(a: &Spinor, b: &Spinor) -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn clifford_relations() {
        let b = beta();
        assert!(anticommutator_defect(&b, &b, 2.0) == 0.0);
        for j in 0..3 {
            assert!(anticommutator_defect(&alpha(j), &b, 0.0) == 0.0);
            for l in 0..3 {
                let t = if j == l { 2.0 } else { 0.0 };
                assert!(anticommutator_defect(&alpha(j), &alpha(l), t) == 0.0);
            }
        }
    }

    #[test]
    fn rest_frame_spinors_are_unit_vectors() {
        let s = dirac_spinors([0.0; 3], 1.3);
        assert_eq!(s.omega, 1.3);
        for (k, sp) in [s.u[0], s.u[1], s.v[0], s.v[1]].iter().enumerate() {
            for (i, z) in sp.iter().enumerate() {
                assert_eq!(*z, if i == k { ONE } else { Z });
            }
        }
    }

    #[test]
    fn spinors_match_numeric_eigendecomposition() {
        let m = 0.8;
        for p in [[0.3, -0.2, 0.5], [1.5, 0.0, 0.0], [0.0, 0.0, -2.0], [-0.7, 0.9, 0.1]] {
            let h = dirac_hamiltonian(p, m);
            let s = dirac_spinors(p, m);
            let mat = Mat::<C64>::from_fn(4, 4, |r, c| h[r][c]);
            let evd = mat.self_adjoint_eigen(Side::Lower).unwrap();
            let vals: Vec<f64> = (0..4).map(|i| evd.S()[i].re).collect();
            let w = dispersion(p, m);
            for (got, want) in vals.iter().zip([-w, -w, w, w]) {
                assert!((got - want).abs() < 1e-12);
            }
            // projector onto the positive-energy space
            for r in 0..4 {
                for c in 0..4 {
                    let numeric: C64 = (2..4).map(|k| evd.U()[(r, k)] * evd.U()[(c, k)].conj()).sum();
                    let closed: C64 = (0..2).map(|k| s.u[k][r] * s.u[k][c].conj()).sum();
                    assert!((numeric - closed).norm() < 1e-12);
                }
            }
            for k in 0..2 {
                let hu = mat_vec(&h, &s.u[k]);
                let hv = mat_vec(&h, &s.v[k]);
                for i in 0..4 {
                    assert!((hu[i] - s.u[k][i] * w).norm() < 1e-12);
                    assert!((hv[i] + s.v[k][i] * w).norm() < 1e-12);
                }
                let big = s.u[k].iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert_eq!(s.u[k][k].norm(), big);
                assert!(s.u[k][k].im == 0.0 && s.u[k][k].re > 0.0);
                assert!(s.v[k][k + 2].im == 0.0 && s.v[k][k + 2].re > 0.0);
            }
        }
    }

    #[test]
    fn orthonormality_and_completeness() {
        let s = dirac_spinors([0.4, 1.1, -0.6], 1.0);
        let all = [s.u[0], s.u[1], s.v[0], s.v[1]];
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot(&all[a], &all[b]) - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        for r in 0..4 {
            for c in 0..4 {
                let sum: C64 = all.iter().map(|x| x[r] * x[c].conj()).sum();
                let want = if r == c { ONE } else { Z };
                assert!((sum - want).norm() < 1e-12);
            }
        }
    }
}
