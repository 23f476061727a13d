use rayon::prelude::*;

use super::{sparse::kron, ComplexVector, SparseOperator, C64};
use crate::error::{FockError, Result};

/// Square linear operator known only through its action on vectors.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn apply(&self, x: &[C64]) -> ComplexVector {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y.into()
    }
}

impl LinearMap for SparseOperator {
    fn dim(&self) -> usize {
        assert!(self.is_square(), "LinearMap requires a square operator");
        self.rows()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        SparseOperator::apply_into(self, x, y)
    }
}

/// One `left ⊗ right` term; `None` stands for the identity on that factor.
#[derive(Debug, Clone)]
pub struct KronTerm {
    pub left: Option<SparseOperator>,
    pub right: Option<SparseOperator>,
}

/// A sum of Kronecker products `Σ_t L_t ⊗ R_t` applied without forming the
/// full matrix.
#[derive(Debug, Clone)]
pub struct KronSum {
    left_dim: usize,
    right_dim: usize,
    terms: Vec<KronTerm>,
}

impl KronSum {
    pub fn new(left_dim: usize, right_dim: usize) -> Self {
        Self {
            left_dim,
            right_dim,
            terms: Vec::new(),
        }
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    pub fn push(
        &mut self,
        left: Option<SparseOperator>,
        right: Option<SparseOperator>,
    ) -> Result<()> {
        for (op, dim, context) in [
            (&left, self.left_dim, "left Kronecker factor"),
            (&right, self.right_dim, "right Kronecker factor"),
        ] {
            if let Some(op) = op {
                if op.rows() != dim || op.cols() != dim {
                    return Err(FockError::DimensionMismatch {
                        expected: dim,
                        got: op.rows().max(op.cols()),
                        context,
                    });
                }
            }
        }
        self.terms.push(KronTerm { left, right });
        Ok(())
    }

    pub fn extend(&mut self, other: KronSum) -> Result<()> {
        if other.left_dim != self.left_dim || other.right_dim != self.right_dim {
            return Err(FockError::DimensionMismatch {
                expected: self.left_dim * self.right_dim,
                got: other.left_dim * other.right_dim,
                context: "Kronecker sum factors",
            });
        }
        self.terms.extend(other.terms);
        Ok(())
    }

    /// Materializes the sum as one sparse matrix.
    pub fn to_sparse(&self) -> Result<SparseOperator> {
        let n = self.left_dim * self.right_dim;
        let mut acc = SparseOperator::zeros(n, n);
        let id_l = SparseOperator::identity(self.left_dim);
        let id_r = SparseOperator::identity(self.right_dim);
        for t in &self.terms {
            let l = t.left.as_ref().unwrap_or(&id_l);
            let r = t.right.as_ref().unwrap_or(&id_r);
            acc = acc.add(&kron(l, r)?)?;
        }
        Ok(acc)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match (&t.left, &t.right) {
                (Some(l), r) => KronTerm {
                    left: Some(l.scale(factor)),
                    right: r.clone(),
                },
                (None, Some(r)) => KronTerm {
                    left: None,
                    right: Some(r.scale(factor)),
                },
                (None, None) => KronTerm {
                    left: Some(SparseOperator::identity(self.left_dim).scale(factor)),
                    right: None,
                },
            })
            .collect();
        Self {
            left_dim: self.left_dim,
            right_dim: self.right_dim,
            terms,
        }
    }
}

/// `(A ⊗ I) x` with `A` acting on the left factor.
pub fn apply_left(op: &SparseOperator, right_dim: usize, x: &[C64]) -> ComplexVector {
    let left_dim = op.cols();
    assert_eq!(x.len(), left_dim * right_dim, "apply_left input length");
    let mut y = vec![C64::new(0.0, 0.0); op.rows() * right_dim];
    y.par_chunks_mut(right_dim).enumerate().for_each(|(i, out)| {
        for (j, a) in op.row(i) {
            let src = &x[j * right_dim..(j + 1) * right_dim];
            for (o, s) in out.iter_mut().zip(src) {
                *o += a * s;
            }
        }
    });
    y.into()
}

/// `(I ⊗ B) x` with `B` acting on the right factor.
pub fn apply_right(op: &SparseOperator, left_dim: usize, x: &[C64]) -> ComplexVector {
    let right_dim = op.cols();
    assert_eq!(x.len(), left_dim * right_dim, "apply_right input length");
    let mut y = vec![C64::new(0.0, 0.0); left_dim * op.rows()];
    y.par_chunks_mut(op.rows())
        .zip(x.par_chunks(right_dim))
        .for_each(|(out, src)| op.apply_into(src, out));
    y.into()
}

impl LinearMap for KronSum {
    fn dim(&self) -> usize {
        self.left_dim * self.right_dim
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim(), "KronSum input length");
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let dr = self.right_dim;
        for t in &self.terms {
            let partial = match &t.right {
                Some(r) => apply_right(r, self.left_dim, x),
                None => ComplexVector::from(x.to_vec()),
            };
            let full = match &t.left {
                Some(l) => apply_left(l, dr, &partial),
                None => partial,
            };
            for (o, v) in y.iter_mut().zip(full.iter()) {
                *o += v;
            }
        }
    }
}
