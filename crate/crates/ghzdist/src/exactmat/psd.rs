//! Exact positive-semidefiniteness decision for symmetric rational matrices.
//!
//! Symmetric Gaussian elimination with congruence tracking. The working
//! matrix is repeatedly reduced by symmetric row/column eliminations, so at
//! every step the current matrix equals E A Eᵀ for the tracked E. A negative
//! quantity uncovered on the diagonal (or hiding behind a zero diagonal with
//! a nonzero off-diagonal partner) converts into an explicit vector v with
//! vᵀ A v < 0 in the original coordinates. No pivoting permutations are
//! needed: a zero diagonal with a nonzero row is already a disproof.
//!
//! The returned witness is always re-verified against the input before the
//! verdict is produced, so a `NotPsd` answer carries its own proof.

use num_traits::{Signed, Zero};

use super::RMatrix;
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    NotPsd,
}

#[derive(Clone, Debug)]
pub struct PsdCertificate {
    pub verdict: PsdVerdict,
    /// For `NotPsd`: vector with witnessᵀ A witness < 0, verified before return.
    pub witness: Option<Vec<Rat>>,
    /// Diagonal pivots found before termination (all nonnegative iff `Psd`).
    pub pivot_log: Vec<Rat>,
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == PsdVerdict::Psd
    }
}

/// Decide whether a symmetric rational matrix is positive semidefinite.
pub fn psd_check(a: &RMatrix) -> Result<PsdCertificate> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "psd_check needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_symmetric() {
        return Err(Error::Domain("psd_check needs a symmetric matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    // Invariant: m = e · a · eᵀ.
    let mut e = RMatrix::identity(n);
    let mut pivot_log = Vec::new();

    for k in 0..n {
        let d = m.at(k, k).clone();
        if d.is_positive() {
            let factors: Vec<(usize, Rat)> = ((k + 1)..n)
                .filter(|&i| !m.at(i, k).is_zero())
                .map(|i| (i, m.at(i, k) / &d))
                .collect();
            for (i, f) in &factors {
                for j in 0..n {
                    let v = m.at(*i, j) - &(m.at(k, j) * f);
                    m.set(*i, j, v);
                }
                for j in 0..n {
                    let v = e.at(*i, j) - &(e.at(k, j) * f);
                    e.set(*i, j, v);
                }
            }
            for (i, f) in &factors {
                for j in 0..n {
                    let v = m.at(j, *i) - &(m.at(j, k) * f);
                    m.set(j, *i, v);
                }
            }
            pivot_log.push(d);
            continue;
        }
        if d.is_negative() {
            // m[k][k] = (row k of e) · a · (row k of e)ᵀ < 0.
            let witness: Vec<Rat> = (0..n).map(|j| e.at(k, j).clone()).collect();
            return finish_not_psd(a, witness, pivot_log);
        }
        // Zero diagonal. A nonzero partner m[k][j] makes the {k,j} block
        // [[0, c], [c, djj]] indefinite; columns before k are already clear.
        match ((k + 1)..n).find(|&j| !m.at(k, j).is_zero()) {
            Some(j) => {
                let c = m.at(k, j).clone();
                let djj = m.at(j, j).clone();
                // t chosen so that 2tc + t² djj < 0:
                //   djj <= 0: t = -sign(c), value -2|c| + djj < 0
                //   djj  > 0: t = -c/djj,   value -c²/djj      < 0
                let t = if djj.is_positive() {
                    -(&c / &djj)
                } else if c.is_positive() {
                    -Rat::from_integer(1.into())
                } else {
                    Rat::from_integer(1.into())
                };
                let witness: Vec<Rat> = (0..n)
                    .map(|col| e.at(k, col) + &(&t * e.at(j, col)))
                    .collect();
                return finish_not_psd(a, witness, pivot_log);
            }
            None => {
                pivot_log.push(Rat::zero());
            }
        }
    }
    Ok(PsdCertificate {
        verdict: PsdVerdict::Psd,
        witness: None,
        pivot_log,
    })
}

fn finish_not_psd(a: &RMatrix, witness: Vec<Rat>, pivot_log: Vec<Rat>) -> Result<PsdCertificate> {
    let q = quadratic_form(a, &witness);
    if !q.is_negative() {
        // The elimination invariant guarantees this never happens; a failure
        // here means memory corruption or a bug, not a property of the input.
        return Err(Error::Domain(
            "internal: candidate witness failed re-verification".into(),
        ));
    }
    Ok(PsdCertificate {
        verdict: PsdVerdict::NotPsd,
        witness: Some(witness),
        pivot_log,
    })
}

/// vᵀ A v, skipping zero entries of v.
pub fn quadratic_form(a: &RMatrix, v: &[Rat]) -> Rat {
    assert_eq!(a.rows(), v.len(), "quadratic_form length mismatch");
    let mut acc = Rat::zero();
    for i in 0..v.len() {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            if !v[j].is_zero() {
                let aij = a.at(i, j);
                if !aij.is_zero() {
                    acc += &(&v[i] * aij) * &v[j];
                }
            }
        }
    }
    acc
}
