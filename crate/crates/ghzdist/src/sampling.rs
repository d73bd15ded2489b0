//! Deterministic random generators for tests and the command line. All
//! sampling goes through a seeded ChaCha stream so every run with the same
//! seed sees the same rationals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::channels::ThetaCoeffs;
use crate::error::Result;
use crate::exactmat::RMatrix;
use crate::qcore::index_family;
use crate::rat::{rat, Rat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational with numerator in [-max_num, max_num] and denominator in
/// [1, max_den], reduced.
pub fn rational(r: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rat {
    let n = r.gen_range(-max_num..=max_num);
    let d = r.gen_range(1..=max_den);
    rat(n, d)
}

pub fn nonneg_rational(r: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rat {
    let n = r.gen_range(0..=max_num);
    let d = r.gen_range(1..=max_den);
    rat(n, d)
}

pub fn matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, max_num: i64, max_den: i64) -> RMatrix {
    let mut m = RMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rational(r, max_num, max_den));
        }
    }
    m
}

pub fn symmetric_matrix(r: &mut ChaCha8Rng, dim: usize, max_num: i64, max_den: i64) -> RMatrix {
    let mut m = RMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rational(r, max_num, max_den);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

/// Random rational state: BᵀB normalized to unit trace. Positive
/// semidefinite by construction; rank may be anything up to dim.
pub fn state(r: &mut ChaCha8Rng, dim: usize) -> RMatrix {
    loop {
        let b = matrix(r, dim, dim, 3, 2);
        let gram = &b.transpose() * &b;
        let t = gram.trace();
        if t > Rat::from_integer(0.into()) {
            return gram.scale(&(Rat::from_integer(1.into()) / t));
        }
    }
}

/// Random non-negative coefficient matrix over the index family.
pub fn theta_coeffs(r: &mut ChaCha8Rng, n: usize, max_num: i64, max_den: i64) -> Result<ThetaCoeffs> {
    let idx = index_family(n)?;
    let mut coeffs = BTreeMap::new();
    for &a in &idx {
        for &b in &idx {
            coeffs.insert((a, b), nonneg_rational(r, max_num, max_den));
        }
    }
    ThetaCoeffs::new(n, coeffs)
}
