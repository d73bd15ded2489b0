//! GHZ-basis projectors and the named states used by the verification
//! commands.
//!
//! For N qubits, write M = 2^N - 1 and x̄ = M ^ x. The operator family is
//! indexed by r in {+, -} together with the even labels x in {2, 4, ..., M-1}:
//!
//!   P_± = (|0..0> ± |1..1>)(<0..0| ± <1..1|) / 2
//!   P_x = (|x><x| + |x̄><x̄|) / 2
//!
//! Each even x pairs a basis state with its bitwise complement; evenness picks
//! one representative per pair, so the family has 2^(N-1) + 1 members and
//!
//!   identity = 2 Σ_r P_r - P_+ - P_-.
//!
//! P_± are rank-one projectors; P_x is half a rank-two projector, so
//! tr P_x = 1 but tr P_x² = 1/2.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exactmat::{basis_matrix, RMatrix};
use crate::rat::{pow2, rat, Rat};

/// Label of one member of the projector family. The derived order
/// (+ before - before even labels in increasing order) is the canonical
/// variable order everywhere downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GhzIndex {
    Plus,
    Minus,
    Even(usize),
}

impl GhzIndex {
    pub fn label(&self) -> String {
        match self {
            GhzIndex::Plus => "+".into(),
            GhzIndex::Minus => "-".into(),
            GhzIndex::Even(x) => x.to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<GhzIndex> {
        match s {
            "+" => Ok(GhzIndex::Plus),
            "-" => Ok(GhzIndex::Minus),
            _ => {
                let x: usize = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad projector label {s:?}")))?;
                if x == 0 || x % 2 != 0 {
                    return Err(Error::Parse(format!(
                        "projector label must be +, -, or a positive even integer, got {s:?}"
                    )));
                }
                Ok(GhzIndex::Even(x))
            }
        }
    }

    /// Weight of P_r in the twirl: 1 for the rank-one members, 2 for the
    /// paired ones (the number of basis pairs the projector covers, divided
    /// into its normalization).
    pub fn twirl_weight(&self) -> Rat {
        match self {
            GhzIndex::Even(_) => rat(2, 1),
            _ => Rat::one(),
        }
    }

    /// tr P_r² = 1 for ±, 1/2 for the paired members.
    pub fn trace_square(&self) -> Rat {
        match self {
            GhzIndex::Even(_) => rat(1, 2),
            _ => Rat::one(),
        }
    }
}

/// Canonical index list [+, -, 2, 4, ..., 2^n - 2].
pub fn index_family(n: usize) -> Result<Vec<GhzIndex>> {
    check_parties(n)?;
    let mut out = vec![GhzIndex::Plus, GhzIndex::Minus];
    let m = 1usize << n;
    out.extend((1..m / 2).map(|k| GhzIndex::Even(2 * k)));
    Ok(out)
}

pub(crate) fn check_parties(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 parties, got {n}")));
    }
    if n > 16 {
        return Err(Error::Domain(format!("{n} parties is past any desk scale")));
    }
    Ok(())
}

/// Bitwise complement partner of a basis label on n qubits.
pub fn complement(n: usize, x: usize) -> usize {
    ((1usize << n) - 1) ^ x
}

fn signed_pair_projector(n: usize, sign: i64) -> RMatrix {
    let d = 1usize << n;
    let h = rat(1, 2);
    let s = rat(sign, 2);
    let mut p = RMatrix::zeros(d, d);
    p.set(0, 0, h.clone());
    p.set(d - 1, d - 1, h);
    p.set(0, d - 1, s.clone());
    p.set(d - 1, 0, s);
    p
}

/// The projector onto the n-party GHZ state (|0..0> + |1..1>)/sqrt(2).
pub fn ghz_projector(n: usize) -> Result<RMatrix> {
    check_parties(n)?;
    Ok(signed_pair_projector(n, 1))
}

/// One member of the family by its index.
pub fn family_member(n: usize, r: GhzIndex) -> Result<RMatrix> {
    check_parties(n)?;
    let d = 1usize << n;
    match r {
        GhzIndex::Plus => Ok(signed_pair_projector(n, 1)),
        GhzIndex::Minus => Ok(signed_pair_projector(n, -1)),
        GhzIndex::Even(x) => {
            if x == 0 || x % 2 != 0 || x >= d - 1 {
                return Err(Error::Domain(format!(
                    "even label {x} out of range for {n} parties"
                )));
            }
            let h = rat(1, 2);
            let mut p = RMatrix::zeros(d, d);
            p.set(x, x, h.clone());
            let xb = complement(n, x);
            p.set(xb, xb, h);
            Ok(p)
        }
    }
}

/// The whole family, keyed in canonical order.
pub fn projector_family(n: usize) -> Result<BTreeMap<GhzIndex, RMatrix>> {
    let mut out = BTreeMap::new();
    for r in index_family(n)? {
        out.insert(r, family_member(n, r)?);
    }
    Ok(out)
}

/// |0..0><0..0| on n qubits.
pub fn all_zero_state(n: usize) -> Result<RMatrix> {
    if n == 0 || n > 16 {
        return Err(Error::Domain(format!("party count {n} out of range")));
    }
    Ok(basis_matrix(1usize << n, 0, 0))
}

/// Maximally mixed state on n qubits.
pub fn max_mixed(n: usize) -> Result<RMatrix> {
    if n == 0 || n > 16 {
        return Err(Error::Domain(format!("party count {n} out of range")));
    }
    Ok(RMatrix::identity(1usize << n).scale(&pow2(-(n as i32))))
}

/// Unnormalized members of the three-qubit "shifts" unextendible product
/// basis, as integer vectors in the computational basis:
///   |0,1,+>, |1,+,0>, |+,0,1>, |-,-,->.
pub fn shifts_upb() -> Vec<Vec<Rat>> {
    let e = |idxs: &[usize], signs: &[i64]| -> Vec<Rat> {
        let mut v = vec![Rat::from_integer(0.into()); 8];
        for (&i, &s) in idxs.iter().zip(signs) {
            v[i] = rat(s, 1);
        }
        v
    };
    vec![
        e(&[2, 3], &[1, 1]),
        e(&[4, 6], &[1, 1]),
        e(&[1, 5], &[1, 1]),
        e(&[0, 1, 2, 3, 4, 5, 6, 7], &[1, -1, -1, 1, -1, 1, 1, -1]),
    ]
}

/// The three-qubit bound entangled state built on the "shifts" basis:
/// the normalized projector onto the orthogonal complement of the span of
/// `shifts_upb`.
pub fn shifts_state() -> RMatrix {
    let mut sigma = RMatrix::identity(8);
    for v in shifts_upb() {
        let norm_sq: Rat = v.iter().map(|c| c * c).sum();
        sigma = &sigma - &RMatrix::outer(&v, &v).scale(&(Rat::one() / norm_sq));
    }
    sigma.scale(&rat(1, 4))
}
