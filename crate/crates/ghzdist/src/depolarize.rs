//! The depolarization map: closed form, literal protocol mixture, and the
//! per-subset variant.
//!
//! The closed form is
//!
//!   Δ(ϱ) = Σ_r ϱ_r P_r,   ϱ_± = tr(P_± ϱ),   ϱ_x = 2 tr(P_x ϱ),
//!
//! an exact projection onto span{P_r}. The protocol is the (N+1)-step random
//! local-unitary recipe: (step 1) global ⊗σ_x with probability 1/2, (steps
//! 2..N) σ_z⊗σ_z on parties {k-1, N} with probability 1/2 each, (step N+1)
//! ⊗σ_z^{y_n} with y_2..y_N uniform and y_1 = Σ_{n≥2} y_n mod 2. Both are
//! implemented exactly.
//!
//! They are not the same map. Every protocol branch is X̄^s Z_w with w in the
//! even-parity sign code, so the mixture acts on the GHZ-diagonal weights as
//! a convolution over (pair, sign); it dephases in the GHZ basis but keeps
//! the weight difference between the two members of every complement pair.
//! The closed form additionally equalizes those weights on every pair except
//! the GHZ pair itself, which no convolution can do. The two agree on inputs
//! that are diagonal in the computational basis (and on span{P_r}), and the
//! tests pin down both the agreement region and a divergence witness.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmat::{permute_factors, tensor, RMatrix, SubsystemShape};
use crate::qcore::{index_family, projector_family, GhzIndex};
use crate::rat::{pow2, Rat};

/// Exact outcome of running both depolarization routes on one input.
#[derive(Clone, Debug)]
pub struct DepolarizeReport {
    pub n: usize,
    pub input: RMatrix,
    pub closed_form_output: RMatrix,
    pub protocol_output: RMatrix,
    pub coefficients: BTreeMap<GhzIndex, Rat>,
}

impl DepolarizeReport {
    pub fn outputs_match(&self) -> bool {
        self.closed_form_output == self.protocol_output
    }
}

fn check_input(rho: &RMatrix, n: usize) -> Result<()> {
    if n < 2 || n > 12 {
        return Err(Error::Domain(format!("party count {n} out of range")));
    }
    let d = 1usize << n;
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Shape(format!(
            "state is {}x{}, expected {d}x{d} for {n} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// The coefficients ϱ_r of the closed form.
pub fn depolarize_coefficients(rho: &RMatrix, n: usize) -> Result<BTreeMap<GhzIndex, Rat>> {
    check_input(rho, n)?;
    let fam = projector_family(n)?;
    let mut out = BTreeMap::new();
    for (r, p) in &fam {
        out.insert(*r, &r.twirl_weight() * &p.trace_product(rho));
    }
    Ok(out)
}

/// Δ(ϱ) = Σ_r ϱ_r P_r, exactly.
pub fn delta_closed(rho: &RMatrix, n: usize) -> Result<RMatrix> {
    let coeffs = depolarize_coefficients(rho, n)?;
    let fam = projector_family(n)?;
    let d = 1usize << n;
    let mut out = RMatrix::zeros(d, d);
    for (r, c) in &coeffs {
        if !c.is_zero() {
            out = &out + &fam[r].scale(c);
        }
    }
    Ok(out)
}

/// All protocol branches as (sign mask, global flip) pairs, with multiplicity.
/// The mask uses the same bit layout as basis indices: factor 0 of the tensor
/// product is the most significant bit.
pub fn protocol_branches(n: usize) -> Vec<(usize, bool)> {
    let bit = |factor: usize| 1usize << (n - 1 - factor);
    let mut out = Vec::with_capacity(1 << (2 * n - 1));
    for s in [false, true] {
        // steps 2..N: z-bit k pairs factor k with the last factor
        for zbits in 0..(1usize << (n - 1)) {
            let mut wz = 0usize;
            for k in 0..(n - 1) {
                if zbits >> k & 1 == 1 {
                    wz ^= bit(k) ^ bit(n - 1);
                }
            }
            // step N+1: y_n on factor n-1 for n = 2..N, y_1 fixed by parity
            for ybits in 0..(1usize << (n - 1)) {
                let mut w = wz;
                for k in 0..(n - 1) {
                    if ybits >> k & 1 == 1 {
                        w ^= bit(k + 1);
                    }
                }
                if (ybits.count_ones() & 1) == 1 {
                    w ^= bit(0);
                }
                out.push((w, s));
            }
        }
    }
    out
}

/// U ϱ Uᵀ for the signed permutation U = Z_w X̄^s:
/// (UϱUᵀ)[i][j] = (-1)^{w·i + w·j} ϱ[i⊕f][j⊕f] with f = s·(1..1).
fn apply_branch(rho: &RMatrix, n: usize, w: usize, s: bool) -> RMatrix {
    let d = 1usize << n;
    let flip = if s { d - 1 } else { 0 };
    RMatrix::from_fn(d, d, |i, j| {
        let v = rho.at(i ^ flip, j ^ flip);
        if v.is_zero() {
            return Rat::zero();
        }
        let parity = ((w & i).count_ones() + (w & j).count_ones()) & 1;
        if parity == 1 {
            -v.clone()
        } else {
            v.clone()
        }
    })
}

/// The literal protocol: uniform mixture over all branches.
pub fn delta_protocol(rho: &RMatrix, n: usize) -> Result<RMatrix> {
    check_input(rho, n)?;
    let d = 1usize << n;
    let branches = protocol_branches(n);
    let mut acc = RMatrix::zeros(d, d);
    for (w, s) in &branches {
        acc = &acc + &apply_branch(rho, n, *w, *s);
    }
    Ok(acc.scale(&pow2(-((2 * n - 1) as i32))))
}

/// Run both routes and collect the coefficients.
pub fn depolarize_report(rho: &RMatrix, n: usize) -> Result<DepolarizeReport> {
    Ok(DepolarizeReport {
        n,
        input: rho.clone(),
        closed_form_output: delta_closed(rho, n)?,
        protocol_output: delta_protocol(rho, n)?,
        coefficients: depolarize_coefficients(rho, n)?,
    })
}

/// Apply the closed-form depolarization independently on each listed subset
/// of tensor factors (each a block of qubits), identity on the rest.
pub fn delta_subset(
    rho: &RMatrix,
    shape: &SubsystemShape,
    partition: &[Vec<usize>],
) -> Result<RMatrix> {
    shape.check_matches(rho)?;
    let nf = shape.num_factors();
    let mut seen = vec![false; nf];
    for subset in partition {
        if subset.len() < 2 {
            return Err(Error::Domain(format!(
                "subset {subset:?} has fewer than 2 parties"
            )));
        }
        for &f in subset {
            if f >= nf {
                return Err(Error::Shape(format!("factor {f} out of range")));
            }
            if seen[f] {
                return Err(Error::Domain(format!("factor {f} in two subsets")));
            }
            if shape.dims()[f] != 2 {
                return Err(Error::Domain(format!(
                    "depolarization acts on qubits; factor {f} has dimension {}",
                    shape.dims()[f]
                )));
            }
            seen[f] = true;
        }
    }
    let mut state = rho.clone();
    for subset in partition {
        state = delta_on_front_permuted(&state, shape, subset)?;
    }
    Ok(state)
}

/// One Δ_S ⊗ id application: permute S to the front, use
/// (Δ⊗id)(ϱ) = Σ_r w_r P_r ⊗ tr_S[(P_r⊗𝕀)ϱ], permute back.
fn delta_on_front_permuted(
    rho: &RMatrix,
    shape: &SubsystemShape,
    subset: &[usize],
) -> Result<RMatrix> {
    let nf = shape.num_factors();
    let mut sub = subset.to_vec();
    sub.sort_unstable();
    let rest: Vec<usize> = (0..nf).filter(|f| !sub.contains(f)).collect();
    let perm: Vec<usize> = sub.iter().chain(rest.iter()).copied().collect();
    let rho_p = permute_factors(rho, shape, &perm)?;
    let perm_dims: Vec<usize> = perm.iter().map(|&f| shape.dims()[f]).collect();
    let shape_p = SubsystemShape::new(perm_dims)?;

    let k = sub.len();
    let sub_dim = 1usize << k;
    let rest_dim = shape_p.total_dim() / sub_dim;
    let fam = projector_family(k)?;
    let mut acc = RMatrix::zeros(shape_p.total_dim(), shape_p.total_dim());
    for (r, p) in &fam {
        // T_r[a][b] = Σ_{s,t} P_r[s][t] ϱ_p[(t,a)][(s,b)], using P_r sparsity
        let mut t_r = RMatrix::zeros(rest_dim, rest_dim);
        for s in 0..sub_dim {
            for t in 0..sub_dim {
                let pv = p.at(s, t);
                if pv.is_zero() {
                    continue;
                }
                for a in 0..rest_dim {
                    for b in 0..rest_dim {
                        let rv = rho_p.at(t * rest_dim + a, s * rest_dim + b);
                        if !rv.is_zero() {
                            t_r.add_to(a, b, &(pv * rv));
                        }
                    }
                }
            }
        }
        acc = &acc + &tensor(p, &t_r).scale(&r.twirl_weight());
    }

    // output factor perm[p] must return to position perm[p]
    let mut inv = vec![0usize; nf];
    for (pos, &f) in perm.iter().enumerate() {
        inv[f] = pos;
    }
    permute_factors(&acc, &shape_p, &inv)
}

/// Hilbert-Schmidt distance of ϱ from span{P_r}: zero iff ϱ is a rational
/// combination of the family. Used by tests to show Δ outputs live in the span.
pub fn span_residual(rho: &RMatrix, n: usize) -> Result<RMatrix> {
    check_input(rho, n)?;
    // The family is HS-orthogonal with <P_r, P_r> = trace_square, so the
    // projection onto the span is Σ_r <P_r,ϱ>/<P_r,P_r> P_r.
    let fam = projector_family(n)?;
    let mut proj = RMatrix::zeros(rho.rows(), rho.cols());
    for r in index_family(n)? {
        let p = &fam[&r];
        let c = p.trace_product(rho) / r.trace_square();
        if !c.is_zero() {
            proj = &proj + &p.scale(&c);
        }
    }
    Ok(rho - &proj)
}
