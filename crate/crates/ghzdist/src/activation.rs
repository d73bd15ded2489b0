//! The operational layer: single-copy fidelity after local filtering, the
//! pairing filter and its contraction identity, witnesses built from states
//! with bounded fidelity, and a floating-point seesaw that lower-bounds the
//! best filtered fidelity.
//!
//! Everything except the seesaw is exact. The seesaw is the one deliberate
//! float boundary in the library and its reports say "lower bound".

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{apply_map, SeparableMap};
use crate::error::{Error, Result};
use crate::exactmat::{
    partial_trace, permute_factors, tensor, tensor_all, RMatrix, SubsystemShape,
};
use crate::lemmas::LambdaParam;
use crate::qcore::{all_zero_state, check_parties, ghz_projector};
use crate::rat::{fmt_rat, rat, Rat};

/// Disjoint party subsets S_1…S_M, each of size ≥ 2, with the remainder R.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    n: usize,
    subsets: Vec<Vec<usize>>,
    rest: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(n: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        check_parties(n)?;
        if subsets.is_empty() {
            return Err(Error::Domain("at least one subset required".into()));
        }
        let mut seen = vec![false; n];
        let mut sorted_subsets = Vec::with_capacity(subsets.len());
        for s in &subsets {
            if s.len() < 2 {
                return Err(Error::Domain(format!("subset {s:?} has fewer than 2 parties")));
            }
            let before = s.len();
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() < before {
                return Err(Error::Domain("repeated party within a subset".into()));
            }
            for &p in &s {
                if p >= n {
                    return Err(Error::Shape(format!("party {p} out of range for n = {n}")));
                }
                if seen[p] {
                    return Err(Error::Domain(format!("party {p} appears in two subsets")));
                }
                seen[p] = true;
            }
            sorted_subsets.push(s);
        }
        let rest = (0..n).filter(|&p| !seen[p]).collect();
        Ok(PartitionSpec {
            n,
            subsets: sorted_subsets,
            rest,
        })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }
}

/// Outcome of pushing a state through one product filter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterResult {
    pub filtered_state: RMatrix,
    pub success_weight: Rat,
    pub fidelity: Rat,
}

impl FilterResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "filtered_state": self.filtered_state.to_json_value(),
            "success_weight": fmt_rat(&self.success_weight),
            "fidelity": fmt_rat(&self.fidelity),
        })
    }
}

fn filtered_with_target(
    rho: &RMatrix,
    filters: &[RMatrix],
    target: &RMatrix,
) -> Result<FilterResult> {
    if filters.is_empty() {
        return Err(Error::Shape("empty filter tuple".into()));
    }
    let m = tensor_all(filters);
    if m.cols() != rho.rows() || !rho.is_square() {
        return Err(Error::Shape(format!(
            "filter expects input dimension {}, state is {}x{}",
            m.cols(),
            rho.rows(),
            rho.cols()
        )));
    }
    if m.rows() != target.rows() {
        return Err(Error::Shape(format!(
            "filter output dimension {} does not match the target's {}",
            m.rows(),
            target.rows()
        )));
    }
    let filtered = &(&m * rho) * &m.transpose();
    let weight = filtered.trace();
    if !weight.is_positive() {
        return Err(Error::Domain(
            "filter succeeds with probability zero on this state".into(),
        ));
    }
    let fidelity = filtered.trace_product(target) / &weight;
    Ok(FilterResult {
        filtered_state: filtered,
        success_weight: weight,
        fidelity,
    })
}

/// Fidelity with Φ after applying the single product filter M_1 ⊗ … ⊗ M_N.
/// Each factor must output a qubit. The result is an exact lower bound on
/// the best achievable filtered fidelity of `rho`.
pub fn fidelity_after_filter(rho: &RMatrix, filters: &[RMatrix]) -> Result<FilterResult> {
    let n = filters.len();
    check_parties(n)?;
    for (p, f) in filters.iter().enumerate() {
        if f.rows() != 2 {
            return Err(Error::Shape(format!(
                "filter factor {p} outputs dimension {}, expected a qubit",
                f.rows()
            )));
        }
    }
    filtered_with_target(rho, filters, &ghz_projector(n)?)
}

/// Comparison of a multi-term map's fidelity against its best single term.
#[derive(Clone, Debug)]
pub struct DominanceReport {
    pub multi_term: Rat,
    pub term_fidelities: Vec<Option<Rat>>,
    pub best_single: Rat,
    pub holds: bool,
}

impl DominanceReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .term_fidelities
            .iter()
            .map(|t| match t {
                Some(f) => fmt_rat(f).into(),
                None => serde_json::Value::Null,
            })
            .collect();
        serde_json::json!({
            "multi_term": fmt_rat(&self.multi_term),
            "term_fidelities": terms,
            "best_single": fmt_rat(&self.best_single),
            "holds": self.holds,
        })
    }
}

/// Verify that the fidelity of Ω(ρ) with Φ never beats the best of Ω's
/// single Kraus terms: (x_1+…+x_k)/(y_1+…+y_k) ≤ max x_i/y_i. Zero-weight
/// terms contribute nothing to either side and are skipped.
pub fn single_kraus_dominance_check(rho: &RMatrix, omega: &SeparableMap) -> Result<DominanceReport> {
    let n = omega.parties();
    if omega.output_dims().iter().any(|&d| d != 2) {
        return Err(Error::Shape("map must output one qubit per party".into()));
    }
    let phi = ghz_projector(n)?;
    let out = apply_map(omega, rho)?;
    let total = out.trace();
    if !total.is_positive() {
        return Err(Error::Domain("map succeeds with probability zero".into()));
    }
    let multi = out.trace_product(&phi) / &total;
    let mut term_fidelities = Vec::new();
    let mut best: Option<Rat> = None;
    for k in omega.full_kraus() {
        let filtered = &(&k * rho) * &k.transpose();
        let w = filtered.trace();
        if !w.is_positive() {
            term_fidelities.push(None);
            continue;
        }
        let f = filtered.trace_product(&phi) / &w;
        if best.as_ref().map_or(true, |b| &f > b) {
            best = Some(f.clone());
        }
        term_fidelities.push(Some(f));
    }
    let best = best.ok_or_else(|| Error::Domain("every term has zero weight".into()))?;
    let holds = multi <= best;
    Ok(DominanceReport {
        multi_term: multi,
        term_fidelities,
        best_single: best,
        holds,
    })
}

/// Per-party pairing filter: factor n maps ℋ_n ⊗ 𝒥_n ⊗ 𝒦_n to 𝒦_n by
/// pairing the ℋ and 𝒥 indices and passing the qubit through:
/// M[k][(i,j,κ)] = δ_{ij} δ_{kκ}. Entries are integers; the normalized-
/// pairing convention's scalar Π_n 1/d_n is applied exactly by the identity
/// check rather than stored as irrational matrix entries.
pub fn tilde_filter(h_dims: &[usize]) -> Result<Vec<RMatrix>> {
    let n = h_dims.len();
    check_parties(n)?;
    let mut factors = Vec::with_capacity(n);
    for (p, &d) in h_dims.iter().enumerate() {
        if d < 2 {
            return Err(Error::Shape(format!("party {p} needs block dimension ≥ 2, got {d}")));
        }
        let mut m = RMatrix::zeros(2, d * d * 2);
        for i in 0..d {
            for k in 0..2 {
                m.set(k, (i * d + i) * 2 + k, Rat::one());
            }
        }
        factors.push(m);
    }
    Ok(factors)
}

/// Both sides of the contraction identity for one batch of Z's.
#[derive(Clone, Debug)]
pub struct FilterIdentityReport {
    pub h_dims: Vec<usize>,
    pub lhs: Vec<Rat>,
    pub rhs: Vec<Rat>,
    pub nu: Option<Rat>,
    pub consistent: bool,
    pub pass: bool,
}

impl FilterIdentityReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "h_dims": self.h_dims,
            "lhs": self.lhs.iter().map(fmt_rat).collect::<Vec<_>>(),
            "rhs": self.rhs.iter().map(fmt_rat).collect::<Vec<_>>(),
            "nu": self.nu.as_ref().map(fmt_rat),
            "consistent": self.consistent,
            "pass": self.pass,
        })
    }
}

/// Check tr[M̃(σ⊗ρ)M̃ᵀ Z] = ν·tr[ρ(σᵀ⊗Z)] across a batch of Z's.
///
/// `rho` lives on 𝒥⊗𝒦 in block layout (all 𝒥 factors, then all 𝒦 qubits),
/// `sigma` on ℋ with per-party dimensions `h_dims` (dim 𝒥_n = dim ℋ_n), and
/// each Z on the 𝒦 qubits. PASS means every pair of Z's gives the same
/// ratio and the extracted ν is positive. The reported ν uses normalized
/// pairing vectors, which contribute the exact scalar Π_n 1/d_n.
pub fn verify_filter_identity(
    rho: &RMatrix,
    sigma: &RMatrix,
    h_dims: &[usize],
    zs: &[RMatrix],
) -> Result<FilterIdentityReport> {
    let n = h_dims.len();
    check_parties(n)?;
    if zs.is_empty() {
        return Err(Error::Shape("empty Z batch".into()));
    }
    let dh: usize = h_dims.iter().product();
    let dk = 1usize << n;
    if sigma.rows() != dh || !sigma.is_square() {
        return Err(Error::Shape(format!(
            "sigma is {}x{}, expected {dh}x{dh}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    if rho.rows() != dh * dk || !rho.is_square() {
        return Err(Error::Shape(format!(
            "rho is {}x{}, expected {}x{}",
            rho.rows(),
            rho.cols(),
            dh * dk,
            dh * dk
        )));
    }
    let m = tensor_all(&tilde_filter(h_dims)?);
    // σ ⊗ ρ sits on (ℋ…)(𝒥…)(𝒦…); the filter acts party-locally
    let mut dims: Vec<usize> = h_dims.to_vec();
    dims.extend_from_slice(h_dims);
    dims.extend(std::iter::repeat(2).take(n));
    let shape = SubsystemShape::new(dims)?;
    let mut perm = Vec::with_capacity(3 * n);
    for p in 0..n {
        perm.push(p);
        perm.push(n + p);
        perm.push(2 * n + p);
    }
    let x = permute_factors(&tensor(sigma, rho), &shape, &perm)?;
    let filtered = &(&m * &x) * &m.transpose();
    let mut norm = Rat::one();
    for &d in h_dims {
        norm /= Rat::from_integer((d as u64).into());
    }
    let mut lhs = Vec::with_capacity(zs.len());
    let mut rhs = Vec::with_capacity(zs.len());
    for z in zs {
        if z.rows() != dk || !z.is_square() {
            return Err(Error::Shape(format!(
                "Z is {}x{}, expected {dk}x{dk}",
                z.rows(),
                z.cols()
            )));
        }
        lhs.push(filtered.trace_product(z) * &norm);
        rhs.push(rho.trace_product(&tensor(&sigma.transpose(), z)));
    }
    let mut consistent = true;
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            consistent &= &lhs[i] * &rhs[j] == &lhs[j] * &rhs[i];
        }
    }
    let nu = lhs
        .iter()
        .zip(&rhs)
        .find(|(_, r)| !r.is_zero())
        .map(|(l, r)| l / r);
    let zero_pairs_ok = lhs
        .iter()
        .zip(&rhs)
        .all(|(l, r)| !r.is_zero() || l.is_zero());
    let pass = consistent
        && zero_pairs_ok
        && nu.as_ref().map_or(false, |v| v.is_positive());
    Ok(FilterIdentityReport {
        h_dims: h_dims.to_vec(),
        lhs,
        rhs,
        nu,
        consistent,
        pass,
    })
}

/// Witness on ℋ obtained by contracting a candidate state against
/// λ𝕀 - Φ on its qubit block. Detection means tr(σᵀW) < 0.
#[derive(Clone, Debug)]
pub struct Witness {
    pub matrix: RMatrix,
    pub lambda: Rat,
    pub qubit_parties: usize,
}

impl Witness {
    pub fn detection_value(&self, sigma: &RMatrix) -> Result<Rat> {
        if sigma.rows() != self.matrix.rows() || !sigma.is_square() {
            return Err(Error::Shape(format!(
                "sigma is {}x{}, witness acts on dimension {}",
                sigma.rows(),
                sigma.cols(),
                self.matrix.rows()
            )));
        }
        Ok(sigma.transpose().trace_product(&self.matrix))
    }

    pub fn detects(&self, sigma: &RMatrix) -> Result<bool> {
        Ok(self.detection_value(sigma)?.is_negative())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "matrix": self.matrix.to_json_value(),
            "lambda": fmt_rat(&self.lambda),
            "qubit_parties": self.qubit_parties,
        })
    }
}

/// W = tr_𝒦[ρ(𝕀_ℋ ⊗ (λ𝕀 - Φ))] for ρ on ℋ⊗𝒦 in block layout with n qubit
/// parties in the 𝒦 block.
pub fn witness_from_rho(rho: &RMatrix, n: usize, lambda: &LambdaParam) -> Result<Witness> {
    check_parties(n)?;
    let dk = 1usize << n;
    if !rho.is_square() || rho.rows() % dk != 0 || rho.rows() / dk < 2 {
        return Err(Error::Shape(format!(
            "rho is {}x{}, expected a multiple of the qubit-block dimension {dk} with a nontrivial first block",
            rho.rows(),
            rho.cols()
        )));
    }
    let dh = rho.rows() / dk;
    let l = lambda.value();
    let band = &RMatrix::identity(dk).scale(l) - &ghz_projector(n)?;
    let product = rho * &tensor(&RMatrix::identity(dh), &band);
    let matrix = partial_trace(&product, &SubsystemShape::new(vec![dh, dk])?, &[0])?;
    Ok(Witness {
        matrix,
        lambda: l.clone(),
        qubit_parties: n,
    })
}

/// The identity behind the witness: tr(σᵀW) computed from the contracted
/// witness must equal tr[ρ(σᵀ ⊗ (λ𝕀-Φ))] computed directly.
pub fn witness_consistency(
    rho: &RMatrix,
    n: usize,
    lambda: &LambdaParam,
    sigma: &RMatrix,
) -> Result<(Rat, Rat, bool)> {
    let w = witness_from_rho(rho, n, lambda)?;
    let via_witness = w.detection_value(sigma)?;
    let dk = 1usize << n;
    let band = &RMatrix::identity(dk).scale(lambda.value()) - &ghz_projector(n)?;
    let direct = rho.trace_product(&tensor(&sigma.transpose(), &band));
    let equal = via_witness == direct;
    Ok((via_witness, direct, equal))
}

/// A probe filter that pushes the candidate state's fidelity above λ,
/// refuting the witness premise.
#[derive(Clone, Debug)]
pub struct PremiseRefutation {
    pub probe: Vec<String>,
    pub fidelity: Rat,
}

/// Search a small family of product probes for evidence that the candidate
/// state's best filtered fidelity exceeds λ, in which case the witness
/// construction's premise fails. `rho` is on ℋ⊗𝒦 block layout with one
/// ℋ factor of dimension h_dims[p] and one qubit per party. Finding
/// nothing proves nothing; this check can only refute.
pub fn premise_refutation(
    rho: &RMatrix,
    h_dims: &[usize],
    lambda: &LambdaParam,
) -> Result<Option<PremiseRefutation>> {
    let n = h_dims.len();
    check_parties(n)?;
    let dh: usize = h_dims.iter().product();
    let dk = 1usize << n;
    if rho.rows() != dh * dk || !rho.is_square() {
        return Err(Error::Shape(format!(
            "rho is {}x{}, expected {}x{}",
            rho.rows(),
            rho.cols(),
            dh * dk,
            dh * dk
        )));
    }
    // regroup to party-local ℋ_p ⊗ 𝒦_p pairs
    let mut dims: Vec<usize> = h_dims.to_vec();
    dims.extend(std::iter::repeat(2).take(n));
    let shape = SubsystemShape::new(dims)?;
    let mut perm = Vec::with_capacity(2 * n);
    for p in 0..n {
        perm.push(p);
        perm.push(n + p);
    }
    let local = permute_factors(rho, &shape, &perm)?;
    // per-party probes on ℋ_p: each computational bra and the uniform bra
    let probes_for = |d: usize| -> Vec<(String, RMatrix)> {
        let mut out = Vec::new();
        for i in 0..d {
            let mut b = RMatrix::zeros(1, d);
            b.set(0, i, Rat::one());
            out.push((format!("<{i}|"), b));
        }
        let mut u = RMatrix::zeros(1, d);
        for i in 0..d {
            u.set(0, i, Rat::one());
        }
        out.push(("<u|".into(), u));
        out
    };
    let party_probes: Vec<Vec<(String, RMatrix)>> =
        h_dims.iter().map(|&d| probes_for(d)).collect();
    let mut choice = vec![0usize; n];
    loop {
        let mut filters = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for p in 0..n {
            let (label, bra) = &party_probes[p][choice[p]];
            labels.push(label.clone());
            filters.push(tensor(bra, &RMatrix::identity(2)));
        }
        if let Ok(result) = fidelity_after_filter(&local, &filters) {
            if &result.fidelity > lambda.value() {
                return Ok(Some(PremiseRefutation {
                    probe: labels,
                    fidelity: result.fidelity,
                }));
            }
        }
        // next multi-index
        let mut p = 0;
        loop {
            if p == n {
                return Ok(None);
            }
            choice[p] += 1;
            if choice[p] < party_probes[p].len() {
                break;
            }
            choice[p] = 0;
            p += 1;
        }
    }
}

/// Average teleportation fidelity from singlet fraction e: (2e+1)/3.
pub fn teleport_fidelity(e: &Rat) -> Result<Rat> {
    if e < &rat(1, 2) || e > &Rat::one() {
        return Err(Error::Domain(format!(
            "fidelity {} outside [1/2, 1]",
            fmt_rat(e)
        )));
    }
    Ok((e * Rat::from_integer(2.into()) + Rat::one()) / Rat::from_integer(3.into()))
}

/// The trivial lower bound for the grouped fidelity: preparing |0…0⟩
/// scores exactly 2^{-M} against 𝕀_R ⊗ Φ_{S_1} ⊗ … ⊗ Φ_{S_M}.
#[derive(Clone, Debug)]
pub struct QTrivialBound {
    pub partition: PartitionSpec,
    pub value: Rat,
    pub strategy: String,
}

pub fn q_trivial_bound(partition: &PartitionSpec) -> Result<QTrivialBound> {
    let n = partition.parties();
    // target operator, built per group then rearranged to party order
    let mut factors = Vec::new();
    let mut slots: Vec<usize> = Vec::with_capacity(n);
    for &p in partition.rest() {
        factors.push(RMatrix::identity(2));
        slots.push(p);
    }
    for s in partition.subsets() {
        factors.push(ghz_projector(s.len())?);
        slots.extend_from_slice(s);
    }
    let grouped = tensor_all(&factors);
    let shape = SubsystemShape::new(vec![2; n])?;
    let mut slot_of = vec![0usize; n];
    for (slot, &party) in slots.iter().enumerate() {
        slot_of[party] = slot;
    }
    let target = permute_factors(&grouped, &shape, &slot_of)?;
    let value = all_zero_state(n)?.trace_product(&target);
    let m = partition.subsets().len() as i32;
    if value != crate::rat::pow2(-m) {
        return Err(Error::Domain(
            "internal: trivial strategy does not score 2^-M".into(),
        ));
    }
    Ok(QTrivialBound {
        partition: partition.clone(),
        value,
        strategy: "prepare |0…0> in every subset".into(),
    })
}

/// Convert an exact matrix to floats for the seesaw boundary.
pub fn to_float(m: &RMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rat_to_f64(m.at(i, j)))
}

fn rat_to_f64(r: &Rat) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Seesaw outcome; all numbers are floats and the estimate is only ever a
/// lower bound on the true optimum.
#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub n: usize,
    pub best: f64,
    pub per_restart: Vec<f64>,
    pub monotone_ok: bool,
    pub iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl SeesawResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "float": true,
            "kind": "lower bound",
            "n": self.n,
            "best": self.best,
            "per_restart": self.per_restart,
            "monotone_ok": self.monotone_ok,
            "iters": self.iters,
            "restarts": self.restarts,
            "seed": self.seed,
        })
    }
}

fn kron_f(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

fn kron_all(ms: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = ms[0].clone();
    for m in &ms[1..] {
        out = kron_f(&out, m);
    }
    out
}

fn objective(rho: &DMatrix<f64>, phi: &DMatrix<f64>, filters: &[DMatrix<f64>]) -> Option<f64> {
    let m = kron_all(filters);
    let filtered = &m * rho * m.transpose();
    let den = filtered.trace();
    if den <= 0.0 {
        return None;
    }
    Some((phi * &filtered).trace() / den)
}

/// Optimal 2x2 filter for one party with the rest fixed: the objective is a
/// ratio of quadratic forms in the 4 entries, maximized by the top
/// generalized eigenvector, found by power iteration after whitening the
/// denominator form.
fn best_local_filter(
    rho: &DMatrix<f64>,
    phi: &DMatrix<f64>,
    filters: &[DMatrix<f64>],
    party: usize,
) -> Option<DMatrix<f64>> {
    let n = filters.len();
    let basis: Vec<DMatrix<f64>> = (0..4)
        .map(|e| {
            let mut m = DMatrix::zeros(2, 2);
            m[(e / 2, e % 2)] = 1.0;
            m
        })
        .collect();
    let kraus: Vec<DMatrix<f64>> = basis
        .iter()
        .map(|e| {
            let slots: Vec<DMatrix<f64>> = (0..n)
                .map(|q| if q == party { e.clone() } else { filters[q].clone() })
                .collect();
            kron_all(&slots)
        })
        .collect();
    let mut a = DMatrix::zeros(4, 4);
    let mut b = DMatrix::zeros(4, 4);
    for i in 0..4 {
        let ki_rho = &kraus[i] * rho;
        for j in 0..4 {
            let x = &ki_rho * kraus[j].transpose();
            a[(i, j)] = (phi * &x).trace();
            b[(i, j)] = x.trace();
        }
    }
    let a = (a.clone() + a.transpose()) * 0.5;
    let b = (b.clone() + b.transpose()) * 0.5;
    // whiten b on its numerically nonzero eigenspace
    let eig = b.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if max_ev <= 0.0 {
        return None;
    }
    let keep: Vec<usize> = (0..4)
        .filter(|&i| eig.eigenvalues[i] > max_ev * 1e-12)
        .collect();
    if keep.is_empty() {
        return None;
    }
    let mut w = DMatrix::zeros(4, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scale = 1.0 / eig.eigenvalues[i].sqrt();
        for r in 0..4 {
            w[(r, col)] = eig.eigenvectors[(r, i)] * scale;
        }
    }
    let c = w.transpose() * &a * &w;
    let c = (c.clone() + c.transpose()) * 0.5;
    // shift so the top eigenvalue of the shifted operator is the maximum one
    let shift = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>();
    let k = keep.len();
    let shifted = c + DMatrix::identity(k, k) * shift;
    let mut v = DMatrix::from_fn(k, 1, |i, _| 1.0 + 0.1 * (i as f64 + 1.0));
    for _ in 0..400 {
        v = &shifted * v;
        let norm = v.norm();
        if norm <= 0.0 {
            return None;
        }
        v /= norm;
    }
    let m_vec = w * v;
    let candidate = DMatrix::from_fn(2, 2, |i, j| m_vec[(2 * i + j, 0)]);
    if candidate.norm() <= 0.0 {
        return None;
    }
    Some(candidate)
}

fn seesaw_single(
    rho: &DMatrix<f64>,
    phi: &DMatrix<f64>,
    n: usize,
    iters: usize,
    start: Vec<DMatrix<f64>>,
) -> (f64, bool) {
    let mut filters = start;
    let mut current = objective(rho, phi, &filters).unwrap_or(0.0);
    let mut monotone = true;
    for _ in 0..iters {
        for p in 0..n {
            if let Some(next) = best_local_filter(rho, phi, &filters, p) {
                let old = filters[p].clone();
                filters[p] = next;
                match objective(rho, phi, &filters) {
                    Some(val) => {
                        if val < current - 1e-12 {
                            monotone = false;
                        }
                        if val >= current {
                            current = val;
                        } else {
                            filters[p] = old;
                        }
                    }
                    None => filters[p] = old,
                }
            }
        }
    }
    (current, monotone)
}

/// Alternating local-filter optimization of the fidelity with Φ. Restart 0
/// starts from identity filters, later restarts from random filters seeded
/// deterministically from the master seed; restarts run concurrently and
/// the outcome is fully determined by (rho, iters, restarts, seed).
pub fn seesaw_estimate(
    rho: &DMatrix<f64>,
    n: usize,
    iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<SeesawResult> {
    check_parties(n)?;
    let d = 1usize << n;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::Shape(format!(
            "state is {}x{}, expected {d}x{d}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if restarts == 0 || iters == 0 {
        return Err(Error::Domain("need at least one restart and one sweep".into()));
    }
    let sym = (rho.clone() + rho.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if max_ev <= 0.0 || eig.eigenvalues.iter().any(|&v| v < -1e-9 * max_ev.max(1.0)) {
        return Err(Error::Domain("state is not positive semidefinite".into()));
    }
    let phi = to_float(&ghz_projector(n)?);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let restart_seeds: Vec<u64> = (0..restarts).map(|_| master.next_u64()).collect();
    let mut per_restart = vec![0.0f64; restarts];
    let mut monotone_flags = vec![true; restarts];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (r, &rs) in restart_seeds.iter().enumerate() {
            let sym = &sym;
            let phi = &phi;
            handles.push((
                r,
                scope.spawn(move || {
                    let start: Vec<DMatrix<f64>> = if r == 0 {
                        (0..n).map(|_| DMatrix::identity(2, 2)).collect()
                    } else {
                        let mut rng = ChaCha8Rng::seed_from_u64(rs);
                        (0..n)
                            .map(|_| DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0)))
                            .collect()
                    };
                    seesaw_single(sym, phi, n, iters, start)
                }),
            ));
        }
        for (r, h) in handles {
            let (val, mono) = h.join().expect("seesaw restart panicked");
            per_restart[r] = val;
            monotone_flags[r] = mono;
        }
    });
    let best = per_restart.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SeesawResult {
        n,
        best,
        per_restart,
        monotone_ok: monotone_flags.iter().all(|&m| m),
        iters,
        restarts,
        seed,
    })
}
