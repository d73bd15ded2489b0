//! Separable completely positive maps as lists of product Kraus terms, the
//! Jamiolkowski correspondence, and the coefficient form of depolarization
//! sandwiches.
//!
//! Convention, fixed here and enforced by round-trip tests: the dual operator
//! Θ of a map Ω lives on output ⊗ input (output factors first) and satisfies
//!
//!   Ω(Z) = tr_in( Θ · (𝕀 ⊗ Zᵀ) ).
//!
//! For a Kraus map Ω(ϱ) = Σ_k K ϱ Kᵀ this gives Θ = Σ_k vec(K) vec(K)ᵀ with
//! row-major vec.

use num_traits::Zero;
use std::collections::BTreeMap;

use crate::depolarize::delta_subset;
use crate::error::{Error, Result};
use crate::exactmat::{tensor, tensor_all, RMatrix, SubsystemShape};
use crate::qcore::{index_family, projector_family, GhzIndex};
use crate::rat::{fmt_rat, parse_rat, pow2, Rat};

/// A completely positive map whose every Kraus operator is a tensor product
/// of per-party local matrices. Party p takes dimension `input_dims[p]` to
/// `output_dims[p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparableMap {
    n: usize,
    input_dims: Vec<usize>,
    output_dims: Vec<usize>,
    kraus_terms: Vec<Vec<RMatrix>>,
}

impl SeparableMap {
    pub fn new(kraus_terms: Vec<Vec<RMatrix>>) -> Result<Self> {
        let first = kraus_terms
            .first()
            .ok_or_else(|| Error::Domain("map needs at least one Kraus term".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::Shape("Kraus terms must cover at least one party".into()));
        }
        let output_dims: Vec<usize> = first.iter().map(|m| m.rows()).collect();
        let input_dims: Vec<usize> = first.iter().map(|m| m.cols()).collect();
        if input_dims.iter().chain(&output_dims).any(|&d| d == 0) {
            return Err(Error::Shape("zero-dimensional local matrix".into()));
        }
        for (k, term) in kraus_terms.iter().enumerate() {
            if term.len() != n {
                return Err(Error::Shape(format!(
                    "Kraus term {k} spans {} parties, expected {n}",
                    term.len()
                )));
            }
            for (p, m) in term.iter().enumerate() {
                if m.rows() != output_dims[p] || m.cols() != input_dims[p] {
                    return Err(Error::Shape(format!(
                        "Kraus term {k}, party {p}: {}x{} local matrix, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        output_dims[p],
                        input_dims[p]
                    )));
                }
            }
        }
        Ok(SeparableMap {
            n,
            input_dims,
            output_dims,
            kraus_terms,
        })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dims(&self) -> &[usize] {
        &self.output_dims
    }

    pub fn terms(&self) -> &[Vec<RMatrix>] {
        &self.kraus_terms
    }

    pub fn input_dim(&self) -> usize {
        self.input_dims.iter().product()
    }

    pub fn output_dim(&self) -> usize {
        self.output_dims.iter().product()
    }

    /// Full Kraus operators, each the tensor product of its locals.
    pub fn full_kraus(&self) -> Vec<RMatrix> {
        self.kraus_terms.iter().map(|t| tensor_all(t)).collect()
    }

    pub fn is_qubit_to_qubit(&self) -> bool {
        self.input_dims.iter().all(|&d| d == 2) && self.output_dims.iter().all(|&d| d == 2)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<Vec<serde_json::Value>> = self
            .kraus_terms
            .iter()
            .map(|t| t.iter().map(|m| m.to_json_value()).collect())
            .collect();
        serde_json::json!({ "n": self.n, "terms": terms })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("map json: {e}")))?;
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("map json: missing party count \"n\"".into()))?
            as usize;
        let terms = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("map json: missing \"terms\" array".into()))?;
        let mut kraus_terms = Vec::with_capacity(terms.len());
        for t in terms {
            let locals = t
                .as_array()
                .ok_or_else(|| Error::Parse("map json: term is not an array".into()))?;
            let mut term = Vec::with_capacity(locals.len());
            for m in locals {
                term.push(RMatrix::from_json_value(m)?);
            }
            if term.len() != n {
                return Err(Error::Parse("map json: term length differs from n".into()));
            }
            kraus_terms.push(term);
        }
        SeparableMap::new(kraus_terms)
    }
}

/// Ω(ϱ) = Σ_k K ϱ Kᵀ, unnormalized.
pub fn apply_map(omega: &SeparableMap, rho: &RMatrix) -> Result<RMatrix> {
    let din = omega.input_dim();
    if rho.rows() != din || rho.cols() != din {
        return Err(Error::Shape(format!(
            "state is {}x{}, map expects {din}x{din}",
            rho.rows(),
            rho.cols()
        )));
    }
    let dout = omega.output_dim();
    let mut acc = RMatrix::zeros(dout, dout);
    for term in &omega.kraus_terms {
        let k = tensor_all(term);
        acc = &acc + &(&(&k * rho) * &k.transpose());
    }
    Ok(acc)
}

/// Jamiolkowski operator of a product-Kraus map between qubit spaces:
/// Θ = Σ_k vec(K_k) vec(K_k)ᵀ on output ⊗ input.
pub fn jamiolkowski_state(omega: &SeparableMap) -> Result<RMatrix> {
    if !omega.is_qubit_to_qubit() {
        return Err(Error::Domain(
            "jamiolkowski_state expects a map between qubit registers".into(),
        ));
    }
    let d = omega.output_dim() * omega.input_dim();
    let mut theta = RMatrix::zeros(d, d);
    for term in &omega.kraus_terms {
        let v = tensor_all(term).vec_row_major();
        theta = &theta + &RMatrix::outer(&v, &v);
    }
    Ok(theta)
}

/// Jamiolkowski operator of an arbitrary linear map given by its action,
/// Θ = Σ_{b,d} f(|b><d|) ⊗ |b><d|. Same convention as `jamiolkowski_state`;
/// this route also covers maps with no product-Kraus presentation over the
/// rationals (the closed-form depolarization is one).
pub fn jamiolkowski_of_map(
    in_dim: usize,
    mut f: impl FnMut(&RMatrix) -> Result<RMatrix>,
) -> Result<RMatrix> {
    let mut theta: Option<RMatrix> = None;
    for b in 0..in_dim {
        for dcol in 0..in_dim {
            let mut e = RMatrix::zeros(in_dim, in_dim);
            e.set(b, dcol, Rat::from_integer(1.into()));
            let img = f(&e)?;
            let block = tensor(&img, &e);
            theta = Some(match theta {
                None => block,
                Some(t) => &t + &block,
            });
        }
    }
    Ok(theta.expect("in_dim > 0"))
}

/// Recover the map from its Jamiolkowski operator: Ω(Z) = tr_in(Θ(𝕀⊗Zᵀ)),
/// evaluated entrywise as Ω(Z)[a][c] = Σ_{b,d} Z[b][d] Θ[(a,b)][(c,d)].
pub fn apply_theta(theta: &RMatrix, out_dim: usize, z: &RMatrix) -> Result<RMatrix> {
    let in_dim = z.rows();
    if z.cols() != in_dim || theta.rows() != out_dim * in_dim || !theta.is_square() {
        return Err(Error::Shape(format!(
            "theta is {}x{}, expected {} for output dim {out_dim} and input dim {in_dim}",
            theta.rows(),
            theta.cols(),
            out_dim * in_dim
        )));
    }
    let mut out = RMatrix::zeros(out_dim, out_dim);
    for b in 0..in_dim {
        for d in 0..in_dim {
            let zv = z.at(b, d);
            if zv.is_zero() {
                continue;
            }
            for a in 0..out_dim {
                for c in 0..out_dim {
                    let tv = theta.at(a * in_dim + b, c * in_dim + d);
                    if !tv.is_zero() {
                        out.add_to(a, c, &(zv * tv));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The canonical solution operator Θ^sol = P_+⊗P_+ + P_-⊗P_- + 2 Σ_x P_x⊗P_x
/// on 2N qubits (output register then input register).
pub fn theta_sol(n: usize) -> Result<RMatrix> {
    let fam = projector_family(n)?;
    let d = 1usize << (2 * n);
    let mut acc = RMatrix::zeros(d, d);
    for (r, p) in &fam {
        acc = &acc + &tensor(p, p).scale(&r.twirl_weight());
    }
    Ok(acc)
}

/// Coefficient map of Θ^sol: 1 at (+,+) and (-,-), 2 at (x,x), 0 elsewhere.
pub fn theta_sol_coeffs(n: usize) -> Result<ThetaCoeffs> {
    let idx = index_family(n)?;
    let mut coeffs = BTreeMap::new();
    for &r in &idx {
        for &s in &idx {
            let v = if r == s { r.twirl_weight() } else { Rat::zero() };
            coeffs.insert((r, s), v);
        }
    }
    ThetaCoeffs::new(n, coeffs)
}

/// Coefficients Θ_{rr'} of a doubly depolarized two-register operator,
/// Θ̃ = Σ Θ_{rr'} P_r ⊗ P_{r'} with all Θ_{rr'} ≥ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaCoeffs {
    n: usize,
    coeffs: BTreeMap<(GhzIndex, GhzIndex), Rat>,
}

impl ThetaCoeffs {
    pub fn new(n: usize, coeffs: BTreeMap<(GhzIndex, GhzIndex), Rat>) -> Result<Self> {
        let idx = index_family(n)?;
        for &r in &idx {
            for &s in &idx {
                match coeffs.get(&(r, s)) {
                    None => {
                        return Err(Error::Shape(format!(
                            "missing coefficient ({}, {})",
                            r.label(),
                            s.label()
                        )))
                    }
                    Some(v) if v < &Rat::zero() => {
                        return Err(Error::Domain(format!(
                            "coefficient ({}, {}) = {} is negative",
                            r.label(),
                            s.label(),
                            fmt_rat(v)
                        )))
                    }
                    _ => {}
                }
            }
        }
        if coeffs.len() != idx.len() * idx.len() {
            return Err(Error::Shape("stray coefficient outside the family".into()));
        }
        Ok(ThetaCoeffs { n, coeffs })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: GhzIndex, s: GhzIndex) -> &Rat {
        &self.coeffs[&(r, s)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(GhzIndex, GhzIndex), &Rat)> {
        self.coeffs.iter()
    }

    /// Σ Θ_{rr'} P_r ⊗ P_{r'} as an explicit matrix on 2N qubits.
    pub fn reconstruct(&self) -> Result<RMatrix> {
        let fam = projector_family(self.n)?;
        let d = 1usize << (2 * self.n);
        let mut acc = RMatrix::zeros(d, d);
        for ((r, s), v) in &self.coeffs {
            if !v.is_zero() {
                acc = &acc + &tensor(&fam[r], &fam[s]).scale(v);
            }
        }
        Ok(acc)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for ((r, s), v) in &self.coeffs {
            map.insert(format!("T({},{})", r.label(), s.label()), fmt_rat(v).into());
        }
        serde_json::json!({ "n": self.n, "coeffs": map })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("coeffs json: {e}")))?;
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("coeffs json: missing \"n\"".into()))? as usize;
        let obj = v
            .get("coeffs")
            .and_then(|x| x.as_object())
            .ok_or_else(|| Error::Parse("coeffs json: missing \"coeffs\" object".into()))?;
        let mut coeffs = BTreeMap::new();
        for (key, val) in obj {
            let inner = key
                .strip_prefix("T(")
                .and_then(|k| k.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad coefficient key {key:?}")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad coefficient key {key:?}")))?;
            let rs = (GhzIndex::parse(a)?, GhzIndex::parse(b)?);
            let sval = val
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient {key:?} is not a string")))?;
            coeffs.insert(rs, parse_rat(sval)?);
        }
        ThetaCoeffs::new(n, coeffs)
    }
}

/// Apply Δ⊗Δ to a two-register operator (N output qubits then N input
/// qubits) and read off the Θ_{rr'} coefficients.
pub fn sandwich_coeffs_from_theta(theta: &RMatrix, n: usize) -> Result<ThetaCoeffs> {
    let shape = SubsystemShape::qubits(2 * n);
    shape.check_matches(theta)?;
    let left: Vec<usize> = (0..n).collect();
    let right: Vec<usize> = (n..2 * n).collect();
    let sandwiched = delta_subset(theta, &shape, &[left, right])?;
    let fam = projector_family(n)?;
    let idx = index_family(n)?;
    let mut coeffs = BTreeMap::new();
    for &r in &idx {
        for &s in &idx {
            let probe = tensor(&fam[&r], &fam[&s]);
            let raw = probe.trace_product(&sandwiched);
            let norm = r.trace_square() * s.trace_square();
            coeffs.insert((r, s), raw / norm);
        }
    }
    let out = ThetaCoeffs::new(n, coeffs)?;
    // the family is Hilbert-Schmidt orthogonal, so this reconstruction is
    // exact whenever the sandwich really lies in the product span
    if out.reconstruct()? != sandwiched {
        return Err(Error::Domain(
            "sandwich does not lie in the projector-product span".into(),
        ));
    }
    Ok(out)
}

/// Coefficients of the depolarization sandwich Δ∘Ω∘Δ of a qubit map.
pub fn sandwich_coeffs(omega: &SeparableMap) -> Result<ThetaCoeffs> {
    let theta = jamiolkowski_state(omega)?;
    sandwich_coeffs_from_theta(&theta, omega.parties())
}

/// The protocol twirl as an explicit SeparableMap: every branch unitary is a
/// product of local σ_z^w σ_x^s factors. Branch weight 2^{-(2N-1)} is not a
/// rational square, so each branch appears twice with scalar 2^{-N} folded
/// into the first party: 2 · (2^{-N})² = 2^{-(2N-1)} exactly.
pub fn protocol_twirl_map(n: usize) -> Result<SeparableMap> {
    if n < 2 || n > 6 {
        return Err(Error::Domain(format!(
            "party count {n} out of range for the explicit twirl map"
        )));
    }
    let scale = pow2(-(n as i32));
    let local = |zbit: bool, s: bool| -> RMatrix {
        let mut m = RMatrix::zeros(2, 2);
        for j in 0..2usize {
            let i = if s { j ^ 1 } else { j };
            let neg = zbit && i == 1;
            m.set(i, j, if neg { -Rat::from_integer(1.into()) } else { Rat::from_integer(1.into()) });
        }
        m
    };
    let mut terms = Vec::new();
    for (w, s) in crate::depolarize::protocol_branches(n) {
        let mut term = Vec::with_capacity(n);
        for f in 0..n {
            let zbit = (w >> (n - 1 - f)) & 1 == 1;
            let mut m = local(zbit, s);
            if f == 0 {
                m = m.scale(&scale);
            }
            term.push(m);
        }
        terms.push(term.clone());
        terms.push(term);
    }
    SeparableMap::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depolarize::{delta_closed, delta_protocol};
    use crate::exactmat::{basis_matrix, partial_transpose, psd_check};
    use crate::qcore::{all_zero_state, family_member, ghz_projector};
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn identity_map(n: usize) -> SeparableMap {
        SeparableMap::new(vec![vec![RMatrix::identity(2); n]]).unwrap()
    }

    #[test]
    fn identity_map_is_identity() {
        let omega = identity_map(2);
        let rho = ghz_projector(2).unwrap();
        assert_eq!(apply_map(&omega, &rho).unwrap(), rho);
    }

    #[test]
    fn corner_extraction_from_ghz() {
        // single Kraus ⊗|0><0| halves the GHZ projector onto |0..0>
        let omega = SeparableMap::new(vec![vec![basis_matrix(2, 0, 0); 3]]).unwrap();
        let rho = ghz_projector(3).unwrap();
        let out = apply_map(&omega, &rho).unwrap();
        assert_eq!(out, all_zero_state(3).unwrap().scale(&rat(1, 2)));
    }

    #[test]
    fn two_term_map_matches_hand_expansion() {
        let a = RMatrix::from_fn(2, 2, |i, j| rat((i + j) as i64, 2));
        let b = RMatrix::from_fn(2, 2, |i, j| rat((2 * i + 3 * j + 1) as i64, 3));
        let c = RMatrix::from_fn(2, 2, |i, j| rat_int((i * j) as i64 + 1));
        let d = RMatrix::from_fn(2, 2, |i, j| rat(1, (i + j + 1) as i64));
        let omega = SeparableMap::new(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]])
            .unwrap();
        let rho = RMatrix::from_fn(4, 4, |i, j| rat((i * 4 + j) as i64 % 5, 6));
        let k1 = tensor(&a, &b);
        let k2 = tensor(&c, &d);
        let expect = &(&(&k1 * &rho) * &k1.transpose()) + &(&(&k2 * &rho) * &k2.transpose());
        assert_eq!(apply_map(&omega, &rho).unwrap(), expect);
    }

    #[test]
    fn jamiolkowski_of_identity_is_unnormalized_max_entangled() {
        let omega = identity_map(2);
        let theta = jamiolkowski_state(&omega).unwrap();
        // (Σ_b |bb>)(Σ_d <dd|)
        let v: Vec<Rat> = (0..16)
            .map(|i| if i % 5 == 0 { rat_int(1) } else { rat_int(0) })
            .collect();
        assert_eq!(theta, RMatrix::outer(&v, &v));
    }

    #[test]
    fn round_trip_reproduces_the_map() {
        let omega = SeparableMap::new(vec![
            vec![
                RMatrix::from_fn(2, 2, |i, j| rat((i + 2 * j) as i64, 3)),
                RMatrix::from_fn(2, 2, |i, j| rat_int((i as i64) - (j as i64))),
            ],
            vec![basis_matrix(2, 0, 1), basis_matrix(2, 1, 1)],
        ])
        .unwrap();
        let theta = jamiolkowski_state(&omega).unwrap();
        for seed in 0..5 {
            let z = RMatrix::from_fn(4, 4, |i, j| rat((i * 4 + j + seed) as i64 % 7 - 3, 2));
            assert_eq!(
                apply_theta(&theta, 4, &z).unwrap(),
                apply_map(&omega, &z).unwrap()
            );
        }
    }

    #[test]
    fn jamiolkowski_of_closed_form_depolarization_is_theta_sol() {
        for n in 2..=3 {
            let theta = jamiolkowski_of_map(1 << n, |e| delta_closed(e, n)).unwrap();
            assert_eq!(theta, theta_sol(n).unwrap());
        }
    }

    #[test]
    fn constant_preparation_round_trip() {
        // Ω(Z) = tr(Z) P_-  has Θ = P_- ⊗ 𝕀
        let n = 2;
        let pminus = family_member(n, GhzIndex::Minus).unwrap();
        let theta = jamiolkowski_of_map(1 << n, |e| Ok(pminus.scale(&e.trace()))).unwrap();
        assert_eq!(theta, tensor(&pminus, &RMatrix::identity(4)));
        for seed in 0..5 {
            let z = RMatrix::from_fn(4, 4, |i, j| rat((2 * i + j + seed) as i64 % 5 - 2, 3));
            assert_eq!(
                apply_theta(&theta, 4, &z).unwrap(),
                pminus.scale(&z.trace())
            );
        }
    }

    #[test]
    fn twirl_map_reproduces_protocol_exactly() {
        for n in 2..=3 {
            let omega = protocol_twirl_map(n).unwrap();
            assert_eq!(omega.terms().len(), 1 << (2 * n));
            let rho = RMatrix::from_fn(1 << n, 1 << n, |i, j| {
                rat((i * (1 << n) + j) as i64 % 7 - 3, 4)
            });
            let sym = &rho + &rho.transpose();
            assert_eq!(
                apply_map(&omega, &sym).unwrap(),
                delta_protocol(&sym, n).unwrap()
            );
        }
    }

    #[test]
    fn twirl_map_jamiolkowski_is_ppt_on_all_party_cuts() {
        // product-Kraus maps have (real-)separable duals, so every
        // party bipartition must pass the partial transpose test
        let n = 2;
        let theta = jamiolkowski_state(&protocol_twirl_map(n).unwrap()).unwrap();
        let shape = SubsystemShape::qubits(2 * n);
        for subset in [vec![0usize, 2], vec![1, 3]] {
            let pt = partial_transpose(&theta, &shape, &subset).unwrap();
            assert!(psd_check(&pt).unwrap().is_psd());
        }
    }

    #[test]
    fn sandwich_of_depolarization_is_solution_coeffs() {
        for n in 2..=3 {
            let theta = theta_sol(n).unwrap();
            let coeffs = sandwich_coeffs_from_theta(&theta, n).unwrap();
            assert_eq!(coeffs, theta_sol_coeffs(n).unwrap());
        }
    }

    #[test]
    fn sandwich_of_identity_channel_matches_depolarization() {
        let n = 2;
        let coeffs = sandwich_coeffs(&identity_map(n)).unwrap();
        assert_eq!(coeffs, theta_sol_coeffs(n).unwrap());
    }

    #[test]
    fn sandwich_of_all_zero_preparation_reconstructs() {
        // Ω(Z) = tr(Z)|0..0><0..0| as a product-Kraus list: |0..0><b|
        let n = 2;
        let d = 1usize << n;
        let mut terms = Vec::new();
        for b in 0..d {
            let mut term = Vec::new();
            for f in 0..n {
                term.push(basis_matrix(2, 0, (b >> (n - 1 - f)) & 1));
            }
            terms.push(term);
        }
        let omega = SeparableMap::new(terms).unwrap();
        let rho = RMatrix::from_fn(d, d, |i, j| rat((i + j) as i64, 5));
        assert_eq!(
            apply_map(&omega, &rho).unwrap(),
            all_zero_state(n).unwrap().scale(&rho.trace())
        );
        let coeffs = sandwich_coeffs(&omega).unwrap();
        let sandwiched = coeffs.reconstruct().unwrap();
        // reconstruction equality is already enforced inside; spot-check one
        // coefficient: Θ_id of the preparation is |0..0><0..0| ⊗ 𝕀, and
        // (Δ⊗Δ) sends it to (P_+ + P_-)/2 ⊗ (Σ_r-weighted identity image)
        assert_eq!(sandwiched.trace(), rat_int(d as i64));
        assert_eq!(coeffs.get(GhzIndex::Plus, GhzIndex::Plus), &rat(1, 2));
    }

    #[test]
    fn coeffs_json_round_trip() {
        let c = theta_sol_coeffs(3).unwrap();
        let s = c.to_json_value().to_string();
        assert_eq!(ThetaCoeffs::from_json(&s).unwrap(), c);
    }

    #[test]
    fn map_json_round_trip_and_validation() {
        let omega = protocol_twirl_map(2).unwrap();
        let s = omega.to_json_value().to_string();
        assert_eq!(SeparableMap::from_json(&s).unwrap(), omega);
        assert!(SeparableMap::from_json("{\"n\":1,\"terms\":[]}").is_err());
        // ragged local dimensions rejected
        let bad = r#"{"n":1,"terms":[[{"rows":2,"cols":2,"entries":[["1","0"],["0","1"]]}],[{"rows":2,"cols":1,"entries":[["1"],["0"]]}]]}"#;
        assert!(SeparableMap::from_json(bad).is_err());
    }

    #[test]
    fn negative_coefficients_are_rejected() {
        let n = 2;
        let mut coeffs = BTreeMap::new();
        for &r in &index_family(n).unwrap() {
            for &s in &index_family(n).unwrap() {
                coeffs.insert((r, s), rat_int(0));
            }
        }
        coeffs.insert((GhzIndex::Plus, GhzIndex::Minus), rat_int(-1));
        assert!(ThetaCoeffs::new(n, coeffs).is_err());
    }

    prop_compose! {
        fn arb_local()(vals in proptest::collection::vec(-3i64..=3, 4)) -> RMatrix {
            RMatrix::from_fn(2, 2, |i, j| rat_int(vals[2 * i + j]))
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn jamiolkowski_is_psd_and_round_trips(
            t1 in proptest::collection::vec(arb_local(), 2),
            t2 in proptest::collection::vec(arb_local(), 2),
        ) {
            let omega = SeparableMap::new(vec![t1, t2]).unwrap();
            let theta = jamiolkowski_state(&omega).unwrap();
            prop_assert!(psd_check(&theta).unwrap().is_psd());
            let z = RMatrix::from_fn(4, 4, |i, j| rat((3 * i + j) as i64 % 4 - 1, 2));
            prop_assert_eq!(
                apply_theta(&theta, 4, &z).unwrap(),
                apply_map(&omega, &z).unwrap()
            );
        }

        #[test]
        fn product_kraus_duals_pass_all_partial_transposes(
            t1 in proptest::collection::vec(arb_local(), 2),
        ) {
            let omega = SeparableMap::new(vec![t1]).unwrap();
            let theta = jamiolkowski_state(&omega).unwrap();
            let shape = SubsystemShape::qubits(4);
            for subset in [vec![0usize, 2], vec![1, 3]] {
                let pt = partial_transpose(&theta, &shape, &subset).unwrap();
                prop_assert!(psd_check(&pt).unwrap().is_psd());
            }
        }
    }
}
