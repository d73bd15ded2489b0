//! The two structural results behind the distillation bound, verified at
//! desk scale.
//!
//! Lemma-1 pipeline: the full inequality system over the T(r,s) variables
//! (non-negativity + partial-transpose families + three detection rows),
//! its symmetry reduction to 10 unknowns, uniqueness of the canonical point
//! for λ > 1/2, and the cone of solutions at λ = 1/2.
//!
//! The detection rows come from the feasibility condition for the map dual
//! and read, in ≤ 0 form,
//!   ku1:    λ·Σ_r T(+,r) - T(+,+) + 1 - λ ≤ 0
//!   ku2:    λ·Σ_r T(-,r) - T(-,+)     - λ ≤ 0
//!   ku3(x): λ·Σ_r T(x,r) - T(x,+)   - 2λ ≤ 0
//! Note the +1-λ constant in ku1: it makes ku1 the reduction-consistent
//! partner of the reduced row b1, and all three rows hold with equality at
//! the canonical solution point.
//!
//! Lemma-2 pipeline: sandwiching a generic map between depolarizations and
//! extracting the per-index blocks σ_r, whose equality is the lemma's
//! conclusion trigger.

use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::channels::{apply_map, apply_theta, SeparableMap, ThetaCoeffs};
use crate::depolarize::{delta_closed, delta_subset};
use crate::error::{Error, Result};
use crate::exactmat::{
    partial_trace, permute_factors, psd_check, tensor, RMatrix, SubsystemShape,
};
use crate::pptgen::{
    ppt_system, theta_var, theta_variables, LinearInequality, LinearSystem, Provenance,
};
use crate::polylp::{
    enumerate_polyhedron, farkas_combination, FarkasCertificate, Polyhedron,
};
use crate::qcore::{check_parties, ghz_projector, index_family, projector_family, GhzIndex};
use crate::rat::{fmt_rat, rat, Rat};

/// Rational λ restricted to [1/2, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaParam(Rat);

impl LambdaParam {
    pub fn new(value: Rat) -> Result<Self> {
        let half = rat(1, 2);
        if value < half || value >= Rat::one() {
            return Err(Error::Domain(format!(
                "lambda = {} outside [1/2, 1)",
                fmt_rat(&value)
            )));
        }
        Ok(LambdaParam(value))
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn is_half(&self) -> bool {
        self.0 == rat(1, 2)
    }
}

/// g = 2^(n-1) - 1, the number of even strings other than a fixed one plus
/// one; equivalently the size of the even index class.
pub fn g_coefficient(n: usize) -> Result<Rat> {
    check_parties(n)?;
    Ok(Rat::from_integer(((1u64 << (n - 1)) - 1).into()))
}

fn ku_rows(n: usize, lambda: &LambdaParam) -> Result<Vec<LinearInequality>> {
    let idx = index_family(n)?;
    let l = lambda.value().clone();
    let mut rows = Vec::new();
    let mut mk = |label: String, lead: GhzIndex, constant: Rat| {
        let mut coeffs = BTreeMap::new();
        for &s in &idx {
            *coeffs.entry(theta_var(lead, s)).or_insert_with(Rat::zero) += &l;
        }
        *coeffs
            .entry(theta_var(lead, GhzIndex::Plus))
            .or_insert_with(Rat::zero) -= Rat::one();
        rows.push(LinearInequality::new(label, Provenance::Lemma1, coeffs, constant));
    };
    mk("ku1".into(), GhzIndex::Plus, Rat::one() - &l);
    mk("ku2".into(), GhzIndex::Minus, -l.clone());
    for &r in &idx {
        if let GhzIndex::Even(x) = r {
            mk(format!("ku3({x})"), r, -(&l * Rat::from_integer(2.into())));
        }
    }
    Ok(rows)
}

/// Full system over all T(r,s): non-negativity of every variable, the
/// partial-transpose families, and the detection rows.
pub fn lemma1_full_system(n: usize, lambda: &LambdaParam) -> Result<LinearSystem> {
    let mut sys = LinearSystem::new(theta_variables(n)?)?;
    for v in theta_variables(n)? {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.clone(), -Rat::one());
        sys.push(LinearInequality::new(
            format!("nonneg[{v}]"),
            Provenance::Positivity,
            coeffs,
            Rat::zero(),
        ))?;
    }
    for row in ppt_system(n)?.rows() {
        sys.push(row.clone())?;
    }
    for row in ku_rows(n, lambda)? {
        sys.push(row)?;
    }
    Ok(sys)
}

/// Average over all permutations of the even index class (the + and -
/// indices stay fixed). The result depends only on orbit data: row index
/// class, column index class, and diagonal versus off-diagonal even pairs.
pub fn group_average(coeffs: &ThetaCoeffs) -> Result<ThetaCoeffs> {
    let n = coeffs.parties();
    let idx = index_family(n)?;
    let evens: Vec<GhzIndex> = idx
        .iter()
        .copied()
        .filter(|r| matches!(r, GhzIndex::Even(_)))
        .collect();
    let mean = |vals: Vec<&Rat>| -> Rat {
        let mut s = Rat::zero();
        let count = Rat::from_integer((vals.len() as u64).into());
        for v in vals {
            s += v;
        }
        s / count
    };
    let signs = [GhzIndex::Plus, GhzIndex::Minus];
    let mut out = BTreeMap::new();
    for &r in &signs {
        for &s in &signs {
            out.insert((r, s), coeffs.get(r, s).clone());
        }
        let row_mean = mean(evens.iter().map(|&x| coeffs.get(r, x)).collect());
        let col_mean = mean(evens.iter().map(|&x| coeffs.get(x, r)).collect());
        for &x in &evens {
            out.insert((r, x), row_mean.clone());
            out.insert((x, r), col_mean.clone());
        }
    }
    let diag_mean = mean(evens.iter().map(|&x| coeffs.get(x, x)).collect());
    for &x in &evens {
        out.insert((x, x), diag_mean.clone());
    }
    if evens.len() >= 2 {
        let mut offs = Vec::new();
        for &x in &evens {
            for &y in &evens {
                if x != y {
                    offs.push(coeffs.get(x, y));
                }
            }
        }
        let off_mean = mean(offs);
        for &x in &evens {
            for &y in &evens {
                if x != y {
                    out.insert((x, y), off_mean.clone());
                }
            }
        }
    }
    ThetaCoeffs::new(n, out)
}

/// Variable order of the 10-unknown reduced system. The labels reuse the
/// representative pairs (+,±), (±,2), (2,±), (2,2) and the off-diagonal
/// representative (2,4); the last one indexes the inter-pair orbit even
/// when n = 2 leaves it unconstrained.
pub fn reduced_variables() -> Vec<String> {
    [
        "T(+,+)",
        "T(+,-)",
        "T(-,+)",
        "T(-,-)",
        "T(+,2)",
        "T(-,2)",
        "T(2,+)",
        "T(2,-)",
        "T(2,2)",
        "T(2,4)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Orbit representative of a full variable pair.
fn reduced_var_of(r: GhzIndex, s: GhzIndex) -> &'static str {
    use GhzIndex::{Even, Minus, Plus};
    match (r, s) {
        (Plus, Plus) => "T(+,+)",
        (Plus, Minus) => "T(+,-)",
        (Minus, Plus) => "T(-,+)",
        (Minus, Minus) => "T(-,-)",
        (Plus, Even(_)) => "T(+,2)",
        (Minus, Even(_)) => "T(-,2)",
        (Even(_), Plus) => "T(2,+)",
        (Even(_), Minus) => "T(2,-)",
        (Even(x), Even(y)) if x == y => "T(2,2)",
        (Even(_), Even(_)) => "T(2,4)",
    }
}

/// Restrict a full-system inequality to invariant coefficient matrices:
/// each reduced variable collects the sum of its orbit's coefficients.
pub fn reduce_inequality(n: usize, row: &LinearInequality) -> Result<LinearInequality> {
    let idx = index_family(n)?;
    let mut coeffs: BTreeMap<String, Rat> = BTreeMap::new();
    let mut seen = BTreeMap::new();
    for &r in &idx {
        for &s in &idx {
            seen.insert(theta_var(r, s), reduced_var_of(r, s));
        }
    }
    for (v, c) in &row.coeffs {
        let target = seen
            .get(v)
            .ok_or_else(|| Error::Shape(format!("variable {v:?} outside the family")))?;
        *coeffs.entry(target.to_string()).or_insert_with(Rat::zero) += c;
    }
    Ok(LinearInequality::new(
        row.label.clone(),
        row.provenance,
        coeffs,
        row.constant.clone(),
    ))
}

/// The 10-variable reduced system: 10 non-negativity rows, the reduced
/// partial-transpose families (C/D exist only when a second even string
/// does, n ≥ 3), and the three detection rows b1, b2, b3 with the g
/// coefficient substituted. Row count is 21 for n = 2 and 25 for n ≥ 3;
/// the quoted figure of 25 counts the C/D family as always present.
pub fn reduced_system(n: usize, lambda: &LambdaParam) -> Result<LinearSystem> {
    check_parties(n)?;
    let vars = reduced_variables();
    let g = g_coefficient(n)?;
    let l = lambda.value().clone();
    let mut sys = LinearSystem::new(vars.clone())?;
    for v in &vars {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.clone(), -Rat::one());
        sys.push(LinearInequality::new(
            format!("nonneg[{v}]"),
            Provenance::Positivity,
            coeffs,
            Rat::zero(),
        ))?;
    }
    let one = Rat::one;
    let row = |label: &str, entries: &[(&str, Rat)], constant: Rat| {
        let mut coeffs = BTreeMap::new();
        for (v, c) in entries {
            *coeffs.entry(v.to_string()).or_insert_with(Rat::zero) += c;
        }
        LinearInequality::new(label, Provenance::Reduced, coeffs, constant)
    };
    for (s, tag) in [(one(), "+"), (-one(), "-")] {
        // |T(+,+)-T(+,-)+T(-,+)-T(-,-)| ≤ T(+,2)+T(-,2)
        sys.push(row(
            &format!("red-A{tag}"),
            &[
                ("T(+,+)", s.clone()),
                ("T(+,-)", -s.clone()),
                ("T(-,+)", s.clone()),
                ("T(-,-)", -s.clone()),
                ("T(+,2)", -one()),
                ("T(-,2)", -one()),
            ],
            Rat::zero(),
        ))?;
        // |T(+,+)+T(+,-)-T(-,+)-T(-,-)| ≤ T(2,+)+T(2,-)
        sys.push(row(
            &format!("red-B{tag}"),
            &[
                ("T(+,+)", s.clone()),
                ("T(+,-)", s.clone()),
                ("T(-,+)", -s.clone()),
                ("T(-,-)", -s.clone()),
                ("T(2,+)", -one()),
                ("T(2,-)", -one()),
            ],
            Rat::zero(),
        ))?;
        if n >= 3 {
            // |T(+,2)-T(-,2)| ≤ T(2,4) and |T(2,+)-T(2,-)| ≤ T(2,4)
            sys.push(row(
                &format!("red-C{tag}"),
                &[
                    ("T(+,2)", s.clone()),
                    ("T(-,2)", -s.clone()),
                    ("T(2,4)", -one()),
                ],
                Rat::zero(),
            ))?;
            sys.push(row(
                &format!("red-D{tag}"),
                &[
                    ("T(2,+)", s.clone()),
                    ("T(2,-)", -s.clone()),
                    ("T(2,4)", -one()),
                ],
                Rat::zero(),
            ))?;
        }
        // |A+B| ≤ C+D and |A-B| ≤ C-D with A = T(+,2)-T(-,2),
        // B = T(2,+)-T(2,-), C = T(2,2), D = T(+,+)-T(+,-)-T(-,+)+T(-,-)
        for (family, b_sign, d_sign) in [("E", one(), -one()), ("F", -one(), one())] {
            sys.push(row(
                &format!("red-{family}{tag}"),
                &[
                    ("T(+,2)", s.clone()),
                    ("T(-,2)", -s.clone()),
                    ("T(2,+)", &s * &b_sign),
                    ("T(2,-)", -(&s * &b_sign)),
                    ("T(2,2)", -one()),
                    ("T(+,+)", d_sign.clone()),
                    ("T(+,-)", -d_sign.clone()),
                    ("T(-,+)", -d_sign.clone()),
                    ("T(-,-)", d_sign.clone()),
                ],
                Rat::zero(),
            ))?;
        }
    }
    // detection rows with orbit multiplicities g and g-1 substituted
    sys.push(row(
        "b1",
        &[
            ("T(+,+)", &l - &one()),
            ("T(+,-)", l.clone()),
            ("T(+,2)", &l * &g),
        ],
        Rat::one() - &l,
    ))?;
    sys.push(row(
        "b2",
        &[
            ("T(-,+)", &l - &one()),
            ("T(-,-)", l.clone()),
            ("T(-,2)", &l * &g),
        ],
        -l.clone(),
    ))?;
    sys.push(row(
        "b3",
        &[
            ("T(2,+)", &l - &one()),
            ("T(2,-)", l.clone()),
            ("T(2,2)", l.clone()),
            ("T(2,4)", &l * &(&g - &one())),
        ],
        -(&l * Rat::from_integer(2.into())),
    ))?;
    Ok(sys)
}

/// Reduced system plus the pin T(2,4) ≤ 0 at n = 2, where that variable
/// indexes an orbit with no members and would otherwise float free. For
/// n ≥ 3 this is exactly `reduced_system`.
pub fn reduced_system_pinned(n: usize, lambda: &LambdaParam) -> Result<LinearSystem> {
    let mut sys = reduced_system(n, lambda)?;
    if n == 2 {
        let mut coeffs = BTreeMap::new();
        coeffs.insert("T(2,4)".to_string(), Rat::one());
        sys.push(LinearInequality::new(
            "pin-m",
            Provenance::Reduced,
            coeffs,
            Rat::zero(),
        ))?;
    }
    Ok(sys)
}

/// The canonical solution in reduced coordinates.
pub fn theta_sol_reduced() -> Vec<Rat> {
    [1, 0, 0, 1, 0, 0, 0, 0, 2, 0]
        .iter()
        .map(|&v| Rat::from_integer(v.into()))
        .collect()
}

/// Invariant embedding of a reduced point into full coefficients.
pub fn embed_reduced(n: usize, point: &[Rat]) -> Result<ThetaCoeffs> {
    let vars = reduced_variables();
    if point.len() != vars.len() {
        return Err(Error::Shape(format!(
            "reduced point has {} coordinates, expected {}",
            point.len(),
            vars.len()
        )));
    }
    let lookup: BTreeMap<&str, &Rat> = vars
        .iter()
        .map(String::as_str)
        .zip(point.iter())
        .collect();
    let idx = index_family(n)?;
    let mut out = BTreeMap::new();
    for &r in &idx {
        for &s in &idx {
            out.insert((r, s), (*lookup[reduced_var_of(r, s)]).clone());
        }
    }
    ThetaCoeffs::new(n, out)
}

/// The 20 bounding inequalities that pin every reduced coordinate to its
/// value at the canonical solution: lower and upper bound per variable.
pub fn bounding_targets() -> Vec<LinearInequality> {
    let vars = reduced_variables();
    let sol = theta_sol_reduced();
    let mut out = Vec::new();
    for (v, s) in vars.iter().zip(&sol) {
        let mut lo = BTreeMap::new();
        lo.insert(v.clone(), -Rat::one());
        out.push(LinearInequality::new(
            format!("lb[{v}]"),
            Provenance::Reduced,
            lo,
            s.clone(),
        ));
        let mut hi = BTreeMap::new();
        hi.insert(v.clone(), Rat::one());
        out.push(LinearInequality::new(
            format!("ub[{v}]"),
            Provenance::Reduced,
            hi,
            -s.clone(),
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub n: usize,
    pub lambda: Rat,
    pub polyhedron: Polyhedron,
    pub enumeration_unique: bool,
    pub certificates: Vec<(String, Option<FarkasCertificate>)>,
    pub certificates_complete: bool,
    pub pass: bool,
}

impl UniquenessReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let certs: Vec<serde_json::Value> = self
            .certificates
            .iter()
            .map(|(label, c)| match c {
                Some(cert) => serde_json::json!({
                    "target": label,
                    "found": true,
                    "certificate": cert.to_json_value(),
                }),
                None => serde_json::json!({ "target": label, "found": false }),
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "lambda": fmt_rat(&self.lambda),
            "polyhedron": self.polyhedron.to_json_value(),
            "enumeration_unique": self.enumeration_unique,
            "certificates_complete": self.certificates_complete,
            "certificates": certs,
            "pass": self.pass,
        })
    }
}

/// Uniqueness of the canonical point for λ > 1/2, by two independent
/// routes: full vertex/ray enumeration of the reduced system, and Farkas
/// certificates for all 20 bounding inequalities. PASS requires both.
pub fn verify_unique_solution(n: usize, lambda: &LambdaParam) -> Result<UniquenessReport> {
    if lambda.is_half() {
        return Err(Error::Domain(
            "lambda = 1/2 describes a cone, not a point; routed to half_lambda_cone instead"
                .into(),
        ));
    }
    let sys = reduced_system(n, lambda)?;
    let poly = enumerate_polyhedron(&sys)?;
    let enumeration_unique = poly.vertices == vec![theta_sol_reduced()]
        && poly.rays.is_empty()
        && poly.lineality.is_empty();
    let mut certificates = Vec::new();
    let mut complete = true;
    for target in bounding_targets() {
        let found = farkas_combination(&target, &sys)?;
        complete &= found.is_some();
        certificates.push((target.label.clone(), found));
    }
    Ok(UniquenessReport {
        n,
        lambda: lambda.value().clone(),
        polyhedron: poly,
        enumeration_unique,
        certificates,
        certificates_complete: complete,
        pass: enumeration_unique && complete,
    })
}

/// Reduced images of the claimed cone generators P_r ⊗ (P_+ + P_-): the
/// three classes (+ row, - row, even row), primitive-scaled.
pub fn claimed_cone_rays() -> Vec<Vec<Rat>> {
    let mk = |pairs: &[&str]| -> Vec<Rat> {
        reduced_variables()
            .iter()
            .map(|v| {
                if pairs.contains(&v.as_str()) {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect()
    };
    let mut rays = vec![
        mk(&["T(+,+)", "T(+,-)"]),
        mk(&["T(-,+)", "T(-,-)"]),
        mk(&["T(2,+)", "T(2,-)"]),
    ];
    rays.sort();
    rays
}

#[derive(Clone, Debug)]
pub struct ConeReport {
    pub n: usize,
    pub polyhedron: Polyhedron,
    pub vertex_is_sol_only: bool,
    pub rays_match_claimed: bool,
    pub fixed_output_vertices_ok: bool,
    pub fixed_output_rays_ok: bool,
    pub pass: bool,
}

impl ConeReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "lambda": "1/2",
            "polyhedron": self.polyhedron.to_json_value(),
            "vertex_is_sol_only": self.vertex_is_sol_only,
            "rays_match_claimed": self.rays_match_claimed,
            "fixed_output_vertices_ok": self.fixed_output_vertices_ok,
            "fixed_output_rays_ok": self.fixed_output_rays_ok,
            "pass": self.pass,
        })
    }
}

/// Apply the map dual to an embedded reduced point to the operator
/// w = 𝕀/2 - Φ and return the result.
fn cone_element_output(n: usize, point: &[Rat]) -> Result<RMatrix> {
    let coeffs = embed_reduced(n, point)?;
    let theta = coeffs.reconstruct()?;
    let d = 1usize << n;
    let w = &RMatrix::identity(d).scale(&rat(1, 2)) - &ghz_projector(n)?;
    apply_theta(&theta, d, &w)
}

/// Enumerate the λ = 1/2 reduced system and check the claimed structure:
/// vertex at the canonical point, rays spanning the three generator
/// classes, and the fixed-output property (vertices map 𝕀/2 - Φ to itself,
/// rays map it to zero).
pub fn half_lambda_cone(n: usize) -> Result<ConeReport> {
    let lambda = LambdaParam::new(rat(1, 2))?;
    let sys = reduced_system(n, &lambda)?;
    let poly = enumerate_polyhedron(&sys)?;
    let vertex_is_sol_only = poly.vertices == vec![theta_sol_reduced()];
    let rays_match_claimed = poly.rays == claimed_cone_rays();
    let d = 1usize << n;
    let w = &RMatrix::identity(d).scale(&rat(1, 2)) - &ghz_projector(n)?;
    let mut fixed_output_vertices_ok = true;
    for v in &poly.vertices {
        fixed_output_vertices_ok &= cone_element_output(n, v)? == w;
    }
    let mut fixed_output_rays_ok = true;
    for r in &poly.rays {
        fixed_output_rays_ok &= cone_element_output(n, r)?.is_zero_matrix();
    }
    let pass = vertex_is_sol_only
        && rays_match_claimed
        && fixed_output_vertices_ok
        && fixed_output_rays_ok;
    Ok(ConeReport {
        n,
        polyhedron: poly,
        vertex_is_sol_only,
        rays_match_claimed,
        fixed_output_vertices_ok,
        fixed_output_rays_ok,
        pass,
    })
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub n: usize,
    pub lambda: Rat,
    pub sigmas: Vec<(GhzIndex, RMatrix)>,
    pub all_equal: bool,
    pub all_psd: bool,
    pub traces: Vec<(GhzIndex, Rat)>,
    pub pass: bool,
}

impl DecompositionReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let traces: serde_json::Map<String, serde_json::Value> = self
            .traces
            .iter()
            .map(|(r, t)| (r.label(), fmt_rat(t).into()))
            .collect();
        let sigmas: serde_json::Map<String, serde_json::Value> = self
            .sigmas
            .iter()
            .map(|(r, m)| (r.label(), m.to_json_value()))
            .collect();
        serde_json::json!({
            "n": self.n,
            "lambda": fmt_rat(&self.lambda),
            "all_equal": self.all_equal,
            "all_psd": self.all_psd,
            "traces": traces,
            "sigmas": sigmas,
            "pass": self.pass,
        })
    }
}

/// Sandwich a map Ω: 𝒦-operators → (ℋ⊗𝒦)-operators between input and
/// output depolarizations, apply it to λ𝕀 - Φ, and extract the blocks:
///
///   [(𝕀_ℋ ⊗ Δ_𝒦) ∘ Ω ∘ Δ](λ𝕀-Φ) = (λ-1)σ_+⊗P_+ + λσ_-⊗P_- + 2λΣ_x σ_x⊗P_x
///
/// The report carries every σ_r, whether they are all equal (the product
/// form trigger), their positivity, and their traces. Party p of Ω must
/// output ℋ_p ⊗ 𝒦_p with dim ℋ_p ≥ 2 first and the qubit second.
pub fn lemma2_decompose(
    omega: &SeparableMap,
    lambda: &LambdaParam,
) -> Result<DecompositionReport> {
    let n = omega.parties();
    check_parties(n)?;
    if omega.input_dims().iter().any(|&d| d != 2) {
        return Err(Error::Shape("map input must be one qubit per party".into()));
    }
    let mut h_dims = Vec::with_capacity(n);
    for (p, &d) in omega.output_dims().iter().enumerate() {
        if d % 2 != 0 || d < 4 {
            return Err(Error::Shape(format!(
                "party {p} output dim {d} is not a (≥2)-dimensional block times a qubit"
            )));
        }
        h_dims.push(d / 2);
    }
    let dn = 1usize << n;
    let l = lambda.value();
    let w = &RMatrix::identity(dn).scale(l) - &ghz_projector(n)?;
    let x = apply_map(omega, &delta_closed(&w, n)?)?;
    // regroup party-local ℋ_p⊗𝒦_p factors into global ℋ ⊗ 𝒦
    let mut interleaved = Vec::with_capacity(2 * n);
    for &h in &h_dims {
        interleaved.push(h);
        interleaved.push(2);
    }
    let shape_in = SubsystemShape::new(interleaved)?;
    let perm: Vec<usize> = (0..n).map(|p| 2 * p).chain((0..n).map(|p| 2 * p + 1)).collect();
    let x = permute_factors(&x, &shape_in, &perm)?;
    let mut grouped = h_dims.clone();
    grouped.extend(std::iter::repeat(2).take(n));
    let shape = SubsystemShape::new(grouped)?;
    let k_factors: Vec<usize> = (n..2 * n).collect();
    let y = delta_subset(&x, &shape, &[k_factors])?;
    let dh: usize = h_dims.iter().product();
    let fam = projector_family(n)?;
    let mut sigmas = Vec::new();
    let mut recon = RMatrix::zeros(dh * dn, dh * dn);
    for (&r, p) in &fam {
        let contraction =
            partial_trace(&(&y * &tensor(&RMatrix::identity(dh), p)), &SubsystemShape::new(vec![dh, dn])?, &[0])?;
        let scale = match r {
            GhzIndex::Plus => l - Rat::one(),
            _ => l.clone(),
        };
        let sigma = contraction.scale(&scale.recip());
        let weight = match r {
            GhzIndex::Even(_) => Rat::from_integer(2.into()) * &scale,
            _ => scale.clone(),
        };
        recon = &recon + &tensor(&sigma, p).scale(&weight);
        sigmas.push((r, sigma));
    }
    if recon != y {
        return Err(Error::Domain(
            "internal: block reconstruction does not reproduce the sandwich".into(),
        ));
    }
    let all_equal = sigmas.windows(2).all(|w| w[0].1 == w[1].1);
    let mut all_psd = true;
    let mut traces = Vec::new();
    for (r, s) in &sigmas {
        all_psd &= psd_check(s)?.is_psd();
        traces.push((*r, s.trace()));
    }
    Ok(DecompositionReport {
        n,
        lambda: l.clone(),
        sigmas,
        all_equal,
        all_psd,
        traces,
        pass: all_equal && all_psd,
    })
}
