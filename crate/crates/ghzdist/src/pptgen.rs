//! Linear inequality systems over the coefficient variables T(r,s), and the
//! symbolic partial-transpose positivity conditions for two-register
//! operators Σ T(r,s) P_r ⊗ P_s, cross-checked against explicit PSD tests.
//!
//! Conditions are organized in six families per transposed party subset S,
//! written through the even string x_S carrying ones exactly on S. With
//!   arg_A = T(+,+) - T(+,-) + T(-,+) - T(-,-)
//!   arg_B = T(+,+) + T(+,-) - T(-,+) - T(-,-)
//!   A = T(+,x_S) - T(-,x_S),  B = T(x_S,+) - T(x_S,-),
//!   C = T(x_S,x_S),           D = T(+,+) - T(+,-) - T(-,+) + T(-,-)
//! the families are
//!   ppt-A: |arg_A| ≤ T(+,x_S) + T(-,x_S)
//!   ppt-B: |arg_B| ≤ T(x_S,+) + T(x_S,-)
//!   ppt-C: |T(+,x) - T(-,x)| ≤ T(x_S,x)   for every even x ≠ x_S
//!   ppt-D: |T(x,+) - T(x,-)| ≤ T(x,x_S)   for every even x ≠ x_S
//!   ppt-E: |A + B| ≤ C + D
//!   ppt-F: |A - B| ≤ C - D
//! Each absolute value is stored as its two plain halves, suffixed + and -.
//! Given non-negative coefficients these are equivalent to positivity of the
//! partial transposes; `ppt_crosscheck` verifies that equivalence instance
//! by instance against `psd_check`.

use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

use crate::channels::ThetaCoeffs;
use crate::error::{Error, Result};
use crate::exactmat::{partial_transpose, psd_check, SubsystemShape};
use crate::qcore::{check_parties, index_family, GhzIndex};
use crate::rat::{fmt_rat, parse_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Positivity,
    Ppt,
    Lemma1,
    Reduced,
    External,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Positivity => "positivity",
            Provenance::Ppt => "ppt",
            Provenance::Lemma1 => "lemma1",
            Provenance::Reduced => "reduced",
            Provenance::External => "external",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "positivity" => Provenance::Positivity,
            "ppt" => Provenance::Ppt,
            "lemma1" => Provenance::Lemma1,
            "reduced" => Provenance::Reduced,
            "external" => Provenance::External,
            other => return Err(Error::Parse(format!("unknown provenance tag {other:?}"))),
        })
    }
}

/// One inequality Σ coeffs[v]·v + constant ≤ 0. Zero coefficients are not
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearInequality {
    pub label: String,
    pub provenance: Provenance,
    pub coeffs: BTreeMap<String, Rat>,
    pub constant: Rat,
}

impl LinearInequality {
    pub fn new(
        label: impl Into<String>,
        provenance: Provenance,
        coeffs: BTreeMap<String, Rat>,
        constant: Rat,
    ) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        LinearInequality {
            label: label.into(),
            provenance,
            coeffs,
            constant,
        }
    }

    /// Left-hand side value at a point given as a map; absent variables
    /// count as zero.
    pub fn value_at(&self, point: &BTreeMap<String, Rat>) -> Rat {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            if let Some(x) = point.get(v) {
                acc += c * x;
            }
        }
        acc
    }

    pub fn satisfied_at(&self, point: &BTreeMap<String, Rat>) -> bool {
        !self.value_at(point).is_positive()
    }
}

/// An ordered variable universe plus inequalities over it. Rows are stored
/// canonically scaled (divided by the absolute value of the leading nonzero
/// coefficient, constant last) and exact duplicates are dropped on push.
/// Scaling never flips signs, so each stored row is the pushed half-space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    inequalities: Vec<LinearInequality>,
    seen: BTreeSet<(Vec<Rat>, Rat)>,
}

impl LinearSystem {
    pub fn new(variables: Vec<String>) -> Result<Self> {
        let distinct: BTreeSet<&String> = variables.iter().collect();
        if distinct.len() != variables.len() {
            return Err(Error::Shape("duplicate variable name".into()));
        }
        Ok(LinearSystem {
            variables,
            inequalities: Vec::new(),
            seen: BTreeSet::new(),
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.inequalities
    }

    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    /// Insert after canonical scaling; returns false when the row is a
    /// duplicate of one already present.
    pub fn push(&mut self, ineq: LinearInequality) -> Result<bool> {
        for v in ineq.coeffs.keys() {
            if self.var_index(v).is_none() {
                return Err(Error::Shape(format!("unknown variable {v:?}")));
            }
        }
        let mut dense: Vec<Rat> = self
            .variables
            .iter()
            .map(|v| ineq.coeffs.get(v).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let mut constant = ineq.constant.clone();
        let lead = dense
            .iter()
            .find(|c| !c.is_zero())
            .cloned()
            .or_else(|| (!constant.is_zero()).then(|| constant.clone()));
        if let Some(l) = lead {
            let s = l.abs().recip();
            for c in dense.iter_mut() {
                *c *= &s;
            }
            constant *= &s;
        }
        let key = (dense.clone(), constant.clone());
        if !self.seen.insert(key) {
            return Ok(false);
        }
        let coeffs: BTreeMap<String, Rat> = self
            .variables
            .iter()
            .zip(dense)
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v.clone(), c))
            .collect();
        self.inequalities.push(LinearInequality {
            label: ineq.label,
            provenance: ineq.provenance,
            coeffs,
            constant,
        });
        Ok(true)
    }

    /// Rows as (coefficient vector in variable order, constant).
    pub fn dense_rows(&self) -> Vec<(Vec<Rat>, Rat)> {
        self.inequalities
            .iter()
            .map(|q| {
                let row: Vec<Rat> = self
                    .variables
                    .iter()
                    .map(|v| q.coeffs.get(v).cloned().unwrap_or_else(Rat::zero))
                    .collect();
                (row, q.constant.clone())
            })
            .collect()
    }

    /// Left-hand side values at a dense point (same order as variables).
    pub fn values_at(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.variables.len() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, system has {} variables",
                x.len(),
                self.variables.len()
            )));
        }
        Ok(self
            .inequalities
            .iter()
            .map(|q| {
                let mut acc = q.constant.clone();
                for (v, c) in &q.coeffs {
                    let i = self.var_index(v).expect("validated on push");
                    if !x[i].is_zero() {
                        acc += c * &x[i];
                    }
                }
                acc
            })
            .collect())
    }

    /// Labels of rows violated at the point.
    pub fn violations_at(&self, x: &[Rat]) -> Result<Vec<String>> {
        Ok(self
            .values_at(x)?
            .into_iter()
            .zip(&self.inequalities)
            .filter(|(v, _)| v.is_positive())
            .map(|(_, q)| q.label.clone())
            .collect())
    }

    pub fn satisfied_at(&self, x: &[Rat]) -> Result<bool> {
        Ok(self.violations_at(x)?.is_empty())
    }

    /// Plain-text H-form: a `vars` header, then one row per line as
    /// "constant a1 a2 ... <= 0". Labels and provenance are not carried;
    /// use the JSON form to keep them.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# rows mean: constant + coefficients . variables <= 0\n");
        out.push_str("vars");
        for v in &self.variables {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for (row, c) in self.dense_rows() {
            out.push_str(&fmt_rat(&c));
            for a in &row {
                out.push(' ');
                out.push_str(&fmt_rat(a));
            }
            out.push_str(" <= 0\n");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty system text".into()))?;
        let mut head_tokens = header.split_whitespace();
        if head_tokens.next() != Some("vars") {
            return Err(Error::Parse("first line must start with \"vars\"".into()));
        }
        let variables: Vec<String> = head_tokens.map(str::to_string).collect();
        let mut sys = LinearSystem::new(variables)?;
        for (k, line) in lines.enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != sys.variables.len() + 3
                || toks[toks.len() - 2] != "<="
                || toks[toks.len() - 1] != "0"
            {
                return Err(Error::Parse(format!(
                    "row {} must be \"constant {} coefficients <= 0\"",
                    k + 1,
                    sys.variables.len()
                )));
            }
            let constant = parse_rat(toks[0])?;
            let mut coeffs = BTreeMap::new();
            for (v, t) in sys.variables.clone().iter().zip(&toks[1..toks.len() - 2]) {
                coeffs.insert(v.clone(), parse_rat(t)?);
            }
            sys.push(LinearInequality::new(
                format!("row{}", k + 1),
                Provenance::External,
                coeffs,
                constant,
            ))?;
        }
        Ok(sys)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .inequalities
            .iter()
            .map(|q| {
                let coeffs: serde_json::Map<String, serde_json::Value> = q
                    .coeffs
                    .iter()
                    .map(|(v, c)| (v.clone(), fmt_rat(c).into()))
                    .collect();
                serde_json::json!({
                    "label": q.label,
                    "provenance": q.provenance.as_str(),
                    "constant": fmt_rat(&q.constant),
                    "coefficients": coeffs,
                })
            })
            .collect();
        serde_json::json!({ "variables": self.variables, "inequalities": rows })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("system json: {e}")))?;
        let vars = v
            .get("variables")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("system json: missing \"variables\"".into()))?
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse("system json: variable is not a string".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sys = LinearSystem::new(vars)?;
        let rows = v
            .get("inequalities")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("system json: missing \"inequalities\"".into()))?;
        for r in rows {
            let label = r
                .get("label")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Parse("system json: row needs a label".into()))?;
            let provenance = Provenance::parse(
                r.get("provenance")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Parse("system json: row needs provenance".into()))?,
            )?;
            let constant = parse_rat(
                r.get("constant")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Parse("system json: row needs a constant".into()))?,
            )?;
            let mut coeffs = BTreeMap::new();
            if let Some(obj) = r.get("coefficients").and_then(|x| x.as_object()) {
                for (k, val) in obj {
                    let sval = val.as_str().ok_or_else(|| {
                        Error::Parse(format!("system json: coefficient {k:?} is not a string"))
                    })?;
                    coeffs.insert(k.clone(), parse_rat(sval)?);
                }
            }
            sys.push(LinearInequality::new(label, provenance, coeffs, constant))?;
        }
        Ok(sys)
    }
}

/// Variable id of T(r,s).
pub fn theta_var(r: GhzIndex, s: GhzIndex) -> String {
    format!("T({},{})", r.label(), s.label())
}

/// The shared variable order: pairs (r,s) with both indices running through
/// +, -, then even strings ascending.
pub fn theta_variables(n: usize) -> Result<Vec<String>> {
    let idx = index_family(n)?;
    let mut vars = Vec::with_capacity(idx.len() * idx.len());
    for &r in &idx {
        for &s in &idx {
            vars.push(theta_var(r, s));
        }
    }
    Ok(vars)
}

/// Coefficients as a dense point in the shared variable order.
pub fn theta_point(coeffs: &ThetaCoeffs) -> Vec<Rat> {
    coeffs.iter().map(|(_, v)| v.clone()).collect()
}

fn add(coeffs: &mut BTreeMap<String, Rat>, var: String, c: Rat) {
    let entry = coeffs.entry(var).or_insert_with(Rat::zero);
    *entry += c;
}

fn one() -> Rat {
    Rat::from_integer(1.into())
}

/// The six condition families for a single transposed subset, identified by
/// its even string xs. Absolute values are split into halves suffixed +/-.
fn ppt_rows_for(n: usize, xs: usize) -> Result<Vec<LinearInequality>> {
    let evens: Vec<usize> = index_family(n)?
        .into_iter()
        .filter_map(|r| match r {
            GhzIndex::Even(x) => Some(x),
            _ => None,
        })
        .collect();
    if !evens.contains(&xs) {
        return Err(Error::Domain(format!("{xs} is not an even family string")));
    }
    let plus = GhzIndex::Plus;
    let minus = GhzIndex::Minus;
    let sub = GhzIndex::Even(xs);
    let mut rows = Vec::new();
    let signs = [(one(), "+"), (-one(), "-")];

    // ppt-A: |T(+,+)-T(+,-)+T(-,+)-T(-,-)| <= T(+,xs)+T(-,xs)
    for (s, tag) in &signs {
        let mut c = BTreeMap::new();
        add(&mut c, theta_var(plus, plus), s.clone());
        add(&mut c, theta_var(plus, minus), -s.clone());
        add(&mut c, theta_var(minus, plus), s.clone());
        add(&mut c, theta_var(minus, minus), -s.clone());
        add(&mut c, theta_var(plus, sub), -one());
        add(&mut c, theta_var(minus, sub), -one());
        rows.push(LinearInequality::new(
            format!("ppt-A({xs}){tag}"),
            Provenance::Ppt,
            c,
            Rat::zero(),
        ));
    }
    // ppt-B: |T(+,+)+T(+,-)-T(-,+)-T(-,-)| <= T(xs,+)+T(xs,-)
    for (s, tag) in &signs {
        let mut c = BTreeMap::new();
        add(&mut c, theta_var(plus, plus), s.clone());
        add(&mut c, theta_var(plus, minus), s.clone());
        add(&mut c, theta_var(minus, plus), -s.clone());
        add(&mut c, theta_var(minus, minus), -s.clone());
        add(&mut c, theta_var(sub, plus), -one());
        add(&mut c, theta_var(sub, minus), -one());
        rows.push(LinearInequality::new(
            format!("ppt-B({xs}){tag}"),
            Provenance::Ppt,
            c,
            Rat::zero(),
        ));
    }
    // ppt-C: |T(+,x)-T(-,x)| <= T(xs,x), x != xs
    for &x in evens.iter().filter(|&&x| x != xs) {
        let other = GhzIndex::Even(x);
        for (s, tag) in &signs {
            let mut c = BTreeMap::new();
            add(&mut c, theta_var(plus, other), s.clone());
            add(&mut c, theta_var(minus, other), -s.clone());
            add(&mut c, theta_var(sub, other), -one());
            rows.push(LinearInequality::new(
                format!("ppt-C({xs},{x}){tag}"),
                Provenance::Ppt,
                c,
                Rat::zero(),
            ));
        }
    }
    // ppt-D: |T(x,+)-T(x,-)| <= T(x,xs), x != xs
    for &x in evens.iter().filter(|&&x| x != xs) {
        let other = GhzIndex::Even(x);
        for (s, tag) in &signs {
            let mut c = BTreeMap::new();
            add(&mut c, theta_var(other, plus), s.clone());
            add(&mut c, theta_var(other, minus), -s.clone());
            add(&mut c, theta_var(other, sub), -one());
            rows.push(LinearInequality::new(
                format!("ppt-D({xs},{x}){tag}"),
                Provenance::Ppt,
                c,
                Rat::zero(),
            ));
        }
    }
    // ppt-E: |A+B| <= C+D, ppt-F: |A-B| <= C-D
    for (family, b_sign, d_sign) in [("E", one(), -one()), ("F", -one(), one())] {
        for (s, tag) in &signs {
            let mut c = BTreeMap::new();
            // s*(A ± B)
            add(&mut c, theta_var(plus, sub), s.clone());
            add(&mut c, theta_var(minus, sub), -s.clone());
            add(&mut c, theta_var(sub, plus), s * &b_sign);
            add(&mut c, theta_var(sub, minus), -(s * &b_sign));
            // - C
            add(&mut c, theta_var(sub, sub), -one());
            // -+ D
            add(&mut c, theta_var(plus, plus), d_sign.clone());
            add(&mut c, theta_var(plus, minus), -d_sign.clone());
            add(&mut c, theta_var(minus, plus), -d_sign.clone());
            add(&mut c, theta_var(minus, minus), d_sign.clone());
            rows.push(LinearInequality::new(
                format!("ppt-{family}({xs}){tag}"),
                Provenance::Ppt,
                c,
                Rat::zero(),
            ));
        }
    }
    Ok(rows)
}

/// All admissible transposed subsets: nonempty sets of parties excluding the
/// last one, as (party list, even string with ones exactly there).
pub fn admissible_subsets(n: usize) -> Result<Vec<(Vec<usize>, usize)>> {
    check_parties(n)?;
    let mut out = Vec::new();
    for mask in 1usize..(1 << (n - 1)) {
        let parties: Vec<usize> = (0..n - 1).filter(|p| mask >> p & 1 == 1).collect();
        let xs: usize = parties.iter().map(|&p| 1usize << (n - 1 - p)).sum();
        out.push((parties, xs));
    }
    out.sort_by_key(|(_, xs)| *xs);
    Ok(out)
}

/// The full positivity system over all admissible subsets.
pub fn ppt_system(n: usize) -> Result<LinearSystem> {
    let mut sys = LinearSystem::new(theta_variables(n)?)?;
    for (_, xs) in admissible_subsets(n)? {
        for row in ppt_rows_for(n, xs)? {
            sys.push(row)?;
        }
    }
    Ok(sys)
}

/// Verdicts for one transposed subset: the symbolic system against the
/// explicit partial-transpose PSD test.
#[derive(Clone, Debug)]
pub struct SubsetCheck {
    pub parties: Vec<usize>,
    pub mask: usize,
    pub symbolic_psd: bool,
    pub direct_psd: bool,
    pub violated: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PptReport {
    pub n: usize,
    pub subsets: Vec<SubsetCheck>,
    pub routes_agree: bool,
    pub all_ppt: bool,
}

impl PptReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let subsets: Vec<serde_json::Value> = self
            .subsets
            .iter()
            .map(|s| {
                serde_json::json!({
                    "parties": s.parties,
                    "mask": s.mask,
                    "symbolic_psd": s.symbolic_psd,
                    "direct_psd": s.direct_psd,
                    "violated": s.violated,
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "routes_agree": self.routes_agree,
            "all_ppt": self.all_ppt,
            "subsets": subsets,
        })
    }
}

/// Evaluate the symbolic conditions and the explicit partial transposes of
/// Σ T(r,s) P_r⊗P_s for every admissible subset, and compare verdicts.
pub fn ppt_crosscheck(coeffs: &ThetaCoeffs) -> Result<PptReport> {
    let n = coeffs.parties();
    let theta = coeffs.reconstruct()?;
    let shape = SubsystemShape::qubits(2 * n);
    let point: BTreeMap<String, Rat> = coeffs
        .iter()
        .map(|(&(r, s), v)| (theta_var(r, s), v.clone()))
        .collect();
    let mut subsets = Vec::new();
    for (parties, xs) in admissible_subsets(n)? {
        let mut violated = Vec::new();
        for row in ppt_rows_for(n, xs)? {
            if !row.satisfied_at(&point) {
                violated.push(row.label);
            }
        }
        let factors: Vec<usize> = parties
            .iter()
            .flat_map(|&p| [p, n + p])
            .collect();
        let pt = partial_transpose(&theta, &shape, &factors)?;
        let direct_psd = psd_check(&pt)?.is_psd();
        subsets.push(SubsetCheck {
            parties,
            mask: xs,
            symbolic_psd: violated.is_empty(),
            direct_psd,
            violated,
        });
    }
    let routes_agree = subsets.iter().all(|s| s.symbolic_psd == s.direct_psd);
    let all_ppt = routes_agree && subsets.iter().all(|s| s.direct_psd);
    Ok(PptReport {
        n,
        subsets,
        routes_agree,
        all_ppt,
    })
}
