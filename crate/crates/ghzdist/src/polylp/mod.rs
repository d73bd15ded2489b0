//! Exact rational linear programming and polyhedral computation:
//! feasibility with certificates, vertex/ray enumeration, and non-negative
//! recombination certificates. No floating point anywhere; every answer is
//! re-verified by substitution before it is returned.

mod dd;
mod simplex;

use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pptgen::{LinearInequality, LinearSystem};
use crate::rat::{fmt_rat, Rat};

pub use dd::{cone_generators, enumerate_polyhedron, polyhedron_to_h, Polyhedron};

/// Default ceiling on enumeration dimension; override with the
/// ARTIFACT_MAX_DIM environment variable.
pub const DEFAULT_MAX_DIM: usize = 20;

pub fn max_enumeration_dim() -> usize {
    std::env::var("ARTIFACT_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub(crate) fn check_enumeration_dim(dim: usize) -> Result<()> {
    let limit = max_enumeration_dim();
    if dim > limit {
        return Err(Error::Guard {
            what: "enumeration dimension".into(),
            requested: dim,
            limit,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// A point satisfying every inequality.
    Feasible(Vec<Rat>),
    /// Non-negative multipliers, keyed by row label, combining the rows to
    /// the contradiction "positive constant ≤ 0". Zero multipliers omitted.
    Infeasible(BTreeMap<String, Rat>),
}

fn unique_labels(system: &LinearSystem) -> Result<Vec<String>> {
    let labels: Vec<String> = system.rows().iter().map(|r| r.label.clone()).collect();
    let distinct: std::collections::BTreeSet<&String> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(Error::Shape(
            "system has duplicate row labels; certificates need unique ids".into(),
        ));
    }
    Ok(labels)
}

/// Exact feasibility of the system, with a point or an infeasibility
/// certificate. Both are re-verified by substitution before returning.
pub fn lp_feasible(system: &LinearSystem) -> Result<LpOutcome> {
    let labels = unique_labels(system)?;
    let rows = system.dense_rows();
    match simplex::solve_le(&rows, system.variables().len())? {
        simplex::LeOutcome::Feasible(x) => {
            if !system.satisfied_at(&x)? {
                return Err(Error::Domain(
                    "internal: feasible point fails re-verification".into(),
                ));
            }
            Ok(LpOutcome::Feasible(x))
        }
        simplex::LeOutcome::Infeasible(mu) => {
            let map: BTreeMap<String, Rat> = labels
                .into_iter()
                .zip(mu)
                .filter(|(_, v)| !v.is_zero())
                .collect();
            Ok(LpOutcome::Infeasible(map))
        }
    }
}

/// Non-negative multipliers recombining system rows into the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub target: LinearInequality,
    /// row label → multiplier; zero multipliers omitted
    pub multipliers: BTreeMap<String, Rat>,
    /// constant slack: recombined constant minus target constant (zero for
    /// identical recombination, ≥ 0 for domination)
    pub slack: Rat,
}

impl FarkasCertificate {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mult: serde_json::Map<String, serde_json::Value> = self
            .multipliers
            .iter()
            .map(|(k, v)| (k.clone(), fmt_rat(v).into()))
            .collect();
        let coeffs: serde_json::Map<String, serde_json::Value> = self
            .target
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), fmt_rat(v).into()))
            .collect();
        serde_json::json!({
            "target": {
                "label": self.target.label,
                "coefficients": coeffs,
                "constant": fmt_rat(&self.target.constant),
            },
            "multipliers": mult,
            "slack": fmt_rat(&self.slack),
        })
    }
}

fn farkas_solve(
    target: &LinearInequality,
    system: &LinearSystem,
    dominating: bool,
) -> Result<Option<FarkasCertificate>> {
    for v in target.coeffs.keys() {
        if system.var_index(v).is_none() {
            return Err(Error::Shape(format!(
                "target variable {v:?} is outside the system universe"
            )));
        }
    }
    let labels = unique_labels(system)?;
    let rows = system.dense_rows();
    let d = system.variables().len();
    let m = rows.len();
    let cols = if dominating { m + 1 } else { m };
    // equality per variable: Σ_i ν_i a_i[j] = t_j; constant row with an
    // optional surplus column: Σ_i ν_i c_i (- w) = t_c
    let mut mat = Vec::with_capacity(d + 1);
    let mut rhs = Vec::with_capacity(d + 1);
    for (j, var) in system.variables().iter().enumerate() {
        let mut row = Vec::with_capacity(cols);
        for (a, _) in &rows {
            row.push(a[j].clone());
        }
        if dominating {
            row.push(Rat::zero());
        }
        mat.push(row);
        rhs.push(target.coeffs.get(var).cloned().unwrap_or_else(Rat::zero));
    }
    let mut crow = Vec::with_capacity(cols);
    for (_, c) in &rows {
        crow.push(c.clone());
    }
    if dominating {
        crow.push(-Rat::from_integer(1.into()));
    }
    mat.push(crow);
    rhs.push(target.constant.clone());
    let nu = match simplex::nonneg_solve(&mat, &rhs)? {
        None => return Ok(None),
        Some(v) => v,
    };
    // re-verify the recombination coefficient by coefficient
    let mut combo = vec![Rat::zero(); d];
    let mut combo_c = Rat::zero();
    for (i, (a, c)) in rows.iter().enumerate() {
        if nu[i].is_zero() {
            continue;
        }
        for (j, aj) in a.iter().enumerate() {
            combo[j] += aj * &nu[i];
        }
        combo_c += c * &nu[i];
    }
    for (j, var) in system.variables().iter().enumerate() {
        let want = target.coeffs.get(var).cloned().unwrap_or_else(Rat::zero);
        if combo[j] != want {
            return Err(Error::Domain(
                "internal: certificate does not recombine the coefficients".into(),
            ));
        }
    }
    let slack = &combo_c - &target.constant;
    let ok_constant = if dominating {
        !slack.is_negative()
    } else {
        slack.is_zero()
    };
    if !ok_constant {
        return Err(Error::Domain(
            "internal: certificate misses the target constant".into(),
        ));
    }
    let multipliers: BTreeMap<String, Rat> = labels
        .into_iter()
        .zip(nu.into_iter().take(m))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(Some(FarkasCertificate {
        target: target.clone(),
        multipliers,
        slack,
    }))
}

/// Certificate with Σ ν_i·row_i equal to the target identically, constant
/// included. None when no such non-negative combination exists.
pub fn farkas_combination(
    target: &LinearInequality,
    system: &LinearSystem,
) -> Result<Option<FarkasCertificate>> {
    farkas_solve(target, system, false)
}

/// Certificate whose recombination matches the target's coefficients and
/// carries a constant ≥ the target's, so the combination implies the
/// target. Strictly weaker requirement than `farkas_combination`.
pub fn farkas_dominating(
    target: &LinearInequality,
    system: &LinearSystem,
) -> Result<Option<FarkasCertificate>> {
    farkas_solve(target, system, true)
}
