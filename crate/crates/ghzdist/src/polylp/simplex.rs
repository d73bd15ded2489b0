//! Exact phase-1 simplex over the rationals, Bland's pivot rule throughout.
//!
//! One core solves {M x = b, x ≥ 0} by minimizing the sum of artificial
//! variables. Rows with negative right-hand side are negated up front; the
//! flip flags are undone when the dual multipliers are read back out, so
//! callers always see multipliers for the rows they passed in.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub(crate) enum CoreOutcome {
    /// x ≥ 0 with M x = b, length = number of columns
    Solution(Vec<Rat>),
    /// y (one per row, flips undone) with yᵀM ≤ 0 componentwise on every
    /// column and yᵀb > 0; proves {Mx = b, x ≥ 0} empty
    Dual(Vec<Rat>),
}

struct Tableau {
    cols: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    cost: Vec<Rat>,
    crhs: Rat,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        debug_assert!(!p.is_zero());
        let inv = p.recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.cost[e].clone();
        if !f.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.crhs -= &f * &prhs;
        }
        self.basis[r] = e;
    }

    /// Bland: entering = lowest column index with negative reduced cost;
    /// leaving = minimum ratio, ties broken by lowest basis variable index.
    fn bland_step(&mut self) -> Result<bool> {
        let enter = match (0..self.cols).find(|&j| self.cost[j].is_negative()) {
            Some(j) => j,
            None => return Ok(false),
        };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..self.rows.len() {
            if !self.rows[i][enter].is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / &self.rows[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => {
                    ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        match leave {
            Some((r, _)) => {
                self.pivot(r, enter);
                Ok(true)
            }
            // the phase-1 objective is bounded below by zero, so an
            // unbounded direction cannot exist
            None => Err(Error::Domain(
                "internal: phase-1 objective unbounded".into(),
            )),
        }
    }
}

/// Solve {M x = b, x ≥ 0} where M is given by rows.
pub(crate) fn phase1(m: &[Vec<Rat>], b: &[Rat]) -> Result<CoreOutcome> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    if b.len() != nrows || m.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("ragged linear system".into()));
    }
    if nrows == 0 {
        return Ok(CoreOutcome::Solution(vec![Rat::zero(); ncols]));
    }
    let mut flipped = vec![false; nrows];
    let total = ncols + nrows; // decision columns then one artificial per row
    let mut rows = Vec::with_capacity(nrows);
    let mut rhs = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let neg = b[i].is_negative();
        flipped[i] = neg;
        let mut row: Vec<Rat> = m[i]
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        row.resize(total, Rat::zero());
        row[ncols + i] = Rat::one();
        rows.push(row);
        rhs.push(if neg { -b[i].clone() } else { b[i].clone() });
    }
    let mut cost = vec![Rat::zero(); total];
    for c in cost.iter_mut().skip(ncols) {
        *c = Rat::one();
    }
    let mut tab = Tableau {
        cols: total,
        rows,
        rhs,
        cost,
        crhs: Rat::zero(),
        basis: (ncols..total).collect(),
    };
    // express reduced costs with the artificial basis eliminated
    for i in 0..nrows {
        let row = tab.rows[i].clone();
        for (c, v) in tab.cost.iter_mut().zip(&row) {
            *c -= v;
        }
        tab.crhs -= &tab.rhs[i];
    }
    while tab.bland_step()? {}
    let objective = -tab.crhs.clone();
    if objective.is_negative() {
        return Err(Error::Domain("internal: negative phase-1 objective".into()));
    }
    if objective.is_zero() {
        let mut x = vec![Rat::zero(); ncols];
        for (i, &bv) in tab.basis.iter().enumerate() {
            if bv < ncols {
                x[bv] = tab.rhs[i].clone();
            }
        }
        Ok(CoreOutcome::Solution(x))
    } else {
        // y_i = 1 - reduced cost of artificial i, then undo the row flip
        let mut y = Vec::with_capacity(nrows);
        for i in 0..nrows {
            let yi = Rat::one() - &tab.cost[ncols + i];
            y.push(if flipped[i] { -yi } else { yi });
        }
        Ok(CoreOutcome::Dual(y))
    }
}

pub(crate) enum LeOutcome {
    Feasible(Vec<Rat>),
    /// μ ≥ 0 per row with Σ μ_i a_i = 0 and Σ μ_i c_i > 0
    Infeasible(Vec<Rat>),
}

/// Feasibility of {x : a_i·x + c_i ≤ 0 for all i} with x unrestricted.
pub(crate) fn solve_le(rows: &[(Vec<Rat>, Rat)], dim: usize) -> Result<LeOutcome> {
    let m = rows.len();
    if m == 0 {
        return Ok(LeOutcome::Feasible(vec![Rat::zero(); dim]));
    }
    // equality form: A x⁺ - A x⁻ + s = -c, all blocks ≥ 0
    let mut eq = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (i, (a, c)) in rows.iter().enumerate() {
        if a.len() != dim {
            return Err(Error::Shape("row length differs from dimension".into()));
        }
        let mut row = Vec::with_capacity(2 * dim + m);
        row.extend(a.iter().cloned());
        row.extend(a.iter().map(|v| -v.clone()));
        row.resize(2 * dim + m, Rat::zero());
        row[2 * dim + i] = Rat::one();
        eq.push(row);
        b.push(-c.clone());
    }
    match phase1(&eq, &b)? {
        CoreOutcome::Solution(full) => {
            let x: Vec<Rat> = (0..dim)
                .map(|j| &full[j] - &full[dim + j])
                .collect();
            for (a, c) in rows {
                let mut v = c.clone();
                for (ai, xi) in a.iter().zip(&x) {
                    v += ai * xi;
                }
                if v.is_positive() {
                    return Err(Error::Domain(
                        "internal: simplex returned an infeasible point".into(),
                    ));
                }
            }
            Ok(LeOutcome::Feasible(x))
        }
        CoreOutcome::Dual(y) => {
            // slack column i carries y_i alone, so μ_i = -y_i ≥ 0
            let mu: Vec<Rat> = y.iter().map(|v| -v.clone()).collect();
            if mu.iter().any(|v| v.is_negative()) {
                return Err(Error::Domain(
                    "internal: negative infeasibility multiplier".into(),
                ));
            }
            for j in 0..dim {
                let mut s = Rat::zero();
                for ((a, _), mi) in rows.iter().zip(&mu) {
                    s += &a[j] * mi;
                }
                if !s.is_zero() {
                    return Err(Error::Domain(
                        "internal: multipliers do not cancel the coefficients".into(),
                    ));
                }
            }
            let mut s = Rat::zero();
            for ((_, c), mi) in rows.iter().zip(&mu) {
                s += c * mi;
            }
            if !s.is_positive() {
                return Err(Error::Domain(
                    "internal: multipliers do not certify infeasibility".into(),
                ));
            }
            Ok(LeOutcome::Infeasible(mu))
        }
    }
}

/// First ν ≥ 0 with Σ_j ν_j column_j = b, i.e. {Mν = b, ν ≥ 0}, or None.
pub(crate) fn nonneg_solve(m: &[Vec<Rat>], b: &[Rat]) -> Result<Option<Vec<Rat>>> {
    match phase1(m, b)? {
        CoreOutcome::Solution(v) => {
            for (row, want) in m.iter().zip(b) {
                let mut s = Rat::zero();
                for (c, x) in row.iter().zip(&v) {
                    s += c * x;
                }
                if &s != want {
                    return Err(Error::Domain(
                        "internal: solution does not satisfy the equalities".into(),
                    ));
                }
            }
            Ok(Some(v))
        }
        CoreOutcome::Dual(_) => Ok(None),
    }
}
