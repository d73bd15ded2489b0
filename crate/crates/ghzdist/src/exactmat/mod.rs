//! Dense exact-rational matrices with the tensor-algebra primitives used
//! everywhere else: Kronecker products, partial trace, partial transpose,
//! factor permutation, rational Gaussian elimination, and an exact
//! positive-semidefiniteness decision (see `psd`).
//!
//! Scope restriction: matrices are real. All operators handled here are real
//! in the computational basis, so nothing is lost by skipping complex
//! rationals.
//!
//! Index convention, fixed crate-wide: factor 0 of a tensor product is the
//! most significant index. Factor indices are 0-based.

mod psd;

pub use psd::{psd_check, quadratic_form, PsdCertificate, PsdVerdict};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, parse_rat, Rat};

/// Row-major dense matrix over `Rat`.
#[derive(Clone, PartialEq, Eq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_rat(self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged row lengths".into()));
        }
        Ok(RMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[Rat]) -> Self {
        RMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: &Rat) {
        if !v.is_zero() {
            self.data[i * self.cols + j] += v;
        }
    }

    /// Row-major flattening. This is the `vec` used by the channel-state
    /// correspondence: vec(A)[(i,j)] = A[i][j] with i major.
    pub fn vec_row_major(&self) -> Vec<Rat> {
        self.data.clone()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> Rat {
        assert!(self.is_square(), "trace of non-square matrix");
        let mut t = Rat::zero();
        for i in 0..self.rows {
            t += self.at(i, i);
        }
        t
    }

    /// tr(AB) without forming AB.
    pub fn trace_product(&self, other: &Self) -> Rat {
        assert!(
            self.cols == other.rows && self.rows == other.cols,
            "trace_product shape mismatch"
        );
        let mut t = Rat::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if !a.is_zero() {
                    let b = other.at(j, i);
                    if !b.is_zero() {
                        t += a * b;
                    }
                }
            }
        }
        t
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Outer product u vᵀ of two equal-or-different-length vectors.
    pub fn outer(u: &[Rat], v: &[Rat]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| {
            if u[i].is_zero() || v[j].is_zero() {
                Rat::zero()
            } else {
                &u[i] * &v[j]
            }
        })
    }

    /// Kronecker product, factor 0 (self) most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Map entries to f64 (for the float estimator only).
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data
            .iter()
            .map(|r| {
                let n = r.numer();
                let d = r.denom();
                // Good enough for desk-scale magnitudes; exact path never uses this.
                str::parse::<f64>(&n.to_string()).unwrap_or(f64::NAN)
                    / str::parse::<f64>(&d.to_string()).unwrap_or(f64::NAN)
            })
            .collect()
    }
}

pub fn tensor(a: &RMatrix, b: &RMatrix) -> RMatrix {
    a.kron(b)
}

pub fn tensor_all(factors: &[RMatrix]) -> RMatrix {
    assert!(!factors.is_empty(), "tensor_all of zero factors");
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kron(f);
    }
    acc
}

impl Add for &RMatrix {
    type Output = RMatrix;
    fn add(self, rhs: &RMatrix) -> RMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "add shape mismatch"
        );
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RMatrix {
    type Output = RMatrix;
    fn sub(self, rhs: &RMatrix) -> RMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "sub shape mismatch"
        );
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &RMatrix {
    type Output = RMatrix;
    fn neg(self) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &RMatrix {
    type Output = RMatrix;
    /// ikj order with zero skipping: the states and signed-permutation
    /// unitaries in this crate are sparse, so this saves most of the work.
    fn mul(self, rhs: &RMatrix) -> RMatrix {
        assert!(self.cols == rhs.rows, "mul shape mismatch");
        let mut out = RMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Ordered local dimensions of a tensor factorization. Factor 0 is the most
/// significant index of the composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::Shape(format!(
                "subsystem dims must be nonempty and each at least 2, got {dims:?}"
            )));
        }
        Ok(SubsystemShape { dims })
    }

    pub fn qubits(n: usize) -> Self {
        SubsystemShape { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn check_matches(&self, m: &RMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but shape {:?} has total dimension {}",
                m.rows(),
                m.cols(),
                self.dims,
                self.total_dim()
            )));
        }
        Ok(())
    }

    /// Composite index -> per-factor indices.
    pub fn decompose_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in self.dims.iter().enumerate().rev() {
            out[slot] = idx % d;
            idx /= d;
        }
        out
    }

    /// Per-factor indices -> composite index.
    pub fn compose_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        let mut idx = 0;
        for (slot, &d) in self.dims.iter().enumerate() {
            debug_assert!(multi[slot] < d);
            idx = idx * d + multi[slot];
        }
        idx
    }

    fn validate_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for &f in subset {
            if f >= self.dims.len() {
                return Err(Error::Shape(format!(
                    "factor index {f} out of range for {} factors",
                    self.dims.len()
                )));
            }
            if seen[f] {
                return Err(Error::Shape(format!("factor index {f} repeated")));
            }
            seen[f] = true;
        }
        Ok(())
    }
}

/// Trace out every factor not listed in `keep`. The kept factors stay in
/// their original relative order.
pub fn partial_trace(a: &RMatrix, shape: &SubsystemShape, keep: &[usize]) -> Result<RMatrix> {
    shape.check_matches(a)?;
    shape.validate_subset(keep)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..shape.num_factors())
        .filter(|f| !keep.contains(f))
        .collect();

    let kept_dims: Vec<usize> = keep.iter().map(|&f| shape.dims()[f]).collect();
    let out_dim: usize = kept_dims.iter().product::<usize>().max(1);
    let traced_dims: Vec<usize> = traced.iter().map(|&f| shape.dims()[f]).collect();
    let traced_total: usize = traced_dims.iter().product::<usize>().max(1);

    let mut out = RMatrix::zeros(out_dim, out_dim);
    let mut multi_row = vec![0; shape.num_factors()];
    let mut multi_col = vec![0; shape.num_factors()];
    for ik in 0..out_dim {
        let ik_multi = decompose(ik, &kept_dims);
        for jk in 0..out_dim {
            let jk_multi = decompose(jk, &kept_dims);
            let mut sum = Rat::zero();
            for t in 0..traced_total {
                let t_multi = decompose(t, &traced_dims);
                for (slot, &f) in keep.iter().enumerate() {
                    multi_row[f] = ik_multi[slot];
                    multi_col[f] = jk_multi[slot];
                }
                for (slot, &f) in traced.iter().enumerate() {
                    multi_row[f] = t_multi[slot];
                    multi_col[f] = t_multi[slot];
                }
                let v = a.at(shape.compose_index(&multi_row), shape.compose_index(&multi_col));
                if !v.is_zero() {
                    sum += v;
                }
            }
            out.set(ik, jk, sum);
        }
    }
    Ok(out)
}

/// Transpose the indices of the factors in `subset` only. Involutive,
/// trace-preserving.
pub fn partial_transpose(a: &RMatrix, shape: &SubsystemShape, subset: &[usize]) -> Result<RMatrix> {
    shape.check_matches(a)?;
    shape.validate_subset(subset)?;
    let n = shape.total_dim();
    let mut out = RMatrix::zeros(n, n);
    for i in 0..n {
        let mut im = shape.decompose_index(i);
        for j in 0..n {
            let v = a.at(i, j);
            if v.is_zero() {
                continue;
            }
            let jm = shape.decompose_index(j);
            let mut jim = jm.clone();
            let saved: Vec<usize> = subset.iter().map(|&f| im[f]).collect();
            for (&f, &s) in subset.iter().zip(saved.iter()) {
                im[f] = jm[f];
                jim[f] = s;
            }
            out.set(shape.compose_index(&im), shape.compose_index(&jim), v.clone());
            // restore the row multi-index for the next column
            for (&f, &s) in subset.iter().zip(saved.iter()) {
                im[f] = s;
            }
        }
    }
    Ok(out)
}

/// Reorder tensor factors: output factor `p` holds input factor `perm[p]`.
pub fn permute_factors(a: &RMatrix, shape: &SubsystemShape, perm: &[usize]) -> Result<RMatrix> {
    shape.check_matches(a)?;
    if perm.len() != shape.num_factors() {
        return Err(Error::Shape("permutation length mismatch".into()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::Shape(format!("invalid permutation {perm:?}")));
        }
        seen[p] = true;
    }
    let out_dims: Vec<usize> = perm.iter().map(|&p| shape.dims()[p]).collect();
    let out_shape = SubsystemShape::new(out_dims)?;
    let n = shape.total_dim();
    let mut out = RMatrix::zeros(n, n);
    for i in 0..n {
        let im = shape.decompose_index(i);
        let oi: Vec<usize> = perm.iter().map(|&p| im[p]).collect();
        let oi = out_shape.compose_index(&oi);
        for j in 0..n {
            let v = a.at(i, j);
            if v.is_zero() {
                continue;
            }
            let jm = shape.decompose_index(j);
            let oj: Vec<usize> = perm.iter().map(|&p| jm[p]).collect();
            out.set(oi, out_shape.compose_index(&oj), v.clone());
        }
    }
    Ok(out)
}

fn decompose(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in dims.iter().enumerate().rev() {
        out[slot] = idx % d;
        idx /= d;
    }
    out
}

// ---- rational Gaussian elimination -------------------------------------

/// Reduced row echelon form; returns (rref, pivot column list).
pub fn rref(a: &RMatrix) -> (RMatrix, Vec<usize>) {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m.at(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = {
            let p = m.at(r, c).clone();
            Rat::one() / p
        };
        for j in 0..cols {
            let v = m.at(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i != r && !m.at(i, c).is_zero() {
                let f = m.at(i, c).clone();
                for j in 0..cols {
                    let v = m.at(i, j) - &(m.at(r, j) * &f);
                    m.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &RMatrix) -> usize {
    rref(a).1.len()
}

/// Basis of the right null space {x : Ax = 0}, one column vector per basis
/// element, in the canonical free-variable order.
pub fn nullspace(a: &RMatrix) -> Vec<Vec<Rat>> {
    let (m, pivots) = rref(a);
    let cols = a.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rat::zero(); cols];
        v[fc] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m.at(r, fc).clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve AX = B for square invertible A.
pub fn solve(a: &RMatrix, b: &RMatrix) -> Result<RMatrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::Shape("solve shape mismatch".into()));
    }
    let n = a.rows();
    let mut aug = RMatrix::zeros(n, n + b.cols());
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.at(i, j).clone());
        }
        for j in 0..b.cols() {
            aug.set(i, n + j, b.at(i, j).clone());
        }
    }
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Singular("matrix is not invertible".into()));
    }
    Ok(RMatrix::from_fn(n, b.cols(), |i, j| r.at(i, n + j).clone()))
}

pub fn invert(a: &RMatrix) -> Result<RMatrix> {
    solve(a, &RMatrix::identity(a.rows()))
}

// ---- wire format --------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl RMatrix {
    pub fn to_json_value(&self) -> serde_json::Value {
        let entries: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| fmt_rat(self.at(i, j))).collect())
            .collect();
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": entries,
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: MatrixWire =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
        Self::from_wire(wire)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let wire: MatrixWire = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
        Self::from_wire(wire)
    }

    fn from_wire(wire: MatrixWire) -> Result<Self> {
        if wire.entries.len() != wire.rows
            || wire.entries.iter().any(|r| r.len() != wire.cols)
        {
            return Err(Error::Parse(
                "matrix json: entries do not match rows x cols".into(),
            ));
        }
        let mut data = Vec::with_capacity(wire.rows * wire.cols);
        for row in &wire.entries {
            for s in row {
                data.push(parse_rat(s)?);
            }
        }
        Ok(RMatrix {
            rows: wire.rows,
            cols: wire.cols,
            data,
        })
    }
}

// ---- projector-free small helpers ---------------------------------------

/// |i><j| in dimension d.
pub fn basis_matrix(d: usize, i: usize, j: usize) -> RMatrix {
    let mut m = RMatrix::zeros(d, d);
    m.set(i, j, Rat::one());
    m
}

pub fn sigma_x() -> RMatrix {
    RMatrix::from_rows(vec![
        vec![Rat::zero(), Rat::one()],
        vec![Rat::one(), Rat::zero()],
    ])
    .unwrap()
}

pub fn sigma_z() -> RMatrix {
    RMatrix::from_rows(vec![
        vec![Rat::one(), Rat::zero()],
        vec![Rat::zero(), -Rat::one()],
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn m2(entries: [[i64; 2]; 2]) -> RMatrix {
        RMatrix::from_fn(2, 2, |i, j| rat_int(entries[i][j]))
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = RMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), RMatrix::identity(4));
    }

    #[test]
    fn tensor_basis_projectors() {
        let p0 = basis_matrix(2, 0, 0);
        let p1 = basis_matrix(2, 1, 1);
        let t = tensor(&p0, &p1);
        let mut expect = RMatrix::zeros(4, 4);
        expect.set(1, 1, rat_int(1));
        assert_eq!(t, expect);
    }

    /// Oracle: direct index expansion (a⊗b)[(i,k),(j,l)] = a[i][j] b[k][l].
    fn kron_oracle(a: &RMatrix, b: &RMatrix) -> RMatrix {
        RMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |r, c| {
            let (i, k) = (r / b.rows(), r % b.rows());
            let (j, l) = (c / b.cols(), c % b.cols());
            a.at(i, j) * b.at(k, l)
        })
    }

    #[test]
    fn partial_trace_of_product_rule() {
        let a = m2([[1, 2], [3, 4]]);
        let b = m2([[5, 6], [7, 8]]);
        let shape = SubsystemShape::qubits(2);
        let t = tensor(&a, &b);
        let reduced = partial_trace(&t, &shape, &[0]).unwrap();
        assert_eq!(reduced, a.scale(&b.trace()));
        let reduced2 = partial_trace(&t, &shape, &[1]).unwrap();
        assert_eq!(reduced2, b.scale(&a.trace()));
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let a = m2([[1, 2], [3, 4]]);
        let b = m2([[5, -6], [0, 2]]);
        let t = tensor(&a, &b);
        let shape = SubsystemShape::qubits(2);
        for keep in [vec![0], vec![1], vec![0, 1]] {
            let r = partial_trace(&t, &shape, &keep).unwrap();
            assert_eq!(r.trace(), t.trace());
        }
    }

    #[test]
    fn partial_transpose_empty_subset_is_identity_op() {
        let a = m2([[1, 2], [3, 4]]);
        let b = m2([[5, 6], [7, 8]]);
        let t = tensor(&a, &b);
        let shape = SubsystemShape::qubits(2);
        assert_eq!(partial_transpose(&t, &shape, &[]).unwrap(), t);
    }

    #[test]
    fn partial_transpose_single_factor_on_product() {
        let a = m2([[1, 2], [3, 4]]);
        let b = m2([[5, 6], [7, 8]]);
        let t = tensor(&a, &b);
        let shape = SubsystemShape::qubits(2);
        assert_eq!(
            partial_transpose(&t, &shape, &[0]).unwrap(),
            tensor(&a.transpose(), &b)
        );
        assert_eq!(
            partial_transpose(&t, &shape, &[1]).unwrap(),
            tensor(&a, &b.transpose())
        );
    }

    #[test]
    fn permute_factors_swaps_product() {
        let a = m2([[1, 2], [3, 4]]);
        let b = RMatrix::from_fn(3, 3, |i, j| rat_int((i * 3 + j) as i64));
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        let t = tensor(&a, &b);
        let swapped = permute_factors(&t, &shape, &[1, 0]).unwrap();
        assert_eq!(swapped, tensor(&b, &a));
    }

    #[test]
    fn solve_and_invert_small() {
        let a = RMatrix::from_rows(vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ])
        .unwrap();
        let inv = invert(&a).unwrap();
        assert_eq!(&a * &inv, RMatrix::identity(2));
        let singular = RMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ])
        .unwrap();
        assert!(invert(&singular).is_err());
    }

    #[test]
    fn nullspace_matches_rank() {
        let a = RMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
        ])
        .unwrap();
        assert_eq!(rank(&a), 1);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for i in 0..a.rows() {
                let mut dot = Rat::zero();
                for j in 0..a.cols() {
                    dot += a.at(i, j) * &v[j];
                }
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let a = RMatrix::from_rows(vec![
            vec![rat(1, 2), rat_int(-3)],
            vec![rat(22, 7), Rat::zero()],
        ])
        .unwrap();
        let s = a.to_json();
        assert_eq!(RMatrix::from_json(&s).unwrap(), a);
        assert!(RMatrix::from_json("{\"rows\":1,\"cols\":2,\"entries\":[[\"1\"]]}").is_err());
    }

    prop_compose! {
        fn arb_rat()(n in -6i64..=6, d in 1i64..=4) -> Rat { rat(n, d) }
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RMatrix> {
        proptest::collection::vec(arb_rat(), rows * cols).prop_map(move |data| RMatrix {
            rows,
            cols,
            data,
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn kron_matches_index_expansion(a in arb_matrix(2, 3), b in arb_matrix(3, 2)) {
            prop_assert_eq!(a.kron(&b), kron_oracle(&a, &b));
        }

        #[test]
        fn tensor_is_associative(a in arb_matrix(2, 2), b in arb_matrix(2, 2), c in arb_matrix(2, 2)) {
            prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        }

        #[test]
        fn tensor_is_bilinear(a in arb_matrix(2, 2), b in arb_matrix(2, 2), c in arb_matrix(2, 2)) {
            let left = (&a + &b).kron(&c);
            let right = &a.kron(&c) + &b.kron(&c);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn partial_transpose_is_involutive(a in arb_matrix(8, 8)) {
            let shape = SubsystemShape::qubits(3);
            for subset in [vec![0], vec![1], vec![2], vec![0, 2]] {
                let once = partial_transpose(&a, &shape, &subset).unwrap();
                let twice = partial_transpose(&once, &shape, &subset).unwrap();
                prop_assert_eq!(&twice, &a);
            }
        }

        #[test]
        fn partial_transpose_commutes_on_disjoint_subsets(a in arb_matrix(8, 8)) {
            let shape = SubsystemShape::qubits(3);
            let ab = partial_transpose(&partial_transpose(&a, &shape, &[0]).unwrap(), &shape, &[2]).unwrap();
            let ba = partial_transpose(&partial_transpose(&a, &shape, &[2]).unwrap(), &shape, &[0]).unwrap();
            let joint = partial_transpose(&a, &shape, &[0, 2]).unwrap();
            prop_assert_eq!(&ab, &ba);
            prop_assert_eq!(&ab, &joint);
        }

        #[test]
        fn partial_trace_trace_identity(a in arb_matrix(8, 8)) {
            let shape = SubsystemShape::qubits(3);
            for keep in [vec![0], vec![1, 2], vec![0, 1, 2]] {
                let r = partial_trace(&a, &shape, &keep).unwrap();
                prop_assert_eq!(r.trace(), a.trace());
            }
        }

        #[test]
        fn trace_product_agrees_with_full_product(a in arb_matrix(3, 3), b in arb_matrix(3, 3)) {
            prop_assert_eq!(a.trace_product(&b), (&a * &b).trace());
        }

        #[test]
        fn permute_factors_composes(a in arb_matrix(8, 8)) {
            let shape = SubsystemShape::qubits(3);
            // cycle (0 1 2) applied twice equals cycle (0 2 1)
            let p1 = permute_factors(&a, &shape, &[1, 2, 0]).unwrap();
            let p2 = permute_factors(&p1, &shape, &[1, 2, 0]).unwrap();
            let direct = permute_factors(&a, &shape, &[2, 0, 1]).unwrap();
            prop_assert_eq!(p2, direct);
        }
    }
}
