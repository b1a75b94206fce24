//! Integer matrices: sparse storage for boundaries, dense kernels for
//! Hermite and Smith normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Sparse integer matrix stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, BigInt)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    /// Columns are sorted by row and stripped of zeros.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|(r, _)| *r);
                c.retain(|(_, v)| !v.is_zero());
                c
            })
            .collect();
        IntMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.columns[j]
            .binary_search_by_key(&i, |(r, _)| *r)
            .map(|k| self.columns[j][k].1.clone())
            .unwrap_or_default()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                d.set(*i, j, v.clone());
            }
        }
        d
    }

    /// `self · other`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
                for (k, v) in col {
                    for (i, w) in &self.columns[*k] {
                        *acc.entry(*i).or_default() += v * w;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        IntMatrix { rows: self.rows, columns }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    #[serde(skip)]
    data: Vec<BigInt>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        DenseMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += c * a;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Stacks the rows of `other` below these rows.
    pub fn stack(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        DenseMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        DenseMatrix::from_rows(rows.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_rows(
            (0..self.rows).map(|i| cols.iter().map(|&j| self.get(i, j).clone()).collect()).collect(),
            cols.len(),
        )
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += k · col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = &mut self.data[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

/// A unimodular change of basis recorded together with its inverse.
#[derive(Debug, Clone)]
struct Tracked {
    m: DenseMatrix,
    inv: DenseMatrix,
}

impl Tracked {
    fn new(n: usize) -> Self {
        Tracked { m: DenseMatrix::identity(n), inv: DenseMatrix::identity(n) }
    }
    // left-multiplied row operations: m ← E·m, inv ← inv·E⁻¹
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.inv.swap_cols(a, b);
    }
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.m.add_row(dst, src, k);
        self.inv.add_col(src, dst, &-k);
    }
    fn negate_row(&mut self, i: usize) {
        self.m.negate_row(i);
        self.inv.negate_col(i);
    }
    // right-multiplied column operations: m ← m·F, inv ← F⁻¹·inv
    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.inv.swap_rows(a, b);
    }
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.m.add_col(dst, src, k);
        self.inv.add_row(src, dst, &-k);
    }
}

/// Row Hermite normal form `U·M = H` with `U` unimodular.
///
/// The first `rank` rows of `H` are nonzero, their pivot columns strictly
/// increase, pivots are positive and the entries above each pivot lie in
/// `[0, pivot)`. The remaining rows are zero, so the matching rows of `U`
/// span the left kernel of `M`.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub h: DenseMatrix,
    pub u: DenseMatrix,
    pub u_inv: DenseMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn echelon(m: &DenseMatrix) -> Echelon {
    let mut h = m.clone();
    let mut t = Tracked::new(m.rows);
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..m.cols {
        if r == m.rows {
            break;
        }
        loop {
            // smallest nonzero magnitude at or below row r, lowest index first
            let mut best: Option<usize> = None;
            for i in r..m.rows {
                let v = h.get(i, col);
                if !v.is_zero() && best.map_or(true, |b| v.abs() < h.get(b, col).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            t.swap_rows(r, b);
            let mut clean = true;
            for i in r + 1..m.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = h.get(i, col) / h.get(r, col);
                let neg = -q;
                h.add_row(i, r, &neg);
                t.add_row(i, r, &neg);
                if !h.get(i, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(r, col).is_zero() {
            continue;
        }
        if h.get(r, col).is_negative() {
            h.negate_row(r);
            t.negate_row(r);
        }
        let pivot = h.get(r, col).clone();
        for i in 0..r {
            let q = h.get(i, col).div_floor(&pivot);
            if !q.is_zero() {
                let neg = -q;
                h.add_row(i, r, &neg);
                t.add_row(i, r, &neg);
            }
        }
        pivots.push(col);
        r += 1;
    }
    Echelon { h, u: t.m, u_inv: t.inv, rank: r, pivots }
}

/// Smith normal form `P·M·Q = D`.
///
/// Pivots are chosen by smallest magnitude with the lowest (row, column)
/// index breaking ties; the diagonal is nonnegative and forms a divisibility
/// chain.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub p: DenseMatrix,
    pub p_inv: DenseMatrix,
    pub q: DenseMatrix,
    pub q_inv: DenseMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    /// Entries of the diagonal larger than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }
}

pub fn smith_normal_form(m: &DenseMatrix) -> Smith {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = Tracked::new(rows);
    let mut right = Tracked::new(cols);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a.get(i, j);
                if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        left.swap_rows(t, bi);
        a.swap_cols(t, bj);
        right.swap_cols(t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let neg = -(a.get(i, t) / a.get(t, t));
                a.add_row(i, t, &neg);
                left.add_row(i, t, &neg);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let neg = -(a.get(t, j) / a.get(t, t));
                a.add_col(j, t, &neg);
                right.add_col(j, t, &neg);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                // move the smallest leftover in row or column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    let v = a.get(i, t);
                    if !v.is_zero() && v.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let v = a.get(t, j);
                    if !v.is_zero() && v.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                a.swap_rows(t, best.0);
                left.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                right.swap_cols(t, best.1);
                continue;
            }
            // the pivot must divide the rest of the submatrix
            let pivot = a.get(t, t).clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    left.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
        diagonal.push(a.get(t, t).clone());
        t += 1;
    }
    while diagonal.len() < rows.min(cols) {
        diagonal.push(BigInt::zero());
    }
    Smith { diagonal, p: left.m, p_inv: left.inv, q: right.m, q_inv: right.inv }
}

/// Basis of `{x : M·x = 0}` as rows.
pub fn integer_kernel(m: &DenseMatrix) -> DenseMatrix {
    let e = echelon(&m.transpose());
    let rows: Vec<usize> = (e.rank..m.cols).collect();
    e.u.select_rows(&rows)
}

/// Reduces `x` modulo the row lattice of an echelon form; returns the
/// remainder (zero iff `x` lies in the lattice).
pub fn reduce_by_echelon(x: &[BigInt], h: &DenseMatrix, rank: usize, pivots: &[usize]) -> Vec<BigInt> {
    let mut x = x.to_vec();
    for r in 0..rank {
        let col = pivots[r];
        let pivot = h.get(r, col);
        let q = x[col].div_floor(pivot);
        if !q.is_zero() {
            for (xi, hi) in x.iter_mut().zip(h.row(r)) {
                *xi -= &q * hi;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn check_smith(m: &DenseMatrix) -> Smith {
        let s = smith_normal_form(m);
        let d = s.p.mul(m).mul(&s.q);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expect = if i == j && i < s.diagonal.len() { s.diagonal[i].clone() } else { b(0) };
                assert_eq!(d.get(i, j), &expect, "P·M·Q = {d:?}");
            }
        }
        assert_eq!(s.p.mul(&s.p_inv), DenseMatrix::identity(m.rows()));
        assert_eq!(s.q.mul(&s.q_inv), DenseMatrix::identity(m.cols()));
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_zero() || w[1].is_multiple_of(&w[0]), "{:?}", s.diagonal);
        }
        s
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_smith(&DenseMatrix::from_i64(&[vec![2]])).diagonal, vec![b(2)]);
        // invariant factors of diag(2, 3): gcd = 1, product = 6
        assert_eq!(check_smith(&DenseMatrix::from_i64(&[vec![2, 0], vec![0, 3]])).diagonal, vec![b(1), b(6)]);
        assert_eq!(check_smith(&DenseMatrix::identity(3)).diagonal, vec![b(1), b(1), b(1)]);
        let s = check_smith(&DenseMatrix::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(s.diagonal, vec![b(2), b(6), b(12)]);
        check_smith(&DenseMatrix::from_i64(&[vec![0, 0], vec![0, 0], vec![0, 5]]));
    }

    #[test]
    fn echelon_is_canonical() {
        let m = DenseMatrix::from_i64(&[vec![4, 6], vec![2, 3], vec![0, 5]]);
        let e = echelon(&m);
        assert_eq!(e.u.mul(&m), e.h);
        assert_eq!(e.u.mul(&e.u_inv), DenseMatrix::identity(3));
        // same lattice, different generators
        let m2 = DenseMatrix::from_i64(&[vec![2, 8], vec![0, 5], vec![2, 3]]);
        let e2 = echelon(&m2);
        assert_eq!(e.rank, e2.rank);
        assert_eq!(e.h.select_rows(&[0, 1]), e2.h.select_rows(&[0, 1]));
    }

    #[test]
    fn kernel_and_membership() {
        let m = DenseMatrix::from_i64(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let k = integer_kernel(&m);
        assert_eq!(k.rows(), 1);
        let v = k.row(0);
        assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        let lat = DenseMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        let e = echelon(&lat);
        assert!(reduce_by_echelon(&[b(4), b(-3)], &e.h, e.rank, &e.pivots).iter().all(|x| x.is_zero()));
        assert!(!reduce_by_echelon(&[b(1), b(0)], &e.h, e.rank, &e.pivots).iter().all(|x| x.is_zero()));
    }
}
