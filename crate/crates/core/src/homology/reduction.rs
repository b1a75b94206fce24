//! Sparse elimination of unit entries in a three-term chain complex
//! `C_{p+1} → C_p → C_{p−1}`.
//!
//! Every eliminated pair `(a, b)` with `∂b = λa + …`, `λ = ±1`, is logged so
//! that chains in degree `p` can be pushed to the reduced complex (`π`) and
//! pulled back (`ι`).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::{DenseMatrix, IntMatrix};

pub(crate) type Chain = BTreeMap<usize, BigInt>;

#[derive(Debug, Clone)]
pub(crate) enum Step {
    /// Pair in degrees `(p−1, p)`: `π` forgets `cell`, `ι` restores it from the
    /// row of the eliminated `(p−1)`-cell.
    Drop { cell: usize, lambda: BigInt, cob: Vec<(usize, BigInt)> },
    /// Pair in degrees `(p, p+1)`: `π` folds `cell` along the boundary of its
    /// partner, `ι` is the inclusion.
    Fold { cell: usize, lambda: BigInt, column: Vec<(usize, BigInt)> },
}

#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub steps: Vec<Step>,
    /// Original indices of the surviving p-cells, ascending.
    pub survivors: Vec<usize>,
    /// Reduced `∂_p` restricted to nonzero rows.
    pub lower: DenseMatrix,
    /// Reduced `∂_{p+1}` restricted to nonzero columns.
    pub upper: DenseMatrix,
}

struct Work {
    cols: Vec<Option<Vec<(usize, BigInt)>>>,
    rows: Vec<Option<BTreeSet<usize>>>,
}

impl Work {
    fn new(m: &IntMatrix) -> Self {
        let mut rows = vec![Some(BTreeSet::new()); m.rows()];
        let cols = (0..m.cols())
            .map(|j| {
                let col = m.column(j).to_vec();
                for (i, _) in &col {
                    rows[*i].as_mut().unwrap().insert(j);
                }
                Some(col)
            })
            .collect();
        Work { cols, rows }
    }

    fn entry(&self, i: usize, j: usize) -> BigInt {
        let col = self.cols[j].as_ref().expect("live column");
        col.binary_search_by_key(&i, |(r, _)| *r).map(|k| col[k].1.clone()).unwrap_or_default()
    }

    /// `col[c] += k · src`
    fn axpy(&mut self, c: usize, k: &BigInt, src: &[(usize, BigInt)]) {
        let old = self.cols[c].take().expect("live column");
        let mut merged = Vec::with_capacity(old.len() + src.len());
        let (mut x, mut y) = (old.into_iter().peekable(), src.iter().peekable());
        loop {
            match (x.peek(), y.peek()) {
                (None, None) => break,
                (Some(_), None) => merged.push(x.next().unwrap()),
                (None, Some(_)) => {
                    let (r, v) = y.next().unwrap();
                    merged.push((*r, k * v));
                    self.rows[*r].as_mut().unwrap().insert(c);
                }
                (Some((rx, _)), Some((ry, _))) => {
                    if rx < ry {
                        merged.push(x.next().unwrap());
                    } else if ry < rx {
                        let (r, v) = y.next().unwrap();
                        merged.push((*r, k * v));
                        self.rows[*r].as_mut().unwrap().insert(c);
                    } else {
                        let (r, v) = x.next().unwrap();
                        let (_, w) = y.next().unwrap();
                        let sum = v + k * w;
                        if sum.is_zero() {
                            self.rows[r].as_mut().unwrap().remove(&c);
                        } else {
                            merged.push((r, sum));
                        }
                    }
                }
            }
        }
        self.cols[c] = Some(merged);
    }

    fn remove_col(&mut self, c: usize) -> Vec<(usize, BigInt)> {
        let col = self.cols[c].take().unwrap_or_default();
        for (r, _) in &col {
            if let Some(row) = self.rows[*r].as_mut() {
                row.remove(&c);
            }
        }
        col
    }

    fn remove_row(&mut self, r: usize) {
        if let Some(row) = self.rows[r].take() {
            for c in row {
                if let Some(col) = self.cols[c].as_mut() {
                    col.retain(|(i, _)| *i != r);
                }
            }
        }
    }

    /// Eliminates the unit entry `(a, b)`; returns `λ`, the row of `a` without
    /// `b`, and the column of `b`.
    #[allow(clippy::type_complexity)]
    fn eliminate(&mut self, a: usize, b: usize) -> (BigInt, Vec<(usize, BigInt)>, Vec<(usize, BigInt)>) {
        let lambda = self.entry(a, b);
        let column = self.cols[b].clone().expect("live column");
        let others: Vec<usize> = self.rows[a].as_ref().unwrap().iter().copied().filter(|&c| c != b).collect();
        let mut cob = Vec::with_capacity(others.len());
        for c in others {
            let coeff = self.entry(a, c);
            let k = -(&lambda * &coeff);
            self.axpy(c, &k, &column);
            cob.push((c, coeff));
        }
        self.remove_col(b);
        self.remove_row(a);
        (lambda, cob, column)
    }

    /// Next unit pivot: scanning columns upward from `start`, the unit entry
    /// whose row is shortest, lowest row index on ties.
    fn next_pivot(&self, start: usize) -> Option<(usize, usize)> {
        for b in start..self.cols.len() {
            let Some(col) = &self.cols[b] else { continue };
            let best = col
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .map(|(a, _)| (self.rows[*a].as_ref().unwrap().len(), *a))
                .min();
            if let Some((_, a)) = best {
                return Some((a, b));
            }
        }
        None
    }
}

pub(crate) fn reduce(lower: &IntMatrix, upper: &IntMatrix) -> Reduced {
    let mut low = Work::new(lower);
    let mut up = Work::new(upper);
    let mut steps = Vec::new();
    let mut alive = vec![true; lower.cols()];

    // pairs in degrees (p−1, p): columns of `low`, rows of `up`
    loop {
        let mut progressed = false;
        let mut start = 0;
        while let Some((a, b)) = low.next_pivot(start) {
            let (lambda, cob, _) = low.eliminate(a, b);
            up.remove_row(b);
            alive[b] = false;
            steps.push(Step::Drop { cell: b, lambda, cob });
            start = b + 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    // pairs in degrees (p, p+1): rows of `up`, columns of `low`
    loop {
        let mut progressed = false;
        let mut start = 0;
        while let Some((a, b)) = up.next_pivot(start) {
            let (lambda, _, column) = up.eliminate(a, b);
            low.remove_col(a);
            alive[a] = false;
            steps.push(Step::Fold { cell: a, lambda, column });
            start = b + 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }

    let survivors: Vec<usize> = (0..alive.len()).filter(|&c| alive[c]).collect();
    let position: BTreeMap<usize, usize> = survivors.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let low_rows: Vec<usize> = (0..low.rows.len())
        .filter(|&r| low.rows[r].as_ref().map_or(false, |s| !s.is_empty()))
        .collect();
    let low_pos: BTreeMap<usize, usize> = low_rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let mut dense_low = DenseMatrix::zeros(low_rows.len(), survivors.len());
    for (j, &c) in survivors.iter().enumerate() {
        if let Some(col) = &low.cols[c] {
            for (r, v) in col {
                dense_low.set(low_pos[r], j, v.clone());
            }
        }
    }
    let up_cols: Vec<usize> = (0..up.cols.len())
        .filter(|&c| up.cols[c].as_ref().map_or(false, |col| !col.is_empty()))
        .collect();
    let mut dense_up = DenseMatrix::zeros(survivors.len(), up_cols.len());
    for (j, &c) in up_cols.iter().enumerate() {
        for (r, v) in up.cols[c].as_ref().unwrap() {
            dense_up.set(position[r], j, v.clone());
        }
    }
    Reduced { steps, survivors, lower: dense_low, upper: dense_up }
}

impl Reduced {
    /// `π`: a p-chain of the original complex as a chain of survivors.
    pub fn project(&self, chain: &Chain) -> Chain {
        let mut x = chain.clone();
        for step in &self.steps {
            match step {
                Step::Drop { cell, .. } => {
                    x.remove(cell);
                }
                Step::Fold { cell, lambda, column } => {
                    let Some(xa) = x.get(cell).cloned() else { continue };
                    let k = -(xa * lambda);
                    for (r, v) in column {
                        let e = x.entry(*r).or_default();
                        *e += &k * v;
                        if e.is_zero() {
                            x.remove(r);
                        }
                    }
                }
            }
        }
        x
    }

    /// `ι`: a chain of survivors as a p-chain of the original complex.
    pub fn lift(&self, chain: &Chain) -> Chain {
        let mut y = chain.clone();
        for step in self.steps.iter().rev() {
            if let Step::Drop { cell, lambda, cob } = step {
                let t: BigInt = cob.iter().filter_map(|(c, v)| y.get(c).map(|yc| yc * v)).sum();
                if !t.is_zero() {
                    y.insert(*cell, -(lambda * t));
                }
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: &[&[(usize, i64)]]) -> IntMatrix {
        IntMatrix::from_columns(
            rows,
            cols.iter().map(|c| c.iter().map(|&(r, v)| (r, BigInt::from(v))).collect()).collect(),
        )
    }

    #[test]
    fn hollow_triangle_keeps_one_cycle() {
        // vertices 0,1,2; edges 01, 02, 12
        let d1 = m(3, &[&[(0, -1), (1, 1)], &[(0, -1), (2, 1)], &[(1, -1), (2, 1)]]);
        let d2 = IntMatrix::zeros(3, 0);
        let r = reduce(&d1, &d2);
        assert_eq!(r.survivors.len(), 1);
        assert!(r.lower.is_zero());
        let cycle: Chain = [(0, 1), (1, -1), (2, 1)].into_iter().map(|(k, v)| (k, BigInt::from(v))).collect();
        let projected = r.project(&cycle);
        let back = r.lift(&projected);
        assert_eq!(back, cycle);
    }

    #[test]
    fn filled_triangle_reduces_to_nothing() {
        let d1 = m(3, &[&[(0, -1), (1, 1)], &[(0, -1), (2, 1)], &[(1, -1), (2, 1)]]);
        let d2 = m(3, &[&[(0, 1), (1, -1), (2, 1)]]);
        let r = reduce(&d1, &d2);
        assert!(r.survivors.is_empty());
        assert_eq!(r.upper.cols(), 0);
    }
}
