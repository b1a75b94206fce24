//! Integral simplicial homology with explicit cycle representatives and
//! induced maps.

mod group;
pub mod matrix;
mod reduction;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use group::{FgAbelianGroup, GroupHom};
pub(crate) use group::integer_json;
pub use matrix::{echelon, integer_kernel, smith_normal_form, DenseMatrix, Echelon, IntMatrix, Smith};

use crate::complexes::{SimplicialComplex, SimplicialMap};
use group::sort_with_sign;
use reduction::{Chain, Reduced};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("degree {degree} needs simplices of dimension {needed}, complex stores up to {stored}")]
    InsufficientDimension { degree: usize, needed: usize, stored: usize },
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("chain mentions a simplex outside the complex")]
    UnknownSimplex,
    #[error("map and homology bases do not share complexes or groups")]
    Mismatch,
    #[error("image of torsion generator {0} has the wrong order")]
    IllDefined(usize),
    #[error("{0}")]
    Invalid(String),
}

/// A p-chain as sorted `(simplex index, coefficient)` pairs.
pub type SparseChain = Vec<(usize, BigInt)>;

/// `∂_p: C_p → C_{p−1}` with `∂[v_0…v_p] = Σ (−1)^i [v_0…v̂_i…v_p]`.
pub fn boundary_matrix(complex: &SimplicialComplex, p: usize) -> IntMatrix {
    if p == 0 {
        return IntMatrix::zeros(0, complex.count(0));
    }
    let columns = complex
        .simplices(p)
        .iter()
        .map(|s| {
            let mut col: Vec<(usize, BigInt)> = (0..s.len())
                .map(|skip| {
                    let face: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                    let row = complex.index_of(&face).expect("face-closed complex");
                    let sign = if skip % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    (row, sign)
                })
                .collect();
            col.sort_by_key(|(r, _)| *r);
            col
        })
        .collect();
    IntMatrix::from_columns(complex.count(p - 1), columns)
}

fn require_degree(complex: &SimplicialComplex, p: usize) -> Result<(), HomologyError> {
    if let Some(cap) = complex.dim_cap() {
        if cap < p + 1 && !complex.is_complete() {
            return Err(HomologyError::InsufficientDimension { degree: p, needed: p + 1, stored: cap });
        }
    }
    Ok(())
}

/// `H_p` together with cycle representatives and a coordinate map.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    complex: Arc<SimplicialComplex>,
    degree: usize,
    group: FgAbelianGroup,
    generators: Vec<SparseChain>,
    reduced: Reduced,
    /// Kernel rows start at `kernel_offset` in the echelon transform.
    kernel_offset: usize,
    u_inv: DenseMatrix,
    p: DenseMatrix,
    kept: Vec<usize>,
}

impl HomologyBasis {
    pub fn compute(complex: Arc<SimplicialComplex>, degree: usize) -> Result<Self, HomologyError> {
        require_degree(&complex, degree)?;
        let lower = boundary_matrix(&complex, degree);
        let upper = boundary_matrix(&complex, degree + 1);
        let reduced = reduction::reduce(&lower, &upper);
        let m = reduced.survivors.len();

        let e = echelon(&reduced.lower.transpose());
        let r = e.rank;
        let z = m - r;
        let mut b = DenseMatrix::zeros(z, reduced.upper.cols());
        for j in 0..reduced.upper.cols() {
            let coords = e.u_inv.vec_mul(&reduced.upper.column(j));
            debug_assert!(coords[..r].iter().all(|c| c.is_zero()), "boundary outside the cycle lattice");
            for i in 0..z {
                b.set(i, j, coords[r + i].clone());
            }
        }
        let smith = smith_normal_form(&b);
        let orders: Vec<BigInt> = (0..z).map(|i| smith.diagonal.get(i).cloned().unwrap_or_default()).collect();
        let kept: Vec<usize> = (0..z).filter(|&i| !orders[i].is_one()).collect();
        let torsion: Vec<BigInt> = kept.iter().map(|&i| orders[i].clone()).filter(|d| !d.is_zero()).collect();
        let rank = kept.len() - torsion.len();
        let group = FgAbelianGroup::new(rank, torsion)?;

        let generators = kept
            .iter()
            .map(|&j| {
                let mut dense = vec![BigInt::zero(); m];
                for i in 0..z {
                    let c = smith.p_inv.get(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    for (d, u) in dense.iter_mut().zip(e.u.row(r + i)) {
                        *d += c * u;
                    }
                }
                let chain: Chain = dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (reduced.survivors[k], v))
                    .collect();
                reduced.lift(&chain).into_iter().collect()
            })
            .collect();

        Ok(HomologyBasis {
            complex,
            degree,
            group,
            generators,
            reduced,
            kernel_offset: r,
            u_inv: e.u_inv,
            p: smith.p,
            kept,
        })
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    /// Cycle representing generator `i`, over simplices of dimension `degree`.
    pub fn generators(&self) -> &[SparseChain] {
        &self.generators
    }

    pub fn boundary_of(&self, chain: &[(usize, BigInt)]) -> Result<SparseChain, HomologyError> {
        let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
        if self.degree == 0 {
            return Ok(Vec::new());
        }
        let simplices = self.complex.simplices(self.degree);
        for (idx, coeff) in chain {
            let s = simplices.get(*idx).ok_or(HomologyError::UnknownSimplex)?;
            for skip in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                let row = self.complex.index_of(&face).ok_or(HomologyError::UnknownSimplex)?;
                let e = acc.entry(row).or_default();
                if skip % 2 == 0 {
                    *e += coeff;
                } else {
                    *e -= coeff;
                }
            }
        }
        Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    /// Coordinates of the class of a cycle in the generators.
    pub fn coordinates(&self, cycle: &[(usize, BigInt)]) -> Result<Vec<BigInt>, HomologyError> {
        if !self.boundary_of(cycle)?.is_empty() {
            return Err(HomologyError::NotACycle);
        }
        let chain: Chain = cycle.iter().filter(|(_, v)| !v.is_zero()).cloned().collect();
        let projected = self.reduced.project(&chain);
        let mut dense = vec![BigInt::zero(); self.reduced.survivors.len()];
        for (cell, v) in projected {
            let k = self.reduced.survivors.binary_search(&cell).map_err(|_| HomologyError::UnknownSimplex)?;
            dense[k] = v;
        }
        let full = self.u_inv.vec_mul(&dense);
        let r = self.kernel_offset;
        if full[..r].iter().any(|c| !c.is_zero()) {
            return Err(HomologyError::NotACycle);
        }
        let smith_coords = self.p.mul_vec(&full[r..]);
        let mut out: Vec<BigInt> = self.kept.iter().map(|&i| smith_coords[i].clone()).collect();
        self.group.reduce(&mut out);
        Ok(out)
    }
}

/// `H_p` of a complex.
pub fn homology_group(complex: &Arc<SimplicialComplex>, degree: usize) -> Result<FgAbelianGroup, HomologyError> {
    Ok(HomologyBasis::compute(complex.clone(), degree)?.group)
}

/// `H_p` read off dense Smith forms of the two boundary matrices, without
/// elimination or representatives.
pub fn homology_by_smith(complex: &SimplicialComplex, degree: usize) -> Result<FgAbelianGroup, HomologyError> {
    require_degree(complex, degree)?;
    let lower = smith_normal_form(&boundary_matrix(complex, degree).to_dense());
    let upper = smith_normal_form(&boundary_matrix(complex, degree + 1).to_dense());
    let rank = complex.count(degree) - lower.rank() - upper.rank();
    FgAbelianGroup::new(rank, upper.invariant_factors())
}

/// Pushes a p-chain of `f.source()` forward along `f`; degenerate simplices
/// vanish.
pub fn push_chain(f: &SimplicialMap, degree: usize, chain: &[(usize, BigInt)]) -> Result<SparseChain, HomologyError> {
    let simplices = f.source().simplices(degree);
    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (idx, coeff) in chain {
        let s = simplices.get(*idx).ok_or(HomologyError::UnknownSimplex)?;
        let mut image: Vec<usize> = s.iter().map(|&v| f.apply(v)).collect();
        let Some(sign) = sort_with_sign(&mut image) else { continue };
        let target = f.target().index_of(&image).ok_or(HomologyError::UnknownSimplex)?;
        let e = acc.entry(target).or_default();
        if sign > 0 {
            *e += coeff;
        } else {
            *e -= coeff;
        }
    }
    Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

/// `f_*: H_p(K) → H_p(L)` in the generators of the two bases.
pub fn induced_map(f: &SimplicialMap, source: &HomologyBasis, target: &HomologyBasis) -> Result<GroupHom, HomologyError> {
    if !Arc::ptr_eq(f.source(), &source.complex)
        || !Arc::ptr_eq(f.target(), &target.complex)
        || source.degree != target.degree
    {
        return Err(HomologyError::Mismatch);
    }
    let columns = source
        .generators
        .iter()
        .map(|g| target.coordinates(&push_chain(f, source.degree, g)?))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = target.group.generator_count();
    let mut matrix = DenseMatrix::zeros(rows, columns.len());
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            matrix.set(i, j, v);
        }
    }
    GroupHom::new(source.group.clone(), target.group.clone(), matrix)
}
