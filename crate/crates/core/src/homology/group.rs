use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{echelon, integer_kernel, DenseMatrix};
use super::HomologyError;

/// Integers print as JSON numbers when they fit in an `i64`, else as strings.
pub(crate) fn integer_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn integer_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// `ℤ^rank ⊕ ℤ/d_1 ⊕ … ⊕ ℤ/d_k` with `1 < d_1 | d_2 | … | d_k`.
///
/// Generators are numbered torsion first, then free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FgAbelianGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self, HomologyError> {
        for w in torsion.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(HomologyError::Invalid(format!("torsion {} does not divide {}", w[0], w[1])));
            }
        }
        if torsion.iter().any(|d| *d <= BigInt::one()) {
            return Err(HomologyError::Invalid("torsion coefficients must exceed 1".into()));
        }
        Ok(FgAbelianGroup { rank, torsion })
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        match order {
            0 => Self::free(1),
            1 => Self::trivial(),
            d => FgAbelianGroup { rank: 0, torsion: vec![BigInt::from(d)] },
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn generator_count(&self) -> usize {
        self.torsion.len() + self.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.generator_count() == 0
    }

    /// Order of generator `i`; zero for a free generator.
    pub fn order(&self, i: usize) -> BigInt {
        self.torsion.get(i).cloned().unwrap_or_default()
    }

    /// Reduces torsion coordinates into `[0, d)`.
    pub fn reduce(&self, coords: &mut [BigInt]) {
        for (c, d) in coords.iter_mut().zip(&self.torsion) {
            *c = c.mod_floor(d);
        }
    }

    pub fn is_zero_element(&self, coords: &[BigInt]) -> bool {
        coords.iter().enumerate().all(|(i, c)| {
            let d = self.order(i);
            if d.is_zero() {
                c.is_zero()
            } else {
                c.is_multiple_of(&d)
            }
        })
    }

    /// Relation rows `d_i e_i` of the torsion generators.
    pub fn relations(&self) -> DenseMatrix {
        let n = self.generator_count();
        let mut r = DenseMatrix::zeros(self.torsion.len(), n);
        for (i, d) in self.torsion.iter().enumerate() {
            r.set(i, i, d.clone());
        }
        r
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Serialize for FgAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_json::json!({
            "rank": self.rank,
            "torsion": self.torsion.iter().map(integer_json).collect::<Vec<_>>(),
        })
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rank: usize,
            torsion: Vec<serde_json::Value>,
        }
        let raw = Raw::deserialize(d)?;
        let torsion = raw
            .torsion
            .iter()
            .map(|v| integer_from_json(v).ok_or_else(|| serde::de::Error::custom("bad torsion coefficient")))
            .collect::<Result<Vec<_>, _>>()?;
        FgAbelianGroup::new(raw.rank, torsion).map_err(serde::de::Error::custom)
    }
}

/// A homomorphism in the chosen generators: column `j` holds the image of
/// source generator `j`, with torsion entries reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupHom {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    matrix: DenseMatrix,
}

impl GroupHom {
    pub fn new(source: FgAbelianGroup, target: FgAbelianGroup, mut matrix: DenseMatrix) -> Result<Self, HomologyError> {
        if matrix.rows() != target.generator_count() || matrix.cols() != source.generator_count() {
            return Err(HomologyError::Invalid(format!(
                "matrix is {}x{}, groups need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generator_count(),
                source.generator_count()
            )));
        }
        for j in 0..matrix.cols() {
            let mut col = matrix.column(j);
            target.reduce(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                matrix.set(i, j, v);
            }
        }
        for (j, d) in source.torsion().iter().enumerate() {
            let scaled: Vec<BigInt> = matrix.column(j).iter().map(|v| v * d).collect();
            if !target.is_zero_element(&scaled) {
                return Err(HomologyError::IllDefined(j));
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn identity(group: FgAbelianGroup) -> Self {
        let n = group.generator_count();
        GroupHom { source: group.clone(), target: group, matrix: DenseMatrix::identity(n) }
    }

    pub fn zero(source: FgAbelianGroup, target: FgAbelianGroup) -> Self {
        let matrix = DenseMatrix::zeros(target.generator_count(), source.generator_count());
        GroupHom { source, target, matrix }
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn apply(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut out = self.matrix.mul_vec(coords);
        self.target.reduce(&mut out);
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, HomologyError> {
        if inner.target != self.source {
            return Err(HomologyError::Mismatch);
        }
        GroupHom::new(inner.source.clone(), self.target.clone(), self.matrix.mul(&inner.matrix))
    }

    pub fn is_surjective(&self) -> bool {
        let n = self.target.generator_count();
        let rows = self.matrix.transpose().stack(&self.target.relations());
        let e = echelon(&rows);
        e.rank == n && (0..n).all(|r| e.h.get(r, e.pivots[r]).is_one())
    }

    /// Generators of `{x : f(x) = 0}` as integer vectors in source coordinates.
    pub fn kernel_generators(&self) -> Vec<Vec<BigInt>> {
        let k = self.source.generator_count();
        let relations = self.target.relations();
        let mut columns = self.matrix.clone();
        if relations.rows() > 0 {
            let mut wide = DenseMatrix::zeros(columns.rows(), k + relations.rows());
            for i in 0..columns.rows() {
                for j in 0..k {
                    wide.set(i, j, columns.get(i, j).clone());
                }
                for t in 0..relations.rows() {
                    wide.set(i, k + t, relations.get(t, i).clone());
                }
            }
            columns = wide;
        }
        let kernel = integer_kernel(&columns);
        (0..kernel.rows()).map(|r| kernel.row(r)[..k].to_vec()).collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_generators().iter().all(|x| self.source.is_zero_element(x))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

impl Serialize for GroupHom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Value>> =
            (0..self.matrix.rows()).map(|i| self.matrix.row(i).iter().map(integer_json).collect()).collect();
        serde_json::json!({ "source": self.source, "target": self.target, "matrix": rows }).serialize(s)
    }
}

/// Sign of the permutation sorting `v`, or `None` when `v` repeats a value.
pub(crate) fn sort_with_sign(v: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn serialization_shape() {
        let g = FgAbelianGroup::new(2, vec![b(2)]).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"rank":2,"torsion":[2]}"#);
        let back: FgAbelianGroup = serde_json::from_str(r#"{"rank":2,"torsion":[2]}"#).unwrap();
        assert_eq!(back, g);
        assert!(FgAbelianGroup::new(0, vec![b(2), b(3)]).is_err());
        assert_eq!(g.to_string(), "Z^2 + Z/2");
    }

    #[test]
    fn multiplication_by_two_on_z() {
        let z = FgAbelianGroup::free(1);
        let two = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_i64(&[vec![2]])).unwrap();
        assert!(two.is_injective());
        assert!(!two.is_surjective());
        let minus = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_i64(&[vec![-1]])).unwrap();
        assert!(minus.is_isomorphism());
        assert_eq!(two.compose(&two).unwrap().matrix(), &DenseMatrix::from_i64(&[vec![4]]));
    }

    #[test]
    fn torsion_maps() {
        let z2 = FgAbelianGroup::cyclic(2);
        let z4 = FgAbelianGroup::cyclic(4);
        let z = FgAbelianGroup::free(1);
        // Z -> Z/2 onto, not injective
        let q = GroupHom::new(z.clone(), z2.clone(), DenseMatrix::from_i64(&[vec![3]])).unwrap();
        assert_eq!(q.matrix(), &DenseMatrix::from_i64(&[vec![1]]));
        assert!(q.is_surjective() && !q.is_injective());
        // Z/2 -> Z/4, 1 -> 2 injective
        let i = GroupHom::new(z2.clone(), z4.clone(), DenseMatrix::from_i64(&[vec![2]])).unwrap();
        assert!(i.is_injective() && !i.is_surjective());
        // Z/2 -> Z/4, 1 -> 1 is not well defined
        assert!(GroupHom::new(z2.clone(), z4, DenseMatrix::from_i64(&[vec![1]])).is_err());
        // Z/2 -> Z must vanish
        assert!(GroupHom::new(z2, z, DenseMatrix::from_i64(&[vec![1]])).is_err());
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(sort_with_sign(&mut [0, 1, 2]), Some(1));
        assert_eq!(sort_with_sign(&mut [1, 0, 2]), Some(-1));
        assert_eq!(sort_with_sign(&mut [2, 0, 1]), Some(1));
        assert_eq!(sort_with_sign(&mut [1, 1]), None);
    }
}
