//! Inverse persistence over a tower of finitely generated abelian groups:
//! persistent subgroups `H_{n,m}`, error quotients `E_{n,m}`, the
//! Mittag-Leffler index and horizon-truncated limits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::homology::{
    echelon, integer_json, smith_normal_form, DenseMatrix, FgAbelianGroup, GroupHom, HomologyError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersistenceError {
    #[error("levels {n}..{m} are outside the tower {first}..{last}")]
    OutOfRange { n: usize, m: usize, first: usize, last: usize },
    #[error("bonding {0} does not compose with its neighbour")]
    NotComposable(usize),
    #[error("direct errors need a tower with a constant bonding map")]
    NotConstant,
    #[error("{0}")]
    IllDefined(String),
    #[error("errors at level {0} did not stabilize within the horizon")]
    Uncertified(usize),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// `H_1 ← H_2 ← …`, numbered from `first_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTower {
    first_level: usize,
    groups: Vec<FgAbelianGroup>,
    /// `bondings[i]: H_{first+i+1} → H_{first+i}`.
    bondings: Vec<GroupHom>,
    constant_bonding: bool,
}

impl GroupTower {
    pub fn new(first_level: usize, groups: Vec<FgAbelianGroup>, bondings: Vec<GroupHom>) -> Result<Self, PersistenceError> {
        if groups.is_empty() || bondings.len() + 1 != groups.len() {
            return Err(PersistenceError::NotComposable(0));
        }
        for (i, b) in bondings.iter().enumerate() {
            if b.target() != &groups[i] || b.source() != &groups[i + 1] {
                return Err(PersistenceError::NotComposable(first_level + i));
            }
        }
        let constant_bonding = groups.windows(2).all(|w| w[0] == w[1]) && bondings.windows(2).all(|w| w[0] == w[1]);
        Ok(GroupTower { first_level, groups, bondings, constant_bonding })
    }

    /// `levels` copies of `bonding: G → G`.
    pub fn constant(first_level: usize, levels: usize, bonding: GroupHom) -> Result<Self, PersistenceError> {
        if bonding.source() != bonding.target() {
            return Err(PersistenceError::NotComposable(first_level));
        }
        let group = bonding.source().clone();
        Self::new(first_level, vec![group; levels], vec![bonding; levels.saturating_sub(1)])
    }

    pub fn first_level(&self) -> usize {
        self.first_level
    }

    pub fn last_level(&self) -> usize {
        self.first_level + self.groups.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.constant_bonding
    }

    pub fn group(&self, n: usize) -> Option<&FgAbelianGroup> {
        self.groups.get(n.checked_sub(self.first_level)?)
    }

    pub fn groups(&self) -> &[FgAbelianGroup] {
        &self.groups
    }

    /// `q_{n,n+1}`.
    pub fn bonding(&self, n: usize) -> Option<&GroupHom> {
        self.bondings.get(n.checked_sub(self.first_level)?)
    }

    pub fn bondings(&self) -> &[GroupHom] {
        &self.bondings
    }

    fn check(&self, n: usize, m: usize) -> Result<(), PersistenceError> {
        if n < self.first_level || m > self.last_level() || n > m {
            return Err(PersistenceError::OutOfRange { n, m, first: self.first_level, last: self.last_level() });
        }
        Ok(())
    }

    /// `q_{n,m} = q_{n,n+1} ∘ … ∘ q_{m−1,m}`; the identity when `n = m`.
    pub fn composite(&self, n: usize, m: usize) -> Result<GroupHom, PersistenceError> {
        self.check(n, m)?;
        let mut acc = GroupHom::identity(self.group(m).unwrap().clone());
        for k in (n..m).rev() {
            acc = self.bonding(k).unwrap().compose(&acc)?;
        }
        Ok(acc)
    }
}

/// A subgroup of `ℤ^k / R` stored as the lattice it spans together with `R`,
/// in row Hermite normal form. Equal subgroups have identical bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    ambient: FgAbelianGroup,
    basis: DenseMatrix,
    pivots: Vec<usize>,
}

impl Subgroup {
    /// The subgroup generated by the given columns.
    pub fn generated_by(ambient: &FgAbelianGroup, columns: &DenseMatrix) -> Self {
        let k = ambient.generator_count();
        assert_eq!(columns.rows(), k, "generators live in the ambient coordinates");
        let stacked = columns.transpose().stack(&ambient.relations());
        let e = echelon(&stacked);
        let rows: Vec<usize> = (0..e.rank).collect();
        Subgroup { ambient: ambient.clone(), basis: e.h.select_rows(&rows), pivots: e.pivots }
    }

    pub fn whole(ambient: &FgAbelianGroup) -> Self {
        Self::generated_by(ambient, &DenseMatrix::identity(ambient.generator_count()))
    }

    pub fn ambient(&self) -> &FgAbelianGroup {
        &self.ambient
    }

    /// Canonical generators as rows, relations of the ambient included.
    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let rest = crate::homology::matrix::reduce_by_echelon(x, &self.basis, self.basis.rows(), &self.pivots);
        rest.iter().all(|v| v.is_zero())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.ambient == other.ambient && (0..self.basis.rows()).all(|r| other.contains(self.basis.row(r)))
    }

    /// Integer coefficients expressing a lattice vector in the basis rows.
    fn solve(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = x.to_vec();
        let mut coeffs = Vec::with_capacity(self.basis.rows());
        for r in 0..self.basis.rows() {
            let col = self.pivots[r];
            let (q, rem) = rest[col].div_rem(self.basis.get(r, col));
            if !rem.is_zero() {
                return None;
            }
            for (v, b) in rest.iter_mut().zip(self.basis.row(r)) {
                *v -= &q * b;
            }
            coeffs.push(q);
        }
        rest.iter().all(|v| v.is_zero()).then_some(coeffs)
    }

    /// The subgroup as an abstract group.
    pub fn abstract_group(&self) -> FgAbelianGroup {
        let relations = self.ambient.relations();
        let r = self.basis.rows();
        let rows: Vec<Vec<BigInt>> = (0..relations.rows())
            .map(|i| self.solve(relations.row(i)).expect("relations lie in the subgroup lattice"))
            .collect();
        let presentation = DenseMatrix::from_rows(rows, r);
        let smith = smith_normal_form(&presentation);
        let rank = r - smith.rank();
        FgAbelianGroup::new(rank, smith.invariant_factors()).expect("Smith diagonal is a divisibility chain")
    }

    /// Canonical generators that are nonzero in the ambient group.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        (0..self.basis.rows())
            .map(|r| self.basis.row(r).to_vec())
            .filter(|row| !self.ambient.is_zero_element(row))
            .collect()
    }
}

/// `G / S` with its Smith coordinates.
#[derive(Debug, Clone)]
pub struct Quotient {
    group: FgAbelianGroup,
    /// `y = x·Q` diagonalizes the subgroup lattice.
    q: DenseMatrix,
    q_inv: DenseMatrix,
    kept: Vec<usize>,
}

impl Quotient {
    pub fn new(sub: &Subgroup) -> Self {
        let k = sub.ambient.generator_count();
        let smith = smith_normal_form(&sub.basis);
        let orders: Vec<BigInt> = (0..k).map(|i| smith.diagonal.get(i).cloned().unwrap_or_default()).collect();
        let kept: Vec<usize> = (0..k).filter(|&i| !orders[i].is_one()).collect();
        let torsion = kept.iter().map(|&i| orders[i].clone()).filter(|d| !d.is_zero()).collect();
        let rank = kept.iter().filter(|&&i| orders[i].is_zero()).count();
        let group = FgAbelianGroup::new(rank, torsion).expect("Smith diagonal is a divisibility chain");
        Quotient { group, q: smith.q, q_inv: smith.q_inv, kept }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    /// Class of an ambient vector in the quotient generators.
    pub fn class_of(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.q.vec_mul(x);
        let mut out: Vec<BigInt> = self.kept.iter().map(|&i| y[i].clone()).collect();
        self.group.reduce(&mut out);
        out
    }

    /// Ambient representative of quotient generator `j`.
    pub fn representative(&self, j: usize) -> Vec<BigInt> {
        self.q_inv.row(self.kept[j]).to_vec()
    }

    /// The map `[x] ↦ [f(x)]` into another quotient, with `f` given by an
    /// ambient matrix.
    fn map_to(&self, target: &Quotient, f: impl Fn(&[BigInt]) -> Vec<BigInt>) -> Result<GroupHom, PersistenceError> {
        let cols: Vec<Vec<BigInt>> =
            (0..self.kept.len()).map(|j| target.class_of(&f(&self.representative(j)))).collect();
        let mut m = DenseMatrix::zeros(target.group.generator_count(), cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            for (i, v) in c.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        GroupHom::new(self.group.clone(), target.group.clone(), m)
            .map_err(|e| PersistenceError::IllDefined(e.to_string()))
    }
}

/// `H_{n,m} = q_{n,m}(H_m) ⊆ H_n`.
pub fn persistent_group(tower: &GroupTower, n: usize, m: usize) -> Result<Subgroup, PersistenceError> {
    let q = tower.composite(n, m)?;
    Ok(Subgroup::generated_by(tower.group(n).unwrap(), q.matrix()))
}

/// `E_{n,m} = H_n / H_{n,m}`.
pub fn error_group(tower: &GroupTower, n: usize, m: usize) -> Result<Quotient, PersistenceError> {
    Ok(Quotient::new(&persistent_group(tower, n, m)?))
}

/// `g_{m,m+1}: E_{n,m+1} → E_{n,m}`, `h + H_{n,m+1} ↦ h + H_{n,m}`.
pub fn error_bonding(tower: &GroupTower, n: usize, m: usize) -> Result<GroupHom, PersistenceError> {
    let coarse = persistent_group(tower, n, m)?;
    let fine = persistent_group(tower, n, m + 1)?;
    if !fine.is_subgroup_of(&coarse) {
        return Err(PersistenceError::IllDefined(format!("H_{{{n},{}}} is not inside H_{{{n},{m}}}", m + 1)));
    }
    Quotient::new(&fine).map_to(&Quotient::new(&coarse), |x| x.to_vec())
}

/// `l_{m,m+1}: E_{n,m} → E_{n,m+1}`, `[h] ↦ [p*(h)]`, for constant towers.
pub fn direct_error_bonding(tower: &GroupTower, n: usize, m: usize) -> Result<GroupHom, PersistenceError> {
    if !tower.is_constant() {
        return Err(PersistenceError::NotConstant);
    }
    let coarse = persistent_group(tower, n, m)?;
    let fine = persistent_group(tower, n, m + 1)?;
    let f = tower.bonding(n).ok_or(PersistenceError::NotConstant)?;
    for r in 0..coarse.basis().rows() {
        if !fine.contains(&f.matrix().mul_vec(coarse.basis().row(r))) {
            return Err(PersistenceError::IllDefined(format!(
                "p* does not carry H_{{{n},{m}}} into H_{{{n},{}}}",
                m + 1
            )));
        }
    }
    Quotient::new(&coarse).map_to(&Quotient::new(&fine), |x| f.matrix().mul_vec(x))
}

/// Least `m ∈ [n, horizon)` with `H_{n,r} = H_{n,m}` for every `r ∈ (m, horizon]`.
pub fn ml_index(tower: &GroupTower, n: usize, horizon: usize) -> Result<Option<usize>, PersistenceError> {
    tower.check(n, horizon)?;
    let chain = (n..=horizon).map(|m| persistent_group(tower, n, m)).collect::<Result<Vec<_>, _>>()?;
    let last = chain.last().unwrap();
    // the chain decreases, so equality with the last term is enough
    Ok((n..horizon).find(|&m| &chain[m - n] == last))
}

#[derive(Debug, Clone)]
pub struct Limit {
    pub subgroup: Subgroup,
    pub stabilized_at: Option<usize>,
}

/// `⋂_{m ≤ horizon} H_{n,m} = H_{n,horizon}`, certified when the chain
/// stabilizes inside the horizon.
pub fn limit_subgroup(tower: &GroupTower, n: usize, horizon: usize) -> Result<Limit, PersistenceError> {
    Ok(Limit { subgroup: persistent_group(tower, n, horizon)?, stabilized_at: ml_index(tower, n, horizon)? })
}

#[derive(Debug, Clone)]
pub struct RealError {
    pub quotient: Quotient,
    pub certified: bool,
}

/// `E_n = H_n / q_n(H)`, exact only when certified.
pub fn real_error(tower: &GroupTower, n: usize, horizon: usize) -> Result<RealError, PersistenceError> {
    let limit = limit_subgroup(tower, n, horizon)?;
    Ok(RealError { quotient: Quotient::new(&limit.subgroup), certified: limit.stabilized_at.is_some() })
}

#[derive(Debug, Clone)]
pub struct ErrorTower {
    pub base_level: usize,
    /// `E_{n,m}` for `m = n+1 ..= horizon`.
    pub errors: Vec<FgAbelianGroup>,
    /// `g_{m,m+1}` for `m = n+1 .. horizon`.
    pub inverse_maps: Vec<GroupHom>,
    pub direct_maps: Option<Vec<GroupHom>>,
    /// Least `m` from which every `g` is an isomorphism.
    pub stable_from: Option<usize>,
}

impl ErrorTower {
    pub fn limit(&self) -> Option<&FgAbelianGroup> {
        self.stable_from.map(|m| &self.errors[m - self.base_level - 1])
    }
}

pub fn inductive_error_tower(tower: &GroupTower, n: usize, horizon: usize) -> Result<ErrorTower, PersistenceError> {
    tower.check(n, horizon)?;
    let errors = (n + 1..=horizon)
        .map(|m| error_group(tower, n, m).map(|q| q.group))
        .collect::<Result<Vec<_>, _>>()?;
    let inverse_maps = (n + 1..horizon).map(|m| error_bonding(tower, n, m)).collect::<Result<Vec<_>, _>>()?;
    let direct_maps = if tower.is_constant() {
        Some((n + 1..horizon).map(|m| direct_error_bonding(tower, n, m)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let mut stable_from = None;
    if !inverse_maps.is_empty() {
        let tail = inverse_maps.iter().rposition(|g| !g.is_isomorphism());
        stable_from = match tail {
            None => Some(n + 1),
            Some(k) if k + 1 < inverse_maps.len() => Some(n + 2 + k),
            Some(_) => None,
        };
    }
    Ok(ErrorTower { base_level: n, errors, inverse_maps, direct_maps, stable_from })
}

/// `φ: E_n → E_n^i`, `h + q_n(H) ↦ h + H_{n,m}` into the stable stage.
pub fn embed_real_into_inductive(tower: &GroupTower, n: usize, horizon: usize) -> Result<GroupHom, PersistenceError> {
    let real = limit_subgroup(tower, n, horizon)?;
    let inductive = inductive_error_tower(tower, n, horizon)?;
    let (Some(_), Some(stable)) = (real.stabilized_at, inductive.stable_from) else {
        return Err(PersistenceError::Uncertified(n));
    };
    let stage = persistent_group(tower, n, stable)?;
    Quotient::new(&real.subgroup).map_to(&Quotient::new(&stage), |x| x.to_vec())
}

fn matrix_json(m: &DenseMatrix) -> serde_json::Value {
    (0..m.rows()).map(|i| m.row(i).iter().map(integer_json).collect::<Vec<_>>()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SubgroupReport {
    pub generators: serde_json::Value,
    pub group: FgAbelianGroup,
}

impl From<&Subgroup> for SubgroupReport {
    fn from(s: &Subgroup) -> Self {
        let gens = s.generators();
        SubgroupReport {
            generators: gens.iter().map(|g| g.iter().map(integer_json).collect::<Vec<_>>()).collect(),
            group: s.abstract_group(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub m: usize,
    #[serde(rename = "H_nm")]
    pub persistent: SubgroupReport,
    #[serde(rename = "E_nm")]
    pub error: FgAbelianGroup,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub n: usize,
    pub horizon: usize,
    #[serde(rename = "H_n")]
    pub group: FgAbelianGroup,
    pub stages: Vec<StageReport>,
    pub ml_index: Option<usize>,
    pub limit_subgroup: SubgroupReport,
    pub stabilized: bool,
    pub real_error: FgAbelianGroup,
    pub real_error_certified: bool,
    pub inductive: InductiveReport,
    pub embedding: Option<EmbeddingReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductiveReport {
    pub errors: Vec<FgAbelianGroup>,
    pub inverse_maps: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_maps: Option<Vec<serde_json::Value>>,
    pub stable_from: Option<usize>,
    pub limit: Option<FgAbelianGroup>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub matrix: serde_json::Value,
    pub injective: bool,
    pub isomorphism: bool,
}

/// Everything computed for level `n` up to `horizon`.
pub fn level_report(tower: &GroupTower, n: usize, horizon: usize) -> Result<LevelReport, PersistenceError> {
    let stages = (n + 1..=horizon)
        .map(|m| {
            let sub = persistent_group(tower, n, m)?;
            Ok(StageReport { m, persistent: (&sub).into(), error: Quotient::new(&sub).group })
        })
        .collect::<Result<Vec<_>, PersistenceError>>()?;
    let limit = limit_subgroup(tower, n, horizon)?;
    let real = real_error(tower, n, horizon)?;
    let inductive = inductive_error_tower(tower, n, horizon)?;
    let embedding = match embed_real_into_inductive(tower, n, horizon) {
        Ok(phi) => Some(EmbeddingReport {
            matrix: matrix_json(phi.matrix()),
            injective: phi.is_injective(),
            isomorphism: phi.is_isomorphism(),
        }),
        Err(PersistenceError::Uncertified(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(LevelReport {
        n,
        horizon,
        group: tower.group(n).unwrap().clone(),
        stages,
        ml_index: limit.stabilized_at,
        limit_subgroup: (&limit.subgroup).into(),
        stabilized: limit.stabilized_at.is_some(),
        real_error: real.quotient.group.clone(),
        real_error_certified: real.certified,
        inductive: InductiveReport {
            errors: inductive.errors.clone(),
            inverse_maps: inductive.inverse_maps.iter().map(|g| matrix_json(g.matrix())).collect(),
            direct_maps: inductive.direct_maps.as_ref().map(|ls| ls.iter().map(|l| matrix_json(l.matrix())).collect()),
            stable_from: inductive.stable_from,
            limit: inductive.limit().cloned(),
        },
        embedding,
    })
}
