//! The six polyhedral towers over an adjusted ladder, each behind
//! [`TowerKind`], together with their bonding maps and diagram checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::complexes::diagrams::{contiguity, equality, identical_labelled, simplicial, DiagramCheck};
use crate::complexes::{
    barycentric_subdivision, cech_nerve, cech_refinement_map, compose, dowker_diagonal, dowker_lower, dowker_upper,
    inclusion_by_label, last_vertex_map, mccord_complex, nearest_point_map, poset_induced_map, rips_complex,
    subdivided_map, virtual_rips, witness_complex, Budget, ComplexError, DowkerSide, SimplicialComplex,
    SimplicialMap, VertexLabel,
};
use crate::finite_space::{bonding_map, build_finite_space, FinitePoset, PosetError, PosetMap};
use crate::homology::{induced_map, GroupHom, HomologyBasis, HomologyError};
use crate::metric::{AdjustedSequence, Approximation, FiniteMetricSpace};
use crate::persistence::{GroupTower, PersistenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("unknown complex kind {0:?}")]
    UnknownKind(String),
    #[error("level {0} is outside the ladder")]
    Level(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
}

impl TowerError {
    pub fn is_budget(&self) -> bool {
        matches!(self, TowerError::Complex(ComplexError::Budget { .. }) | TowerError::Poset(PosetError::Budget { .. }))
    }
}

type Memo<T> = Mutex<HashMap<(&'static str, usize), Arc<T>>>;

/// Shared state for building towers over one ladder: caps, budgets and
/// memoized posets and complexes, so that maps between levels refer to the
/// same complex instances.
pub struct TowerContext {
    ladder: Arc<AdjustedSequence>,
    dim_cap: usize,
    budget: Budget,
    posets: Mutex<HashMap<usize, Arc<FinitePoset>>>,
    complexes: Memo<SimplicialComplex>,
    poset_maps: Mutex<HashMap<usize, Arc<PosetMap>>>,
}

impl TowerContext {
    /// Complexes keep simplices up to `degree + 1`.
    pub fn new(ladder: Arc<AdjustedSequence>, degree: usize, budget: Budget) -> Self {
        TowerContext {
            ladder,
            dim_cap: degree + 1,
            budget,
            posets: Default::default(),
            complexes: Default::default(),
            poset_maps: Default::default(),
        }
    }

    pub fn ladder(&self) -> &Arc<AdjustedSequence> {
        &self.ladder
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.ladder.reference
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn level(&self, n: usize) -> Result<&Approximation, TowerError> {
        self.ladder.level(n).ok_or(TowerError::Level(n))
    }

    /// `U_{2ε_n}(A_n)`.
    pub fn poset(&self, n: usize) -> Result<Arc<FinitePoset>, TowerError> {
        if let Some(p) = self.posets.lock().unwrap().get(&n) {
            return Ok(p.clone());
        }
        let p = Arc::new(build_finite_space(self.space(), self.level(n)?, None, self.budget.max_elements)?);
        Ok(self.posets.lock().unwrap().entry(n).or_insert(p).clone())
    }

    /// `p_{n,n+1}: U_{n+1} → U_n`.
    pub fn poset_bonding(&self, n: usize) -> Result<Arc<PosetMap>, TowerError> {
        if let Some(m) = self.poset_maps.lock().unwrap().get(&n) {
            return Ok(m.clone());
        }
        let m = Arc::new(bonding_map(self.space(), self.poset(n + 1)?, self.level(n + 1)?, self.poset(n)?, self.level(n)?)?);
        Ok(self.poset_maps.lock().unwrap().entry(n).or_insert(m).clone())
    }

    /// Memoized complex under `key`.
    pub fn complex(
        &self,
        key: &'static str,
        n: usize,
        build: impl FnOnce() -> Result<SimplicialComplex, TowerError>,
    ) -> Result<Arc<SimplicialComplex>, TowerError> {
        if let Some(k) = self.complexes.lock().unwrap().get(&(key, n)) {
            return Ok(k.clone());
        }
        let k = Arc::new(build()?);
        Ok(self.complexes.lock().unwrap().entry((key, n)).or_insert(k).clone())
    }

    /// `R_{2ε_n}(A_n)` truncated at the context cap.
    pub fn rips(&self, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.complex("rips", n, || {
            let a = self.level(n)?;
            Ok(rips_complex(self.space(), &a.subset, &a.epsilon.times(2), self.dim_cap, &self.budget)?)
        })
    }

    /// `R_{2ε_n}(X_ref)` up to triangles.
    pub fn reference_rips(&self, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.complex("reference-rips", n, || {
            let all: Vec<usize> = (0..self.space().len()).collect();
            let bound = self.level(n)?.epsilon.times(2);
            Ok(rips_complex(self.space(), &all, &bound, 2, &self.budget)?)
        })
    }

    /// `R_{2ε_n}(X_ref)` with membership answered on demand.
    pub fn virtual_reference_rips(&self, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.complex("virtual-rips", n, || Ok(virtual_rips(self.space(), &self.level(n)?.epsilon.times(2))))
    }

    /// `K(U_{2ε_n}(A_n))` truncated at the context cap.
    pub fn mccord(&self, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.complex("mccord", n, || Ok(mccord_complex(&*self.poset(n)?, Some(self.dim_cap), &self.budget)?))
    }

    pub fn subdivision_of(
        &self,
        key: &'static str,
        n: usize,
        base: &SimplicialComplex,
    ) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.complex(key, n, || Ok(barycentric_subdivision(base, Some(self.dim_cap), &self.budget)?))
    }
}

/// One way of turning the ladder into a tower of complexes.
pub trait TowerKind: Send + Sync {
    fn name(&self) -> &'static str;

    /// `K_n`.
    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError>;

    /// The bonding `K_{n+1} → K_n`.
    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError>;

    /// The commuting diagrams relating this tower to the reference Rips
    /// system between levels `n` and `n+1`.
    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError>;
}

fn named(prefix: &str, n: usize, what: &str) -> String {
    format!("{prefix}[{n}->{}] {what}", n + 1)
}

/// Folds a failed map construction into a failed check, passing other errors on.
fn checked(name: String, built: Result<SimplicialMap, ComplexError>) -> Result<(DiagramCheck, Option<SimplicialMap>), TowerError> {
    let check = simplicial(&name, &built)?;
    Ok((check, built.ok()))
}

/// `R_{2ε_n}(A_n)` with `p*: a ↦ min q_{A_n}(a)`.
pub struct RipsTower;

impl TowerKind for RipsTower {
    fn name(&self) -> &'static str {
        "rips"
    }

    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        ctx.rips(n)
    }

    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(nearest_point_map(ctx.rips(n + 1)?, ctx.rips(n)?, ctx.space(), ctx.level(n)?)?)
    }

    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError> {
        let mut out = Vec::new();
        let (fine, coarse) = (ctx.rips(n + 1)?, ctx.rips(n)?);
        let (check, p) = checked(named("rips", n, "p* simplicial"), nearest_point_map(fine.clone(), coarse.clone(), ctx.space(), ctx.level(n)?))?;
        out.push(check);
        let Some(p) = p else { return Ok(out) };

        let big = ctx.virtual_reference_rips(n)?;
        let into_big = |k: &Arc<SimplicialComplex>| inclusion_by_label(k.clone(), big.clone(), |l| l.clone());
        let j_n = into_big(&coarse)?;
        let i_j = into_big(&fine)?;
        out.push(contiguity(&named("rips", n, "j_n p* ~ i j_{n+1}"), &compose(&p, &j_n)?, &i_j)?);

        let reference = ctx.reference_rips(n + 1)?;
        let (check, g) = checked(named("rips", n, "g_n simplicial"), nearest_point_map(reference.clone(), coarse.clone(), ctx.space(), ctx.level(n)?))?;
        out.push(check);
        let Some(g) = g else { return Ok(out) };
        let j_next = inclusion_by_label(fine.clone(), reference.clone(), |l| l.clone())?;
        out.push(equality(&named("rips", n, "g_n j_{n+1} = p*"), &compose(&j_next, &g)?, &p)?);
        let i = inclusion_by_label(reference, big, |l| l.clone())?;
        out.push(contiguity(&named("rips", n, "j_n g_n ~ i"), &compose(&g, &j_n)?, &i)?);
        Ok(out)
    }
}

/// `K(U_{2ε_n}(A_n))` with the bonding induced by `p_{n,n+1}`.
pub struct McCordTower;

impl McCordTower {
    /// `ρ: K(U_n) = R′_n → R_n`, a chain of subsets to its largest point.
    fn last_point(ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(inclusion_by_label(ctx.mccord(n)?, ctx.rips(n)?, |l| match l {
            VertexLabel::Subset(s) => VertexLabel::Point(*s.last().expect("nonempty subset")),
            other => other.clone(),
        })?)
    }
}

impl TowerKind for McCordTower {
    fn name(&self) -> &'static str {
        "mccord"
    }

    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        ctx.mccord(n)
    }

    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(poset_induced_map(ctx.mccord(n + 1)?, ctx.mccord(n)?, &*ctx.poset_bonding(n)?)?)
    }

    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError> {
        let mut out = Vec::new();
        let built = poset_induced_map(ctx.mccord(n + 1)?, ctx.mccord(n)?, &*ctx.poset_bonding(n)?);
        let (check, kp) = checked(named("mccord", n, "K(p) simplicial"), built)?;
        out.push(check);
        if let Some(kp) = kp {
            let p_star = RipsTower.bonding(ctx, n)?;
            let lhs = compose(&Self::last_point(ctx, n + 1)?, &p_star)?;
            let rhs = compose(&kp, &Self::last_point(ctx, n)?)?;
            out.push(contiguity(&named("mccord", n, "p* rho ~ rho K(p)"), &lhs, &rhs)?);
        }
        for level in [n, n + 1] {
            let order = mccord_complex(&*ctx.poset(level)?, None, ctx.budget())?;
            let a = ctx.level(level)?;
            let rips = rips_complex(ctx.space(), &a.subset, &a.epsilon.times(2), usize::MAX, ctx.budget())?;
            let sd = barycentric_subdivision(&rips, None, ctx.budget())?;
            out.push(identical_labelled(&format!("mccord[{level}] K(U) = R'"), &order, &sd, &rips));
        }
        Ok(out)
    }
}

/// Nerves of the ball covers with `B_{n+1}(a) ↦ B_n(min q_{A_n}(a))`.
pub struct CechTower;

impl CechTower {
    fn nerve(ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        ctx.complex("cech", n, || Ok(cech_nerve(ctx.space(), ctx.level(n)?, ctx.dim_cap(), ctx.budget())?))
    }
}

impl TowerKind for CechTower {
    fn name(&self) -> &'static str {
        "cech"
    }

    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        Self::nerve(ctx, n)
    }

    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(nearest_point_map(Self::nerve(ctx, n + 1)?, Self::nerve(ctx, n)?, ctx.space(), ctx.level(n)?)?)
    }

    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError> {
        let (fine, coarse) = (Self::nerve(ctx, n + 1)?, Self::nerve(ctx, n)?);
        let mut out = Vec::new();
        let (check, p) = checked(named("cech", n, "p_B simplicial"), nearest_point_map(fine.clone(), coarse.clone(), ctx.space(), ctx.level(n)?))?;
        out.push(check);
        let built = cech_refinement_map(fine, coarse, ctx.space(), ctx.level(n + 1)?, ctx.level(n)?);
        let (check, g) = checked(named("cech", n, "g_B simplicial"), built)?;
        out.push(check);
        if let (Some(p), Some(g)) = (p, g) {
            out.push(contiguity(&named("cech", n, "p_B ~ g_B"), &p, &g)?);
        }
        Ok(out)
    }
}

/// Witness complexes `W_n` with `ω: a ↦ min q_{A_n}(a)`.
pub struct WitnessTower;

impl WitnessTower {
    fn witness(ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        ctx.complex("witness", n, || Ok(witness_complex(ctx.space(), ctx.level(n)?, ctx.dim_cap(), ctx.budget())?))
    }
}

impl TowerKind for WitnessTower {
    fn name(&self) -> &'static str {
        "witness"
    }

    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        Self::witness(ctx, n)
    }

    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(nearest_point_map(Self::witness(ctx, n + 1)?, Self::witness(ctx, n)?, ctx.space(), ctx.level(n)?)?)
    }

    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError> {
        let (w_fine, w_coarse) = (Self::witness(ctx, n + 1)?, Self::witness(ctx, n)?);
        let (r_fine, r_coarse) = (ctx.rips(n + 1)?, ctx.rips(n)?);
        let mut out = Vec::new();
        let (check, omega) = checked(named("witness", n, "omega simplicial"), nearest_point_map(w_fine.clone(), w_coarse.clone(), ctx.space(), ctx.level(n)?))?;
        out.push(check);
        let f_fine = inclusion_by_label(w_fine, r_fine.clone(), |l| l.clone());
        let f_coarse = inclusion_by_label(w_coarse.clone(), r_coarse.clone(), |l| l.clone());
        let (check, f_fine) = checked(named("witness", n, "f_{n+1} simplicial"), f_fine)?;
        out.push(check);
        let (check, f_coarse) = checked(named("witness", n, "f_n simplicial"), f_coarse)?;
        out.push(check);
        let built = nearest_point_map(r_fine, w_coarse, ctx.space(), ctx.level(n)?);
        let (check, g) = checked(named("witness", n, "g_n simplicial"), built)?;
        out.push(check);
        let (Some(omega), Some(f_fine), Some(f_coarse), Some(g)) = (omega, f_fine, f_coarse, g) else {
            return Ok(out);
        };
        let p_star = RipsTower.bonding(ctx, n)?;
        out.push(contiguity(
            &named("witness", n, "f_n omega ~ p* f_{n+1}"),
            &compose(&omega, &f_coarse)?,
            &compose(&f_fine, &p_star)?,
        )?);
        out.push(contiguity(&named("witness", n, "omega ~ g_n f_{n+1}"), &omega, &compose(&f_fine, &g)?)?);
        out.push(contiguity(&named("witness", n, "f_n g_n ~ p*"), &compose(&g, &f_coarse)?, &p_star)?);
        Ok(out)
    }
}

/// Dowker complexes of `U_{2ε_n}(A_n)` with `C ↦ p_{n,n+1}(C)`.
pub struct DowkerTower {
    side: DowkerSide,
}

impl DowkerTower {
    pub fn upper() -> Self {
        DowkerTower { side: DowkerSide::Upper }
    }

    pub fn lower() -> Self {
        DowkerTower { side: DowkerSide::Lower }
    }

    fn key(&self) -> &'static str {
        match self.side {
            DowkerSide::Upper => "dowker-upper",
            DowkerSide::Lower => "dowker-lower",
        }
    }

    fn dowker(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        ctx.complex(self.key(), n, || {
            let poset = ctx.poset(n)?;
            Ok(match self.side {
                DowkerSide::Upper => dowker_upper(&poset, ctx.dim_cap(), ctx.budget())?,
                DowkerSide::Lower => dowker_lower(&poset, ctx.dim_cap(), ctx.budget())?,
            })
        })
    }
}

impl TowerKind for DowkerTower {
    fn name(&self) -> &'static str {
        self.key()
    }

    fn build_level(&self, ctx: &TowerContext, n: usize) -> Result<Arc<SimplicialComplex>, TowerError> {
        self.dowker(ctx, n)
    }

    fn bonding(&self, ctx: &TowerContext, n: usize) -> Result<SimplicialMap, TowerError> {
        Ok(poset_induced_map(self.dowker(ctx, n + 1)?, self.dowker(ctx, n)?, &*ctx.poset_bonding(n)?)?)
    }

    fn verify(&self, ctx: &TowerContext, n: usize) -> Result<Vec<DiagramCheck>, TowerError> {
        let tag = self.key();
        let mut out = Vec::new();
        let (d_fine, d_coarse) = (self.dowker(ctx, n + 1)?, self.dowker(ctx, n)?);
        let (k_fine, k_coarse) = (ctx.mccord(n + 1)?, ctx.mccord(n)?);
        let p = ctx.poset_bonding(n)?;
        let (check, p_k) = checked(named(tag, n, "p^K simplicial"), poset_induced_map(d_fine.clone(), d_coarse.clone(), &p))?;
        out.push(check);
        let Some(p_k) = p_k else { return Ok(out) };
        let kp = McCordTower.bonding(ctx, n)?;
        let i_fine = inclusion_by_label(k_fine.clone(), d_fine.clone(), |l| l.clone())?;
        let i_coarse = inclusion_by_label(k_coarse.clone(), d_coarse.clone(), |l| l.clone())?;
        out.push(equality(&named(tag, n, "p^K i_{n+1} = i_n K(p)"), &compose(&i_fine, &p_k)?, &compose(&kp, &i_coarse)?)?);

        // upper-right square on the subdivision of the order complex
        let sd_k = ctx.subdivision_of("sd-mccord", n + 1, &k_fine)?;
        let sd_key = match self.side {
            DowkerSide::Upper => "sd-dowker-upper",
            DowkerSide::Lower => "sd-dowker-lower",
        };
        let sd_d = ctx.subdivision_of(sd_key, n + 1, &d_fine)?;
        let rho_k = last_vertex_map(k_fine.clone(), sd_k.clone())?;
        let rho_d = last_vertex_map(d_fine.clone(), sd_d.clone())?;
        let i_sd = subdivided_map(&i_fine, sd_k, sd_d.clone())?;
        out.push(equality(
            &named(tag, n, "i_n p rho = p^K rho i'"),
            &compose(&compose(&rho_k, &kp)?, &i_coarse)?,
            &compose(&compose(&i_sd, &rho_d)?, &p_k)?,
        )?);

        // lower-left triangle through the Morita diagonal
        let built = dowker_diagonal(self.side, &d_fine, sd_d, k_coarse, &p);
        let (check, g) = checked(named(tag, n, "g_n simplicial"), built)?;
        out.push(check);
        if let Some(g) = g {
            out.push(contiguity(
                &named(tag, n, "i_n g_n ~ p^K rho"),
                &compose(&g, &i_coarse)?,
                &compose(&rho_d, &p_k)?,
            )?);
        }
        Ok(out)
    }
}

/// Named tower kinds.
pub struct TowerRegistry {
    kinds: Vec<Box<dyn TowerKind>>,
}

impl TowerRegistry {
    pub fn standard() -> Self {
        TowerRegistry {
            kinds: vec![
                Box::new(RipsTower),
                Box::new(McCordTower),
                Box::new(CechTower),
                Box::new(WitnessTower),
                Box::new(DowkerTower::upper()),
                Box::new(DowkerTower::lower()),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Result<&dyn TowerKind, TowerError> {
        self.kinds
            .iter()
            .find(|k| k.name() == name)
            .map(|k| k.as_ref())
            .ok_or_else(|| TowerError::UnknownKind(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kinds.iter().map(|k| k.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn TowerKind> {
        self.kinds.iter().map(|k| k.as_ref())
    }
}

/// Complexes, bases and induced maps of one tower over levels `first..=last`.
pub struct TowerHomology {
    pub kind: &'static str,
    pub degree: usize,
    pub first: usize,
    pub complexes: Vec<Arc<SimplicialComplex>>,
    pub bases: Vec<HomologyBasis>,
    pub bondings: Vec<SimplicialMap>,
    pub induced: Vec<GroupHom>,
}

impl TowerHomology {
    pub fn group_tower(&self) -> Result<GroupTower, TowerError> {
        Ok(GroupTower::new(
            self.first,
            self.bases.iter().map(|b| b.group().clone()).collect(),
            self.induced.clone(),
        )?)
    }
}

pub fn tower_homology(
    kind: &dyn TowerKind,
    ctx: &TowerContext,
    degree: usize,
    first: usize,
    last: usize,
) -> Result<TowerHomology, TowerError> {
    if first == 0 || first > last {
        return Err(TowerError::Level(first));
    }
    if last > ctx.ladder().depth() {
        return Err(TowerError::Level(last));
    }
    let complexes = (first..=last).map(|n| kind.build_level(ctx, n)).collect::<Result<Vec<_>, _>>()?;
    let bases = complexes
        .iter()
        .map(|k| HomologyBasis::compute(k.clone(), degree))
        .collect::<Result<Vec<_>, _>>()?;
    let bondings = (first..last).map(|n| kind.bonding(ctx, n)).collect::<Result<Vec<_>, _>>()?;
    let induced = bondings
        .iter()
        .enumerate()
        .map(|(i, f)| induced_map(f, &bases[i + 1], &bases[i]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TowerHomology { kind: kind.name(), degree, first, complexes, bases, bondings, induced })
}

/// Checks of one tower between every pair of adjacent levels in `first..=last`.
pub fn verify_expansion_diagrams(
    kind: &dyn TowerKind,
    ctx: &TowerContext,
    first: usize,
    last: usize,
) -> Result<Vec<DiagramCheck>, TowerError> {
    let mut out = Vec::new();
    for n in first..last {
        out.extend(kind.verify(ctx, n)?);
    }
    Ok(out)
}
