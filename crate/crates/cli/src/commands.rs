use std::fs;
use std::path::Path;
use std::sync::Arc;

use polyshape::complexes::diagrams::DiagramCheck;
use polyshape::complexes::{Budget, ComplexDump};
use polyshape::homology::{FgAbelianGroup, GroupHom};
use polyshape::metric::{AdjustedSequence, LadderFile};
use polyshape::persistence::{level_report, GroupTower, LevelReport};
use polyshape::towers::{tower_homology, verify_expansion_diagrams, TowerContext, TowerKind, TowerRegistry};
use serde::Serialize;

use crate::args::{Common, CorpusArgs};
use crate::failure::{Failure, Kind};
use crate::source::{self, Source};

pub fn write_report(out: Option<&Path>, report: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::new(Kind::Internal, e))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(Kind::Io, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn budget(args: &Common) -> Result<Budget, Failure> {
    if args.max_simplices == 0 || args.max_elements == 0 {
        return Err(Failure::new(Kind::Usage, "budgets must be positive"));
    }
    Ok(Budget { max_simplices: args.max_simplices, max_elements: args.max_elements })
}

fn context(args: &Common, ladder: Arc<AdjustedSequence>) -> Result<TowerContext, Failure> {
    Ok(TowerContext::new(ladder, args.degree, budget(args)?))
}

fn kind<'r>(registry: &'r TowerRegistry, args: &Common) -> Result<&'r dyn TowerKind, Failure> {
    Ok(registry.get(args.complex.as_deref().unwrap_or("rips"))?)
}

pub fn approximate(args: &Common) -> Result<(), Failure> {
    let ladder = source::resolve(&args.source)?.ladder()?;
    write_report(args.out.as_deref(), &LadderFile::from_sequence(&ladder))
}

#[derive(Serialize)]
struct BuiltLevel {
    level: usize,
    counts: Vec<usize>,
    complex: ComplexDump,
}

#[derive(Serialize)]
struct VertexMapReport {
    source: usize,
    target: usize,
    assignment: Vec<usize>,
}

#[derive(Serialize)]
struct BuildReport {
    complex: &'static str,
    levels: Vec<BuiltLevel>,
    bondings: Vec<VertexMapReport>,
}

pub fn build(args: &Common) -> Result<(), Failure> {
    let registry = TowerRegistry::standard();
    let tower = kind(&registry, args)?;
    let ladder = source::resolve(&args.source)?.ladder()?;
    let depth = ladder.depth();
    let ctx = context(args, ladder)?;
    let mut levels = Vec::with_capacity(depth);
    for n in 1..=depth {
        let k = tower.build_level(&ctx, n)?;
        levels.push(BuiltLevel { level: n, counts: k.counts(), complex: k.dump() });
    }
    let bondings = (1..depth)
        .map(|n| {
            let f = tower.bonding(&ctx, n)?;
            Ok(VertexMapReport { source: n + 1, target: n, assignment: f.assignment().to_vec() })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    write_report(args.out.as_deref(), &BuildReport { complex: tower.name(), levels, bondings })
}

#[derive(Serialize)]
struct HomologyLevel {
    level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<usize>>,
    group: FgAbelianGroup,
}

#[derive(Serialize)]
struct BondingReport {
    source: usize,
    target: usize,
    hom: GroupHom,
}

#[derive(Serialize)]
struct HomologyReport {
    complex: &'static str,
    degree: usize,
    levels: Vec<HomologyLevel>,
    bondings: Vec<BondingReport>,
}

fn bonding_reports(tower: &GroupTower) -> Vec<BondingReport> {
    (tower.first_level()..tower.last_level())
        .map(|n| BondingReport { source: n + 1, target: n, hom: tower.bonding(n).expect("in range").clone() })
        .collect()
}

/// The homology tower over levels `1..=last` together with per-level sizes.
fn group_tower(args: &Common, last: Option<usize>) -> Result<(&'static str, GroupTower, Vec<Option<Vec<usize>>>), Failure> {
    match source::resolve(&args.source)? {
        Source::Groups(tower) => {
            let sizes = vec![None; tower.groups().len()];
            Ok(("solenoid", tower, sizes))
        }
        Source::Ladder(ladder) => {
            let registry = TowerRegistry::standard();
            let kind = kind(&registry, args)?;
            let last = last.unwrap_or(ladder.depth());
            let ctx = context(args, ladder)?;
            let h = tower_homology(kind, &ctx, args.degree, 1, last)?;
            let sizes = h.complexes.iter().map(|k| Some(k.counts())).collect();
            Ok((kind.name(), h.group_tower()?, sizes))
        }
    }
}

pub fn homology(args: &Common) -> Result<(), Failure> {
    let (name, tower, sizes) = group_tower(args, None)?;
    let levels = sizes
        .into_iter()
        .enumerate()
        .map(|(i, counts)| {
            let level = tower.first_level() + i;
            HomologyLevel { level, counts, group: tower.group(level).expect("in range").clone() }
        })
        .collect();
    let report = HomologyReport { complex: name, degree: args.degree, levels, bondings: bonding_reports(&tower) };
    write_report(args.out.as_deref(), &report)
}

#[derive(Serialize)]
struct PersistReport {
    complex: &'static str,
    degree: usize,
    horizon: usize,
    levels: Vec<LevelReport>,
}

pub fn persist(args: &Common) -> Result<(), Failure> {
    let (name, tower, _) = group_tower(args, args.horizon)?;
    let horizon = tower.last_level();
    let range = match args.level {
        Some(n) if n < tower.first_level() || n > horizon => {
            return Err(Failure::new(Kind::Input, format!("level {n} is outside {}..={horizon}", tower.first_level())))
        }
        Some(n) => n..n + 1,
        None => tower.first_level()..horizon,
    };
    let levels = range
        .map(|n| level_report(&tower, n, horizon).map_err(|e| Failure::from(polyshape::Error::from(e))))
        .collect::<Result<Vec<_>, _>>()?;
    write_report(args.out.as_deref(), &PersistReport { complex: name, degree: args.degree, horizon, levels })
}

#[derive(Serialize)]
struct LadderCheck {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct TowerChecks {
    complex: &'static str,
    passed: bool,
    checks: Vec<DiagramCheck>,
}

#[derive(Serialize)]
struct VerifyReport {
    first: usize,
    last: usize,
    ladder: LadderCheck,
    towers: Vec<TowerChecks>,
    passed: bool,
}

pub fn verify(args: &Common) -> Result<(), Failure> {
    let ladder = source::resolve_unchecked(&args.source)?.ladder()?;
    let first = args.level.unwrap_or(1).max(1);
    let last = args.horizon.unwrap_or(ladder.depth());
    if last > ladder.depth() {
        return Err(Failure::new(Kind::Input, format!("horizon {last} exceeds the {} available levels", ladder.depth())));
    }
    let validity = ladder.validate();
    let ladder_check = LadderCheck { valid: validity.is_ok(), detail: validity.err().map(|e| e.to_string()) };
    let registry = TowerRegistry::standard();
    let kinds: Vec<&dyn TowerKind> = match &args.complex {
        Some(name) => vec![registry.get(name)?],
        None => registry.iter().collect(),
    };
    let mut towers = Vec::new();
    if ladder_check.valid {
        let ctx = context(args, ladder)?;
        for kind in kinds {
            let checks = verify_expansion_diagrams(kind, &ctx, first, last)?;
            towers.push(TowerChecks { complex: kind.name(), passed: checks.iter().all(|c| c.passed), checks });
        }
    }
    let passed = ladder_check.valid && towers.iter().all(|t| t.passed);
    write_report(args.out.as_deref(), &VerifyReport { first, last, ladder: ladder_check, towers, passed })?;
    if passed {
        Ok(())
    } else {
        Err(Failure::new(Kind::Verification, "at least one check failed"))
    }
}

#[derive(Serialize)]
struct GroupTowerReport {
    levels: Vec<HomologyLevel>,
    bondings: Vec<BondingReport>,
}

pub fn corpus(args: &CorpusArgs) -> Result<(), Failure> {
    if args.source.corpus.is_none() {
        return Err(Failure::new(Kind::Usage, "--corpus is required"));
    }
    match source::resolve(&args.source)? {
        Source::Groups(tower) => {
            let levels = (tower.first_level()..=tower.last_level())
                .map(|n| HomologyLevel { level: n, counts: None, group: tower.group(n).expect("in range").clone() })
                .collect();
            let report = GroupTowerReport { levels, bondings: bonding_reports(&tower) };
            write_report(args.out.as_deref(), &report)
        }
        Source::Ladder(ladder) => {
            write_report(args.out.as_deref(), &ladder.reference.to_input())?;
            match &args.ladder_out {
                Some(path) => write_report(Some(path), &LadderFile::from_sequence(&ladder)),
                None => Ok(()),
            }
        }
    }
}
