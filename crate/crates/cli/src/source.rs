//! Turns `--input` / `--corpus` flags into a validated ladder or a group tower.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use polyshape::corpus;
use polyshape::exact::{parse_rational, Threshold};
use polyshape::metric::{build_adjusted_sequence, AdjustedSequence, FiniteMetricSpace, LadderFile, SpaceInput};
use polyshape::persistence::GroupTower;
use serde_json::Value;

use crate::args::{CorpusName, SourceArgs};
use crate::failure::{Failure, Kind};

pub enum Source {
    Ladder(Arc<AdjustedSequence>),
    Groups(GroupTower),
}

impl Source {
    pub fn ladder(self) -> Result<Arc<AdjustedSequence>, Failure> {
        match self {
            Source::Ladder(l) => Ok(l),
            Source::Groups(_) => Err(Failure::new(Kind::Input, "the solenoid corpus is an abstract group tower without a space")),
        }
    }
}

pub fn parse_threshold(text: &str) -> Result<Threshold, Failure> {
    let trimmed = text.trim();
    let (rational, root) = match trimmed.strip_suffix("sqrt2").or_else(|| trimmed.strip_suffix("√2")) {
        Some(head) => (head.trim_end().trim_end_matches('*').trim(), true),
        None => (trimmed, false),
    };
    let q: BigRational = if rational.is_empty() && root {
        BigRational::from_integer(1.into())
    } else {
        parse_rational(rational).map_err(|e| Failure::new(Kind::Parse, e))?
    };
    let t = if root { Threshold::sqrt2_multiple(q) } else { Threshold::rational(q) };
    t.filter(|t| !t.is_zero()).ok_or_else(|| Failure::new(Kind::Input, format!("epsilon {text:?} must be positive")))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(Kind::Io, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(Kind::Parse, format!("{}: {e}", path.display())))
}

/// A ladder file is re-validated in full when `strict`; a bare space is
/// laddered greedily.
fn from_file(path: &Path, args: &SourceArgs, strict: bool) -> Result<Arc<AdjustedSequence>, Failure> {
    let value = read_json(path)?;
    if value.get("levels").is_some() {
        let file: LadderFile = serde_json::from_value(value).map_err(|e| Failure::new(Kind::Parse, e))?;
        let reference = FiniteMetricSpace::from_input(&file.reference).map_err(polyshape::Error::from)?;
        let seq = AdjustedSequence { reference: Arc::new(reference), levels: file.levels };
        if strict {
            seq.validate()?;
        }
        return Ok(Arc::new(seq));
    }
    let input: SpaceInput = serde_json::from_value(value).map_err(|e| Failure::new(Kind::Parse, e))?;
    let space = FiniteMetricSpace::from_input(&input).map_err(polyshape::Error::from)?;
    let eps1 = args
        .eps1
        .as_deref()
        .ok_or_else(|| Failure::new(Kind::Usage, "--eps1 is required with a point cloud or distance matrix"))
        .and_then(parse_threshold)?;
    let seq = build_adjusted_sequence(Arc::new(space), &eps1, args.levels.unwrap_or(2), &[])?;
    Ok(Arc::new(seq))
}

fn greedy(space: FiniteMetricSpace, args: &SourceArgs, default_eps: &str) -> Result<Arc<AdjustedSequence>, Failure> {
    let eps1 = parse_threshold(args.eps1.as_deref().unwrap_or(default_eps))?;
    Ok(Arc::new(build_adjusted_sequence(Arc::new(space), &eps1, args.levels.unwrap_or(2), &[])?))
}

fn from_corpus(name: CorpusName, args: &SourceArgs) -> Result<Source, Failure> {
    Ok(match name {
        CorpusName::Hawaiian => {
            let levels = args.levels.unwrap_or(3);
            let squares = args.squares.unwrap_or_else(|| corpus::hawaiian_min_squares(levels));
            Source::Ladder(Arc::new(corpus::hawaiian(levels, squares)?))
        }
        CorpusName::Solenoid => Source::Groups(corpus::solenoid_tower(args.levels.unwrap_or(6), args.base.unwrap_or(2))?),
        CorpusName::Circle => match (args.size, &args.eps1, args.levels) {
            (None | Some(12), None, None | Some(2)) => Source::Ladder(Arc::new(corpus::circle_ladder()?)),
            _ => Source::Ladder(greedy(corpus::circle_sample(args.size.unwrap_or(12))?, args, "4/5")?),
        },
        CorpusName::Point => Source::Ladder(greedy(corpus::point(), args, "1")?),
        CorpusName::Discrete => Source::Ladder(greedy(corpus::discrete(args.size.unwrap_or(4))?, args, "1/4")?),
    })
}

pub fn resolve(args: &SourceArgs) -> Result<Source, Failure> {
    resolve_with(args, true)
}

/// Like [`resolve`], but leaves ladder files unvalidated so the caller can
/// report the violated inequality.
pub fn resolve_unchecked(args: &SourceArgs) -> Result<Source, Failure> {
    resolve_with(args, false)
}

fn resolve_with(args: &SourceArgs, strict: bool) -> Result<Source, Failure> {
    match (&args.input, args.corpus) {
        (Some(path), None) => Ok(Source::Ladder(from_file(path, args, strict)?)),
        (None, Some(name)) => from_corpus(name, args),
        _ => Err(Failure::new(Kind::Usage, "exactly one of --input and --corpus is required")),
    }
}
