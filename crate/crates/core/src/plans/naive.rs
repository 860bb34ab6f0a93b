use std::collections::HashSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::search_local;
use crate::model::{canonicalize, Dependency, DependencyKind, Relation};
use crate::oracle;

#[derive(Clone, Debug)]
pub struct NaiveOutcome {
    pub parts: usize,
    /// Dependencies minimal on every non-empty part.
    pub naive: Vec<Dependency>,
    /// Minimal dependencies of the whole relation.
    pub global: Vec<Dependency>,
    /// Share of `naive` that holds on the whole relation.
    pub precision: f64,
}

/// Split `r` into `p` seeded parts, discover on each part alone and keep
/// what every part agrees on.
pub fn run_naive_intersection(r: &Relation, p: usize, kind: DependencyKind, seed: u64) -> Result<NaiveOutcome> {
    if p < 1 {
        return Err(Error::Config("need at least one part".into()));
    }
    let parts = r.horizontal_split(p, seed)?;
    naive_intersection_of_parts(r, &parts, kind)
}

/// Same as [`run_naive_intersection`] over a caller-chosen split. An
/// empty part satisfies every dependency, so it leaves the intersection
/// unchanged and is skipped.
pub fn naive_intersection_of_parts(r: &Relation, parts: &[Relation], kind: DependencyKind) -> Result<NaiveOutcome> {
    if !matches!(kind, DependencyKind::Fd | DependencyKind::Ucc | DependencyKind::Od) {
        return Err(Error::Config(format!("naive intersection does not support {}", kind.as_str())));
    }
    let non_empty: Vec<&Relation> = parts.iter().filter(|p| !p.is_empty()).collect();
    #[cfg(feature = "parallel")]
    let local: Vec<Result<Vec<Dependency>>> = non_empty.par_iter().map(|p| search_local(p, kind)).collect();
    #[cfg(not(feature = "parallel"))]
    let local: Vec<Result<Vec<Dependency>>> = non_empty.iter().map(|p| search_local(p, kind)).collect();

    let mut naive: Option<HashSet<Dependency>> = None;
    for deps in local {
        let deps: HashSet<Dependency> = deps?.into_iter().collect();
        naive = Some(match naive {
            None => deps,
            Some(acc) => acc.intersection(&deps).cloned().collect(),
        });
    }
    let mut naive: Vec<Dependency> = naive.unwrap_or_default().into_iter().collect();
    canonicalize(&mut naive);
    let global = search_local(r, kind)?;
    let precision = oracle::precision(&naive, r);
    Ok(NaiveOutcome {
        parts: parts.len(),
        naive,
        global,
        precision,
    })
}
