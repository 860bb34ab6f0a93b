use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::common::{column_partitions, difference, merge_evidence, DataCounter};
use super::costs::{estimate_phase_costs, PhaseCostInput};
use super::{DiscoveryResult, Phase, PhaseStep, PlanConfig};
use crate::cluster::{grouped_class_assignment, split_ranges, wire, Cluster};
use crate::error::Result;
use crate::lattice::FdTree;
use crate::model::{canonicalize, AttributeSet, Dependency, DependencyKind, Relation, RowId};
use crate::primitives::window_pairs;

/// Hybrid discovery: sample tuple pairs to shrink the candidate tree,
/// validate tree levels against the data, and move between the two.
///
/// UCCs are handled as FDs on a virtual attribute `m` that differs for
/// every pair of rows: `X` is unique iff `X -> m` holds.
pub fn run_hyfd(r: &Relation, config: &PlanConfig) -> Result<DiscoveryResult> {
    config.validate(r)?;
    let mut cluster = Cluster::new(config.cluster.clone())?;
    let mut cands = Candidates::new(r, config.kind);
    let mut sampler = if config.ldp == 1 {
        Sampler::Focused(Focused::new(&mut cluster, r)?)
    } else {
        Sampler::Groups(GroupPairs::new(r.len(), cluster.k(), config.sampling_seed))
    };
    let policy = &config.switch_policy;
    let mut validator = Validator::default();
    let mut trace: Vec<PhaseStep> = Vec::new();
    let mut counters: BTreeMap<String, u64> = BTreeMap::new();
    let mut phase = Phase::DataDriven;

    loop {
        match phase {
            Phase::DataDriven => {
                let Some(round) = sampler.round(&mut cluster, r)? else {
                    phase = Phase::SchemaDriven;
                    continue;
                };
                let mut effective = 0u64;
                for diff in &round.evidence {
                    if cands.induce(*diff) > 0 {
                        effective += 1;
                    }
                }
                sampler.feedback(effective);
                *counters.entry("evidence_sets".into()).or_default() += round.evidence.len() as u64;
                *counters.entry("group_pairs".into()).or_default() += round.group_pairs;
                record(&mut trace, Phase::DataDriven, round.comparisons, 0);
                let keep = match &sampler {
                    // focused sampling tries every attribute once before
                    // it trusts the change ratio
                    Sampler::Focused(f) => f.has_unsampled() || ratio(effective, round.comparisons) >= policy.epsilon,
                    Sampler::Groups(_) => cheaper_to_sample(&cluster, r, &cands, &validator, policy),
                };
                if !keep || sampler.exhausted() {
                    phase = Phase::SchemaDriven;
                }
            }
            Phase::SchemaDriven => {
                let Some(level) = validator.validate_next_level(&mut cluster, r, &mut cands)? else {
                    break;
                };
                record(&mut trace, Phase::SchemaDriven, 0, level.validated);
                if sampler.exhausted() {
                    continue;
                }
                let back = match &sampler {
                    Sampler::Focused(_) => level.invalid > 0 && level.validated > policy.validation_budget as u64,
                    Sampler::Groups(_) => cheaper_to_sample(&cluster, r, &cands, &validator, policy),
                };
                if back {
                    phase = Phase::DataDriven;
                }
            }
        }
    }

    let comparisons: u64 = trace.iter().map(|s| s.comparisons).sum();
    let validations: u64 = trace.iter().map(|s| s.validations).sum();
    counters.insert("pair_comparisons".into(), comparisons);
    counters.insert("validations".into(), validations);
    counters.insert(
        "sampling_rounds".into(),
        trace.iter().filter(|s| s.phase == Phase::DataDriven).map(|s| s.rounds as u64).sum(),
    );
    counters.insert("unvalidated_candidates".into(), validator.unvalidated(&cands) as u64);
    let mut dependencies = cands.dependencies();
    canonicalize(&mut dependencies);
    Ok(DiscoveryResult {
        dependencies,
        ledger: cluster.into_ledger(),
        phase_trace: trace,
        counters,
    })
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn record(trace: &mut Vec<PhaseStep>, phase: Phase, comparisons: u64, validations: u64) {
    match trace.last_mut() {
        Some(step) if step.phase == phase => {
            step.rounds += 1;
            step.comparisons += comparisons;
            step.validations += validations;
        }
        _ => trace.push(PhaseStep {
            phase,
            rounds: 1,
            comparisons,
            validations,
        }),
    }
}

fn cheaper_to_sample(
    cluster: &Cluster,
    r: &Relation,
    cands: &Candidates,
    validator: &Validator,
    policy: &super::SwitchPolicy,
) -> bool {
    let costs = estimate_phase_costs(&PhaseCostInput {
        n: r.len(),
        m: r.arity(),
        k: cluster.k(),
        relation_cached: validator.counter.is_cached(cluster),
        next_level_candidates: validator.pending_at_level(cands),
        lambda: policy.lambda,
    });
    costs.data_driven <= costs.schema_driven
}

/// The candidate tree and the attributes it ranges over.
struct Candidates {
    tree: FdTree,
    m: usize,
    /// `None` for FDs; the virtual attribute for UCCs.
    virtual_rhs: Option<usize>,
}

impl Candidates {
    fn new(r: &Relation, kind: DependencyKind) -> Self {
        let m = r.arity();
        match kind {
            DependencyKind::Ucc => {
                let mut tree = FdTree::new(m + 1);
                for a in 0..m {
                    tree.add(AttributeSet::singleton(a), m);
                }
                Candidates {
                    tree,
                    m,
                    virtual_rhs: Some(m),
                }
            }
            _ => {
                let mut tree = FdTree::new(m);
                for a in 0..m {
                    tree.add(AttributeSet::EMPTY, a);
                }
                Candidates {
                    tree,
                    m,
                    virtual_rhs: None,
                }
            }
        }
    }

    /// Right-hand sides a pair differing on `diff` can refute.
    fn refutable(&self, diff: AttributeSet) -> AttributeSet {
        match self.virtual_rhs {
            Some(v) => AttributeSet::singleton(v),
            None => diff,
        }
    }

    /// Attributes that may extend a left-hand side for `rhs`.
    fn extensions(&self, rhs: usize) -> impl Iterator<Item = usize> {
        (0..self.m).filter(move |&b| b != rhs)
    }

    /// Fold one pair's difference set into the tree: every candidate the
    /// pair refutes is replaced by its one-attribute extensions that the
    /// pair does not refute. Returns the number of tree changes.
    fn induce(&mut self, diff: AttributeSet) -> usize {
        let agree = AttributeSet::full(self.m).difference(diff);
        let violated = self.tree.generalizations(agree, self.refutable(diff));
        let mut changes = 0;
        for &(lhs, rhs) in &violated {
            for a in rhs.iter() {
                self.tree.remove(lhs, a);
                changes += 1;
            }
        }
        for (lhs, rhs) in violated {
            for a in rhs.iter() {
                for b in diff.iter().filter(|&b| b != a && b < self.m) {
                    if self.tree.insert(lhs.with(b), a) {
                        changes += 1;
                    }
                }
            }
        }
        changes
    }

    fn dependencies(&self) -> Vec<Dependency> {
        self.tree
            .all()
            .into_iter()
            .map(|(lhs, a)| match self.virtual_rhs {
                Some(_) => Dependency::ucc(lhs),
                None => Dependency::fd(lhs, a),
            })
            .collect()
    }
}

struct Round {
    evidence: Vec<AttributeSet>,
    comparisons: u64,
    group_pairs: u64,
}

enum Sampler {
    Focused(Focused),
    Groups(GroupPairs),
}

impl Sampler {
    fn round(&mut self, cluster: &mut Cluster, r: &Relation) -> Result<Option<Round>> {
        match self {
            Sampler::Focused(f) => f.round(cluster, r),
            Sampler::Groups(g) => g.round(cluster, r),
        }
    }

    fn feedback(&mut self, effective: u64) {
        if let Sampler::Focused(f) = self {
            f.feedback(effective);
        }
    }

    fn exhausted(&self) -> bool {
        match self {
            Sampler::Focused(f) => f.exhausted(),
            Sampler::Groups(g) => g.exhausted(),
        }
    }
}

/// Window sampling over the classes of each single-attribute partition.
struct Focused {
    classes: Vec<Vec<Vec<RowId>>>,
    largest: Vec<usize>,
    window: Vec<usize>,
    sampled: Vec<bool>,
    last_changes: Vec<u64>,
    current: Option<usize>,
    rounds: usize,
}

impl Focused {
    fn new(cluster: &mut Cluster, r: &Relation) -> Result<Self> {
        let parts = column_partitions(cluster, "hyfd/partitions", r)?;
        let classes: Vec<Vec<Vec<RowId>>> = parts.into_iter().map(|p| p.into_classes()).collect();
        let largest = classes.iter().map(|cs| cs.iter().map(Vec::len).max().unwrap_or(0)).collect();
        let m = classes.len();
        Ok(Focused {
            classes,
            largest,
            window: vec![1; m],
            sampled: vec![false; m],
            last_changes: vec![0; m],
            current: None,
            rounds: 0,
        })
    }

    fn is_exhausted(&self, a: usize) -> bool {
        self.window[a] >= self.largest[a]
    }

    fn exhausted(&self) -> bool {
        (0..self.window.len()).all(|a| self.is_exhausted(a))
    }

    fn has_unsampled(&self) -> bool {
        (0..self.window.len()).any(|a| !self.sampled[a] && !self.is_exhausted(a))
    }

    /// Never-sampled attributes first, then most tree changes last time.
    fn pick(&self) -> Option<usize> {
        (0..self.window.len())
            .filter(|&a| !self.is_exhausted(a))
            .min_by_key(|&a| (self.sampled[a], std::cmp::Reverse(self.last_changes[a]), a))
    }

    fn round(&mut self, cluster: &mut Cluster, r: &Relation) -> Result<Option<Round>> {
        let Some(a) = self.pick() else {
            return Ok(None);
        };
        let w = self.window[a];
        let live: Vec<&Vec<RowId>> = self.classes[a].iter().filter(|c| c.len() > w).collect();
        let sizes: Vec<usize> = live.iter().map(|c| c.len()).collect();
        let placement = grouped_class_assignment(&sizes, cluster.k());
        let row_bytes = wire::row(r.arity());
        let mut ship = cluster.shipment();
        for (worker, cs) in placement.iter().enumerate() {
            for &c in cs {
                ship.from_storage(worker, sizes[c] as u64 * row_bytes);
            }
        }
        let inputs: Vec<Vec<&Vec<RowId>>> = placement
            .into_iter()
            .map(|cs| cs.into_iter().map(|c| live[c]).collect())
            .collect();
        self.rounds += 1;
        let found = cluster.run_stage(&format!("hyfd/sample/r{}", self.rounds), ship, inputs, |ctx, cs| {
            let mut out = HashSet::new();
            for class in cs {
                let pairs = window_pairs(class, w);
                ctx.add_work(pairs.len() as u64);
                out.extend(pairs.into_iter().map(|(i, j)| difference(r, i, j)));
            }
            out
        })?;
        let comparisons = sizes.iter().map(|&s| (s - w) as u64).sum();
        self.window[a] += 1;
        self.sampled[a] = true;
        self.current = Some(a);
        Ok(Some(Round {
            evidence: merge_evidence(found),
            comparisons,
            group_pairs: 0,
        }))
    }

    fn feedback(&mut self, effective: u64) {
        if let Some(a) = self.current.take() {
            self.last_changes[a] = effective;
        }
    }
}

/// Rows cut into `k` random groups; each round hands one unprocessed
/// group pair to each of up to `k` workers.
struct GroupPairs {
    groups: Vec<Vec<RowId>>,
    pending: Vec<(usize, usize)>,
    rounds: usize,
}

impl GroupPairs {
    fn new(n: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<RowId> = (0..n as RowId).collect();
        rows.shuffle(&mut rng);
        let groups: Vec<Vec<RowId>> = split_ranges(n, k).into_iter().map(|g| rows[g].to_vec()).collect();
        let mut pending: Vec<(usize, usize)> = (0..k).flat_map(|g| (g..k).map(move |h| (g, h))).collect();
        pending.shuffle(&mut rng);
        // taken from the back
        pending.reverse();
        GroupPairs {
            groups,
            pending,
            rounds: 0,
        }
    }

    fn exhausted(&self) -> bool {
        self.pending.is_empty()
    }

    fn round(&mut self, cluster: &mut Cluster, r: &Relation) -> Result<Option<Round>> {
        if self.pending.is_empty() {
            return Ok(None);
        }
        let k = cluster.k();
        let take = self.pending.len().min(k);
        let batch: Vec<(usize, usize)> = (0..take).filter_map(|_| self.pending.pop()).collect();
        let row_bytes = wire::row(r.arity());
        let mut ship = cluster.shipment();
        for (w, &(g, h)) in batch.iter().enumerate() {
            ship.from_storage(w, self.groups[g].len() as u64 * row_bytes);
            if g != h {
                ship.from_storage(w, self.groups[h].len() as u64 * row_bytes);
            }
        }
        let groups = &self.groups;
        let comparisons: u64 = batch
            .iter()
            .map(|&(g, h)| {
                let (a, b) = (groups[g].len() as u64, groups[h].len() as u64);
                if g == h {
                    a * a.saturating_sub(1) / 2
                } else {
                    a * b
                }
            })
            .sum();
        self.rounds += 1;
        let found = cluster.run_stage(&format!("hyfd/sample/r{}", self.rounds), ship, batch.clone(), |ctx, (g, h)| {
            let mut out = HashSet::new();
            let (x, y) = (&groups[g], &groups[h]);
            if g == h {
                for i in 0..x.len() {
                    for j in i + 1..x.len() {
                        out.insert(difference(r, x[i], x[j]));
                    }
                }
                ctx.add_work((x.len() * x.len().saturating_sub(1) / 2) as u64);
            } else {
                for &i in x {
                    for &j in y {
                        out.insert(difference(r, i, j));
                    }
                }
                ctx.add_work((x.len() * y.len()) as u64);
            }
            out
        })?;
        Ok(Some(Round {
            evidence: merge_evidence(found),
            comparisons,
            group_pairs: batch.len() as u64,
        }))
    }
}

struct LevelOutcome {
    validated: u64,
    invalid: u64,
}

/// Validates the tree bottom-up, one level per call, by counting
/// partitions straight from the data.
#[derive(Default)]
struct Validator {
    level: usize,
    validated: HashSet<(AttributeSet, usize)>,
    counter: DataCounter,
}

impl Validator {
    fn pending(&self, cands: &Candidates, level: usize) -> Vec<(AttributeSet, usize)> {
        cands
            .tree
            .get_level(level)
            .into_iter()
            .flat_map(|(lhs, rhs)| rhs.iter().map(move |a| (lhs, a)))
            .filter(|c| !self.validated.contains(c))
            .collect()
    }

    fn pending_at_level(&self, cands: &Candidates) -> usize {
        self.pending(cands, self.level).len()
    }

    fn unvalidated(&self, cands: &Candidates) -> usize {
        cands
            .tree
            .all()
            .into_iter()
            .filter(|c| !self.validated.contains(c))
            .count()
    }

    /// `None` once no candidate remains at or above the current level.
    fn validate_next_level(
        &mut self,
        cluster: &mut Cluster,
        r: &Relation,
        cands: &mut Candidates,
    ) -> Result<Option<LevelOutcome>> {
        loop {
            match cands.tree.depth() {
                Some(d) if d >= self.level => {}
                _ => return Ok(None),
            }
            let todo = self.pending(cands, self.level);
            if todo.is_empty() {
                self.level += 1;
                continue;
            }
            let mut sets: Vec<AttributeSet> = Vec::new();
            for &(lhs, a) in &todo {
                sets.push(lhs);
                if cands.virtual_rhs.is_none() {
                    sets.push(lhs.with(a));
                }
            }
            sets.sort_by(AttributeSet::canonical_cmp);
            sets.dedup();
            let stage = format!("hyfd/validate/l{}", self.level);
            let counts: std::collections::HashMap<AttributeSet, usize> = sets
                .iter()
                .copied()
                .zip(self.counter.counts(cluster, &stage, r, &sets)?)
                .collect();
            let mut invalid = 0;
            for &(lhs, a) in &todo {
                let holds = match cands.virtual_rhs {
                    Some(_) => counts[&lhs] == r.len(),
                    None => counts[&lhs] == counts[&lhs.with(a)],
                };
                if holds {
                    self.validated.insert((lhs, a));
                    continue;
                }
                invalid += 1;
                cands.tree.remove(lhs, a);
                let extensions: Vec<usize> = cands.extensions(a).filter(|&b| !lhs.contains(b)).collect();
                for b in extensions {
                    cands.tree.insert(lhs.with(b), a);
                }
            }
            self.level += 1;
            return Ok(Some(LevelOutcome {
                validated: todo.len() as u64,
                invalid,
            }));
        }
    }
}
