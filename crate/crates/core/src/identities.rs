//! Membership checks for the congruences that make `A_{g,n,m}(V)` a
//! bimodule, run on sampled homogeneous inputs.
//!
//! Each sample produces one element that should lie in a specific relation
//! space. The search grows the generator budget up to a cap, tries `O'`
//! first and only then the full `O`; a hit in `O'` is a hit in `O`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{generators_at, GenBounds, Level};
use crate::grade::GradeIndex;
use crate::linalg::{SpanBasis, SparseVec};
use crate::products::{circ_shifted, residue_product, star_bar, star_nmp, star_right};
use crate::scalar::{int, Scalar};
use crate::voa::{basis_upto, phi_map, top_weight, vacuum, Element, VertexAlgebra, VoaContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    L31,
    L33,
    L34,
    C35,
    L36,
    L37,
    L38,
    P42,
    P43,
    E43,
    L58,
}

impl IdentityId {
    pub const ALL: [IdentityId; 11] = [
        IdentityId::L31,
        IdentityId::L33,
        IdentityId::L34,
        IdentityId::C35,
        IdentityId::L36,
        IdentityId::L37,
        IdentityId::L38,
        IdentityId::P42,
        IdentityId::P43,
        IdentityId::E43,
        IdentityId::L58,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::L31 => "L3.1",
            IdentityId::L33 => "L3.3",
            IdentityId::L34 => "L3.4",
            IdentityId::C35 => "C3.5",
            IdentityId::L36 => "L3.6",
            IdentityId::L37 => "L3.7",
            IdentityId::L38 => "L3.8",
            IdentityId::P42 => "P4.2",
            IdentityId::P43 => "P4.3",
            IdentityId::E43 => "E4.3",
            IdentityId::L58 => "L5.8",
        }
    }

    /// Parses a comma-separated list, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<IdentityId>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown identity id {s:?}")))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    /// Grades `m, n, p` are drawn from `0..=max_grade`.
    pub max_grade: GradeIndex,
    /// Largest total weight of the monomials in a sample.
    pub sample_weight: u32,
    /// Largest generator budget tried.
    pub b_cap: u32,
    /// Budget for `O''` and `O'''` generators once `O'` is exhausted.
    pub composite: u32,
    /// Cutoff on internal grades; `m + n + 2` when absent.
    pub p_max: Option<GradeIndex>,
    /// Samples per identity before seeded subsampling kicks in.
    pub samples: usize,
    pub seed: u64,
    pub timings: bool,
}

impl VerifyConfig {
    pub fn new(t: u32) -> Self {
        Self {
            max_grade: GradeIndex::from_units(3 * t as i64 / 2, t),
            sample_weight: 4,
            b_cap: 8,
            composite: 4,
            p_max: None,
            samples: 48,
            seed: 0,
            timings: false,
        }
    }
}

/// Which relation space a target must land in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceKey {
    pub inverse: bool,
    pub m: GradeIndex,
    pub n: GradeIndex,
    /// Whether the claim is about the full `O` rather than `O'`.
    pub full: bool,
}

/// One element that the cited statement puts in `space`.
#[derive(Clone, Debug)]
pub struct Case<W: Ord> {
    pub label: String,
    pub target: Element<W>,
    pub space: SpaceKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub sample: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub id: IdentityId,
    pub candidates: usize,
    pub samples: usize,
    pub certified: usize,
    /// Admissible samples whose target is already zero in `V`.
    pub zero_targets: usize,
    pub found: bool,
    /// Largest budget any certificate needed.
    #[serde(rename = "B")]
    pub b: Option<u32>,
    #[serde(rename = "P")]
    pub p: String,
    /// Whether some certificate needed `O''` or `O'''`.
    pub used_full: bool,
    pub millis: Option<u64>,
    pub failures: Vec<Failure>,
}

/// Incrementally grown relation spans, keyed by space and bounds.
pub struct SpanCache<A: VertexAlgebra> {
    ctx: VoaContext<A>,
    /// Entry `b` holds the span of generators with monomial weight at most `b`.
    spans: HashMap<(SpaceKey, u32, GradeIndex), Vec<SpanBasis<A::Word>>>,
}

impl<A: VertexAlgebra> SpanCache<A> {
    pub fn new(ctx: &VoaContext<A>) -> Self {
        Self {
            ctx: ctx.clone(),
            spans: HashMap::new(),
        }
    }

    /// Span of `O'` (or `O` when `key.full`) with generators up to `b`.
    pub fn span(
        &mut self,
        key: SpaceKey,
        b: u32,
        composite: u32,
        p_max: GradeIndex,
    ) -> &SpanBasis<A::Word> {
        let composite = if key.full { composite } else { 0 };
        let ctx = if key.inverse {
            self.ctx.inverse()
        } else {
            self.ctx.clone()
        };
        let snapshots = self.spans.entry((key, composite, p_max)).or_default();
        let level = if key.full { Level::Full } else { Level::Prime };
        let bounds = GenBounds::new(b, composite, p_max);
        while snapshots.len() <= b as usize {
            let w = snapshots.len() as u32;
            let mut span = snapshots.last().cloned().unwrap_or_default();
            for g in generators_at(&ctx, &key.m, &key.n, level, &bounds, w) {
                span.insert(&g.element);
            }
            snapshots.push(span);
        }
        &snapshots[b as usize]
    }
}

fn unit<W: Ord + Clone>(w: &W) -> Element<W> {
    SparseVec::unit(w.clone())
}

fn modt(x: i64, t: u32) -> u32 {
    x.rem_euclid(t as i64) as u32
}

/// Sampling parameters of one case before the target is formed.
#[derive(Clone, Debug)]
struct Params<W> {
    words: Vec<W>,
    grades: Vec<GradeIndex>,
    ints: Vec<i64>,
    relation: Option<usize>,
}

impl<W: fmt::Display> Params<W> {
    fn label(&self, relations: &[(String, u32)]) -> String {
        let mut parts: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        parts.extend(self.grades.iter().map(|g| g.to_string()));
        parts.extend(self.ints.iter().map(|k| k.to_string()));
        if let Some(i) = self.relation {
            parts.push(format!("o={}", relations[i].0));
        }
        parts.join(" ")
    }
}

/// Monomial tuples of `k` words with total weight at most `w`.
fn word_tuples_upto<A: VertexAlgebra>(alg: &A, k: usize, w: u32) -> Vec<Vec<A::Word>> {
    let words = basis_upto(alg, w);
    let mut out: Vec<Vec<A::Word>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            let used: u32 = t.iter().map(|x| alg.weight(x)).sum();
            for x in &words {
                if used + alg.weight(x) <= w {
                    let mut t2 = t.clone();
                    t2.push(x.clone());
                    next.push(t2);
                }
            }
        }
        out = next;
    }
    out
}

/// The generator elements used as `o` in samples that need one.
struct RelationSamples<W: Ord> {
    /// `(space, list of (description, weight, element))`.
    lists: HashMap<(bool, GradeIndex, GradeIndex, Level), Vec<(String, u32, Element<W>)>>,
}

impl<W: Ord + Clone + fmt::Display> RelationSamples<W> {
    fn new() -> Self {
        Self {
            lists: HashMap::new(),
        }
    }

    fn get<A: VertexAlgebra<Word = W>>(
        &mut self,
        ctx: &VoaContext<A>,
        m: GradeIndex,
        n: GradeIndex,
        level: Level,
        w: u32,
    ) -> &[(String, u32, Element<W>)] {
        self.lists
            .entry((ctx.is_inverse(), m, n, level))
            .or_insert_with(|| {
                let bounds = GenBounds::new(w, w, m.add(&n).max(GradeIndex::zero(m.order())));
                let mut out = Vec::new();
                for b in 0..=w {
                    for (j, g) in generators_at(ctx, &m, &n, level, &bounds, b)
                        .into_iter()
                        .enumerate()
                    {
                        let top = top_weight(ctx.algebra(), &g.element).unwrap_or(0);
                        out.push((format!("O[{m},{n}]#{b}.{j}"), top, g.element));
                    }
                }
                out
            })
    }
}

/// Runs one identity.
pub fn verify_identity<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    id: IdentityId,
    cfg: &VerifyConfig,
    cache: &mut SpanCache<A>,
) -> Result<IdentityRecord> {
    let started = Instant::now();
    let set = build_cases(ctx, id, cfg)?;
    let mut record = certify_cases(id, cfg, &set.cases, cache);
    record.candidates = set.candidates;
    record.zero_targets = set.zero_targets;
    if cfg.timings {
        record.millis = Some(started.elapsed().as_millis() as u64);
    }
    Ok(record)
}

pub fn verify_all<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    ids: &[IdentityId],
    cfg: &VerifyConfig,
) -> Result<Vec<IdentityRecord>> {
    let mut cache = SpanCache::new(ctx);
    ids.iter()
        .map(|id| verify_identity(ctx, *id, cfg, &mut cache))
        .collect()
}

fn default_p(key: &SpaceKey, cfg: &VerifyConfig) -> GradeIndex {
    cfg.p_max
        .unwrap_or_else(|| key.m.add(&key.n).shift(2 * key.m.order() as i64))
}

/// Searches certificates for every case, returning the record without
/// `candidates`, `zero_targets` or timing filled in.
pub fn certify_cases<A: VertexAlgebra>(
    id: IdentityId,
    cfg: &VerifyConfig,
    cases: &[Case<A::Word>],
    cache: &mut SpanCache<A>,
) -> IdentityRecord {
    let mut found_at: Vec<Option<(u32, bool)>> = vec![None; cases.len()];
    let mut by_space: HashMap<SpaceKey, Vec<usize>> = HashMap::new();
    for (i, c) in cases.iter().enumerate() {
        by_space.entry(c.space).or_default().push(i);
    }
    let mut keys: Vec<SpaceKey> = by_space.keys().copied().collect();
    keys.sort();
    let mut p_used = Vec::new();

    for key in keys {
        let idx = &by_space[&key];
        let prime_key = SpaceKey { full: false, ..key };
        let p_max = default_p(&key, cfg);
        p_used.push(p_max);
        for b in 0..=cfg.b_cap {
            let pending: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| found_at[i].is_none())
                .collect();
            if pending.is_empty() {
                break;
            }
            let span = cache.span(prime_key, b, 0, p_max);
            let hits: Vec<usize> = pending
                .par_iter()
                .copied()
                .filter(|&i| span.contains(&cases[i].target))
                .collect();
            for i in hits {
                found_at[i] = Some((b, false));
            }
        }
        if key.full {
            let pending: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| found_at[i].is_none())
                .collect();
            if !pending.is_empty() {
                let span = cache.span(key, cfg.b_cap, cfg.composite, p_max);
                let hits: Vec<usize> = pending
                    .par_iter()
                    .copied()
                    .filter(|&i| span.contains(&cases[i].target))
                    .collect();
                for i in hits {
                    found_at[i] = Some((cfg.b_cap, true));
                }
            }
        }
    }

    let failures: Vec<Failure> = cases
        .iter()
        .zip(&found_at)
        .filter(|(_, f)| f.is_none())
        .map(|(c, _)| Failure {
            sample: c.label.clone(),
            reason: format!("not found at B = {}", cfg.b_cap),
        })
        .collect();
    let certified = cases.len() - failures.len();
    let p = match (cfg.p_max, p_used.iter().max()) {
        (Some(p), _) => p.to_string(),
        (None, Some(p)) => format!("m+n+2 (max {p})"),
        (None, None) => "m+n+2".to_string(),
    };
    IdentityRecord {
        id,
        candidates: 0,
        samples: cases.len(),
        certified,
        zero_targets: 0,
        found: failures.is_empty(),
        b: found_at.iter().flatten().map(|(b, _)| *b).max(),
        p,
        used_full: found_at.iter().flatten().any(|(_, f)| *f),
        millis: None,
        failures,
    }
}

/// Checks the preconditions of the cited statement on one sample.
fn hypothesis<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    id: IdentityId,
    p: &Params<A::Word>,
) -> std::result::Result<(), String> {
    let t = ctx.order();
    let r = |w: &A::Word| ctx.residue(w);
    let g = &p.grades;
    match id {
        IdentityId::L31 => {
            let (m, n) = (g[0], g[1]);
            if modt(m.i() as i64 - n.i() as i64, t) == r(&p.words[0]) {
                return Err("i1 - i3 = r mod T".into());
            }
        }
        IdentityId::L33 => {
            let (s, k) = (p.ints[0], p.ints[1]);
            if !(k >= s && s >= 0) {
                return Err(format!("need k >= s >= 0, got s = {s}, k = {k}"));
            }
        }
        IdentityId::L34 | IdentityId::L58 => {
            let (m, n, pp) = (g[0], g[1], g[2]);
            if modt(pp.i() as i64 - n.i() as i64, t) != r(&p.words[0]) {
                return Err("i2 - i3 != r mod T".into());
            }
            if modt(m.i() as i64 - pp.i() as i64, t) != r(&p.words[1]) {
                return Err("i1 - i2 != s mod T".into());
            }
            let rest = m.add(&n).sub(&pp);
            if id == IdentityId::L34 && !rest.is_nonnegative() {
                return Err("m + n - p < 0".into());
            }
            if id == IdentityId::L58 {
                let first = pp.is_nonnegative() && !rest.is_nonnegative();
                let second = !pp.is_nonnegative() && rest.is_nonnegative();
                if !(first || second) {
                    return Err("neither p >= 0 > m + n - p nor p < 0 <= m + n - p".into());
                }
            }
        }
        IdentityId::P43 => {
            if g[0].units() < 1 || g[1].units() < 1 {
                return Err("m and n must be at least 1/T".into());
            }
        }
        IdentityId::E43 => {
            if g.iter().any(|x| x.units() < 1) {
                return Err("p1, p2, p3 must be at least 1/T".into());
            }
        }
        _ => {}
    }
    if g.iter().take(2).any(|x| !x.is_nonnegative()) {
        return Err("m and n must be nonnegative".into());
    }
    Ok(())
}

fn grade_list(cfg: &VerifyConfig) -> Vec<GradeIndex> {
    cfg.max_grade.grades_upto()
}

/// Admissible samples of one identity. Samples whose target is already zero
/// in `V` are counted but not searched.
#[derive(Clone, Debug)]
pub struct CaseSet<W: Ord> {
    pub candidates: usize,
    pub zero_targets: usize,
    pub cases: Vec<Case<W>>,
}

/// Enumerates parameter tuples, filters by hypothesis, forms the targets,
/// and subsamples the nonzero ones.
pub fn build_cases<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    id: IdentityId,
    cfg: &VerifyConfig,
) -> Result<CaseSet<A::Word>> {
    let alg = ctx.algebra();
    let t = ctx.order();
    let sw = cfg.sample_weight;
    let grades = grade_list(cfg);
    let pairs: Vec<(GradeIndex, GradeIndex)> = grades
        .iter()
        .flat_map(|m| grades.iter().map(move |n| (*m, *n)))
        .collect();
    let mut rel = RelationSamples::new();
    let rel_w = sw.min(3);

    let mut params: Vec<Params<A::Word>> = Vec::new();
    let mut rel_lists: Vec<(String, u32)> = Vec::new();
    let mut rel_elems: Vec<Element<A::Word>> = Vec::new();
    let mut push_rel = |list: &[(String, u32, Element<A::Word>)],
                        rel_lists: &mut Vec<(String, u32)>|
     -> Vec<(usize, u32)> {
        list.iter()
            .filter(|(_, w, _)| *w <= sw)
            .map(|(d, w, e)| {
                rel_lists.push((d.clone(), *w));
                rel_elems.push(e.clone());
                (rel_lists.len() - 1, *w)
            })
            .collect()
    };

    match id {
        IdentityId::L31 | IdentityId::C35 => {
            for (m, n) in &pairs {
                for u in basis_upto(alg, sw) {
                    params.push(Params {
                        words: vec![u],
                        grades: vec![*m, *n],
                        ints: vec![],
                        relation: None,
                    });
                }
            }
        }
        IdentityId::L33 => {
            for (m, n) in &pairs {
                for w in word_tuples_upto(alg, 2, sw) {
                    for k in 0..=2 {
                        for s in 0..=k {
                            params.push(Params {
                                words: w.clone(),
                                grades: vec![*m, *n],
                                ints: vec![s, k],
                                relation: None,
                            });
                        }
                    }
                }
            }
        }
        IdentityId::L34 | IdentityId::L58 => {
            let wide: Vec<GradeIndex> = if id == IdentityId::L58 {
                let top = cfg.max_grade.add(&cfg.max_grade).shift(2 * t as i64);
                (-(2 * t as i64)..=top.units())
                    .map(|k| GradeIndex::from_units(k, t))
                    .collect()
            } else {
                grades.clone()
            };
            for (m, n) in &pairs {
                for p in &wide {
                    for w in word_tuples_upto(alg, 2, sw) {
                        params.push(Params {
                            words: w,
                            grades: vec![*m, *n, *p],
                            ints: vec![],
                            relation: None,
                        });
                    }
                }
            }
        }
        IdentityId::L36 => {
            for (m, n) in &pairs {
                let list = rel.get(ctx, *m, *n, Level::Prime, sw).to_vec();
                for (ri, rw) in push_rel(&list, &mut rel_lists) {
                    for u in basis_upto(alg, sw.saturating_sub(rw)) {
                        for side in 0..2 {
                            params.push(Params {
                                words: vec![u.clone()],
                                grades: vec![*m, *n],
                                ints: vec![side],
                                relation: Some(ri),
                            });
                        }
                    }
                }
            }
        }
        IdentityId::L37 => {
            for (m, n) in &pairs {
                for w in word_tuples_upto(alg, 3, sw) {
                    params.push(Params {
                        words: w,
                        grades: vec![*m, *n],
                        ints: vec![],
                        relation: None,
                    });
                }
            }
        }
        IdentityId::L38 => {
            for (m, n) in &pairs {
                for p in &grades {
                    for side in 0..2 {
                        let (rm, rn) = if side == 0 { (*m, *p) } else { (*p, *n) };
                        let list = rel.get(ctx, rm, rn, Level::Full, rel_w).to_vec();
                        for (ri, rw) in push_rel(&list, &mut rel_lists) {
                            for u in basis_upto(alg, sw.saturating_sub(rw)) {
                                params.push(Params {
                                    words: vec![u],
                                    grades: vec![*m, *n, *p],
                                    ints: vec![side],
                                    relation: Some(ri),
                                });
                            }
                        }
                    }
                }
            }
        }
        IdentityId::P42 => {
            for (m, n) in &pairs {
                let list = rel.get(ctx, *m, *n, Level::Prime, sw).to_vec();
                for (ri, _) in push_rel(&list, &mut rel_lists) {
                    params.push(Params {
                        words: vec![],
                        grades: vec![*m, *n],
                        ints: vec![0],
                        relation: Some(ri),
                    });
                }
                for p in &grades {
                    for w in word_tuples_upto(alg, 2, sw) {
                        params.push(Params {
                            words: w,
                            grades: vec![*m, *n, *p],
                            ints: vec![1],
                            relation: None,
                        });
                    }
                }
            }
        }
        IdentityId::P43 => {
            for (m, n) in &pairs {
                if m.units() < 1 || n.units() < 1 {
                    continue;
                }
                let list = rel.get(ctx, *m, *n, Level::Full, rel_w).to_vec();
                for (ri, _) in push_rel(&list, &mut rel_lists) {
                    params.push(Params {
                        words: vec![],
                        grades: vec![*m, *n],
                        ints: vec![],
                        relation: Some(ri),
                    });
                }
            }
        }
        IdentityId::E43 => {
            let pos: Vec<GradeIndex> = grades.iter().copied().filter(|g| g.units() >= 1).collect();
            for p1 in &pos {
                for p2 in &pos {
                    for p3 in &pos {
                        for w in word_tuples_upto(alg, 2, sw) {
                            params.push(Params {
                                words: w,
                                grades: vec![*p1, *p2, *p3],
                                ints: vec![],
                                relation: None,
                            });
                        }
                    }
                }
            }
        }
    }

    let admissible: Vec<Params<A::Word>> = params
        .into_iter()
        .filter(|p| hypothesis(ctx, id, p).is_ok())
        .collect();
    let candidates = admissible.len();
    let formed: Vec<Case<A::Word>> = admissible
        .par_iter()
        .map(|p| {
            let (target, space) = form_target(ctx, id, p, &rel_elems);
            Case {
                label: p.label(&rel_lists),
                target,
                space,
            }
        })
        .collect();
    let (zero, nonzero): (Vec<_>, Vec<_>) = formed.into_iter().partition(|c| c.target.is_zero());
    Ok(CaseSet {
        candidates,
        zero_targets: zero.len(),
        cases: subsample(nonzero, cfg.samples, cfg.seed ^ id_salt(id)),
    })
}

fn id_salt(id: IdentityId) -> u64 {
    (IdentityId::ALL.iter().position(|x| *x == id).unwrap_or(0) as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Keeps everything when under the cap, otherwise a seeded subset in the
/// original order.
fn subsample<T: Clone>(items: Vec<T>, cap: usize, seed: u64) -> Vec<T> {
    if items.len() <= cap {
        return items;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, items.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

fn form_target<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    id: IdentityId,
    p: &Params<A::Word>,
    relations: &[Element<A::Word>],
) -> (Element<A::Word>, SpaceKey) {
    let alg = ctx.algebra();
    let g = &p.grades;
    let w = |i: usize| unit(&p.words[i]);
    let prime = |m: GradeIndex, n: GradeIndex| SpaceKey {
        inverse: ctx.is_inverse(),
        m,
        n,
        full: false,
    };
    let wt = |i: usize| alg.weight(&p.words[i]) as i64;
    match id {
        IdentityId::L31 => (w(0), prime(g[0], g[1])),
        IdentityId::L33 => (
            circ_shifted(ctx, &w(0), &w(1), &g[0], &g[1], p.ints[0], p.ints[1]),
            prime(g[0], g[1]),
        ),
        IdentityId::L34 => {
            let (m, n, pp) = (g[0], g[1], g[2]);
            let dual = m.add(&n).sub(&pp);
            let alpha = int(wt(0) - 1) + pp.value() - n.value();
            let x = star_nmp(ctx, &w(0), &w(1), &m, &pp, &n)
                .sub(&star_nmp(ctx, &w(1), &w(0), &m, &dual, &n))
                .sub(&residue_product(alg, &w(0), &w(1), &alpha, 0));
            (x, prime(m, n))
        }
        IdentityId::C35 => {
            let x = star_right(ctx, &w(0), &vacuum(alg), &g[0], &g[1]).sub(&w(0));
            (x, prime(g[0], g[1]))
        }
        IdentityId::L36 => {
            let o = &relations[p.relation.expect("relation sample")];
            let x = if p.ints[0] == 0 {
                star_bar(ctx, &w(0), o, &g[0], &g[1])
            } else {
                star_right(ctx, o, &w(0), &g[0], &g[1])
            };
            (x, prime(g[0], g[1]))
        }
        IdentityId::L37 => {
            let (m, n) = (g[0], g[1]);
            let ab = star_bar(ctx, &w(0), &w(1), &m, &n);
            let bc = star_right(ctx, &w(1), &w(2), &m, &n);
            let x = star_right(ctx, &ab, &w(2), &m, &n).sub(&star_bar(ctx, &w(0), &bc, &m, &n));
            (x, prime(m, n))
        }
        IdentityId::L38 => {
            let (m, n, pp) = (g[0], g[1], g[2]);
            let o = &relations[p.relation.expect("relation sample")];
            let x = if p.ints[0] == 0 {
                star_nmp(ctx, &w(0), o, &m, &pp, &n)
            } else {
                star_nmp(ctx, o, &w(0), &m, &pp, &n)
            };
            (
                x,
                SpaceKey {
                    full: true,
                    ..prime(m, n)
                },
            )
        }
        IdentityId::P42 => {
            let inv = ctx.inverse();
            let (m, n) = (g[0], g[1]);
            let space = SpaceKey {
                inverse: inv.is_inverse(),
                m: n,
                n: m,
                full: false,
            };
            if p.ints[0] == 0 {
                let o = &relations[p.relation.expect("relation sample")];
                (phi_map(alg, o), space)
            } else {
                let pp = g[2];
                let left = phi_map(alg, &star_nmp(ctx, &w(0), &w(1), &m, &pp, &n));
                let right = star_nmp(
                    &inv,
                    &phi_map(alg, &w(1)),
                    &phi_map(alg, &w(0)),
                    &n,
                    &pp,
                    &m,
                );
                (left.sub(&right), space)
            }
        }
        IdentityId::P43 => {
            let o = relations[p.relation.expect("relation sample")].clone();
            let down = |x: GradeIndex| x.shift(-1);
            (
                o,
                SpaceKey {
                    full: true,
                    ..prime(down(g[0]), down(g[1]))
                },
            )
        }
        IdentityId::E43 => {
            let (p1, p2, p3) = (g[0], g[1], g[2]);
            let x = star_nmp(ctx, &w(0), &w(1), &p1, &p2, &p3).sub(&star_nmp(
                ctx,
                &w(0),
                &w(1),
                &p1.shift(-1),
                &p2.shift(-1),
                &p3.shift(-1),
            ));
            (x, prime(p1.shift(-1), p3.shift(-1)))
        }
        IdentityId::L58 => {
            let (m, n, pp) = (g[0], g[1], g[2]);
            let alpha: Scalar = int(wt(0) - 1) + pp.value() - n.value();
            let rp = residue_product(alg, &w(0), &w(1), &alpha, 0);
            let x = if pp.is_nonnegative() {
                star_nmp(ctx, &w(0), &w(1), &m, &pp, &n).sub(&rp)
            } else {
                let dual = m.add(&n).sub(&pp);
                star_nmp(ctx, &w(1), &w(0), &m, &dual, &n)
                    .scaled(&int(-1))
                    .sub(&rp)
            };
            (x, prime(m, n))
        }
    }
}

/// Checks a user-supplied sample against the statement's hypotheses and
/// returns its target and space.
pub fn sample_case<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    id: IdentityId,
    words: Vec<A::Word>,
    grades: Vec<GradeIndex>,
    ints: Vec<i64>,
) -> Result<Case<A::Word>> {
    let need = match id {
        IdentityId::L31 | IdentityId::C35 => (1, 2, 0),
        IdentityId::L33 => (2, 2, 2),
        IdentityId::L34 | IdentityId::L58 | IdentityId::E43 => (2, 3, 0),
        IdentityId::L37 => (3, 2, 0),
        IdentityId::P42 => (2, 3, 1),
        _ => {
            return Err(Error::Config(format!(
                "{id} samples carry a relation element and are generated internally"
            )))
        }
    };
    if (words.len(), grades.len(), ints.len().min(need.2)) != need {
        return Err(Error::Config(format!("wrong sample shape for {id}")));
    }
    let mut ints = ints;
    if id == IdentityId::P42 {
        ints = vec![1];
    }
    let p = Params {
        words,
        grades,
        ints,
        relation: None,
    };
    hypothesis(ctx, id, &p).map_err(|reason| Error::Hypothesis {
        id: id.to_string(),
        reason,
    })?;
    let (target, space) = form_target(ctx, id, &p, &[]);
    Ok(Case {
        label: p.label(&[]),
        target,
        space,
    })
}
