//! Filtered images of `A_{g,n,m}(V) = V / O_{g,n,m}(V)`.
//!
//! The relation span is computed from generators under a weight budget `B`,
//! then restricted to `V_{<=W}`. Because pivots are greatest keys and keys
//! are ordered by weight first, restricting the echelon rows to pivots of
//! weight at most `W` gives exactly the intersection with `V_{<=W}`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{generators_at, GenBounds, Level};
use crate::grade::GradeIndex;
use crate::linalg::{SpanBasis, SparseVec};
use crate::products::star_nmp;
use crate::scalar::{to_fraction_string, Scalar};
use crate::voa::{basis_upto, vacuum, Element, VertexAlgebra, VoaContext};

/// Ranks recorded after all generators of monomial weight `<= b` are in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub b: u32,
    pub rank: usize,
    pub rank_within: usize,
}

#[derive(Clone)]
pub struct FilteredQuotient<A: VertexAlgebra> {
    ctx: VoaContext<A>,
    pub m: GradeIndex,
    pub n: GradeIndex,
    pub w: u32,
    pub bounds: GenBounds,
    pub level: Level,
    span: SpanBasis<A::Word>,
    relations: SpanBasis<A::Word>,
    coset_reps: Vec<A::Word>,
    pub log: Vec<LogEntry>,
}

impl<A: VertexAlgebra> FilteredQuotient<A> {
    pub fn build(
        ctx: &VoaContext<A>,
        m: GradeIndex,
        n: GradeIndex,
        w: u32,
        bounds: GenBounds,
        level: Level,
    ) -> Result<Self> {
        if bounds.b < w {
            return Err(Error::Config(format!(
                "generator bound B = {} is below the weight cap W = {w}",
                bounds.b
            )));
        }
        if let Some(cap) = ctx.algebra().weight_cap() {
            if bounds.b > cap {
                return Err(Error::Truncation(format!(
                    "B = {} exceeds the algebra's weight cap {cap}",
                    bounds.b
                )));
            }
        }
        let alg = ctx.algebra();
        let mut span = SpanBasis::new();
        let mut log = Vec::new();
        for b in 0..=bounds.b {
            for g in generators_at(ctx, &m, &n, level, &bounds, b) {
                span.insert(&g.element);
            }
            if b >= w {
                let rank_within = span.pivots().filter(|k| alg.weight(k) <= w).count();
                log.push(LogEntry {
                    b,
                    rank: span.rank(),
                    rank_within,
                });
            }
        }
        let relations = span.rows_within(|k| alg.weight(k) <= w);
        let coset_reps = basis_upto(alg, w)
            .into_iter()
            .filter(|k| !relations.is_pivot(k))
            .collect();
        Ok(Self {
            ctx: ctx.clone(),
            m,
            n,
            w,
            bounds,
            level,
            span,
            relations,
            coset_reps,
            log,
        })
    }

    pub fn context(&self) -> &VoaContext<A> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.coset_reps.len()
    }

    pub fn coset_reps(&self) -> &[A::Word] {
        &self.coset_reps
    }

    pub fn relations(&self) -> &SpanBasis<A::Word> {
        &self.relations
    }

    /// The whole relation span computed at `B`, including rows above `W`.
    pub fn span(&self) -> &SpanBasis<A::Word> {
        &self.span
    }

    /// Dimension of the image of `V_{<=k}` for `k = 0..=W`.
    pub fn cumulative_dims(&self) -> Vec<usize> {
        let alg = self.ctx.algebra();
        (0..=self.w)
            .map(|k| {
                self.coset_reps
                    .iter()
                    .filter(|w| alg.weight(w) <= k)
                    .count()
            })
            .collect()
    }

    /// Stable once the restricted rank held still over the last two
    /// increments of the budget.
    pub fn is_stable(&self) -> bool {
        let n = self.log.len();
        n >= 3 && {
            let r = self.log[n - 1].rank_within;
            self.log[n - 2].rank_within == r && self.log[n - 3].rank_within == r
        }
    }

    /// Canonical representative of `x + O` supported on coset reps.
    pub fn normal_form(&self, x: &Element<A::Word>) -> Result<Element<A::Word>> {
        let alg = self.ctx.algebra();
        let r = self.span.reduce(x);
        if let Some(k) = r.keys().find(|k| alg.weight(k) > self.w) {
            return Err(Error::Truncation(format!(
                "{k} of weight {} does not reduce into V_<={} at B = {}",
                alg.weight(k),
                self.w,
                self.bounds.b
            )));
        }
        Ok(r)
    }

    /// Coordinates in the coset-rep basis.
    pub fn coordinates(&self, x: &Element<A::Word>) -> Result<Vec<Scalar>> {
        let nf = self.normal_form(x)?;
        Ok(self.coset_reps.iter().map(|k| nf.coeff(k)).collect())
    }

    pub fn contains(&self, x: &Element<A::Word>) -> bool {
        self.span.contains(x)
    }

    pub fn summary(&self) -> DimRecord {
        DimRecord {
            m: self.m.to_string(),
            n: self.n.to_string(),
            w: self.w,
            b: self.bounds.b,
            composite: self.bounds.composite,
            p: self.bounds.p_max.to_string(),
            level: self.level,
            dim: self.dim(),
            cumulative: self.cumulative_dims(),
            coset_reps: self.coset_reps.iter().map(|k| k.to_string()).collect(),
            stable: self.is_stable(),
            log: self.log.clone(),
        }
    }
}

/// Serializable dimension record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimRecord {
    pub m: String,
    pub n: String,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "B")]
    pub b: u32,
    pub composite: u32,
    #[serde(rename = "P")]
    pub p: String,
    pub level: Level,
    pub dim: usize,
    pub cumulative: Vec<usize>,
    pub coset_reps: Vec<String>,
    pub stable: bool,
    pub log: Vec<LogEntry>,
}

/// Structure constants of the filtered `A_{g,n}(V)`.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraStructure {
    pub n: String,
    pub basis: Vec<String>,
    /// `(i, j) -> coordinates of e_i * e_j`, for `wt e_i + wt e_j <= W`.
    pub table: BTreeMap<String, Vec<String>>,
    pub associative: bool,
    pub triples_checked: usize,
    /// Coordinates of `omega`, when `W >= 2`.
    pub omega: Option<Vec<String>>,
    pub identity: Vec<String>,
}

/// Products of coset reps in `A_{g,n}(V)`, and the associativity check.
pub fn algebra_structure<A: VertexAlgebra>(q: &FilteredQuotient<A>) -> Result<AlgebraStructure> {
    if q.m != q.n {
        return Err(Error::Config("algebra structure needs m = n".into()));
    }
    if !q.is_stable() {
        return Err(Error::Unstable(format!(
            "A_{{g,{}}} at W = {}, B = {} has not stabilized",
            q.n, q.w, q.bounds.b
        )));
    }
    let ctx = q.context();
    let alg = ctx.algebra();
    let n = q.n;
    let reps = q.coset_reps();
    let unit = |w: &A::Word| SparseVec::unit(w.clone());
    let strings = |v: &[Scalar]| v.iter().map(to_fraction_string).collect::<Vec<_>>();

    let mut table = BTreeMap::new();
    let mut products: BTreeMap<(usize, usize), Element<A::Word>> = BTreeMap::new();
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            if alg.weight(a) + alg.weight(b) > q.w {
                continue;
            }
            let nf = q.normal_form(&star_nmp(ctx, &unit(a), &unit(b), &n, &n, &n))?;
            let coords: Vec<Scalar> = reps.iter().map(|k| nf.coeff(k)).collect();
            table.insert(format!("{i},{j}"), strings(&coords));
            products.insert((i, j), nf);
        }
    }

    let mut associative = true;
    let mut checked = 0;
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            for (k, c) in reps.iter().enumerate() {
                if alg.weight(a) + alg.weight(b) + alg.weight(c) > q.w {
                    continue;
                }
                let ab = &products[&(i, j)];
                let bc = &products[&(j, k)];
                let left = q.normal_form(&star_nmp(ctx, ab, &unit(c), &n, &n, &n))?;
                let right = q.normal_form(&star_nmp(ctx, &unit(a), bc, &n, &n, &n))?;
                checked += 1;
                if left != right {
                    associative = false;
                }
            }
        }
    }

    let omega = if q.w >= 2 {
        Some(strings(&q.coordinates(&alg.conformal_vector())?))
    } else {
        None
    };
    let identity = strings(&q.coordinates(&vacuum(alg))?);
    Ok(AlgebraStructure {
        n: n.to_string(),
        basis: reps.iter().map(|k| k.to_string()).collect(),
        table,
        associative,
        triples_checked: checked,
        omega,
        identity,
    })
}

/// Dimensions with `O'` alone and with the full `O`, side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelDelta {
    pub prime: DimRecord,
    pub full: DimRecord,
    pub delta: i64,
}

pub fn prime_full_delta<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: GradeIndex,
    n: GradeIndex,
    w: u32,
    bounds: GenBounds,
) -> Result<LevelDelta> {
    let prime = FilteredQuotient::build(ctx, m, n, w, bounds, Level::Prime)?.summary();
    let full = FilteredQuotient::build(ctx, m, n, w, bounds, Level::Full)?.summary();
    let delta = prime.dim as i64 - full.dim as i64;
    Ok(LevelDelta { prime, full, delta })
}

/// Whether `x` equals a scalar multiple of the identity coset.
pub fn scalar_of_identity<A: VertexAlgebra>(
    q: &FilteredQuotient<A>,
    x: &Element<A::Word>,
) -> Result<Option<Scalar>> {
    let alg = q.context().algebra();
    let one = q.normal_form(&vacuum(alg))?;
    let nx = q.normal_form(x)?;
    if nx.is_zero() {
        return Ok(Some(Scalar::zero()));
    }
    let Some((k, c)) = one.leading() else {
        return Ok(None);
    };
    let ratio = nx.coeff(k) / c;
    Ok((one.scaled(&ratio) == nx).then_some(ratio))
}
