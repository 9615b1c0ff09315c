//! Spanning sets of `O'_{g,n,m}(V)`, `O''_{g,n,m}(V)` and `O'''_{g,n,m}(V)`
//! drawn from monomial tuples under a total-weight budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grade::GradeIndex;
use crate::linalg::SparseVec;
use crate::products::{circ_nm, l_relation, star_nmp};
use crate::voa::{basis_upto, Element, VertexAlgebra, VoaContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// `O'` only.
    Prime,
    /// `O' + O'' + O'''`.
    Full,
}

/// Weight budgets and the cutoff on internal grades.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenBounds {
    /// Largest total weight of the monomials entering an `O'` generator.
    pub b: u32,
    /// Largest total weight of the monomials entering an `O''` or `O'''`
    /// generator; never above `b`.
    pub composite: u32,
    /// Internal grades `p, p_1, p_2, p_3` range over `0 <= p <= p_max`.
    pub p_max: GradeIndex,
}

impl GenBounds {
    pub fn new(b: u32, composite: u32, p_max: GradeIndex) -> Self {
        Self {
            b,
            composite: composite.min(b),
            p_max,
        }
    }

    pub fn with_b(&self, b: u32) -> Self {
        Self::new(b, self.composite, self.p_max)
    }
}

/// A generator together with the total weight of the monomials it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator<W: Ord> {
    pub weight: u32,
    pub element: Element<W>,
}

/// All `k`-tuples of basis words with weights summing to exactly `total`,
/// in lexicographic order of (weights, words).
pub fn word_tuples<A: VertexAlgebra>(alg: &A, k: usize, total: u32) -> Vec<Vec<A::Word>> {
    fn go<A: VertexAlgebra>(
        alg: &A,
        k: usize,
        rest: u32,
        prefix: &mut Vec<A::Word>,
        out: &mut Vec<Vec<A::Word>>,
    ) {
        if k == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let lo = if k == 1 { rest } else { 0 };
        for w in lo..=rest {
            if alg.weight_cap().is_some_and(|c| w > c) {
                break;
            }
            for word in alg.basis(w) {
                prefix.push(word);
                go(alg, k - 1, rest - w, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(alg, k, total, &mut Vec::new(), &mut out);
    out
}

fn unit<W: Ord + Clone>(w: &W) -> Element<W> {
    SparseVec::unit(w.clone())
}

/// Generators of `O'_{g,n,m}(V)` coming from monomials of total weight `total`.
pub fn prime_generators_at<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    total: u32,
) -> Vec<Element<A::Word>> {
    let alg = ctx.algebra();
    let pairs = word_tuples(alg, 2, total);
    let mut out: Vec<Element<A::Word>> = pairs
        .par_iter()
        .map(|t| circ_nm(ctx, &unit(&t[0]), &unit(&t[1]), m, n))
        .collect();
    out.extend(
        alg.basis(total)
            .iter()
            .map(|u| l_relation(alg, &unit(u), m, n)),
    );
    out.retain(|x| !x.is_zero());
    out
}

/// Index triples `(p1, p2, p3)` for the composite generators.
fn grade_triples(p_max: &GradeIndex) -> Vec<(GradeIndex, GradeIndex, GradeIndex)> {
    let ps = p_max.grades_upto();
    let mut out = Vec::new();
    for p1 in &ps {
        for p2 in &ps {
            for p3 in &ps {
                out.push((*p1, *p2, *p3));
            }
        }
    }
    out
}

/// `u *_{m,p3}^n ((a *_{p1,p2}^{p3} b) *_{m,p1}^{p3} c - a *_{m,p2}^{p3} (b *_{m,p1}^{p2} c))`
pub fn double_prime_generator<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    words: &[A::Word],
    ps: (GradeIndex, GradeIndex, GradeIndex),
) -> Element<A::Word> {
    let (u, a, b, c) = (
        unit(&words[0]),
        unit(&words[1]),
        unit(&words[2]),
        unit(&words[3]),
    );
    let defect = associator(ctx, m, &a, &b, &c, ps);
    if defect.is_zero() {
        return defect;
    }
    star_nmp(ctx, &u, &defect, m, &ps.2, n)
}

/// `(a *_{p1,p2}^{p3} b) *_{m,p1}^{p3} c - a *_{m,p2}^{p3} (b *_{m,p1}^{p2} c)`
pub fn associator<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    a: &Element<A::Word>,
    b: &Element<A::Word>,
    c: &Element<A::Word>,
    (p1, p2, p3): (GradeIndex, GradeIndex, GradeIndex),
) -> Element<A::Word> {
    let ab = star_nmp(ctx, a, b, &p1, &p2, &p3);
    let left = star_nmp(ctx, &ab, c, m, &p1, &p3);
    let bc = star_nmp(ctx, b, c, m, &p1, &p2);
    let right = star_nmp(ctx, a, &bc, m, &p2, &p3);
    left.sub(&right)
}

/// `(u *_{p1,p2}^n o) *_{m,p1}^n v` for `o` a generator of `O'_{g,p2,p1}(V)`.
pub fn triple_prime_generator<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    u: &Element<A::Word>,
    o: &Element<A::Word>,
    v: &Element<A::Word>,
    p1: &GradeIndex,
    p2: &GradeIndex,
) -> Element<A::Word> {
    let left = star_nmp(ctx, u, o, p1, p2, n);
    if left.is_zero() {
        return left;
    }
    star_nmp(ctx, &left, v, m, p1, n)
}

/// Generators of `O''` and `O'''` coming from monomials of total weight `total`.
pub fn composite_generators_at<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    total: u32,
    p_max: &GradeIndex,
) -> Vec<Element<A::Word>> {
    let alg = ctx.algebra();
    let triples = grade_triples(p_max);

    let quads = word_tuples(alg, 4, total);
    let mut jobs: Vec<Job<A::Word>> = Vec::new();
    for q in &quads {
        for ps in &triples {
            jobs.push(Job::DoublePrime(q.clone(), *ps));
        }
    }
    let ps = p_max.grades_upto();
    for q in &quads {
        for p1 in &ps {
            for p2 in &ps {
                jobs.push(Job::TripleCirc(q.clone(), *p1, *p2));
            }
        }
    }
    for t in word_tuples(alg, 3, total) {
        for p1 in &ps {
            for p2 in &ps {
                jobs.push(Job::TripleL(t.clone(), *p1, *p2));
            }
        }
    }

    let mut out: Vec<Element<A::Word>> = jobs
        .par_iter()
        .map(|job| match job {
            Job::DoublePrime(words, ps) => double_prime_generator(ctx, m, n, words, *ps),
            Job::TripleCirc(w, p1, p2) => {
                let o = circ_nm(ctx, &unit(&w[1]), &unit(&w[2]), p1, p2);
                triple_prime_generator(ctx, m, n, &unit(&w[0]), &o, &unit(&w[3]), p1, p2)
            }
            Job::TripleL(w, p1, p2) => {
                let o = l_relation(alg, &unit(&w[1]), p1, p2);
                triple_prime_generator(ctx, m, n, &unit(&w[0]), &o, &unit(&w[2]), p1, p2)
            }
        })
        .collect();
    out.retain(|x| !x.is_zero());
    out
}

enum Job<W> {
    DoublePrime(Vec<W>, (GradeIndex, GradeIndex, GradeIndex)),
    TripleCirc(Vec<W>, GradeIndex, GradeIndex),
    TripleL(Vec<W>, GradeIndex, GradeIndex),
}

/// Generators in canonical order, grouped by nondecreasing monomial weight.
pub fn generate_graded<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    level: Level,
    bounds: &GenBounds,
) -> Vec<Generator<A::Word>> {
    let mut out = Vec::new();
    for w in 0..=bounds.b {
        out.extend(generators_at(ctx, m, n, level, bounds, w));
    }
    out
}

/// The generators whose monomials have total weight exactly `w`.
pub fn generators_at<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    level: Level,
    bounds: &GenBounds,
    w: u32,
) -> Vec<Generator<A::Word>> {
    let mut elems = prime_generators_at(ctx, m, n, w);
    if level == Level::Full && w <= bounds.composite {
        elems.extend(composite_generators_at(ctx, m, n, w, &bounds.p_max));
    }
    elems
        .into_iter()
        .map(|element| Generator { weight: w, element })
        .collect()
}

/// Flat generator list of `O_{g,n,m}(V)` at the given level.
pub fn generate_o<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    m: &GradeIndex,
    n: &GradeIndex,
    level: Level,
    bounds: &GenBounds,
) -> Vec<Element<A::Word>> {
    generate_graded(ctx, m, n, level, bounds)
        .into_iter()
        .map(|g| g.element)
        .collect()
}

/// Basis words of weight at most `w`, for callers that enumerate samples.
pub fn monomials_upto<A: VertexAlgebra>(alg: &A, w: u32) -> Vec<A::Word> {
    basis_upto(alg, w)
}
