//! Residue products `Res_z (1+z)^alpha z^{-beta} Y(u, z) v` and the twisted
//! products built from them.

use num_traits::{One, Zero};

use crate::grade::GradeIndex;
use crate::linalg::SparseVec;
use crate::scalar::{frac, int, rbinom, sign, Scalar};
use crate::voa::{virasoro_mode, Element, VertexAlgebra, VoaContext};

/// `delta_i(r)`: 1 if `i >= r`, with the convention `delta_i(T) = 0`.
pub fn delta_fn(i: u32, r: u32, t: u32) -> i64 {
    (r != t && i >= r) as i64
}

/// The sign `epsilon` attached to residues `(i1, i2, i3)`.
pub fn epsilon_fn(i1: u32, i2: u32, i3: u32, t: u32) -> i64 {
    let d = i1 as i64 + i3 as i64 - i2 as i64;
    if d >= t as i64 {
        1
    } else if d >= 0 {
        0
    } else {
        -1
    }
}

/// `sum_j C(alpha, j) a_{j - beta} b` for basis words.
pub fn residue_product_word<A: VertexAlgebra>(
    alg: &A,
    a: &A::Word,
    b: &A::Word,
    alpha: &Scalar,
    beta: i64,
) -> Element<A::Word> {
    let mut out = SparseVec::new();
    let top = (alg.weight(a) + alg.weight(b)) as i64 + beta - 1;
    let mut coeff = Scalar::one();
    let mut j = 0i64;
    while j <= top {
        if coeff.is_zero() {
            break;
        }
        out.axpy(&coeff, &alg.nth_product(a, j - beta, b));
        coeff = coeff * (alpha - int(j)) / int(j + 1);
        j += 1;
    }
    out
}

/// Bilinear extension of [`residue_product_word`] with a fixed exponent.
pub fn residue_product<A: VertexAlgebra>(
    alg: &A,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    alpha: &Scalar,
    beta: i64,
) -> Element<A::Word> {
    let mut out = SparseVec::new();
    for (a, ca) in u.iter() {
        for (b, cb) in v.iter() {
            out.axpy(&(ca * cb), &residue_product_word(alg, a, b, alpha, beta));
        }
    }
    out
}

/// Applies a word-level bilinear product to combinations, so that every
/// word of `u` uses its own weight and residue.
fn bilinear<A, F>(u: &Element<A::Word>, v: &Element<A::Word>, mut f: F) -> Element<A::Word>
where
    A: VertexAlgebra,
    F: FnMut(&A::Word, &A::Word) -> Element<A::Word>,
{
    let mut out = SparseVec::new();
    for (a, ca) in u.iter() {
        for (b, cb) in v.iter() {
            let term = f(a, b);
            if !term.is_zero() {
                out.axpy(&(ca * cb), &term);
            }
        }
    }
    out
}

/// Exponents `(alpha, beta)` of `a o_{g,m}^n v` for a word `a`.
pub fn circ_exponents<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    a: &A::Word,
    m: &GradeIndex,
    n: &GradeIndex,
) -> (Scalar, i64) {
    let t = ctx.order();
    let r = ctx.residue(a);
    let d1 = delta_fn(m.i(), r, t);
    let d3 = delta_fn(n.i(), t - r, t);
    let alpha = int(ctx.weight(a) as i64 - 1 + d1 + m.l()) + frac(r as i64, t as i64);
    let beta = m.l() + n.l() + d1 + d3 + 1;
    (alpha, beta)
}

/// `u o_{g,m}^n v`, shifted by `(1+z)^s z^{-k}` as in the family of
/// elements that lie in `O'`; `s = k = 0` gives the product itself.
pub fn circ_shifted<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    m: &GradeIndex,
    n: &GradeIndex,
    s: i64,
    k: i64,
) -> Element<A::Word> {
    let alg = ctx.algebra();
    bilinear::<A, _>(u, v, |a, b| {
        let (alpha, beta) = circ_exponents(ctx, a, m, n);
        residue_product_word(alg, a, b, &(alpha + int(s)), beta + k)
    })
}

pub fn circ_nm<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    m: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    circ_shifted(ctx, u, v, m, n, 0, 0)
}

/// `a *_{g,m,p}^n b` for basis words.
pub fn star_word<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    a: &A::Word,
    b: &A::Word,
    m: &GradeIndex,
    p: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    let t = ctx.order();
    let r = ctx.residue(a);
    if (p.i() as i64 - n.i() as i64).rem_euclid(t as i64) != r as i64 {
        return SparseVec::new();
    }
    let d1 = delta_fn(m.i(), r, t);
    let d3 = delta_fn(n.i(), t - r, t);
    let alpha = int(ctx.weight(a) as i64 - 1 + m.l() + d1) + frac(r as i64, t as i64);
    let base = m.l() + n.l() - p.l() + d1 + d3;
    let alg = ctx.algebra();
    let mut out = SparseVec::new();
    for i in 0..=p.l().max(-1) {
        let c = sign(i) * rbinom(&int(base - 1 + i), i as u32);
        if c.is_zero() {
            continue;
        }
        out.axpy(&c, &residue_product_word(alg, a, b, &alpha, base + i));
    }
    out
}

/// `u *_{g,m,p}^n v`, zero unless `i_2 - i_3 = r` mod `T`.
pub fn star_nmp<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    m: &GradeIndex,
    p: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    bilinear::<A, _>(u, v, |a, b| star_word(ctx, a, b, m, p, n))
}

/// The left product `*bar_{g,m}^n`, i.e. `p = n`.
pub fn star_bar<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    m: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    star_nmp(ctx, u, v, m, n, n)
}

/// The right product `*_{g,m}^n`, i.e. `p = m`.
pub fn star_right<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    m: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    star_nmp(ctx, u, v, m, m, n)
}

/// The algebra product `*_{g,n}` of `A_{g,n}(V)`.
pub fn star_n<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    u: &Element<A::Word>,
    v: &Element<A::Word>,
    n: &GradeIndex,
) -> Element<A::Word> {
    star_nmp(ctx, u, v, n, n, n)
}

/// `(L(-1) + L(0) + m - n) u`.
pub fn l_relation<A: VertexAlgebra>(
    alg: &A,
    u: &Element<A::Word>,
    m: &GradeIndex,
    n: &GradeIndex,
) -> Element<A::Word> {
    let shift = m.value() - n.value();
    let mut out = virasoro_mode(alg, -1, u);
    for (w, c) in u.iter() {
        let k = int(alg.weight(w) as i64) + &shift;
        out.add_term(w.clone(), c * k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::{Automorphism, FockWord, FreeBoson};

    fn e(parts: &[u32]) -> Element<FockWord> {
        SparseVec::unit(FockWord::new(parts.to_vec()).unwrap())
    }

    fn g(l: i64, i: u32, t: u32) -> GradeIndex {
        GradeIndex::new(l, i, t)
    }

    #[test]
    fn delta_and_epsilon() {
        assert_eq!(delta_fn(0, 0, 2), 1);
        assert_eq!(delta_fn(0, 1, 2), 0);
        assert_eq!(delta_fn(1, 2, 2), 0);
        assert_eq!(epsilon_fn(1, 0, 1, 2), 1);
        assert_eq!(epsilon_fn(0, 0, 0, 5), 0);
        assert_eq!(epsilon_fn(0, 1, 0, 2), -1);
    }

    #[test]
    fn residue_product_examples() {
        let fb = FreeBoson::new(Automorphism::Trivial);
        let h = e(&[1]);
        let v = e(&[2, 1]);
        // only 1_{-1} v survives, which needs beta = 1
        assert_eq!(residue_product(&fb, &e(&[]), &v, &frac(7, 3), 1), v);
        assert!(residue_product(&fb, &e(&[]), &v, &frac(7, 3), 0).is_zero());
        assert_eq!(residue_product(&fb, &h, &h, &int(1), 1), e(&[1, 1]));
        let want = e(&[1, 1]).sub(&e(&[]).scaled(&frac(1, 8)));
        assert_eq!(residue_product(&fb, &h, &h, &frac(1, 2), 1), want);
    }

    #[test]
    fn circ_examples() {
        let triv = VoaContext::new(FreeBoson::new(Automorphism::Trivial));
        let theta = VoaContext::new(FreeBoson::new(Automorphism::Theta));
        let h = e(&[1]);
        let z1 = g(0, 0, 1);
        let z2 = g(0, 0, 2);
        assert_eq!(
            circ_nm(&triv, &h, &h, &z1, &z1),
            e(&[2, 1]).add(&e(&[1, 1]))
        );
        let want = e(&[1, 1]).sub(&e(&[]).scaled(&frac(1, 8)));
        assert_eq!(circ_nm(&theta, &h, &h, &z2, &z2), want);
        let one = e(&[]);
        assert!(circ_nm(&theta, &one, &one, &g(1, 1, 2), &g(0, 1, 2)).is_zero());
    }

    #[test]
    fn star_examples() {
        let theta = VoaContext::new(FreeBoson::new(Automorphism::Theta));
        let triv = VoaContext::new(FreeBoson::new(Automorphism::Trivial));
        let u = e(&[2, 1]);
        let one = e(&[]);
        for m in [g(0, 0, 2), g(1, 1, 2)] {
            for n in [g(0, 1, 2), g(2, 0, 2)] {
                assert_eq!(star_bar(&theta, &one, &u, &m, &n), u);
                assert!(star_bar(&theta, &e(&[3]), &u, &m, &n).is_zero());
            }
        }
        let z = g(0, 0, 1);
        assert_eq!(star_nmp(&triv, &e(&[1]), &e(&[1]), &z, &z, &z), e(&[1, 1]));
    }

    #[test]
    fn l_relation_examples() {
        let fb = FreeBoson::new(Automorphism::Theta);
        let z = g(0, 0, 2);
        assert!(l_relation(&fb, &e(&[]), &z, &z).is_zero());
        assert_eq!(l_relation(&fb, &e(&[1]), &z, &z), e(&[2]).add(&e(&[1])));
        let want = e(&[2]).add(&e(&[1]).scaled(&frac(1, 2)));
        assert_eq!(l_relation(&fb, &e(&[1]), &z, &g(0, 1, 2)), want);
    }
}
