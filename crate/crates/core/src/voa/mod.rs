//! Vertex operator algebras given by their n-th products on a graded monomial
//! basis, together with a finite-order automorphism acting diagonally on it.
//!
//! [`FreeBoson`] is the built-in algebra; [`TableAlgebra`] loads a finite
//! structure-constant table for experiments.

mod fock;
mod table;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::sync::Arc;

use num_traits::One;

pub use fock::{Automorphism, FockWord, FreeBoson};
pub use table::{BasisEntry, StructureRecord, StructureTable, TableAlgebra, TableWord};

use crate::linalg::SparseVec;
use crate::scalar::{factorial, int, sign, Scalar};

pub type Element<W> = SparseVec<W>;

pub trait VertexAlgebra: Send + Sync {
    /// Homogeneous basis vector, an eigenvector of the automorphism.
    type Word: Clone + Ord + Hash + Debug + Display + Send + Sync;

    /// Order `T` of the automorphism `g`.
    fn order(&self) -> u32;

    fn vacuum(&self) -> Self::Word;

    /// Inverse of the word's `Display` form.
    fn parse_word(&self, s: &str) -> crate::error::Result<Self::Word>;

    fn weight(&self, w: &Self::Word) -> u32;

    /// The `r` in `0..T` with `g w = exp(-2 pi i r / T) w`.
    fn residue(&self, w: &Self::Word) -> u32;

    /// Basis words of the given weight, in ascending key order.
    fn basis(&self, weight: u32) -> Vec<Self::Word>;

    /// `u_n v` for basis words.
    fn nth_product(&self, u: &Self::Word, n: i64, v: &Self::Word) -> Element<Self::Word>;

    fn conformal_vector(&self) -> Element<Self::Word>;

    fn central_charge(&self) -> Scalar;

    /// `L(n) w`, the mode `omega_{n+1}` of the conformal vector.
    fn virasoro(&self, n: i64, w: &Self::Word) -> Element<Self::Word> {
        let omega = self.conformal_vector();
        let mut out = SparseVec::new();
        for (o, c) in omega.iter() {
            out.axpy(c, &self.nth_product(o, n + 1, w));
        }
        out
    }

    /// Largest weight for which the algebra is fully specified, if finite.
    fn weight_cap(&self) -> Option<u32> {
        None
    }
}

/// A vertex algebra together with a choice of `g` or `g^{-1}`.
///
/// Twisted products only need `T` and the residue of each word, so passing
/// to the inverse automorphism just negates residues.
pub struct VoaContext<A: VertexAlgebra> {
    algebra: Arc<A>,
    inverse: bool,
}

impl<A: VertexAlgebra> Clone for VoaContext<A> {
    fn clone(&self) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            inverse: self.inverse,
        }
    }
}

impl<A: VertexAlgebra> VoaContext<A> {
    pub fn new(algebra: A) -> Self {
        Self::from_arc(Arc::new(algebra))
    }

    pub fn from_arc(algebra: Arc<A>) -> Self {
        Self {
            algebra,
            inverse: false,
        }
    }

    pub fn algebra(&self) -> &A {
        &self.algebra
    }

    pub fn arc(&self) -> &Arc<A> {
        &self.algebra
    }

    pub fn order(&self) -> u32 {
        self.algebra.order()
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    /// Whether this context twists by `g^{-1}` as a different automorphism;
    /// false whenever `g = g^{-1}`.
    pub fn effective_inverse(&self) -> bool {
        self.inverse && self.order() > 2
    }

    pub fn inverse(&self) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            inverse: !self.inverse,
        }
    }

    pub fn residue(&self, w: &A::Word) -> u32 {
        let t = self.order();
        let r = self.algebra.residue(w) % t;
        if self.inverse {
            (t - r) % t
        } else {
            r
        }
    }

    pub fn weight(&self, w: &A::Word) -> u32 {
        self.algebra.weight(w)
    }
}

/// `u_n v`, extended bilinearly.
pub fn nth_product<A: VertexAlgebra>(
    alg: &A,
    u: &Element<A::Word>,
    n: i64,
    v: &Element<A::Word>,
) -> Element<A::Word> {
    let mut out = SparseVec::new();
    for (a, ca) in u.iter() {
        for (b, cb) in v.iter() {
            out.axpy(&(ca * cb), &alg.nth_product(a, n, b));
        }
    }
    out
}

pub fn virasoro_mode<A: VertexAlgebra>(alg: &A, n: i64, v: &Element<A::Word>) -> Element<A::Word> {
    let mut out = SparseVec::new();
    for (w, c) in v.iter() {
        out.axpy(c, &alg.virasoro(n, w));
    }
    out
}

/// `phi(u) = e^{L(1)} (-1)^{L(0)} u`. The exponential series is finite since
/// `L(1)` lowers weight.
pub fn phi_map<A: VertexAlgebra>(alg: &A, u: &Element<A::Word>) -> Element<A::Word> {
    let signed: Element<A::Word> = u
        .iter()
        .map(|(w, c)| (w.clone(), sign(alg.weight(w) as i64) * c))
        .collect();
    let mut out = signed.clone();
    let mut term = signed;
    let mut j = 1u32;
    loop {
        term = virasoro_mode(alg, 1, &term);
        if term.is_zero() {
            break;
        }
        out.axpy(&(Scalar::one() / factorial(j)), &term);
        j += 1;
    }
    out
}

/// Projection onto the eigenspace `V^r`.
pub fn eigen_project<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    r: u32,
    v: &Element<A::Word>,
) -> Element<A::Word> {
    v.filtered(|w| ctx.residue(w) == r % ctx.order())
}

/// All basis words of weight at most `max_weight`, in ascending key order.
pub fn basis_upto<A: VertexAlgebra>(alg: &A, max_weight: u32) -> Vec<A::Word> {
    let cap = alg.weight_cap().map_or(max_weight, |c| c.min(max_weight));
    (0..=cap).flat_map(|k| alg.basis(k)).collect()
}

pub fn vacuum<A: VertexAlgebra>(alg: &A) -> Element<A::Word> {
    SparseVec::unit(alg.vacuum())
}

/// Largest weight occurring in `v`.
pub fn top_weight<A: VertexAlgebra>(alg: &A, v: &Element<A::Word>) -> Option<u32> {
    v.keys().map(|w| alg.weight(w)).max()
}

/// `L(-1)^s / s!` applied to `u`; equals `u_{-s-1} 1`.
pub fn translate<A: VertexAlgebra>(alg: &A, s: u32, u: &Element<A::Word>) -> Element<A::Word> {
    let mut out = u.clone();
    for _ in 0..s {
        out = virasoro_mode(alg, -1, &out);
    }
    out.scaled(&(Scalar::one() / factorial(s)))
}

/// Scalar weight of a word, for exponent arithmetic.
pub fn weight_scalar<A: VertexAlgebra>(alg: &A, w: &A::Word) -> Scalar {
    int(alg.weight(w) as i64)
}

/// Whether every word of `v` has weight `k`.
pub fn is_homogeneous<A: VertexAlgebra>(alg: &A, v: &Element<A::Word>) -> bool {
    let mut weights = v.keys().map(|w| alg.weight(w));
    match weights.next() {
        None => true,
        Some(k) => weights.all(|x| x == k),
    }
}
