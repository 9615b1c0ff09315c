use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::SparseVec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reduced row-echelon basis of a subspace.
///
/// The pivot of a row is its greatest key; every row has pivot coefficient 1
/// and no row mentions another row's pivot. This form is unique for a given
/// subspace and key order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanBasis<K: Ord> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord> Default for SpanBasis<K> {
    fn default() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }
}

/// Coefficients expressing a vector in the rows of a [`SpanBasis`], one per
/// row identified by its pivot key. Rows with zero coefficient are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate<K: Ord> {
    pub terms: Vec<(K, Scalar)>,
}

impl<K: Ord + Clone> SpanBasis<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in ascending pivot order.
    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.values()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn is_pivot(&self, key: &K) -> bool {
        self.rows.contains_key(key)
    }

    pub fn row(&self, pivot: &K) -> Option<&SparseVec<K>> {
        self.rows.get(pivot)
    }

    /// Remainder of `x` after eliminating every pivot key. Two vectors have
    /// equal remainders exactly when they differ by an element of the span.
    pub fn reduce(&self, x: &SparseVec<K>) -> SparseVec<K> {
        let mut out = x.clone();
        for (k, c) in x.iter() {
            if let Some(row) = self.rows.get(k) {
                out.axpy(&-c.clone(), row);
            }
        }
        out
    }

    /// Adds `x` to the span, keeping the reduced form. Returns whether the
    /// rank grew.
    pub fn insert(&mut self, x: &SparseVec<K>) -> bool {
        let mut r = self.reduce(x);
        let (pivot, lead) = match r.leading() {
            Some((k, c)) => (k.clone(), c.clone()),
            None => return false,
        };
        if !lead.is_one() {
            r.scale_mut(&(Scalar::one() / lead));
        }
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                row.axpy(&-c, &r);
            }
        }
        self.rows.insert(pivot, r);
        true
    }

    pub fn extend<'a, I>(&mut self, xs: I)
    where
        I: IntoIterator<Item = &'a SparseVec<K>>,
        K: 'a,
    {
        for x in xs {
            self.insert(x);
        }
    }

    pub fn contains(&self, x: &SparseVec<K>) -> bool {
        self.reduce(x).is_zero()
    }

    pub fn membership_certificate(&self, x: &SparseVec<K>) -> Option<Certificate<K>> {
        let terms: Vec<(K, Scalar)> = x
            .iter()
            .filter(|(k, _)| self.rows.contains_key(*k))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        let cert = Certificate { terms };
        (self.recombine(&cert) == *x).then_some(cert)
    }

    pub fn recombine(&self, cert: &Certificate<K>) -> SparseVec<K> {
        let mut out = SparseVec::new();
        for (pivot, c) in &cert.terms {
            if let Some(row) = self.rows.get(pivot) {
                out.axpy(c, row);
            }
        }
        out
    }

    /// Basis of the intersection of the rows with the coordinate subspace
    /// spanned by keys accepted by `keep`. Because pivots are greatest keys,
    /// this is exact whenever `keep` is downward closed in the key order.
    pub fn rows_within(&self, mut keep: impl FnMut(&K) -> bool) -> SpanBasis<K> {
        SpanBasis {
            rows: self
                .rows
                .iter()
                .filter(|(p, _)| keep(p))
                .map(|(p, r)| (p.clone(), r.clone()))
                .collect(),
        }
    }
}

pub fn reduce_span<'a, K, I>(generators: I) -> SpanBasis<K>
where
    K: Ord + Clone + 'a,
    I: IntoIterator<Item = &'a SparseVec<K>>,
{
    let mut s = SpanBasis::new();
    s.extend(generators);
    s
}

pub fn membership_certificate<K: Ord + Clone>(
    x: &SparseVec<K>,
    s: &SpanBasis<K>,
) -> Option<Certificate<K>> {
    s.membership_certificate(x)
}

/// Fixed complement basis of `sub` inside `ambient`, used to coordinatize
/// the quotient `span(ambient) / span(sub)`.
#[derive(Clone, Debug)]
pub struct ComplementBasis<K: Ord> {
    sub: SpanBasis<K>,
    complement: SpanBasis<K>,
    order: Vec<K>,
}

impl<K: Ord + Clone> ComplementBasis<K> {
    pub fn new(ambient: &SpanBasis<K>, sub: &SpanBasis<K>) -> Self {
        let mut complement = SpanBasis::new();
        for row in ambient.rows() {
            complement.insert(&sub.reduce(row));
        }
        let order = complement.pivots().cloned().collect();
        Self {
            sub: sub.clone(),
            complement,
            order,
        }
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Pivot keys of the complement rows, in coordinate order.
    pub fn keys(&self) -> &[K] {
        &self.order
    }

    pub fn coordinates(&self, x: &SparseVec<K>) -> Result<Vec<Scalar>> {
        let r = self.sub.reduce(x);
        let cert = self
            .complement
            .membership_certificate(&r)
            .ok_or(Error::NotInAmbient)?;
        let mut coords = vec![Scalar::zero(); self.order.len()];
        for (pivot, c) in cert.terms {
            let idx = self
                .order
                .binary_search(&pivot)
                .expect("certificate pivots are complement pivots");
            coords[idx] = c;
        }
        Ok(coords)
    }
}

pub fn quotient_coordinates<K: Ord + Clone>(
    x: &SparseVec<K>,
    ambient: &SpanBasis<K>,
    sub: &SpanBasis<K>,
) -> Result<Vec<Scalar>> {
    ComplementBasis::new(ambient, sub).coordinates(x)
}

/// Key of the doubled space used when intersecting spans. Every `Left` key
/// sorts above every `Right` key, so echelon rows with a `Right` pivot have
/// an empty left half.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Stacked<K> {
    Right(K),
    Left(K),
}

/// Basis of `span(a) ∩ span(b)`.
///
/// Row-reduces the stacked system `[a | a ; b | 0]`; the rows whose left half
/// vanishes are exactly the kernel combinations, and their right halves span
/// the intersection.
pub fn intersect_spans<K: Ord + Clone>(a: &SpanBasis<K>, b: &SpanBasis<K>) -> SpanBasis<K> {
    let mut stacked: SpanBasis<Stacked<K>> = SpanBasis::new();
    for row in a.rows() {
        let mut v = row.map_keys(|k| Stacked::Left(k.clone()));
        for (k, c) in row.iter() {
            v.add_term(Stacked::Right(k.clone()), c.clone());
        }
        stacked.insert(&v);
    }
    for row in b.rows() {
        stacked.insert(&row.map_keys(|k| Stacked::Left(k.clone())));
    }
    let mut out = SpanBasis::new();
    for (pivot, row) in stacked.rows.iter() {
        if let Stacked::Right(_) = pivot {
            out.insert(&row.map_keys(|k| match k {
                Stacked::Right(k) | Stacked::Left(k) => k.clone(),
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn v(terms: &[(u32, i64)]) -> SparseVec<u32> {
        terms.iter().map(|&(k, c)| (k, int(c))).collect()
    }

    #[test]
    fn reduce_span_examples() {
        let empty: Vec<SparseVec<u32>> = vec![];
        assert_eq!(reduce_span(&empty).rank(), 0);

        let s = reduce_span(&[v(&[(1, 1)]), v(&[(1, 2)])]);
        assert_eq!(s.rank(), 1);
        assert_eq!(s.rows().next().unwrap(), &v(&[(1, 1)]));

        let s = reduce_span(&[v(&[(1, 1), (2, 1)]), v(&[(2, 1)])]);
        assert_eq!(s.rank(), 2);
        let rows: Vec<_> = s.rows().cloned().collect();
        assert_eq!(rows, vec![v(&[(1, 1)]), v(&[(2, 1)])]);
    }

    #[test]
    fn certificate_examples() {
        let s = reduce_span(&[v(&[(1, 1)])]);
        let zero = SparseVec::new();
        assert_eq!(s.membership_certificate(&zero).unwrap().terms, vec![]);
        assert_eq!(
            s.membership_certificate(&v(&[(1, 1)])).unwrap().terms,
            vec![(1, int(1))]
        );
        let s2 = reduce_span(&[v(&[(2, 1)])]);
        assert!(s2.membership_certificate(&v(&[(1, 1)])).is_none());
    }

    #[test]
    fn quotient_coordinate_examples() {
        let ambient = reduce_span(&[v(&[(1, 1)]), v(&[(2, 1)])]);
        let sub = reduce_span(&[v(&[(1, 1), (2, 1)])]);
        let coords = quotient_coordinates(&v(&[(1, 1)]), &ambient, &sub).unwrap();
        assert_eq!(coords, vec![int(1)]);
        let coords = quotient_coordinates(&v(&[(2, 1)]), &ambient, &sub).unwrap();
        assert_eq!(coords, vec![int(-1)]);
        let coords = quotient_coordinates(&v(&[(1, 3), (2, 3)]), &ambient, &sub).unwrap();
        assert_eq!(coords, vec![int(0)]);

        let none = SpanBasis::new();
        let coords = quotient_coordinates(&v(&[(1, 2), (2, 5)]), &ambient, &none).unwrap();
        assert_eq!(coords, vec![int(2), int(5)]);

        let small = reduce_span(&[v(&[(1, 1)])]);
        assert_eq!(
            quotient_coordinates(&v(&[(2, 1)]), &small, &none),
            Err(Error::NotInAmbient)
        );
    }

    #[test]
    fn intersect_examples() {
        let a = reduce_span(&[v(&[(1, 1)]), v(&[(2, 1)])]);
        assert_eq!(intersect_spans(&a, &a), a);

        let b = reduce_span(&[v(&[(3, 1)])]);
        assert_eq!(intersect_spans(&a, &b).rank(), 0);

        let c = reduce_span(&[v(&[(1, 1), (2, 1)])]);
        assert_eq!(intersect_spans(&a, &c), c);
    }

    #[test]
    fn insert_is_idempotent() {
        let s = reduce_span(&[v(&[(1, 2), (3, 1)]), v(&[(2, 1), (3, 4)]), v(&[(1, 1)])]);
        let again = reduce_span(s.rows());
        assert_eq!(s, again);
    }
}
