use std::collections::btree_map::{self, BTreeMap, Entry};
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Sparse vector over the rationals, keyed by an ordered basis token.
///
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec<K: Ord> {
    entries: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for SparseVec<K> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseVec<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(key: K) -> Self {
        Self::term(key, Scalar::one())
    }

    pub fn term(key: K, coeff: Scalar) -> Self {
        let mut v = Self::new();
        v.add_term(key, coeff);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&Scalar> {
        self.entries.get(key)
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.entries.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.entries.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Scalar> {
        self.entries.keys()
    }

    /// Greatest key with a nonzero coefficient; the pivot position in echelon forms.
    pub fn leading(&self) -> Option<(&K, &Scalar)> {
        self.entries.iter().next_back()
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Scalar, other: &Self) {
        if c.is_zero() {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(k.clone(), c * v);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    pub fn scale_mut(&mut self, c: &Scalar) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for v in self.entries.values_mut() {
            *v *= c;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(&-Scalar::one(), other);
        out
    }

    pub fn remove(&mut self, key: &K) -> Option<Scalar> {
        self.entries.remove(key)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Relabels keys; colliding images are summed.
    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> SparseVec<J> {
        let mut out = SparseVec::new();
        for (k, v) in self.iter() {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for SparseVec<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut v = Self::new();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl<K: Ord> IntoIterator for SparseVec<K> {
    type Item = (K, Scalar);
    type IntoIter = btree_map::IntoIter<K, Scalar>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<'a, K: Ord> IntoIterator for &'a SparseVec<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

impl<K: Ord + fmt::Display> fmt::Display for SparseVec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if v.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "({v})·{k}")?;
            }
        }
        Ok(())
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for SparseVec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| (k, v.to_string())))
            .finish()
    }
}
