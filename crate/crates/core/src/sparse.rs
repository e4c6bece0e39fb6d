use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;
use std::fmt;

use crate::liealg::write_signed_sum;
use crate::scalars::Coefficient;

/// Sparse exact linear combination of ordered keys. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord, F> {
    terms: BTreeMap<K, F>,
}

impl<K: Ord, F> Default for LinComb<K, F> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, F: Coefficient> LinComb<K, F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: F) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    pub fn basis(k: K) -> Self {
        Self::single(k, F::one())
    }

    pub fn add_term(&mut self, k: K, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: &F) {
        if k.is_zero() {
            return;
        }
        for (key, c) in &other.terms {
            self.add_term(key.clone(), k.clone() * c.clone());
        }
    }

    pub fn add(&mut self, other: &Self) {
        self.add_scaled(other, &F::one());
    }

    pub fn scale(&self, k: &F) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-F::one());
        out
    }

    pub fn coeff(&self, k: &K) -> F {
        self.terms.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, F> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, F> {
        self.terms.keys()
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2, F> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Splits by an arbitrary key function; keys of the result are the
    /// classes present in the support.
    pub fn partition_by<G: Ord>(&self, mut f: impl FnMut(&K) -> G) -> BTreeMap<G, Self> {
        let mut out: BTreeMap<G, Self> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(f(k)).or_default().add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<K: Ord + Clone, F: Coefficient> FromIterator<(K, F)> for LinComb<K, F> {
    fn from_iter<T: IntoIterator<Item = (K, F)>>(iter: T) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<K: Ord, F> IntoIterator for LinComb<K, F> {
    type Item = (K, F);
    type IntoIter = btree_map::IntoIter<K, F>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, K: Ord, F> IntoIterator for &'a LinComb<K, F> {
    type Item = (&'a K, &'a F);
    type IntoIter = btree_map::Iter<'a, K, F>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone + fmt::Display, F: Coefficient> fmt::Display for LinComb<K, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_sum(f, self.terms.iter().map(|(k, c)| (k.to_string(), c.clone())))
    }
}
