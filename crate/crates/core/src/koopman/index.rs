//! Multi-indices `nu = (n0, n1, ..., n_alpha)` labelling Koopman terms.
//!
//! `n0` (the head) carries the sine factor of the mode and `n1..n_alpha` (the
//! tail) the cosine factors. Eigenvalue, mode and eigenfunctional are all
//! symmetric in the tail, so a [`MultiIndex`] stores its tail sorted; the
//! number of ordered tails collapsing onto it is its [`MultiIndex::multiplicity`].

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered tuple `(n0, ..., n_alpha)` as produced by [`enumerate`].
pub type RawIndex = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex {
    head: u32,
    tail: Vec<u32>,
}

impl MultiIndex {
    pub fn new(head: u32, mut tail: Vec<u32>) -> Result<Self> {
        if head == 0 {
            return Err(Error::InvalidIndex("head wavenumber must be >= 1".into()));
        }
        if tail.contains(&0) {
            return Err(Error::InvalidIndex("tail wavenumbers must be >= 1".into()));
        }
        tail.sort_unstable();
        Ok(Self { head, tail })
    }

    /// Canonical form of an ordered tuple; the first entry is the head.
    pub fn from_entries(entries: &[u32]) -> Result<Self> {
        match entries.split_first() {
            Some((&head, tail)) => Self::new(head, tail.to_vec()),
            None => Err(Error::InvalidIndex("empty index".into())),
        }
    }

    pub fn head(&self) -> u32 {
        self.head
    }

    pub fn tail(&self) -> &[u32] {
        &self.tail
    }

    /// Tail length `alpha(nu)`.
    pub fn alpha(&self) -> usize {
        self.tail.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.head).chain(self.tail.iter().copied())
    }

    pub fn max_entry(&self) -> u32 {
        self.entries().max().unwrap_or(self.head)
    }

    /// `sum_k n_k^2`, so that `lambda = -pi^2 * squared_sum`.
    pub fn squared_sum(&self) -> u64 {
        self.entries().map(|n| u64::from(n) * u64::from(n)).sum()
    }

    /// `lambda_nu = -pi^2 sum_k n_k^2`. Equal integer sums give bitwise-equal
    /// eigenvalues.
    pub fn eigenvalue(&self) -> f64 {
        -PI * PI * self.squared_sum() as f64
    }

    /// Number of distinct orderings of the tail: `alpha! / prod(count_j!)`.
    pub fn multiplicity(&self) -> u64 {
        let mut result: u64 = 1;
        let mut placed: u64 = 0;
        let mut run: u64 = 0;
        for (i, &n) in self.tail.iter().enumerate() {
            run = if i > 0 && self.tail[i - 1] == n { run + 1 } else { 1 };
            placed += 1;
            // multiply by C(placed, run) incrementally: result *= placed / run
            result = result * placed / run;
        }
        result
    }

    /// Concatenation `c(nu, nu')`: keeps `self.head` as head, every other entry
    /// of both indices goes to the tail.
    pub fn concatenate(&self, other: &Self) -> Self {
        let mut tail = self.tail.clone();
        tail.extend(other.entries());
        tail.sort_unstable();
        Self {
            head: self.head,
            tail,
        }
    }
}

pub fn concatenate(nu: &MultiIndex, nu2: &MultiIndex) -> MultiIndex {
    nu.concatenate(nu2)
}

pub fn eigenvalue(nu: &MultiIndex) -> f64 {
    nu.eigenvalue()
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alpha()
            .cmp(&other.alpha())
            .then(self.head.cmp(&other.head))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = Error;

    fn try_from(entries: Vec<u32>) -> Result<Self> {
        Self::from_entries(&entries)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(nu: MultiIndex) -> Self {
        nu.entries().collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.head)?;
        for n in &self.tail {
            write!(f, ",{n}")?;
        }
        write!(f, ")")
    }
}

/// `sum_{alpha=0}^{L} W^{alpha+1}`, the number of ordered tuples.
pub fn raw_count(max_tail_length: usize, max_wavenumber: u32) -> u64 {
    let w = u64::from(max_wavenumber);
    (0..=max_tail_length).map(|a| w.pow(a as u32 + 1)).sum()
}

/// Every ordered tuple with tail length `0..=max_tail_length` and entries in
/// `1..=max_wavenumber`, shortest first, lexicographic within a length.
pub fn enumerate(max_tail_length: usize, max_wavenumber: u32) -> Vec<RawIndex> {
    assert!(max_wavenumber >= 1, "max_wavenumber must be >= 1");
    let mut out = Vec::new();
    let mut current = Vec::new();
    for len in 1..=max_tail_length + 1 {
        push_tuples(len, max_wavenumber, &mut current, &mut out);
    }
    out
}

fn push_tuples(len: usize, w: u32, current: &mut Vec<u32>, out: &mut Vec<RawIndex>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for n in 1..=w {
        current.push(n);
        push_tuples(len, w, current, out);
        current.pop();
    }
}

/// Canonical indices with their multiplicities, in canonical order. The
/// multiplicities sum to [`raw_count`].
pub fn canonical_indices(max_tail_length: usize, max_wavenumber: u32) -> Vec<(MultiIndex, u64)> {
    assert!(max_wavenumber >= 1, "max_wavenumber must be >= 1");
    let mut out = Vec::new();
    for alpha in 0..=max_tail_length {
        let mut tails = Vec::new();
        push_sorted_tails(alpha, 1, max_wavenumber, &mut Vec::new(), &mut tails);
        for head in 1..=max_wavenumber {
            for tail in &tails {
                let nu = MultiIndex {
                    head,
                    tail: tail.clone(),
                };
                let m = nu.multiplicity();
                out.push((nu, m));
            }
        }
    }
    out
}

fn push_sorted_tails(len: usize, from: u32, w: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for n in from..=w {
        current.push(n);
        push_sorted_tails(len, n, w, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn nu(entries: &[u32]) -> MultiIndex {
        MultiIndex::from_entries(entries).unwrap()
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate(5, 2).len(), 126);
        assert_eq!(raw_count(5, 2), 126);
        assert_eq!(enumerate(0, 2), vec![vec![1], vec![2]]);
        assert_eq!(enumerate(2, 2).len(), 14);
        for (l, w) in [(0, 1), (3, 3), (4, 2), (2, 5)] {
            assert_eq!(enumerate(l, w).len() as u64, raw_count(l, w));
        }
    }

    #[test]
    fn canonical_set_matches_deduplicated_enumeration() {
        for (l, w) in [(0, 2), (2, 3), (5, 2), (3, 4)] {
            let mut brute: BTreeMap<MultiIndex, u64> = BTreeMap::new();
            for raw in enumerate(l, w) {
                *brute.entry(MultiIndex::from_entries(&raw).unwrap()).or_default() += 1;
            }
            let canon: BTreeMap<_, _> = canonical_indices(l, w).into_iter().collect();
            assert_eq!(brute, canon, "L={l} W={w}");
            let listed: Vec<_> = canonical_indices(l, w).into_iter().map(|(n, _)| n).collect();
            let mut sorted = listed.clone();
            sorted.sort();
            assert_eq!(listed, sorted, "canonical order");
        }
        assert_eq!(canonical_indices(5, 2).len(), 42);
    }

    #[test]
    fn eigenvalue_examples() {
        let pi2 = PI * PI;
        assert_eq!(nu(&[1]).eigenvalue(), -pi2);
        assert_eq!(nu(&[1, 1]).eigenvalue(), -2.0 * pi2);
        assert_eq!(nu(&[1, 1, 1]).eigenvalue(), -3.0 * pi2);
        assert_eq!(nu(&[2]).eigenvalue(), -4.0 * pi2);
        assert_eq!(nu(&[2]).eigenvalue(), nu(&[1, 1, 1, 1]).eigenvalue());
        assert_ne!(nu(&[2]).eigenvalue(), nu(&[1, 1, 1]).eigenvalue());
    }

    #[test]
    fn canonical_form_sorts_tail_only() {
        assert_eq!(nu(&[2, 2, 1]), nu(&[2, 1, 2]));
        assert_ne!(nu(&[1, 2]), nu(&[2, 1]));
        assert_eq!(nu(&[3, 2, 1, 2]).tail(), &[1, 2, 2]);
        assert!(MultiIndex::new(0, vec![]).is_err());
        assert!(MultiIndex::new(1, vec![0]).is_err());
        assert!(MultiIndex::from_entries(&[]).is_err());
    }

    #[test]
    fn multiplicity_is_multinomial() {
        assert_eq!(nu(&[1]).multiplicity(), 1);
        assert_eq!(nu(&[1, 1, 2]).multiplicity(), 2);
        assert_eq!(nu(&[2, 1, 1, 2, 2]).multiplicity(), 6);
        assert_eq!(nu(&[1, 1, 1, 2, 2, 3]).multiplicity(), 30);
    }

    #[test]
    fn concatenate_examples() {
        let c = nu(&[1]).concatenate(&nu(&[2]));
        assert_eq!(c, nu(&[1, 2]));
        assert_eq!(c.squared_sum(), 5);
        assert_eq!(c.eigenvalue(), -PI * PI * 5.0);
        let c = nu(&[1, 1]).concatenate(&nu(&[2, 2]));
        assert_eq!(c, nu(&[1, 1, 2, 2]));
        assert_eq!(c.squared_sum(), 10);
        assert_eq!(c.eigenvalue(), -PI * PI * 10.0);
    }

    #[test]
    fn serde_uses_plain_arrays() {
        let n = nu(&[2, 2, 1]);
        assert_eq!(serde_json::to_string(&n).unwrap(), "[2,1,2]");
        let back: MultiIndex = serde_json::from_str("[2,2,1]").unwrap();
        assert_eq!(back, n);
        assert!(serde_json::from_str::<MultiIndex>("[0]").is_err());
        assert_eq!(n.to_string(), "(2,1,2)");
    }
}
