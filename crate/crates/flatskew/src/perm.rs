//! Permutations of `{0..n-1}` in one-line notation.

use serde::{Deserialize, Serialize};

/// A permutation stored together with its inverse, so both directions
/// apply in O(1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perm {
    map: Vec<usize>,
    inv: Vec<usize>,
}

impl Perm {
    /// Build from one-line notation (`map[i]` is the image of `i`).
    /// Returns `None` when the vector is not a bijection.
    pub fn new(map: Vec<usize>) -> Option<Perm> {
        let n = map.len();
        let mut inv = vec![usize::MAX; n];
        for (i, &j) in map.iter().enumerate() {
            if j >= n || inv[j] != usize::MAX {
                return None;
            }
            inv[j] = i;
        }
        Some(Perm { map, inv })
    }

    pub fn identity(n: usize) -> Perm {
        Perm::new((0..n).collect()).unwrap()
    }

    /// Build from disjoint cycles on `{0..n-1}`; entries absent from every
    /// cycle are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Perm> {
        let mut map: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for w in 0..cyc.len() {
                if cyc[w] >= n {
                    return None;
                }
                map[cyc[w]] = cyc[(w + 1) % cyc.len()];
            }
        }
        Perm::new(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply_inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    /// `apply` iterated `e` times, with negative `e` meaning the inverse.
    pub fn apply_pow(&self, i: usize, e: i64) -> usize {
        let m = e.rem_euclid(orbit_len(self, i) as i64);
        let mut r = i;
        for _ in 0..m {
            r = self.apply(r);
        }
        r
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Cycle decomposition, each cycle starting at its least element,
    /// cycles sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut j = self.apply(s);
            while j != s {
                seen[j] = true;
                cyc.push(j);
                j = self.apply(j);
            }
            out.push(cyc);
        }
        out
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm::new((0..self.len()).map(|i| self.apply(other.apply(i))).collect()).unwrap()
    }

    pub fn inverse(&self) -> Perm {
        Perm { map: self.inv.clone(), inv: self.map.clone() }
    }
}

fn orbit_len(p: &Perm, i: usize) -> usize {
    let mut len = 1;
    let mut j = p.apply(i);
    while j != i {
        j = p.apply(j);
        len += 1;
    }
    len
}

/// True when the group generated by the given permutations acts
/// transitively on `{0..n-1}`.
pub fn transitive(perms: &[&Perm], n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for p in perms {
            for j in [p.apply(i), p.apply_inv(i)] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
    }
    count == n
}
