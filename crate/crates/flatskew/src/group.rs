//! Finitely generated Abelian value groups `G = ℤᵈ × Π ℤ/nⱼ`.
//!
//! These are the fiber groups of the skew products. The metric is the
//! max norm on the free part combined with the discrete metric on the
//! torsion part; it is translation-invariant, and Haar measure is
//! counting measure. For such groups a subgroup is dense iff it is the
//! whole group, which reduces the density test to a Smith-normal-form
//! computation over ℤ.

use crate::error::CutError;
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Shape of the group: free rank `d` and torsion moduli `nⱼ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl GroupSpec {
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> GroupSpec {
        assert!(torsion.iter().all(|&n| n >= 2), "torsion moduli must be >= 2");
        GroupSpec { free_rank, torsion }
    }

    /// The integers ℤ.
    pub fn integers() -> GroupSpec {
        GroupSpec::new(1, vec![])
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { free: vec![0; self.free_rank], torsion: vec![0; self.torsion.len()] }
    }

    pub fn check(&self, g: &GroupElement) -> Result<(), CutError> {
        if g.free.len() != self.free_rank || g.torsion.len() != self.torsion.len() {
            return Err(CutError::ValueShape);
        }
        if g.torsion.iter().zip(&self.torsion).any(|(&r, &n)| r >= n) {
            return Err(CutError::ValueShape);
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a.torsion.iter().zip(&self.torsion).map(|(&r, &n)| (n - r) % n).collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &GroupElement, m: i64) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| x * m).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion)
                .map(|(&r, &n)| ((r as i128 * m as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        }
    }
}

/// An element of `ℤᵈ × Π ℤ/nⱼ` with reduced torsion residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub free: Vec<i64>,
    pub torsion: Vec<u64>,
}

impl GroupElement {
    pub fn free_1d(n: i64) -> GroupElement {
        GroupElement { free: vec![n], torsion: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.torsion.iter().all(|&r| r == 0)
    }

    /// Translation-invariant norm: max |free coordinate|, maxed with 1
    /// when any torsion coordinate is nonzero.
    pub fn norm(&self) -> u64 {
        let free_max = self.free.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let tor = if self.torsion.iter().any(|&r| r != 0) { 1 } else { 0 };
        free_max.max(tor)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let frees: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        let tors: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        match (frees.is_empty(), tors.is_empty()) {
            (false, true) => write!(f, "({})", frees.join(",")),
            (true, false) => write!(f, "[{}]", tors.join(",")),
            _ => write!(f, "({})[{}]", frees.join(","), tors.join(",")),
        }
    }
}

/// Do the given values generate the whole group?
///
/// For `G = ℤᵈ × Π ℤ/nⱼ` ≅ `ℤ^{d+r}/⟨nⱼ e_{d+j}⟩`, the values generate
/// iff the integer matrix whose rows are the value lifts together with
/// the torsion relations has Smith normal form with all invariant
/// factors equal to 1.
pub fn generates_dense(values: &[GroupElement], spec: &GroupSpec) -> bool {
    let d = spec.free_rank;
    let r = spec.torsion.len();
    let cols = d + r;
    if cols == 0 {
        return true; // the trivial group
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for g in values {
        if g.free.len() != d || g.torsion.len() != r {
            return false;
        }
        let mut row: Vec<BigInt> = g.free.iter().map(|&x| BigInt::from(x)).collect();
        row.extend(g.torsion.iter().map(|&x| BigInt::from(x)));
        rows.push(row);
    }
    for (j, &n) in spec.torsion.iter().enumerate() {
        let mut row = vec![BigInt::zero(); cols];
        row[d + j] = BigInt::from(n);
        rows.push(row);
    }
    let divisors = smith_invariant_factors(rows, cols);
    divisors.len() == cols && divisors.iter().all(|f| f.is_one())
}

/// Nonzero invariant factors of an integer matrix, in divisibility
/// order. Plain gcd-pivot reduction; the matrices here are tiny.
pub fn smith_invariant_factors(mut m: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
    let mut factors = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    let rows = m.len();
    while top < rows && left < cols {
        // find a nonzero pivot
        let Some((pi, pj)) = (top..rows)
            .flat_map(|i| (left..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !m[i][j].is_zero())
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(left, pj);
        }
        // eliminate the pivot row and column; repeat until clean since
        // remainders can reintroduce entries
        loop {
            let mut dirty = false;
            for i in top + 1..rows {
                if m[i][left].is_zero() {
                    continue;
                }
                let f = &m[i][left] / &m[top][left];
                for j in left..cols {
                    let sub = &f * &m[top][j];
                    m[i][j] = &m[i][j] - sub;
                }
                if !m[i][left].is_zero() {
                    // remainder smaller than pivot: swap up and retry
                    m.swap(top, i);
                    dirty = true;
                }
            }
            for j in left + 1..cols {
                if m[top][j].is_zero() {
                    continue;
                }
                let f = &m[top][j] / &m[top][left];
                for i in top..rows {
                    let sub = &f * &m[i][left];
                    m[i][j] = &m[i][j] - sub;
                }
                if !m[top][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(left, j);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        factors.push(m[top][left].abs());
        top += 1;
        left += 1;
    }
    // enforce the divisibility chain
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if factors[j].is_zero() {
                continue;
            }
            let g = factors[i].gcd(&factors[j]);
            let l = &factors[i] * &factors[j] / &g;
            factors[i] = g;
            factors[j] = l;
        }
    }
    factors.retain(|f| !f.is_zero());
    factors
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn z() -> GroupSpec {
        GroupSpec::integers()
    }

    fn ge(free: Vec<i64>, torsion: Vec<u64>) -> GroupElement {
        GroupElement { free, torsion }
    }

    #[test]
    fn arithmetic_basics() {
        let spec = GroupSpec::new(1, vec![5]);
        let a = ge(vec![2], vec![3]);
        let b = ge(vec![-1], vec![4]);
        assert_eq!(spec.add(&a, &b), ge(vec![1], vec![2]));
        assert_eq!(spec.neg(&a), ge(vec![-2], vec![2]));
        assert!(spec.add(&a, &spec.neg(&a)).is_zero());
        assert_eq!(spec.scale(&a, 3), ge(vec![6], vec![4]));
        assert_eq!(a.norm(), 2);
        assert_eq!(ge(vec![0], vec![1]).norm(), 1);
        assert_eq!(spec.zero().norm(), 0);
    }

    #[test]
    fn dense_generation_z() {
        assert!(generates_dense(&[GroupElement::free_1d(1), GroupElement::free_1d(-1)], &z()));
        assert!(!generates_dense(&[GroupElement::free_1d(2), GroupElement::free_1d(4)], &z()));
        assert!(generates_dense(&[GroupElement::free_1d(2), GroupElement::free_1d(3)], &z()));
    }

    #[test]
    fn dense_generation_z2_determinant_oracle() {
        let spec = GroupSpec::new(2, vec![]);
        // determinant 2 -> index-2 subgroup
        let vals = [ge(vec![1, 0], vec![]), ge(vec![1, 2], vec![])];
        let det: i64 = 1 * 2 - 0 * 1;
        assert_eq!(det.abs(), 2);
        assert!(!generates_dense(&vals, &spec));
        let vals = [ge(vec![1, 0], vec![]), ge(vec![1, 1], vec![])];
        assert!(generates_dense(&vals, &spec));
        // rank-deficient
        let vals = [ge(vec![1, 1], vec![]), ge(vec![2, 2], vec![])];
        assert!(!generates_dense(&vals, &spec));
    }

    /// BFS closure oracle for finite groups.
    fn generates_finite_oracle(values: &[GroupElement], spec: &GroupSpec) -> bool {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut frontier = vec![spec.zero()];
        seen.insert(spec.zero());
        while let Some(g) = frontier.pop() {
            for v in values {
                for cand in [spec.add(&g, v), spec.sub(&g, v)] {
                    if seen.insert(cand.clone()) {
                        frontier.push(cand);
                    }
                }
            }
        }
        let order: u64 = spec.torsion.iter().product();
        seen.len() as u64 == order
    }

    #[test]
    fn dense_generation_torsion_matches_bfs_oracle() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let nt = rng.gen_range(1..=2usize);
            let torsion: Vec<u64> = (0..nt).map(|_| rng.gen_range(2..=6u64)).collect();
            let spec = GroupSpec::new(0, torsion.clone());
            let nv = rng.gen_range(1..=3usize);
            let values: Vec<GroupElement> = (0..nv)
                .map(|_| ge(vec![], torsion.iter().map(|&n| rng.gen_range(0..n)).collect()))
                .collect();
            assert_eq!(
                generates_dense(&values, &spec),
                generates_finite_oracle(&values, &spec),
                "spec={spec:?} values={values:?}"
            );
        }
    }

    #[test]
    fn dense_generation_mixed() {
        // Z x Z/2: (1,1) alone only reaches (n, n mod 2), index 2
        let spec = GroupSpec::new(1, vec![2]);
        assert!(!generates_dense(&[ge(vec![1], vec![1])], &spec));
        assert!(generates_dense(&[ge(vec![1], vec![1]), ge(vec![1], vec![0])], &spec));
        assert!(generates_dense(&[ge(vec![1], vec![0]), ge(vec![0], vec![1])], &spec));
        assert!(!generates_dense(&[ge(vec![2], vec![1]), ge(vec![2], vec![0])], &spec));
    }

    #[test]
    fn smith_factors_examples() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(4)],
            vec![BigInt::from(-6), BigInt::from(6), BigInt::from(12)],
            vec![BigInt::from(10), BigInt::from(4), BigInt::from(16)],
        ];
        let f = smith_invariant_factors(m, 3);
        assert_eq!(f, vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]);
    }
}
