use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A multi-index `γ ∈ N_0^n`.
///
/// Ordered graded-lexicographically: by total degree first, then by the
/// leading components, larger exponents of earlier variables first. For two
/// variables and degree one that gives `(1,0)` before `(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zero(dims: usize) -> Self {
        Self(vec![0; dims])
    }

    /// The unit index along `axis`.
    pub fn unit(dims: usize, axis: usize) -> Self {
        let mut v = vec![0; dims];
        v[axis] = 1;
        Self(v)
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|γ|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `γ! = Π γ_i!` as a double.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&g| factorial(g as usize)).product()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&g| g == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// All indices of exactly degree `d` in `dims` variables, in graded order.
pub fn indices_of_degree(dims: usize, d: u32) -> Vec<MultiIndex> {
    fn fill(rest: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if rest == 1 {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first);
            fill(rest - 1, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dims > 0 {
        fill(dims, d, &mut Vec::with_capacity(dims), &mut out);
    }
    out
}

/// All `γ` with `|γ| < order`, graded-lexicographically ordered.
///
/// The count is `C(order - 1 + dims, dims)`.
pub fn multi_indices(dims: usize, order: u32) -> Vec<MultiIndex> {
    (0..order).flat_map(|d| indices_of_degree(dims, d)).collect()
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(multi_indices(2, 2), vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
        assert_eq!(multi_indices(1, 4), vec![mi(&[0]), mi(&[1]), mi(&[2]), mi(&[3])]);
        assert_eq!(multi_indices(2, 3).len(), 6);
    }

    /// Brute force over the cube [0, order)^dims.
    fn brute_force(dims: usize, order: u32) -> Vec<MultiIndex> {
        let mut all = Vec::new();
        let total = (order as usize).pow(dims as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(dims);
            for _ in 0..dims {
                v.push((code % order as usize) as u32);
                code /= order as usize;
            }
            let g = MultiIndex(v);
            if g.degree() < order {
                all.push(g);
            }
        }
        all.sort();
        all
    }

    #[test]
    fn enumeration_matches_brute_force_and_counts() {
        for dims in 1..=4 {
            for order in 1..=7u32 {
                let got = multi_indices(dims, order);
                assert_eq!(got, brute_force(dims, order));
                assert_eq!(got.len() as u64, binomial(order as u64 - 1 + dims as u64, dims as u64));
                for d in 0..order {
                    let exact = indices_of_degree(dims, d).len() as u64;
                    assert_eq!(exact, binomial(d as u64 + dims as u64 - 1, d as u64));
                }
                assert!(got.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn factorial_and_degree() {
        let g = mi(&[3, 0, 2]);
        assert_eq!(g.degree(), 5);
        assert_eq!(g.factorial(), 12.0);
        assert_eq!(g.to_string(), "(3,0,2)");
        assert!(mi(&[1, 0]).le(&mi(&[1, 2])));
        assert!(!mi(&[2, 0]).le(&mi(&[1, 2])));
    }
}
