//! Stirling numbers of the first kind.
//!
//! The signed numbers `s(n, k)` are the coefficients of the falling factorial,
//! `x (x - 1) ... (x - n + 1) = sum_k s(n, k) x^k`. Exact values are kept as
//! big integers up to `n = 256`; deeper rows are only available through the
//! floating-point ratio rows `|s(j, k)| / j!`, which satisfy an all-positive
//! recurrence and stay well conditioned for `j` in the millions.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{validation, Result};

/// Largest depth accepted by [`StirlingTable::build`].
pub const MAX_EXACT_DEPTH: usize = 256;
/// Largest `k` accepted by [`build_ratio_rows`].
pub const MAX_RATIO_K: usize = 8;
/// Largest `j` accepted by [`build_ratio_rows`].
pub const MAX_RATIO_J: usize = 1_000_000;

/// Sign convention used when reading `S^{(k)}_{(n)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Signed,
    Unsigned,
}

impl std::fmt::Display for SignConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignConvention::Signed => f.write_str("signed"),
            SignConvention::Unsigned => f.write_str("unsigned"),
        }
    }
}

/// Exact triangular table of signed Stirling numbers of the first kind.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    n_max: usize,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    /// Builds rows `0..=n_max` with `s(n+1, k) = s(n, k-1) - n s(n, k)`.
    pub fn build(n_max: usize) -> Result<Self> {
        if n_max > MAX_EXACT_DEPTH {
            return Err(validation(format!(
                "stirling table depth {n_max} exceeds {MAX_EXACT_DEPTH}"
            )));
        }
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::from(1)]);
        for n in 0..n_max {
            let prev = &rows[n];
            let mut next = vec![BigInt::zero(); n + 2];
            for (k, slot) in next.iter_mut().enumerate().skip(1) {
                let left = &prev[k - 1];
                *slot = if k <= n {
                    left - &prev[k] * BigInt::from(n)
                } else {
                    left.clone()
                };
            }
            rows.push(next);
        }
        Ok(Self { n_max, rows })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Signed `s(n, k)`; zero when `k > n`.
    ///
    /// Panics if `n` exceeds the table depth.
    pub fn signed(&self, n: usize, k: usize) -> BigInt {
        self.rows[n].get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Unsigned `|s(n, k)|`.
    pub fn unsigned(&self, n: usize, k: usize) -> BigInt {
        self.signed(n, k).abs()
    }

    pub fn get(&self, n: usize, k: usize, convention: SignConvention) -> BigInt {
        match convention {
            SignConvention::Signed => self.signed(n, k),
            SignConvention::Unsigned => self.unsigned(n, k),
        }
    }

    /// `s(n, k)` rounded to the nearest double.
    pub fn signed_f64(&self, n: usize, k: usize) -> f64 {
        self.rows[n]
            .get(k)
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .unwrap_or(0.0)
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n]
    }

    /// Writes row `n` as CSV with header `n,k,s_nk`.
    pub fn write_row_csv<W: Write>(&self, n: usize, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,k,s_nk")?;
        for (k, v) in self.rows[n].iter().enumerate() {
            writeln!(out, "{n},{k},{v}")?;
        }
        Ok(())
    }
}

/// Floating-point row `u_{j,k} = |s(j, k)| / j!` for `j = 0..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingRatioRow {
    pub k: usize,
    pub values: Vec<f64>,
}

impl StirlingRatioRow {
    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }
}

/// Builds ratio rows for `k = 1..=k_max` using
/// `u_{j+1,k} = (u_{j,k-1} + j u_{j,k}) / (j + 1)`.
pub fn build_ratio_rows(k_max: usize, j_max: usize) -> Result<Vec<StirlingRatioRow>> {
    if !(1..=MAX_RATIO_K).contains(&k_max) {
        return Err(validation(format!("k_max must lie in 1..={MAX_RATIO_K}, got {k_max}")));
    }
    if j_max > MAX_RATIO_J {
        return Err(validation(format!("j_max {j_max} exceeds {MAX_RATIO_J}")));
    }
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; j_max + 1]; k_max + 1];
    rows[0][0] = 1.0;
    for j in 0..j_max {
        let denom = (j + 1) as f64;
        let jf = j as f64;
        // Walk k downwards so row k-1 still holds step j when row k is updated.
        for k in (1..=k_max).rev() {
            let (lower, upper) = rows.split_at_mut(k);
            upper[0][j + 1] = (lower[k - 1][j] + jf * upper[0][j]) / denom;
        }
        rows[0][j + 1] = 0.0;
    }
    Ok(rows
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(k, values)| StirlingRatioRow { k, values })
        .collect())
}
