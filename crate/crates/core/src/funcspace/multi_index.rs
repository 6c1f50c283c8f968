use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent tuple `α = (α₁, …, α_n)` of a mixed partial derivative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_i` in dimension `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ αᵢ`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|α|! / (α₁! ⋯ α_n!)`, exact while `|α| ≤ 34`.
    pub fn multinomial(&self) -> u128 {
        // Product of binomials, each exact in integers.
        let mut acc: u128 = 1;
        let mut partial: u128 = 0;
        for &a in &self.0 {
            for k in 1..=a as u128 {
                partial += 1;
                acc = acc * partial / k;
            }
        }
        acc
    }

    /// All multi-indices of dimension `n` and order `l`, lexicographically
    /// decreasing (`(l,0,…)` first).
    pub fn all_of_order(n: usize, l: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if pos + 1 == n {
                cur[pos] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in (0..=left).rev() {
                cur[pos] = a;
                rec(pos + 1, left - a, cur, out);
            }
        }
        if n == 0 {
            if l == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(0, l, &mut cur, &mut out);
        out
    }

    /// `x^α`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multi-index entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}
