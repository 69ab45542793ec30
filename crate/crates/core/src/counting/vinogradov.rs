//! Exact Vinogradov mean values `J_{s,k}(X)`.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::HashMap;

use super::serde_big;
use crate::arith::checked_pow;
use crate::budget::Budget;
use crate::error::{LabError, Result};

/// Number of solutions of `sum_i (x_i^j - y_i^j) = 0` for `1 <= j <= k`
/// with `1 <= x_i, y_i <= X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VinogradovCount {
    pub s: u32,
    pub k: u32,
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "J", serialize_with = "serde_big::serialize")]
    pub j: BigUint,
}

/// Enumerates the `X^s` tuples, buckets them by `(sum x, .., sum x^k)` and
/// returns the sum of squared bucket sizes.
pub fn vinogradov_count(s: u32, k: u32, x: u64, budget: &Budget) -> Result<VinogradovCount> {
    if s == 0 || k == 0 || x == 0 {
        return Err(LabError::invalid(format!(
            "vinogradov_count needs s, k, X >= 1 (got s={s}, k={k}, X={x})"
        )));
    }
    let tuples = (x as u128).checked_pow(s).unwrap_or(u128::MAX);
    budget.check_tuples("Vinogradov enumeration", tuples)?;
    // Every power sum must fit: s * X^k < 2^128.
    checked_pow(x, k)
        .and_then(|m| m.checked_mul(s as u128))
        .ok_or(LabError::Overflow { base: x, k })?;

    let powers: Vec<Vec<u128>> = (1..=x)
        .map(|v| (1..=k).map(|j| checked_pow(v, j).expect("checked above")).collect())
        .collect();
    let mut buckets: HashMap<Vec<u128>, u64> = HashMap::new();
    let mut idx = vec![0usize; s as usize];
    let mut key = vec![0u128; k as usize];
    loop {
        key.iter_mut().for_each(|c| *c = 0);
        for &i in &idx {
            for (c, p) in key.iter_mut().zip(&powers[i]) {
                *c += p;
            }
        }
        *buckets.entry(key.clone()).or_default() += 1;

        // Odometer step.
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let j = buckets.values().map(|&c| BigUint::from(c) * c).sum();
                return Ok(VinogradovCount { s, k, x, j });
            }
            idx[pos] += 1;
            if idx[pos] < x as usize {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(s: u32, k: u32, x: u64) -> u64 {
        let total = (x as u128).pow(2 * s) as u64;
        let mut count = 0;
        for code in 0..total {
            let mut c = code;
            let mut diff = vec![0i128; k as usize];
            for i in 0..2 * s {
                let v = (c % x + 1) as i128;
                c /= x;
                let sign = if i < s { 1 } else { -1 };
                for (j, d) in diff.iter_mut().enumerate() {
                    *d += sign * v.pow(j as u32 + 1);
                }
            }
            if diff.iter().all(|&d| d == 0) {
                count += 1;
            }
        }
        count
    }

    fn j(s: u32, k: u32, x: u64) -> BigUint {
        vinogradov_count(s, k, x, &Budget::default()).unwrap().j
    }

    #[test]
    fn examples() {
        for k in 1..6 {
            for x in 1..10 {
                assert_eq!(j(1, k, x), BigUint::from(x));
            }
        }
        assert_eq!(j(2, 2, 3), BigUint::from(15u32));
        for x in 1..=12u64 {
            assert_eq!(j(2, 2, x), BigUint::from(2 * x * x - x));
        }
        for s in 1..4 {
            assert_eq!(j(s, 3, 1), BigUint::from(1u32));
        }
    }

    #[test]
    fn matches_naive_loops() {
        for s in 1..=2 {
            for k in 1..=3 {
                for x in 1..=6 {
                    assert_eq!(j(s, k, x), BigUint::from(naive(s, k, x)), "s={s} k={k} X={x}");
                }
            }
        }
    }

    #[test]
    fn budget_and_input_errors() {
        let tight = Budget {
            max_tuples: 100,
            ..Budget::default()
        };
        assert!(matches!(
            vinogradov_count(3, 2, 5, &tight),
            Err(LabError::Resource { .. })
        ));
        assert!(vinogradov_count(0, 2, 5, &Budget::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn diagonal_bound_and_monotone(s in 1u32..4, k in 1u32..4, x in 1u64..7) {
            let v = j(s, k, x);
            prop_assert!(v >= BigUint::from(x).pow(s));
            prop_assert!(v <= j(s, k, x + 1));
            prop_assert!(v <= j(s + 1, k, x));
        }
    }
}
