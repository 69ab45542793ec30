//! Small integer and phase helpers shared across modules.

use num_complex::Complex64;
use std::f64::consts::TAU;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `base^exp mod m`, with `m >= 1`.
pub fn pow_mod(base: u64, mut exp: u32, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m = m as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// `x^k` if it fits in 128 bits.
pub fn checked_pow(x: u64, k: u32) -> Option<u128> {
    (x as u128).checked_pow(k)
}

/// Largest integer `x` with `x^k <= n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if n < 2 || k == 1 {
        return n;
    }
    let mut x = (n as f64).powf(1.0 / k as f64).round() as u64;
    while x > 0 && checked_pow(x, k).is_none_or(|v| v > n as u128) {
        x -= 1;
    }
    while checked_pow(x + 1, k).is_some_and(|v| v <= n as u128) {
        x += 1;
    }
    x
}

/// Largest prime factor of every integer in `0..=n` (1 for 0 and 1).
pub fn largest_prime_factors(n: usize) -> Vec<u32> {
    let mut lpf = vec![1u32; n + 1];
    for p in 2..=n {
        if lpf[p] == 1 {
            let mut m = p;
            while m <= n {
                lpf[m] = p as u32;
                m += p;
            }
        }
    }
    lpf
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation by trial division, as `(p, multiplicity)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `e(theta) = exp(2 pi i theta)`, reducing `theta` to `[-1/2, 1/2]` first.
#[inline]
pub fn e(theta: f64) -> Complex64 {
    let r = theta - theta.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// Table of `e(j/q)` for `0 <= j < q`.
pub fn unit_roots(q: u64) -> Vec<Complex64> {
    (0..q).map(|j| e(j as f64 / q as f64)).collect()
}

const CHUNK_BITS: u32 = 26;

/// Fractional part of `beta * m` in `[0, 1)`.
///
/// `m` is split into 26-bit limbs; `beta * 2^(26 j)` is reduced mod 1 exactly
/// (power-of-two scaling and `fract` are exact in binary floating point) and
/// each limb product is formed with an error-free FMA split, so the result is
/// accurate to a few ulps of 1 regardless of the size of `m`.
pub fn frac_mul(beta: f64, m: u128) -> f64 {
    let mut acc = 0.0f64;
    let mut scale = beta - beta.floor();
    let mut rest = m;
    while rest != 0 {
        let limb = (rest & ((1u128 << CHUNK_BITS) - 1)) as f64;
        acc += frac_product(scale, limb);
        acc -= acc.floor();
        rest >>= CHUNK_BITS;
        scale = (scale * (1u64 << CHUNK_BITS) as f64).fract();
    }
    acc
}

/// Same as [`frac_mul`] with a multiplier given by little-endian 32-bit digits.
pub fn frac_mul_digits(beta: f64, digits: &[u32]) -> f64 {
    let mut acc = 0.0f64;
    let mut scale = beta - beta.floor();
    for &d in digits {
        let lo = (d & 0xffff) as f64;
        let hi = (d >> 16) as f64;
        acc += frac_product(scale, lo);
        let scale_hi = (scale * 65536.0).fract();
        acc += frac_product(scale_hi, hi);
        acc -= acc.floor();
        scale = (scale * 4294967296.0).fract();
    }
    acc
}

#[inline]
fn frac_product(a: f64, b: f64) -> f64 {
    let p = a * b;
    let err = a.mul_add(b, -p);
    let f = p - p.floor();
    f + err
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iroot_boundaries() {
        assert_eq!(iroot(0, 3), 0);
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(10_000, 2), 100);
        assert_eq!(iroot(10_000 - 1, 2), 99);
        assert_eq!(iroot(u64::MAX, 2), 4294967295);
    }

    #[test]
    fn largest_prime_factor_table() {
        let lpf = largest_prime_factors(30);
        assert_eq!(lpf[1], 1);
        assert_eq!(lpf[12], 3);
        assert_eq!(lpf[14], 7);
        assert_eq!(lpf[29], 29);
        assert_eq!(lpf[30], 5);
    }

    #[test]
    fn phi_and_factorize() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn frac_mul_matches_exact_rationals() {
        // beta = 1/4 is exact in binary, so frac(beta * m) = (m mod 4) / 4.
        for m in [1u128, 3, 5, 1 << 60, (1 << 100) + 3, u128::MAX] {
            let want = (m % 4) as f64 / 4.0;
            let got = frac_mul(0.25, m);
            assert!((got - want).abs() < 1e-12, "m={m} got={got}");
        }
        let digits = [u32::MAX, 7, 1];
        let m = u32::MAX as u128 + (7u128 << 32) + (1u128 << 64);
        assert!((frac_mul_digits(0.375, &digits) - frac_mul(0.375, m)).abs() < 1e-12);
    }

    #[test]
    fn pow_mod_small() {
        assert_eq!(pow_mod(3, 4, 5), 1);
        assert_eq!(pow_mod(10, 0, 7), 1);
        assert_eq!(pow_mod(10, 3, 1), 0);
    }
}
