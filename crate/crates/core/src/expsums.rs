//! Weyl sums `f(alpha)`, `g(alpha)`, complete sums `S(q,a)`, the integral
//! `v(beta)` and the major-arc approximants built from them.
//!
//! Frequencies are carried as `alpha = a/q + beta` ([`Frequency`]): the
//! rational part is reduced with exact integer arithmetic on `x^k mod q`,
//! and only the offset `beta` goes through floating point.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{self, e, frac_mul, frac_mul_digits, gcd, pow_mod, unit_roots};
use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::quadrature::gl16;
use crate::smooth::{smooth_set, SmoothSet};

/// Constant used when reporting the `<<` laws of the major-arc approximants.
/// A reporting convention, not a proven constant.
pub const HARNESS_CONSTANT: f64 = 10.0;

/// `alpha = a/q + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Frequency {
    pub a: i64,
    pub q: u64,
    pub beta: f64,
}

impl Frequency {
    pub fn real(alpha: f64) -> Self {
        Frequency {
            a: 0,
            q: 1,
            beta: alpha,
        }
    }

    pub fn rational(a: i64, q: u64) -> Self {
        Self::near(a, q, 0.0)
    }

    pub fn near(a: i64, q: u64, beta: f64) -> Self {
        assert!(q >= 1, "denominator must be positive");
        Frequency { a, q, beta }
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 / self.q as f64 + self.beta
    }

    fn a_mod_q(self) -> u64 {
        self.a.rem_euclid(self.q as i64) as u64
    }
}

/// What to do when `x^k` leaves 128 bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Overflow {
    Error,
    #[default]
    BigInt,
}

#[derive(Clone, Debug)]
enum Powers {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

/// The `k`-th powers of a fixed list of bases, ready for repeated summation.
#[derive(Clone, Debug)]
pub struct PowerTable {
    k: u32,
    bases: Vec<u64>,
    powers: Powers,
}

impl PowerTable {
    pub fn new(k: u32, bases: Vec<u64>, overflow: Overflow) -> Result<Self> {
        if k < 1 {
            return Err(LabError::invalid("k must be >= 1"));
        }
        let mut small = Vec::with_capacity(bases.len());
        for &x in &bases {
            match arith::checked_pow(x, k) {
                Some(v) => small.push(v),
                None => {
                    if overflow == Overflow::Error {
                        return Err(LabError::Overflow { base: x, k });
                    }
                    let big = bases.iter().map(|&x| BigUint::from(x).pow(k)).collect();
                    return Ok(PowerTable {
                        k,
                        bases,
                        powers: Powers::Big(big),
                    });
                }
            }
        }
        Ok(PowerTable {
            k,
            bases,
            powers: Powers::Small(small),
        })
    }

    /// Bases `1..=floor(P)`.
    pub fn classical(k: u32, p: f64, overflow: Overflow) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(LabError::invalid(format!("P must be >= 1 (got {p})")));
        }
        Self::new(k, (1..=p.floor() as u64).collect(), overflow)
    }

    pub fn smooth(k: u32, set: &SmoothSet, overflow: Overflow) -> Result<Self> {
        Self::new(k, set.members.clone(), overflow)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Largest power present (0 for an empty table), if it fits in 128 bits.
    pub fn max_power(&self) -> Option<u128> {
        match &self.powers {
            Powers::Small(v) => Some(v.iter().copied().max().unwrap_or(0)),
            Powers::Big(v) => v.iter().max().and_then(|b| b.to_u128()),
        }
    }

    /// Powers as machine integers; `None` once any power exceeds 64 bits.
    pub fn powers_u64(&self) -> Option<Vec<u64>> {
        match &self.powers {
            Powers::Small(v) => v.iter().map(|&p| u64::try_from(p).ok()).collect(),
            Powers::Big(_) => None,
        }
    }

    /// `sum_x e(alpha x^k)`.
    pub fn sum(&self, alpha: Frequency) -> Complex64 {
        let q = alpha.q;
        let a = alpha.a_mod_q();
        let rational = |m_mod_q: u64| -> f64 {
            if q == 1 {
                0.0
            } else {
                ((a as u128 * m_mod_q as u128) % q as u128) as f64 / q as f64
            }
        };
        match &self.powers {
            Powers::Small(v) => v
                .iter()
                .map(|&m| {
                    let r = rational((m % q as u128) as u64);
                    let b = if alpha.beta == 0.0 {
                        0.0
                    } else {
                        frac_mul(alpha.beta, m)
                    };
                    e(r + b)
                })
                .sum(),
            Powers::Big(v) => v
                .iter()
                .map(|m| {
                    let r = rational((m % q).to_u64().expect("residue below q"));
                    let b = if alpha.beta == 0.0 {
                        0.0
                    } else {
                        frac_mul_digits(alpha.beta, &m.to_u32_digits())
                    };
                    e(r + b)
                })
                .sum(),
        }
    }

    /// `sum_x e(j x^k / n)` using an exact residue and a root-of-unity table.
    pub fn sum_at_root(&self, j: u64, roots: &[Complex64]) -> Complex64 {
        let n = roots.len() as u128;
        match &self.powers {
            Powers::Small(v) => v.iter().map(|&m| roots[((j as u128 * (m % n)) % n) as usize]).sum(),
            Powers::Big(v) => v
                .iter()
                .map(|m| {
                    let r = (m % n as u64).to_u64().expect("residue below n") as u128;
                    roots[((j as u128 * r) % n) as usize]
                })
                .sum(),
        }
    }
}

/// Which analytic object a [`SumEvaluation`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    Classical,
    Smooth,
    Complete,
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumEvaluation {
    pub kind: SumKind,
    pub argument: f64,
    pub value: Complex64,
    pub terms: u64,
}

/// Streamed batch record: `{k, P, alpha, re, im}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumRecord {
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub alpha: f64,
    pub re: f64,
    pub im: f64,
}

impl SumRecord {
    pub fn new(k: u32, p: f64, eval: &SumEvaluation) -> Self {
        SumRecord {
            k,
            p,
            alpha: eval.argument,
            re: eval.value.re,
            im: eval.value.im,
        }
    }
}

fn check_kp(k: u32, p: f64) -> Result<()> {
    if k < 2 {
        return Err(LabError::invalid(format!("k must be >= 2 (got {k})")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::invalid(format!("P must be >= 1 (got {p})")));
    }
    Ok(())
}

/// `f(alpha) = sum_{1 <= x <= P} e(alpha x^k)`.
pub fn weyl_sum_f(k: u32, p: f64, alpha: Frequency) -> Result<SumEvaluation> {
    weyl_sum_f_with(k, p, alpha, Overflow::BigInt)
}

pub fn weyl_sum_f_with(k: u32, p: f64, alpha: Frequency, overflow: Overflow) -> Result<SumEvaluation> {
    check_kp(k, p)?;
    let table = PowerTable::classical(k, p, overflow)?;
    Ok(SumEvaluation {
        kind: SumKind::Classical,
        argument: alpha.to_f64(),
        value: table.sum(alpha),
        terms: table.len() as u64,
    })
}

/// `g(alpha) = sum_{x in A_eta(P)} e(alpha x^k)`.
pub fn smooth_weyl_sum_g(k: u32, p: f64, eta: f64, alpha: Frequency, budget: &Budget) -> Result<SumEvaluation> {
    check_kp(k, p)?;
    let set = smooth_set(p, eta, budget)?;
    let table = PowerTable::smooth(k, &set, Overflow::BigInt)?;
    Ok(SumEvaluation {
        kind: SumKind::Smooth,
        argument: alpha.to_f64(),
        value: table.sum(alpha),
        terms: table.len() as u64,
    })
}

/// `S(q,a) = sum_{r=1}^{q} e(a r^k / q)`.
///
/// With `normalized`, `gcd(a, q) = 1` is required.
pub fn gauss_sum(q: u64, a: i64, k: u32, normalized: bool) -> Result<Complex64> {
    if q == 0 {
        return Err(LabError::invalid("q must be >= 1"));
    }
    let a = a.rem_euclid(q as i64) as u64;
    if normalized && gcd(a, q) != 1 {
        return Err(LabError::invalid(format!("gcd({a}, {q}) != 1")));
    }
    Ok((1..=q)
        .map(|r| {
            let idx = (a as u128 * pow_mod(r, k, q) as u128 % q as u128) as f64;
            e(idx / q as f64)
        })
        .sum())
}

/// All complete sums `S(q, a)`, `0 <= a < q`, for one modulus.
///
/// Built from the histogram of `r^k mod q` and a table of `q`-th roots of
/// unity, so every phase index is exact.
#[derive(Clone, Debug)]
pub struct GaussSumTable {
    q: u64,
    sums: Vec<Complex64>,
}

impl GaussSumTable {
    pub fn new(q: u64, k: u32) -> Self {
        assert!(q >= 1);
        let mut hist = vec![0u64; q as usize];
        for r in 1..=q {
            hist[pow_mod(r, k, q) as usize] += 1;
        }
        let roots = unit_roots(q);
        let support: Vec<(u64, u64)> = hist
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(c, &n)| (c as u64, n))
            .collect();
        let sums = (0..q)
            .map(|a| {
                support
                    .iter()
                    .map(|&(c, n)| roots[(a * c % q) as usize] * n as f64)
                    .sum()
            })
            .collect();
        GaussSumTable { q, sums }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn get(&self, a: i64) -> Complex64 {
        self.sums[a.rem_euclid(self.q as i64) as usize]
    }
}

/// Panel refinement for [`v_integral_refined`].
const MIN_LEVELS: u64 = 16;

/// `v(beta) = int_0^P e(beta gamma^k) d gamma`.
///
/// Panels are placed at equal phase increments of at most a quarter turn,
/// `gamma_j = P (j / L)^{1/k}`, and each panel uses a 16-point Gauss rule.
pub fn v_integral(k: u32, p: f64, beta: f64, budget: &Budget) -> Result<Complex64> {
    v_integral_refined(k, p, beta, 1, budget)
}

/// As [`v_integral`] with every panel split into `refine` equal-phase parts.
pub fn v_integral_refined(k: u32, p: f64, beta: f64, refine: u64, budget: &Budget) -> Result<Complex64> {
    check_kp(k, p)?;
    if beta == 0.0 {
        return Ok(Complex64::new(p, 0.0));
    }
    let total_phase = beta.abs() * p.powi(k as i32);
    let levels = ((4.0 * total_phase).ceil() as u64).max(MIN_LEVELS) * refine.max(1);
    budget.check_panels("v(beta) quadrature", levels as u128)?;
    let inv_k = 1.0 / k as f64;
    let rule = gl16();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut left = 0.0;
    for j in 1..=levels {
        let right = p * (j as f64 / levels as f64).powf(inv_k);
        acc += rule.integrate_complex(left, right, |g| e(beta * g.powi(k as i32)));
        left = right;
    }
    Ok(acc)
}

/// Observed gap between a sum and its major-arc approximant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub approx: Complex64,
    pub actual: Complex64,
    pub error: f64,
    /// The reference size of the error: `log P` for `f`, `P (log P)^{-1/2}` for `g`.
    pub scale: f64,
    /// `error <= HARNESS_CONSTANT * scale`.
    pub within: bool,
}

impl ApproxReport {
    fn new(approx: Complex64, actual: Complex64, scale: f64) -> Self {
        let error = (actual - approx).norm();
        ApproxReport {
            approx,
            actual,
            error,
            scale,
            within: error <= HARNESS_CONSTANT * scale,
        }
    }

    pub fn relative(&self) -> f64 {
        self.error / self.scale
    }
}

fn check_label(q: u64, a: i64) -> Result<()> {
    if q == 0 || gcd(a.rem_euclid(q as i64) as u64, q) != 1 {
        return Err(LabError::invalid(format!(
            "need q >= 1 and gcd(a, q) = 1 (got a={a}, q={q})"
        )));
    }
    Ok(())
}

/// Compares `f(a/q + beta)` with `q^{-1} S(q,a) v(beta)`.
pub fn major_arc_approx_f(k: u32, p: f64, q: u64, a: i64, beta: f64, budget: &Budget) -> Result<ApproxReport> {
    check_kp(k, p)?;
    check_label(q, a)?;
    let table = PowerTable::classical(k, p, Overflow::BigInt)?;
    major_arc_approx_f_table(&table, p, q, a, beta, budget)
}

/// As [`major_arc_approx_f`] with a prebuilt table of classical powers.
pub fn major_arc_approx_f_table(
    table: &PowerTable,
    p: f64,
    q: u64,
    a: i64,
    beta: f64,
    budget: &Budget,
) -> Result<ApproxReport> {
    let k = table.k();
    let actual = table.sum(Frequency::near(a, q, beta));
    let approx = gauss_sum(q, a, k, true)? / q as f64 * v_integral(k, p, beta, budget)?;
    Ok(ApproxReport::new(approx, actual, p.ln()))
}

/// Compares `g(a/q + beta)` with `rho q^{-1} S(q,a) v(beta)`.
#[allow(clippy::too_many_arguments)]
pub fn major_arc_approx_g(
    k: u32,
    p: f64,
    eta: f64,
    q: u64,
    a: i64,
    beta: f64,
    rho: f64,
    budget: &Budget,
) -> Result<ApproxReport> {
    check_kp(k, p)?;
    check_label(q, a)?;
    let set = smooth_set(p, eta, budget)?;
    let table = PowerTable::smooth(k, &set, Overflow::BigInt)?;
    let actual = table.sum(Frequency::near(a, q, beta));
    let approx = gauss_sum(q, a, k, true)? / q as f64 * v_integral(k, p, beta, budget)? * rho;
    Ok(ApproxReport::new(approx, actual, p / p.ln().sqrt()))
}
