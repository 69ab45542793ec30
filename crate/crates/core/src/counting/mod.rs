//! Exact integer counting through generating polynomials.
//!
//! A [`CoefficientSeries`] stores the coefficients of a product of the
//! polynomials `sum_x z^{x^k}` over classical or smooth bases. Its
//! coefficient at `n` is the number of ordered representations of `n`.
//! Coefficients are big integers throughout.

mod dft;
mod moments;
mod vinogradov;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt::Write as _;

use crate::arith::{checked_pow, iroot, primes_up_to};
use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::smooth::{check_params, effective_bound, smooth_bound, smooth_members};

pub use dft::{dft_rep_count, DftEvaluator};
pub use moments::{holder_check, ln_big, minor_arc_moment, HolderCheck, MinorArcReport};
pub use vinogradov::{vinogradov_count, VinogradovCount};

/// Output indices handled per parallel task in [`multiply`].
const BLOCK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesKind {
    /// Bases `1..=floor(P)`.
    Classical,
    /// Bases in `[1, P]` free of primes above `bound`.
    Smooth { eta: f64, bound: f64 },
}

/// One generating polynomial raised to `copies`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesFactor {
    pub kind: SeriesKind,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub base_terms: u64,
    pub copies: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    factors: Vec<SeriesFactor>,
    /// Set when coefficients above some index were discarded.
    truncated: bool,
    coefficients: Vec<BigUint>,
}

impl CoefficientSeries {
    /// The constant series `1`.
    pub fn one() -> Self {
        CoefficientSeries {
            factors: Vec::new(),
            truncated: false,
            coefficients: vec![BigUint::one()],
        }
    }

    pub fn factors(&self) -> &[SeriesFactor] {
        &self.factors
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    /// Coefficient at `m`, zero past the stored range.
    pub fn get(&self, m: u64) -> BigUint {
        usize::try_from(m)
            .ok()
            .and_then(|i| self.coefficients.get(i).cloned())
            .unwrap_or_default()
    }

    /// Largest stored index.
    pub fn max_index(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn variables(&self) -> u32 {
        self.factors.iter().map(|f| f.copies).sum()
    }

    pub fn mass(&self) -> BigUint {
        self.coefficients.iter().sum()
    }

    /// `prod base_terms^copies`, the mass of an untruncated product.
    pub fn expected_mass(&self) -> Option<BigUint> {
        if self.truncated {
            return None;
        }
        Some(
            self.factors
                .iter()
                .map(|f| BigUint::from(f.base_terms).pow(f.copies))
                .product(),
        )
    }

    fn nonzero(&self) -> usize {
        self.coefficients.iter().filter(|c| !c.is_zero()).count()
    }

    /// `index,coefficient` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,coefficient\n");
        for (m, c) in self.coefficients.iter().enumerate() {
            let _ = writeln!(out, "{m},{c}");
        }
        out
    }

    /// Product with `other`, keeping indices `<= cap`.
    pub fn multiply(&self, other: &CoefficientSeries, cap: Option<usize>, budget: &Budget) -> Result<Self> {
        let full = self.max_index() + other.max_index();
        let top = cap.map_or(full, |c| c.min(full));
        budget.check_cells("series product", top as u128 + 1)?;
        let (dense, sparse) = if self.nonzero() >= other.nonzero() {
            (self, other)
        } else {
            (other, self)
        };
        let coefficients = multiply(&dense.coefficients, &sparse.coefficients, top);
        let mut factors = self.factors.clone();
        for f in &other.factors {
            push_factor(&mut factors, f.clone());
        }
        Ok(CoefficientSeries {
            factors,
            truncated: self.truncated || other.truncated || top < full,
            coefficients,
        })
    }
}

impl Serialize for CoefficientSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        let mut st = s.serialize_struct("CoefficientSeries", 3)?;
        st.serialize_field("factors", &self.factors)?;
        st.serialize_field("truncated", &self.truncated)?;
        st.serialize_field("coefficients", &coeffs)?;
        st.end()
    }
}

fn push_factor(factors: &mut Vec<SeriesFactor>, f: SeriesFactor) {
    match factors
        .iter_mut()
        .find(|g| g.kind == f.kind && g.k == f.k && g.p == f.p && g.base_terms == f.base_terms)
    {
        Some(g) => g.copies += f.copies,
        None => factors.push(f),
    }
}

/// `c[m] = sum_j dense[m - j] sparse[j]` for `m <= top`.
///
/// Each output index is accumulated in a fixed order by a single task, so
/// the result does not depend on the thread count.
fn multiply(dense: &[BigUint], sparse: &[BigUint], top: usize) -> Vec<BigUint> {
    let support: Vec<(usize, &BigUint)> = sparse.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let mut out = vec![BigUint::zero(); top + 1];
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(block, chunk)| {
        let base = block * BLOCK;
        for (off, slot) in chunk.iter_mut().enumerate() {
            let m = base + off;
            // Only j with m - j < dense.len() contribute.
            let lo = (m + 1).saturating_sub(dense.len());
            let start = support.partition_point(|&(j, _)| j < lo);
            let mut acc = BigUint::zero();
            for &(j, c) in &support[start..] {
                if j > m {
                    break;
                }
                let d = &dense[m - j];
                if d.is_zero() {
                    continue;
                }
                if c.is_one() {
                    acc += d;
                } else {
                    acc += d * c;
                }
            }
            *slot = acc;
        }
    });
    out
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(LabError::invalid(format!("k must be >= 2 (got {k})")));
    }
    Ok(())
}

/// Indicator series of `{x^k}` over explicit bases.
pub fn series_from_bases(
    kind: SeriesKind,
    k: u32,
    p: f64,
    bases: &[u64],
    cap: Option<usize>,
    budget: &Budget,
) -> Result<CoefficientSeries> {
    check_k(k)?;
    let max_base = bases.iter().copied().max().unwrap_or(0);
    let full = checked_pow(max_base, k)
        .filter(|&d| d < usize::MAX as u128)
        .ok_or(LabError::Resource {
            what: "power series",
            needed: u128::MAX,
            cap: budget.max_cells as u128,
        })? as usize;
    let top = cap.map_or(full, |c| c.min(full));
    budget.check_cells("power series", top as u128 + 1)?;
    let mut coefficients = vec![BigUint::zero(); top + 1];
    for &x in bases {
        let m = checked_pow(x, k).expect("bounded by max base") as usize;
        if m <= top {
            coefficients[m] += 1u32;
        }
    }
    Ok(CoefficientSeries {
        factors: vec![SeriesFactor {
            kind,
            k,
            p,
            base_terms: bases.len() as u64,
            copies: 1,
        }],
        truncated: top < full,
        coefficients,
    })
}

/// Indicator series of `x^k` for `x in [1, P]`, or `x in A_eta(P)` when
/// `smooth` carries `eta`.
pub fn power_series(k: u32, p: f64, smooth: Option<f64>, budget: &Budget) -> Result<CoefficientSeries> {
    check_k(k)?;
    let (kind, bases) = match smooth {
        None => {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(LabError::invalid(format!("P must be >= 1 (got {p})")));
            }
            (SeriesKind::Classical, (1..=p.floor() as u64).collect::<Vec<_>>())
        }
        Some(eta) => {
            check_params(p, eta)?;
            let bound = smooth_bound(p, eta);
            let members = smooth_members(p.floor() as u64, bound, budget)?;
            (SeriesKind::Smooth { eta, bound }, members)
        }
    };
    series_from_bases(kind, k, p, &bases, None, budget)
}

/// `series^copies`.
pub fn convolve_power(series: &CoefficientSeries, copies: u32, budget: &Budget) -> Result<CoefficientSeries> {
    convolve_power_upto(series, copies, None, budget)
}

/// `series^copies` with indices above `cap` dropped along the way.
pub fn convolve_power_upto(
    series: &CoefficientSeries,
    copies: u32,
    cap: Option<usize>,
    budget: &Budget,
) -> Result<CoefficientSeries> {
    let full = series.max_index() as u128 * copies as u128;
    let top = cap.map_or(full, |c| (c as u128).min(full));
    budget.check_cells("convolution power", top + 1)?;
    let mut acc = CoefficientSeries::one();
    for _ in 0..copies {
        acc = acc.multiply(series, cap, budget)?;
    }
    Ok(acc)
}

/// Bases for a representation problem at `n`: `P = n^{1/k}`, `B = n^{eta/k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceBases {
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub bound: Option<f64>,
    pub classical: Vec<u64>,
    pub smooth: Vec<u64>,
}

/// Classical bases `1..=floor(n^{1/k})` and, when `eta` is given, the
/// `n^{eta/k}`-smooth ones among them.
pub fn instance_bases(k: u32, n: u64, eta: Option<f64>, budget: &Budget) -> Result<InstanceBases> {
    check_k(k)?;
    let top = iroot(n, k);
    let p = (n as f64).powf(1.0 / k as f64);
    let (bound, smooth) = match eta {
        Some(eta) => {
            check_params(1.0, eta)?;
            let b = (n as f64).powf(eta / k as f64);
            (Some(b), smooth_members(top, b, budget)?)
        }
        None => (None, Vec::new()),
    };
    Ok(InstanceBases {
        k,
        p,
        bound,
        classical: (1..=top).collect(),
        smooth,
    })
}

fn check_counts(u: u32, eta: Option<f64>) -> Result<()> {
    if u > 0 && eta.is_none() {
        return Err(LabError::invalid("u > 0 needs a smoothness exponent eta"));
    }
    Ok(())
}

/// `(classical)^t (smooth)^u` truncated at `cap`.
#[allow(clippy::too_many_arguments)]
pub fn mixed_series(
    k: u32,
    p: f64,
    classical: &[u64],
    smooth: Option<(f64, f64, &[u64])>,
    t: u32,
    u: u32,
    cap: Option<usize>,
    budget: &Budget,
) -> Result<CoefficientSeries> {
    let f = series_from_bases(SeriesKind::Classical, k, p, classical, cap, budget)?;
    let mut acc = convolve_power_upto(&f, t, cap, budget)?;
    if u > 0 {
        let (eta, bound, bases) = smooth.ok_or_else(|| LabError::invalid("u > 0 needs smooth bases"))?;
        let g = series_from_bases(SeriesKind::Smooth { eta, bound }, k, p, bases, cap, budget)?;
        let gu = convolve_power_upto(&g, u, cap, budget)?;
        acc = acc.multiply(&gu, cap, budget)?;
    }
    Ok(acc)
}

/// Number of ordered solutions of `x_1^k + .. + x_t^k + y_1^k + .. + y_u^k = n`
/// with `1 <= x_i <= P`, `y_j in A_eta(P)`, `P = n^{1/k}`.
pub fn mixed_rep_count(k: u32, t: u32, u: u32, eta: Option<f64>, n: u64, budget: &Budget) -> Result<BigUint> {
    if n == 0 {
        return Err(LabError::invalid("n must be >= 1"));
    }
    check_counts(u, eta)?;
    let inst = instance_bases(k, n, eta.filter(|_| u > 0), budget)?;
    let cap = usize::try_from(n).map_err(|_| LabError::invalid("n too large for a series"))?;
    let smooth = eta.zip(inst.bound).map(|(e, b)| (e, b, inst.smooth.as_slice()));
    let series = mixed_series(k, inst.p, &inst.classical, smooth, t, u, Some(cap), budget)?;
    Ok(series.get(n))
}

/// All counts `R(n)` with `P` fixed (not tied to `n`), for `n` up to the
/// full degree `(t + u) floor(P)^k`.
pub fn mixed_counts_fixed_p(
    k: u32,
    p: f64,
    t: u32,
    u: u32,
    eta: Option<f64>,
    budget: &Budget,
) -> Result<CoefficientSeries> {
    check_counts(u, eta)?;
    let classical = (1..=p.floor() as u64).collect::<Vec<_>>();
    let smooth_part = match eta.filter(|_| u > 0) {
        Some(eta) => {
            check_params(p, eta)?;
            let bound = smooth_bound(p, eta);
            Some((eta, bound, smooth_members(p.floor() as u64, bound, budget)?))
        }
        None => None,
    };
    let smooth = smooth_part.as_ref().map(|(e, b, m)| (*e, *b, m.as_slice()));
    mixed_series(k, p, &classical, smooth, t, u, None, budget)
}

/// `R(n)` for every `n` in `[lo, hi]` with `P = n^{1/k}` and `B = n^{eta/k}`
/// following `n`.
///
/// Bases with `x^k > n` never contribute at index `n`, so one product serves
/// every `n` that shares the same set of primes below `B(n)`.
pub fn rep_counts_range(
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    lo: u64,
    hi: u64,
    budget: &Budget,
) -> Result<Vec<(u64, BigUint)>> {
    if lo == 0 || lo > hi {
        return Err(LabError::invalid(format!("need 1 <= lo <= hi (got {lo}..{hi})")));
    }
    check_k(k)?;
    check_counts(u, eta)?;
    let top = iroot(hi, k);
    let classical: Vec<u64> = (1..=top).collect();
    let p_hi = (hi as f64).powf(1.0 / k as f64);
    let eta = eta.filter(|_| u > 0);

    // Group consecutive n by the number of primes up to B(n).
    let primes = primes_up_to(top as usize);
    let key = |n: u64| -> usize {
        match eta {
            Some(e) => {
                let b = effective_bound((n as f64).powf(e / k as f64));
                primes.partition_point(|&q| q as f64 <= b)
            }
            None => 0,
        }
    };
    let mut groups: Vec<(u64, u64)> = Vec::new();
    let mut start = lo;
    let mut current = key(lo);
    for n in lo + 1..=hi {
        let kn = key(n);
        if kn != current {
            groups.push((start, n - 1));
            start = n;
            current = kn;
        }
    }
    groups.push((start, hi));

    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for (a, b) in groups {
        let cap = b as usize;
        let series = match eta {
            Some(e) => {
                let bound = (a as f64).powf(e / k as f64);
                let members = smooth_members(top, bound, budget)?;
                mixed_series(k, p_hi, &classical, Some((e, bound, &members)), t, u, Some(cap), budget)?
            }
            None => mixed_series(k, p_hi, &classical, None, t, u, Some(cap), budget)?,
        };
        out.extend((a..=b).map(|n| (n, series.get(n))));
    }
    Ok(out)
}

/// `sum_m c_m^2` over `series^s`: the number of solutions of
/// `x_1^k + .. + x_s^k = y_1^k + .. + y_s^k`, i.e. the `2s`-th moment.
pub fn even_moment(series: &CoefficientSeries, s: u32, budget: &Budget) -> Result<BigUint> {
    if s == 0 {
        return Err(LabError::invalid("even_moment needs s >= 1"));
    }
    let power = convolve_power(series, s, budget)?;
    Ok(power.coefficients().iter().map(|c| c * c).sum())
}

pub(crate) mod serde_big {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}
