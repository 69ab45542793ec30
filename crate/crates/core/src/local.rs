//! Singular series, local densities, the singular integral and the
//! asymptotic main term
//!
//! `R(n) ~ rho^u S(n) Gamma(1 + 1/k)^s / Gamma(s/k) n^{s/k - 1}`, `s = t + u`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, is_prime, pow_mod, unit_roots};
use crate::budget::Budget;
use crate::counting::rep_counts_range;
use crate::error::{LabError, Result};
use crate::expsums::{v_integral, GaussSumTable};
use crate::ledger::rational::{ratio_big, Rational};
use crate::quadrature::gl16;
use crate::smooth::{dickman_rho, smooth_members};

/// Tolerance for the imaginary part of a single `A(q)`, relative to `1 + |A(q)|`.
pub const TERM_IMAG_TOL: f64 = 1e-9;
/// Tolerance per modulus for the imaginary part of a truncated series.
pub const SERIES_IMAG_TOL: f64 = 1e-8;

fn check_ks(k: u32, s: u32) -> Result<()> {
    if k < 2 || s == 0 {
        return Err(LabError::invalid(format!("need k >= 2 and s >= 1 (got k={k}, s={s})")));
    }
    Ok(())
}

/// Per-modulus data `(a, (S(q,a)/q)^s)` for the reduced residues `a`.
#[derive(Clone, Debug)]
struct Modulus {
    q: u64,
    roots: Vec<Complex64>,
    terms: Vec<(u64, Complex64)>,
}

impl Modulus {
    fn new(q: u64, k: u32, s: u32) -> Self {
        let table = GaussSumTable::new(q, k);
        let residues: Vec<u64> = if q == 1 {
            vec![1]
        } else {
            (1..q).filter(|&a| gcd(a, q) == 1).collect()
        };
        let terms = residues
            .into_iter()
            .map(|a| (a, (table.get(a as i64) / q as f64).powu(s)))
            .collect();
        Modulus {
            q,
            roots: unit_roots(q),
            terms,
        }
    }

    /// `A(q) = sum_a (S(q,a)/q)^s e(-na/q)` with exact phase indices.
    fn a(&self, n: u64) -> Complex64 {
        let q = self.q as u128;
        let nm = n as u128 % q;
        self.terms
            .iter()
            .map(|&(a, c)| c * self.roots[((q - nm * a as u128 % q) % q) as usize])
            .sum()
    }

    fn max_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

/// `A(q)` for one modulus.
pub fn a_q(q: u64, n: u64, s: u32, k: u32) -> Result<Complex64> {
    check_ks(k, s)?;
    if q == 0 {
        return Err(LabError::invalid("q must be >= 1"));
    }
    Ok(Modulus::new(q, k, s).a(n))
}

/// Precomputed `(S(q,a)/q)^s` for every `q <= Q`, reusable across targets `n`.
#[derive(Clone, Debug)]
pub struct SingularSeriesTable {
    k: u32,
    s: u32,
    moduli: Vec<Modulus>,
}

impl SingularSeriesTable {
    pub fn new(k: u32, s: u32, q_max: u64, budget: &Budget) -> Result<Self> {
        check_ks(k, s)?;
        if q_max == 0 {
            return Err(LabError::invalid("Q must be >= 1"));
        }
        let q = q_max as u128;
        budget.check_cells("singular series table", q * (q + 1) / 2)?;
        let moduli = (1..=q_max).into_par_iter().map(|q| Modulus::new(q, k, s)).collect();
        Ok(SingularSeriesTable { k, s, moduli })
    }

    pub fn q_max(&self) -> u64 {
        self.moduli.len() as u64
    }

    /// `A(q)` for `q <= Q`.
    pub fn a(&self, q: u64, n: u64) -> Complex64 {
        self.moduli[q as usize - 1].a(n)
    }

    /// `A(1), .., A(Q)` and the truncated sum, summed in ascending `q`.
    pub fn state(&self, n: u64) -> Result<LocalSeriesState> {
        let terms: Vec<(u64, Complex64)> = self.moduli.iter().map(|m| (m.q, m.a(n))).collect();
        let total: Complex64 = terms.iter().map(|&(_, a)| a).sum();
        let q_max = self.q_max() as f64;
        if total.im.abs() >= SERIES_IMAG_TOL * q_max {
            return Err(LabError::Tolerance {
                what: "singular series imaginary residual",
                value: total.im.abs(),
                tol: SERIES_IMAG_TOL * q_max,
            });
        }
        Ok(LocalSeriesState {
            n,
            s: self.s,
            k: self.k,
            terms,
            partial: total.re,
            imag_residual: total.im,
        })
    }

    /// `S(n; Q)`.
    pub fn value(&self, n: u64) -> Result<f64> {
        self.state(n).map(|st| st.partial)
    }

    /// Largest `|S(q,a)/q|^s` over the reduced residues of `q`.
    pub fn term_bound(&self, q: u64) -> f64 {
        let m = &self.moduli[q as usize - 1];
        m.terms.len() as f64 * m.max_norm()
    }
}

/// The terms `A(q)` and the running sum `S(n; Q)` for one target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalSeriesState {
    pub n: u64,
    pub s: u32,
    pub k: u32,
    pub terms: Vec<(u64, Complex64)>,
    pub partial: f64,
    pub imag_residual: f64,
}

impl LocalSeriesState {
    /// Terms whose imaginary part exceeds [`TERM_IMAG_TOL`].
    pub fn non_real_terms(&self) -> Vec<u64> {
        self.terms
            .iter()
            .filter(|(_, a)| a.im.abs() > TERM_IMAG_TOL * (1.0 + a.norm()))
            .map(|&(q, _)| q)
            .collect()
    }
}

/// `S(n; Q) = Re sum_{q <= Q} A(q)`.
pub fn singular_series_truncated(n: u64, s: u32, k: u32, q_max: u64, budget: &Budget) -> Result<f64> {
    SingularSeriesTable::new(k, s, q_max, budget)?.value(n)
}

/// `M_n(p^gamma) / p^{gamma (s-1)}` where `M_n(m)` counts `s`-tuples mod `m`
/// with `x_1^k + .. + x_s^k = n`.
///
/// `M_n` is computed by convolving the histogram of `x^k mod p^gamma` with
/// itself `s` times.
pub fn local_density(p: u64, gamma: u32, n: u64, s: u32, k: u32, budget: &Budget) -> Result<Rational> {
    check_ks(k, s)?;
    if !is_prime(p) {
        return Err(LabError::invalid(format!("{p} is not prime")));
    }
    if gamma == 0 {
        return Ok(ratio_big(BigUint::from(1u32), BigUint::from(1u32)));
    }
    let m = p
        .checked_pow(gamma)
        .filter(|&m| m <= u32::MAX as u64)
        .ok_or_else(|| LabError::invalid("p^gamma too large"))?;
    budget.check_cells("local density histogram", m as u128)?;
    budget.check_tuples("local density convolution", s as u128 * m as u128 * m as u128)?;
    let counts = local_counts(m, s, k);
    let num = counts[(n % m) as usize].clone();
    let den = BigUint::from(m).pow(s - 1);
    Ok(ratio_big(num, den))
}

/// `M_r(m)` for every residue `r mod m`.
pub fn local_counts(m: u64, s: u32, k: u32) -> Vec<BigUint> {
    let mu = m as usize;
    let mut hist = vec![0u64; mu];
    for x in 0..m {
        hist[pow_mod(x, k, m) as usize] += 1;
    }
    let support: Vec<(usize, u64)> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r, &c)| (r, c))
        .collect();
    let mut acc = vec![BigUint::zero(); mu];
    acc[0] = BigUint::from(1u32);
    for _ in 0..s {
        let mut next = vec![BigUint::zero(); mu];
        for (r, c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(h, mult) in &support {
                next[(r + h) % mu] += c * mult;
            }
        }
        acc = next;
    }
    acc
}

/// The truncated singular integral beside its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularIntegral {
    pub n: u64,
    pub k: u32,
    pub s: u32,
    pub w: f64,
    pub quadrature: f64,
    /// `Gamma(1 + 1/k)^s / Gamma(s/k) n^{s/k - 1}`.
    pub closed_form: f64,
    pub relative_gap: f64,
}

/// `Gamma(1 + 1/k)^s / Gamma(s/k)`.
pub fn gamma_factor(k: u32, s: u32) -> f64 {
    libm::tgamma(1.0 + 1.0 / k as f64).powi(s as i32) / libm::tgamma(s as f64 / k as f64)
}

/// Panels per unit of `tau` in the singular-integral quadrature.
const TAU_PANELS_PER_UNIT: f64 = 8.0;

/// `J(n; W) = int_{|beta| <= W P^{-k}} v(beta)^s e(-beta n) d beta`, `P = n^{1/k}`.
///
/// With `beta = tau / n` and `v(tau/n) = P V(tau)`, `V(tau) = int_0^1 e(tau x^k) dx`,
/// this is `n^{s/k - 1} 2 Re int_0^W V(tau)^s e(-tau) d tau`.
pub fn singular_integral(n: u64, k: u32, s: u32, w: f64, budget: &Budget) -> Result<SingularIntegral> {
    check_ks(k, s)?;
    if n == 0 {
        return Err(LabError::invalid("n must be >= 1"));
    }
    if !(w >= 1.0 && w.is_finite()) {
        return Err(LabError::invalid(format!("W must be >= 1 (got {w})")));
    }
    let panels = (w * TAU_PANELS_PER_UNIT).ceil() as u64;
    budget.check_panels("singular integral", panels as u128)?;
    let h = w / panels as f64;
    let parts: Vec<Result<f64>> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let mut acc = 0.0;
            for (tau, weight) in gl16().mapped(a, b) {
                let v = v_integral(k, 1.0, tau, budget)?;
                acc += weight * (v.powu(s) * crate::arith::e(-tau)).re;
            }
            Ok(acc)
        })
        .collect();
    let mut inner = 0.0;
    for part in parts {
        inner += part?;
    }
    let power = (n as f64).powf(s as f64 / k as f64 - 1.0);
    let quadrature = 2.0 * inner * power;
    let closed_form = gamma_factor(k, s) * power;
    Ok(SingularIntegral {
        n,
        k,
        s,
        w,
        quadrature,
        closed_form,
        relative_gap: (quadrature - closed_form).abs() / closed_form,
    })
}

/// Where the smooth-density factor `rho` comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoSource {
    /// `rho(1/eta)`.
    #[default]
    Dickman,
    /// `|A_eta(P)| / floor(P)` at `P = n^{1/k}`.
    Empirical,
    One,
}

impl RhoSource {
    pub fn rho(self, n: u64, k: u32, eta: f64, budget: &Budget) -> Result<f64> {
        match self {
            RhoSource::Dickman => Ok(dickman_rho(1.0 / eta)),
            RhoSource::One => Ok(1.0),
            RhoSource::Empirical => {
                let top = crate::arith::iroot(n, k);
                if top == 0 {
                    return Ok(1.0);
                }
                let bound = (n as f64).powf(eta / k as f64);
                Ok(smooth_members(top, bound, budget)?.len() as f64 / top as f64)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MainTermParts {
    pub n: u64,
    pub k: u32,
    pub t: u32,
    pub u: u32,
    /// `rho^u`.
    pub rho_factor: f64,
    /// `S(n; Q)`.
    pub sing_series: f64,
    /// `Gamma(1 + 1/k)^s / Gamma(s/k)`.
    pub gamma_factor: f64,
    /// `n^{s/k - 1}`.
    pub power: f64,
    pub prediction: f64,
}

/// Main-term predictor for fixed `(k, t, u, eta, Q)` and varying `n`.
#[derive(Clone, Debug)]
pub struct MainTermModel {
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    rho: RhoSource,
    table: SingularSeriesTable,
    gamma: f64,
}

impl MainTermModel {
    pub fn new(k: u32, t: u32, u: u32, eta: Option<f64>, q_max: u64, rho: RhoSource, budget: &Budget) -> Result<Self> {
        let s = t + u;
        if u > 0 && !eta.is_some_and(|e| e > 0.0 && e <= 1.0) {
            return Err(LabError::invalid("u > 0 needs eta in (0, 1]"));
        }
        let table = SingularSeriesTable::new(k, s, q_max, budget)?;
        Ok(MainTermModel {
            k,
            t,
            u,
            eta,
            rho,
            table,
            gamma: gamma_factor(k, s),
        })
    }

    pub fn parts(&self, n: u64, budget: &Budget) -> Result<MainTermParts> {
        let s = self.t + self.u;
        let rho = match (self.u, self.eta) {
            (0, _) | (_, None) => 1.0,
            (_, Some(eta)) => self.rho.rho(n, self.k, eta, budget)?,
        };
        let rho_factor = rho.powi(self.u as i32);
        let sing_series = self.table.value(n)?;
        let power = (n as f64).powf(s as f64 / self.k as f64 - 1.0);
        Ok(MainTermParts {
            n,
            k: self.k,
            t: self.t,
            u: self.u,
            rho_factor,
            sing_series,
            gamma_factor: self.gamma,
            power,
            prediction: rho_factor * sing_series * self.gamma * power,
        })
    }
}

/// `rho^u S(n; Q) Gamma(1 + 1/k)^s / Gamma(s/k) n^{s/k - 1}`.
#[allow(clippy::too_many_arguments)]
pub fn main_term(
    n: u64,
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    q_max: u64,
    rho: RhoSource,
    budget: &Budget,
) -> Result<MainTermParts> {
    MainTermModel::new(k, t, u, eta, q_max, rho, budget)?.parts(n, budget)
}

/// Exact `R(n)` against the main term over a range of `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub k: u32,
    pub t: u32,
    pub u: u32,
    pub eta: Option<f64>,
    pub q_max: u64,
    pub rho: RhoSource,
    pub lo: u64,
    pub hi: u64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points: Vec<AsymptoticPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub n: u64,
    pub exact: String,
    pub predicted: f64,
    pub ratio: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn asymptotic_comparison(
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    lo: u64,
    hi: u64,
    q_max: u64,
    rho: RhoSource,
    budget: &Budget,
) -> Result<AsymptoticReport> {
    let model = MainTermModel::new(k, t, u, eta, q_max, rho, budget)?;
    let exact = rep_counts_range(k, t, u, eta, lo, hi, budget)?;
    let points: Vec<AsymptoticPoint> = exact
        .par_iter()
        .map(|(n, r)| {
            let parts = model.parts(*n, budget)?;
            let r_f = r.to_f64().unwrap_or(f64::INFINITY);
            Ok(AsymptoticPoint {
                n: *n,
                exact: r.to_string(),
                predicted: parts.prediction,
                ratio: r_f / parts.prediction,
            })
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = points.iter().map(|p| p.ratio).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(AsymptoticReport {
        k,
        t,
        u,
        eta,
        q_max,
        rho,
        lo,
        hi,
        mean_ratio,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        points,
    })
}

/// Extremes of `S(n; Q)` over a range of `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub k: u32,
    pub s: u32,
    pub q_max: u64,
    pub lo: u64,
    pub hi: u64,
    pub min: f64,
    pub argmin: u64,
    pub max: f64,
    pub argmax: u64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

pub const POSITIVITY_LOWER: f64 = 0.05;
pub const POSITIVITY_UPPER: f64 = 20.0;

pub fn positivity_check(lo: u64, hi: u64, k: u32, s: u32, q_max: u64, budget: &Budget) -> Result<PositivityReport> {
    if lo > hi {
        return Err(LabError::invalid(format!("empty range {lo}..={hi}")));
    }
    let table = SingularSeriesTable::new(k, s, q_max, budget)?;
    let values = singular_series_values(&table, lo, hi)?;
    let (mut min, mut argmin, mut max, mut argmax) = (f64::INFINITY, lo, f64::NEG_INFINITY, lo);
    for &(n, v) in &values {
        if v < min {
            (min, argmin) = (v, n);
        }
        if v > max {
            (max, argmax) = (v, n);
        }
    }
    Ok(PositivityReport {
        k,
        s,
        q_max,
        lo,
        hi,
        min,
        argmin,
        max,
        argmax,
        lower: POSITIVITY_LOWER,
        upper: POSITIVITY_UPPER,
        pass: min > POSITIVITY_LOWER && max < POSITIVITY_UPPER,
    })
}

/// `(n, S(n; Q))` for `n` in `[lo, hi]`, in order.
pub fn singular_series_values(table: &SingularSeriesTable, lo: u64, hi: u64) -> Result<Vec<(u64, f64)>> {
    (lo..=hi)
        .into_par_iter()
        .map(|n| table.value(n).map(|v| (n, v)))
        .collect()
}
