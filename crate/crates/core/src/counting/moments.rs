//! Moment reports that bridge exact counts and the analytic side.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{even_moment, power_series, serde_big};
use crate::arcs::major_arcs;
use crate::arith::unit_roots;
use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::expsums::{Frequency, Overflow, PowerTable};
use crate::ledger::{holder_weights, ExponentRow};
use crate::quadrature::gl16;
use crate::smooth::{smooth_bound, smooth_members};

/// Natural logarithm of a big integer, `-inf` at zero.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Split of `int_0^1 |f|^w` into major and minor parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinorArcReport {
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub w: u32,
    pub grid: u64,
    /// `int_0^1 |f|^w`, exact.
    #[serde(serialize_with = "serde_big::serialize")]
    pub exact_moment: BigUint,
    /// Quadrature of `|f|^w` over the major arcs.
    pub major: f64,
    /// `exact - major`.
    pub minor_estimate: f64,
    /// Quadrature of `|f|^w` over the minor arcs, when requested.
    pub minor_direct: Option<f64>,
    /// `|major + minor_direct - exact| / exact`.
    pub split_error: Option<f64>,
    /// `P^{w-k-1}`.
    pub reference_scale: f64,
    /// `minor_estimate / reference_scale`.
    pub ratio: f64,
}

type Intervals = Vec<(f64, f64)>;

/// Merged major-arc intervals and the complementary gaps in `[0, 1]`.
fn split_unit_interval(k: u32, p: f64, budget: &Budget) -> Result<(Intervals, Intervals)> {
    let mut iv = major_arcs(k, p, budget)?.intervals();
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut major: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match major.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => major.push((a, b)),
        }
    }
    let mut minor = Vec::new();
    let mut left = 0.0;
    for &(a, b) in &major {
        if a > left {
            minor.push((left, a));
        }
        left = b;
    }
    if left < 1.0 {
        minor.push((left, 1.0));
    }
    Ok((major, minor))
}

/// Gauss rule over each interval split into panels of width at most `1/grid`.
fn integrate(pieces: &[(f64, f64)], grid: u64, f: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    let panels: Vec<(f64, f64)> = pieces
        .iter()
        .flat_map(|&(a, b)| {
            let n = ((b - a) * grid as f64).ceil().max(1.0) as u64;
            let h = (b - a) / n as f64;
            (0..n).map(move |i| (a + i as f64 * h, a + (i + 1) as f64 * h))
        })
        .collect();
    let parts: Vec<f64> = panels.par_iter().map(|&(a, b)| gl16().integrate(a, b, f)).collect();
    parts.iter().sum()
}

fn panel_count(pieces: &[(f64, f64)], grid: u64) -> u128 {
    pieces
        .iter()
        .map(|&(a, b)| ((b - a) * grid as f64).ceil().max(1.0) as u128)
        .sum()
}

/// Major/minor split of the `w`-th moment of the classical Weyl sum.
///
/// Report only: the exact full moment comes from [`even_moment`], the major
/// part from quadrature, and the minor part is their difference. With
/// `direct_minor` the minor arcs are also integrated directly as a check.
pub fn minor_arc_moment(
    k: u32,
    p: f64,
    w: u32,
    grid: u64,
    direct_minor: bool,
    budget: &Budget,
) -> Result<MinorArcReport> {
    if w == 0 || !w.is_multiple_of(2) {
        return Err(LabError::invalid(format!(
            "w must be a positive even integer (got {w})"
        )));
    }
    if grid == 0 {
        return Err(LabError::invalid("grid must be positive"));
    }
    let series = power_series(k, p, None, budget)?;
    let exact_moment = even_moment(&series, w / 2, budget)?;
    let table = PowerTable::classical(k, p, Overflow::BigInt)?;
    let half = (w / 2) as i32;
    let integrand = |alpha: f64| table.sum(Frequency::real(alpha)).norm_sqr().powi(half);

    let (major_iv, minor_iv) = split_unit_interval(k, p, budget)?;
    let mut panels = panel_count(&major_iv, grid);
    if direct_minor {
        panels += panel_count(&minor_iv, grid);
    }
    budget.check_panels("minor-arc moment quadrature", panels)?;

    let major = integrate(&major_iv, grid, &integrand);
    let exact = exact_moment.to_f64().unwrap_or(f64::INFINITY);
    let minor_estimate = exact - major;
    let minor_direct = direct_minor.then(|| integrate(&minor_iv, grid, &integrand));
    let split_error = minor_direct.map(|m| (major + m - exact).abs() / exact);
    let reference_scale = p.powf(w as f64 - k as f64 - 1.0);
    Ok(MinorArcReport {
        k,
        p,
        w,
        grid,
        exact_moment,
        major,
        minor_estimate,
        minor_direct,
        split_error,
        reference_scale,
        ratio: minor_estimate / reference_scale,
    })
}

/// Numeric Hölder check for the weights of an exponent row on a tiny instance.
///
/// All integrals are means over the grid `j/Q`. `Q` exceeds the degree of
/// every even power involved, so the three moments on the right are exact
/// (and are compared against [`even_moment`]); the inequality itself is
/// Hölder's for the uniform measure on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderCheck {
    /// `k` of the row supplying the weights.
    pub row_k: u32,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub eta: f64,
    pub grid: u64,
    pub omega: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// `ln` of the mean of `|f|^t |g|^u`.
    pub log_lhs: f64,
    /// `omega ln M_f + phi1 ln M_w + phi2 ln M_{w+1}`.
    pub log_rhs: f64,
    /// Exact moments of orders `k(k+1)`, `2w`, `2w + 2`.
    pub moments: [String; 3],
    /// Largest relative gap between a grid moment and its exact value.
    pub bridge_error: f64,
    pub holds: bool,
}

/// Log-mean of `exp(values)`.
fn log_mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = v.iter().map(|&x| (x - m).exp()).sum();
    m + (s / v.len() as f64).ln()
}

pub fn holder_check(row: &ExponentRow, k: u32, p: f64, eta: f64, budget: &Budget) -> Result<HolderCheck> {
    let weights = holder_weights(row.k, row.t, row.u, row.w)?;
    if !weights.is_nonnegative() {
        return Err(LabError::IllPosed("negative Hölder weight".into()));
    }
    let to_f = |r: &num_rational::BigRational| r.to_f64().expect("finite weight");
    let (omega, phi1, phi2) = (to_f(&weights.omega), to_f(&weights.phi1), to_f(&weights.phi2));

    let s1 = row.k * (row.k + 1) / 2;
    let f_series = power_series(k, p, None, budget)?;
    let g_series = power_series(k, p, Some(eta), budget)?;
    let exact = [
        even_moment(&f_series, s1, budget)?,
        even_moment(&g_series, row.w, budget)?,
        even_moment(&g_series, row.w + 1, budget)?,
    ];

    let f_table = PowerTable::classical(k, p, Overflow::Error)?;
    let g_bases = smooth_members(p.floor() as u64, smooth_bound(p, eta), budget)?;
    let g_table = PowerTable::new(k, g_bases, Overflow::Error)?;
    let deg_f = f_series.max_index() as u64;
    let deg_g = g_series.max_index() as u64;
    let grid = (s1 as u64 * deg_f).max((row.w as u64 + 1) * deg_g) + 1;
    budget.check_cells("Hölder grid", grid as u128)?;
    let roots = unit_roots(grid);
    let logs: Vec<(f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|j| {
            (
                f_table.sum_at_root(j, &roots).norm().ln(),
                g_table.sum_at_root(j, &roots).norm().ln(),
            )
        })
        .collect();

    let (t, u) = (row.t as f64, row.u as f64);
    let log_lhs = log_mean(logs.iter().map(|&(lf, lg)| t * lf + u * lg));
    let grid_moments = [
        log_mean(logs.iter().map(|&(lf, _)| 2.0 * s1 as f64 * lf)),
        log_mean(logs.iter().map(|&(_, lg)| 2.0 * row.w as f64 * lg)),
        log_mean(logs.iter().map(|&(_, lg)| 2.0 * (row.w + 1) as f64 * lg)),
    ];
    let exact_logs = [ln_big(&exact[0]), ln_big(&exact[1]), ln_big(&exact[2])];
    let bridge_error = grid_moments
        .iter()
        .zip(&exact_logs)
        .map(|(g, e)| (g - e).exp_m1().abs())
        .fold(0.0, f64::max);
    let log_rhs = omega * exact_logs[0] + phi1 * exact_logs[1] + phi2 * exact_logs[2];
    Ok(HolderCheck {
        row_k: row.k,
        k,
        p,
        eta,
        grid,
        omega,
        phi1,
        phi2,
        log_lhs,
        log_rhs,
        moments: exact.map(|m| m.to_string()),
        bridge_error,
        holds: log_lhs <= log_rhs + 1e-9 * log_rhs.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::builtin_rows;

    #[test]
    fn ln_big_matches_f64() {
        for x in [1u64, 2, 1000, u64::MAX] {
            assert!((ln_big(&BigUint::from(x)) - (x as f64).ln()).abs() < 1e-12);
        }
        let big = BigUint::from(3u32).pow(1000);
        assert!((ln_big(&big) - 1000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(ln_big(&BigUint::default()), f64::NEG_INFINITY);
    }

    #[test]
    fn second_moment_is_floor_p() {
        let r = minor_arc_moment(3, 12.0, 2, 4 * 1728, true, &Budget::default()).unwrap();
        assert_eq!(r.exact_moment, BigUint::from(12u32));
        assert!(r.minor_estimate <= 12.0);
        assert!(r.split_error.unwrap() < 1e-10);
    }

    #[test]
    fn split_consistency_k2_p20_w8() {
        let r = minor_arc_moment(2, 20.0, 8, 4 * 4 * 400, true, &Budget::default()).unwrap();
        let exact = r.exact_moment.to_f64().unwrap();
        assert!(r.split_error.unwrap() < 5e-3, "{r:?}");
        assert!((r.major + r.minor_direct.unwrap() - exact).abs() / exact < 5e-3);
        assert!(r.minor_estimate > 0.0);
    }

    #[test]
    fn odd_w_rejected() {
        assert!(minor_arc_moment(2, 10.0, 3, 100, false, &Budget::default()).is_err());
    }

    #[test]
    fn holder_holds_for_every_row() {
        let b = Budget::default();
        for row in builtin_rows() {
            for (k, p, eta) in [(2u32, 3.0, 0.7), (2, 4.0, 0.8), (3, 3.0, 0.7)] {
                let h = holder_check(&row, k, p, eta, &b).unwrap();
                assert!(h.holds, "{h:?}");
                assert!(h.bridge_error < 1e-9, "{h:?}");
            }
        }
    }
}
