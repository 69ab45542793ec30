//! Exact certification of the exponent bookkeeping behind `G(k) <= H(k)`.
//!
//! Each [`ExponentRow`] records a choice `(k, w, t, u)` together with the
//! permissible exponents `lambda_{w,k}`, `lambda_{w+1,k}`. The minor-arc
//! integral of `|f^t g^u|` is split by Hölder's inequality into a classical
//! moment of order `k(k+1)` and two smooth moments of orders `2w` and `2w+2`
//! with weights `omega`, `phi1`, `phi2`; the row is sound when the resulting
//! power saving `Delta` is below `-1/delta_inv`. The major-arc pruning step
//! additionally needs `t < k + 4` and `U = u / (1 - t/(k+4)) > 2r`.
//!
//! Everything here is exact rational arithmetic. There is no floating point
//! in this module.

mod io;
pub mod rational;
mod table;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

use crate::error::{LabError, Result};
pub use io::{certificates_to_json_lines, parse_rows, render_certificate_table};
use rational::{floor, int, ratio, serde_rational, Rational};
pub use table::{builtin_row, builtin_rows, h_bound, H_BOUNDS};

/// A permissible exponent, stored exactly as an integer multiple of `10^-7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda(i64);

impl Lambda {
    pub const SCALE_DIGITS: u32 = 7;
    pub const SCALE: i64 = 10_000_000;

    pub const fn from_scaled(scaled: i64) -> Self {
        Lambda(scaled)
    }

    pub fn parse(s: &str) -> Result<Self> {
        rational::parse_scaled_decimal(s, Self::SCALE_DIGITS).map(Lambda)
    }

    pub fn scaled(self) -> i64 {
        self.0
    }

    pub fn to_rational(self) -> Rational {
        ratio(self.0, Self::SCALE)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:07}", a / Self::SCALE as u64, a % Self::SCALE as u64)
    }
}

impl Serialize for Lambda {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One row of the exponent table plus its `H(k)` bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentRow {
    pub k: u32,
    pub w: u32,
    pub lambda_w: Lambda,
    pub lambda_w1: Lambda,
    pub t: u32,
    pub u: u32,
    pub delta_inv: u64,
    pub r: u32,
    #[serde(rename = "U_floor")]
    pub u_floor: u64,
    #[serde(rename = "H")]
    pub h: u32,
}

/// Fields of an [`ExponentRow`], used to drive mutation testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowField {
    K,
    W,
    LambdaW,
    LambdaW1,
    T,
    U,
    DeltaInv,
    R,
    UFloor,
    H,
}

impl RowField {
    pub const ALL: [RowField; 10] = [
        RowField::K,
        RowField::W,
        RowField::LambdaW,
        RowField::LambdaW1,
        RowField::T,
        RowField::U,
        RowField::DeltaInv,
        RowField::R,
        RowField::UFloor,
        RowField::H,
    ];
}

impl ExponentRow {
    /// Range checks on the stored fields. `H = t + u` is deliberately not
    /// enforced here; it is check (a) of [`verify_row`].
    pub fn validate(&self) -> Result<()> {
        if !(7..=16).contains(&self.k) {
            return Err(LabError::invalid(format!("k = {} outside 7..=16", self.k)));
        }
        if self.t == 0 || self.u == 0 || self.w == 0 || self.r == 0 || self.delta_inv == 0 {
            return Err(LabError::invalid(format!(
                "row k = {}: t, u, w, r and delta_inv must be positive",
                self.k
            )));
        }
        Ok(())
    }

    /// Returns a copy with one datum perturbed in a direction the
    /// certificate is sensitive to.
    ///
    /// Integers move by one, except `delta_inv` which moves down (a larger
    /// `delta_inv` only weakens the claim) and `r` which jumps past `U/2`.
    /// Lambdas are inflated by `1/100`.
    pub fn mutated(&self, field: RowField) -> ExponentRow {
        let mut m = self.clone();
        match field {
            RowField::K => m.k += 1,
            RowField::W => m.w += 1,
            RowField::LambdaW => m.lambda_w = Lambda(m.lambda_w.0 + Lambda::SCALE / 100),
            RowField::LambdaW1 => m.lambda_w1 = Lambda(m.lambda_w1.0 + Lambda::SCALE / 100),
            RowField::T => m.t += 1,
            RowField::U => m.u += 1,
            RowField::DeltaInv => m.delta_inv = m.delta_inv.saturating_sub(1).max(1),
            RowField::R => m.r = (m.u_floor / 2 + 1) as u32,
            RowField::UFloor => m.u_floor += 1,
            RowField::H => m.h += 1,
        }
        m
    }
}

/// Hölder weights for splitting `|f|^t |g|^u` into moments of orders
/// `k(k+1)`, `2w` and `2w+2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolderWeights {
    #[serde(with = "serde_rational")]
    pub omega: Rational,
    #[serde(with = "serde_rational")]
    pub phi1: Rational,
    #[serde(with = "serde_rational")]
    pub phi2: Rational,
}

impl HolderWeights {
    pub fn is_nonnegative(&self) -> bool {
        !self.omega.is_negative() && !self.phi1.is_negative() && !self.phi2.is_negative()
    }

    pub fn total(&self) -> Rational {
        &self.omega + &self.phi1 + &self.phi2
    }
}

/// `omega = t/(k(k+1))`, `phi1 = (1-omega)(w+1) - u/2`, `phi2 = u/2 - (1-omega)w`.
///
/// Nonnegativity is not enforced; see [`verify_row`].
pub fn holder_weights(k: u32, t: u32, u: u32, w: u32) -> Result<HolderWeights> {
    if k < 2 || u == 0 || w == 0 {
        return Err(LabError::invalid(format!(
            "holder_weights needs k >= 2, u >= 1, w >= 1 (got k={k}, u={u}, w={w})"
        )));
    }
    let kk = k as i64 * (k as i64 + 1);
    let omega = ratio(t as i64, kk);
    let rest = int(1) - &omega;
    let half_u = ratio(u as i64, 2);
    let phi1 = &rest * int(w as i64 + 1) - &half_u;
    let phi2 = half_u - rest * int(w as i64);
    Ok(HolderWeights { omega, phi1, phi2 })
}

/// `w = [u / (2(1 - omega))]`, the moment index the weights are built around.
pub fn derived_w(k: u32, t: u32, u: u32) -> Result<u64> {
    if k < 2 {
        return Err(LabError::invalid(format!("derived_w needs k >= 2 (got {k})")));
    }
    let kk = k as i64 * (k as i64 + 1);
    if t as i64 >= kk {
        return Err(LabError::IllPosed(format!(
            "omega = {t}/{kk} >= 1, no smooth weight remains"
        )));
    }
    let rest = int(1) - ratio(t as i64, kk);
    let x = int(u as i64) / (int(2) * rest);
    floor(&x)
        .to_u64()
        .ok_or_else(|| LabError::IllPosed("derived w does not fit in u64".into()))
}

/// `Delta_w`, `Delta_{w+1}` and the total saving `Delta` for a row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginBreakdown {
    pub weights: HolderWeights,
    #[serde(with = "serde_rational")]
    pub delta_w: Rational,
    #[serde(with = "serde_rational")]
    pub delta_w1: Rational,
    #[serde(with = "serde_rational")]
    pub margin: Rational,
}

/// `Delta_v = lambda_v - 2v + k`.
pub fn excess(lambda: Lambda, v: u32, k: u32) -> Rational {
    lambda.to_rational() - int(2 * v as i64) + int(k as i64)
}

/// `Delta = phi1 Delta_w + phi2 Delta_{w+1} - omega`.
pub fn delta_margin(row: &ExponentRow) -> Result<MarginBreakdown> {
    let weights = holder_weights(row.k, row.t, row.u, row.w)?;
    let delta_w = excess(row.lambda_w, row.w, row.k);
    let delta_w1 = excess(row.lambda_w1, row.w + 1, row.k);
    let margin = &weights.phi1 * &delta_w + &weights.phi2 * &delta_w1 - &weights.omega;
    Ok(MarginBreakdown {
        weights,
        delta_w,
        delta_w1,
        margin,
    })
}

/// Least positive `D` with `-1/D > margin`, i.e. `floor(1/(-margin)) + 1`.
pub fn minimal_delta_inv_for(margin: &Rational) -> Result<u64> {
    if !margin.is_negative() {
        return Err(LabError::IllPosed(format!(
            "margin {} is not negative; no saving delta exists",
            rational::to_fraction(margin)
        )));
    }
    let d = floor(&(int(-1) / margin)) + BigInt::from(1);
    d.to_u64()
        .ok_or_else(|| LabError::IllPosed("delta_inv does not fit in u64".into()))
}

pub fn minimal_delta_inv(row: &ExponentRow) -> Result<u64> {
    minimal_delta_inv_for(&delta_margin(row)?.margin)
}

/// `U = u / (1 - t/(k+4))` and its floor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UExponent {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub floor: u64,
}

pub fn u_exponent(row: &ExponentRow) -> Result<UExponent> {
    if row.t >= row.k + 4 {
        return Err(LabError::IllPosed(format!(
            "t = {} >= k + 4 = {}: the pruning split has no smooth exponent",
            row.t,
            row.k + 4
        )));
    }
    let value = int(row.u as i64) / (int(1) - ratio(row.t as i64, row.k as i64 + 4));
    let floor = floor(&value)
        .to_u64()
        .ok_or_else(|| LabError::IllPosed("U does not fit in u64".into()))?;
    Ok(UExponent { value, floor })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckId {
    /// (a) `H = t + u` and `H` agrees with the `H(k)` table.
    HMatchesBound,
    /// (b) `w` equals the derived `[u / (2(1 - omega))]`.
    WMatchesDerived,
    /// (c) `phi1 >= 0` and `phi2 >= 0`.
    WeightsNonnegative,
    /// (d) `Delta < -1/delta_inv`.
    MarginBelowDelta,
    /// (e) `t < k + 4`.
    TBelowKPlus4,
    /// (f) `[U]` matches and `U > 2r`.
    UColumn,
}

impl CheckId {
    pub fn letter(self) -> char {
        match self {
            CheckId::HMatchesBound => 'a',
            CheckId::WMatchesDerived => 'b',
            CheckId::WeightsNonnegative => 'c',
            CheckId::MarginBelowDelta => 'd',
            CheckId::TBelowKPlus4 => 'e',
            CheckId::UColumn => 'f',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: CheckId,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of [`verify_row`]: every check plus every intermediate rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCertificate {
    pub row: ExponentRow,
    pub checks: Vec<Check>,
    pub margin: Option<MarginBreakdown>,
    pub derived_w: Option<u64>,
    pub u_exponent: Option<UExponent>,
    pub minimal_delta_inv: Option<u64>,
    /// Soft report: whether `delta_inv` is the least admissible value. Never
    /// affects `pass`.
    pub delta_inv_is_minimal: Option<bool>,
    pub pass: bool,
}

impl RowCertificate {
    pub fn check(&self, id: CheckId) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn verify_row(row: &ExponentRow) -> RowCertificate {
    let mut checks = Vec::with_capacity(6);
    let mut push = |id, pass, detail: String| checks.push(Check { id, pass, detail });

    let sum = row.t + row.u;
    let table_h = h_bound(row.k);
    push(
        CheckId::HMatchesBound,
        sum == row.h && table_h == Some(row.h),
        format!("t+u = {sum}, H = {}, table H(k) = {table_h:?}", row.h),
    );

    let derived = derived_w(row.k, row.t, row.u);
    push(
        CheckId::WMatchesDerived,
        matches!(derived, Ok(d) if d == row.w as u64),
        match &derived {
            Ok(d) => format!("w = {}, derived = {d}", row.w),
            Err(e) => format!("w = {}, derived: {e}", row.w),
        },
    );

    let margin = delta_margin(row).ok();
    match &margin {
        Some(m) => {
            push(
                CheckId::WeightsNonnegative,
                m.weights.is_nonnegative(),
                format!(
                    "phi1 = {}, phi2 = {}",
                    rational::to_fraction(&m.weights.phi1),
                    rational::to_fraction(&m.weights.phi2)
                ),
            );
            let bound = ratio(-1, row.delta_inv as i64);
            push(
                CheckId::MarginBelowDelta,
                m.margin < bound,
                format!(
                    "Delta = {} vs -1/{}",
                    rational::to_decimal(&m.margin, 10),
                    row.delta_inv
                ),
            );
        }
        None => {
            push(CheckId::WeightsNonnegative, false, "weights undefined".into());
            push(CheckId::MarginBelowDelta, false, "margin undefined".into());
        }
    }

    push(
        CheckId::TBelowKPlus4,
        row.t < row.k + 4,
        format!("t = {}, k + 4 = {}", row.t, row.k + 4),
    );

    let u_exp = u_exponent(row).ok();
    match &u_exp {
        Some(ue) => {
            let two_r = int(2 * row.r as i64);
            push(
                CheckId::UColumn,
                ue.floor == row.u_floor && ue.value > two_r,
                format!(
                    "U = {}, [U] = {} vs table {}, 2r = {}",
                    rational::to_fraction(&ue.value),
                    ue.floor,
                    row.u_floor,
                    2 * row.r
                ),
            );
        }
        None => push(CheckId::UColumn, false, "U undefined (t >= k + 4)".into()),
    }

    let minimal = margin.as_ref().and_then(|m| minimal_delta_inv_for(&m.margin).ok());
    let delta_inv_is_minimal = margin
        .as_ref()
        .map(|m| row.delta_inv <= 1 || m.margin >= ratio(-1, row.delta_inv as i64 - 1));
    let pass = checks.iter().all(|c| c.pass);
    RowCertificate {
        row: row.clone(),
        checks,
        margin,
        derived_w: derived.ok(),
        u_exponent: u_exp,
        minimal_delta_inv: minimal,
        delta_inv_is_minimal,
        pass,
    }
}

/// Verifies rows independently; the output order follows the input.
pub fn verify_rows(rows: &[ExponentRow]) -> Vec<RowCertificate> {
    rows.par_iter().map(verify_row).collect()
}

/// Certificates for the built-in table.
pub fn verify_all() -> Vec<RowCertificate> {
    verify_rows(&builtin_rows())
}

/// The `(k, t + u)` sequence reproduced from certificates.
pub fn reproduced_bounds(certs: &[RowCertificate]) -> Vec<(u32, u32)> {
    certs.iter().map(|c| (c.row.k, c.row.t + c.row.u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn weights_k7() {
        let hw = holder_weights(7, 5, 26, 14).unwrap();
        assert_eq!(hw.omega, q(5, 56));
        assert_eq!(hw.phi1, q(37, 56));
        assert_eq!(hw.phi2, q(1, 4));
        assert_eq!(hw.total(), int(1));
    }

    #[test]
    fn weights_k16() {
        let hw = holder_weights(16, 19, 89, 47).unwrap();
        assert_eq!(hw.omega, q(19, 272));
        assert_eq!(hw.phi1, q(5, 34));
        assert_eq!(hw.phi2, q(213, 272));
    }

    #[test]
    fn weights_degenerate_t_zero() {
        for (u, w) in [(10u32, 5u32), (7, 3), (30, 2)] {
            let hw = holder_weights(9, 0, u, w).unwrap();
            assert_eq!(hw.omega, int(0));
            assert_eq!(hw.phi1, int(w as i64 + 1) - q(u as i64, 2));
            assert_eq!(hw.phi2, q(u as i64, 2) - int(w as i64));
        }
    }

    #[test]
    fn derived_w_examples() {
        assert_eq!(derived_w(7, 5, 26).unwrap(), 14);
        assert_eq!(derived_w(10, 9, 46).unwrap(), 25);
        assert_eq!(derived_w(16, 19, 89).unwrap(), 47);
        assert!(matches!(derived_w(3, 12, 5), Err(LabError::IllPosed(_))));
    }

    #[test]
    fn margin_k7_and_k12() {
        let m7 = delta_margin(&builtin_row(7).unwrap()).unwrap();
        assert_eq!(rational::to_decimal(&m7.margin, 8), "-0.00078953");
        assert!(m7.margin < q(-1, 1267));
        let m12 = delta_margin(&builtin_row(12).unwrap()).unwrap();
        assert_eq!(rational::to_decimal(&m12.margin, 8), "-0.00183240");
        assert!(m12.margin < q(-1, 546));
    }

    #[test]
    fn margin_collapses_to_minus_omega() {
        let mut row = builtin_row(9).unwrap();
        row.lambda_w = Lambda::from_scaled((2 * row.w as i64 - row.k as i64) * Lambda::SCALE);
        row.lambda_w1 = Lambda::from_scaled((2 * row.w as i64 + 2 - row.k as i64) * Lambda::SCALE);
        let m = delta_margin(&row).unwrap();
        assert_eq!(m.margin, -m.weights.omega.clone());
    }

    #[test]
    fn minimal_delta_inv_examples() {
        assert_eq!(minimal_delta_inv(&builtin_row(7).unwrap()).unwrap(), 1267);
        assert_eq!(minimal_delta_inv(&builtin_row(12).unwrap()).unwrap(), 546);
        assert_eq!(minimal_delta_inv_for(&q(-1, 2)).unwrap(), 3);
        assert!(minimal_delta_inv_for(&int(0)).is_err());
        assert!(minimal_delta_inv_for(&q(1, 7)).is_err());
    }

    #[test]
    fn u_exponent_examples() {
        let u16 = u_exponent(&builtin_row(16).unwrap()).unwrap();
        assert_eq!((u16.value.clone(), u16.floor), (int(1780), 1780));
        let u12 = u_exponent(&builtin_row(12).unwrap()).unwrap();
        assert_eq!((u12.value.clone(), u12.floor), (q(944, 3), 314));
        let u7 = u_exponent(&builtin_row(7).unwrap()).unwrap();
        assert_eq!((u7.value.clone(), u7.floor), (q(286, 6), 47));

        let mut bad = builtin_row(7).unwrap();
        bad.t = 11;
        assert!(matches!(u_exponent(&bad), Err(LabError::IllPosed(_))));
    }

    #[test]
    fn k8_row_passes() {
        let cert = verify_row(&builtin_row(8).unwrap());
        assert!(cert.pass, "{cert:?}");
        assert_eq!(cert.row.t + cert.row.u, 39);
    }

    #[test]
    fn inflated_lambda_fails_margin() {
        let row = builtin_row(7).unwrap().mutated(RowField::LambdaW);
        let cert = verify_row(&row);
        assert!(!cert.pass);
        assert!(!cert.check(CheckId::MarginBelowDelta).unwrap().pass);
    }

    #[test]
    fn u_plus_one_breaks_certificate() {
        // u = 27 still derives w = 14, so the table mismatch shows up in (a)
        // and the margin, not in (b).
        let mut row = builtin_row(7).unwrap();
        row.u = 27;
        let cert = verify_row(&row);
        assert!(!cert.pass);
        assert_eq!(cert.derived_w, Some(14));
        assert!(cert.check(CheckId::WMatchesDerived).unwrap().pass);
        assert!(!cert.check(CheckId::HMatchesBound).unwrap().pass);
    }

    #[test]
    fn all_builtin_rows_pass_and_reproduce_h() {
        let certs = verify_all();
        assert_eq!(certs.len(), 10);
        assert!(certs.iter().all(|c| c.pass));
        let hs: Vec<u32> = reproduced_bounds(&certs).into_iter().map(|(_, h)| h).collect();
        assert_eq!(hs, vec![31, 39, 47, 55, 63, 72, 81, 90, 99, 108]);
        for c in &certs {
            assert_eq!(c.minimal_delta_inv, Some(c.row.delta_inv));
            assert_eq!(c.delta_inv_is_minimal, Some(true));
        }
    }

    #[test]
    fn every_single_mutation_is_caught() {
        for row in builtin_rows() {
            for field in RowField::ALL {
                let cert = verify_row(&row.mutated(field));
                assert!(!cert.pass, "k = {} field {field:?} slipped through", row.k);
            }
        }
    }

    #[test]
    fn lambda_display_roundtrip() {
        let l = Lambda::parse("21.1139297").unwrap();
        assert_eq!(l.to_string(), "21.1139297");
        assert_eq!(Lambda::parse("-0.0000001").unwrap().to_string(), "-0.0000001");
    }
}
