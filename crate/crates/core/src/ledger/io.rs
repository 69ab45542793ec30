//! Row override files and certificate rendering.
//!
//! Override files are comma-separated with the header
//! `k,w,lambda_w,lambda_w1,t,u,delta_inv,r,U_floor,H`; lambdas are decimal
//! literals with at most seven fractional digits and are parsed exactly.

use serde::Deserialize;
use std::fmt::Write as _;

use super::rational::{to_decimal, to_fraction};
use super::{ExponentRow, Lambda, RowCertificate};
use crate::error::{LabError, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    k: u32,
    w: u32,
    lambda_w: String,
    lambda_w1: String,
    t: u32,
    u: u32,
    delta_inv: u64,
    r: u32,
    #[serde(rename = "U_floor")]
    u_floor: u64,
    #[serde(rename = "H")]
    h: u32,
}

pub fn parse_rows(text: &str) -> Result<Vec<ExponentRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<RawRow>().enumerate() {
        let raw = rec.map_err(|e| LabError::Parse(format!("record {}: {e}", i + 1)))?;
        let row = ExponentRow {
            k: raw.k,
            w: raw.w,
            lambda_w: Lambda::parse(&raw.lambda_w)?,
            lambda_w1: Lambda::parse(&raw.lambda_w1)?,
            t: raw.t,
            u: raw.u,
            delta_inv: raw.delta_inv,
            r: raw.r,
            u_floor: raw.u_floor,
            h: raw.h,
        };
        row.validate()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(LabError::Parse("no rows in override file".into()));
    }
    Ok(rows)
}

pub fn certificates_to_json_lines(certs: &[RowCertificate]) -> String {
    let mut out = String::new();
    for c in certs {
        out.push_str(&serde_json::to_string(c).expect("certificate serializes"));
        out.push('\n');
    }
    out
}

/// Aligned text table, one line per certificate.
pub fn render_certificate_table(certs: &[RowCertificate]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} {:>3} {:>3} {:>3} {:>4} {:>10} {:>14} {:>6} {:>6} {:>9} {:>7}  {:<6} status",
        "k", "w", "t", "u", "H", "omega", "Delta", "1/del", "min", "U", "[U]", "checks"
    );
    for c in certs {
        let r = &c.row;
        let (omega, margin) = match &c.margin {
            Some(m) => (to_fraction(&m.weights.omega), to_decimal(&m.margin, 10)),
            None => ("-".into(), "-".into()),
        };
        let u = c
            .u_exponent
            .as_ref()
            .map(|ue| to_decimal(&ue.value, 3))
            .unwrap_or_else(|| "-".into());
        let checks: String = c
            .checks
            .iter()
            .map(|ch| {
                if ch.pass {
                    ch.id.letter()
                } else {
                    ch.id.letter().to_ascii_uppercase()
                }
            })
            .collect();
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:>3} {:>3} {:>4} {:>10} {:>14} {:>6} {:>6} {:>9} {:>7}  {:<6} {}",
            r.k,
            r.w,
            r.t,
            r.u,
            r.t + r.u,
            omega,
            margin,
            r.delta_inv,
            c.minimal_delta_inv.map_or("-".into(), |d| d.to_string()),
            u,
            r.u_floor,
            checks,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{builtin_rows, verify_rows};

    const HEADER: &str = "k,w,lambda_w,lambda_w1,t,u,delta_inv,r,U_floor,H\n";

    #[test]
    fn parses_builtin_equivalent() {
        let text = format!("{HEADER}# comment\n7, 14, 21.1139297, 23.0528848, 5, 26, 1267, 17, 47, 31\n");
        let rows = parse_rows(&text).unwrap();
        assert_eq!(rows, vec![builtin_rows()[0].clone()]);
    }

    #[test]
    fn rejects_inexact_or_malformed() {
        let too_precise = format!("{HEADER}7,14,21.11392971,23.0528848,5,26,1267,17,47,31\n");
        assert!(parse_rows(&too_precise).is_err());
        let bad_k = format!("{HEADER}5,14,21.1139297,23.0528848,5,26,1267,17,47,31\n");
        assert!(parse_rows(&bad_k).is_err());
        assert!(parse_rows(HEADER).is_err());
        assert!(parse_rows("k,w\n7,14\n").is_err());
    }

    #[test]
    fn renders_table_and_json() {
        let certs = verify_rows(&builtin_rows());
        let table = render_certificate_table(&certs);
        assert_eq!(table.lines().count(), 11);
        assert!(table.lines().skip(1).all(|l| l.ends_with("PASS")));
        let json = certificates_to_json_lines(&certs);
        let first: serde_json::Value = serde_json::from_str(json.lines().next().unwrap()).unwrap();
        assert_eq!(first["row"]["k"], 7);
        assert_eq!(first["row"]["lambda_w"], "21.1139297");
        assert_eq!(first["margin"]["weights"]["omega"], "5/56");
        assert_eq!(first["pass"], true);
    }
}
