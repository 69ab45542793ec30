//! Built-in exponent table for `7 <= k <= 16`.

use super::{ExponentRow, Lambda};

/// `(k, w, lambda_w, lambda_{w+1}, t, u, delta^-1, r, [U], H)` with the
/// lambdas scaled by `10^7`.
#[allow(clippy::type_complexity)]
const ROWS: [(u32, u32, i64, i64, u32, u32, u64, u32, u64, u32); 10] = [
    (7, 14, 211_139_297, 230_528_848, 5, 26, 1267, 17, 47, 31),
    (8, 18, 280_833_353, 300_473_193, 5, 34, 1111, 21, 58, 39),
    (9, 21, 331_033_373, 350_727_119, 7, 40, 534, 25, 86, 47),
    (10, 25, 400_895_832, 420_677_228, 9, 46, 1792, 30, 128, 55),
    (11, 27, 431_274_069, 451_020_502, 13, 50, 2959, 34, 375, 63),
    (12, 32, 520_919_461, 540_752_481, 13, 59, 546, 38, 314, 72),
    (13, 36, 590_849_135, 610_698_015, 13, 68, 823, 42, 289, 81),
    (14, 40, 660_795_485, 680_657_585, 14, 76, 620, 46, 342, 90),
    (15, 44, 730_747_403, 750_620_643, 16, 83, 417, 50, 525, 99),
    (16, 47, 780_829_008, 800_711_728, 19, 89, 519, 55, 1780, 108),
];

/// Upper bounds `H(k)` for `k = 7..=16`.
pub const H_BOUNDS: [(u32, u32); 10] = [
    (7, 31),
    (8, 39),
    (9, 47),
    (10, 55),
    (11, 63),
    (12, 72),
    (13, 81),
    (14, 90),
    (15, 99),
    (16, 108),
];

pub fn builtin_rows() -> Vec<ExponentRow> {
    ROWS.iter()
        .map(|&(k, w, lw, lw1, t, u, delta_inv, r, u_floor, h)| ExponentRow {
            k,
            w,
            lambda_w: Lambda::from_scaled(lw),
            lambda_w1: Lambda::from_scaled(lw1),
            t,
            u,
            delta_inv,
            r,
            u_floor,
            h,
        })
        .collect()
}

pub fn builtin_row(k: u32) -> Option<ExponentRow> {
    builtin_rows().into_iter().find(|r| r.k == k)
}

pub fn h_bound(k: u32) -> Option<u32> {
    H_BOUNDS.iter().find(|(kk, _)| *kk == k).map(|&(_, h)| h)
}
