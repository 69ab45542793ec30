//! Hardy–Littlewood dissections of `[0, 1)`.
//!
//! The major arcs are `M(q,a) = { alpha : |q alpha - a| <= P^{1-k} / (2k) }`
//! for `0 <= a <= q <= P`, `gcd(a,q) = 1`; the minor arcs are the complement.
//! The pruned arcs `N(q,a) = { alpha : |alpha - a/q| <= W P^{-k} }` use the
//! much smaller modulus cap `q <= W`.

use serde::Serialize;
use std::fmt::Write as _;

use crate::arith::gcd;
use crate::budget::Budget;
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArcLabel {
    pub q: u64,
    pub a: u64,
}

impl ArcLabel {
    pub fn new(q: u64, a: u64) -> Result<Self> {
        if q == 0 || a > q || gcd(a, q) != 1 {
            return Err(LabError::invalid(format!(
                "arc label needs q >= 1, 0 <= a <= q, gcd(a, q) = 1 (got q={q}, a={a})"
            )));
        }
        Ok(ArcLabel { q, a })
    }

    pub fn center(self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Major,
    Minor,
    Pruned,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub label: ArcLabel,
    pub center: f64,
    pub half_width: f64,
    /// Membership radius in the `|q alpha - a|` scale, i.e. `q * half_width`.
    pub scaled_radius: f64,
}

impl Arc {
    fn new(label: ArcLabel, half_width: f64) -> Self {
        Arc {
            label,
            center: label.center(),
            half_width,
            scaled_radius: label.q as f64 * half_width,
        }
    }

    pub fn contains(&self, alpha: f64) -> bool {
        (self.label.q as f64 * alpha - self.label.a as f64).abs() <= self.scaled_radius
    }

    /// The interval clipped to `[0, 1)`.
    pub fn clipped(&self) -> (f64, f64) {
        (
            (self.center - self.half_width).max(0.0),
            (self.center + self.half_width).min(1.0),
        )
    }
}

/// `P^{1-k} / (2k)`, the major-arc radius in the `|q alpha - a|` scale.
pub fn major_radius(k: u32, p: f64) -> f64 {
    p.powf(1.0 - k as f64) / (2.0 * k as f64)
}

/// `log log P`, the default pruning parameter.
pub fn default_w(p: f64) -> f64 {
    p.ln().ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSet {
    pub kind: ArcKind,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: f64,
    pub w: Option<f64>,
    /// Sorted by center. For [`ArcKind::Minor`] these are the excluded major arcs.
    pub arcs: Vec<Arc>,
    max_half_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Major { q: u64, a: u64 },
    Minor,
}

fn check_kp(k: u32, p: f64) -> Result<()> {
    if k < 2 {
        return Err(LabError::invalid(format!("k must be >= 2 (got {k})")));
    }
    if !(p >= 2.0 && p.is_finite()) {
        return Err(LabError::invalid(format!("P must be >= 2 (got {p})")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(LabError::invalid(format!("alpha must lie in [0, 1) (got {alpha})")));
    }
    Ok(())
}

/// Least `q <= P` with `|q alpha - a| <= P^{1-k}/(2k)` (`a = round(q alpha)`,
/// `gcd(a, q) = 1`), found by exhaustive search.
pub fn classify(alpha: f64, k: u32, p: f64) -> Result<Classification> {
    check_kp(k, p)?;
    check_alpha(alpha)?;
    let radius = major_radius(k, p);
    for q in 1..=p.floor() as u64 {
        let a = (q as f64 * alpha).round();
        if (q as f64 * alpha - a).abs() <= radius && gcd(a as u64, q) == 1 {
            return Ok(Classification::Major { q, a: a as u64 });
        }
    }
    Ok(Classification::Minor)
}

/// Same result as [`classify`], scanning only continued-fraction convergents
/// of `alpha`. The least admissible `q` is always a convergent denominator.
pub fn classify_fast(alpha: f64, k: u32, p: f64) -> Result<Classification> {
    check_kp(k, p)?;
    check_alpha(alpha)?;
    let radius = major_radius(k, p);
    let cap = p.floor() as u64;
    for (a, q) in convergents(alpha) {
        if q > cap as u128 {
            break;
        }
        let (a, q) = (a as u64, q as u64);
        if (q as f64 * alpha - a as f64).abs() <= radius {
            return Ok(Classification::Major { q, a });
        }
    }
    Ok(Classification::Minor)
}

/// Convergents `(p_n, q_n)` of `alpha` in `[0, 1)`, taken as the dyadic
/// rational `floor(alpha 2^64) / 2^64` (exact for `alpha >= 2^-11`).
fn convergents(alpha: f64) -> Vec<(u128, u128)> {
    let num = (alpha * 18446744073709551616.0) as u128;
    let mut out = vec![(0u128, 1u128)];
    if num == 0 {
        return out;
    }
    // a_0 = 0; the remaining partial quotients expand 2^64 / num.
    let (mut x, mut y) = (1u128 << 64, num);
    let (mut p0, mut q0, mut p1, mut q1) = (1u128, 0u128, 0u128, 1u128);
    while y != 0 {
        let t = x / y;
        let (p2, q2) = (t * p1 + p0, t * q1 + q0);
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (x, y) = (y, x % y);
    }
    out
}

fn coprime_labels(max_q: u64) -> impl Iterator<Item = ArcLabel> {
    (1..=max_q).flat_map(|q| {
        let range = if q == 1 { 0..=1 } else { 1..=q - 1 };
        range.filter(move |&a| gcd(a, q) == 1).map(move |a| ArcLabel { q, a })
    })
}

fn label_count(max_q: u64) -> u128 {
    // Upper bound 1 + sum_{q<=Q} (q - 1) + 1, cheap and safe for the budget check.
    let q = max_q as u128;
    q * (q + 1) / 2 + 1
}

fn build(kind: ArcKind, k: u32, p: f64, w: Option<f64>, max_q: u64, half_width: impl Fn(u64) -> f64) -> ArcSet {
    let mut arcs: Vec<Arc> = coprime_labels(max_q).map(|l| Arc::new(l, half_width(l.q))).collect();
    arcs.sort_by(|x, y| (x.label.a as u128 * y.label.q as u128).cmp(&(y.label.a as u128 * x.label.q as u128)));
    let max_half_width = arcs.iter().map(|a| a.half_width).fold(0.0, f64::max);
    ArcSet {
        kind,
        k,
        p,
        w,
        arcs,
        max_half_width,
    }
}

/// All major arcs `M(q,a)`, `0 <= a <= q <= P`.
pub fn major_arcs(k: u32, p: f64, budget: &Budget) -> Result<ArcSet> {
    check_kp(k, p)?;
    let max_q = p.floor() as u64;
    budget.check_arcs("major arcs", label_count(max_q))?;
    let radius = major_radius(k, p);
    Ok(build(ArcKind::Major, k, p, None, max_q, |q| radius / q as f64))
}

/// The minor arcs, represented by the major arcs they exclude.
pub fn minor_arcs(k: u32, p: f64, budget: &Budget) -> Result<ArcSet> {
    let mut set = major_arcs(k, p, budget)?;
    set.kind = ArcKind::Minor;
    Ok(set)
}

/// Pruned arcs `N(q,a)` with `q <= W`, half-width `W P^{-k}`.
pub fn pruned_arcs(k: u32, p: f64, w: f64, budget: &Budget) -> Result<ArcSet> {
    check_kp(k, p)?;
    if !(w >= 1.0 && w.is_finite()) {
        return Err(LabError::invalid(format!("W must be >= 1 (got {w})")));
    }
    let max_q = w.floor() as u64;
    budget.check_arcs("pruned arcs", label_count(max_q))?;
    let hw = w * p.powf(-(k as f64));
    Ok(build(ArcKind::Pruned, k, p, Some(w), max_q, |_| hw))
}

impl ArcSet {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = ArcLabel> + '_ {
        self.arcs.iter().map(|a| a.label)
    }

    /// The listed arc containing `alpha`, if any (least `q` on overlaps).
    pub fn arc_containing(&self, alpha: f64) -> Option<&Arc> {
        let lo = alpha - self.max_half_width;
        let hi = alpha + self.max_half_width;
        let start = self.arcs.partition_point(|a| a.center < lo);
        self.arcs[start..]
            .iter()
            .take_while(|a| a.center <= hi)
            .filter(|a| a.contains(alpha))
            .min_by_key(|a| a.label.q)
    }

    pub fn contains(&self, alpha: f64) -> bool {
        let hit = self.arc_containing(alpha).is_some();
        match self.kind {
            ArcKind::Minor => !hit,
            _ => hit,
        }
    }

    /// Clipped intervals of the listed arcs, in center order.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.arcs.iter().map(Arc::clipped).collect()
    }

    /// Lebesgue measure; overlapping arcs are merged before summing.
    pub fn measure(&self) -> f64 {
        let listed = union_length(self.intervals());
        match self.kind {
            ArcKind::Minor => 1.0 - listed,
            _ => listed,
        }
    }

    /// Sum of clipped lengths without merging overlaps.
    pub fn raw_length(&self) -> f64 {
        self.intervals().iter().map(|(a, b)| b - a).sum()
    }

    /// Whether consecutive arcs (in center order) are separated.
    pub fn is_pairwise_disjoint(&self) -> bool {
        let mut iv = self.intervals();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        iv.windows(2).all(|w| w[0].1 < w[1].0)
    }

    /// `label, q, a, center, half_width` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,a,center,half_width\n");
        for arc in &self.arcs {
            let _ = writeln!(
                out,
                "{},{},{:.17e},{:.17e}",
                arc.label.q, arc.label.a, arc.center, arc.half_width
            );
        }
        out
    }
}

/// Total length of a union of intervals.
pub fn union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (a, b) in iv {
        match current {
            Some((ca, cb)) if a <= cb => current = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                current = Some((a, b));
            }
            None => current = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = current {
        total += cb - ca;
    }
    total
}

/// Checks `N(q,a) ⊆ M(q,a)` arc by arc.
pub fn pruned_within_major(pruned: &ArcSet, major: &ArcSet) -> bool {
    pruned.arcs.iter().all(|n| {
        major
            .arcs
            .iter()
            .find(|m| m.label == n.label)
            .is_some_and(|m| n.half_width <= m.half_width)
    })
}
