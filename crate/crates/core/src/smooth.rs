//! Smooth-number sets `A_eta(P)` and Dickman's function.

use serde::Serialize;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::arith::largest_prime_factors;
use crate::budget::Budget;
use crate::error::{LabError, Result};

/// Step of the Dickman integral recurrence.
pub const DICKMAN_STEP: f64 = 1e-4;

/// `{ n in [1, P] : every prime factor of n is <= P^eta }`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothSet {
    #[serde(rename = "P")]
    pub p: f64,
    pub eta: f64,
    /// `B = P^eta` as computed (before the one-ulp widening used in comparisons).
    pub bound: f64,
    pub members: Vec<u64>,
}

impl SmoothSet {
    pub fn floor_p(&self) -> u64 {
        self.p.floor() as u64
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: u64) -> bool {
        self.members.binary_search(&m).is_ok()
    }
}

/// `P^eta`, widened by one unit in the last place for prime comparisons.
pub fn effective_bound(bound: f64) -> f64 {
    bound.next_up()
}

pub fn smooth_bound(p: f64, eta: f64) -> f64 {
    p.powf(eta)
}

/// True iff every prime factor of `m` is at most `bound`.
pub fn is_smooth(m: u64, bound: f64) -> bool {
    assert!(m >= 1, "is_smooth needs m >= 1");
    let b = effective_bound(bound);
    let mut n = m;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            if p as f64 > b {
                return false;
            }
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    n == 1 || n as f64 <= b
}

pub(crate) fn check_params(p: f64, eta: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::invalid(format!("P must be >= 1 (got {p})")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(LabError::invalid(format!("eta must lie in (0, 1] (got {eta})")));
    }
    Ok(())
}

/// Builds `A_eta(P)` with a largest-prime-factor sieve over `[1, floor(P)]`.
pub fn smooth_set(p: f64, eta: f64, budget: &Budget) -> Result<SmoothSet> {
    check_params(p, eta)?;
    let bound = smooth_bound(p, eta);
    let members = smooth_members(p.floor() as u64, bound, budget)?;
    Ok(SmoothSet { p, eta, bound, members })
}

/// Integers in `[1, limit]` whose prime factors are all at most `bound`.
pub fn smooth_members(limit: u64, bound: f64, budget: &Budget) -> Result<Vec<u64>> {
    budget.check_cells("smooth sieve", limit as u128 + 1)?;
    let b = effective_bound(bound);
    let lpf = largest_prime_factors(limit as usize);
    Ok((1..=limit).filter(|&m| lpf[m as usize] as f64 <= b).collect())
}

/// Dickman's function at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DickmanEstimate {
    pub x: f64,
    pub rho: f64,
}

/// Tabulated Dickman function on `[0, x_max]`.
///
/// Solves `rho(x) = rho(x0) - int_{x0}^{x} rho(t-1)/t dt` by the midpoint rule;
/// `rho(t-1)` at a midpoint falls halfway between two earlier grid values and
/// is taken as their mean.
#[derive(Clone, Debug)]
pub struct DickmanTable {
    step: f64,
    per_unit: usize,
    values: Vec<f64>,
}

impl DickmanTable {
    pub fn new(x_max: f64) -> Self {
        Self::with_steps_per_unit(x_max, (1.0 / DICKMAN_STEP).round() as usize)
    }

    pub fn with_steps_per_unit(x_max: f64, per_unit: usize) -> Self {
        assert!(per_unit >= 1);
        let step = 1.0 / per_unit as f64;
        let n = ((x_max.max(1.0) * per_unit as f64).ceil() as usize) + 1;
        let mut values = vec![1.0f64; n + 1];
        for i in per_unit..n {
            let mid = (i as f64 + 0.5) * step;
            let j = i - per_unit;
            let lagged = 0.5 * (values[j] + values[j + 1]);
            values[i + 1] = values[i] - step * lagged / mid;
        }
        DickmanTable { step, per_unit, values }
    }

    pub fn x_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn eval(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "dickman_rho needs x >= 0");
        if x <= 1.0 {
            return 1.0;
        }
        assert!(x <= self.x_max(), "x = {x} beyond table range {}", self.x_max());
        let i = ((x / self.step).floor() as usize).min(self.values.len() - 2);
        let xi = i as f64 * self.step;
        let h = x - xi;
        if h == 0.0 {
            return self.values[i];
        }
        // Partial midpoint step from the grid point below x.
        let mid = xi + 0.5 * h;
        let lagged = self.interp(mid - 1.0);
        self.values[i] - h * lagged / mid
    }

    fn interp(&self, y: f64) -> f64 {
        if y <= 1.0 {
            return 1.0;
        }
        let pos = y * self.per_unit as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[(i + 1).min(self.values.len() - 1)] * frac
    }
}

pub fn dickman_rho(x: f64) -> f64 {
    if x <= 1.0 {
        assert!(x >= 0.0, "dickman_rho needs x >= 0");
        return 1.0;
    }
    DickmanTable::new(x).eval(x)
}

pub fn dickman_estimate(x: f64) -> DickmanEstimate {
    DickmanEstimate { x, rho: dickman_rho(x) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothDensity {
    pub floor_p: u64,
    pub count: u64,
    pub density: f64,
    pub dickman: f64,
    /// `|density - dickman| / dickman`.
    pub relative_gap: f64,
}

pub fn smooth_density(p: f64, eta: f64, budget: &Budget) -> Result<SmoothDensity> {
    let set = smooth_set(p, eta, budget)?;
    Ok(density_of(&set))
}

pub fn density_of(set: &SmoothSet) -> SmoothDensity {
    let floor_p = set.floor_p();
    let count = set.len() as u64;
    let density = count as f64 / floor_p as f64;
    let dickman = dickman_rho(1.0 / set.eta);
    SmoothDensity {
        floor_p,
        count,
        density,
        dickman,
        relative_gap: (density - dickman).abs() / dickman,
    }
}

/// On-disk cache of member lists, one file per `(floor(P), B)` key.
///
/// Files hold a header line followed by newline-delimited members.
pub mod cache {
    use super::*;

    const MAGIC: &str = "# smooth-set";

    pub fn path_for(dir: &Path, floor_p: u64, bound: f64) -> PathBuf {
        dir.join(format!("smooth-{floor_p}-{:016x}.txt", bound.to_bits()))
    }

    pub fn write(dir: &Path, set: &SmoothSet) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = path_for(dir, set.floor_p(), set.bound);
        let mut out = BufWriter::new(fs::File::create(&path)?);
        writeln!(
            out,
            "{MAGIC} floor_p={} bound_bits={:016x} count={}",
            set.floor_p(),
            set.bound.to_bits(),
            set.len()
        )?;
        for m in &set.members {
            writeln!(out, "{m}")?;
        }
        out.flush()?;
        Ok(path)
    }

    pub fn read(path: &Path, p: f64, eta: f64) -> Result<SmoothSet> {
        let file = BufReader::new(fs::File::open(path)?);
        let mut lines = file.lines();
        let header = lines
            .next()
            .ok_or_else(|| LabError::Parse(format!("{}: empty cache file", path.display())))??;
        let bound = smooth_bound(p, eta);
        let expected = format!(
            "{MAGIC} floor_p={} bound_bits={:016x} ",
            p.floor() as u64,
            bound.to_bits()
        );
        let count: usize = header
            .strip_prefix(&expected)
            .and_then(|rest| rest.strip_prefix("count="))
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| LabError::Parse(format!("{}: header mismatch", path.display())))?;
        let mut members = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            let m = line
                .trim()
                .parse()
                .map_err(|_| LabError::Parse(format!("{}: bad member {line:?}", path.display())))?;
            members.push(m);
        }
        if members.len() != count {
            return Err(LabError::Parse(format!(
                "{}: header says {count} members, found {}",
                path.display(),
                members.len()
            )));
        }
        Ok(SmoothSet { p, eta, bound, members })
    }

    /// Reads the cached set if present, otherwise sieves and stores it.
    pub fn load_or_build(dir: &Path, p: f64, eta: f64, budget: &Budget) -> Result<SmoothSet> {
        check_params(p, eta)?;
        let path = path_for(dir, p.floor() as u64, smooth_bound(p, eta));
        if path.exists() {
            return read(&path, p, eta);
        }
        let set = smooth_set(p, eta, budget)?;
        write(dir, &set)?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn is_smooth_examples() {
        assert!(is_smooth(12, 3.0));
        assert!(!is_smooth(14, 3.0));
        assert!(is_smooth(1, 1.5));
        assert!(is_smooth(97, 97.0));
        assert!(!is_smooth(97, 96.9));
    }

    #[test]
    fn smooth_set_examples() {
        let b = Budget::default();
        let eta = 3f64.ln() / 10f64.ln();
        let s = smooth_set(10.0, eta, &b).unwrap();
        assert_eq!(s.members, vec![1, 2, 3, 4, 6, 8, 9]);
        let all = smooth_set(10.0, 1.0, &b).unwrap();
        assert_eq!(all.members, (1..=10).collect::<Vec<_>>());
        let tiny = smooth_set(2.0, 0.5, &b).unwrap();
        assert_eq!(tiny.members, vec![1]);
    }

    #[test]
    fn smooth_set_rejects_bad_inputs() {
        let b = Budget::default();
        assert!(smooth_set(0.5, 0.5, &b).is_err());
        assert!(smooth_set(10.0, 0.0, &b).is_err());
        assert!(smooth_set(10.0, 1.5, &b).is_err());
        let tight = Budget {
            max_cells: 100,
            ..Budget::default()
        };
        assert!(matches!(
            smooth_set(1000.0, 0.5, &tight),
            Err(LabError::Resource { .. })
        ));
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let b = Budget::default();
        for eta in [0.2, 0.35, 0.5, 0.77, 1.0] {
            let s = smooth_set(10_000.0, eta, &b).unwrap();
            for m in 1..=10_000u64 {
                assert_eq!(s.contains(m), is_smooth(m, s.bound), "m = {m}, eta = {eta}");
            }
        }
    }

    #[test]
    fn dickman_known_values() {
        assert_eq!(dickman_rho(0.0), 1.0);
        assert_eq!(dickman_rho(1.0), 1.0);
        assert!((dickman_rho(2.0) - (1.0 - 2f64.ln())).abs() < 1e-9);
        // High-resolution reference values.
        assert!((dickman_rho(3.0) - 0.048_608_388_291_131_6).abs() < 1e-8);
        assert!((dickman_rho(4.0) - 0.004_910_925_648).abs() < 1e-8);
        assert!((dickman_rho(5.0) - 0.000_354_724_700_456).abs() < 1e-8);
    }

    #[test]
    fn dickman_is_decreasing_and_in_unit_interval() {
        let mut prev = dickman_rho(1.0);
        for i in 1..=800 {
            let r = dickman_rho(1.0 + i as f64 / 100.0);
            assert!(r > 0.0 && r < prev, "x = {}", 1.0 + i as f64 / 100.0);
            prev = r;
        }
    }

    #[test]
    fn dickman_step_halving_converges() {
        let coarse = DickmanTable::with_steps_per_unit(5.0, 10_000);
        let fine = DickmanTable::with_steps_per_unit(5.0, 20_000);
        let mut x = 0.0;
        while x <= 5.0 {
            assert!((coarse.eval(x) - fine.eval(x)).abs() < 1e-8, "x = {x}");
            x += 0.0371;
        }
    }

    #[test]
    fn density_trivial_eta_one() {
        let d = smooth_density(1e4, 1.0, &Budget::default()).unwrap();
        assert_eq!(d.count, 10_000);
        assert_eq!(d.density, 1.0);
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let b = Budget::default();
        let built = cache::load_or_build(dir.path(), 500.0, 0.4, &b).unwrap();
        let path = cache::path_for(dir.path(), 500, smooth_bound(500.0, 0.4));
        assert!(path.exists());
        let again = cache::load_or_build(dir.path(), 500.0, 0.4, &b).unwrap();
        assert_eq!(built, again);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# smooth-set floor_p=500 "));
        assert!(cache::read(&path, 500.0, 0.41).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_eta_and_p(p in 2.0f64..3000.0, dp in 0.0f64..500.0,
                                 eta in 0.05f64..1.0, deta in 0.0f64..0.5) {
            let b = Budget::default();
            let eta2 = (eta + deta).min(1.0);
            let small = smooth_set(p, eta, &b).unwrap();
            let wider = smooth_set(p, eta2, &b).unwrap();
            prop_assert!(small.members.iter().all(|m| wider.contains(*m)));
            let bigger = smooth_set(p + dp, eta, &b).unwrap();
            prop_assert!(small.members.iter().all(|m| bigger.contains(*m)));
            prop_assert_eq!(small.members[0], 1);
            prop_assert!(small.members.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
