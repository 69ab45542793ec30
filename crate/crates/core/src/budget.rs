use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Caps on work and memory shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of cells in any dense table (sieve, coefficient
    /// vector, histogram).
    pub max_cells: u64,
    /// Maximum number of quadrature panels in one oscillatory integral.
    pub max_panels: u64,
    /// Maximum number of tuples enumerated by brute-force counters.
    pub max_tuples: u64,
    /// Maximum number of arcs materialised in an [`crate::ArcSet`].
    pub max_arcs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cells: 1 << 28,
            max_panels: 1 << 24,
            max_tuples: 1 << 30,
            max_arcs: 1 << 24,
        }
    }
}

impl Budget {
    pub fn check_cells(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.max_cells)
    }

    pub fn check_panels(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.max_panels)
    }

    pub fn check_tuples(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.max_tuples)
    }

    pub fn check_arcs(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.max_arcs)
    }
}

fn check(what: &'static str, needed: u128, cap: u64) -> Result<()> {
    if needed > cap as u128 {
        Err(LabError::Resource {
            what,
            needed,
            cap: cap as u128,
        })
    } else {
        Ok(())
    }
}
