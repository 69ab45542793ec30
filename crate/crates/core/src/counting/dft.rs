//! Representation counts by orthogonality on the grid `j / Q`.

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;

use super::instance_bases;
use crate::arith::unit_roots;
use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::expsums::{Overflow, PowerTable};
use crate::smooth::{check_params, smooth_bound, smooth_members};

/// Rounding tolerance for the recovered integer.
const RESIDUAL_TOL: f64 = 1e-6;

/// Samples of `f(j/Q)^t g(j/Q)^u` for `Q = deg + 1`.
///
/// The rectangle rule is exact for trigonometric polynomials of degree
/// below `Q`, so every coefficient is recovered by a length-`Q` sum.
#[derive(Clone, Debug)]
pub struct DftEvaluator {
    degree: u64,
    roots: Vec<Complex64>,
    samples: Vec<Complex64>,
}

impl DftEvaluator {
    pub fn new(classical: &PowerTable, smooth: &PowerTable, t: u32, u: u32, budget: &Budget) -> Result<Self> {
        let deg_c = if t > 0 { classical.max_power() } else { Some(0) };
        let deg_s = if u > 0 { smooth.max_power() } else { Some(0) };
        let degree = deg_c
            .zip(deg_s)
            .and_then(|(c, s)| c.checked_mul(t as u128)?.checked_add(s.checked_mul(u as u128)?))
            .ok_or(LabError::Resource {
                what: "DFT grid",
                needed: u128::MAX,
                cap: budget.max_cells as u128,
            })?;
        budget.check_cells("DFT grid", degree + 1)?;
        let q = degree as u64 + 1;
        let roots = unit_roots(q);
        let samples = (0..q)
            .into_par_iter()
            .map(|j| {
                let f = if t > 0 {
                    classical.sum_at_root(j, &roots).powu(t)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let g = if u > 0 {
                    smooth.sum_at_root(j, &roots).powu(u)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                f * g
            })
            .collect();
        Ok(DftEvaluator {
            degree: degree as u64,
            roots,
            samples,
        })
    }

    /// Grid with `P` fixed independently of the target.
    pub fn fixed_p(k: u32, p: f64, t: u32, u: u32, eta: Option<f64>, budget: &Budget) -> Result<Self> {
        let classical = PowerTable::classical(k, p, Overflow::Error)?;
        let smooth = match eta.filter(|_| u > 0) {
            Some(eta) => {
                check_params(p, eta)?;
                let members = smooth_members(p.floor() as u64, smooth_bound(p, eta), budget)?;
                PowerTable::new(k, members, Overflow::Error)?
            }
            None if u > 0 => return Err(LabError::invalid("u > 0 needs a smoothness exponent eta")),
            None => PowerTable::new(k, Vec::new(), Overflow::Error)?,
        };
        Self::new(&classical, &smooth, t, u, budget)
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn grid(&self) -> u64 {
        self.samples.len() as u64
    }

    /// `(1/Q) sum_j F(j/Q) e(-n j/Q)`, rounded after a residual check.
    pub fn count(&self, n: u64) -> Result<BigUint> {
        if n > self.degree {
            return Ok(BigUint::default());
        }
        let q = self.grid() as u128;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, s) in self.samples.iter().enumerate() {
            let idx = (q - (n as u128 * j as u128) % q) % q;
            acc += s * self.roots[idx as usize];
        }
        acc /= q as f64;
        let rounded = acc.re.round();
        let residual = (acc.re - rounded).abs().max(acc.im.abs());
        if residual > RESIDUAL_TOL || rounded < 0.0 || !rounded.is_finite() {
            return Err(LabError::Tolerance {
                what: "DFT count",
                value: residual,
                tol: RESIDUAL_TOL,
            });
        }
        Ok(BigUint::from(rounded as u128))
    }
}

/// `R(n)` via orthogonality, `P = n^{1/k}`, `B = n^{eta/k}`.
pub fn dft_rep_count(k: u32, t: u32, u: u32, eta: Option<f64>, n: u64, budget: &Budget) -> Result<BigUint> {
    if u > 0 && eta.is_none() {
        return Err(LabError::invalid("u > 0 needs a smoothness exponent eta"));
    }
    let inst = instance_bases(k, n, eta.filter(|_| u > 0), budget)?;
    let classical = PowerTable::new(k, inst.classical, Overflow::Error)?;
    let smooth = PowerTable::new(k, inst.smooth, Overflow::Error)?;
    DftEvaluator::new(&classical, &smooth, t, u, budget)?.count(n)
}
