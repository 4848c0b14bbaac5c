//! Closed-form predictions for Grover's search: the rotation angle, the
//! success probability after `t` calls, the best stopping point, restart
//! strategies, and lower bounds on the query count.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::bounds::{self, BoundKind};
use crate::error::{LabError, Result};
use crate::roots;

/// Relative tolerance under which two success probabilities count as tied.
const TIE_TOL: f64 = 1e-12;

/// Per-iteration rotation angle for a search space of size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleModel {
    pub n: usize,
    pub phi: f64,
}

impl AngleModel {
    /// `sin²((t + 1/2)·φ)`.
    pub fn success_after(&self, t: f64) -> f64 {
        ((t + 0.5) * self.phi).sin().powi(2)
    }

    /// Fractional iteration count at which the state reaches `|y⟩`.
    pub fn fractional_optimum(&self) -> f64 {
        (PI / self.phi - 1.0) / 2.0
    }
}

pub fn rotation_angle(n: usize) -> Result<AngleModel> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    // sin(φ/2) = 1/√n is the well-conditioned form of cos φ = 1 − 2/n
    let phi = 2.0 * (1.0 / (n as f64).sqrt()).asin();
    Ok(AngleModel { n, phi })
}

pub fn success_after(n: usize, t: usize) -> Result<f64> {
    Ok(rotation_angle(n)?.success_after(t as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalIterations {
    pub t_star_fractional: f64,
    pub t_best: usize,
    pub p_best: f64,
}

/// Best integer iteration count: the better neighbour of the fractional
/// optimum, ties going to the smaller count.
pub fn optimal_iterations(n: usize) -> Result<OptimalIterations> {
    let model = rotation_angle(n)?;
    let t_star = model.fractional_optimum();
    let lo = t_star.floor().max(0.0);
    let hi = t_star.ceil().max(0.0);
    let (p_lo, p_hi) = (model.success_after(lo), model.success_after(hi));
    let (t_best, p_best) = if p_hi > p_lo * (1.0 + TIE_TOL) { (hi, p_hi) } else { (lo, p_lo) };
    Ok(OptimalIterations {
        t_star_fractional: t_star,
        t_best: t_best as usize,
        p_best,
    })
}

/// Stop-and-restart strategy minimizing the expected number of oracle calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartPlan {
    pub stop_at: usize,
    pub success_prob: f64,
    pub expected_queries: f64,
    pub savings_vs_full: f64,
}

/// Scans every stopping point `T ∈ [1, t_best]` for the smallest `T / p_T`.
pub fn restart_optimum(n: usize) -> Result<RestartPlan> {
    if n < 4 {
        return Err(LabError::InvalidDimension(n));
    }
    let model = rotation_angle(n)?;
    let full = optimal_iterations(n)?;
    let mut best = RestartPlan {
        stop_at: 0,
        success_prob: 0.0,
        expected_queries: f64::INFINITY,
        savings_vs_full: 0.0,
    };
    for t in 1..=full.t_best {
        let p = model.success_after(t as f64);
        let cost = t as f64 / p;
        if cost < best.expected_queries {
            best = RestartPlan {
                stop_at: t,
                success_prob: p,
                expected_queries: cost,
                savings_vs_full: 0.0,
            };
        }
    }
    best.savings_vs_full = 1.0 - best.expected_queries / full.t_best as f64;
    Ok(best)
}

/// Large-`n` limit of the restart strategy, in units where the rotation
/// angle per call vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumRestart {
    /// Root of `tan θ = 2θ`: the optimal stopping angle.
    pub theta_star: f64,
    /// Saving relative to running to `θ = π/2`.
    pub savings: f64,
}

/// Minimizes `θ / sin²θ`; the stationarity condition is `tan θ = 2θ`.
pub fn continuum_restart() -> Result<ContinuumRestart> {
    let theta = roots::bisect_root(|t| t.tan() - 2.0 * t, 0.5, 1.5)?;
    let cost = theta / theta.sin().powi(2);
    Ok(ContinuumRestart {
        theta_star: theta,
        savings: 1.0 - cost / FRAC_PI_2,
    })
}

/// Smallest `T` for which the chosen bound still allows success
/// probability `p` with `s` parallel oracles.
pub fn lower_bound_t(n: usize, p: f64, s: usize, kind: BoundKind) -> Result<usize> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let floor = 1.0 / n as f64;
    if !(floor..=1.0).contains(&p) {
        return Err(LabError::ProbabilityOutOfRange { p, lo: floor, hi: 1.0 });
    }
    if s == 0 {
        return Err(LabError::Degenerate("need at least one oracle".into()));
    }
    let allows = |t: usize| -> Result<bool> { Ok(bounds::success_ceiling_with(n, t, s, kind)? >= p) };
    if allows(0)? {
        return Ok(0);
    }
    // the ceiling is non-decreasing in t: double, then bisect on integers
    let mut hi = 1usize;
    while !allows(hi)? {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if allows(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
