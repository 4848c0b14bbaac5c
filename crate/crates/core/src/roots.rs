//! Bisection helpers shared by the analytic model and the bound inversions.

use crate::error::{LabError, Result};

/// Interval width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-12;
/// Hard iteration cap.
pub const BISECTION_MAX_ITER: usize = 60;

/// Finds a sign change of `f` inside `[lo, hi]`.
pub fn bisect_root<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(LabError::Bracket(format!("empty interval [{lo}, {hi}]")));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(LabError::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary of a monotone predicate that holds at `lo`: returns the upper
/// end of the final bracket, so the result never undershoots the true
/// boundary by more than rounding. If the predicate holds at `hi`, returns
/// `hi`.
pub fn bisect_last_true<P>(pred: P, mut lo: f64, mut hi: f64) -> f64
where
    P: Fn(f64) -> bool,
{
    if pred(hi) {
        return hi;
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0).is_err());
        assert!(bisect_root(|x| x, 1.0, 1.0).is_err());
    }

    #[test]
    fn last_true_brackets_threshold() {
        let b = bisect_last_true(|x| x <= 0.3, 0.0, 1.0);
        assert!(b >= 0.3 && b - 0.3 <= 1e-12);
        assert_eq!(bisect_last_true(|_| true, 0.0, 1.0), 1.0);
    }
}
