//! Bracketing root finder.

/// Result of a converged bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub iterations: u32,
}

/// Finds a root of `f` in `[lower, upper]` by bisection.
///
/// Returns `None` when `f` does not change sign over the bracket. Stops as
/// soon as the bracket is narrower than `tol` (the midpoint is then within
/// `tol / 2` of a root) or after `max_iter` halvings.
pub fn bisect<F>(f: F, lower: f64, upper: f64, tol: f64, max_iter: u32) -> Option<Bisection>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lower, upper);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(Bisection { root: lo, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Some(Bisection { root: hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }

    let mut iterations = 0;
    while hi - lo > tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Some(Bisection { root: mid, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(Bisection { root: 0.5 * (lo + hi), iterations })
}
