//! Bracketed root finding.
//!
//! Every function whose root the crate needs (the leaked amplitude in the
//! global iteration count, `α − η(α)` for the range bound, `α − sin 2α`) is a
//! smooth trigonometric expression, so plain bisection on a verified sign
//! change is enough and never diverges.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_BISECTIONS: usize = 400;

/// Bisection on `[lo, hi]`. Requires `f(lo)` and `f(hi)` to have opposite
/// signs (or one of them to vanish).
///
/// Stops when the bracket is narrower than `abs_tol` (or the scalar's relative
/// resolution) or when the midpoint no longer moves.
pub fn bisect<T, F>(f: F, mut lo: T, mut hi: T, abs_tol: T, what: &'static str) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot {
            what,
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }

    let half = T::lit(0.5);
    let rel = T::lit(T::ROOT_REL_TOL);
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let width = hi - lo;
        if width <= abs_tol || width <= rel * mid.abs().max(T::one()) {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * half)
}

/// Splits `[lo, hi]` into `cells` equal pieces and returns every sub-interval
/// on which `f` changes sign, in increasing order.
pub fn sign_change_brackets<T, F>(f: F, lo: T, hi: T, cells: usize) -> Vec<(T, T)>
where
    T: Real,
    F: Fn(T) -> T,
{
    let cells = cells.max(1);
    let step = (hi - lo) / T::from_count(cells as u64);
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=cells {
        let x = if i == cells {
            hi
        } else {
            lo + step * T::from_count(i as u64)
        };
        let fx = f(x);
        let crosses = (f_prev == T::zero())
            || (fx != T::zero() && f_prev.signum() != fx.signum());
        if crosses && !f_prev.is_nan() && !fx.is_nan() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}
