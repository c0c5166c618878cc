//! Bisection on monotone scalar functions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Search interval `[lo, hi]` with an absolute width tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub tol: T,
}

impl<T: Scalar> Bracket<T> {
    pub fn new(lo: T, hi: T, tol: T) -> Result<Self> {
        if !(lo < hi) || !(tol > T::zero()) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "bad bracket [{lo}, {hi}] with tol {tol}"
            )));
        }
        Ok(Self { lo, hi, tol })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mid(&self) -> T {
        self.lo + (self.hi - self.lo) / T::lit(2.0)
    }
}

/// Final interval of a bisection: `f(lo) >= 0 >= f(hi)` for a nonincreasing `f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bisection<T> {
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
}

impl<T: Scalar> Bisection<T> {
    pub fn mid(&self) -> T {
        self.lo + (self.hi - self.lo) / T::lit(2.0)
    }
}

/// Root of a nonincreasing `f` inside `bracket`.
///
/// Returns the midpoint of the final interval, whose width is below
/// `bracket.tol`.
pub fn bisect_monotone<T: Scalar>(mut f: impl FnMut(T) -> T, bracket: Bracket<T>) -> Result<T> {
    bisect_monotone_with(|x| Ok(f(x)), bracket).map(|b| b.mid())
}

/// Fallible variant of [`bisect_monotone`] that reports the final interval.
pub fn bisect_monotone_with<T: Scalar>(
    mut f: impl FnMut(T) -> Result<T>,
    bracket: Bracket<T>,
) -> Result<Bisection<T>> {
    let Bracket { mut lo, mut hi, tol } = bracket;
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.is_nan() || f_hi.is_nan() || f_lo < T::zero() || f_hi > T::zero() {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }
    let mut iterations = 0;
    if f_lo == T::zero() {
        return Ok(Bisection { lo, hi: lo, iterations });
    }
    if f_hi == T::zero() {
        return Ok(Bisection { lo: hi, hi, iterations });
    }
    while hi - lo >= tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm.is_nan() {
            return Err(Error::Numeric(format!("NaN during bisection at {mid}")));
        }
        if fm >= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(Bisection { lo, hi, iterations })
}

/// Bisection on a predicate that is `true` on `[lo, x*)` and `false` on
/// `(x*, hi]`; stops when `done(lo, hi)` holds.
pub fn bisect_predicate<T: Scalar>(
    mut lo: T,
    mut hi: T,
    mut keep_right_of: impl FnMut(T) -> Result<bool>,
    mut done: impl FnMut(T, T) -> bool,
) -> Result<Bisection<T>> {
    let mut iterations = 0;
    while !done(lo, hi) {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if keep_right_of(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(Bisection { lo, hi, iterations })
}

/// Doubles `hi` from `start` until `f(hi) <= 0` for a nonincreasing `f`.
pub fn expand_upper<T: Scalar>(
    mut f: impl FnMut(T) -> Result<T>,
    start: T,
    max_doublings: usize,
) -> Result<T> {
    let mut hi = start;
    for _ in 0..=max_doublings {
        if f(hi)? <= T::zero() {
            return Ok(hi);
        }
        hi = hi * T::lit(2.0);
    }
    Err(Error::Numeric(format!(
        "no sign change after {max_doublings} doublings (last point {hi})"
    )))
}
