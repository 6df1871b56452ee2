//! One-dimensional bracketing root finder and golden-section maximizer.

use crate::error::{Error, Result};

const MAX_ITERATIONS: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `|f(x)|` at the returned point.
    pub residual: f64,
    pub iterations: u32,
}

/// Bisection for a root of `f` on `[lo, hi]`.
///
/// Iterates until the bracket is narrower than `tol` and `|f(mid)| ≤ tol`, or
/// until the bracket cannot be split further in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Root> {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            residual: 0.0,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            residual: 0.0,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;

    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        iterations += 1;
        let exhausted = mid <= lo || mid >= hi;
        if f_mid == 0.0
            || exhausted
            || ((hi - lo) <= tol && f_mid.abs() <= tol)
            || iterations >= MAX_ITERATIONS
        {
            return Ok(Root {
                x: mid,
                residual: f_mid.abs(),
                iterations,
            });
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: u32,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// The endpoints are compared against the interior estimate at the end, so a
/// maximum sitting on the boundary is returned exactly.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi)), (c, fc), (d, fd)]
        .into_iter()
        .fold(
            Maximum {
                x: mid,
                value: f64::NEG_INFINITY,
                iterations,
            },
            |best, (x, v)| {
                if v > best.value {
                    Maximum {
                        x,
                        value: v,
                        iterations,
                    }
                } else {
                    best
                }
            },
        )
}
