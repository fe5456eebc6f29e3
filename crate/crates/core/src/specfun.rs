//! Gauss hypergeometric function for the interference Laplace transform.
//!
//! The interference MGF only ever needs `2F1(-d, 1; 1 - d; w)` with
//! `d = 2 / alpha` in `(0, 1)` and `w <= 0`. Three representations cover the
//! half-line, each with a geometric convergence ratio of at most 2/3:
//!
//! * `|w| <= 0.5`: the Gauss series, whose terms reduce to `-d w^n / (n - d)`;
//! * `-2 <= w < -0.5`: the Pfaff transformation onto `u = w / (w - 1)`,
//!   `2F1 = (1 - w)^-1 2F1(1, 1; 1 - d; u)`;
//! * `w < -2`: the `1/w` connection formula. With `b - a = 1 + d` non-integer
//!   and the first companion series terminating, it collapses to
//!   `(pi d / sin(pi d)) (-w)^d + d / (-w) * sum_n w^-n / (n + 1 + d)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_REL_EPS: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 10_000;

/// Truncated Gauss series `sum_{n < nmax} (a)_n (b)_n / (c)_n w^n / n!`.
///
/// Sums exactly `nmax` terms (fewer only if the series terminates), with
/// compensated summation so that long truncations stay accurate.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, w: f64, nmax: usize) -> Result<f64> {
    if !(w.abs() < 1.0) {
        return Err(Error::domain("hyp2f1_series", format!("|w| = {} is not < 1", w.abs())));
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::domain("hyp2f1_series", "nonfinite parameter"));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(
            "hyp2f1_series",
            format!("c = {c} is a nonpositive integer"),
        ));
    }

    let mut term = 1.0;
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for n in 0..nmax {
        // Kahan summation
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;

        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        if term == 0.0 {
            break;
        }
    }
    if !sum.is_finite() {
        return Err(Error::numerical("hyp2f1_series", "series sum is not finite"));
    }
    Ok(sum)
}

fn check_interference_args(alpha: f64, w: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 2.0) {
        return Err(Error::domain(
            "hyp2f1_interference",
            format!("path-loss exponent {alpha} must be > 2"),
        ));
    }
    if !(w.is_finite() && w <= 0.0) {
        return Err(Error::domain(
            "hyp2f1_interference",
            format!("argument {w} must be finite and <= 0"),
        ));
    }
    Ok(())
}

/// `2F1(-2/alpha, 1; 1 - 2/alpha; w)` for `alpha > 2`, `w <= 0`.
pub fn hyp2f1_interference(alpha: f64, w: f64) -> Result<f64> {
    hyp2f1_interference_excess(alpha, w).map(|excess| 1.0 + excess)
}

/// `2F1(-2/alpha, 1; 1 - 2/alpha; w) - 1`, computed without cancellation for
/// small `|w|`. This is the quantity that enters the MGF exponent.
pub fn hyp2f1_interference_excess(alpha: f64, w: f64) -> Result<f64> {
    check_interference_args(alpha, w)?;
    let d = 2.0 / alpha;
    if w == 0.0 {
        Ok(0.0)
    } else if w >= -0.5 {
        gauss_series_excess(d, w)
    } else if w >= -2.0 {
        pfaff(d, w).map(|f| f - 1.0)
    } else {
        reciprocal_connection(d, w).map(|f| f - 1.0)
    }
}

/// Sums `f(n)` for `n = start, start + 1, ...` until the terms are negligible.
fn converge(start: usize, mut f: impl FnMut(usize, f64) -> f64, what: &str) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev = 0.0;
    for n in start..start + SERIES_MAX_TERMS {
        let term = f(n, prev);
        prev = term;
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= SERIES_REL_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Numerical {
        component: format!("hyp2f1_interference ({what})"),
        detail: format!("series did not converge within {SERIES_MAX_TERMS} terms"),
        error_estimate: Some(prev.abs()),
    })
}

fn gauss_series_excess(d: f64, w: f64) -> Result<f64> {
    let mut power = 1.0;
    let s = converge(
        1,
        |n, _| {
            power *= w;
            power / (n as f64 - d)
        },
        "gauss series",
    )?;
    Ok(-d * s)
}

fn pfaff(d: f64, w: f64) -> Result<f64> {
    let c = 1.0 - d;
    let u = w / (w - 1.0);
    // term_{n+1} = term_n (n + 1) u / (c + n), term_0 = 1
    let s = converge(
        0,
        |n, prev| {
            if n == 0 {
                1.0
            } else {
                let m = (n - 1) as f64;
                prev * (m + 1.0) * u / (c + m)
            }
        },
        "pfaff",
    )?;
    Ok(s / (1.0 - w))
}

fn reciprocal_connection(d: f64, w: f64) -> Result<f64> {
    let v = 1.0 / w;
    let mut power = 1.0;
    let s = converge(
        0,
        |n, _| {
            let term = power / (n as f64 + 1.0 + d);
            power *= v;
            term
        },
        "1/w connection",
    )?;
    let leading = PI * d / (PI * d).sin() * (-w).powf(d);
    Ok(leading + d / (-w) * s)
}
