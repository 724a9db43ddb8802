//! Regularized incomplete beta function `I_x(a, b)`.

use super::gamma::log_gamma_unchecked;
use super::{ln_one_minus_exp, Tolerance};
use crate::error::{domain, Error, Result};

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b)
}

/// `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    Ok(reg_inc_beta_pair(x, a, b)?.0)
}

/// `(I_x(a, b), 1 - I_x(a, b))`, the smaller side computed directly.
pub fn reg_inc_beta_pair(x: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let (li, lc) = ln_reg_inc_beta(x, a, b)?;
    Ok((li.exp(), lc.exp()))
}

/// `(ln I_x(a, b), ln(1 - I_x(a, b)))`.
pub fn ln_reg_inc_beta(x: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("reg_inc_beta", format!("x must lie in [0, 1], got {x}")));
    }
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(
            "reg_inc_beta",
            format!("shape parameters must be positive, got ({a}, {b})"),
        ));
    }
    if x == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if x == 1.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let tol = Tolerance::default();
    if x < (a + 1.0) / (a + b + 2.0) {
        let li = ln_front(x, a, b) + ln_fraction(x, a, b, tol)? - a.ln();
        Ok((li, ln_one_minus_exp(li)))
    } else {
        let lc = ln_front(1.0 - x, b, a) + ln_fraction(1.0 - x, b, a, tol)? - b.ln();
        Ok((ln_one_minus_exp(lc), lc))
    }
}

/// `ln( x^a (1-x)^b / B(a, b) )`
fn ln_front(x: f64, a: f64, b: f64) -> f64 {
    a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)
}

/// Continued fraction for `I_x(a,b) · a B(a,b) / (x^a (1-x)^b)`, modified Lentz.
fn ln_fraction(x: f64, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=tol.max_terms {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(h.ln());
        }
    }
    Err(Error::Convergence {
        func: "reg_inc_beta",
        terms: tol.max_terms,
    })
}
