//! Error function and its complement.
//!
//! Independent of the incomplete gamma code so the identity
//! `erf(t) = P(1/2, t^2)` can serve as a cross-check.

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Switch from the power series to the continued fraction for `erfc`.
const SERIES_LIMIT: f64 = 2.0;

/// Returns `(erf(t), erfc(t))`.
pub fn erf_erfc(t: f64) -> (f64, f64) {
    if t.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let a = t.abs();
    let (e, c) = if a < SERIES_LIMIT {
        let e = erf_series(a);
        (e, 1.0 - e)
    } else {
        let c = erfc_fraction(a);
        (1.0 - c, c)
    };
    if t < 0.0 {
        (-e, 2.0 - c)
    } else {
        (e, c)
    }
}

pub fn erf(t: f64) -> f64 {
    erf_erfc(t).0
}

pub fn erfc(t: f64) -> f64 {
    erf_erfc(t).1
}

/// `erf(t) = 2/√π e^{-t²} Σ_n 2^n t^{2n+1} / (1·3·…·(2n+1))`; all terms positive.
fn erf_series(t: f64) -> f64 {
    let t2 = t * t;
    let mut term = t;
    let mut sum = t;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * t2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-t2).exp() * sum
}

/// `erfc(t) = e^{-t²}/√π · 1/(t + (1/2)/(t + 1/(t + (3/2)/(t + …))))`, Lentz.
fn erfc_fraction(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for n in 1..5000 {
        let an = n as f64 * 0.5;
        d = t + an * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = t + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    0.5 * FRAC_2_SQRT_PI * (-t * t).exp() / f
}
