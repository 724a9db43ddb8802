//! `ln K_0(z)`, the modified Bessel function of the second kind of order 0.
//!
//! Needed for the density of a product of two Gamma(j) variables,
//! `2 y^{j-1} K_0(2√y) / Γ(j)²`.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln K_0(z)` for `z > 0`; `+∞` at 0.
pub(crate) fn ln_bessel_k0(z: f64) -> f64 {
    if z <= 0.0 {
        return f64::INFINITY;
    }
    if z == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if z < 2.0 {
        series(z).ln()
    } else {
        0.5 * (std::f64::consts::PI / (2.0 * z)).ln() - z - steed(z).ln()
    }
}

/// `ln K_0(2 e^{t})`, usable when `2 e^t` underflows.
pub(crate) fn ln_bessel_k0_exp(t: f64) -> f64 {
    if t < -300.0 {
        // K_0(z) = -ln(z/2) - γ + O(z² ln z)
        (-t - EULER_GAMMA).ln()
    } else {
        ln_bessel_k0(2.0 * t.exp())
    }
}

/// `K_0(z) = -(ln(z/2) + γ) I_0(z) + Σ_{k≥1} (z²/4)^k H_k / (k!)²`.
fn series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i0 + tail
}

/// Steed's continued fraction: returns `s` with `K_0(z) = √(π/2z) e^{-z} / s`.
fn steed(z: f64) -> f64 {
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    s
}
