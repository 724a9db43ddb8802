//! Adaptive Gauss–Legendre quadrature, plus a driver for integrands known
//! only through their logarithm.
//!
//! The log-domain driver assumes the integrand is unimodal and log-concave
//! (true for every built-in radial weight after a logarithmic change of
//! variables, and for products of Gamma CDFs and densities). It locates the
//! mode, normalizes by the peak value, and marches outward with panels of
//! geometrically growing width. A panel march stops once the log-concavity
//! tail bound `e^{l(b)} / |l'(b)|` drops below the requested tolerance.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::Tolerance;

const ORDER: usize = 15;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

/// Nodes and weights of the `n`-point rule on `[-1, 1]` via Newton iteration.
fn legendre_rule(n: usize) -> Rule {
    let mut nodes = [0.0; ORDER];
    let mut weights = [0.0; ORDER];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    r.nodes
        .iter()
        .zip(r.weights.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive Gauss–Legendre on `[a, b]`: a panel is accepted when the 15-point
/// rule and the sum of its two halves agree to `max(abs_tol, rel·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    tol: Tolerance,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let whole = panel(&mut f, a, b);
    refine(&mut f, a, b, whole, abs_tol, tol, 0)
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    tol: Tolerance,
    depth: usize,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let halves = left + right;
    let err = (halves - whole).abs();
    if err <= abs_tol.max(tol.rel_eps * halves.abs()) || !err.is_finite() && halves.is_finite() {
        return Ok(halves);
    }
    if mid <= a || mid >= b {
        return Ok(halves);
    }
    if depth >= tol.max_quad_refinements {
        return Err(Error::Quadrature {
            index: 0,
            detail: format!("refinement cap reached on [{a}, {b}], error estimate {err:e}"),
        });
    }
    let sub_tol = abs_tol * std::f64::consts::FRAC_1_SQRT_2;
    let l = refine(f, a, mid, left, sub_tol, tol, depth + 1)?;
    let r = refine(f, mid, b, right, sub_tol, tol, depth + 1)?;
    Ok(l + r)
}

/// Hints for [`log_integrate`]: where the mode probably is and how wide it is.
#[derive(Debug, Clone, Copy)]
pub struct ModeHint {
    pub location: f64,
    pub scale: f64,
}

/// `ln ∫_lo^hi e^{l(x)} dx` for a unimodal log-concave `l`.
///
/// Infinite bounds are allowed. Returns `-∞` when the integrand vanishes.
pub fn log_integrate<L: Fn(f64) -> f64>(
    l: L,
    lo: f64,
    hi: f64,
    hint: ModeHint,
    tol: Tolerance,
) -> Result<f64> {
    if !(hi > lo) {
        return Ok(f64::NEG_INFINITY);
    }
    let saw_nan = std::cell::Cell::new(false);
    let l = |x: f64| {
        let v = l(x);
        if v.is_nan() {
            saw_nan.set(true);
        }
        v
    };
    let result = log_integrate_inner(&l, lo, hi, hint, tol)?;
    if saw_nan.get() {
        return Err(Error::Quadrature {
            index: 0,
            detail: "integrand evaluation failed".into(),
        });
    }
    Ok(result)
}

fn log_integrate_inner<L: Fn(f64) -> f64>(
    l: &L,
    lo: f64,
    hi: f64,
    hint: ModeHint,
    tol: Tolerance,
) -> Result<f64> {
    let scale0 = if hint.scale.is_finite() && hint.scale > 0.0 {
        hint.scale
    } else {
        1.0
    };
    let (mode, peak) = find_mode(l, lo, hi, hint.location, scale0);
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if peak == f64::INFINITY || peak.is_nan() {
        return Err(Error::Quadrature {
            index: 0,
            detail: format!("integrand not finite at its mode {mode}"),
        });
    }
    // exp(l - peak) carries relative roundoff of about |peak|·ε
    let noise = 16.0 * f64::EPSILON * peak.abs();
    let tol = Tolerance {
        rel_eps: tol.rel_eps.max(noise),
        ..tol
    };
    let width = curvature_width(l, mode, peak, scale0, lo, hi);
    let g = |x: f64| {
        let v = l(x) - peak;
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    };

    // Core panels on each side of the mode fix the absolute tolerance.
    let right_end = (mode + width).min(hi);
    let left_end = (mode - width).max(lo);
    let core_tol = Tolerance {
        rel_eps: (tol.rel_eps * 0.1).max(noise),
        ..tol
    };
    let core_r = integrate(g, mode, right_end, 0.0, core_tol)?;
    let core_l = integrate(g, left_end, mode, 0.0, core_tol)?;
    let core = core_l + core_r;
    if !(core > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let abs_tol = core * tol.rel_eps * 0.05;

    let right = march(l, g, peak, right_end, hi, width, 1.0, abs_tol, tol)?;
    let left = march(l, g, peak, left_end, lo, width, -1.0, abs_tol, tol)?;
    Ok(peak + (core + left + right).ln())
}

/// Integrate from `start` toward `end` (direction `dir`) with doubling panels.
#[allow(clippy::too_many_arguments)]
fn march<L: Fn(f64) -> f64, G: Fn(f64) -> f64 + Copy>(
    l: &L,
    g: G,
    peak: f64,
    start: f64,
    end: f64,
    width: f64,
    dir: f64,
    abs_tol: f64,
    tol: Tolerance,
) -> Result<f64> {
    const MAX_PANELS: usize = 400;
    let mut total = 0.0;
    let mut x = start;
    let mut len = width;
    for _ in 0..MAX_PANELS {
        if x == end {
            return Ok(total);
        }
        let lx = l(x) - peak;
        if lx < -745.0 || lx.is_nan() {
            return Ok(total);
        }
        // tail bound from the outward slope at x
        let h = 1e-4 * len;
        let slope = dir * (l(x + dir * h) - l(x)) / h;
        if slope < 0.0 {
            let bound = lx.exp() / (-slope);
            if bound <= abs_tol {
                return Ok(total);
            }
        }
        let mut next = x + dir * len;
        if (dir > 0.0 && next > end) || (dir < 0.0 && next < end) {
            next = end;
        }
        let (a, b) = if dir > 0.0 { (x, next) } else { (next, x) };
        total += integrate(g, a, b, abs_tol, tol)?;
        x = next;
        len *= 2.0;
    }
    Err(Error::Quadrature {
        index: 0,
        detail: "panel march did not reach a negligible tail".into(),
    })
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Coarse maximization of a unimodal function: bracket by doubling, then
/// golden-section. The integrator only needs the mode to within a fraction
/// of the peak width.
fn find_mode<L: Fn(f64) -> f64>(l: &L, lo: f64, hi: f64, start: f64, scale: f64) -> (f64, f64) {
    let val = |x: f64| {
        let v = l(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let x0 = if start.is_finite() {
        clamp(start, lo, hi)
    } else if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    };
    let f0 = val(x0);
    let step = scale;
    let up = clamp(x0 + step, lo, hi);
    let down = clamp(x0 - step, lo, hi);
    let f_up = val(up);
    let f_down = val(down);
    // direction of ascent
    let (dir, mut best, mut fbest) = if f_up > f0 && f_up >= f_down {
        (1.0, up, f_up)
    } else if f_down > f0 {
        (-1.0, down, f_down)
    } else {
        // x0 is already bracketed by up/down
        return golden(&val, down, up, x0, f0);
    };
    let mut prev = x0;
    let mut s = step;
    for _ in 0..200 {
        s *= 2.0;
        let next = clamp(best + dir * s, lo, hi);
        if next == best {
            // hit the boundary while still ascending
            return (best, fbest);
        }
        let fnext = val(next);
        if fnext <= fbest {
            let (a, b) = if dir > 0.0 { (prev, next) } else { (next, prev) };
            return golden(&val, a, b, best, fbest);
        }
        prev = best;
        best = next;
        fbest = fnext;
    }
    (best, fbest)
}

fn golden<V: Fn(f64) -> f64>(val: &V, mut a: f64, mut b: f64, best: f64, fbest: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_895;
    let mut bx = best;
    let mut bf = fbest;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let mut fc = val(c);
    let mut fd = val(d);
    for _ in 0..40 {
        if (b - a).abs() <= 1e-7 * (1.0 + bx.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = val(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > bf {
            bx = x;
            bf = fx;
        }
    }
    (bx, bf)
}

/// Width of the peak from a second difference, `1/sqrt(-l'')`, kept within sane bounds.
fn curvature_width<L: Fn(f64) -> f64>(l: &L, mode: f64, peak: f64, scale: f64, lo: f64, hi: f64) -> f64 {
    let h = 1e-3 * scale;
    let (a, b) = (mode - h, mode + h);
    let w = if a >= lo && b <= hi {
        let curv = -(l(a) - 2.0 * peak + l(b)) / (h * h);
        if curv.is_finite() && curv > 0.0 {
            1.0 / curv.sqrt()
        } else {
            scale
        }
    } else {
        scale
    };
    let w = w.clamp(1e-3 * scale, 1e3 * scale);
    if lo.is_finite() && hi.is_finite() {
        w.min(hi - lo)
    } else {
        w
    }
}
