//! Occupation probabilities `p_j = h_{j,1}(a) / h_j`: the chance that the
//! `j`-th independent radial variable falls inside the disc of radius `a`.
//!
//! For β = 4 index `j` refers to the odd moment `h_{2j+1}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{Beta, EnsembleKind, RadialPotential};
use crate::error::{domain, Error, Result};
use crate::quadrature::{log_integrate, ModeHint};
use crate::specfun::{ln_reg_inc_beta, ln_reg_inc_gamma_with, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationPath {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationVector {
    pub beta: Beta,
    pub n: usize,
    pub a: f64,
    /// `p_0, …, p_{N-1}`.
    pub probs: Vec<f64>,
    /// `1 - p_j`, computed directly rather than by subtraction.
    pub complements: Vec<f64>,
    pub path: EvaluationPath,
    /// The disc covers the whole support; every `p_j` is 1.
    pub saturated: bool,
}

impl OccupationVector {
    fn saturated(beta: Beta, n: usize, a: f64, path: EvaluationPath) -> Self {
        Self {
            beta,
            n,
            a,
            probs: vec![1.0; n],
            complements: vec![0.0; n],
            path,
            saturated: true,
        }
    }

    fn from_logs(beta: Beta, n: usize, a: f64, path: EvaluationPath, logs: Vec<(f64, f64)>) -> Self {
        let (probs, complements) = logs.into_iter().map(|(lp, lq)| (lp.exp(), lq.exp())).unzip();
        Self {
            beta,
            n,
            a,
            probs,
            complements,
            path,
            saturated: false,
        }
    }
}

fn check_radius(potential: &RadialPotential, n: usize, a: f64) -> Result<()> {
    potential.check_n(n)?;
    if !(a > 0.0) || a.is_nan() {
        return Err(domain("occupation_probs", format!("radius must be positive, got {a}")));
    }
    Ok(())
}

/// Occupation probabilities through the closed form of the potential's
/// family, or quadrature for custom potentials.
pub fn occupation_probs(potential: &RadialPotential, n: usize, a: f64) -> Result<OccupationVector> {
    occupation_probs_with(potential, n, a, Tolerance::default())
}

pub fn occupation_probs_with(
    potential: &RadialPotential,
    n: usize,
    a: f64,
    tol: Tolerance,
) -> Result<OccupationVector> {
    check_radius(potential, n, a)?;
    if potential.kind() == EnsembleKind::Custom {
        return occupation_probs_quadrature_with(potential, n, a, tol);
    }
    if a >= potential.support_radius() {
        return Ok(OccupationVector::saturated(
            potential.beta(),
            n,
            a,
            EvaluationPath::ClosedForm,
        ));
    }
    let beta = potential.beta();
    let logs = (0..n)
        .into_par_iter()
        .map(|j| ln_closed_form(potential.kind(), beta, n, j, a, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(OccupationVector::from_logs(beta, n, a, EvaluationPath::ClosedForm, logs))
}

/// `(ln p_j, ln(1 - p_j))` from the family's closed form.
fn ln_closed_form(
    kind: EnsembleKind,
    beta: Beta,
    n: usize,
    j: usize,
    a: f64,
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let nf = n as f64;
    let jf = j as f64;
    // first shape: j+1 (β=2) or 2j+2 (β=4)
    let shape = beta.half() * (jf + 1.0);
    match kind {
        EnsembleKind::Ginibre => ln_reg_inc_gamma_with(shape, beta.half() * nf * a * a, tol),
        EnsembleKind::MittagLeffler { b, c } => {
            let alpha = (shape + c) / b;
            let x = beta.half() * a.powf(2.0 * b) * nf / b;
            ln_reg_inc_gamma_with(alpha, x, tol)
        }
        EnsembleKind::Product { m } => {
            let x = (beta.half() * nf).powi(m as i32) * a * a;
            crate::specfun::gamma_product::ln_gamma_product_pair(m, shape, x, tol)
        }
        EnsembleKind::TruncWeak { c } => ln_reg_inc_beta(a * a, shape, c + 1.0),
        EnsembleKind::TruncStrong { c_tilde } => {
            ln_reg_inc_beta(a * a / (1.0 + c_tilde), shape, beta.half() * c_tilde * nf + 1.0)
        }
        EnsembleKind::Custom => Err(Error::Unsupported("closed form for a custom potential".into())),
    }
}

/// Occupation probabilities by log-domain quadrature of the truncated
/// moments, for any potential whose `g_N` can be evaluated pointwise.
pub fn occupation_probs_quadrature(potential: &RadialPotential, n: usize, a: f64) -> Result<OccupationVector> {
    occupation_probs_quadrature_with(potential, n, a, Tolerance::default())
}

pub fn occupation_probs_quadrature_with(
    potential: &RadialPotential,
    n: usize,
    a: f64,
    tol: Tolerance,
) -> Result<OccupationVector> {
    check_radius(potential, n, a)?;
    if !potential.has_pointwise_g() {
        return Err(Error::Unsupported(format!(
            "quadrature for {} (no pointwise potential)",
            potential.kind()
        )));
    }
    let beta = potential.beta();
    if a >= potential.support_radius() {
        return Ok(OccupationVector::saturated(beta, n, a, EvaluationPath::Quadrature));
    }
    let logs = (0..n)
        .into_par_iter()
        .map(|j| {
            ln_split_moment(potential, n, beta.moment_power(j), a, tol).map_err(|e| match e {
                Error::Quadrature { detail, .. } => Error::Quadrature { index: j, detail },
                other => Error::Quadrature {
                    index: j,
                    detail: other.to_string(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OccupationVector::from_logs(beta, n, a, EvaluationPath::Quadrature, logs))
}

/// `(ln p, ln(1-p))` for `p = ∫_0^a r^k e^{-N g} dr / ∫_0^R r^k e^{-N g} dr`.
fn ln_split_moment(potential: &RadialPotential, n: usize, k: f64, a: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let nf = n as f64;
    let big_r = potential.support_radius();
    let g = |r: f64| potential.g(r).unwrap_or(f64::NAN);
    let saddle = saddle_radius(potential, nf, k, big_r);

    let (inner, outer) = if big_r.is_infinite() {
        // s = ln r: integrand r^{k+1} e^{-N g(r)} ds
        let l = |s: f64| {
            let r = s.exp();
            if r == 0.0 || !r.is_finite() {
                return f64::NEG_INFINITY;
            }
            let gv = g(r);
            if gv == f64::INFINITY {
                return f64::NEG_INFINITY;
            }
            (k + 1.0) * s - nf * gv
        };
        let hint = match saddle {
            Some(r) => {
                let curv = 4.0 * nf * r * r * potential.laplacian(r).unwrap_or(1.0);
                ModeHint {
                    location: r.ln(),
                    scale: if curv > 0.0 { 1.0 / curv.sqrt() } else { 1.0 },
                }
            }
            None => ModeHint {
                location: 0.0,
                scale: 1.0,
            },
        };
        let s_a = a.ln();
        (
            log_integrate(l, f64::NEG_INFINITY, s_a, hint, tol)?,
            log_integrate(l, s_a, f64::INFINITY, hint, tol)?,
        )
    } else {
        // v = logit(r²/R²): integrand ∝ t^{(k+1)/2} (1-t) e^{-N g(R√t)} dv
        let l = |v: f64| {
            let t = logistic(v);
            if t <= 0.0 || t >= 1.0 {
                return f64::NEG_INFINITY;
            }
            let gv = g(big_r * t.sqrt());
            if gv == f64::INFINITY {
                return f64::NEG_INFINITY;
            }
            -0.5 * (k + 1.0) * softplus(-v) - softplus(v) - nf * gv
        };
        let hint = ModeHint {
            location: saddle.map_or(0.0, |r| logit((r / big_r).powi(2))),
            scale: 1.0,
        };
        let v_a = logit((a / big_r).powi(2));
        (
            log_integrate(l, f64::NEG_INFINITY, v_a, hint, tol)?,
            log_integrate(l, v_a, f64::INFINITY, hint, tol)?,
        )
    };
    if inner == f64::NEG_INFINITY && outer == f64::NEG_INFINITY {
        return Err(Error::Quadrature {
            index: 0,
            detail: "moment integrand vanishes everywhere".into(),
        });
    }
    let total = crate::specfun::log_add_exp(inner, outer);
    Ok((inner - total, outer - total))
}

/// Radius where `N r g'(r) = k + 1`, the peak of `r^{k+1} e^{-N g}` in `ln r`.
fn saddle_radius(potential: &RadialPotential, nf: f64, k: f64, big_r: f64) -> Option<f64> {
    let h = |s: f64| {
        let r = s.exp();
        nf * r * potential.g_prime(r).unwrap_or(f64::NAN) - (k + 1.0)
    };
    let upper_cap = if big_r.is_finite() { big_r.ln() - 1e-12 } else { 700.0 };
    let mut lo = -1.0f64.min(upper_cap - 1.0);
    let mut hi = 0.0f64.min(upper_cap);
    for _ in 0..200 {
        if h(lo) < 0.0 {
            break;
        }
        lo = 2.0 * lo - 1.0;
        if lo < -700.0 {
            return None;
        }
    }
    for _ in 0..200 {
        let v = h(hi);
        if v > 0.0 {
            break;
        }
        if hi >= upper_cap {
            return None;
        }
        hi = (2.0 * hi + 1.0).min(upper_cap);
    }
    if !(h(lo) < 0.0 && h(hi) > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Some((0.5 * (lo + hi)).exp())
}

fn logistic(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

fn logit(t: f64) -> f64 {
    (t / (1.0 - t)).ln()
}

/// `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::*;
    use crate::specfun::{reg_inc_beta, reg_inc_gamma};

    #[test]
    fn single_ginibre_term() {
        let v = occupation_probs(&make_ginibre(Beta::Two), 1, 0.8).unwrap();
        assert!((v.probs[0] - (1.0 - (-0.64f64).exp())).abs() < 1e-15);
        assert!((v.complements[0] - (-0.64f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn ml_and_product_reduce_to_ginibre() {
        for beta in [Beta::Two, Beta::Four] {
            let n = 30;
            let gin = occupation_probs(&make_ginibre(beta), n, 0.7).unwrap();
            let ml = occupation_probs(&make_mittag_leffler(beta, 1.0, 0.0, n).unwrap(), n, 0.7).unwrap();
            let pr = occupation_probs(&make_product(beta, 1, n).unwrap(), n, 0.7).unwrap();
            for j in 0..n {
                assert!((gin.probs[j] - ml.probs[j]).abs() < 1e-15);
                assert_eq!(gin.probs[j], pr.probs[j]);
            }
        }
    }

    #[test]
    fn beta_four_is_odd_subsequence() {
        let n = 40;
        let four = occupation_probs(&make_ginibre(Beta::Four), n, 0.6).unwrap();
        // β=2 formulas at 2N with the same argument 2N a²
        for j in 0..n {
            let (p, _) = reg_inc_gamma(2.0 * j as f64 + 2.0, 2.0 * n as f64 * 0.36).unwrap();
            assert!((four.probs[j] - p).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_examples() {
        let gin = make_ginibre(Beta::Two);
        let v = occupation_probs_quadrature(&gin, 50, 0.6).unwrap();
        let (p, _) = reg_inc_gamma(11.0, 18.0).unwrap();
        assert!((v.probs[10] - p).abs() < 1e-8 * p);

        let ts = make_trunc_strong(Beta::Two, 0.8).unwrap();
        let v = occupation_probs_quadrature(&ts, 50, 0.5).unwrap();
        let p = reg_inc_beta(0.25 / 1.8, 6.0, 41.0).unwrap();
        assert!((v.probs[5] - p).abs() < 1e-8 * p);
    }

    #[test]
    fn quadrature_complementarity() {
        let ml = make_mittag_leffler(Beta::Four, 1.5, 0.5, 20).unwrap();
        let v = occupation_probs_quadrature(&ml, 20, 0.7).unwrap();
        for (p, q) in v.probs.iter().zip(&v.complements) {
            assert!((p + q - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn full_support_saturates() {
        let tw = make_trunc_weak(Beta::Two, 2.0, 10).unwrap();
        let v = occupation_probs(&tw, 10, 1.0).unwrap();
        assert!(v.saturated);
        assert!(v.probs.iter().all(|&p| p == 1.0));
        let ts = make_trunc_strong(Beta::Two, 0.8).unwrap();
        assert!(occupation_probs_quadrature(&ts, 10, 2.0).unwrap().saturated);
    }

    #[test]
    fn monotone_beyond_crossover() {
        let pots = [
            make_ginibre(Beta::Two),
            make_mittag_leffler(Beta::Two, 1.5, 0.5, 80).unwrap(),
            make_trunc_strong(Beta::Four, 0.8).unwrap(),
            make_trunc_weak(Beta::Two, 3.0, 80).unwrap(),
        ];
        for p in &pots {
            let v = occupation_probs(p, 80, 0.6).unwrap();
            assert!(v.probs.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{:?}", p.kind());
        }
    }

    #[test]
    fn product_needs_closed_form() {
        let p = make_product(Beta::Two, 2, 10).unwrap();
        assert!(matches!(occupation_probs_quadrature(&p, 10, 0.5), Err(Error::Unsupported(_))));
        assert!(occupation_probs(&p, 10, 0.5).is_ok());
    }

    #[test]
    fn argument_errors() {
        let ml = make_mittag_leffler(Beta::Two, 1.0, 0.0, 10).unwrap();
        assert!(occupation_probs(&ml, 11, 0.5).is_err());
        assert!(occupation_probs(&ml, 10, 0.0).is_err());
        assert!(occupation_probs(&ml, 10, f64::NAN).is_err());
    }
}
