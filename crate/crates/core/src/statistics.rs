//! Mean, number variance and count law of the eigenvalues in a centered
//! disc, together with their large-N limits in every regime.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::ensembles::{Beta, RadialPotential};
use crate::error::{domain, Error, Result};
use crate::moments::{EvaluationPath, OccupationVector};
use crate::quadrature::integrate;
use crate::specfun::{
    bk_polynomials, erf_erfc, ln_gamma_kernel, ln_reg_inc_beta, ln_reg_inc_gamma, log_gamma, reg_inc_gamma,
    Tolerance,
};

/// Hard cap on the number of terms in the infinite series.
pub const SERIES_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsMeta {
    pub beta: Beta,
    pub n: usize,
    pub a: f64,
    pub path: EvaluationPath,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountStatistics {
    pub mean: f64,
    pub variance: f64,
    /// `P(count = k)` for `k = 0..=N`.
    pub distribution: Option<Vec<f64>>,
    pub meta: StatsMeta,
}

pub fn finite_n_stats(probs: &OccupationVector, with_distribution: bool) -> CountStatistics {
    let mean = probs.probs.iter().sum();
    let variance = probs
        .probs
        .iter()
        .zip(&probs.complements)
        .map(|(p, q)| p * q)
        .sum();
    CountStatistics {
        mean,
        variance,
        distribution: with_distribution.then(|| poisson_binomial(&probs.probs, &probs.complements)),
        meta: StatsMeta {
            beta: probs.beta,
            n: probs.n,
            a: probs.a,
            path: probs.path,
        },
    }
}

/// Law of a sum of independent Bernoulli(`p_j`) indicators.
pub fn poisson_binomial(probs: &[f64], complements: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; probs.len() + 1];
    dist[0] = 1.0;
    for (j, (&p, &q)) in probs.iter().zip(complements).enumerate() {
        for k in (1..=j + 1).rev() {
            dist[k] = dist[k] * q + dist[k - 1] * p;
        }
        dist[0] *= q;
    }
    dist
}

/// Expected Ginibre count from the closed forms with a single incomplete
/// gamma (β = 2) or the β = 2 form at `2N` minus an odd tail (β = 4).
pub fn ginibre_mean_closed(beta: Beta, n: usize, a: f64) -> Result<f64> {
    check_n_a("ginibre_mean_closed", n, a)?;
    match beta {
        Beta::Two => complex_ginibre_mean(n, a),
        Beta::Four => {
            let x = 2.0 * n as f64 * a * a;
            let odd: f64 = (0..n).map(|k| ln_gamma_kernel(2.0 * k as f64 + 1.0, x).exp()).sum();
            Ok(0.5 * complex_ginibre_mean(2 * n, a)? - 0.5 * odd)
        }
    }
}

fn complex_ginibre_mean(n: usize, a: f64) -> Result<f64> {
    let nf = n as f64;
    let x = nf * a * a;
    let (p, _) = reg_inc_gamma(nf, x)?;
    Ok(x + nf * (1.0 - a * a) * p - nf * ln_gamma_kernel(nf, x).exp())
}

/// `E_N - N a²` for Ginibre, without the cancellation of subtracting the
/// two. For `a < 1` at β = 2 it is exponentially small.
pub fn ginibre_mean_excess(beta: Beta, n: usize, a: f64) -> Result<f64> {
    check_n_a("ginibre_mean_excess", n, a)?;
    match beta {
        Beta::Two => complex_ginibre_excess(n, a),
        Beta::Four => {
            let x = 2.0 * n as f64 * a * a;
            let odd: f64 = (0..n).map(|k| ln_gamma_kernel(2.0 * k as f64 + 1.0, x).exp()).sum();
            Ok(0.5 * complex_ginibre_excess(2 * n, a)? - 0.5 * odd)
        }
    }
}

fn complex_ginibre_excess(n: usize, a: f64) -> Result<f64> {
    let nf = n as f64;
    let x = nf * a * a;
    if a >= 1.0 {
        return Ok(complex_ginibre_mean(n, a)? - x);
    }
    // P(N, x) = kernel(N, x) Σ_k x^k / ((N+1)…(N+k)), so the excess is
    // N kernel(N, x) ((1-a²) Σ - 1)
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..100_000 {
        term *= x / (nf + k as f64);
        series += term;
        if term < 1e-17 * series {
            break;
        }
    }
    let bracket = (1.0 - a * a) * series - 1.0;
    Ok(nf * ln_gamma_kernel(nf, x).exp() * bracket)
}

fn check_n_a(func: &'static str, n: usize, a: f64) -> Result<()> {
    if n == 0 {
        return Err(domain(func, "N must be at least 1"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(func, format!("radius must be positive and finite, got {a}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GinibreExpansion {
    pub value: f64,
    /// `N (2 ln a + 1 - a²)` is so negative that the correction vanishes.
    pub prefactor_underflow: bool,
    /// `a` close to 1: the `(1-a²)^{-2k}` terms blow up and the series is
    /// no longer asymptotic at this N.
    pub near_edge: bool,
}

/// `N a²` plus the first `k_max` terms of the large-N correction built from
/// the `b_k` polynomials.
pub fn ginibre_mean_expansion(beta: Beta, n: usize, a: f64, k_max: usize) -> Result<GinibreExpansion> {
    check_n_a("ginibre_mean_expansion", n, a)?;
    if a >= 1.0 {
        return Err(domain("ginibre_mean_expansion", format!("needs a < 1, got {a}")));
    }
    let bks = bk_polynomials(k_max)?;
    let lambda = a * a;
    // m is the effective particle number of the β = 2 series
    let m = (beta.half() as usize * n) as f64;
    let correction_series = |m: f64| -> f64 {
        bks.iter()
            .skip(1)
            .map(|b| {
                let k = b.k as i32;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * b.eval(lambda) / ((1.0 - lambda).powi(2 * k) * m.powi(k))
            })
            .sum()
    };
    // (m λ)^m e^{-mλ} / (m-1)! = m · kernel(m, mλ)
    let ln_pref = m.ln() + ln_gamma_kernel(m, m * lambda);
    let prefactor = ln_pref.exp();
    let near_edge = (1.0 - lambda).powi(2) * m < 4.0;
    let mut value = n as f64 * lambda;
    match beta {
        Beta::Two => value += prefactor * correction_series(m),
        Beta::Four => {
            let x = m * lambda;
            let odd: f64 = (0..n).map(|k| ln_gamma_kernel(2.0 * k as f64 + 1.0, x).exp()).sum();
            value += 0.5 * prefactor * correction_series(m) - 0.5 * odd;
        }
    }
    Ok(GinibreExpansion {
        value,
        prefactor_underflow: prefactor == 0.0,
        near_edge,
    })
}

fn check_unit_interval(func: &'static str, a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(func, format!("needs 0 < a < 1, got {a}")));
    }
    Ok(())
}

/// Bulk variance law `(2a/√π) √(N ΔQ(a)) / β`.
pub fn bulk_prediction(potential: &RadialPotential, n: usize, a: f64) -> Result<f64> {
    check_unit_interval("bulk_prediction", a)?;
    let beta = potential.beta().value();
    Ok(FRAC_2_SQRT_PI * a * (n as f64 * potential.limit_laplacian(a)).sqrt() / beta)
}

/// `β V / √(N ΔQ(a))`, which tends to `2a/√π` in the bulk.
pub fn scaled_variance(potential: &RadialPotential, n: usize, a: f64, variance: f64) -> f64 {
    potential.beta().value() * variance / (n as f64 * potential.limit_laplacian(a)).sqrt()
}

/// The universal edge profile, rising from 0 to 1 across the boundary.
pub fn edge_profile_f(s: f64) -> f64 {
    let (erf_s, erfc_s) = erf_erfc(s);
    let erfc_neg = erf_erfc(-s).1;
    let erfc_neg_sqrt2 = erf_erfc(-SQRT_2 * s).1;
    let third = if s == 0.0 {
        0.0
    } else {
        (PI / 2.0).sqrt() * s * erfc_s * erfc_neg / 2.0
    };
    0.5 * erfc_neg_sqrt2 - (-s * s).exp() * erf_s / SQRT_2 + third
}

/// `f(S) = √(2π) ∫_{-∞}^S erfc(t) erfc(-t) / 4 dt` by quadrature.
pub fn edge_profile_f_integral(s: f64) -> Result<f64> {
    let integrand = |t: f64| {
        let (_, c) = erf_erfc(t);
        c * (2.0 - c)
    };
    // the integrand is below 1e-40 for t < -10
    let lower = (-10.0f64).min(s);
    let tol = Tolerance {
        rel_eps: 1e-13,
        ..Tolerance::default()
    };
    let v = integrate(integrand, lower, s, 1e-15, tol)?;
    Ok((2.0 * PI).sqrt() * v / 4.0)
}

/// Edge radius `a = 1 - S/√(2ΔQ(1)N)` and variance `(2/√π) f(S) √(NΔQ(1)) / β`.
pub fn edge_prediction(potential: &RadialPotential, n: usize, s: f64) -> Result<(f64, f64)> {
    let lap = potential.limit_laplacian(1.0);
    let nf = n as f64;
    let a = 1.0 - s / (2.0 * lap * nf).sqrt();
    if !(a > 0.0) {
        return Err(domain("edge_prediction", format!("S={s} puts the radius at {a}")));
    }
    let v = FRAC_2_SQRT_PI * edge_profile_f(s) * (nf * lap).sqrt() / potential.beta().value();
    Ok((a, v))
}

/// Limiting fraction `a g'(a) / β` of eigenvalues inside the disc.
pub fn lln_fraction(potential: &RadialPotential, a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain("lln_fraction", format!("needs 0 < a <= 1, got {a}")));
    }
    Ok(a * potential.limit_g_prime(a) / potential.beta().value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesLimit {
    pub mean: f64,
    pub variance: f64,
    pub terms: usize,
}

/// Sums `Σ_{j≥1} (p_j, p_j q_j)` from `(ln p_j, ln q_j, tail_bound_j)`,
/// stopping once the bound on the remaining `Σ p` is below `abs_eps`.
fn sum_series<F>(func: &'static str, mut term: F) -> Result<SeriesLimit>
where
    F: FnMut(usize) -> Result<(f64, f64, f64)>,
{
    let eps = Tolerance::default().abs_eps;
    let mut mean = 0.0;
    let mut variance = 0.0;
    for j in 1..=SERIES_CAP {
        let (lp, lq, tail) = term(j)?;
        let p = lp.exp();
        mean += p;
        variance += (lp + lq).exp();
        if tail < eps * mean.max(1e-300) || p == 0.0 {
            return Ok(SeriesLimit {
                mean,
                variance,
                terms: j,
            });
        }
    }
    Err(Error::Convergence {
        func,
        terms: SERIES_CAP,
    })
}

/// Bound on `Σ_{i≥0} P(α + iδ, x)` valid once `α + 1 > x`: each term is
/// below `kernel(α,x)(α+1)/(α+1-x)` and the kernels shrink at least by
/// `(x/(α+1))^δ` per step.
fn gamma_tail_bound(alpha: f64, delta: f64, x: f64) -> f64 {
    if alpha + 1.0 <= x {
        return f64::INFINITY;
    }
    let first = ln_gamma_kernel(alpha, x).exp() * (alpha + 1.0) / (alpha + 1.0 - x);
    let ratio = (x / (alpha + 1.0)).powf(delta.min(1.0));
    first / (1.0 - ratio)
}

fn check_t(func: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(func, format!("T must be positive and finite, got {t}")));
    }
    Ok(())
}

/// Origin limit of the Mittag-Leffler ensemble at `a = T / N^{1/2b}`.
pub fn origin_limit_ml(beta: Beta, b: f64, c: f64, t: f64) -> Result<SeriesLimit> {
    check_t("origin_limit_ml", t)?;
    if !(b > 0.0) || !(c > -1.0) {
        return Err(domain("origin_limit_ml", format!("needs b > 0 and c > -1, got b={b}, c={c}")));
    }
    let bv = beta.value();
    let x = bv / (2.0 * b) * t.powf(2.0 * b);
    let delta = bv / (2.0 * b);
    sum_series("origin_limit_ml", |j| {
        let alpha = (bv * j as f64 + 2.0 * c) / (2.0 * b);
        let (lp, lq) = ln_reg_inc_gamma(alpha, x)?;
        Ok((lp, lq, gamma_tail_bound(alpha, delta, x)))
    })
}

/// Origin limit of the product of `m` Ginibre matrices at `a = T / N^{m/2}`.
pub fn origin_limit_product(beta: Beta, m: usize, t: f64) -> Result<SeriesLimit> {
    check_t("origin_limit_product", t)?;
    if m == 0 {
        return Err(domain("origin_limit_product", "m must be at least 1"));
    }
    let half = beta.half();
    let x = half.powi(m as i32) * t * t;
    // product ≤ x forces some factor ≤ x^{1/m}
    let y = x.powf(1.0 / m as f64);
    let tol = Tolerance::default();
    sum_series("origin_limit_product", |j| {
        let shape = half * j as f64;
        let (lp, lq) = crate::specfun::gamma_product::ln_gamma_product_pair(m, shape, x, tol)?;
        Ok((lp, lq, m as f64 * gamma_tail_bound(shape, half, y)))
    })
}

/// Origin limit at strong non-unitarity, `a = √((1+c̃)/(N c̃)) T`.
pub fn origin_limit_trunc_strong(beta: Beta, t: f64) -> Result<SeriesLimit> {
    check_t("origin_limit_trunc_strong", t)?;
    let half = beta.half();
    let x = half * t * t;
    sum_series("origin_limit_trunc_strong", |j| {
        let alpha = half * j as f64;
        let (lp, lq) = ln_reg_inc_gamma(alpha, x)?;
        Ok((lp, lq, gamma_tail_bound(alpha, half, x)))
    })
}

/// Rescaled radius of the origin regime for a built-in potential.
pub fn origin_radius(potential: &RadialPotential, n: usize, t: f64) -> Result<f64> {
    use crate::ensembles::EnsembleKind::*;
    let nf = n as f64;
    Ok(match potential.kind() {
        Ginibre => t / nf.sqrt(),
        MittagLeffler { b, .. } => t / nf.powf(1.0 / (2.0 * b)),
        Product { m } => t / nf.powf(m as f64 / 2.0),
        TruncStrong { c_tilde } => ((1.0 + c_tilde) / (nf * c_tilde)).sqrt() * t,
        other => return Err(Error::Unsupported(format!("origin regime for {other}"))),
    })
}

/// Origin limit for a built-in potential at scale `T`.
pub fn origin_limit(potential: &RadialPotential, t: f64) -> Result<SeriesLimit> {
    use crate::ensembles::EnsembleKind::*;
    let beta = potential.beta();
    match potential.kind() {
        Ginibre => origin_limit_ml(beta, 1.0, 0.0, t),
        MittagLeffler { b, c } => origin_limit_ml(beta, b, c, t),
        Product { m } => origin_limit_product(beta, m, t),
        TruncStrong { .. } => origin_limit_trunc_strong(beta, t),
        other => Err(Error::Unsupported(format!("origin regime for {other}"))),
    }
}

/// Leading small-T behaviour of both E and V in the Mittag-Leffler origin limit.
pub fn small_t_ml(beta: Beta, b: f64, c: f64, t: f64) -> Result<f64> {
    let bv = beta.value();
    let nu = (bv + 2.0 * c) / (2.0 * b);
    let ln = nu * (bv / (2.0 * b)).ln() - log_gamma(nu + 1.0)? + (bv + 2.0 * c) * t.ln();
    Ok(ln.exp())
}

/// Leading small-T behaviour of E and V for the product origin limit,
/// `((-1)^{m-1}/(m-1)!) 2^{m-1} (β/2)^{mβ/2-1} (ln T)^{m-1} T^β`.
pub fn small_t_product(beta: Beta, m: usize, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("small_t_product", "m must be at least 1"));
    }
    let bv = beta.value();
    let k = (m - 1) as i32;
    let mf = m as f64;
    let ln_mag = k as f64 * 2f64.ln() + (mf * bv / 2.0 - 1.0) * beta.half().ln() - log_gamma(mf)?
        + bv * t.ln();
    // (-1)^{m-1} (ln T)^{m-1} = (-ln T)^{m-1} > 0 for T < 1
    Ok(ln_mag.exp() * (-t.ln()).powi(k))
}

/// Weak non-unitarity bulk limit `Σ_{j≥1} I_{a²}(βj/2, c+1)` and the
/// matching variance.
pub fn weak_bulk_limit(beta: Beta, c: f64, a: f64) -> Result<SeriesLimit> {
    check_unit_interval("weak_bulk_limit", a)?;
    if !(c > -1.0) {
        return Err(domain("weak_bulk_limit", format!("needs c > -1, got {c}")));
    }
    let half = beta.half();
    let x = a * a;
    let b = c + 1.0;
    // I_x(α, b) ≈ x^α α^{b-1} / Γ(b): successive terms shrink by about x^{β/2}
    let ratio = x.powf(half);
    sum_series("weak_bulk_limit", |j| {
        let alpha = half * j as f64;
        let (lp, lq) = ln_reg_inc_beta(x, alpha, b)?;
        let growth = ((alpha + half) / alpha).powf((b - 1.0).max(0.0));
        let r = ratio * growth;
        let tail = if r < 1.0 { lp.exp() * r / (1.0 - r) } else { f64::INFINITY };
        Ok((lp, lq, tail))
    })
}

/// Weak non-unitarity edge limit of `V_N / N` at `a = 1 - S/(Nβ)`:
/// `(1/S) ∫_0^S P(c+1,u) Q(c+1,u) du`.
pub fn weak_edge_limit(c: f64, s: f64) -> Result<f64> {
    if !(c > -1.0) {
        return Err(domain("weak_edge_limit", format!("needs c > -1, got {c}")));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("weak_edge_limit", format!("needs finite S >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let mut failed = None;
    // in y = ln u the integrand P Q u is smooth even for c near -1, and
    // below y = -40 it contributes less than e^{-40}
    let integrand = |y: f64| {
        let u = y.exp();
        match reg_inc_gamma(c + 1.0, u) {
            Ok((p, q)) => p * q * u,
            Err(e) => {
                failed = Some(e);
                0.0
            }
        }
    };
    let tol = Tolerance {
        rel_eps: 1e-12,
        ..Tolerance::default()
    };
    let top = s.ln();
    let v = integrate(integrand, top.min(0.0) - 40.0, top, 1e-16, tol)?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(v / s)
}

/// Radius of the weak non-unitarity edge regime.
pub fn weak_edge_radius(beta: Beta, n: usize, s: f64) -> f64 {
    1.0 - s / (n as f64 * beta.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Bulk,
    Edge,
    Origin,
    WeakBulk,
    WeakEdge,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Bulk => "bulk",
            Regime::Edge => "edge",
            Regime::Origin => "origin",
            Regime::WeakBulk => "weak_bulk",
            Regime::WeakEdge => "weak_edge",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bulk" => Regime::Bulk,
            "edge" => Regime::Edge,
            "origin" => Regime::Origin,
            "weak_bulk" => Regime::WeakBulk,
            "weak_edge" => Regime::WeakEdge,
            other => return Err(domain("Regime::from_str", format!("unknown regime {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub abscissa: f64,
    pub finite_n: f64,
    pub asymptotic: f64,
    pub scaled_finite_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCurve {
    pub regime: Regime,
    pub records: Vec<ScanRecord>,
}

impl ScanCurve {
    pub fn new(regime: Regime, records: Vec<ScanRecord>) -> Result<Self> {
        if records.windows(2).any(|w| !(w[1].abscissa > w[0].abscissa)) {
            return Err(domain("ScanCurve::new", "abscissae must be strictly increasing"));
        }
        Ok(Self { regime, records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::*;
    use crate::moments::occupation_probs;

    fn stats(p: &RadialPotential, n: usize, a: f64) -> CountStatistics {
        finite_n_stats(&occupation_probs(p, n, a).unwrap(), true)
    }

    #[test]
    fn single_particle_variance() {
        let a: f64 = 0.7;
        let s = stats(&make_ginibre(Beta::Two), 1, a);
        let e = (-a * a).exp();
        assert!((s.variance - (1.0 - e) * e).abs() < 1e-15);
        assert!((s.mean - (1.0 - e)).abs() < 1e-15);
        assert!((ginibre_mean_closed(Beta::Two, 1, a).unwrap() - (1.0 - e)).abs() < 1e-15);
    }

    #[test]
    fn distribution_moments() {
        let p = make_mittag_leffler(Beta::Four, 1.5, 0.5, 60).unwrap();
        let s = stats(&p, 60, 0.8);
        let d = s.distribution.as_ref().unwrap();
        let total: f64 = d.iter().sum();
        let m1: f64 = d.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        let m2: f64 = d.iter().enumerate().map(|(k, w)| (k as f64 - m1).powi(2) * w).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!((m1 - s.mean).abs() < 1e-8);
        assert!((m2 - s.variance).abs() < 1e-8);
        let v = occupation_probs(&p, 60, 0.8).unwrap();
        let gap: f64 = v.complements.iter().product();
        assert!((d[0] - gap).abs() <= 1e-12 * gap);
    }

    #[test]
    fn saturated_disc() {
        let p = make_trunc_weak(Beta::Two, 1.0, 20).unwrap();
        let s = stats(&p, 20, 1.5);
        assert_eq!((s.mean, s.variance), (20.0, 0.0));
    }

    #[test]
    fn closed_means_match_sums() {
        for beta in [Beta::Two, Beta::Four] {
            for (n, a) in [(200, 0.6), (37, 1.3)] {
                let exact = stats(&make_ginibre(beta), n, a).mean;
                let closed = ginibre_mean_closed(beta, n, a).unwrap();
                assert!((exact - closed).abs() < 1e-10 * exact, "{beta} {n} {a}");
            }
        }
    }

    #[test]
    fn excess_matches_difference() {
        for beta in [Beta::Two, Beta::Four] {
            for (n, a) in [(5, 0.8), (30, 0.9), (12, 1.2)] {
                let diff = ginibre_mean_closed(beta, n, a).unwrap() - n as f64 * a * a;
                let ex = ginibre_mean_excess(beta, n, a).unwrap();
                assert!((diff - ex).abs() < 1e-12, "{beta} {n} {a}: {diff} {ex}");
            }
        }
        let tiny = ginibre_mean_excess(Beta::Two, 1600, 0.6).unwrap();
        assert!(tiny < 0.0 && tiny > -1e-200);
    }

    #[test]
    fn expansion_close_to_exact() {
        let exact = ginibre_mean_closed(Beta::Two, 100, 0.5).unwrap();
        let e = ginibre_mean_expansion(Beta::Two, 100, 0.5, 3).unwrap();
        assert!((e.value - exact).abs() < 1e-6 * exact);
        assert!(!e.near_edge);
        let exact = ginibre_mean_closed(Beta::Four, 50, 0.8).unwrap();
        let e = ginibre_mean_expansion(Beta::Four, 50, 0.8, 4).unwrap();
        assert!((e.value - exact).abs() < 1e-6 * exact);
        assert!(ginibre_mean_expansion(Beta::Two, 10, 0.99, 3).unwrap().near_edge);
        assert!(ginibre_mean_expansion(Beta::Two, 100_000, 0.1, 3).unwrap().prefactor_underflow);
    }

    #[test]
    fn expansion_prefactor_is_exponentially_small() {
        for a in [0.05, 0.3, 0.6, 0.9, 0.999f64] {
            assert!(2.0 * a.ln() + 1.0 - a * a < 0.0);
        }
    }

    #[test]
    fn edge_profile_values() {
        assert!((edge_profile_f(0.0) - 0.5).abs() < 1e-16);
        assert!((edge_profile_f(12.0) - 1.0).abs() < 1e-14);
        assert!(edge_profile_f(-4.0) <= 1e-6);
        for s in [-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 2.5, 5.0] {
            let closed = edge_profile_f(s);
            let quad = edge_profile_f_integral(s).unwrap();
            assert!((closed - quad).abs() < 1e-10, "S={s}");
        }
    }

    #[test]
    fn edge_profile_increasing() {
        let mut prev = edge_profile_f(-5.0);
        for i in 1..=80 {
            let f = edge_profile_f(-5.0 + 0.1 * i as f64);
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn bulk_and_edge_formulas() {
        let g = make_ginibre(Beta::Four);
        let v = bulk_prediction(&g, 250, 0.4).unwrap();
        assert!((v - 0.4 * (2.0 * 250.0 / (4.0 * PI)).sqrt()).abs() < 1e-12);
        assert!((scaled_variance(&g, 250, 0.4, v) - 0.8 / PI.sqrt()).abs() < 1e-14);
        let ml = make_mittag_leffler(Beta::Two, 1.5, 0.5, 100).unwrap();
        let v = bulk_prediction(&ml, 100, 0.6).unwrap();
        let want = FRAC_2_SQRT_PI * 0.6 * (100.0 * 2.0 * 1.5 * 0.6f64.powf(1.0) / 2.0).sqrt() / 2.0;
        assert!((v - want).abs() < 1e-12 * want);

        let gin = make_ginibre(Beta::Two);
        let (a, v) = edge_prediction(&gin, 500, 0.0).unwrap();
        assert_eq!(a, 1.0);
        assert!((v - (500.0f64).sqrt() / PI.sqrt() / 2.0).abs() < 1e-12);
        assert!(edge_prediction(&gin, 2, 5.0).is_err());
        let (_, far) = edge_prediction(&gin, 500, 9.0).unwrap();
        let bulk_at_one = FRAC_2_SQRT_PI * (500.0f64).sqrt() / 2.0;
        assert!((far - bulk_at_one).abs() < 1e-12 * bulk_at_one);
    }

    #[test]
    fn lln_fractions() {
        let g = make_ginibre(Beta::Two);
        assert!((lln_fraction(&g, 0.6).unwrap() - 0.36).abs() < 1e-15);
        let ml = make_mittag_leffler(Beta::Four, 1.5, 0.5, 10).unwrap();
        assert!((lln_fraction(&ml, 0.6).unwrap() - 0.6f64.powi(3)).abs() < 1e-15);
        let p = make_product(Beta::Two, 3, 10).unwrap();
        let ts = make_trunc_strong(Beta::Four, 0.8).unwrap();
        for pot in [&g, &ml, &p, &ts] {
            assert!((lln_fraction(pot, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_identities() {
        for t in [0.3, 1.0, 2.0] {
            let e2 = origin_limit_ml(Beta::Two, 1.0, 0.0, t).unwrap();
            assert!((e2.mean - t * t).abs() < 1e-12 * t * t.max(1.0));
            let e4 = origin_limit_ml(Beta::Four, 1.0, 0.0, t).unwrap();
            let want = t * t - 0.25 * (1.0 - (-4.0 * t * t).exp());
            assert!((e4.mean - want).abs() < 1e-12 * want.max(1.0));
        }
        let one = origin_limit_trunc_strong(Beta::Two, 1.0).unwrap();
        assert!((one.mean - 1.0).abs() < 1e-13);
    }

    #[test]
    fn origin_triple_point() {
        for beta in [Beta::Two, Beta::Four] {
            for t in [0.5, 1.0, 2.0] {
                let ml = origin_limit_ml(beta, 1.0, 0.0, t).unwrap();
                let pr = origin_limit_product(beta, 1, t).unwrap();
                let ts = origin_limit_trunc_strong(beta, t).unwrap();
                assert!((ml.mean - pr.mean).abs() < 1e-10 && (ml.mean - ts.mean).abs() < 1e-10);
                assert!((ml.variance - pr.variance).abs() < 1e-10);
                assert!((ml.variance - ts.variance).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn small_t_ml_leading_term() {
        let t: f64 = 1e-3;
        let e = origin_limit_ml(Beta::Two, 1.0, 0.0, t).unwrap();
        assert!((small_t_ml(Beta::Two, 1.0, 0.0, t).unwrap() - t * t).abs() < 1e-18);
        assert!((e.variance / small_t_ml(Beta::Two, 1.0, 0.0, t).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn product_series_monotone_in_t() {
        let mut prev = 0.0;
        for t in [0.1, 0.3, 1.0, 3.0] {
            let v = origin_limit_product(Beta::Two, 2, t).unwrap();
            assert!(v.mean > prev && v.variance <= v.mean);
            prev = v.mean;
        }
    }

    #[test]
    fn weak_limits() {
        let a: f64 = 0.6;
        let w = weak_bulk_limit(Beta::Two, 0.0, a).unwrap();
        assert!((w.mean - a * a / (1.0 - a * a)).abs() < 1e-12);
        let small = weak_bulk_limit(Beta::Two, 1.5, 0.01).unwrap();
        let beta_fn = crate::specfun::ln_beta(1.0, 2.5).exp();
        assert!((small.mean * beta_fn / 1e-4 - 1.0).abs() < 1e-3);
        // at β = 4 the first term is I_x(2, b) ~ x² / (2 B(2, b))
        let small = weak_bulk_limit(Beta::Four, 1.5, 0.01).unwrap();
        let beta_fn = crate::specfun::ln_beta(2.0, 2.5).exp();
        assert!((small.mean * 2.0 * beta_fn / 1e-8 - 1.0).abs() < 1e-3);
        assert!(weak_bulk_limit(Beta::Two, -0.999, 0.5).unwrap().variance < 1e-2);

        let want = 0.5 - (-1.0f64).exp() + 0.5 * (-2.0f64).exp();
        assert!((weak_edge_limit(0.0, 1.0).unwrap() - want).abs() < 1e-10);
        assert_eq!(weak_edge_limit(0.0, 0.0).unwrap(), 0.0);
        assert!(weak_edge_limit(-0.999, 5.0).unwrap() < 1e-2);
    }

    #[test]
    fn scan_curve_order() {
        let r = |x| ScanRecord {
            abscissa: x,
            finite_n: 0.0,
            asymptotic: 0.0,
            scaled_finite_n: 0.0,
        };
        assert!(ScanCurve::new(Regime::Bulk, vec![r(0.1), r(0.2)]).is_ok());
        assert!(ScanCurve::new(Regime::Bulk, vec![r(0.2), r(0.2)]).is_err());
        assert_eq!("weak_edge".parse::<Regime>().unwrap(), Regime::WeakEdge);
    }
}
