//! Numbered acceptance checks shared by the test suite and the `verify`
//! command. Every tolerance used is a named constant below.

use std::f64::consts::FRAC_2_SQRT_PI;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::ensembles::*;
use crate::error::Result;
use crate::moments::{occupation_probs, occupation_probs_quadrature, OccupationVector};
use crate::sampler::{chi_squared, monte_carlo_stats};
use crate::specfun::{bk_polynomials, gamma_product_pair, reg_inc_beta_pair, reg_inc_gamma};
use crate::statistics::*;

pub const IDENTITY_TOL: f64 = 1e-9;
pub const GINIBRE_CLOSED_REL_TOL: f64 = 1e-10;
pub const EXPANSION_REL_TOL: f64 = 1e-5;
pub const BULK_ABS_TOL: f64 = 0.03;
pub const EDGE_ABS_TOL_SMALL_N: f64 = 0.05;
pub const EDGE_ABS_TOL_LARGE_N: f64 = 0.03;
pub const ORIGIN_REL_TOL: f64 = 0.01;
pub const TRIPLE_POINT_TOL: f64 = 1e-10;
pub const SMALL_T_ML_BAND: (f64, f64) = (0.95, 1.05);
pub const SMALL_T_PRODUCT_BAND: (f64, f64) = (0.9, 1.1);
pub const WEAK_DEGENERATE_MAX: f64 = 1e-2;
pub const WEAK_EDGE_EXACT_TOL: f64 = 1e-10;
pub const WEAK_EDGE_FINITE_N_TOL: f64 = 0.02;
pub const QUADRATURE_REL_TOL: f64 = 1e-8;
pub const MC_SIGMAS: f64 = 3.0;
pub const CHI_SQUARED_LEVEL: f64 = 1e-3;

pub const MC_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Identities, closed forms and limits; no simulation or large scans.
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: Level,
    /// Scale every asymptotic prediction by 1.05 so that the suite must fail.
    pub negative_control: bool,
}

impl VerifyOptions {
    fn skew(&self) -> f64 {
        if self.negative_control {
            1.05
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Measured worst case, human readable.
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckResult {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }
}

pub const CRITERIA: [(u8, &str, u64, bool); 12] = [
    (1, "special-function identities", 5, true),
    (2, "Ginibre closed-form means", 5, true),
    (3, "b_k expansion of the Ginibre mean", 5, true),
    (4, "bulk variance law", 120, false),
    (5, "edge variance profile", 120, false),
    (6, "origin limits", 60, true),
    (7, "origin triple point", 5, true),
    (8, "small-T asymptotes", 30, true),
    (9, "weak non-unitarity", 60, true),
    (10, "quadrature vs closed forms", 60, true),
    (11, "Monte Carlo vs exact", 180, false),
    (12, "law of large numbers", 60, false),
];

/// Runs every criterion enabled at `opts.level`.
pub fn run_all(opts: VerifyOptions) -> Vec<CheckResult> {
    CRITERIA
        .iter()
        .filter(|c| opts.level == Level::Full || c.3)
        .map(|c| run_criterion(c.0, opts))
        .collect()
}

pub fn run_criterion(id: u8, opts: VerifyOptions) -> CheckResult {
    let &(_, name, budget, _) = CRITERIA.iter().find(|c| c.0 == id).expect("criterion id in 1..=12");
    let start = Instant::now();
    let outcome = match id {
        1 => identities(opts),
        2 => ginibre_closed(opts),
        3 => expansion(opts),
        4 => bulk(opts),
        5 => edge(opts),
        6 => origin(opts),
        7 => triple_point(opts),
        8 => small_t(opts),
        9 => weak(opts),
        10 => quadrature_oracle(opts),
        11 => monte_carlo(opts),
        12 => lln(opts),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (passed, detail) = match outcome {
        Ok((ok, d)) => (ok, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        id,
        name,
        passed,
        detail,
        elapsed,
        budget,
    }
}

type Outcome = Result<(bool, String)>;

fn stats(p: &RadialPotential, n: usize, a: f64) -> Result<CountStatistics> {
    Ok(finite_n_stats(&occupation_probs(p, n, a)?, false))
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / y.abs()
    }
}

fn identities(opts: VerifyOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    for &alpha in &[0.5, 1.0, 3.7, 25.0, 400.0] {
        for &x in &[1e-3, 0.5, 2.0, 30.0, 420.0] {
            let (p, q) = reg_inc_gamma(alpha, x)?;
            worst = worst.max((p + q - 1.0).abs());
        }
    }
    for &(a, b) in &[(0.5, 0.5), (2.0, 3.0), (40.0, 7.5), (1.0, 200.0)] {
        for &x in &[0.01, 0.3, 0.5, 0.9] {
            let (i, _) = reg_inc_beta_pair(x, a, b)?;
            let (mirror, _) = reg_inc_beta_pair(1.0 - x, b, a)?;
            worst = worst.max((i + mirror - 1.0).abs());
        }
    }
    for m in 1..=3 {
        for j in 1..=10u64 {
            for &x in &[0.05, 1.0, 8.0, 60.0] {
                let (c, s) = gamma_product_pair(m, j, x, Default::default())?;
                worst = worst.max((c + s - 1.0).abs());
            }
        }
    }
    for s in edge_points() {
        let d = (edge_profile_f(s) * opts.skew() - edge_profile_f_integral(s)?).abs();
        worst = worst.max(d);
    }
    Ok((worst <= IDENTITY_TOL, format!("max deviation {worst:.2e}")))
}

fn ginibre_closed(opts: VerifyOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [Beta::Two, Beta::Four] {
        for n in [10, 100, 500] {
            for a in [0.3, 0.7, 0.95] {
                let sum = stats(&make_ginibre(beta), n, a)?.mean;
                let closed = ginibre_mean_closed(beta, n, a)? * opts.skew();
                worst = worst.max(rel(closed, sum));
            }
        }
    }
    Ok((worst <= GINIBRE_CLOSED_REL_TOL, format!("max rel deviation {worst:.2e}")))
}

fn expansion(opts: VerifyOptions) -> Outcome {
    let bks = bk_polynomials(2)?;
    let exact_bk = bks[1].coeffs == [0, 1] && bks[2].coeffs == [0, 1, 2];
    let exact = ginibre_mean_closed(Beta::Two, 200, 0.5)?;
    let approx = ginibre_mean_expansion(Beta::Two, 200, 0.5, 3)?.value * opts.skew();
    let err = rel(approx, exact);
    Ok((
        exact_bk && err <= EXPANSION_REL_TOL,
        format!("rel error {err:.2e}; b_1, b_2 exact: {exact_bk}"),
    ))
}

fn bulk_cases() -> Result<Vec<(String, RadialPotential, usize)>> {
    Ok(vec![
        ("ginibre b2".into(), make_ginibre(Beta::Two), 500),
        ("ginibre b4".into(), make_ginibre(Beta::Four), 250),
        ("ml(1.5,0.5)".into(), make_mittag_leffler(Beta::Two, 1.5, 0.5, 500)?, 500),
        ("product m=3".into(), make_product(Beta::Two, 3, 500)?, 500),
        ("trunc_strong 0.8".into(), make_trunc_strong(Beta::Two, 0.8)?, 500),
    ])
}

fn bulk(opts: VerifyOptions) -> Outcome {
    let mut worst = (0.0, String::new());
    for (label, p, n) in bulk_cases()? {
        for a in [0.3, 0.5, 0.7] {
            let v = stats(&p, n, a)?.variance;
            let d = (scaled_variance(&p, n, a, v) - FRAC_2_SQRT_PI * a * opts.skew()).abs();
            if d >= worst.0 {
                worst = (d, format!("{label} a={a}"));
            }
        }
    }
    Ok((worst.0 <= BULK_ABS_TOL, format!("max |dev| {:.4} at {}", worst.0, worst.1)))
}

fn edge(opts: VerifyOptions) -> Outcome {
    let p = make_ginibre(Beta::Two);
    let mut devs = Vec::new();
    for n in [200, 800] {
        let mut worst: f64 = 0.0;
        for s in [-1.0, 0.0, 1.0, 2.0] {
            let (a, _) = edge_prediction(&p, n, s)?;
            let v = stats(&p, n, a)?.variance;
            let scaled = 2.0 * v / (n as f64 * p.limit_laplacian(1.0)).sqrt();
            worst = worst.max((scaled - FRAC_2_SQRT_PI * edge_profile_f(s) * opts.skew()).abs());
        }
        devs.push(worst);
    }
    let ok = devs[0] <= EDGE_ABS_TOL_SMALL_N && devs[1] <= EDGE_ABS_TOL_LARGE_N && devs[1] < devs[0];
    Ok((
        ok,
        format!(
            "max |dev| {:.4} (N=200), {:.4} (N=800); ratio {:.2}",
            devs[0],
            devs[1],
            devs[0] / devs[1]
        ),
    ))
}

fn origin(opts: VerifyOptions) -> Outcome {
    let n = 2000;
    let mut worst = (0.0, String::new());
    for beta in [Beta::Two, Beta::Four] {
        for (b, c) in [(1.0, 0.0), (1.5, 0.5)] {
            let p = make_mittag_leffler(beta, b, c, n)?;
            for t in [0.5, 1.0, 2.0] {
                let a = origin_radius(&p, n, t)?;
                let v = stats(&p, n, a)?.variance;
                let lim = origin_limit_ml(beta, b, c, t)?.variance * opts.skew();
                let d = rel(v, lim);
                if d >= worst.0 {
                    worst = (d, format!("ml({b},{c}) {beta} T={t}"));
                }
            }
        }
    }
    let g = make_ginibre(Beta::Four);
    for t in [0.5, 1.0, 2.0] {
        let e = stats(&g, n, t / (n as f64).sqrt())?.mean;
        let lim = (t * t - 0.25 * (1.0 - (-4.0 * t * t).exp())) * opts.skew();
        let d = rel(e, lim);
        if d >= worst.0 {
            worst = (d, format!("ginibre mean b4 T={t}"));
        }
    }
    Ok((worst.0 <= ORIGIN_REL_TOL, format!("max rel dev {:.2e} at {}", worst.0, worst.1)))
}

fn triple_point(opts: VerifyOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [Beta::Two, Beta::Four] {
        for t in [0.5, 1.0, 2.0] {
            let ml = origin_limit_ml(beta, 1.0, 0.0, t)?;
            let pr = origin_limit_product(beta, 1, t)?;
            let ts = origin_limit_trunc_strong(beta, t)?;
            for (x, y) in [
                (ml.mean * opts.skew(), pr.mean),
                (ml.mean, ts.mean),
                (ml.variance, pr.variance),
                (ml.variance, ts.variance),
            ] {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok((worst <= TRIPLE_POINT_TOL, format!("max deviation {worst:.2e}")))
}

fn small_t(opts: VerifyOptions) -> Outcome {
    let mut ratios = Vec::new();
    let mut ok = true;
    let in_band = |r: f64, band: (f64, f64)| r >= band.0 && r <= band.1;
    for beta in [Beta::Two, Beta::Four] {
        for (b, c) in [(1.0, 0.0), (1.5, 0.5)] {
            let lim = origin_limit_ml(beta, b, c, 0.05)?;
            let asym = small_t_ml(beta, b, c, 0.05)? * opts.skew();
            for r in [lim.mean / asym, lim.variance / asym] {
                ok &= in_band(r, SMALL_T_ML_BAND);
                ratios.push(r);
            }
        }
    }
    let ml_range = range(&ratios);
    ratios.clear();
    for m in [2, 3] {
        let lim = origin_limit_product(Beta::Two, m, 0.02)?;
        let asym = small_t_product(Beta::Two, m, 0.02)? * opts.skew();
        for r in [lim.mean / asym, lim.variance / asym] {
            ok &= in_band(r, SMALL_T_PRODUCT_BAND);
            ratios.push(r);
        }
    }
    let pr_range = range(&ratios);
    Ok((
        ok,
        format!(
            "ML ratios [{:.4}, {:.4}], product ratios [{:.4}, {:.4}]",
            ml_range.0, ml_range.1, pr_range.0, pr_range.1
        ),
    ))
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Radii of the finite-N weak edge comparison.
pub fn weak_edge_window() -> Vec<f64> {
    (0..=20).map(|i| 0.95 + 0.0025 * i as f64).collect()
}

fn weak(opts: VerifyOptions) -> Outcome {
    let degenerate = [Beta::Two, Beta::Four]
        .iter()
        .map(|&b| weak_bulk_limit(b, -0.999, 0.5).map(|w| w.variance))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let exact = 0.5 - (-1.0f64).exp() + 0.5 * (-2.0f64).exp();
    let edge_err = (weak_edge_limit(0.0, 1.0)? * opts.skew() - exact).abs();

    let (n, c, beta) = (500, 5.0, Beta::Two);
    let p = make_trunc_weak(beta, c, n)?;
    let mut worst: f64 = 0.0;
    for a in weak_edge_window() {
        let s = n as f64 * beta.value() * (1.0 - a);
        let v = stats(&p, n, a)?.variance / n as f64;
        worst = worst.max((v - weak_edge_limit(c, s)? * opts.skew()).abs());
    }
    let ok = degenerate <= WEAK_DEGENERATE_MAX && edge_err <= WEAK_EDGE_EXACT_TOL && worst <= WEAK_EDGE_FINITE_N_TOL;
    Ok((
        ok,
        format!("V(c=-0.999) {degenerate:.2e}; c=0,S=1 error {edge_err:.1e}; N=500 window max |dev| {worst:.4}"),
    ))
}

/// Every closed-form family with pointwise potentials, for the quadrature oracle.
pub fn quadrature_families(beta: Beta, n: usize) -> Result<Vec<RadialPotential>> {
    Ok(vec![
        make_ginibre(beta),
        make_mittag_leffler(beta, 1.5, 0.5, n)?,
        make_trunc_weak(beta, 1.5, n)?,
        make_trunc_strong(beta, 0.8)?,
    ])
}

/// Largest relative disagreement between two occupation vectors, over both
/// the probabilities and their complements.
pub fn occupation_disagreement(x: &OccupationVector, y: &OccupationVector) -> f64 {
    x.probs
        .iter()
        .zip(&y.probs)
        .chain(x.complements.iter().zip(&y.complements))
        .map(|(&u, &v)| rel(u, v))
        .fold(0.0, f64::max)
}

fn quadrature_oracle(opts: VerifyOptions) -> Outcome {
    let mut worst = (0.0, String::new());
    for beta in [Beta::Two, Beta::Four] {
        for n in [20, 100] {
            for p in quadrature_families(beta, n)? {
                for a in [0.3, 0.7, 0.95] {
                    let closed = occupation_probs(&p, n, a)?;
                    let mut quad = occupation_probs_quadrature(&p, n, a)?;
                    quad.probs.iter_mut().for_each(|v| *v *= opts.skew());
                    let d = occupation_disagreement(&quad, &closed);
                    if d >= worst.0 {
                        worst = (d, format!("{} {beta} N={n} a={a}", p.kind()));
                    }
                }
            }
        }
    }
    Ok((worst.0 <= QUADRATURE_REL_TOL, format!("max rel dev {:.2e} at {}", worst.0, worst.1)))
}

/// Built-ins simulated by the Monte Carlo check, at their N.
pub fn monte_carlo_cases() -> Result<Vec<RadialPotential>> {
    let mut out = Vec::new();
    for (beta, n) in [(Beta::Two, 100), (Beta::Four, 50)] {
        out.push(make_ginibre(beta));
        out.push(make_mittag_leffler(beta, 1.5, 0.5, n)?);
        out.push(make_product(beta, 3, n)?);
        out.push(make_trunc_weak(beta, 5.0, n)?);
        out.push(make_trunc_strong(beta, 0.8)?);
    }
    Ok(out)
}

fn monte_carlo(opts: VerifyOptions) -> Outcome {
    let a = 0.5;
    let mut worst = (0.0, String::new());
    for p in monte_carlo_cases()? {
        let n = if p.beta() == Beta::Two { 100 } else { 50 };
        let exact = stats(&p, n, a)?.variance * opts.skew();
        let batch = monte_carlo_stats(&p, n, a, 10_000, MC_SEED)?;
        let z = (batch.emp_variance - exact).abs() / batch.se_variance;
        if z >= worst.0 {
            worst = (z, format!("{} {}", p.kind(), p.beta()));
        }
    }
    let mut min_p: f64 = 1.0;
    for beta in [Beta::Two, Beta::Four] {
        let p = make_ginibre(beta);
        let v = occupation_probs(&p, 30, a * opts.skew())?;
        let expected = poisson_binomial(&v.probs, &v.complements);
        let batch = monte_carlo_stats(&p, 30, a, 100_000, MC_SEED)?;
        min_p = min_p.min(chi_squared(&batch.histogram(30), &expected, 5.0)?.p_value);
    }
    Ok((
        worst.0 <= MC_SIGMAS && min_p >= CHI_SQUARED_LEVEL,
        format!("max |z| {:.2} ({}); min chi-squared p {min_p:.3}", worst.0, worst.1),
    ))
}

fn lln(opts: VerifyOptions) -> Outcome {
    let a = 0.6;
    let mut ok = true;
    let mut last = Vec::new();
    for beta in [Beta::Two, Beta::Four] {
        let pots = |n| -> Result<Vec<RadialPotential>> {
            Ok(vec![make_ginibre(beta), make_mittag_leffler(beta, 1.5, 0.5, n)?])
        };
        let mut devs = vec![Vec::new(); 2];
        for n in [100, 400, 1600] {
            for (i, p) in pots(n)?.iter().enumerate() {
                let nf = n as f64;
                let d = if p.kind() == EnsembleKind::Ginibre && !opts.negative_control {
                    // E_N/N - a² directly; the difference of the two rounds to noise
                    ginibre_mean_excess(beta, n, a)? / nf
                } else {
                    stats(p, n, a)?.mean / nf - lln_fraction(p, a)? * opts.skew()
                };
                devs[i].push(d.abs());
            }
        }
        for d in devs {
            ok &= d.windows(2).all(|w| w[1] < w[0]);
            last.push(d[2]);
        }
    }
    Ok((ok, format!("deviation at N=1600 at most {:.2e}", last.iter().fold(0.0, |m: f64, &x| m.max(x)))))
}

/// Abscissae of the closed-form vs integral check of the edge profile.
fn edge_points() -> Vec<f64> {
    vec![-4.0, -2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.0, 3.5, 6.0]
}
