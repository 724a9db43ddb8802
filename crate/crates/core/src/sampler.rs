//! Exact Monte Carlo for the disc count.
//!
//! By rotational invariance the moduli of the eigenvalues are distributed
//! as N independent radii, the `j`-th with density `∝ r^k e^{-N g(r)}`
//! (`k = 2j+1` at β = 2, `4j+3` at β = 4). Sampling those radii directly
//! reproduces every centered-disc count statistic without building a
//! matrix.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Beta, EnsembleKind, MonotoneCubic, RadialPotential};
use crate::error::{domain, Error, Result};
use crate::moments::occupation_probs_quadrature;
use crate::specfun::reg_inc_gamma;

/// Nodes of the tabulated inverse CDF used for custom potentials.
const TABLE_NODES: usize = 400;
/// CDF level treated as 0 or 1 when bracketing the table.
const TABLE_TAIL: f64 = 1e-12;

/// Draws the N radii of one configuration.
pub struct RadialSampler {
    beta: Beta,
    n: usize,
    kind: EnsembleKind,
    /// Inverse CDFs `u ↦ ln r`, one per index, for custom potentials.
    tables: Vec<InverseCdf>,
}

struct InverseCdf {
    lo: f64,
    hi: f64,
    spline: MonotoneCubic,
}

impl InverseCdf {
    fn eval(&self, u: f64) -> f64 {
        self.spline.value(u.clamp(self.lo, self.hi)).exp()
    }
}

impl RadialSampler {
    pub fn new(potential: &RadialPotential, n: usize) -> Result<Self> {
        potential.check_n(n)?;
        if n == 0 {
            return Err(domain("RadialSampler::new", "N must be at least 1"));
        }
        let kind = potential.kind();
        let tables = if kind == EnsembleKind::Custom {
            build_tables(potential, n)?
        } else {
            Vec::new()
        };
        Ok(Self {
            beta: potential.beta(),
            n,
            kind,
            tables,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        (0..self.n).map(|j| self.sample_one(j, rng)).collect()
    }

    /// The `j`-th radius.
    pub fn sample_one<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> Result<f64> {
        let half = self.beta.half();
        let nf = self.n as f64;
        let shape = half * (j as f64 + 1.0);
        Ok(match self.kind {
            EnsembleKind::Ginibre => (gamma(shape, rng)? / (half * nf)).sqrt(),
            EnsembleKind::MittagLeffler { b, c } => {
                (b * gamma((shape + c) / b, rng)? / (half * nf)).powf(1.0 / (2.0 * b))
            }
            EnsembleKind::Product { m } => {
                let mut r2 = 1.0;
                for _ in 0..m {
                    r2 *= gamma(shape, rng)? / (half * nf);
                }
                r2.sqrt()
            }
            EnsembleKind::TruncWeak { c } => beta_draw(shape, c + 1.0, rng)?.sqrt(),
            EnsembleKind::TruncStrong { c_tilde } => {
                ((1.0 + c_tilde) * beta_draw(shape, half * c_tilde * nf + 1.0, rng)?).sqrt()
            }
            EnsembleKind::Custom => self.tables[j].eval(rng.gen::<f64>()),
        })
    }
}

fn gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    Gamma::new(shape, 1.0)
        .map(|d| d.sample(rng))
        .map_err(|e| Error::Sampling(format!("gamma shape {shape}: {e}")))
}

/// Beta(a, b) as `X / (X + Y)` with independent gammas.
fn beta_draw<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let x = gamma(a, rng)?;
    let y = gamma(b, rng)?;
    if x + y == 0.0 {
        return Err(Error::Sampling(format!("beta({a}, {b}): both gamma draws underflowed")));
    }
    Ok(x / (x + y))
}

fn build_tables(potential: &RadialPotential, n: usize) -> Result<Vec<InverseCdf>> {
    let big_r = potential.support_radius();
    let probs_at = |r: f64| occupation_probs_quadrature(potential, n, r);
    let fail = |what: &str| Error::Sampling(format!("inverse CDF table: {what}"));

    let mut r_lo = if big_r.is_finite() { 0.5 * big_r } else { 1.0 };
    for _ in 0..2000 {
        if probs_at(r_lo)?.probs[0] < TABLE_TAIL {
            break;
        }
        r_lo *= 0.5;
        if r_lo < 1e-300 {
            return Err(fail("no radius with negligible mass below it"));
        }
    }
    let r_hi = if big_r.is_finite() {
        big_r
    } else {
        let mut r = 1.0;
        loop {
            if probs_at(r)?.complements[n - 1] < TABLE_TAIL {
                break r;
            }
            r *= 2.0;
            if r > 1e300 {
                return Err(fail("no radius with negligible mass beyond it"));
            }
        }
    };
    let (l0, l1) = (r_lo.ln(), r_hi.ln());
    let nodes: Vec<f64> = (0..TABLE_NODES)
        .map(|i| l0 + (l1 - l0) * i as f64 / (TABLE_NODES - 1) as f64)
        .collect();
    let cdfs = nodes
        .par_iter()
        .map(|&s| probs_at(s.exp()).map(|v| v.probs))
        .collect::<Result<Vec<_>>>()?;

    (0..n)
        .map(|j| {
            let mut u = Vec::with_capacity(TABLE_NODES);
            let mut ln_r = Vec::with_capacity(TABLE_NODES);
            for (k, &s) in nodes.iter().enumerate() {
                let p = cdfs[k][j];
                if u.last().map_or(true, |&last| p > last) {
                    u.push(p);
                    ln_r.push(s);
                }
            }
            if u.len() < 2 {
                return Err(fail(&format!("index {j} has a degenerate CDF on the grid")));
            }
            let spline = MonotoneCubic::new(&u, &ln_r)?;
            Ok(InverseCdf {
                lo: u[0],
                hi: *u.last().unwrap(),
                spline,
            })
        })
        .collect()
}

/// Draws one configuration of radii.
///
/// Custom potentials rebuild their inverse-CDF tables on every call; use a
/// [`RadialSampler`] to sample repeatedly.
pub fn sample_radii<R: Rng + ?Sized>(potential: &RadialPotential, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    RadialSampler::new(potential, n)?.sample(rng)
}

/// Generator for trial `trial` of a run seeded with `seed`. Each trial owns
/// its own stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub trials: usize,
    pub counts: Vec<u32>,
    pub emp_mean: f64,
    pub emp_variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

impl SampleBatch {
    pub fn from_counts(seed: u64, counts: Vec<u32>) -> Result<Self> {
        let t = counts.len();
        if t < 2 {
            return Err(domain("SampleBatch::from_counts", "need at least two trials"));
        }
        let tf = t as f64;
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / tf;
        let (m2, m4) = counts.iter().fold((0.0, 0.0), |(m2, m4), &c| {
            let d = c as f64 - mean;
            let d2 = d * d;
            (m2 + d2, m4 + d2 * d2)
        });
        let (m2, m4) = (m2 / tf, m4 / tf);
        let variance = m2 * tf / (tf - 1.0);
        // Var(s²) ≈ (μ4 - (T-3)/(T-1) σ⁴) / T
        let var_of_var = (m4 - (tf - 3.0) / (tf - 1.0) * variance * variance) / tf;
        Ok(Self {
            seed,
            trials: t,
            counts,
            emp_mean: mean,
            emp_variance: variance,
            se_mean: (variance / tf).sqrt(),
            se_variance: var_of_var.max(0.0).sqrt(),
        })
    }

    /// Empirical frequencies of each count `0..=n`.
    pub fn histogram(&self, n: usize) -> Vec<u64> {
        let mut h = vec![0u64; n + 1];
        for &c in &self.counts {
            h[c as usize] += 1;
        }
        h
    }
}

/// Disc counts from `trials` independent configurations.
pub fn monte_carlo_stats(
    potential: &RadialPotential,
    n: usize,
    a: f64,
    trials: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if trials < 100 {
        return Err(domain("monte_carlo_stats", format!("needs at least 100 trials, got {trials}")));
    }
    if !(a > 0.0) {
        return Err(domain("monte_carlo_stats", format!("radius must be positive, got {a}")));
    }
    let sampler = RadialSampler::new(potential, n)?;
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut count = 0u32;
            for j in 0..n {
                if sampler.sample_one(j, &mut rng)? <= a {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>>>()?;
    SampleBatch::from_counts(seed, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquared {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of observed counts against `expected`
/// probabilities. Neighbouring cells are pooled until each expects at
/// least `min_expected` observations.
pub fn chi_squared(observed: &[u64], expected: &[f64], min_expected: f64) -> Result<ChiSquared> {
    if observed.len() != expected.len() {
        return Err(domain("chi_squared", "observed and expected lengths differ"));
    }
    let total: u64 = observed.iter().sum();
    let tf = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &p) in observed.iter().zip(expected) {
        o += ob as f64;
        e += p * tf;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    if cells.len() < 2 {
        return Err(domain("chi_squared", "fewer than two cells after pooling"));
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let (_, p_value) = reg_inc_gamma(dof as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquared {
        statistic,
        dof,
        p_value,
    })
}
