//! Radial potentials `Q_N(z) = g_N(|z|)` for the built-in ensembles and for
//! user-supplied potentials, plus the suitability checks.
//!
//! Built-ins are normalized so that the droplet is the unit disc. Two views
//! are exposed: the finite-`N` potential `g_N` (what the moments integrate
//! against) and its `N → ∞` limit `g` (what the asymptotic laws use).

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Symmetry class: 2 (complex, determinantal) or 4 (symplectic, Pfaffian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Beta {
    Two,
    Four,
}

impl Beta {
    pub fn value(self) -> f64 {
        match self {
            Beta::Two => 2.0,
            Beta::Four => 4.0,
        }
    }

    /// `β/2`, the shape multiplier in all the closed forms.
    pub fn half(self) -> f64 {
        self.value() / 2.0
    }

    /// Exponent of `r` in the radial moment with index `j`: `2j+1` or `4j+3`.
    pub fn moment_power(self, j: usize) -> f64 {
        match self {
            Beta::Two => 2.0 * j as f64 + 1.0,
            Beta::Four => 4.0 * j as f64 + 3.0,
        }
    }
}

impl TryFrom<u8> for Beta {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(Beta::Two),
            4 => Ok(Beta::Four),
            other => Err(domain("Beta", format!("beta must be 2 or 4, got {other}"))),
        }
    }
}

impl From<Beta> for u8 {
    fn from(b: Beta) -> u8 {
        b.value() as u8
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Which closed forms apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EnsembleKind {
    Ginibre,
    MittagLeffler { b: f64, c: f64 },
    Product { m: usize },
    TruncWeak { c: f64 },
    TruncStrong { c_tilde: f64 },
    Custom,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleKind::Ginibre => write!(f, "ginibre"),
            EnsembleKind::MittagLeffler { b, c } => write!(f, "mittag_leffler(b={b}, c={c})"),
            EnsembleKind::Product { m } => write!(f, "product(m={m})"),
            EnsembleKind::TruncWeak { c } => write!(f, "trunc_weak(c={c})"),
            EnsembleKind::TruncStrong { c_tilde } => write!(f, "trunc_strong(c_tilde={c_tilde})"),
            EnsembleKind::Custom => write!(f, "custom"),
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum CustomForm {
    Closures { g: RealFn, g_prime: RealFn },
    Table(Arc<MonotoneCubic>),
}

/// A rotationally invariant potential.
#[derive(Clone)]
pub struct RadialPotential {
    beta: Beta,
    kind: EnsembleKind,
    n: Option<usize>,
    support_radius: f64,
    custom: Option<CustomForm>,
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("beta", &self.beta)
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("potential", "N must be at least 1"));
    }
    Ok(())
}

pub fn make_ginibre(beta: Beta) -> RadialPotential {
    RadialPotential {
        beta,
        kind: EnsembleKind::Ginibre,
        n: None,
        support_radius: f64::INFINITY,
        custom: None,
    }
}

/// `g_N(r) = (β/2b) r^{2b} - (2c/N) ln r`.
pub fn make_mittag_leffler(beta: Beta, b: f64, c: f64, n: usize) -> Result<RadialPotential> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(domain("make_mittag_leffler", format!("b must be positive, got {b}")));
    }
    if !(c > -1.0) || !c.is_finite() {
        return Err(domain("make_mittag_leffler", format!("c must exceed -1, got {c}")));
    }
    check_n(n)?;
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::MittagLeffler { b, c },
        n: Some(n),
        support_radius: f64::INFINITY,
        custom: None,
    })
}

/// Product of `m` Ginibre matrices. The weight is a Meijer-G function and is
/// never evaluated; moments go through the Gamma-product CDF.
pub fn make_product(beta: Beta, m: usize, n: usize) -> Result<RadialPotential> {
    if m == 0 {
        return Err(domain("make_product", "m must be at least 1"));
    }
    check_n(n)?;
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::Product { m },
        n: Some(n),
        support_radius: f64::INFINITY,
        custom: None,
    })
}

/// `g_N(r) = -(c/N) ln(1 - r²)` on the unit disc.
pub fn make_trunc_weak(beta: Beta, c: f64, n: usize) -> Result<RadialPotential> {
    if !(c > -1.0) || !c.is_finite() {
        return Err(domain("make_trunc_weak", format!("c must exceed -1, got {c}")));
    }
    check_n(n)?;
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::TruncWeak { c },
        n: Some(n),
        support_radius: 1.0,
        custom: None,
    })
}

/// `g(r) = -(β c̃/2) ln(1 - r²/(1+c̃))` on the disc of radius `√(1+c̃)`.
pub fn make_trunc_strong(beta: Beta, c_tilde: f64) -> Result<RadialPotential> {
    if !(c_tilde > 0.0) || !c_tilde.is_finite() {
        return Err(domain(
            "make_trunc_strong",
            format!("c_tilde must be positive, got {c_tilde}"),
        ));
    }
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::TruncStrong { c_tilde },
        n: None,
        support_radius: (1.0 + c_tilde).sqrt(),
        custom: None,
    })
}

/// Custom potential from `g` and `g'`. `support_radius` may be infinite; on a
/// finite support `g` is taken to be `+∞` outside.
pub fn make_custom<G, D>(beta: Beta, g: G, g_prime: D, support_radius: f64) -> Result<RadialPotential>
where
    G: Fn(f64) -> f64 + Send + Sync + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !(support_radius > 0.0) {
        return Err(domain("make_custom", "support radius must be positive"));
    }
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::Custom,
        n: None,
        support_radius,
        custom: Some(CustomForm::Closures {
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
        }),
    })
}

/// Custom potential from a table of `(r, g(r))` pairs with strictly
/// increasing `r`, interpolated by a monotone cubic. The support ends at the
/// last tabulated radius.
pub fn make_tabulated(beta: Beta, radii: &[f64], values: &[f64]) -> Result<RadialPotential> {
    let table = MonotoneCubic::new(radii, values)?;
    let support_radius = *radii.last().unwrap_or(&0.0);
    Ok(RadialPotential {
        beta,
        kind: EnsembleKind::Custom,
        n: None,
        support_radius,
        custom: Some(CustomForm::Table(Arc::new(table))),
    })
}

/// Parse the two-column text format: `r g(r)` per line, `#` starts a comment.
pub fn parse_tabulated(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                detail: format!("expected two columns, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 1,
                detail: format!("{s:?}: {e}"),
            })
        };
        let r = parse(fields[0])?;
        let g = parse(fields[1])?;
        if !r.is_finite() || !g.is_finite() || r < 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                detail: "radius must be finite and nonnegative, g finite".into(),
            });
        }
        if let Some(&prev) = radii.last() {
            if r <= prev {
                return Err(Error::Parse {
                    line: idx + 1,
                    detail: format!("radii must be strictly increasing ({r} after {prev})"),
                });
            }
        }
        radii.push(r);
        values.push(g);
    }
    if radii.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            detail: "need at least two data rows".into(),
        });
    }
    Ok((radii, values))
}

pub fn load_tabulated(beta: Beta, path: &Path) -> Result<RadialPotential> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        detail: format!("{}: {e}", path.display()),
    })?;
    let (r, g) = parse_tabulated(&text)?;
    make_tabulated(beta, &r, &g)
}

impl RadialPotential {
    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// The `N` baked into an `N`-dependent potential.
    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn n_dependent(&self) -> bool {
        self.n.is_some()
    }

    /// Check that moments requested at `n` match the potential's own `N`.
    pub fn check_n(&self, n: usize) -> Result<()> {
        check_n(n)?;
        match self.n {
            Some(own) if own != n => Err(domain(
                "potential",
                format!("potential was built for N={own}, requested N={n}"),
            )),
            _ => Ok(()),
        }
    }

    /// The same ensemble rebuilt for another `N`.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        check_n(n)?;
        let mut out = self.clone();
        if out.n.is_some() {
            out.n = Some(n);
        }
        Ok(out)
    }

    fn n_f64(&self) -> f64 {
        self.n.unwrap_or(1) as f64
    }

    fn beta_f(&self) -> f64 {
        self.beta.value()
    }

    /// Finite-`N` potential `g_N(r)`; `+∞` outside a finite support.
    pub fn g(&self, r: f64) -> Result<f64> {
        if r > self.support_radius {
            return Ok(f64::INFINITY);
        }
        let beta = self.beta_f();
        Ok(match self.kind {
            EnsembleKind::Ginibre => 0.5 * beta * r * r,
            EnsembleKind::MittagLeffler { b, c } => {
                beta / (2.0 * b) * r.powf(2.0 * b) - 2.0 * c / self.n_f64() * r.ln()
            }
            EnsembleKind::Product { .. } => {
                return Err(Error::Unsupported("finite-N product potential g".into()))
            }
            EnsembleKind::TruncWeak { c } => -(c / self.n_f64()) * (-r * r).ln_1p(),
            EnsembleKind::TruncStrong { c_tilde } => {
                -0.5 * beta * c_tilde * (-r * r / (1.0 + c_tilde)).ln_1p()
            }
            EnsembleKind::Custom => self.custom_g(r),
        })
    }

    /// Finite-`N` derivative `g_N'(r)`.
    pub fn g_prime(&self, r: f64) -> Result<f64> {
        let beta = self.beta_f();
        Ok(match self.kind {
            EnsembleKind::Ginibre => beta * r,
            EnsembleKind::MittagLeffler { b, c } => {
                beta * r.powf(2.0 * b - 1.0) - 2.0 * c / (self.n_f64() * r)
            }
            EnsembleKind::Product { .. } => {
                return Err(Error::Unsupported("finite-N product potential g'".into()))
            }
            EnsembleKind::TruncWeak { c } => 2.0 * c * r / (self.n_f64() * (1.0 - r * r)),
            EnsembleKind::TruncStrong { c_tilde } => beta * c_tilde * r / (1.0 + c_tilde - r * r),
            EnsembleKind::Custom => self.custom_g_prime(r),
        })
    }

    /// Finite-`N` Laplacian `ΔQ_N = (g'/r + g'')/4`.
    pub fn laplacian(&self, r: f64) -> Result<f64> {
        Ok(match self.kind {
            EnsembleKind::TruncWeak { c } => c / (self.n_f64() * (1.0 - r * r).powi(2)),
            EnsembleKind::Custom => self.custom_laplacian(r),
            EnsembleKind::Product { .. } => {
                return Err(Error::Unsupported("finite-N product Laplacian".into()))
            }
            // the log term of Mittag-Leffler is harmonic away from 0
            _ => self.limit_laplacian(r),
        })
    }

    /// `N → ∞` potential `g(r)`.
    pub fn limit_g(&self, r: f64) -> f64 {
        if r > self.support_radius {
            return f64::INFINITY;
        }
        let beta = self.beta_f();
        match self.kind {
            EnsembleKind::Ginibre => 0.5 * beta * r * r,
            EnsembleKind::MittagLeffler { b, .. } => beta / (2.0 * b) * r.powf(2.0 * b),
            EnsembleKind::Product { m } => 0.5 * beta * m as f64 * r.powf(2.0 / m as f64),
            EnsembleKind::TruncWeak { .. } => 0.0,
            EnsembleKind::TruncStrong { c_tilde } => {
                -0.5 * beta * c_tilde * (-r * r / (1.0 + c_tilde)).ln_1p()
            }
            EnsembleKind::Custom => self.custom_g(r),
        }
    }

    /// `N → ∞` derivative `g'(r)`.
    pub fn limit_g_prime(&self, r: f64) -> f64 {
        let beta = self.beta_f();
        match self.kind {
            EnsembleKind::Ginibre => beta * r,
            EnsembleKind::MittagLeffler { b, .. } => beta * r.powf(2.0 * b - 1.0),
            EnsembleKind::Product { m } => beta * r.powf(2.0 / m as f64 - 1.0),
            EnsembleKind::TruncWeak { .. } => 0.0,
            EnsembleKind::TruncStrong { c_tilde } => beta * c_tilde * r / (1.0 + c_tilde - r * r),
            EnsembleKind::Custom => self.custom_g_prime(r),
        }
    }

    /// `N → ∞` Laplacian `ΔQ(r)`; the macroscopic density is `(2/β) ΔQ`.
    pub fn limit_laplacian(&self, r: f64) -> f64 {
        let half = 0.5 * self.beta_f();
        match self.kind {
            EnsembleKind::Ginibre => half,
            EnsembleKind::MittagLeffler { b, .. } => half * b * r.powf(2.0 * b - 2.0),
            EnsembleKind::Product { m } => {
                let m = m as f64;
                half / m * r.powf(2.0 / m - 2.0)
            }
            EnsembleKind::TruncWeak { .. } => 0.0,
            EnsembleKind::TruncStrong { c_tilde } => {
                let s = 1.0 + c_tilde - r * r;
                half * c_tilde * (1.0 + c_tilde) / (s * s)
            }
            EnsembleKind::Custom => self.custom_laplacian(r),
        }
    }

    /// Limiting macroscopic density `(2/β) ΔQ(r)`.
    pub fn density(&self, r: f64) -> f64 {
        2.0 / self.beta_f() * self.limit_laplacian(r)
    }

    fn custom_g(&self, r: f64) -> f64 {
        match self.custom.as_ref().expect("custom potential without data") {
            CustomForm::Closures { g, .. } => g(r),
            CustomForm::Table(t) => t.value(r),
        }
    }

    fn custom_g_prime(&self, r: f64) -> f64 {
        match self.custom.as_ref().expect("custom potential without data") {
            CustomForm::Closures { g_prime, .. } => g_prime(r),
            CustomForm::Table(t) => t.derivative(r),
        }
    }

    fn custom_laplacian(&self, r: f64) -> f64 {
        match self.custom.as_ref().expect("custom potential without data") {
            CustomForm::Closures { g_prime, .. } => {
                // (r g')' / (4r) by a central difference
                let h = 1e-5 * r.max(1e-3);
                let lo = (r - h).max(0.0);
                let hi = r + h;
                (hi * g_prime(hi) - lo * g_prime(lo)) / ((hi - lo) * 4.0 * r)
            }
            CustomForm::Table(t) => (t.derivative(r) / r + t.second_derivative(r)) / 4.0,
        }
    }

    /// True when the finite-`N` potential can be evaluated pointwise.
    pub fn has_pointwise_g(&self) -> bool {
        !matches!(self.kind, EnsembleKind::Product { .. })
    }
}

/// One entry of a [`SuitabilityReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuitabilityCheck {
    /// Condition number 1–4.
    pub condition: u8,
    pub passed: bool,
    pub evidence: String,
    /// Largest violation found; 0 when the check passes cleanly.
    pub worst_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuitabilityReport {
    pub passed: bool,
    pub checks: Vec<SuitabilityCheck>,
    /// Degenerate parameter edges that are allowed but suspicious.
    pub flags: Vec<String>,
}

/// Numerical probe of the four suitability conditions on `grid`.
///
/// Conditions 1, 3 and 4 use the `N → ∞` potential. Condition 1 looks at
/// `g(r)/ln r` on decades `10³…10¹²` (growing, and at least 10 at the far
/// end) for infinite support, and at divergence of `g` toward the boundary
/// for finite support. Condition 2 probes the finite-`N` potential where it
/// can be evaluated.
pub fn check_suitability(potential: &RadialPotential, grid: &[f64]) -> Result<SuitabilityReport> {
    if grid.is_empty() {
        return Err(domain("check_suitability", "grid must not be empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
        return Err(domain("check_suitability", "grid must be positive and strictly increasing"));
    }
    if *grid.last().unwrap() > potential.support_radius() {
        return Err(domain("check_suitability", "grid leaves the support"));
    }
    let beta = potential.beta().value();
    let mut checks = Vec::with_capacity(4);

    // (1) growth
    let (passed, evidence, worst) = if potential.support_radius().is_infinite() {
        let ratios: Vec<f64> = (3..=12)
            .map(|k| {
                let r = 10f64.powi(k);
                potential.limit_g(r) / r.ln()
            })
            .collect();
        let growing = ratios.windows(2).all(|w| w[1] > w[0]);
        let last = *ratios.last().unwrap();
        let ok = growing && last >= 10.0 && last.is_finite();
        (
            ok,
            format!("g(r)/ln r = {:.3e} at r=1e3, {last:.3e} at r=1e12", ratios[0]),
            if ok { 0.0 } else { (10.0 - last).max(0.0) },
        )
    } else {
        let big_r = potential.support_radius();
        let probes: Vec<f64> = (2..=8)
            .map(|k| potential.limit_g(big_r * (1.0 - 10f64.powi(-k))))
            .collect();
        let growing = probes.windows(2).all(|w| w[1] > w[0]);
        let ok = growing && *probes.last().unwrap() > probes[0] + 1.0;
        (
            ok,
            format!(
                "g near the boundary {big_r}: {:.3e} → {:.3e}",
                probes[0],
                probes.last().unwrap()
            ),
            if ok { 0.0 } else { 1.0 },
        )
    };
    checks.push(SuitabilityCheck {
        condition: 1,
        passed,
        evidence,
        worst_violation: worst,
    });

    // (2) finiteness and smoothness on (0, 1]
    let inner: Vec<f64> = grid.iter().copied().filter(|&r| r <= 1.0).collect();
    let mut bad = 0usize;
    let mut worst = 0.0f64;
    for &r in &inner {
        let vals = if potential.has_pointwise_g() {
            [potential.g(r)?, potential.g_prime(r)?, potential.laplacian(r)?]
        } else {
            [potential.limit_g(r), potential.limit_g_prime(r), potential.limit_laplacian(r)]
        };
        if vals.iter().any(|v| !v.is_finite()) {
            bad += 1;
            worst = f64::INFINITY;
        }
    }
    checks.push(SuitabilityCheck {
        condition: 2,
        passed: bad == 0,
        evidence: format!("{bad} non-finite probes among {} radii in (0, 1]", inner.len()),
        worst_violation: worst,
    });

    // (3) r g'(r) strictly increasing
    let rg: Vec<f64> = grid.iter().map(|&r| r * potential.limit_g_prime(r)).collect();
    let mut worst = 0.0f64;
    for w in rg.windows(2) {
        if !(w[1] > w[0]) {
            worst = worst.max(w[0] - w[1]).max(f64::MIN_POSITIVE);
        }
    }
    let min_lap = grid
        .iter()
        .map(|&r| potential.limit_laplacian(r))
        .fold(f64::INFINITY, f64::min);
    let ok3 = worst == 0.0 && min_lap > 0.0;
    checks.push(SuitabilityCheck {
        condition: 3,
        passed: ok3,
        evidence: format!("min ΔQ on grid {min_lap:.3e}"),
        worst_violation: if ok3 { 0.0 } else { worst.max(-min_lap).max(f64::MIN_POSITIVE) },
    });

    // (4) r g'(r) → 0 at the origin, g'(1) = β
    let small = grid[0].min(1e-6);
    let rg_small = [small, 1e-100, 1e-250].map(|r| (r * potential.limit_g_prime(r)).abs());
    let vanishing = rg_small[2] < rg_small[0] && rg_small[2] < 1e-3;
    let gp1 = if potential.support_radius() >= 1.0 {
        potential.limit_g_prime(1.0)
    } else {
        f64::NAN
    };
    let dev = (gp1 - beta).abs();
    let ok4 = vanishing && dev <= 1e-9 * beta;
    checks.push(SuitabilityCheck {
        condition: 4,
        passed: ok4,
        evidence: format!("r g'(r) = {:.3e} at r=1e-250; g'(1) = {gp1}", rg_small[2]),
        worst_violation: if ok4 { 0.0 } else { dev.max(rg_small[2]) },
    });

    let mut flags = Vec::new();
    match potential.kind() {
        EnsembleKind::TruncWeak { c } if c < -0.99 => {
            flags.push(format!("c={c} is close to -1: near the circular ensemble"))
        }
        EnsembleKind::TruncStrong { c_tilde } if c_tilde < 1e-3 => {
            flags.push(format!("c_tilde={c_tilde} is close to 0: droplet degenerates"))
        }
        EnsembleKind::MittagLeffler { c, .. } if c < -0.99 => {
            flags.push(format!("c={c} is close to -1: strong charge at the origin"))
        }
        _ => {}
    }

    Ok(SuitabilityReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        flags,
    })
}

/// Fritsch–Carlson monotone cubic Hermite interpolant. Below the first node
/// it extends linearly with the end slope; above the last node it is not
/// used (the support ends there).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(domain("MonotoneCubic", "need at least two (x, y) pairs of equal length"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("MonotoneCubic", "abscissae must be strictly increasing"));
        }
        let n = x.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut d = vec![0.0; n];
        d[0] = secant[0];
        d[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            if secant[i - 1] * secant[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // weighted harmonic mean
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
            }
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        }
    }

    /// Cubic coefficients `(y0, d0, c2, c3)` of segment `i` in `s = t - x_i`.
    fn coeffs(&self, i: usize) -> (f64, f64, f64, f64) {
        let h = self.x[i + 1] - self.x[i];
        let delta = (self.y[i + 1] - self.y[i]) / h;
        let c2 = (3.0 * delta - 2.0 * self.d[i] - self.d[i + 1]) / h;
        let c3 = (self.d[i] + self.d[i + 1] - 2.0 * delta) / (h * h);
        (self.y[i], self.d[i], c2, c3)
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        let i = self.segment(t);
        let (a, b, c2, c3) = self.coeffs(i);
        let s = t - self.x[i];
        a + s * (b + s * (c2 + s * c3))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < self.x[0] {
            return self.d[0];
        }
        let i = self.segment(t);
        let (_, b, c2, c3) = self.coeffs(i);
        let s = t - self.x[i];
        b + s * (2.0 * c2 + 3.0 * s * c3)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        if t < self.x[0] {
            return 0.0;
        }
        let i = self.segment(t);
        let (_, _, c2, c3) = self.coeffs(i);
        2.0 * c2 + 6.0 * c3 * (t - self.x[i])
    }
}
