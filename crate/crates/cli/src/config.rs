//! Run configuration: flags, optional `key=value` file, and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coulomb_count::ensembles::*;
use coulomb_count::statistics::Regime;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(invalid(format!("unknown format {other:?} (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    /// `min:max:points[:log]`
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || invalid(format!("grid {s:?} is not min:max:points[:log]"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        let g = GridSpec { min, max, points, log };
        g.validate()?;
        Ok(g)
    }
}

impl GridSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(invalid(format!("grid needs finite min < max, got {}:{}", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(invalid("grid needs at least 2 points"));
        }
        if self.log && self.min <= 0.0 {
            return Err(invalid("log grid needs min > 0"));
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.points)?;
        if self.log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

/// Settings gathered from flags and the config file before validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub ensemble: Option<String>,
    pub beta: Option<String>,
    pub n: Option<String>,
    pub regime: Option<String>,
    pub grid: Option<String>,
    pub trials: Option<String>,
    pub seed: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub params: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key=value` lines; `#` starts a comment. Parameter keys are
    /// given as `param.b = 1.5` or bare `b = 1.5`.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key=value", i + 1)))?;
            raw.set(key.trim(), value.trim().to_string())
                .map_err(|e| invalid(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text)
    }

    fn set(&mut self, key: &str, value: String) -> Result<(), ConfigError> {
        let slot = match key {
            "ensemble" => &mut self.ensemble,
            "beta" => &mut self.beta,
            "n" | "N" => &mut self.n,
            "regime" => &mut self.regime,
            "grid" => &mut self.grid,
            "trials" => &mut self.trials,
            "seed" => &mut self.seed,
            "format" => &mut self.format,
            "out" => &mut self.out,
            other => {
                let name = other.strip_prefix("param.").unwrap_or(other);
                if !PARAM_KEYS.contains(&name) {
                    return Err(invalid(format!("unknown key {other:?}")));
                }
                self.params.insert(name.to_string(), value);
                return Ok(());
            }
        };
        *slot = Some(value);
        Ok(())
    }

    /// Values from `over` replace those here.
    pub fn overlay(mut self, over: RawConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(ensemble, beta, n, regime, grid, trials, seed, format, out);
        self.params.extend(over.params);
        self
    }

    pub fn add_param(&mut self, kv: &str) -> Result<(), ConfigError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| invalid(format!("--param {kv:?} is not key=value")))?;
        let k = k.trim();
        if !PARAM_KEYS.contains(&k) {
            return Err(invalid(format!("unknown parameter {k:?} (b, c, m, c_tilde, file)")));
        }
        self.params.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }
}

const PARAM_KEYS: [&str; 5] = ["b", "c", "m", "c_tilde", "file"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ensemble: EnsembleSpec,
    pub beta: u8,
    pub n: usize,
    pub regime: Regime,
    pub grid: GridSpec,
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Per-command defaults for fields the user left out.
pub struct Defaults {
    pub regime: fn(&str) -> Regime,
    pub grid: fn(Regime) -> GridSpec,
    pub allowed: &'static [Regime],
}

fn parse<T: FromStr>(what: &str, v: &str) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: cannot parse {v:?}")))
}

impl RunConfig {
    pub fn resolve(raw: RawConfig, defaults: &Defaults) -> Result<Self, ConfigError> {
        let name = raw.ensemble.clone().unwrap_or_else(|| "ginibre".into());
        let beta: u8 = raw.beta.as_deref().map_or(Ok(2), |v| parse("beta", v))?;
        Beta::try_from(beta).map_err(|e| invalid(e.to_string()))?;
        let n: usize = raw.n.as_deref().map_or(Ok(100), |v| parse("n", v))?;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let regime = match raw.regime.as_deref() {
            Some(r) => r.parse::<Regime>().map_err(|e| invalid(e.to_string()))?,
            None => (defaults.regime)(&name),
        };
        if !defaults.allowed.contains(&regime) {
            return Err(invalid(format!("regime {regime} is not available for this command")));
        }
        let grid = match raw.grid.as_deref() {
            Some(g) => g.parse()?,
            None => (defaults.grid)(regime),
        };
        let trials: usize = raw.trials.as_deref().map_or(Ok(0), |v| parse("trials", v))?;
        if trials > 0 && trials < 100 {
            return Err(invalid(format!("trials must be 0 or at least 100, got {trials}")));
        }
        let seed: u64 = raw.seed.as_deref().map_or(Ok(1), |v| parse("seed", v))?;
        let format = raw.format.as_deref().map_or(Ok(Format::Csv), str::parse)?;
        let cfg = RunConfig {
            ensemble: EnsembleSpec {
                name,
                params: raw.params,
            },
            beta,
            n,
            regime,
            grid,
            trials,
            seed,
            format,
            out: raw.out.map(PathBuf::from),
        };
        cfg.potential()?;
        Ok(cfg)
    }

    pub fn beta(&self) -> Beta {
        Beta::try_from(self.beta).expect("validated in resolve")
    }

    fn param(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.ensemble
            .params
            .get(key)
            .map(|v| parse::<f64>(key, v))
            .transpose()
    }

    fn require(&self, key: &str) -> Result<f64, ConfigError> {
        self.param(key)?
            .ok_or_else(|| invalid(format!("ensemble {} needs --param {key}=…", self.ensemble.name)))
    }

    pub fn potential(&self) -> Result<RadialPotential, ConfigError> {
        let beta = self.beta();
        let n = self.n;
        let wrap = |r: coulomb_count::Result<RadialPotential>| r.map_err(|e| invalid(e.to_string()));
        let allowed: &[&str] = match self.ensemble.name.as_str() {
            "ginibre" => &[],
            "mittag_leffler" => &["b", "c"],
            "product" => &["m"],
            "trunc_weak" => &["c"],
            "trunc_strong" => &["c_tilde"],
            "tabulated" => &["file"],
            other => {
                return Err(invalid(format!(
                    "unknown ensemble {other:?} (ginibre, mittag_leffler, product, trunc_weak, trunc_strong, tabulated)"
                )))
            }
        };
        if let Some(k) = self.ensemble.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(invalid(format!("parameter {k} does not apply to {}", self.ensemble.name)));
        }
        match self.ensemble.name.as_str() {
            "ginibre" => Ok(make_ginibre(beta)),
            "mittag_leffler" => wrap(make_mittag_leffler(
                beta,
                self.param("b")?.unwrap_or(1.0),
                self.param("c")?.unwrap_or(0.0),
                n,
            )),
            "product" => {
                let m = self.require("m")?;
                if m.fract() != 0.0 || m < 1.0 {
                    return Err(invalid(format!("m must be a positive integer, got {m}")));
                }
                wrap(make_product(beta, m as usize, n))
            }
            "trunc_weak" => wrap(make_trunc_weak(beta, self.require("c")?, n)),
            "trunc_strong" => wrap(make_trunc_strong(beta, self.require("c_tilde")?)),
            _ => {
                let file = self
                    .ensemble
                    .params
                    .get("file")
                    .ok_or_else(|| invalid("ensemble tabulated needs --param file=PATH"))?;
                wrap(load_tabulated(beta, Path::new(file)))
            }
        }
    }

    /// `key = value` lines echoing every setting.
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![format!("ensemble = {}", self.ensemble.name)];
        for (k, v) in &self.ensemble.params {
            lines.push(format!("param.{k} = {v}"));
        }
        lines.push(format!("beta = {}", self.beta));
        lines.push(format!("n = {}", self.n));
        lines.push(format!("regime = {}", self.regime));
        lines.push(format!("grid = {}", self.grid));
        lines.push(format!("trials = {}", self.trials));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!(
            "format = {}",
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
        ));
        if let Some(out) = &self.out {
            lines.push(format!("out = {}", out.display()));
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> Defaults {
        Defaults {
            regime: |_| Regime::Bulk,
            grid: |_| GridSpec {
                min: 0.1,
                max: 0.9,
                points: 5,
                log: false,
            },
            allowed: &[Regime::Bulk],
        }
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0.1:1:10:log".parse().unwrap();
        assert!(g.log && g.points == 10);
        let v = g.values();
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[9] - 1.0).abs() < 1e-15);
        assert!("1:0.5:4".parse::<GridSpec>().is_err());
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("0:1:4:log".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn file_then_flags() {
        let file = RawConfig::from_text("ensemble = mittag_leffler\nb = 1.5 # exponent\nparam.c=0.5\nn=40\n").unwrap();
        let mut flags = RawConfig {
            n: Some("50".into()),
            ..RawConfig::default()
        };
        flags.add_param("c=0.25").unwrap();
        let cfg = RunConfig::resolve(file.overlay(flags), &defaults()).unwrap();
        assert_eq!(cfg.n, 50);
        assert_eq!(cfg.ensemble.params["b"], "1.5");
        assert_eq!(cfg.ensemble.params["c"], "0.25");
    }

    #[test]
    fn rejects_bad_settings() {
        let bad = |text: &str| RunConfig::resolve(RawConfig::from_text(text).unwrap(), &defaults()).is_err();
        assert!(bad("beta = 3"));
        assert!(bad("ensemble = product"));
        assert!(bad("ensemble = product\nm = 2.5"));
        assert!(bad("ensemble = ginibre\nb = 2"));
        assert!(bad("ensemble = wishart"));
        assert!(bad("trials = 10"));
        assert!(bad("regime = origin"));
        assert!(RawConfig::from_text("colour = red").is_err());
        assert!(RawConfig::from_text("just words").is_err());
    }
}
