//! Run configuration: defaults, then an optional INI-style file, then flags.

use std::path::{Path, PathBuf};

use clap::Args;
use ini::Ini;
use num_traits::ToPrimitive;
use virasoro_core::bounds::{default_eps_grid, log_grid};
use virasoro_core::scalar::{format_rational, parse_rational};
use virasoro_core::{Mode, Rational};

use crate::exit::UsageError;

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct GlobalArgs {
    /// Central charge, `p/q` or decimal
    #[arg(long = "c", global = true)]
    pub c: Option<String>,
    /// Lowest weight, `p/q` or decimal
    #[arg(long = "h", global = true)]
    pub h: Option<String>,
    /// Truncation level (at least 2)
    #[arg(long = "N", global = true)]
    pub n: Option<String>,
    /// Arithmetic: exact or float
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Cache directory for exact representations
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// ε grid: `lo:hi:points` (log spaced) or a comma list
    #[arg(long = "eps-grid", global = true)]
    pub eps_grid: Option<String>,
    /// Fourier cutoff
    #[arg(long, global = true)]
    pub cutoff: Option<String>,
    /// Key-value configuration file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Replace 12 by this denominator in the central term (fault injection)
    #[arg(long = "fault-cocycle-den", global = true, hide = true)]
    pub fault_cocycle_den: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub c: Rational,
    pub h: Rational,
    pub n: usize,
    pub mode: Mode,
    pub eps_grid: Vec<f64>,
    pub eps_grid_spec: String,
    pub cutoff: Option<u64>,
    pub out: PathBuf,
    pub seed: u64,
    pub cache: Option<PathBuf>,
    pub fault_cocycle_den: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            c: parse_rational("1/2").expect("literal"),
            h: parse_rational("0").expect("literal"),
            n: 8,
            mode: Mode::Exact,
            eps_grid: default_eps_grid(),
            eps_grid_spec: "default".into(),
            cutoff: None,
            out: PathBuf::from("out"),
            seed: 0,
            cache: None,
            fault_cocycle_den: None,
        }
    }
}

const KEYS: [&str; 10] = ["c", "h", "N", "mode", "out", "seed", "cache", "eps-grid", "cutoff", "fault-cocycle-den"];

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, UsageError> {
        let mut cfg = Self::default();
        if let Some(path) = &args.config {
            for (key, value) in read_config_file(path)? {
                cfg.set(&key, &value)?;
            }
        }
        let flags: [(&str, Option<String>); 10] = [
            ("c", args.c.clone()),
            ("h", args.h.clone()),
            ("N", args.n.clone()),
            ("mode", args.mode.clone()),
            ("out", args.out.as_ref().map(|p| p.display().to_string())),
            ("seed", args.seed.clone()),
            ("cache", args.cache.as_ref().map(|p| p.display().to_string())),
            ("eps-grid", args.eps_grid.clone()),
            ("cutoff", args.cutoff.clone()),
            ("fault-cocycle-den", args.fault_cocycle_den.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        let bad = |what: &str| UsageError(format!("invalid {key} = {value:?}: {what}"));
        let v = value.trim();
        match key {
            "c" => {
                self.c = parse_param(v).map_err(|e| bad(&e))?;
                if self.c <= Rational::from_integer(0.into()) {
                    return Err(bad("central charge must be positive"));
                }
            }
            "h" => {
                self.h = parse_param(v).map_err(|e| bad(&e))?;
                if self.h < Rational::from_integer(0.into()) {
                    return Err(bad("lowest weight must be nonnegative"));
                }
            }
            "N" => {
                let n: usize = v.parse().map_err(|_| bad("expected an integer"))?;
                if n < 2 {
                    return Err(bad("truncation level must be at least 2"));
                }
                self.n = n;
            }
            "mode" => {
                self.mode = match v {
                    "exact" => Mode::Exact,
                    "float" => Mode::Float,
                    _ => return Err(bad("expected exact or float")),
                }
            }
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = v.parse().map_err(|_| bad("expected a nonnegative integer"))?,
            "cache" => self.cache = Some(PathBuf::from(v)),
            "eps-grid" => {
                self.eps_grid = parse_eps_grid(v).map_err(|e| bad(&e))?;
                self.eps_grid_spec = v.to_string();
            }
            "cutoff" => self.cutoff = Some(v.parse().map_err(|_| bad("expected a nonnegative integer"))?),
            "fault-cocycle-den" => {
                let d: i64 = v.parse().map_err(|_| bad("expected an integer"))?;
                if d == 0 {
                    return Err(bad("denominator must be nonzero"));
                }
                self.fault_cocycle_den = Some(d);
            }
            _ => return Err(UsageError(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    pub fn c_f64(&self) -> f64 {
        self.c.to_f64().unwrap_or(f64::NAN)
    }

    pub fn h_f64(&self) -> f64 {
        self.h.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }

    /// Parameters echoed into every report.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "c": format_rational(&self.c),
            "h": format_rational(&self.h),
            "N": self.n,
            "mode": self.mode_name(),
            "seed": self.seed,
            "eps_grid": self.eps_grid_spec,
            "cutoff": self.cutoff,
            "fault_cocycle_den": self.fault_cocycle_den,
        })
    }
}

/// Rationals as `p/q` or finite decimals; exponent notation is not rational input.
fn parse_param(v: &str) -> Result<Rational, String> {
    parse_rational(v).map_err(|e| e.to_string())
}

fn parse_eps_grid(v: &str) -> Result<Vec<f64>, String> {
    if v.is_empty() {
        return Err("empty ε grid".into());
    }
    if v == "default" {
        return Ok(default_eps_grid());
    }
    let grid = if let Some((lo, rest)) = v.split_once(':') {
        let (hi, n) = rest.split_once(':').ok_or("expected lo:hi:points")?;
        let lo: f64 = lo.parse().map_err(|_| "bad lower end")?;
        let hi: f64 = hi.parse().map_err(|_| "bad upper end")?;
        let n: usize = n.parse().map_err(|_| "bad point count")?;
        log_grid(lo, hi, n).map_err(|e| e.to_string())?
    } else {
        v.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad ε value {t:?}")))
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err("ε values must be finite and positive".into());
    }
    Ok(grid)
}

/// Flat `key = value` pairs; section headers are ignored.
fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, UsageError> {
    let ini = Ini::load_from_file(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (_, props) in ini.iter() {
        for (k, v) in props.iter() {
            let key = k.trim().replace('_', "-");
            let key = if key.eq_ignore_ascii_case("n") { "N".to_string() } else { key };
            if !KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!("{}: unknown configuration key {k:?}", path.display())));
            }
            pairs.push((key, v.to_string()));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_eps_grid("0.5,1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_eps_grid("1:100:3").unwrap().len(), 3);
        assert!(parse_eps_grid("").is_err());
        assert!(parse_eps_grid("1:2").is_err());
        assert!(parse_eps_grid("0,1").is_err());
    }

    #[test]
    fn flags_override_defaults() {
        let args = GlobalArgs {
            c: Some("7/10".into()),
            n: Some("12".into()),
            mode: Some("float".into()),
            ..GlobalArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(format_rational(&cfg.c), "7/10");
        assert_eq!(cfg.n, 12);
        assert_eq!(cfg.mode, Mode::Float);
        let bad = GlobalArgs {
            n: Some("1".into()),
            ..GlobalArgs::default()
        };
        assert!(RunConfig::resolve(&bad).is_err());
    }
}
