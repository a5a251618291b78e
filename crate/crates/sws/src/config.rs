//! Flat `key = value` run configuration.
//!
//! Recognised keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `mass` | mass parameter `m > 0` |
//! | `seed` | sampling seed |
//! | `samples` | number of random exterior points (≥ 10) |
//! | `scale_mode` | `paper` or `weil` |
//! | `out` | output directory |
//! | `tolerance.<check>` | threshold override for one check; `tolerance.*` for all |
//! | `quadrature.n_u`, `quadrature.n_v` | sphere rule node counts |
//! | `quadrature.r0`, `quadrature.t0` | sphere position (absolute `r0`) |
//! | `box.u`, `box.v`, `box.r`, `box.t` | L² box ranges as `lo, hi` |
//! | `box_nodes` | Gauss–Legendre nodes per box axis |
//! | `sections` | number of random test sections |
//! | `operator_points` | points per section for operator checks |
//! | `kappa` | frequency of the separable radial ansatz |
//!
//! Later entries override earlier ones, so command-line flags are appended
//! after the file entries. Defaults that scale with the mass (sphere
//! radius, box) follow the final `mass`.

use std::path::PathBuf;

use sws_core::prequant::ScaleMode;
use sws_core::suite::SuiteConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    pub output_dir: Option<PathBuf>,
}


/// Splits a configuration text into `(key, value)` entries. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { key: key.to_string(), value: value.to_string() })
}

fn parse_range(key: &str, value: &str) -> Result<(f64, f64), ConfigError> {
    let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
    let (a, b) = value.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Builds and validates a configuration from entries in override order.
pub fn build(entries: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut mass = 1.0;
    for (k, v) in entries {
        if k == "mass" {
            mass = parse(k, v)?;
        }
    }
    let mut cfg = RunConfig { suite: SuiteConfig::new(mass), output_dir: None };
    for (k, v) in entries {
        apply(&mut cfg, k, v)?;
    }
    cfg.suite.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(cfg)
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    let s = &mut cfg.suite;
    match key {
        "mass" => {}
        "seed" => s.seed = parse(key, value)?,
        "samples" => s.n_samples = parse(key, value)?,
        "scale_mode" => {
            s.scale_mode = ScaleMode::from_name(value)
                .ok_or_else(|| ConfigError::BadValue { key: key.to_string(), value: value.to_string() })?
        }
        "out" => cfg.output_dir = Some(PathBuf::from(value)),
        "quadrature.n_u" => s.quadrature.n_u = parse(key, value)?,
        "quadrature.n_v" => s.quadrature.n_v = parse(key, value)?,
        "quadrature.r0" => s.quadrature.r0 = parse(key, value)?,
        "quadrature.t0" => s.quadrature.t0 = parse(key, value)?,
        "box.u" => s.bx.u = parse_range(key, value)?,
        "box.v" => s.bx.v = parse_range(key, value)?,
        "box.r" => s.bx.r = parse_range(key, value)?,
        "box.t" => s.bx.t = parse_range(key, value)?,
        "box_nodes" => s.box_nodes = parse(key, value)?,
        "sections" => s.n_sections = parse(key, value)?,
        "operator_points" => s.operator_points = parse(key, value)?,
        "kappa" => s.kappa = parse(key, value)?,
        _ => match key.strip_prefix("tolerance.") {
            Some(name) if !name.is_empty() => s.tolerances.set(name, parse(key, value)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        },
    }
    Ok(())
}

/// Turns a `name=value` tolerance flag into a configuration entry.
pub fn tolerance_entry(flag: &str) -> Result<(String, String), ConfigError> {
    match flag.split_once('=') {
        Some((name, value)) if !name.trim().is_empty() => {
            Ok((format!("tolerance.{}", name.trim()), value.trim().to_string()))
        }
        _ => Err(ConfigError::BadValue { key: "--tolerance".to_string(), value: flag.to_string() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(text: &str) -> Vec<(String, String)> {
        parse_entries(text).unwrap()
    }

    #[test]
    fn defaults_follow_the_mass() {
        let cfg = build(&entries("mass = 2\n")).unwrap();
        assert_eq!(cfg.suite.mass, 2.0);
        assert_eq!(cfg.suite.quadrature.r0, 6.0);
        assert_eq!(cfg.suite.bx.r, (5.0, 20.0));
    }

    #[test]
    fn later_entries_override() {
        let mut e = entries("# comment\nseed = 3\n\nsamples=20\ntolerance.gradient.relation = 1e-9\n");
        e.push(("seed".into(), "7".into()));
        let cfg = build(&e).unwrap();
        assert_eq!(cfg.suite.seed, 7);
        assert_eq!(cfg.suite.n_samples, 20);
        assert_eq!(cfg.suite.tolerances.get("gradient.relation", 0.0), 1e-9);
    }

    #[test]
    fn ranges_and_modes() {
        let cfg = build(&entries("box.r = 3, 8\nscale_mode = weil\nout = /tmp/x")).unwrap();
        assert_eq!(cfg.suite.bx.r, (3.0, 8.0));
        assert_eq!(cfg.suite.scale_mode, ScaleMode::Weil);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("/tmp/x")));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_entries("mass 2"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(build(&entries("colour = red")), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(build(&entries("mass = heavy")), Err(ConfigError::BadValue { .. })));
        assert!(matches!(build(&entries("mass = -1")), Err(ConfigError::Invalid(_))));
        assert!(matches!(build(&entries("samples = 5")), Err(ConfigError::Invalid(_))));
        assert!(matches!(build(&entries("tolerance.x = 0")), Err(ConfigError::Invalid(_))));
        assert!(matches!(build(&entries("box.r = 1, 8")), Err(ConfigError::Invalid(_))));
        assert!(matches!(build(&entries("scale_mode = other")), Err(ConfigError::BadValue { .. })));
        assert!(tolerance_entry("noequals").is_err());
        assert_eq!(tolerance_entry("a.b=1e-3").unwrap(), ("tolerance.a.b".into(), "1e-3".into()));
    }
}
