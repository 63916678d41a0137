//! Flat `key=value` run configuration and built-in initial data.
//!
//! Recognized keys: `N`, `dt`, `T`, `scheme`, `epsilon`, `dealias`,
//! `output_every`, `initial`. Lines starting with `#` and blank lines are
//! ignored. Every error message names the offending key so a bad file is
//! diagnosable from the exit message alone.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use hmch::dynamics::Scheme;
use hmch::PeriodicField;

use crate::io;

/// Parsed configuration; grid and initial data are bundled because the
/// builtin initial states need `n` to materialize.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub dealias: bool,
    pub output_every: usize,
    pub initial: InitialData,
}

/// Initial state: a named builtin or a CSV file of samples.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// `constant(c)`
    Constant(f64),
    /// `sine(a,k,offset)`: `offset + a sin(2 pi k x)`
    Sine { a: f64, k: u32, offset: f64 },
    /// `peakon(c)`: the traveling-wave profile for speed `c`
    Peakon(f64),
    /// `approx(omega,n,s)`: `omega/n + n^-s cos(2 pi n x)`
    Approx { omega: f64, n: u32, s: f64 },
    /// `csv(path)`: sample column of a field dump, row count must match `N`
    Csv(PathBuf),
}

/// Configuration failure, carrying the offending key.
#[derive(Debug)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.trim()
        .parse()
        .map_err(|_| err(key, format!("cannot parse `{}`", raw.trim())))
}

/// Split `name(arg1,arg2,...)` into the name and raw argument list.
fn split_call(raw: &str) -> Option<(&str, Vec<&str>)> {
    let open = raw.find('(')?;
    let close = raw.rfind(')')?;
    if close != raw.len() - 1 || close < open {
        return None;
    }
    let name = raw[..open].trim();
    let args = raw[open + 1..close]
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>();
    Some((name, args))
}

fn parse_initial(raw: &str) -> Result<InitialData, ConfigError> {
    const KEY: &str = "initial";
    let (name, args) = split_call(raw.trim())
        .ok_or_else(|| err(KEY, format!("expected `name(args)`, got `{}`", raw.trim())))?;
    let arity = |want: usize| -> Result<(), ConfigError> {
        if args.len() == want {
            Ok(())
        } else {
            Err(err(
                KEY,
                format!("`{name}` takes {want} argument(s), got {}", args.len()),
            ))
        }
    };
    match name {
        "constant" => {
            arity(1)?;
            Ok(InitialData::Constant(parse_num(KEY, args[0])?))
        }
        "sine" => {
            arity(3)?;
            Ok(InitialData::Sine {
                a: parse_num(KEY, args[0])?,
                k: parse_num(KEY, args[1])?,
                offset: parse_num(KEY, args[2])?,
            })
        }
        "peakon" => {
            arity(1)?;
            Ok(InitialData::Peakon(parse_num(KEY, args[0])?))
        }
        "approx" => {
            arity(3)?;
            Ok(InitialData::Approx {
                omega: parse_num(KEY, args[0])?,
                n: parse_num(KEY, args[1])?,
                s: parse_num(KEY, args[2])?,
            })
        }
        "csv" => {
            arity(1)?;
            Ok(InitialData::Csv(PathBuf::from(args[0])))
        }
        other => Err(err(KEY, format!("unknown initial data `{other}`"))),
    }
}

/// Parse the configuration text (see module docs for the format).
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut n: Option<usize> = None;
    let mut dt: Option<f64> = None;
    let mut t_end: Option<f64> = None;
    let mut scheme = Scheme::Rk4;
    let mut epsilon = 0.0;
    let mut dealias = true;
    let mut output_every = 1usize;
    let mut initial: Option<InitialData> = None;

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line, "expected `key=value`"))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "N" => {
                let v: usize = parse_num(key, value)?;
                if !v.is_multiple_of(2) {
                    return Err(err(key, format!("grid size must be even, got {v}")));
                }
                n = Some(v);
            }
            "dt" => {
                let v: f64 = parse_num(key, value)?;
                if !(v > 0.0) {
                    return Err(err(key, format!("time step must be positive, got {v}")));
                }
                dt = Some(v);
            }
            "T" => {
                let v: f64 = parse_num(key, value)?;
                if !(v >= 0.0) {
                    return Err(err(key, format!("horizon must be nonnegative, got {v}")));
                }
                t_end = Some(v);
            }
            "scheme" => {
                scheme = match value {
                    "rk4" => Scheme::Rk4,
                    "ifrk4" => Scheme::IfRk4,
                    other => {
                        return Err(err(key, format!("unknown scheme `{other}` (rk4 | ifrk4)")))
                    }
                };
            }
            "epsilon" => {
                let v: f64 = parse_num(key, value)?;
                if !(v >= 0.0) {
                    return Err(err(key, format!("viscosity must be nonnegative, got {v}")));
                }
                epsilon = v;
            }
            "dealias" => {
                dealias = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(key, format!("expected true|false, got `{other}`"))),
                };
            }
            "output_every" => {
                let v: usize = parse_num(key, value)?;
                if v == 0 {
                    return Err(err(key, "must be at least 1"));
                }
                output_every = v;
            }
            "initial" => initial = Some(parse_initial(value)?),
            other => return Err(err(other, "unknown key")),
        }
    }

    Ok(RunConfig {
        n: n.ok_or_else(|| err("N", "missing"))?,
        dt: dt.ok_or_else(|| err("dt", "missing"))?,
        t_end: t_end.ok_or_else(|| err("T", "missing"))?,
        scheme,
        epsilon,
        dealias,
        output_every,
        initial: initial.ok_or_else(|| err("initial", "missing"))?,
    })
}

/// Read and parse a configuration file.
pub fn parse_config_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

impl RunConfig {
    /// Materialize the initial state on the configured grid.
    pub fn initial_field(&self) -> Result<PeriodicField, ConfigError> {
        let build = |f: &dyn Fn(f64) -> f64| {
            PeriodicField::from_fn(self.n, f)
                .map_err(|e| err("N", format!("cannot build initial data: {e}")))
        };
        match &self.initial {
            InitialData::Constant(c) => build(&|_| *c),
            InitialData::Sine { a, k, offset } => {
                let k = *k as f64;
                let (a, offset) = (*a, *offset);
                build(&move |x| offset + a * (2.0 * PI * k * x).sin())
            }
            InitialData::Peakon(c) => {
                let spec = hmch::peakon::PeakonSpec::new(*c)
                    .map_err(|e| err("initial", e.to_string()))?;
                hmch::peakon::peakon_profile(&spec, 0.0, self.n)
                    .map_err(|e| err("initial", e.to_string()))
            }
            InitialData::Approx { omega, n, s } => {
                let spec = hmch::approx::ApproxSolutionSpec::new(*omega, *n, *s)
                    .map_err(|e| err("initial", e.to_string()))?;
                hmch::approx::approx_solution(&spec, 0.0, self.n)
                    .map_err(|e| err("initial", e.to_string()))
            }
            InitialData::Csv(path) => {
                let field = io::read_field_csv(path)
                    .map_err(|e| err("initial", e.to_string()))?;
                if field.len() != self.n {
                    return Err(err(
                        "initial",
                        format!(
                            "csv row count {} does not match N={}",
                            field.len(),
                            self.n
                        ),
                    ));
                }
                Ok(field)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "N=256\ndt=1e-4\nT=1\ninitial=sine(1,1,0.2)\n";

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.dt, 1e-4);
        assert_eq!(cfg.t_end, 1.0);
        assert!(matches!(cfg.scheme, Scheme::Rk4));
        assert_eq!(cfg.epsilon, 0.0);
        assert!(cfg.dealias);
        let u0 = cfg.initial_field().unwrap();
        assert!((u0.mean() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn odd_grid_rejected() {
        let e = parse_config_str("N=255\ndt=1e-4\nT=1\ninitial=constant(0)\n").unwrap_err();
        assert_eq!(e.key, "N");
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config_str("N=256\ndt=1e-4\nT=1\nbogus=1\ninitial=constant(0)\n")
            .unwrap_err();
        assert_eq!(e.key, "bogus");
    }

    #[test]
    fn bad_initial_rejected() {
        for raw in ["initial=wave(1)", "initial=sine(1,1)", "initial=sine"] {
            let text = format!("N=256\ndt=1e-4\nT=1\n{raw}\n");
            let e = parse_config_str(&text).unwrap_err();
            assert_eq!(e.key, "initial");
        }
    }

    #[test]
    fn missing_required_key_rejected() {
        let e = parse_config_str("N=256\ndt=1e-4\nT=1\n").unwrap_err();
        assert_eq!(e.key, "initial");
        let e = parse_config_str("dt=1e-4\nT=1\ninitial=constant(0)\n").unwrap_err();
        assert_eq!(e.key, "N");
    }

    #[test]
    fn builtin_initials_materialize() {
        for initial in [
            "constant(0.5)",
            "sine(1,2,0)",
            "peakon(1)",
            "approx(1,8,4)",
        ] {
            let text = format!("N=256\ndt=1e-4\nT=0\ninitial={initial}\n");
            let cfg = parse_config_str(&text).unwrap();
            let u0 = cfg.initial_field().unwrap();
            assert_eq!(u0.len(), 256);
            assert!(u0.is_finite());
        }
    }
}
