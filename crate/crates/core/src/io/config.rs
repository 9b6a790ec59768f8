//! Line-oriented `section.key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; missing keys keep their defaults. Unknown and repeated keys are
//! errors.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, InitKind};
use crate::potential::WellKind;

pub const KEYS: [&str; 19] = [
    "grid.dim",
    "grid.n",
    "grid.levels",
    "grid.length",
    "fluid.nu",
    "fluid.eps",
    "time.dt",
    "time.t_end",
    "potential.kind",
    "potential.f1",
    "potential.f2",
    "init.kind",
    "init.seed",
    "init.radius",
    "init.noise",
    "init.stream",
    "perturbation.delta",
    "output.dir",
    "output.every",
];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}

/// Parse `text`; `origin` only labels errors.
pub fn parse_config_str(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let err = |line: usize, message: String| Error::Config {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut cfg = ExperimentConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(line, format!("unknown key {key:?}")));
        }
        if let Some(first) = seen.insert(key.to_string(), line) {
            return Err(err(line, format!("{key} already set on line {first}")));
        }
        set(&mut cfg, key, value).map_err(|m| err(line, format!("{key}: {m}")))?;
    }
    cfg.validate().map_err(|e| {
        let message = match e {
            Error::InvalidParameter(m) => m,
            other => other.to_string(),
        };
        let key = message.split(':').next().unwrap_or_default();
        err(seen.get(key).copied().unwrap_or(0), message)
    })?;
    Ok(cfg)
}

fn number<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn set(cfg: &mut ExperimentConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "grid.dim" => cfg.dim = number(value)?,
        "grid.n" => cfg.n = number(value)?,
        "grid.levels" => {
            cfg.levels = value
                .split(',')
                .map(|v| number(v.trim()))
                .collect::<std::result::Result<_, _>>()?
        }
        "grid.length" => cfg.length = number(value)?,
        "fluid.nu" => cfg.nu = number(value)?,
        "fluid.eps" => cfg.eps = number(value)?,
        "time.dt" => cfg.dt = number(value)?,
        "time.t_end" => cfg.t_end = number(value)?,
        "potential.kind" => cfg.potential = value.parse::<WellKind>().map_err(|e| e.to_string())?,
        "potential.f1" => cfg.interval.0 = number(value)?,
        "potential.f2" => cfg.interval.1 = number(value)?,
        "init.kind" => cfg.init = value.parse::<InitKind>().map_err(|e| e.to_string())?,
        "init.seed" => cfg.seed = number(value)?,
        "init.radius" => cfg.radius = number(value)?,
        "init.noise" => cfg.noise = number(value)?,
        "init.stream" => cfg.stream = number(value)?,
        "perturbation.delta" => cfg.delta = number(value)?,
        "output.dir" => cfg.output_dir = PathBuf::from(value),
        "output.every" => cfg.output_every = number(value)?,
        _ => unreachable!("key list and setters disagree on {key}"),
    }
    Ok(())
}

/// Every key with its value; parsing the result gives `cfg` back.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let levels: Vec<String> = cfg.levels.iter().map(|l| l.to_string()).collect();
    let values = [
        cfg.dim.to_string(),
        cfg.n.to_string(),
        levels.join(", "),
        cfg.length.to_string(),
        cfg.nu.to_string(),
        cfg.eps.to_string(),
        cfg.dt.to_string(),
        cfg.t_end.to_string(),
        cfg.potential.name().to_string(),
        cfg.interval.0.to_string(),
        cfg.interval.1.to_string(),
        cfg.init.name().to_string(),
        cfg.seed.to_string(),
        cfg.radius.to_string(),
        cfg.noise.to_string(),
        cfg.stream.to_string(),
        cfg.delta.to_string(),
        cfg.output_dir.display().to_string(),
        cfg.output_every.to_string(),
    ];
    KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config_str(text, Path::new("test.cfg"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse("").unwrap(), ExperimentConfig::default());
        assert_eq!(parse("# nothing\n\n").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn values_are_read() {
        let cfg =
            parse("grid.n = 32\ngrid.levels = 16, 32\n  fluid.nu=0.02\ninit.kind = spinodal\noutput.dir = runs/a\n")
                .unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.levels, vec![16, 32]);
        assert_eq!(cfg.nu, 0.02);
        assert_eq!(cfg.init, InitKind::Spinodal);
        assert_eq!(cfg.output_dir, PathBuf::from("runs/a"));
    }

    #[test]
    fn serialisation_round_trips() {
        let cfg = ExperimentConfig {
            n: 48,
            levels: vec![12, 24, 48],
            nu: 0.1 + 0.2,
            eps: 1.0 / 3.0,
            init: InitKind::Vortex,
            seed: 9,
            delta: 1e-3,
            output_every: 25,
            ..Default::default()
        };
        assert_eq!(parse(&serialize_config(&cfg)).unwrap(), cfg);
        assert_eq!(
            parse(&serialize_config(&ExperimentConfig::default())).unwrap(),
            ExperimentConfig::default()
        );
    }

    fn line_of(e: Error) -> usize {
        match e {
            Error::Config { line, .. } => line,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse("grid.n = 32\n\nfluid.mu = 1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("grid.n = 32\ngrid.n = 16\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("# c\ngrid.n 32\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("grid.n = lots\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("init.kind = droplet\n").unwrap_err()), 1);
    }

    #[test]
    fn range_errors_point_at_their_key() {
        let e = parse("grid.n = 32\nfluid.nu = -1\n").unwrap_err();
        assert_eq!(line_of(e), 2);
        let e = parse("grid.n = 32\npotential.f1 = -0.5\n").unwrap_err();
        assert!(e.to_string().contains("test.cfg:2"));
    }
}
