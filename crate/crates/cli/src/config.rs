//! Flat `key = value` configuration, overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Settings shared by the subcommands; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub case: Option<String>,
    pub eps: Option<f64>,
    pub a: Option<f64>,
    pub cond: Option<String>,
    pub resolution: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value, got '{raw}'", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for {key}", lineno + 1);
            match key {
                "case" => s.case = Some(value.to_string()),
                "eps" => s.eps = Some(value.parse().with_context(ctx)?),
                "a" => s.a = Some(value.parse().with_context(ctx)?),
                "cond" => s.cond = Some(value.to_string()),
                "resolution" => s.resolution = Some(value.parse().with_context(ctx)?),
                "out" => s.out = Some(PathBuf::from(value)),
                _ => bail!("line {}: unknown key '{key}'", lineno + 1),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Fields of `flags` take precedence over `self`.
    pub fn overridden_by(self, flags: Settings) -> Self {
        Self {
            case: flags.case.or(self.case),
            eps: flags.eps.or(self.eps),
            a: flags.a.or(self.a),
            cond: flags.cond.or(self.cond),
            resolution: flags.resolution.or(self.resolution),
            out: flags.out.or(self.out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let file = Settings::parse("# defaults\ncase = 1\neps=1e-3\n\ncond = 2 # squared\nresolution = 128\nout = x.csv\n").unwrap();
        assert_eq!(file.case.as_deref(), Some("1"));
        assert_eq!(file.eps, Some(1e-3));
        assert_eq!(file.resolution, Some(128));
        let merged = file.overridden_by(Settings { eps: Some(0.5), ..Default::default() });
        assert_eq!(merged.eps, Some(0.5));
        assert_eq!(merged.cond.as_deref(), Some("2"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Settings::parse("eps 1").is_err());
        assert!(Settings::parse("eps = x").is_err());
        assert!(Settings::parse("colour = red").is_err());
    }
}
