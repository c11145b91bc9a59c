//! Run configuration: a flat dotted-key TOML file, every key overridable by
//! a command-line flag of the same dotted name. Reports embed the hash of
//! the fully-resolved configuration so experiments are diffable.

use crate::engine::Nonlinearity;
use crate::scheduler::{parse_rational, Rat};
use crate::splitter::SplitStrategy;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_points: 2048,
            half_width: 16.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    /// Rational string, e.g. "7/2".
    #[serde(deserialize_with = "string_or_number")]
    pub r: String,
    /// Rational string, e.g. "1/50" or "0.02".
    #[serde(deserialize_with = "string_or_number")]
    pub alpha: String,
    pub c0: f64,
    pub n: f64,
    /// +1 focusing, -1 defocusing.
    pub sign: i32,
    /// 0 means "let the scheduler choose".
    pub q_override: u32,
    pub strategy: String,
    pub k_cap: usize,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            r: "7/2".into(),
            alpha: "1/50".into(),
            c0: 2.0,
            n: 4.0,
            sign: -1,
            q_override: 0,
            strategy: "gabor-threshold".into(),
            k_cap: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub substeps: usize,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            substeps: 64,
            tol: 1e-10,
            max_iters: 40,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    pub output_dir: String,
    pub emit_csv: bool,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            output_dir: "out".into(),
            emit_csv: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub seed: u64,
    pub corpus_size: usize,
    /// Optional path to a saved constants JSON; empty means calibrate fresh.
    pub constants_path: String,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            seed: 7,
            corpus_size: 24,
            constants_path: String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub solver: SolverConfig,
    pub io: IoConfig,
    pub calibration: CalibrationConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse()
                    .map_err(|e| Error::Config(format!("bad TOML in {}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grid.n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid.n_points must be a power of two, got {}",
                self.grid.n_points
            )));
        }
        if !(self.grid.half_width > 0.0) {
            return Err(Error::Config("grid.half_width must be positive".into()));
        }
        self.r_rational()?;
        self.alpha_rational()?;
        self.sign()?;
        self.strategy()?;
        if !(self.params.c0 > 0.0) {
            return Err(Error::Config("params.c0 must be positive".into()));
        }
        if !(self.params.n >= 1.0) {
            return Err(Error::Config("params.n must be >= 1".into()));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::Config("solver.tol must be positive".into()));
        }
        if self.solver.substeps == 0 || self.solver.max_iters == 0 {
            return Err(Error::Config("solver knobs must be positive".into()));
        }
        Ok(())
    }

    pub fn r_rational(&self) -> Result<Rat> {
        parse_rational(&self.params.r)
    }

    pub fn alpha_rational(&self) -> Result<Rat> {
        parse_rational(&self.params.alpha)
    }

    pub fn sign(&self) -> Result<Nonlinearity> {
        Nonlinearity::from_sign(self.params.sign)
    }

    pub fn strategy(&self) -> Result<SplitStrategy> {
        self.params.strategy.parse()
    }

    pub fn q_override(&self) -> Option<u32> {
        if self.params.q_override == 0 {
            None
        } else {
            Some(self.params.q_override)
        }
    }

    /// Output directory: the `MODNLS_OUTPUT_DIR` environment variable wins
    /// over the config key.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var("MODNLS_OUTPUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|_| PathBuf::from(&self.io.output_dir))
    }

    /// Hash of the fully-resolved configuration, embedded in every report.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

/// Accept `"7/2"`, `0.03`, or `4` for rational-valued keys; numbers keep
/// their typed decimal text so `0.03` stays exactly `3/100`.
fn string_or_number<'de, D>(d: D) -> std::result::Result<String, D::Error>
where
    D: serde::Deserializer<'de>,
{
    struct V;
    impl serde::de::Visitor<'_> for V {
        type Value = String;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational string or a number")
        }
        fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<String, E> {
            Ok(v.to_owned())
        }
        fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<String, E> {
            Ok(v.to_string())
        }
        fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<String, E> {
            Ok(v.to_string())
        }
        fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<String, E> {
            Ok(format!("{v}"))
        }
    }
    d.deserialize_any(V)
}

fn apply_override(table: &mut toml::Table, dotted: &str, raw: &str) -> Result<()> {
    let mut parts = dotted.split('.').peekable();
    let mut cur = table;
    loop {
        let part = parts
            .next()
            .ok_or_else(|| Error::Config(format!("empty override key '{dotted}'")))?;
        if parts.peek().is_none() {
            cur.insert(part.to_string(), parse_toml_value(raw));
            return Ok(());
        }
        cur = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{part}' in '{dotted}' is not a table")))?;
    }
}

fn parse_toml_value(raw: &str) -> toml::Value {
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    toml::Value::String(raw.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_hash_deterministically() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = RunConfig::load(
            None,
            &[
                ("grid.n_points".into(), "512".into()),
                ("params.r".into(), "4".into()),
                ("params.alpha".into(), "0.03".into()),
                ("io.emit_csv".into(), "false".into()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.grid.n_points, 512);
        assert_eq!(cfg.params.r, "4");
        assert!(!cfg.io.emit_csv);
        // alpha "0.03" parses to exactly 3/100
        assert_eq!(cfg.alpha_rational().unwrap(), crate::scheduler::rat(3, 100));
    }

    #[test]
    fn bad_values_are_rejected_with_config_errors() {
        let out = RunConfig::load(None, &[("grid.n_points".into(), "1000".into())]);
        assert!(matches!(out, Err(Error::Config(_))));
        let out = RunConfig::load(None, &[("params.sign".into(), "2".into())]);
        assert!(out.is_err());
        let out = RunConfig::load(None, &[("params.strategy".into(), "magic".into())]);
        assert!(out.is_err());
    }

    #[test]
    fn file_and_overrides_compose() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "params.r = \"4\"\nparams.alpha = \"1/40\"\ngrid.n_points = 1024\n")
            .unwrap();
        let cfg = RunConfig::load(
            Some(&path),
            &[("params.alpha".into(), "3/100".into())],
        )
        .unwrap();
        assert_eq!(cfg.grid.n_points, 1024);
        assert_eq!(cfg.alpha_rational().unwrap(), crate::scheduler::rat(3, 100));
    }

    #[test]
    fn override_parse_types() {
        assert_eq!(parse_toml_value("true"), toml::Value::Boolean(true));
        assert_eq!(parse_toml_value("42"), toml::Value::Integer(42));
        assert_eq!(parse_toml_value("0.5"), toml::Value::Float(0.5));
        assert_eq!(
            parse_toml_value("7/2"),
            toml::Value::String("7/2".into())
        );
    }
}
