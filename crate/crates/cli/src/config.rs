//! Settings shared by the subcommands.
//!
//! Sources, weakest first: bundled data, `SLCSAS_DATA_DIR`, the `--config`
//! file, command-line flags. The config file is flat `key = value` text;
//! relative paths in it resolve against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use slcsas::corpus_ingest::DEFAULT_MIN_RUN_CHARS;
use slcsas::morpho_lite::Lexicons;
use slcsas::resources::{
    RuleSet, BUNDLED_RULES, BUNDLED_SEMANTIC_MAP, BUNDLED_VARIABLES, LEXICON_DIR, RULES_FILE,
    SEMANTIC_MAP_FILE, VARIABLES_FILE,
};
use slcsas::Boundaries;

pub const DATA_DIR_ENV: &str = "SLCSAS_DATA_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub min_run_chars: usize,
    pub boundaries: Boundaries,
    pub strict_adjacency: bool,
    pub show_all_negative_fields: bool,
    pub lexicon_dir: Option<PathBuf>,
    pub rules_path: Option<PathBuf>,
    pub variables_path: Option<PathBuf>,
    pub semantic_map_path: Option<PathBuf>,
    pub parallelism: usize,
    pub delay_ms: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            min_run_chars: DEFAULT_MIN_RUN_CHARS,
            boundaries: Boundaries::default(),
            strict_adjacency: false,
            show_all_negative_fields: false,
            lexicon_dir: None,
            rules_path: None,
            variables_path: None,
            semantic_map_path: None,
            parallelism: 1,
            delay_ms: 1000,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

impl Config {
    /// Defaults, then whatever a data directory provides.
    pub fn from_data_dir(dir: Option<&Path>) -> Self {
        let mut c = Self::default();
        if let Some(dir) = dir {
            let present = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
            c.rules_path = present(RULES_FILE);
            c.variables_path = present(VARIABLES_FILE);
            c.semantic_map_path = present(SEMANTIC_MAP_FILE);
            c.lexicon_dir = present(LEXICON_DIR);
        }
        c
    }

    pub fn from_env() -> Self {
        let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
        Self::from_data_dir(dir.as_deref())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.apply_text(&text, base)
            .with_context(|| format!("in {}", path.display()))
    }

    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value", i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = || anyhow::anyhow!("line {}: bad value for {key}: {value}", i + 1);
            let path = || Some(base.join(value));
            match key {
                "min_run_chars" => self.min_run_chars = value.parse().map_err(|_| bad())?,
                "boundaries" => self.boundaries = value.parse().map_err(|_| bad())?,
                "strict_adjacency" => self.strict_adjacency = parse_bool(value).ok_or_else(bad)?,
                "show_all_negative_fields" => {
                    self.show_all_negative_fields = parse_bool(value).ok_or_else(bad)?
                }
                "lexicon_dir" => self.lexicon_dir = path(),
                "rules_path" => self.rules_path = path(),
                "variables_path" => self.variables_path = path(),
                "semantic_map_path" => self.semantic_map_path = path(),
                "parallelism" => self.parallelism = value.parse().map_err(|_| bad())?,
                "delay_ms" => self.delay_ms = value.parse().map_err(|_| bad())?,
                _ => bail!("line {}: unknown key {key}", i + 1),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        for p in [
            &self.lexicon_dir,
            &self.rules_path,
            &self.variables_path,
            &self.semantic_map_path,
        ]
        .into_iter()
        .flatten()
        {
            if !p.exists() {
                bail!("{} does not exist", p.display());
            }
        }
        Ok(())
    }

    pub fn rule_set(&self) -> Result<RuleSet> {
        let read = |p: &Option<PathBuf>, bundled: &'static str| -> Result<String> {
            match p {
                Some(p) => fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())),
                None => Ok(bundled.to_string()),
            }
        };
        let map = read(&self.semantic_map_path, BUNDLED_SEMANTIC_MAP)?;
        let vars = read(&self.variables_path, BUNDLED_VARIABLES)?;
        let rules = read(&self.rules_path, BUNDLED_RULES)?;
        let name = |p: &Option<PathBuf>, default: &str| {
            p.as_ref()
                .map_or(default.to_string(), |p| p.display().to_string())
        };
        RuleSet::from_named(
            (
                name(&self.semantic_map_path, SEMANTIC_MAP_FILE).as_str(),
                map.as_str(),
            ),
            (name(&self.variables_path, VARIABLES_FILE).as_str(), vars.as_str()),
            (name(&self.rules_path, RULES_FILE).as_str(), rules.as_str()),
        )
        .map_err(Into::into)
    }

    pub fn lexicons(&self) -> Result<Lexicons> {
        match &self.lexicon_dir {
            Some(d) => Lexicons::extended_from_dir(d).map_err(Into::into),
            None => Ok(Lexicons::bundled()),
        }
    }
}
