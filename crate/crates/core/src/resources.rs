//! Bundled data files and the loaded rule set.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{Engine, EngineConfig, EngineError};
use crate::morpho_lite::Lexicons;
use crate::rule_language::{
    parse_rules, parse_semantic_map, parse_variable_defs, LinguisticRule, RuleError, SemanticMap,
    SemanticMapError, VariableError, VariableTable,
};

pub const RULES_FILE: &str = "rules_future_ar.txt";
pub const VARIABLES_FILE: &str = "variables_ar.txt";
pub const SEMANTIC_MAP_FILE: &str = "semantic_map.txt";
pub const KEYWORDS_FILE: &str = "keywords.tsv";
pub const LEXICON_DIR: &str = "lexicon";

pub const BUNDLED_RULES: &str = include_str!("../data/rules_future_ar.txt");
pub const BUNDLED_VARIABLES: &str = include_str!("../data/variables_ar.txt");
pub const BUNDLED_SEMANTIC_MAP: &str = include_str!("../data/semantic_map.txt");
pub const BUNDLED_KEYWORDS: &str = include_str!("../data/keywords.tsv");

/// The worked example sentences and their gold triples.
pub const MINI_GOLD_CORPUS: &str = include_str!("../data/mini_gold/worked_examples.corpus.txt");
pub const MINI_GOLD_TSV: &str = include_str!("../data/mini_gold/gold.tsv");

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{file}: {source}")]
    Variables { file: String, source: VariableError },
    #[error("{file}: {source}")]
    SemanticMap { file: String, source: SemanticMapError },
    #[error("{file}: {source}")]
    Rules { file: String, source: RuleError },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// A semantic map, its variables and the rules parsed against them.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub map: SemanticMap,
    pub vars: VariableTable,
    pub rules: Vec<LinguisticRule>,
}

impl RuleSet {
    pub fn from_texts(map: &str, vars: &str, rules: &str) -> Result<Self, ResourceError> {
        Self::from_named(
            (SEMANTIC_MAP_FILE, map),
            (VARIABLES_FILE, vars),
            (RULES_FILE, rules),
        )
    }

    /// Like `from_texts`, with the file names used in error messages.
    pub fn from_named(
        map: (&str, &str),
        vars: (&str, &str),
        rules: (&str, &str),
    ) -> Result<Self, ResourceError> {
        let sem = parse_semantic_map(map.1).map_err(|source| ResourceError::SemanticMap {
            file: map.0.to_string(),
            source,
        })?;
        let table = parse_variable_defs(vars.1).map_err(|source| ResourceError::Variables {
            file: vars.0.to_string(),
            source,
        })?;
        let parsed = parse_rules(rules.1, &table, &sem).map_err(|source| ResourceError::Rules {
            file: rules.0.to_string(),
            source,
        })?;
        Ok(Self {
            map: sem,
            vars: table,
            rules: parsed,
        })
    }

    pub fn bundled() -> Self {
        Self::from_texts(BUNDLED_SEMANTIC_MAP, BUNDLED_VARIABLES, BUNDLED_RULES).expect("bundled rules parse")
    }

    pub fn from_files(map: &Path, vars: &Path, rules: &Path) -> Result<Self, ResourceError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|source| ResourceError::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let (m, v, r) = (read(map)?, read(vars)?, read(rules)?);
        Self::from_named(
            (&map.display().to_string(), &m),
            (&vars.display().to_string(), &v),
            (&rules.display().to_string(), &r),
        )
    }

    pub fn engine(&self, lexicons: Lexicons, config: EngineConfig) -> Result<Engine, EngineError> {
        Engine::new(&self.rules, &self.vars, lexicons, config)
    }

    /// A copy keeping only the rules accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(&LinguisticRule) -> bool) -> Self {
        Self {
            map: self.map.clone(),
            vars: self.vars.clone(),
            rules: self.rules.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}
