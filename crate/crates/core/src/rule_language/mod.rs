//! Rule, variable and semantic-map files, and the marker pattern matcher.

mod matcher;
mod pattern;
mod rules;
mod semantic_map;
mod variables;

pub use matcher::{compile_pattern, next_word, Matcher, PatternMatch};
pub use pattern::{Element, Join, Pattern, PatternError};
pub use rules::{
    parse_rules, parse_rules_with, ExtractMode, LinguisticForm, LinguisticRule, MorphGate, Polarity,
    RuleError,
};
pub use semantic_map::{parse_semantic_map, SemanticCategory, SemanticMap, SemanticMapError};
pub use variables::{
    parse_variable_defs, TokenClass, VarDef, VariableError, VariableErrorKind, VariableTable, BUILTINS,
};
