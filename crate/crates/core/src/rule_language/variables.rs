//! Variable definitions (`::name = pattern` lines) and built-in token classes.

use std::collections::BTreeMap;

use thiserror::Error;

use super::pattern::{Pattern, PatternError};

/// Open word classes that cannot be listed exhaustively. They match one
/// whole word and are checked against a predicate instead of a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    /// A word starting with س, after an optional و/ف conjunction.
    SiinCandidate,
    /// Any word.
    AnyWord,
}

impl TokenClass {
    pub fn accepts(self, shadow: &str) -> bool {
        match self {
            TokenClass::AnyWord => !shadow.is_empty(),
            TokenClass::SiinCandidate => {
                let rest = match shadow.strip_prefix(['و', 'ف']) {
                    Some(r) if !r.is_empty() => r,
                    _ => shadow,
                };
                rest.starts_with('س') && rest.chars().count() > 1
            }
        }
    }
}

/// Built-in names, registered in every table.
pub const BUILTINS: [(&str, TokenClass); 2] = [
    ("فعل_مضارع_س", TokenClass::SiinCandidate),
    ("فعل_مضارع_قد", TokenClass::AnyWord),
];

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct VariableError {
    pub line: usize,
    pub kind: VariableErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VariableErrorKind {
    #[error("expected `::name = pattern`")]
    Syntax,
    #[error("duplicate variable ::{0}")]
    Duplicate(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarDef {
    Pattern(Pattern),
    Builtin(TokenClass),
}

/// Variable name to definition. Pattern definitions are stored fully
/// expanded: they only ever reference built-ins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    entries: BTreeMap<String, VarDef>,
}

impl Default for VariableTable {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl VariableTable {
    pub fn with_builtins() -> Self {
        let entries = BUILTINS
            .iter()
            .map(|(n, c)| (n.to_string(), VarDef::Builtin(*c)))
            .collect();
        Self { entries }
    }

    pub fn get(&self, name: &str) -> Option<&VarDef> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn builtin(&self, name: &str) -> Option<TokenClass> {
        match self.entries.get(name) {
            Some(VarDef::Builtin(c)) => Some(*c),
            _ => None,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Inlines every pattern variable referenced by `p`. Built-in references stay.
    pub fn expand(&self, p: &Pattern) -> Result<Pattern, PatternError> {
        if let Some(missing) = p.var_refs().into_iter().find(|n| !self.contains(n)) {
            return Err(PatternError::Unresolved(missing));
        }
        Ok(p.substitute(&self.pattern_defs()))
    }

    fn pattern_defs(&self) -> BTreeMap<String, Pattern> {
        self.entries
            .iter()
            .filter_map(|(n, d)| match d {
                VarDef::Pattern(p) => Some((n.clone(), p.clone())),
                VarDef::Builtin(_) => None,
            })
            .collect()
    }
}

/// Parses `::name = pattern` lines; `#` starts a comment line.
///
/// Definitions may reference each other in any order. File definitions
/// shadow built-ins of the same name.
pub fn parse_variable_defs(text: &str) -> Result<VariableTable, VariableError> {
    let mut raw: BTreeMap<String, (usize, Pattern)> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |kind| VariableError { line: line_no, kind };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or(err(VariableErrorKind::Syntax))?;
        let name = lhs
            .trim()
            .strip_prefix("::")
            .filter(|n| !n.is_empty() && n.chars().all(super::pattern::is_var_name_char))
            .ok_or(err(VariableErrorKind::Syntax))?;
        let pattern = Pattern::parse(rhs.trim()).map_err(|e| err(e.into()))?;
        if raw.insert(name.to_string(), (line_no, pattern)).is_some() {
            return Err(err(VariableErrorKind::Duplicate(name.to_string())));
        }
    }

    let mut table = VariableTable::with_builtins();
    for name in raw.keys() {
        table.entries.remove(name);
    }
    let mut resolved: BTreeMap<String, Pattern> = BTreeMap::new();
    for name in raw.keys() {
        resolve(name, &raw, &table, &mut resolved, &mut Vec::new())?;
    }
    for (name, p) in resolved {
        table.entries.insert(name, VarDef::Pattern(p));
    }
    Ok(table)
}

fn resolve(
    name: &str,
    raw: &BTreeMap<String, (usize, Pattern)>,
    builtins: &VariableTable,
    done: &mut BTreeMap<String, Pattern>,
    stack: &mut Vec<String>,
) -> Result<(), VariableError> {
    if done.contains_key(name) {
        return Ok(());
    }
    let (line, pattern) = &raw[name];
    if stack.iter().any(|s| s == name) {
        return Err(VariableError {
            line: *line,
            kind: PatternError::Recursive(name.to_string()).into(),
        });
    }
    stack.push(name.to_string());
    for dep in pattern.var_refs() {
        if raw.contains_key(&dep) {
            resolve(&dep, raw, builtins, done, stack)?;
        } else if !builtins.contains(&dep) {
            return Err(VariableError {
                line: *line,
                kind: PatternError::Unresolved(dep).into(),
            });
        }
    }
    stack.pop();
    let expanded = pattern.substitute(done);
    done.insert(name.to_string(), expanded);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule_language::pattern::Element;

    #[test]
    fn builtins_present() {
        let t = VariableTable::with_builtins();
        assert_eq!(t.builtin("فعل_مضارع_س"), Some(TokenClass::SiinCandidate));
        assert_eq!(t.builtin("فعل_مضارع_قد"), Some(TokenClass::AnyWord));
    }

    #[test]
    fn siin_candidate_class() {
        let c = TokenClass::SiinCandidate;
        assert!(c.accepts("سيوفر"));
        assert!(c.accepts("وستنطلق"));
        assert!(c.accepts("فسوف"));
        assert!(!c.accepts("س"));
        assert!(!c.accepts("وس"));
        assert!(!c.accepts("يوفر"));
    }

    #[test]
    fn parses_definitions() {
        let t = parse_variable_defs(
            "# comment\n::فعل_ماضي = (و|ف)؟(توقع|استبعد|ارتقب)(ت)؟\n\n::x = ::فعل_ماضي قد\n",
        )
        .unwrap();
        let Some(VarDef::Pattern(x)) = t.get("x") else {
            panic!("x missing")
        };
        // the reference is inlined as a group
        assert!(matches!(&x.elements[0], Element::Alt(a) if a.len() == 1));
        assert!(x.var_refs().is_empty());
    }

    #[test]
    fn forward_references_resolve() {
        let t = parse_variable_defs("::a = ::b ج\n::b = (ا|ب)\n").unwrap();
        assert!(matches!(t.get("a"), Some(VarDef::Pattern(p)) if p.var_refs().is_empty()));
    }

    #[test]
    fn builtin_refs_are_kept() {
        let t = parse_variable_defs("::a = قد ::فعل_مضارع_قد\n").unwrap();
        let Some(VarDef::Pattern(a)) = t.get("a") else {
            panic!()
        };
        assert_eq!(a.var_refs().len(), 1);
    }

    #[test]
    fn errors() {
        let e = parse_variable_defs("::x = (ا|").unwrap_err();
        assert_eq!(e.kind, VariableErrorKind::Pattern(PatternError::Unbalanced));
        let e = parse_variable_defs("::a = ::b\n::b = ::a\n").unwrap_err();
        assert!(matches!(
            e.kind,
            VariableErrorKind::Pattern(PatternError::Recursive(_))
        ));
        let e = parse_variable_defs("::a = ::nope\n").unwrap_err();
        assert_eq!(
            e.kind,
            VariableErrorKind::Pattern(PatternError::Unresolved("nope".into()))
        );
        let e = parse_variable_defs("\n::a = ب\n::a = ج").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_variable_defs("a = b").is_err());
        assert!(parse_variable_defs("::a b").is_err());
    }

    #[test]
    fn file_definition_shadows_builtin() {
        let t = parse_variable_defs("::فعل_مضارع_قد = (يكون|يعود)\n").unwrap();
        assert_eq!(t.builtin("فعل_مضارع_قد"), None);
        assert!(matches!(t.get("فعل_مضارع_قد"), Some(VarDef::Pattern(_))));
    }

    #[test]
    fn expand_reports_unknown() {
        let t = VariableTable::with_builtins();
        let p = Pattern::parse("::missing").unwrap();
        assert_eq!(t.expand(&p), Err(PatternError::Unresolved("missing".into())));
    }
}
