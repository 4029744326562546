use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticCategory {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemanticMap {
    pub categories: Vec<SemanticCategory>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticMapError {
    #[error("line {0}: inconsistent indentation")]
    Indentation(usize),
    #[error("line {0}: duplicate category {1}")]
    Duplicate(usize, String),
}

impl SemanticMap {
    pub fn contains(&self, name: &str) -> bool {
        self.categories.iter().any(|c| c.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&SemanticCategory> {
        self.categories.iter().find(|c| c.name == name)
    }
}

/// Parses an indentation outline: one category per line, two spaces per level.
pub fn parse_semantic_map(text: &str) -> Result<SemanticMap, SemanticMapError> {
    let mut categories: Vec<SemanticCategory> = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.trim_start_matches(' ');
        let name = content.trim_end();
        if name.is_empty() || name.starts_with('#') {
            continue;
        }
        let indent = line.len() - content.len();
        if content.starts_with(char::is_whitespace) || indent % 2 != 0 {
            return Err(SemanticMapError::Indentation(line_no));
        }
        let depth = indent / 2;
        if depth > stack.len() {
            return Err(SemanticMapError::Indentation(line_no));
        }
        stack.truncate(depth);
        if categories.iter().any(|c| c.name == name) {
            return Err(SemanticMapError::Duplicate(line_no, name.to_string()));
        }
        categories.push(SemanticCategory {
            name: name.to_string(),
            parent: stack.last().cloned(),
        });
        stack.push(name.to_string());
    }
    Ok(SemanticMap { categories })
}
