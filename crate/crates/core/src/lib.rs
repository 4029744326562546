//! Identification of Arabic future-event expressions in news text.
//!
//! The pipeline: [`corpus_ingest`] turns HTML pages into corpus documents,
//! [`segmenter`] splits them into sentences and tokens, [`engine`] applies
//! contextual-exploration rules from [`rule_language`] with morphological
//! checks from [`morpho_lite`], [`report`] renders highlighted HTML pages and
//! [`eval`] scores the output against gold annotations.

pub mod corpus_ingest;
pub mod engine;
pub mod eval;
pub mod morpho_lite;
pub mod report;
pub mod resources;
pub mod rule_language;
pub mod segmenter;

pub use corpus_ingest::{Document, RawPage};
pub use engine::{Annotation, DocumentAnalysis, Engine, EngineConfig, RejectionTrace};
pub use eval::{EvalReport, FutureClass, GoldAnnotation};
pub use morpho_lite::{Lexicons, MorphVerdict, Verdict};
pub use resources::RuleSet;
pub use rule_language::{LinguisticRule, Pattern, SemanticMap, VariableTable};
pub use segmenter::{Boundaries, Segmenter, Sentence, Span, Token, TokenKind};
