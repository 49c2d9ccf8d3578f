//! Executable logical forms over tables: grammar, parsing, execution,
//! legacy-format conversion, content selection, constrained search and
//! evaluation.

pub mod ast;
pub mod cs;
pub mod dataset;
pub mod eval;
pub mod exec;
pub mod grammar;
pub mod kappa;
pub mod legacy;
pub mod parse;
pub mod sample;
pub mod search;
pub mod successors;
pub mod table;

pub use ast::{extract_sketch, validate, LfNode, LogicalForm, NodePath, Sketch, SketchNode, Violation};
pub use cs::{cs_distribution, extract_cs, CsCategory, CsDistribution, CsReport, CsValue};
pub use dataset::{load_dataset, Dataset, DatasetError, DatasetRecord, Split};
pub use eval::{ablation_table, execution_rate, score_accuracy, AblationRow, AccuracyReport, EvalError, ExecFailure, ExecutionReport, RecordScore};
pub use exec::{execute, execute_node, execute_traced, fcr_accept, EmptyViewPolicy, ExecConfig, ExecError, ExecValue};
pub use grammar::{GrammarRegistry, GrammarRule, NodeKind, RuleOrigin, ValueSemantics};
pub use kappa::{fleiss_kappa, KappaError, RatingMatrix};
pub use legacy::{convert_legacy, strip_true_suffix, ConversionReport, LegacyError, Rewrite, RewriteReason};
pub use parse::{parse_lf, serialize_lf, serialize_node, ParseError};
pub use sample::{sample_lf, SampleConfig};
pub use search::{enumerate_sketches, fill_sketch, generate, Candidate, ScoreWeights, SearchConfig, SearchError};
pub use successors::{grammar_successors, NextSymbol, PrefixError};
pub use table::{coerce_cell, extract_number, normalize_text, Table, TypedValue};
