//! The fixed (disambiguated) logical-form grammar, loaded as data.
//!
//! The rule inventory lives in `data/grammar.csv` so the transcription is
//! reviewable: one row per rule with its result kind, argument kinds, value
//! semantics and the ambiguous legacy name it descends from.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node kinds of the logical-form graph. `C`, `V` and `I` are always leaves;
/// the other five are always rule-bearing internal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    /// Boolean statement; the root of every logical form.
    Stat,
    /// Set of rows.
    View,
    /// Numeric aggregate.
    N,
    /// Single-row selector.
    Row,
    /// Extracted value.
    Obj,
    /// Column leaf.
    C,
    /// Value leaf.
    V,
    /// Ordinal index leaf.
    I,
}

impl NodeKind {
    pub const ALL: [NodeKind; 8] = [
        NodeKind::Stat,
        NodeKind::View,
        NodeKind::N,
        NodeKind::Row,
        NodeKind::Obj,
        NodeKind::C,
        NodeKind::V,
        NodeKind::I,
    ];

    pub fn is_leaf(self) -> bool {
        matches!(self, NodeKind::C | NodeKind::V | NodeKind::I)
    }

    /// Whether a node of kind `actual` may stand in a position declared as
    /// `self`. An Obj position also admits numeric aggregates and value
    /// leaves (the grammar's implicit `Obj <- N` / `Obj <- V` injections).
    pub fn accepts(self, actual: NodeKind) -> bool {
        self == actual || (self == NodeKind::Obj && matches!(actual, NodeKind::N | NodeKind::V))
    }

    pub fn parse(s: &str) -> Option<NodeKind> {
        match s {
            "Stat" => Some(NodeKind::Stat),
            "View" => Some(NodeKind::View),
            "N" => Some(NodeKind::N),
            "Row" => Some(NodeKind::Row),
            "Obj" => Some(NodeKind::Obj),
            "C" => Some(NodeKind::C),
            "V" => Some(NodeKind::V),
            "I" => Some(NodeKind::I),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Stat => "Stat",
            NodeKind::View => "View",
            NodeKind::N => "N",
            NodeKind::Row => "Row",
            NodeKind::Obj => "Obj",
            NodeKind::C => "C",
            NodeKind::V => "V",
            NodeKind::I => "I",
        };
        f.write_str(s)
    }
}

/// Whether a rule compares values numerically (with date support), as strict
/// strings, or does not touch cell values at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueSemantics {
    Numeric,
    String,
    Agnostic,
}

/// Whether a rule existed in the original grammar or was added by the
/// disambiguation fix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleOrigin {
    Original,
    Added,
}

/// A single grammar production.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarRule {
    pub name: String,
    pub result_kind: NodeKind,
    pub arg_kinds: Vec<NodeKind>,
    pub value_semantics: ValueSemantics,
    /// Surface name of this rule in the pre-fix ambiguous grammar.
    pub legacy_name: String,
    pub origin: RuleOrigin,
    /// Transcription flag carried over from the registry file, if any.
    pub note: Option<String>,
}

impl GrammarRule {
    pub fn arity(&self) -> usize {
        self.arg_kinds.len()
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry line {line}: expected 7 comma-separated fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("registry line {line}: unknown node kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("registry line {line}: unknown value semantics `{tag}`")]
    UnknownSemantics { line: usize, tag: String },
    #[error("registry line {line}: unknown origin `{tag}`")]
    UnknownOrigin { line: usize, tag: String },
    #[error("registry line {line}: duplicate rule name `{name}`")]
    DuplicateRule { line: usize, name: String },
    #[error("registry line {line}: leaf kind {kind} cannot be a rule result")]
    LeafResult { line: usize, kind: NodeKind },
    #[error("registry has no rule producing {0}")]
    MissingKind(NodeKind),
}

/// The full rule set, indexed by name and by result kind.
///
/// Also carries the ordinal bound for `I` leaves (default 20).
#[derive(Debug, Clone)]
pub struct GrammarRegistry {
    rules: Vec<GrammarRule>,
    by_name: BTreeMap<String, usize>,
    by_kind: BTreeMap<NodeKind, Vec<usize>>,
    index_bound: u32,
}

pub const DEFAULT_INDEX_BOUND: u32 = 20;

static DEFAULT_REGISTRY: OnceLock<Arc<GrammarRegistry>> = OnceLock::new();

const GRAMMAR_CSV: &str = include_str!("../data/grammar.csv");

impl GrammarRegistry {
    /// Parse a registry from the declarative CSV table.
    pub fn from_csv(text: &str) -> Result<GrammarRegistry, RegistryError> {
        let mut rules = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                // First non-comment line is the column header.
                header_seen = true;
                continue;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = line.splitn(7, ',').collect();
            if fields.len() != 7 {
                return Err(RegistryError::FieldCount {
                    line: lineno,
                    got: fields.len(),
                });
            }
            let result_kind = NodeKind::parse(fields[1]).ok_or_else(|| RegistryError::UnknownKind {
                line: lineno,
                kind: fields[1].to_string(),
            })?;
            if result_kind.is_leaf() {
                return Err(RegistryError::LeafResult {
                    line: lineno,
                    kind: result_kind,
                });
            }
            let mut arg_kinds = Vec::new();
            for tok in fields[2].split_whitespace() {
                arg_kinds.push(NodeKind::parse(tok).ok_or_else(|| RegistryError::UnknownKind {
                    line: lineno,
                    kind: tok.to_string(),
                })?);
            }
            let value_semantics = match fields[3] {
                "numeric" => ValueSemantics::Numeric,
                "string" => ValueSemantics::String,
                "agnostic" => ValueSemantics::Agnostic,
                other => {
                    return Err(RegistryError::UnknownSemantics {
                        line: lineno,
                        tag: other.to_string(),
                    })
                }
            };
            let origin = match fields[5] {
                "original" => RuleOrigin::Original,
                "added" => RuleOrigin::Added,
                other => {
                    return Err(RegistryError::UnknownOrigin {
                        line: lineno,
                        tag: other.to_string(),
                    })
                }
            };
            let note = fields[6].trim();
            rules.push(GrammarRule {
                name: fields[0].to_string(),
                result_kind,
                arg_kinds,
                value_semantics,
                legacy_name: fields[4].to_string(),
                origin,
                note: if note.is_empty() {
                    None
                } else {
                    Some(note.to_string())
                },
            });
        }
        GrammarRegistry::from_rules(rules)
    }

    pub fn from_rules(rules: Vec<GrammarRule>) -> Result<GrammarRegistry, RegistryError> {
        let mut by_name = BTreeMap::new();
        let mut by_kind: BTreeMap<NodeKind, Vec<usize>> = BTreeMap::new();
        for (i, rule) in rules.iter().enumerate() {
            if by_name.insert(rule.name.clone(), i).is_some() {
                return Err(RegistryError::DuplicateRule {
                    line: 0,
                    name: rule.name.clone(),
                });
            }
            by_kind.entry(rule.result_kind).or_default().push(i);
        }
        for kind in [
            NodeKind::Stat,
            NodeKind::View,
            NodeKind::N,
            NodeKind::Row,
            NodeKind::Obj,
        ] {
            if !by_kind.contains_key(&kind) {
                return Err(RegistryError::MissingKind(kind));
            }
        }
        Ok(GrammarRegistry {
            rules,
            by_name,
            by_kind,
            index_bound: DEFAULT_INDEX_BOUND,
        })
    }

    /// The built-in registry transcribed from the fixed grammar.
    pub fn default_registry() -> Arc<GrammarRegistry> {
        DEFAULT_REGISTRY
            .get_or_init(|| {
                Arc::new(GrammarRegistry::from_csv(GRAMMAR_CSV).expect("built-in grammar table"))
            })
            .clone()
    }

    pub fn rule(&self, name: &str) -> Option<&GrammarRule> {
        self.by_name.get(name).map(|&i| &self.rules[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    /// Rules producing exactly `kind`, in registry (file) order.
    pub fn rules_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &GrammarRule> {
        self.by_kind
            .get(&kind)
            .into_iter()
            .flatten()
            .map(move |&i| &self.rules[i])
    }

    /// Rules admissible at a position declared as `declared`, i.e. whose
    /// result kind is accepted there. Sorted by rule name.
    pub fn rules_accepted_at(&self, declared: NodeKind) -> Vec<&GrammarRule> {
        let mut out: Vec<&GrammarRule> = self
            .rules
            .iter()
            .filter(|r| declared.accepts(r.result_kind))
            .collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    pub fn index_bound(&self) -> u32 {
        self.index_bound
    }

    pub fn with_index_bound(mut self, bound: u32) -> GrammarRegistry {
        self.index_bound = bound;
        self
    }

    /// All rules descending from the given legacy (ambiguous) surface name.
    pub fn variants_of_legacy(&self, legacy: &str) -> Vec<&GrammarRule> {
        self.rules
            .iter()
            .filter(|r| r.legacy_name == legacy)
            .collect()
    }

    /// Legacy surface names that map to more than one fixed rule and hence
    /// need resolution during conversion.
    pub fn ambiguous_legacy_names(&self) -> Vec<&str> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.rules {
            *counts.entry(r.legacy_name.as_str()).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|&(_, n)| n > 1)
            .map(|(name, _)| name)
            .collect()
    }
}
