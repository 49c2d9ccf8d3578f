//! Conversion from the ambiguous legacy surface syntax to the fixed grammar.
//!
//! Legacy forms overload one name for numeric and string comparison
//! (`eq`, `filter_eq`, `most_eq`, ...) and use `hop` over both rows and
//! views. Conversion types each occurrence: a literal operand that reads as
//! a number or date keeps the numeric rule, a text literal selects the
//! string twin, and with no literal the referenced column votes by majority
//! coercion. `hop` over a view becomes the first-row variant. Every rename
//! is reported with its path; undecidable cases default to the string twin
//! and raise a warning. Conversion is idempotent: fixed-grammar input comes
//! back unchanged.

use serde::Serialize;
use thiserror::Error;

use crate::ast::{LfNode, LogicalForm, NodePath};
use crate::grammar::{GrammarRegistry, NodeKind, ValueSemantics};
use crate::parse::{lex, ParseError, Token};
use crate::table::{coerce_cell, Table, TypedValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteReason {
    /// A string-semantics twin replaced the overloaded numeric name.
    StringVariant,
    /// The numeric member of an overloaded family was selected under a
    /// name that had to change (`hop` to `num_hop`).
    NumericVariant,
    /// `hop` applied to a view became the first-row hop.
    HopFirst,
}

/// One renamed node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rewrite {
    pub path: NodePath,
    pub old: String,
    pub new: String,
    pub reason: RewriteReason,
}

/// A node whose variant could not be decided; the string twin was used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionWarning {
    pub path: NodePath,
    pub message: String,
}

impl std::fmt::Display for ConversionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConversionReport {
    pub rewrites: Vec<Rewrite>,
    pub warnings: Vec<ConversionWarning>,
    /// Whether a trailing `= true` marker was removed.
    pub stripped_suffix: bool,
}

impl ConversionReport {
    pub fn has_hop_first(&self) -> bool {
        self.rewrites
            .iter()
            .any(|r| r.reason == RewriteReason::HopFirst)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LegacyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{path}: unknown rule `{name}`")]
    UnknownRule { path: NodePath, name: String },
    #[error("{path}: rule `{rule}` takes {expected} arguments, found {got}")]
    Arity {
        path: NodePath,
        rule: String,
        expected: usize,
        got: usize,
    },
    #[error("{path}: `{rule}` needs a {expected} subtree, found a leaf")]
    LeafAtRulePosition {
        path: NodePath,
        rule: String,
        expected: NodeKind,
    },
    #[error("{path}: `{rule}` produces {got}, but the position wants {expected}")]
    KindMismatch {
        path: NodePath,
        rule: String,
        expected: NodeKind,
        got: NodeKind,
    },
    #[error("{path}: `hop` needs a row or view subtree, found {found}")]
    BadHopSource { path: NodePath, found: NodeKind },
    #[error("{path}: `{token}` is not an ordinal index")]
    BadIndex { path: NodePath, token: String },
    #[error("root must be a statement rule, found `{rule}`")]
    RootNotStat { rule: String },
}

/// Remove a trailing `= true` marker (any case, any spacing around `=`).
pub fn strip_true_suffix(text: &str) -> (&str, bool) {
    let t = text.trim_end();
    let lower = t.to_lowercase();
    if let Some(stripped_len) = lower.strip_suffix("true").map(|rest| rest.len()) {
        let rest = t[..stripped_len].trim_end();
        if let Some(body) = rest.strip_suffix('=') {
            return (body.trim_end(), true);
        }
    }
    (t, false)
}

/// Syntax tree before variant resolution: names are uninterpreted.
enum Raw {
    Node { name: String, children: Vec<Raw> },
    Leaf { text: String },
}

struct RawParser<'a> {
    toks: Vec<Token>,
    pos: usize,
    reg: &'a GrammarRegistry,
}

impl<'a> RawParser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn is_rule_word(&self, w: &str) -> bool {
        self.reg.contains(w) || !self.reg.variants_of_legacy(w).is_empty()
    }

    /// Whether a rule word can stand alone, without braces.
    fn zero_arity(&self, w: &str) -> bool {
        if let Some(r) = self.reg.rule(w) {
            return r.arity() == 0;
        }
        self.reg
            .variants_of_legacy(w)
            .iter()
            .any(|r| r.arity() == 0)
    }

    fn parse_item(&mut self) -> Result<Raw, ParseError> {
        match self.peek() {
            Some(Token::Word { text, escaped }) => {
                let first = text.clone();
                let escaped = *escaped;
                let next_is_open = matches!(self.toks.get(self.pos + 1), Some(Token::Open));
                if !escaped && self.is_rule_word(&first) {
                    if next_is_open {
                        self.pos += 1;
                        return self.parse_children(first);
                    }
                    if self.zero_arity(&first) {
                        self.pos += 1;
                        return Ok(Raw::Node {
                            name: first,
                            children: Vec::new(),
                        });
                    }
                } else if !escaped && next_is_open {
                    // A braced call on a name outside both grammars.
                    return Err(ParseError::UnknownRule { name: first });
                }
                self.parse_leaf()
            }
            Some(t) => Err(ParseError::UnexpectedToken {
                found: t.describe(),
            }),
            None => Err(ParseError::UnbalancedBraces),
        }
    }

    fn parse_children(&mut self, name: String) -> Result<Raw, ParseError> {
        // Opening brace is current.
        debug_assert!(matches!(self.peek(), Some(Token::Open)));
        self.pos += 1;
        let mut children = vec![self.parse_item()?];
        loop {
            match self.peek() {
                Some(Token::Semi) => {
                    self.pos += 1;
                    children.push(self.parse_item()?);
                }
                Some(Token::Close) => {
                    self.pos += 1;
                    return Ok(Raw::Node { name, children });
                }
                Some(t) => {
                    return Err(ParseError::UnexpectedToken {
                        found: t.describe(),
                    })
                }
                None => return Err(ParseError::UnbalancedBraces),
            }
        }
    }

    fn parse_leaf(&mut self) -> Result<Raw, ParseError> {
        let mut words: Vec<String> = Vec::new();
        while let Some(Token::Word { text, .. }) = self.peek() {
            words.push(text.clone());
            self.pos += 1;
        }
        if words.is_empty() {
            return Err(ParseError::EmptyLeaf {
                expected: NodeKind::V,
            });
        }
        Ok(Raw::Leaf {
            text: words.join(" "),
        })
    }
}

struct Converter<'a> {
    table: Option<&'a Table>,
    reg: &'a GrammarRegistry,
    report: ConversionReport,
}

/// Numeric-vs-string evidence gathered from one operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Evidence {
    Numeric,
    Stringy,
    None,
}

impl<'a> Converter<'a> {
    /// Majority vote over a column's cells: numbers and dates for the
    /// numeric twin, text for the string twin.
    fn column_vote(&self, col_name: &str) -> Option<Evidence> {
        let table = self.table?;
        let col = table.col_index(col_name).ok()?;
        if table.n_rows() == 0 {
            return None;
        }
        let numeric = table
            .column_values(col)
            .filter(|c| !matches!(coerce_cell(c), TypedValue::Text(_)))
            .count();
        Some(if numeric * 2 >= table.n_rows() {
            Evidence::Numeric
        } else {
            Evidence::Stringy
        })
    }

    fn leaf_evidence(text: &str) -> Evidence {
        match coerce_cell(text) {
            TypedValue::Text(_) => Evidence::Stringy,
            _ => Evidence::Numeric,
        }
    }

    /// Evidence carried by an already-resolved operand subtree.
    fn child_evidence(&self, node: &LfNode) -> Evidence {
        match node {
            LfNode::Rule { name, .. } => match self.reg.rule(name) {
                Some(rule) if rule.result_kind == NodeKind::N => Evidence::Numeric,
                Some(rule) if rule.value_semantics == ValueSemantics::String => Evidence::Stringy,
                Some(_) if name == "diff" => Evidence::Numeric,
                // A numeric hop was already voted numeric by its column.
                Some(_) if name.starts_with("num_hop") => Evidence::Numeric,
                _ => Evidence::None,
            },
            LfNode::Value(text) => Self::leaf_evidence(text),
            _ => Evidence::None,
        }
    }

    fn record(&mut self, path: &NodePath, old: &str, new: &str) {
        if old == new {
            return;
        }
        let reason = if new.ends_with("_first") {
            RewriteReason::HopFirst
        } else if self
            .reg
            .rule(new)
            .map(|r| r.value_semantics == ValueSemantics::String)
            .unwrap_or(false)
        {
            RewriteReason::StringVariant
        } else {
            RewriteReason::NumericVariant
        };
        self.report.rewrites.push(Rewrite {
            path: path.clone(),
            old: old.to_string(),
            new: new.to_string(),
            reason,
        });
    }

    fn warn(&mut self, path: &NodePath, message: impl Into<String>) {
        self.report.warnings.push(ConversionWarning {
            path: path.clone(),
            message: message.into(),
        });
    }

    fn resolve(&mut self, raw: &Raw, path: &NodePath) -> Result<LfNode, LegacyError> {
        let Raw::Node { name, children } = raw else {
            unreachable!("resolve takes rule nodes");
        };

        // Resolve rule-shaped children first; leaves wait for the final
        // rule's declared argument kinds.
        let mut resolved: Vec<Option<LfNode>> = Vec::with_capacity(children.len());
        for (i, c) in children.iter().enumerate() {
            match c {
                Raw::Node { .. } => resolved.push(Some(self.resolve(c, &path.child(i))?)),
                Raw::Leaf { .. } => resolved.push(None),
            }
        }

        let final_name = self.choose_name(name, children, &resolved, path)?;
        self.record(path, name, &final_name);
        let rule = self
            .reg
            .rule(&final_name)
            .ok_or_else(|| LegacyError::UnknownRule {
                path: path.clone(),
                name: final_name.clone(),
            })?
            .clone();
        if children.len() != rule.arity() {
            return Err(LegacyError::Arity {
                path: path.clone(),
                rule: final_name,
                expected: rule.arity(),
                got: children.len(),
            });
        }

        let mut out = Vec::with_capacity(children.len());
        for (i, (raw_child, done)) in children.iter().zip(resolved).enumerate() {
            let declared = rule.arg_kinds[i];
            let child_path = path.child(i);
            match done {
                Some(node) => {
                    let got = node.kind(self.reg).expect("resolved rules are known");
                    if !declared.accepts(got) {
                        let Raw::Node { name: cname, .. } = raw_child else {
                            unreachable!();
                        };
                        return Err(LegacyError::KindMismatch {
                            path: child_path,
                            rule: cname.clone(),
                            expected: declared,
                            got,
                        });
                    }
                    out.push(node);
                }
                None => {
                    let Raw::Leaf { text } = raw_child else {
                        unreachable!();
                    };
                    out.push(match declared {
                        NodeKind::C => LfNode::Column(text.clone()),
                        NodeKind::V | NodeKind::Obj => LfNode::Value(text.clone()),
                        NodeKind::I => {
                            let ok = !text.is_empty()
                                && text.chars().all(|c| c.is_ascii_digit())
                                && !text.contains(' ');
                            let parsed = if ok { text.parse::<u32>().ok() } else { None };
                            match parsed {
                                Some(v) => LfNode::Index(v),
                                None => {
                                    return Err(LegacyError::BadIndex {
                                        path: child_path,
                                        token: text.clone(),
                                    })
                                }
                            }
                        }
                        other => {
                            return Err(LegacyError::LeafAtRulePosition {
                                path: child_path,
                                rule: final_name.clone(),
                                expected: other,
                            })
                        }
                    });
                }
            }
        }
        Ok(LfNode::Rule {
            name: final_name,
            children: out,
        })
    }

    /// Pick the fixed-grammar name for one legacy occurrence.
    fn choose_name(
        &mut self,
        name: &str,
        children: &[Raw],
        resolved: &[Option<LfNode>],
        path: &NodePath,
    ) -> Result<String, LegacyError> {
        let variants = self.reg.variants_of_legacy(name);
        if variants.len() <= 1 {
            if self.reg.contains(name) {
                return Ok(name.to_string());
            }
            if let [only] = variants.as_slice() {
                return Ok(only.name.clone());
            }
            return Err(LegacyError::UnknownRule {
                path: path.clone(),
                name: name.to_string(),
            });
        }

        if name == "hop" {
            return self.choose_hop(children, resolved, path);
        }
        // A fixed-grammar name that doubles as a legacy surface (`eq`,
        // `filter_eq`, ...): decide numeric vs string.
        let numeric_rule = variants
            .iter()
            .find(|r| r.value_semantics == ValueSemantics::Numeric)
            .expect("overloaded family has a numeric member");
        let signature = numeric_rule.arg_kinds.clone();
        let numeric = numeric_rule.name.clone();
        let stringy = variants
            .iter()
            .find(|r| r.value_semantics == ValueSemantics::String)
            .expect("overloaded family has a string member")
            .name
            .clone();

        // Literal value operands vote first (column-name leaves carry no
        // evidence); any text literal selects the string twin.
        let mut evidence = Evidence::None;
        for (i, (raw_child, done)) in children.iter().zip(resolved).enumerate() {
            if !matches!(
                signature.get(i),
                Some(NodeKind::V) | Some(NodeKind::Obj)
            ) {
                continue;
            }
            let e = match (raw_child, done) {
                (Raw::Leaf { text }, _) => Self::leaf_evidence(text),
                (_, Some(node)) => self.child_evidence(node),
                _ => Evidence::None,
            };
            match e {
                Evidence::Stringy => {
                    evidence = Evidence::Stringy;
                    break;
                }
                Evidence::Numeric => evidence = Evidence::Numeric,
                Evidence::None => {}
            }
        }
        if evidence == Evidence::None {
            // No literals and neutral children: let the referenced columns
            // vote by majority coercion.
            let mut vote = Evidence::None;
            for done in resolved.iter().flatten() {
                if let LfNode::Rule { children, .. } = done {
                    for c in children {
                        if let LfNode::Column(col) = c {
                            match self.column_vote(col) {
                                Some(Evidence::Stringy) => {
                                    vote = Evidence::Stringy;
                                    break;
                                }
                                Some(Evidence::Numeric) => vote = Evidence::Numeric,
                                _ => {}
                            }
                        }
                    }
                }
            }
            evidence = vote;
        }
        Ok(match evidence {
            Evidence::Numeric => numeric,
            Evidence::Stringy => stringy,
            Evidence::None => {
                self.warn(
                    path,
                    format!("cannot decide numeric or string `{name}`; using `{stringy}`"),
                );
                stringy
            }
        })
    }

    fn choose_hop(
        &mut self,
        children: &[Raw],
        resolved: &[Option<LfNode>],
        path: &NodePath,
    ) -> Result<String, LegacyError> {
        let source_kind = match resolved.first() {
            Some(Some(node)) => node.kind(self.reg).expect("resolved rules are known"),
            _ => {
                return Err(LegacyError::LeafAtRulePosition {
                    path: path.child(0),
                    rule: "hop".into(),
                    expected: NodeKind::Row,
                })
            }
        };
        let on_view = match source_kind {
            NodeKind::Row => false,
            NodeKind::View => true,
            other => {
                return Err(LegacyError::BadHopSource {
                    path: path.clone(),
                    found: other,
                })
            }
        };
        let col_name = match children.get(1) {
            Some(Raw::Leaf { text }) => Some(text.clone()),
            _ => None,
        };
        let vote = col_name.and_then(|c| self.column_vote(&c));
        let numeric = match vote {
            Some(Evidence::Numeric) => true,
            Some(_) => false,
            None => {
                self.warn(
                    path,
                    "cannot type `hop` without its column; using the string variant",
                );
                false
            }
        };
        Ok(match (numeric, on_view) {
            (true, false) => "num_hop",
            (false, false) => "str_hop",
            (true, true) => "num_hop_first",
            (false, true) => "str_hop_first",
        }
        .to_string())
    }
}

/// Convert legacy surface text to a fixed-grammar form. The table, when
/// given, breaks numeric-vs-string ties by column content.
pub fn convert_legacy(
    text: &str,
    table: Option<&Table>,
    reg: &GrammarRegistry,
) -> Result<(LogicalForm, ConversionReport), LegacyError> {
    let (body, stripped) = strip_true_suffix(text);
    let toks = lex(body)?;
    if toks.is_empty() {
        return Err(LegacyError::Parse(ParseError::Empty));
    }
    let mut parser = RawParser { toks, pos: 0, reg };
    let raw = parser.parse_item()?;
    if let Some(t) = parser.peek() {
        return Err(LegacyError::Parse(ParseError::TrailingInput {
            at: t.describe(),
        }));
    }
    let raw = match raw {
        Raw::Node { .. } => raw,
        Raw::Leaf { text } => {
            return Err(LegacyError::Parse(ParseError::UnknownRule {
                name: text.split(' ').next().unwrap_or("").to_string(),
            }))
        }
    };
    let mut conv = Converter {
        table,
        reg,
        report: ConversionReport {
            stripped_suffix: stripped,
            ..ConversionReport::default()
        },
    };
    let root = conv.resolve(&raw, &NodePath::root())?;
    match root.kind(reg) {
        Some(NodeKind::Stat) => {}
        _ => {
            let LfNode::Rule { name, .. } = &root else {
                unreachable!();
            };
            return Err(LegacyError::RootNotStat { rule: name.clone() });
        }
    }
    Ok((LogicalForm::new(root), conv.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_lf, serialize_lf};

    fn table() -> Table {
        Table::new(
            "1979 philadelphia eagles season",
            vec!["opponent".into(), "result".into(), "attendance".into()],
            vec![
                vec!["new york giants".into(), "w 23-17".into(), "67000".into()],
                vec!["atlanta falcons".into(), "l 14-10".into(), "39700".into()],
                vec![
                    "new orleans saints".into(),
                    "w 26-14".into(),
                    "54000".into(),
                ],
                vec!["new york giants".into(), "w 17-13".into(), "27500".into()],
                vec![
                    "pittsburgh steelers".into(),
                    "w 17-14".into(),
                    "61500".into(),
                ],
            ],
        )
        .unwrap()
    }

    fn convert(text: &str) -> (LogicalForm, ConversionReport) {
        let reg = GrammarRegistry::default_registry();
        convert_legacy(text, Some(&table()), &reg).unwrap()
    }

    #[test]
    fn suffix_stripping() {
        assert_eq!(strip_true_suffix("x { y } = true"), ("x { y }", true));
        assert_eq!(strip_true_suffix("x { y }=true"), ("x { y }", true));
        assert_eq!(strip_true_suffix("x { y } = TRUE "), ("x { y }", true));
        assert_eq!(strip_true_suffix("x { y }"), ("x { y }", false));
        assert_eq!(strip_true_suffix("true"), ("true", false));
    }

    #[test]
    fn string_filter_gets_twin() {
        let (lf, report) = convert(
            "eq { avg { filter_eq { all_rows ; result ; w } ; attendance } ; 52500 } = true",
        );
        assert_eq!(
            serialize_lf(&lf),
            "eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52500 }"
        );
        assert!(report.stripped_suffix);
        assert_eq!(report.rewrites.len(), 1);
        let rw = &report.rewrites[0];
        assert_eq!(rw.old, "filter_eq");
        assert_eq!(rw.new, "filter_str_eq");
        assert_eq!(rw.reason, RewriteReason::StringVariant);
        assert_eq!(rw.path.to_string(), "/0/0");
        assert!(!report.has_hop_first());
    }

    #[test]
    fn numeric_filter_keeps_name() {
        let (lf, report) = convert("eq { count { filter_eq { all_rows ; attendance ; 67000 } } ; 1 }");
        assert_eq!(
            serialize_lf(&lf),
            "eq { count { filter_eq { all_rows ; attendance ; 67000 } } ; 1 }"
        );
        assert!(report.rewrites.is_empty());
    }

    #[test]
    fn hop_over_row_stays_plain() {
        let (lf, report) =
            convert("eq { hop { argmax { all_rows ; attendance } ; attendance } ; 67000 }");
        assert_eq!(
            serialize_lf(&lf),
            "eq { num_hop { argmax { all_rows ; attendance } ; attendance } ; 67000 }"
        );
        assert_eq!(report.rewrites.len(), 1);
        assert_eq!(report.rewrites[0].reason, RewriteReason::NumericVariant);
        assert!(!report.has_hop_first());
    }

    #[test]
    fn hop_over_view_becomes_first() {
        let (lf, report) =
            convert("eq { hop { filter_eq { all_rows ; result ; w } ; attendance } ; 67000 }");
        assert_eq!(
            serialize_lf(&lf),
            "eq { num_hop_first { filter_str_eq { all_rows ; result ; w } ; attendance } ; 67000 }"
        );
        assert!(report.has_hop_first());
        let reasons: Vec<RewriteReason> = report.rewrites.iter().map(|r| r.reason).collect();
        assert!(reasons.contains(&RewriteReason::HopFirst));
        assert!(reasons.contains(&RewriteReason::StringVariant));
    }

    #[test]
    fn text_column_hop_gets_string_variant() {
        let (lf, _) =
            convert("eq { hop { argmax { all_rows ; attendance } ; opponent } ; new york giants }");
        assert_eq!(
            serialize_lf(&lf),
            "str_eq { str_hop { argmax { all_rows ; attendance } ; opponent } ; new york giants }"
        );
    }

    #[test]
    fn quantifiers_follow_their_literal() {
        let (lf, _) = convert("most_eq { all_rows ; result ; w }");
        assert_eq!(serialize_lf(&lf), "most_str_eq { all_rows ; result ; w }");
        let (lf, _) = convert("all_eq { all_rows ; attendance ; 5 }");
        assert_eq!(serialize_lf(&lf), "all_eq { all_rows ; attendance ; 5 }");
    }

    #[test]
    fn aggregate_comparisons_stay_numeric() {
        let (lf, report) = convert("eq { count { all_rows } ; 5 }");
        assert_eq!(serialize_lf(&lf), "eq { count { all_rows } ; 5 }");
        assert!(report.rewrites.is_empty());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn no_table_defaults_to_string_with_warning() {
        let reg = GrammarRegistry::default_registry();
        let (lf, report) = convert_legacy(
            "eq { hop { argmax { all_rows ; a } ; a } ; hop { argmin { all_rows ; a } ; a } }",
            None,
            &reg,
        )
        .unwrap();
        assert_eq!(
            serialize_lf(&lf),
            "str_eq { str_hop { argmax { all_rows ; a } ; a } ; str_hop { argmin { all_rows ; a } ; a } }"
        );
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn conversion_is_idempotent() {
        let cases = [
            "eq { avg { filter_eq { all_rows ; result ; w } ; attendance } ; 52500 } = true",
            "eq { hop { filter_eq { all_rows ; result ; w } ; attendance } ; 67000 } = true",
            "most_eq { all_rows ; result ; w } = true",
            "and { only { filter_eq { all_rows ; opponent ; atlanta falcons } } ; eq { hop { argmin { all_rows ; attendance } ; result } ; l 14-10 } } = true",
        ];
        let reg = GrammarRegistry::default_registry();
        let t = table();
        for case in cases {
            let (first, _) = convert_legacy(case, Some(&t), &reg).unwrap();
            let (second, report) =
                convert_legacy(&serialize_lf(&first), Some(&t), &reg).unwrap();
            assert_eq!(first, second, "{case}");
            assert!(report.rewrites.is_empty(), "{case}");
            // Converted text is strictly parseable.
            assert_eq!(parse_lf(&serialize_lf(&first), &reg).unwrap(), first);
        }
    }

    #[test]
    fn ordinals_survive_conversion() {
        let (lf, _) = convert("eq { nth_max { all_rows ; attendance ; 2 } ; 61500 }");
        assert_eq!(
            serialize_lf(&lf),
            "eq { nth_max { all_rows ; attendance ; 2 } ; 61500 }"
        );
        let reg = GrammarRegistry::default_registry();
        let err = convert_legacy(
            "eq { nth_max { all_rows ; attendance ; two } ; 61500 }",
            Some(&table()),
            &reg,
        )
        .unwrap_err();
        assert!(matches!(err, LegacyError::BadIndex { .. }));
    }

    #[test]
    fn structural_errors_surface() {
        let reg = GrammarRegistry::default_registry();
        let t = table();
        assert!(matches!(
            convert_legacy("mystery { all_rows }", Some(&t), &reg),
            Err(LegacyError::Parse(ParseError::UnknownRule { .. }))
        ));
        assert!(matches!(
            convert_legacy("eq { count { all_rows } ; 1", Some(&t), &reg),
            Err(LegacyError::Parse(ParseError::UnbalancedBraces))
        ));
        assert!(matches!(
            convert_legacy("count { all_rows }", Some(&t), &reg),
            Err(LegacyError::RootNotStat { .. })
        ));
        assert!(matches!(
            convert_legacy("eq { hop { all_rows ; x ; y } ; 1 }", Some(&t), &reg),
            Err(LegacyError::Arity { .. })
        ));
    }
}
