//! Text format for logical forms.
//!
//! `name { a ; b }` nests rules; zero-argument rules stand bare. Leaves run
//! until the next `;` or `}`, so multi-word cell values need no quoting.
//! Backslash escapes put `{`, `}`, `;` or `\` inside a leaf, and a leading
//! backslash marks a leaf first word that would otherwise read as a rule
//! name. The serializer emits a canonical single-spaced form; the parser is
//! whitespace-tolerant.

use thiserror::Error;

use crate::ast::{LfNode, LogicalForm};
use crate::grammar::{GrammarRegistry, NodeKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown rule `{name}`")]
    UnknownRule { name: String },
    #[error("rule `{rule}` takes {expected} arguments, found {got}")]
    ArityMismatch {
        rule: String,
        expected: usize,
        got: usize,
    },
    #[error("expected a {expected} argument, found rule `{found}`")]
    KindMismatch { expected: NodeKind, found: String },
    #[error("root must be a statement rule, found `{rule}`")]
    RootNotStat { rule: String },
    #[error("unbalanced braces")]
    UnbalancedBraces,
    #[error("empty input")]
    Empty,
    #[error("empty {expected} leaf")]
    EmptyLeaf { expected: NodeKind },
    #[error("`{token}` is not an ordinal index")]
    BadIndex { token: String },
    #[error("unexpected `{found}`")]
    UnexpectedToken { found: String },
    #[error("input continues after the form: `{at}`")]
    TrailingInput { at: String },
    #[error("dangling escape at end of input")]
    TrailingEscape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Open,
    Close,
    Semi,
    Word { text: String, escaped: bool },
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Open => "{".into(),
            Token::Close => "}".into(),
            Token::Semi => ";".into(),
            Token::Word { text, .. } => text.clone(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let cs: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '{' => {
                toks.push(Token::Open);
                i += 1;
            }
            '}' => {
                toks.push(Token::Close);
                i += 1;
            }
            ';' => {
                toks.push(Token::Semi);
                i += 1;
            }
            _ => {
                let mut word = String::new();
                let mut escaped = false;
                while i < cs.len() {
                    let c = cs[i];
                    if c == '\\' {
                        if i + 1 >= cs.len() {
                            return Err(ParseError::TrailingEscape);
                        }
                        if word.is_empty() {
                            escaped = true;
                        }
                        word.push(cs[i + 1]);
                        i += 2;
                    } else if c.is_whitespace() || matches!(c, '{' | '}' | ';') {
                        break;
                    } else {
                        word.push(c);
                        i += 1;
                    }
                }
                toks.push(Token::Word {
                    text: word,
                    escaped,
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    reg: &'a GrammarRegistry,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Parse a node at a position whose declared kind is known. Leaf kinds
    /// read words; an extracted-value position admits either a rule of
    /// value-producing kind or a bare value leaf.
    fn parse_node(&mut self, declared: NodeKind) -> Result<LfNode, ParseError> {
        match declared {
            NodeKind::C | NodeKind::V | NodeKind::I => self.parse_leaf(declared),
            NodeKind::Obj => {
                if let Some(Token::Word {
                    text,
                    escaped: false,
                }) = self.peek()
                {
                    if let Some(rule) = self.reg.rule(text) {
                        let next_is_open =
                            matches!(self.toks.get(self.pos + 1), Some(Token::Open));
                        if NodeKind::Obj.accepts(rule.result_kind)
                            && (rule.arity() == 0 || next_is_open)
                        {
                            return self.parse_rule(NodeKind::Obj, false);
                        }
                    }
                }
                self.parse_leaf(NodeKind::V)
            }
            _ => self.parse_rule(declared, false),
        }
    }

    fn parse_rule(&mut self, declared: NodeKind, is_root: bool) -> Result<LfNode, ParseError> {
        let name = match self.next() {
            Some(Token::Word { text, .. }) => text,
            Some(t) => {
                return Err(ParseError::UnexpectedToken {
                    found: t.describe(),
                })
            }
            None => return Err(ParseError::UnbalancedBraces),
        };
        let rule = self
            .reg
            .rule(&name)
            .ok_or_else(|| ParseError::UnknownRule { name: name.clone() })?
            .clone();
        if is_root {
            if rule.result_kind != NodeKind::Stat {
                return Err(ParseError::RootNotStat { rule: name });
            }
        } else if !declared.accepts(rule.result_kind) {
            return Err(ParseError::KindMismatch {
                expected: declared,
                found: name,
            });
        }
        if rule.arity() == 0 {
            return Ok(LfNode::rule(&name, Vec::new()));
        }
        match self.next() {
            Some(Token::Open) => {}
            _ => {
                return Err(ParseError::ArityMismatch {
                    rule: name,
                    expected: rule.arity(),
                    got: 0,
                })
            }
        }
        let mut children = Vec::new();
        let first_kind = rule.arg_kinds[0];
        children.push(self.parse_node(first_kind)?);
        loop {
            match self.next() {
                Some(Token::Semi) => {
                    // Extra children beyond the declared arity still parse
                    // (typed like the last argument) so the count error is
                    // precise.
                    let k = rule
                        .arg_kinds
                        .get(children.len())
                        .copied()
                        .unwrap_or(*rule.arg_kinds.last().unwrap());
                    children.push(self.parse_node(k)?);
                }
                Some(Token::Close) => break,
                Some(t) => {
                    return Err(ParseError::UnexpectedToken {
                        found: t.describe(),
                    })
                }
                None => return Err(ParseError::UnbalancedBraces),
            }
        }
        if children.len() != rule.arity() {
            return Err(ParseError::ArityMismatch {
                rule: name,
                expected: rule.arity(),
                got: children.len(),
            });
        }
        Ok(LfNode::rule(&name, children))
    }

    fn parse_leaf(&mut self, kind: NodeKind) -> Result<LfNode, ParseError> {
        let mut words: Vec<String> = Vec::new();
        loop {
            match self.peek() {
                Some(Token::Word { text, .. }) => {
                    words.push(text.clone());
                    self.pos += 1;
                }
                Some(Token::Semi) | Some(Token::Close) | None => break,
                Some(t) => {
                    return Err(ParseError::UnexpectedToken {
                        found: t.describe(),
                    })
                }
            }
        }
        if words.is_empty() {
            return Err(ParseError::EmptyLeaf { expected: kind });
        }
        let text = words.join(" ");
        match kind {
            NodeKind::C => Ok(LfNode::Column(text)),
            NodeKind::V => Ok(LfNode::Value(text)),
            NodeKind::I => {
                if words.len() == 1 && text.chars().all(|c| c.is_ascii_digit()) {
                    text.parse::<u32>()
                        .map(LfNode::Index)
                        .map_err(|_| ParseError::BadIndex { token: text })
                } else {
                    Err(ParseError::BadIndex { token: text })
                }
            }
            _ => unreachable!("parse_leaf called for rule kind"),
        }
    }
}

/// Parse a complete logical form; the root must be a statement rule.
pub fn parse_lf(text: &str, reg: &GrammarRegistry) -> Result<LogicalForm, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks, pos: 0, reg };
    let root = p.parse_rule(NodeKind::Stat, true)?;
    if let Some(t) = p.peek() {
        return Err(ParseError::TrailingInput { at: t.describe() });
    }
    Ok(LogicalForm::new(root))
}

fn escape_leaf(reg: &GrammarRegistry, text: &str) -> String {
    let mut out = String::new();
    for (i, word) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if i == 0 && reg.contains(word) {
            out.push('\\');
        }
        for c in word.chars() {
            if matches!(c, '\\' | '{' | '}' | ';') {
                out.push('\\');
            }
            out.push(c);
        }
    }
    out
}

/// Canonical single-spaced rendering, escaping against the given registry.
pub fn serialize_node_with(reg: &GrammarRegistry, node: &LfNode) -> String {
    fn rec(reg: &GrammarRegistry, n: &LfNode, out: &mut String) {
        match n {
            LfNode::Rule { name, children } => {
                out.push_str(name);
                if !children.is_empty() {
                    out.push_str(" { ");
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" ; ");
                        }
                        rec(reg, c, out);
                    }
                    out.push_str(" }");
                }
            }
            LfNode::Column(s) | LfNode::Value(s) => out.push_str(&escape_leaf(reg, s)),
            LfNode::Index(i) => out.push_str(&i.to_string()),
        }
    }
    let mut out = String::new();
    rec(reg, node, &mut out);
    out
}

/// Canonical rendering against the built-in grammar.
pub fn serialize_node(node: &LfNode) -> String {
    serialize_node_with(&GrammarRegistry::default_registry(), node)
}

pub fn serialize_lf(lf: &LogicalForm) -> String {
    serialize_node(&lf.root)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG_TEXT: &str =
        "eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52500 }";

    fn reg() -> std::sync::Arc<GrammarRegistry> {
        GrammarRegistry::default_registry()
    }

    #[test]
    fn example_round_trip() {
        let lf = parse_lf(FIG_TEXT, &reg()).unwrap();
        assert_eq!(serialize_lf(&lf), FIG_TEXT);
        let eq_children = lf.root.children();
        assert!(matches!(&eq_children[1], LfNode::Value(v) if v == "52500"));
    }

    #[test]
    fn whitespace_tolerant() {
        let messy = "eq {\n  avg {\n    filter_str_eq { all_rows;result ;  w }\n    ; attendance }\n  ; 52500 }";
        let lf = parse_lf(messy, &reg()).unwrap();
        assert_eq!(serialize_lf(&lf), FIG_TEXT);
    }

    #[test]
    fn multi_word_leaves() {
        let text = "most_str_eq { all_rows ; opponent ; new york giants }";
        let lf = parse_lf(text, &reg()).unwrap();
        let kids = lf.root.children();
        assert!(matches!(&kids[2], LfNode::Value(v) if v == "new york giants"));
        assert_eq!(serialize_lf(&lf), text);
    }

    #[test]
    fn escaped_specials_round_trip() {
        let lf = LogicalForm::new(LfNode::rule(
            "str_eq",
            vec![
                LfNode::rule(
                    "str_hop",
                    vec![
                        LfNode::rule(
                            "argmax",
                            vec![LfNode::rule("all_rows", vec![]), LfNode::Column("a".into())],
                        ),
                        LfNode::Column("b".into()),
                    ],
                ),
                LfNode::Value("a {tricky}; value".into()),
            ],
        ));
        let text = serialize_lf(&lf);
        assert!(text.contains("\\{tricky\\}\\;"));
        assert_eq!(parse_lf(&text, &reg()).unwrap(), lf);
    }

    #[test]
    fn rule_name_as_leaf_value() {
        let lf = LogicalForm::new(LfNode::rule(
            "eq",
            vec![
                LfNode::rule(
                    "count",
                    vec![LfNode::rule("all_rows", vec![])],
                ),
                LfNode::Value("count".into()),
            ],
        ));
        let text = serialize_lf(&lf);
        assert_eq!(text, "eq { count { all_rows } ; \\count }");
        assert_eq!(parse_lf(&text, &reg()).unwrap(), lf);
    }

    #[test]
    fn bare_values_at_value_positions() {
        // A rule-shaped word with no following brace reads as a leaf.
        let lf = parse_lf("eq { 1 ; 2 }", &reg()).unwrap();
        assert!(matches!(&lf.root.children()[0], LfNode::Value(v) if v == "1"));
    }

    #[test]
    fn ordinal_leaves() {
        let lf = parse_lf(
            "eq { nth_max { all_rows ; pts ; 2 } ; 12 }",
            &reg(),
        )
        .unwrap();
        let nth = &lf.root.children()[0];
        assert!(matches!(nth.children()[2], LfNode::Index(2)));
        assert!(matches!(
            parse_lf("eq { nth_max { all_rows ; pts ; two } ; 12 }", &reg()),
            Err(ParseError::BadIndex { .. })
        ));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_lf("mystery { all_rows }", &reg()),
            Err(ParseError::UnknownRule { .. })
        ));
        assert!(matches!(
            parse_lf("all_rows", &reg()),
            Err(ParseError::RootNotStat { .. })
        ));
        assert!(matches!(
            parse_lf("eq { 1 }", &reg()),
            Err(ParseError::ArityMismatch {
                expected: 2,
                got: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_lf("eq { 1 ; 2 ; 3 }", &reg()),
            Err(ParseError::ArityMismatch {
                expected: 2,
                got: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_lf("eq { avg { all_rows ; a } ; 5", &reg()),
            Err(ParseError::UnbalancedBraces)
        ));
        assert!(matches!(
            parse_lf("only { count { all_rows } }", &reg()),
            Err(ParseError::KindMismatch {
                expected: NodeKind::View,
                ..
            })
        ));
        assert!(matches!(parse_lf("   ", &reg()), Err(ParseError::Empty)));
        assert!(matches!(
            parse_lf("eq { 1 ; 2 } extra", &reg()),
            Err(ParseError::TrailingInput { .. })
        ));
        assert!(matches!(
            parse_lf("eq { 1 ; }", &reg()),
            Err(ParseError::EmptyLeaf { .. })
        ));
        assert!(matches!(
            parse_lf("eq { 1 ; 2 \\", &reg()),
            Err(ParseError::TrailingEscape)
        ));
    }
}
