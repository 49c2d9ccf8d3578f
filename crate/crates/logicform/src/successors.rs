//! Admissible-continuation queries over partial statement text.
//!
//! [`grammar_successors`] answers: given a left-to-right prefix of the
//! linearized form, which tokens may come next so that some completion is a
//! parseable statement? The machine mirrors the parser exactly, including
//! the lookahead rule for extracted-value positions where a bare rule word
//! may still turn out to be the first word of a value leaf. That ambiguity
//! is tracked by running all viable parser states side by side.

use crate::grammar::{GrammarRegistry, NodeKind};
use crate::parse::{lex, ParseError, Token};
use std::collections::BTreeSet;

/// One admissible next token, abstracted to the grammar level: leaf words
/// are reported by the kind of leaf they would start or continue.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NextSymbol {
    /// A specific rule word.
    Rule(String),
    /// Any word acceptable as (part of) a leaf of this kind. For ordinal
    /// leaves only a single all-digit word qualifies.
    Leaf(NodeKind),
    /// `{`
    Open,
    /// `;`
    Semi,
    /// `}`
    Close,
    /// The prefix is already a complete statement.
    End,
}

impl std::fmt::Display for NextSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NextSymbol::Rule(name) => write!(f, "{name}"),
            NextSymbol::Leaf(kind) => write!(f, "<{kind} leaf>"),
            NextSymbol::Open => write!(f, "{{"),
            NextSymbol::Semi => write!(f, ";"),
            NextSymbol::Close => write!(f, "}}"),
            NextSymbol::End => write!(f, "<end>"),
        }
    }
}

/// Why a prefix has no continuation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrefixError {
    #[error("prefix does not lex: {0}")]
    Lex(#[from] ParseError),
    #[error("invalid prefix: token {index} ({token}) admits no continuation")]
    InvalidPrefix { index: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Mode {
    /// A node of this kind must start here.
    Expect(NodeKind),
    /// A rule word with arguments was read; its `{` must follow.
    ExpectOpen(String),
    /// Inside a leaf of this kind; ends at the next delimiter.
    InLeaf(NodeKind),
    /// A node just finished; a delimiter (or end of input) follows.
    Done,
}

/// (rule name, number of completed children) for each open brace.
type Stack = Vec<(String, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct State {
    stack: Stack,
    mode: Mode,
}

fn is_digits(word: &str) -> bool {
    !word.is_empty() && word.chars().all(|c| c.is_ascii_digit())
}

struct Machine<'a> {
    reg: &'a GrammarRegistry,
}

impl<'a> Machine<'a> {
    fn start(&self) -> Vec<State> {
        vec![State {
            stack: Vec::new(),
            mode: Mode::Expect(NodeKind::Stat),
        }]
    }

    fn arity(&self, rule: &str) -> usize {
        self.reg.rule(rule).map(|r| r.arity()).unwrap_or(0)
    }

    fn arg_kind(&self, rule: &str, idx: usize) -> Option<NodeKind> {
        self.reg.rule(rule).and_then(|r| r.arg_kinds.get(idx)).copied()
    }

    /// A node under the current brace finished: credit it to the open frame.
    fn node_done(&self, stack: Stack) -> State {
        let mut stack = stack;
        if let Some(top) = stack.last_mut() {
            top.1 += 1;
        }
        State {
            stack,
            mode: Mode::Done,
        }
    }

    /// Transitions out of a state where a node has just been completed
    /// (including a leaf about to be ended by this delimiter).
    fn step_delimiter(&self, state: &State, token: &Token, out: &mut Vec<State>) {
        let done = match state.mode {
            Mode::InLeaf(_) => self.node_done(state.stack.clone()),
            Mode::Done => state.clone(),
            _ => return,
        };
        let Some((rule, completed)) = done.stack.last().cloned() else {
            return; // complete statement: no token may follow
        };
        match token {
            Token::Semi if completed < self.arity(&rule) => {
                if let Some(kind) = self.arg_kind(&rule, completed) {
                    out.push(State {
                        stack: done.stack,
                        mode: Mode::Expect(kind),
                    });
                }
            }
            Token::Close if completed == self.arity(&rule) => {
                let mut stack = done.stack;
                stack.pop();
                out.push(self.node_done(stack));
            }
            _ => {}
        }
    }

    fn step(&self, state: &State, token: &Token) -> Vec<State> {
        let mut out = Vec::new();
        match &state.mode {
            Mode::Expect(kind) => match kind {
                NodeKind::C | NodeKind::V => {
                    if matches!(token, Token::Word { .. }) {
                        out.push(State {
                            stack: state.stack.clone(),
                            mode: Mode::InLeaf(*kind),
                        });
                    }
                }
                NodeKind::I => {
                    if let Token::Word { text, .. } = token {
                        if is_digits(text) && text.parse::<u32>().is_ok() {
                            out.push(State {
                                stack: state.stack.clone(),
                                mode: Mode::InLeaf(NodeKind::I),
                            });
                        }
                    }
                }
                NodeKind::Obj => {
                    if let Token::Word { text, escaped } = token {
                        let as_rule = (!escaped)
                            .then(|| self.reg.rule(text))
                            .flatten()
                            .filter(|r| NodeKind::Obj.accepts(r.result_kind));
                        match as_rule {
                            // The parser commits to a zero-arity rule outright.
                            Some(r) if r.arity() == 0 => {
                                out.push(self.node_done(state.stack.clone()));
                            }
                            // Otherwise the next token decides: rule if `{`
                            // follows, value leaf if not. Keep both alive.
                            Some(r) => {
                                out.push(State {
                                    stack: state.stack.clone(),
                                    mode: Mode::ExpectOpen(r.name.clone()),
                                });
                                out.push(State {
                                    stack: state.stack.clone(),
                                    mode: Mode::InLeaf(NodeKind::V),
                                });
                            }
                            None => out.push(State {
                                stack: state.stack.clone(),
                                mode: Mode::InLeaf(NodeKind::V),
                            }),
                        }
                    }
                }
                _ => {
                    // Statement, view and row positions take rule words only.
                    if let Token::Word { text, .. } = token {
                        if let Some(rule) = self.reg.rule(text) {
                            if kind.accepts(rule.result_kind) {
                                if rule.arity() == 0 {
                                    out.push(self.node_done(state.stack.clone()));
                                } else {
                                    out.push(State {
                                        stack: state.stack.clone(),
                                        mode: Mode::ExpectOpen(rule.name.clone()),
                                    });
                                }
                            }
                        }
                    }
                }
            },
            Mode::ExpectOpen(rule) => {
                if matches!(token, Token::Open) {
                    let kind = self.arg_kind(rule, 0).expect("rules here have args");
                    let mut stack = state.stack.clone();
                    stack.push((rule.clone(), 0));
                    out.push(State {
                        stack,
                        mode: Mode::Expect(kind),
                    });
                }
            }
            Mode::InLeaf(kind) => match token {
                // Column and value leaves may span several words.
                Token::Word { .. } if matches!(kind, NodeKind::C | NodeKind::V) => {
                    out.push(state.clone());
                }
                Token::Semi | Token::Close => self.step_delimiter(state, token, &mut out),
                _ => {}
            },
            Mode::Done => self.step_delimiter(state, token, &mut out),
        }
        out
    }

    fn options(&self, state: &State, out: &mut BTreeSet<NextSymbol>) {
        match &state.mode {
            Mode::Expect(kind) => match kind {
                NodeKind::C | NodeKind::V | NodeKind::I => {
                    out.insert(NextSymbol::Leaf(*kind));
                }
                NodeKind::Obj => {
                    out.insert(NextSymbol::Leaf(NodeKind::V));
                    for rule in self.reg.rules() {
                        if NodeKind::Obj.accepts(rule.result_kind) {
                            out.insert(NextSymbol::Rule(rule.name.clone()));
                        }
                    }
                }
                _ => {
                    for rule in self.reg.rules() {
                        if kind.accepts(rule.result_kind) {
                            out.insert(NextSymbol::Rule(rule.name.clone()));
                        }
                    }
                }
            },
            Mode::ExpectOpen(_) => {
                out.insert(NextSymbol::Open);
            }
            Mode::InLeaf(kind) => {
                if matches!(kind, NodeKind::C | NodeKind::V) {
                    out.insert(NextSymbol::Leaf(*kind));
                }
                self.delimiter_options(&self.node_done(state.stack.clone()), out);
            }
            Mode::Done => self.delimiter_options(state, out),
        }
    }

    fn delimiter_options(&self, done: &State, out: &mut BTreeSet<NextSymbol>) {
        match done.stack.last() {
            None => {
                out.insert(NextSymbol::End);
            }
            Some((rule, completed)) => {
                let arity = self.arity(rule);
                if *completed < arity {
                    out.insert(NextSymbol::Semi);
                }
                if *completed == arity {
                    out.insert(NextSymbol::Close);
                }
            }
        }
    }
}

/// Admissible next symbols after `partial`, a prefix of linearized text.
///
/// The empty prefix admits exactly the statement rules. A prefix that no
/// completion can rescue yields [`PrefixError::InvalidPrefix`] carrying the
/// offending token position.
pub fn grammar_successors(
    partial: &str,
    reg: &GrammarRegistry,
) -> Result<BTreeSet<NextSymbol>, PrefixError> {
    let tokens = lex(partial)?;
    let machine = Machine { reg };
    let mut states = machine.start();
    for (index, token) in tokens.iter().enumerate() {
        let mut next = Vec::new();
        for state in &states {
            for s in machine.step(state, token) {
                if !next.contains(&s) {
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            return Err(PrefixError::InvalidPrefix {
                index,
                token: token.describe(),
            });
        }
        states = next;
    }
    let mut out = BTreeSet::new();
    for state in &states {
        machine.options(state, &mut out);
    }
    Ok(out)
}
