//! Logical-form trees, node paths, sketches and structural validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{GrammarRegistry, NodeKind};
use crate::table::Table;

/// One node of a logical form. Rules are internal nodes; columns, values
/// and ordinal indices are leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LfNode {
    Rule { name: String, children: Vec<LfNode> },
    Column(String),
    Value(String),
    Index(u32),
}

impl LfNode {
    pub fn rule(name: &str, children: Vec<LfNode>) -> LfNode {
        LfNode::Rule {
            name: name.to_string(),
            children,
        }
    }

    /// Kind of this node; `None` if it names a rule the registry lacks.
    pub fn kind(&self, reg: &GrammarRegistry) -> Option<NodeKind> {
        match self {
            LfNode::Rule { name, .. } => reg.rule(name).map(|r| r.result_kind),
            LfNode::Column(_) => Some(NodeKind::C),
            LfNode::Value(_) => Some(NodeKind::V),
            LfNode::Index(_) => Some(NodeKind::I),
        }
    }

    pub fn children(&self) -> &[LfNode] {
        match self {
            LfNode::Rule { children, .. } => children,
            _ => &[],
        }
    }

    /// Leaves and argument-less rules have depth 0; a rule with arguments is
    /// one deeper than its deepest child.
    pub fn depth(&self) -> usize {
        match self {
            LfNode::Rule { children, .. } if !children.is_empty() => {
                1 + children.iter().map(LfNode::depth).max().unwrap()
            }
            _ => 0,
        }
    }

    pub fn node_at(&self, path: &NodePath) -> Option<&LfNode> {
        let mut cur = self;
        for &i in &path.0 {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Pre-order traversal paired with the path to each node.
    pub fn walk(&self) -> Vec<(NodePath, &LfNode)> {
        fn rec<'a>(n: &'a LfNode, path: &mut Vec<usize>, out: &mut Vec<(NodePath, &'a LfNode)>) {
            out.push((NodePath(path.clone()), n));
            for (i, c) in n.children().iter().enumerate() {
                path.push(i);
                rec(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        rec(self, &mut Vec::new(), &mut out);
        out
    }
}

/// A complete logical form; the root must be a boolean statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalForm {
    pub root: LfNode,
}

impl LogicalForm {
    pub fn new(root: LfNode) -> LogicalForm {
        LogicalForm { root }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn to_text(&self) -> String {
        crate::parse::serialize_node(&self.root)
    }
}

impl std::fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Path from the root (`/`) down through child indices (`/0/1`).
#[derive(
    Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> NodePath {
        NodePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }

    pub fn parent(&self) -> Option<NodePath> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl std::fmt::Display for NodePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as a node path")]
pub struct PathParseError(pub String);

impl std::str::FromStr for NodePath {
    type Err = PathParseError;

    fn from_str(s: &str) -> Result<NodePath, PathParseError> {
        if s == "/" {
            return Ok(NodePath::root());
        }
        let body = s
            .strip_prefix('/')
            .ok_or_else(|| PathParseError(s.to_string()))?;
        let mut out = Vec::new();
        for part in body.split('/') {
            out.push(
                part.parse::<usize>()
                    .map_err(|_| PathParseError(s.to_string()))?,
            );
        }
        Ok(NodePath(out))
    }
}

/// A logical form with its leaves replaced by typed placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SketchNode {
    Rule {
        name: String,
        children: Vec<SketchNode>,
    },
    Hole(NodeKind),
}

impl SketchNode {
    pub fn depth(&self) -> usize {
        match self {
            SketchNode::Rule { children, .. } if !children.is_empty() => {
                1 + children.iter().map(SketchNode::depth).max().unwrap()
            }
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sketch {
    pub root: SketchNode,
}

impl Sketch {
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Placeholder positions in pre-order, with the leaf kind each expects.
    pub fn holes(&self) -> Vec<(NodePath, NodeKind)> {
        fn rec(n: &SketchNode, path: &mut Vec<usize>, out: &mut Vec<(NodePath, NodeKind)>) {
            match n {
                SketchNode::Hole(k) => out.push((NodePath(path.clone()), *k)),
                SketchNode::Rule { children, .. } => {
                    for (i, c) in children.iter().enumerate() {
                        path.push(i);
                        rec(c, path, out);
                        path.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        rec(&self.root, &mut Vec::new(), &mut out);
        out
    }

    pub fn to_text(&self) -> String {
        fn rec(n: &SketchNode, out: &mut String) {
            match n {
                SketchNode::Hole(k) => {
                    out.push('[');
                    out.push_str(&k.to_string());
                    out.push(']');
                }
                SketchNode::Rule { name, children } => {
                    out.push_str(name);
                    if !children.is_empty() {
                        out.push_str(" { ");
                        for (i, c) in children.iter().enumerate() {
                            if i > 0 {
                                out.push_str(" ; ");
                            }
                            rec(c, out);
                        }
                        out.push_str(" }");
                    }
                }
            }
        }
        let mut out = String::new();
        rec(&self.root, &mut out);
        out
    }
}

impl std::fmt::Display for Sketch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Replace every leaf with its typed placeholder.
pub fn extract_sketch(lf: &LogicalForm) -> Sketch {
    fn rec(n: &LfNode) -> SketchNode {
        match n {
            LfNode::Rule { name, children } => SketchNode::Rule {
                name: name.clone(),
                children: children.iter().map(rec).collect(),
            },
            LfNode::Column(_) => SketchNode::Hole(NodeKind::C),
            LfNode::Value(_) => SketchNode::Hole(NodeKind::V),
            LfNode::Index(_) => SketchNode::Hole(NodeKind::I),
        }
    }
    Sketch {
        root: rec(&lf.root),
    }
}

/// A structural problem found by `validate`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("{path}: unknown rule `{name}`")]
    UnknownRule { path: NodePath, name: String },
    #[error("{path}: rule `{rule}` takes {expected} arguments, found {got}")]
    ArityMismatch {
        path: NodePath,
        rule: String,
        expected: usize,
        got: usize,
    },
    #[error("{path}: expected a {expected} argument, found {got}")]
    KindMismatch {
        path: NodePath,
        expected: NodeKind,
        got: NodeKind,
    },
    #[error("root must be a statement, found {got}")]
    RootNotStat { got: NodeKind },
    #[error("{path}: unknown column `{name}`")]
    UnknownColumn { path: NodePath, name: String },
    #[error("{path}: ordinal {value} outside 1..={bound}")]
    IndexOutOfRange {
        path: NodePath,
        value: u32,
        bound: u32,
    },
}

impl Violation {
    pub fn path(&self) -> NodePath {
        match self {
            Violation::UnknownRule { path, .. }
            | Violation::ArityMismatch { path, .. }
            | Violation::KindMismatch { path, .. }
            | Violation::UnknownColumn { path, .. }
            | Violation::IndexOutOfRange { path, .. } => path.clone(),
            Violation::RootNotStat { .. } => NodePath::root(),
        }
    }
}

/// Check a form against the grammar, and against a table's columns when one
/// is given. Returns every violation found; an empty vector means valid.
pub fn validate(lf: &LogicalForm, reg: &GrammarRegistry, table: Option<&Table>) -> Vec<Violation> {
    let mut out = Vec::new();
    match lf.root.kind(reg) {
        Some(NodeKind::Stat) | None => {}
        Some(got) => out.push(Violation::RootNotStat { got }),
    }
    for (path, node) in lf.root.walk() {
        match node {
            LfNode::Rule { name, children } => {
                let Some(rule) = reg.rule(name) else {
                    out.push(Violation::UnknownRule {
                        path,
                        name: name.clone(),
                    });
                    continue;
                };
                if children.len() != rule.arity() {
                    out.push(Violation::ArityMismatch {
                        path: path.clone(),
                        rule: name.clone(),
                        expected: rule.arity(),
                        got: children.len(),
                    });
                }
                for (i, (child, &declared)) in
                    children.iter().zip(rule.arg_kinds.iter()).enumerate()
                {
                    if let Some(got) = child.kind(reg) {
                        if !declared.accepts(got) {
                            out.push(Violation::KindMismatch {
                                path: path.child(i),
                                expected: declared,
                                got,
                            });
                        }
                    }
                    // Unknown child rules are reported at their own path.
                }
            }
            LfNode::Column(name) => {
                if let Some(t) = table {
                    if t.col_index(name).is_err() {
                        out.push(Violation::UnknownColumn {
                            path,
                            name: name.clone(),
                        });
                    }
                }
            }
            LfNode::Index(value) => {
                let bound = reg.index_bound();
                if *value == 0 || *value > bound {
                    out.push(Violation::IndexOutOfRange {
                        path,
                        value: *value,
                        bound,
                    });
                }
            }
            LfNode::Value(_) => {}
        }
    }
    out
}
