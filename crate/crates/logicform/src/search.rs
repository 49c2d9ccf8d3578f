//! Enumerative candidate generation for a table.
//!
//! Generation runs in two phases. First, rule skeletons (sketches) are
//! streamed in a fixed order: shallower trees first, lexicographic within a
//! depth class. Second, each sketch's placeholders are filled from finite
//! domains — columns from the table, values from the supplied content
//! selection plus literals derived from referenced columns, ordinals from a
//! bounded range. Filled statements are scored heuristically, optionally
//! screened so that only statements executing to true survive (false
//! candidate rejection), and ranked under a fixed-size beam. The whole
//! pipeline is deterministic: same inputs, same output list.

use crate::ast::{LfNode, LogicalForm, NodePath, Sketch, SketchNode};
use crate::cs::{CsCategory, CsValue};
use crate::exec::{fcr_accept, ExecConfig};
use crate::grammar::{GrammarRegistry, NodeKind};
use crate::table::Table;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

/// Weights of the candidate score:
/// `cs_use · (values used / values given) − depth · tree depth − free_literal · free value fills`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScoreWeights {
    /// Reward for consuming supplied content-selection values.
    pub cs_use: f64,
    /// Penalty per level of tree depth.
    pub depth: f64,
    /// Penalty per value leaf filled from table-derived literals instead of
    /// a supplied value.
    pub free_literal: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            cs_use: 10.0,
            depth: 1.0,
            free_literal: 2.0,
        }
    }
}

/// Generation bounds and policies.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchConfig {
    /// Beam width: the pool keeps this many best candidates, and each sketch
    /// contributes at most this many fill attempts.
    pub beam_size: usize,
    /// Global budget multiplier: the run spends at most
    /// `beam_size × max_steps` enumeration steps in total.
    pub max_steps: usize,
    /// Sketches deeper than this are never enumerated.
    pub max_sketch_depth: usize,
    /// Drop candidates that do not execute to true.
    pub use_fcr: bool,
    /// Fill value leaves injectively from the supplied values only, and emit
    /// only candidates covering every table-grounded value.
    pub require_cs_values: bool,
    /// Score weights.
    pub weights: ScoreWeights,
    /// Execution settings used for the truth screen.
    pub exec: ExecConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beam_size: 2048,
            max_steps: 50,
            max_sketch_depth: 5,
            use_fcr: true,
            require_cs_values: false,
            weights: ScoreWeights::default(),
            exec: ExecConfig::default(),
        }
    }
}

/// One generated statement with its ranking metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub lf: LogicalForm,
    pub score: f64,
    pub executes_true: bool,
    /// Supplied value texts this candidate consumed.
    pub uses_cs: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("no candidate survived within the search budget")]
    NoCandidate,
}

// ---------------------------------------------------------------------------
// Sketch enumeration

/// A memoized pool entry: a complete skeleton of some kind with its depth.
type Entry = (SketchNode, usize);

fn entry_text(node: &SketchNode) -> String {
    Sketch { root: node.clone() }.to_text()
}

/// All skeletons of `kind` with depth ≤ `cap`, sorted by linearized text.
fn pool(
    reg: &GrammarRegistry,
    memo: &mut HashMap<(NodeKind, usize), Rc<Vec<Entry>>>,
    kind: NodeKind,
    cap: usize,
) -> Rc<Vec<Entry>> {
    if let Some(hit) = memo.get(&(kind, cap)) {
        return hit.clone();
    }
    let mut out: Vec<Entry> = Vec::new();
    match kind {
        NodeKind::C | NodeKind::V | NodeKind::I => out.push((SketchNode::Hole(kind), 0)),
        NodeKind::Obj => out.push((SketchNode::Hole(NodeKind::V), 0)),
        _ => {}
    }
    for rule in reg.rules() {
        if !kind.accepts(rule.result_kind) {
            continue;
        }
        if rule.arity() == 0 {
            out.push((
                SketchNode::Rule {
                    name: rule.name.clone(),
                    children: Vec::new(),
                },
                0,
            ));
            continue;
        }
        if cap == 0 {
            continue;
        }
        let domains: Vec<Rc<Vec<Entry>>> = rule
            .arg_kinds
            .iter()
            .map(|k| pool(reg, memo, *k, cap - 1))
            .collect();
        if domains.iter().any(|d| d.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; domains.len()];
        loop {
            let children: Vec<SketchNode> = idx
                .iter()
                .zip(&domains)
                .map(|(i, d)| d[*i].0.clone())
                .collect();
            let depth = 1 + idx
                .iter()
                .zip(&domains)
                .map(|(i, d)| d[*i].1)
                .max()
                .unwrap();
            out.push((
                SketchNode::Rule {
                    name: rule.name.clone(),
                    children,
                },
                depth,
            ));
            // Odometer advance, rightmost position fastest.
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < domains[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|i| *i == 0) {
                break;
            }
        }
    }
    out.sort_by_cached_key(|(node, _)| entry_text(node));
    let rc = Rc::new(out);
    memo.insert((kind, cap), rc.clone());
    rc
}

/// Lazy cursor over the statement skeletons of one exact depth.
struct ClassIter {
    /// Rules sorted by name, each with its child pools (cap = depth − 1).
    rules: Vec<(String, Vec<Rc<Vec<Entry>>>)>,
    rule_idx: usize,
    idx: Vec<usize>,
    fresh: bool,
    /// Exact depth required of the deepest child (`None` for depth 0).
    need: Option<usize>,
}

impl ClassIter {
    fn new(reg: &GrammarRegistry, memo: &mut HashMap<(NodeKind, usize), Rc<Vec<Entry>>>, depth: usize) -> ClassIter {
        let mut rules = Vec::new();
        let mut names: Vec<&crate::grammar::GrammarRule> =
            reg.rules_of_kind(NodeKind::Stat).collect();
        names.sort_by(|a, b| a.name.cmp(&b.name));
        for rule in names {
            if depth == 0 {
                if rule.arity() == 0 {
                    rules.push((rule.name.clone(), Vec::new()));
                }
            } else if rule.arity() > 0 {
                let domains: Vec<Rc<Vec<Entry>>> = rule
                    .arg_kinds
                    .iter()
                    .map(|k| pool(reg, memo, *k, depth - 1))
                    .collect();
                if domains.iter().all(|d| !d.is_empty()) {
                    rules.push((rule.name.clone(), domains));
                }
            }
        }
        ClassIter {
            rules,
            rule_idx: 0,
            idx: Vec::new(),
            fresh: true,
            need: depth.checked_sub(1),
        }
    }

    fn next(&mut self) -> Option<SketchNode> {
        loop {
            let (name, domains) = self.rules.get(self.rule_idx)?;
            if self.fresh {
                self.idx = vec![0; domains.len()];
                self.fresh = false;
            } else if domains.is_empty() {
                // A zero-arity rule yields exactly one skeleton.
                self.rule_idx += 1;
                self.fresh = true;
                continue;
            } else {
                let mut pos = self.idx.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    self.idx[pos] += 1;
                    if self.idx[pos] < domains[pos].len() {
                        break;
                    }
                    self.idx[pos] = 0;
                }
                if self.idx.iter().all(|i| *i == 0) {
                    self.rule_idx += 1;
                    self.fresh = true;
                    continue;
                }
            }
            let deepest = self
                .idx
                .iter()
                .zip(domains)
                .map(|(i, d)| d[*i].1)
                .max();
            let wanted = match (self.need, deepest) {
                (None, None) => true,
                (Some(need), Some(got)) => got == need,
                _ => false,
            };
            if !wanted {
                continue;
            }
            let children: Vec<SketchNode> = self
                .idx
                .iter()
                .zip(domains)
                .map(|(i, d)| d[*i].0.clone())
                .collect();
            return Some(SketchNode::Rule {
                name: name.clone(),
                children,
            });
        }
    }
}

/// Stream of statement skeletons: depth 0, 1, 2, … up to the configured
/// bound, lexicographic by linearized text within each depth.
pub struct SketchStream<'a> {
    reg: &'a GrammarRegistry,
    max_depth: usize,
    depth: usize,
    memo: HashMap<(NodeKind, usize), Rc<Vec<Entry>>>,
    class: Option<ClassIter>,
}

impl<'a> Iterator for SketchStream<'a> {
    type Item = Sketch;

    fn next(&mut self) -> Option<Sketch> {
        loop {
            if self.class.is_none() {
                if self.depth > self.max_depth {
                    return None;
                }
                self.class = Some(ClassIter::new(self.reg, &mut self.memo, self.depth));
            }
            match self.class.as_mut().unwrap().next() {
                Some(root) => return Some(Sketch { root }),
                None => {
                    self.class = None;
                    self.depth += 1;
                }
            }
        }
    }
}

/// Enumerate every statement skeleton up to `cfg.max_sketch_depth`.
pub fn enumerate_sketches<'a>(reg: &'a GrammarRegistry, cfg: &SearchConfig) -> SketchStream<'a> {
    SketchStream {
        reg,
        max_depth: cfg.max_sketch_depth,
        depth: 0,
        memo: HashMap::new(),
        class: None,
    }
}

// ---------------------------------------------------------------------------
// Sketch filling

/// Lazy cursor over all leaf assignments of one sketch.
pub struct FillStream<'a> {
    table: &'a Table,
    reg: &'a GrammarRegistry,
    cfg: &'a SearchConfig,
    template: LfNode,
    holes: Vec<(NodePath, NodeKind)>,
    /// Domains are recomputed left-to-right because value domains depend on
    /// the column chosen for a sibling placeholder.
    domains: Vec<Vec<LfNode>>,
    idx: Vec<usize>,
    cs_texts: Vec<String>,
    tab_texts: BTreeSet<String>,
    started: bool,
    done: bool,
}

fn skeleton_to_template(node: &SketchNode) -> LfNode {
    match node {
        SketchNode::Rule { name, children } => LfNode::Rule {
            name: name.clone(),
            children: children.iter().map(skeleton_to_template).collect(),
        },
        SketchNode::Hole(NodeKind::C) => LfNode::Column(String::new()),
        SketchNode::Hole(NodeKind::I) => LfNode::Index(0),
        SketchNode::Hole(_) => LfNode::Value(String::new()),
    }
}

fn set_leaf(node: &mut LfNode, path: &NodePath, leaf: LfNode) {
    let mut cur = node;
    for step in &path.0 {
        match cur {
            LfNode::Rule { children, .. } => cur = &mut children[*step],
            _ => unreachable!("path leads through rule nodes"),
        }
    }
    *cur = leaf;
}

fn first_token(cell: &str) -> Option<&str> {
    cell.split_whitespace().next()
}

impl<'a> FillStream<'a> {
    fn new(
        sketch: &Sketch,
        table: &'a Table,
        cs: &'a [CsValue],
        reg: &'a GrammarRegistry,
        cfg: &'a SearchConfig,
    ) -> FillStream<'a> {
        let mut cs_texts: Vec<String> = Vec::new();
        for v in cs {
            if !cs_texts.contains(&v.text) {
                cs_texts.push(v.text.clone());
            }
        }
        let tab_texts = cs
            .iter()
            .filter(|v| v.category == CsCategory::Tab)
            .map(|v| v.text.clone())
            .collect();
        let holes = sketch.holes();
        let n = holes.len();
        FillStream {
            table,
            reg,
            cfg,
            template: skeleton_to_template(&sketch.root),
            holes,
            domains: vec![Vec::new(); n],
            idx: vec![0; n],
            cs_texts,
            tab_texts,
            started: false,
            done: false,
        }
    }

    /// The column already assigned to a placeholder under the same parent.
    fn sibling_column(&self, hole: usize) -> Option<String> {
        let parent = self.holes[hole].0.parent()?;
        for j in 0..hole {
            if self.holes[j].1 == NodeKind::C && self.holes[j].0.parent().as_ref() == Some(&parent)
            {
                if let LfNode::Column(name) = &self.domains[j][self.idx[j]] {
                    return Some(name.clone());
                }
            }
        }
        None
    }

    fn domain(&self, hole: usize) -> Vec<LfNode> {
        match self.holes[hole].1 {
            NodeKind::C => self
                .table
                .columns
                .iter()
                .map(|c| LfNode::Column(c.clone()))
                .collect(),
            NodeKind::I => {
                let hi = (self.table.n_rows() as u32).min(self.reg.index_bound());
                (1..=hi).map(LfNode::Index).collect()
            }
            _ => {
                if self.cfg.require_cs_values {
                    // Injective use of the supplied values.
                    let used: BTreeSet<&str> = (0..hole)
                        .filter(|j| {
                            matches!(self.holes[*j].1, NodeKind::V | NodeKind::Obj)
                        })
                        .filter_map(|j| match &self.domains[j][self.idx[j]] {
                            LfNode::Value(t) => Some(t.as_str()),
                            _ => None,
                        })
                        .collect();
                    return self
                        .cs_texts
                        .iter()
                        .filter(|t| !used.contains(t.as_str()))
                        .map(|t| LfNode::Value(t.clone()))
                        .collect();
                }
                let mut texts = self.cs_texts.clone();
                if let Some(col) = self.sibling_column(hole) {
                    if let Ok(ci) = self.table.col_index(&col) {
                        let cells: Vec<&str> = self.table.column_values(ci).collect();
                        for cell in &cells {
                            if !texts.iter().any(|t| t == cell) {
                                texts.push((*cell).to_string());
                            }
                        }
                        for cell in &cells {
                            if let Some(tok) = first_token(cell) {
                                if !texts.iter().any(|t| t == tok) {
                                    texts.push(tok.to_string());
                                }
                            }
                        }
                    }
                }
                texts.into_iter().map(LfNode::Value).collect()
            }
        }
    }

    /// Fill `domains[from..]`; false if some domain comes up empty.
    fn refill(&mut self, from: usize) -> bool {
        for i in from..self.holes.len() {
            self.domains[i] = self.domain(i);
            self.idx[i] = 0;
            if self.domains[i].is_empty() {
                return false;
            }
        }
        true
    }

    /// Move to the next assignment; false when exhausted.
    fn advance(&mut self) -> bool {
        let mut pos = self.holes.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            self.idx[pos] += 1;
            if self.idx[pos] < self.domains[pos].len() {
                if self.refill(pos + 1) {
                    return true;
                }
                // An empty downstream domain: keep advancing at `pos`.
                pos += 1;
            } else {
                self.idx[pos] = 0;
            }
        }
    }

    fn build(&self) -> Candidate {
        let mut lf = self.template.clone();
        let mut uses = BTreeSet::new();
        let mut free = 0usize;
        for (i, (path, kind)) in self.holes.iter().enumerate() {
            let leaf = self.domains[i][self.idx[i]].clone();
            if matches!(kind, NodeKind::V | NodeKind::Obj) {
                if let LfNode::Value(t) = &leaf {
                    if self.cs_texts.iter().any(|c| c == t) {
                        uses.insert(t.clone());
                    } else {
                        free += 1;
                    }
                }
            }
            set_leaf(&mut lf, path, leaf);
        }
        let lf = LogicalForm { root: lf };
        let w = &self.cfg.weights;
        let usage = if self.cs_texts.is_empty() {
            0.0
        } else {
            uses.len() as f64 / self.cs_texts.len() as f64
        };
        let score = w.cs_use * usage - w.depth * lf.depth() as f64 - w.free_literal * free as f64;
        let executes_true = fcr_accept(&lf, self.table, self.reg, &self.cfg.exec);
        Candidate {
            lf,
            score,
            executes_true,
            uses_cs: uses,
        }
    }

    fn covers_tab(&self, cand: &Candidate) -> bool {
        self.tab_texts.iter().all(|t| cand.uses_cs.contains(t))
    }
}

impl<'a> Iterator for FillStream<'a> {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        loop {
            if self.done {
                return None;
            }
            if !self.started {
                self.started = true;
                if !self.refill(0) {
                    self.done = true;
                    return None;
                }
            } else if !self.advance() {
                self.done = true;
                return None;
            }
            let cand = self.build();
            if self.cfg.require_cs_values && !self.covers_tab(&cand) {
                continue;
            }
            return Some(cand);
        }
    }
}

/// Enumerate every leaf assignment of `sketch` against `table`.
pub fn fill_sketch<'a>(
    sketch: &Sketch,
    table: &'a Table,
    cs: &'a [CsValue],
    reg: &'a GrammarRegistry,
    cfg: &'a SearchConfig,
) -> FillStream<'a> {
    FillStream::new(sketch, table, cs, reg, cfg)
}

// ---------------------------------------------------------------------------
// Beam search

fn rank(pool: &mut Vec<Candidate>) {
    let mut keyed: Vec<(String, Candidate)> = pool
        .drain(..)
        .map(|c| (c.lf.to_text(), c))
        .collect();
    keyed.sort_by(|(ta, a), (tb, b)| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| ta.cmp(tb))
    });
    pool.extend(keyed.into_iter().map(|(_, c)| c));
}

/// Generate ranked candidates for a table.
///
/// Interleaves sketch enumeration and filling under a global budget of
/// `beam_size × max_steps` steps, keeps the `beam_size` best candidates by
/// score (ties broken by linearized text), and — when `use_fcr` is set —
/// admits only candidates that execute to true.
pub fn generate(
    table: &Table,
    cs: &[CsValue],
    reg: &GrammarRegistry,
    cfg: &SearchConfig,
) -> Result<Vec<Candidate>, SearchError> {
    let mut budget = cfg.beam_size.saturating_mul(cfg.max_steps).max(1);
    let mut pool: Vec<Candidate> = Vec::new();
    'sketches: for sketch in enumerate_sketches(reg, cfg) {
        if budget == 0 {
            break;
        }
        budget -= 1; // pulling the sketch costs one step
        for cand in fill_sketch(&sketch, table, cs, reg, cfg).take(cfg.beam_size) {
            if budget == 0 {
                break;
            }
            budget -= 1; // a rejected fill still consumes budget
            if cfg.use_fcr && !cand.executes_true {
                continue;
            }
            pool.push(cand);
            if pool.len() >= cfg.beam_size.saturating_mul(4).max(64) {
                rank(&mut pool);
                pool.truncate(cfg.beam_size);
            }
        }
        if budget == 0 {
            break 'sketches;
        }
    }
    rank(&mut pool);
    pool.truncate(cfg.beam_size);
    if pool.is_empty() {
        return Err(SearchError::NoCandidate);
    }
    Ok(pool)
}
