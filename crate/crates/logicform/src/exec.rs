//! Tree-walking evaluator for logical forms over a table.
//!
//! Scalar comparisons are typed: numeric rules read cells through the
//! two-stage number extraction (whole cell, then first digit run), date
//! cells compare in calendar order, and string rules compare normalized
//! text with substring matching. Filters and quantifiers drop rows whose
//! cells refuse coercion; scalar positions instead fail with a type error.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use thiserror::Error;

use crate::ast::{LfNode, LogicalForm, NodePath};
use crate::grammar::GrammarRegistry;
use crate::table::{coerce_cell, extract_number, format_number, normalize_text, Table, TypedValue};

/// What to do when an aggregate or quantifier meets an empty view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyViewPolicy {
    /// Fail the whole execution (the default).
    Error,
    /// Swallow the failure at the root and report the statement as false.
    FalseAtRoot,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExecConfig {
    /// Relative epsilon for numeric equality.
    pub eq_eps: f64,
    /// Relative tolerance for approximate equality (`round_eq`).
    pub round_tolerance: f64,
    pub empty_view: EmptyViewPolicy,
}

impl Default for ExecConfig {
    fn default() -> ExecConfig {
        ExecConfig {
            eq_eps: 1e-6,
            round_tolerance: 0.10,
            empty_view: EmptyViewPolicy::Error,
        }
    }
}

/// Runtime value of a node.
#[derive(Debug, Clone, PartialEq)]
pub enum ExecValue {
    Bool(bool),
    Num(f64),
    Date(NaiveDate),
    Str(String),
    Rows(Vec<usize>),
    RowIndex(usize),
}

impl std::fmt::Display for ExecValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExecValue::Bool(b) => write!(f, "{b}"),
            ExecValue::Num(v) => f.write_str(&format_number(*v)),
            ExecValue::Date(d) => write!(f, "{d}"),
            ExecValue::Str(s) => f.write_str(s),
            ExecValue::Rows(rows) => {
                write!(f, "rows[")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, "]")
            }
            ExecValue::RowIndex(r) => write!(f, "row {r}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExecError {
    #[error("{path}: `{rule}` applied to an empty view")]
    EmptyView { path: NodePath, rule: String },
    #[error("{path}: {msg}")]
    Type { path: NodePath, msg: String },
    #[error("{path}: unknown column `{name}`")]
    UnknownColumn { path: NodePath, name: String },
    #[error("{path}: ordinal {index} exceeds view of {size} rows")]
    BadOrdinal {
        path: NodePath,
        index: u32,
        size: usize,
    },
    #[error("{path}: {msg}")]
    Malformed { path: NodePath, msg: String },
}

/// A scalar produced by an extracted-value position.
#[derive(Debug, Clone, PartialEq)]
enum Scalar {
    Num(f64),
    Date(NaiveDate),
    Str(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarCtx {
    Numeric,
    String,
}

/// Per-row ordering material for order-based aggregates: uniform date
/// columns order by calendar, anything else must read as numbers.
enum ColumnOrder {
    Nums(Vec<f64>),
    Dates(Vec<NaiveDate>),
}

struct Evaluator<'a> {
    table: &'a Table,
    reg: &'a GrammarRegistry,
    cfg: &'a ExecConfig,
    trace: Option<BTreeMap<NodePath, String>>,
}

type EResult<T> = Result<T, ExecError>;

impl<'a> Evaluator<'a> {
    fn num_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.cfg.eq_eps * a.abs().max(b.abs()).max(1.0)
    }

    fn round_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.cfg.round_tolerance * a.abs().max(b.abs()).max(1.0)
    }

    fn malformed(&self, path: &NodePath, msg: impl Into<String>) -> ExecError {
        ExecError::Malformed {
            path: path.clone(),
            msg: msg.into(),
        }
    }

    fn type_err(&self, path: &NodePath, msg: impl Into<String>) -> ExecError {
        ExecError::Type {
            path: path.clone(),
            msg: msg.into(),
        }
    }

    /// Column index named by a C leaf.
    fn col(&self, node: &LfNode, path: &NodePath) -> EResult<usize> {
        match node {
            LfNode::Column(name) => {
                self.table
                    .col_index(name)
                    .map_err(|_| ExecError::UnknownColumn {
                        path: path.clone(),
                        name: name.clone(),
                    })
            }
            _ => Err(self.malformed(path, "expected a column leaf")),
        }
    }

    fn ordinal(&self, node: &LfNode, path: &NodePath, size: usize) -> EResult<usize> {
        let i = match node {
            LfNode::Index(i) => *i,
            _ => return Err(self.malformed(path, "expected an ordinal leaf")),
        };
        if i == 0 || i as usize > size {
            return Err(ExecError::BadOrdinal {
                path: path.clone(),
                index: i,
                size,
            });
        }
        Ok(i as usize)
    }

    fn record(&mut self, path: &NodePath, value: &ExecValue) {
        if let Some(t) = &mut self.trace {
            t.insert(path.clone(), value.to_string());
        }
    }

    fn eval_bool(&mut self, node: &LfNode, path: &NodePath) -> EResult<bool> {
        match self.eval(node, path)? {
            ExecValue::Bool(b) => Ok(b),
            other => Err(self.type_err(path, format!("expected a truth value, got {other}"))),
        }
    }

    fn eval_rows(&mut self, node: &LfNode, path: &NodePath) -> EResult<Vec<usize>> {
        match self.eval(node, path)? {
            ExecValue::Rows(r) => Ok(r),
            other => Err(self.type_err(path, format!("expected a view, got {other}"))),
        }
    }

    fn eval_row(&mut self, node: &LfNode, path: &NodePath) -> EResult<usize> {
        match self.eval(node, path)? {
            ExecValue::RowIndex(r) => Ok(r),
            other => Err(self.type_err(path, format!("expected a row, got {other}"))),
        }
    }

    /// Evaluate an extracted-value position under a numeric or string rule.
    fn eval_scalar(&mut self, node: &LfNode, path: &NodePath, ctx: ScalarCtx) -> EResult<Scalar> {
        match node {
            LfNode::Value(text) => match ctx {
                ScalarCtx::String => Ok(Scalar::Str(normalize_text(text))),
                ScalarCtx::Numeric => match coerce_cell(text) {
                    TypedValue::Num(n) => Ok(Scalar::Num(n)),
                    TypedValue::Date(d) => Ok(Scalar::Date(d)),
                    TypedValue::Text(_) => extract_number(text).map(Scalar::Num).ok_or_else(|| {
                        self.type_err(path, format!("`{text}` has no numeric reading"))
                    }),
                },
            },
            _ => {
                let v = self.eval(node, path)?;
                match (ctx, v) {
                    (_, ExecValue::Num(n)) if ctx == ScalarCtx::Numeric => Ok(Scalar::Num(n)),
                    (_, ExecValue::Date(d)) if ctx == ScalarCtx::Numeric => Ok(Scalar::Date(d)),
                    (ScalarCtx::Numeric, ExecValue::Str(s)) => match coerce_cell(&s) {
                        TypedValue::Num(n) => Ok(Scalar::Num(n)),
                        TypedValue::Date(d) => Ok(Scalar::Date(d)),
                        TypedValue::Text(_) => {
                            extract_number(&s).map(Scalar::Num).ok_or_else(|| {
                                self.type_err(path, format!("`{s}` has no numeric reading"))
                            })
                        }
                    },
                    (ScalarCtx::String, ExecValue::Str(s)) => Ok(Scalar::Str(s)),
                    (ScalarCtx::String, ExecValue::Num(n)) => Ok(Scalar::Str(format_number(n))),
                    (ScalarCtx::String, ExecValue::Date(d)) => Ok(Scalar::Str(d.to_string())),
                    (_, other) => {
                        Err(self.type_err(path, format!("expected a value, got {other}")))
                    }
                }
            }
        }
    }

    /// Numeric/date comparison for scalar statement rules.
    fn compare(
        &self,
        path: &NodePath,
        a: &Scalar,
        b: &Scalar,
    ) -> EResult<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match (a, b) {
            (Scalar::Num(x), Scalar::Num(y)) => {
                if self.num_eq(*x, *y) {
                    Ok(Ordering::Equal)
                } else if x < y {
                    Ok(Ordering::Less)
                } else {
                    Ok(Ordering::Greater)
                }
            }
            (Scalar::Date(x), Scalar::Date(y)) => Ok(x.cmp(y)),
            _ => Err(self.type_err(
                path,
                format!("cannot compare {} with {}", scalar_kind(a), scalar_kind(b)),
            )),
        }
    }

    /// Typed reading of one cell for row predicates. `None` drops the row.
    fn cell_scalar(&self, row: usize, col: usize) -> Option<Scalar> {
        let cell = self.table.cell(row, col);
        match coerce_cell(cell) {
            TypedValue::Num(n) => Some(Scalar::Num(n)),
            TypedValue::Date(d) => Some(Scalar::Date(d)),
            TypedValue::Text(_) => extract_number(cell).map(Scalar::Num),
        }
    }

    /// Numeric row predicate shared by filters and quantifiers.
    fn num_predicate(&self, op: &str, cell: Option<Scalar>, v: &Scalar) -> bool {
        let Some(cell) = cell else { return false };
        let ord = match (&cell, v) {
            (Scalar::Num(x), Scalar::Num(y)) => {
                if self.num_eq(*x, *y) {
                    std::cmp::Ordering::Equal
                } else if x < y {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            }
            (Scalar::Date(x), Scalar::Date(y)) => x.cmp(y),
            _ => return false,
        };
        match op {
            "eq" => ord.is_eq(),
            "not_eq" => !ord.is_eq(),
            "less" => ord.is_lt(),
            "less_eq" => ord.is_le(),
            "greater" => ord.is_gt(),
            "greater_eq" => ord.is_ge(),
            _ => unreachable!("unknown numeric predicate {op}"),
        }
    }

    /// String row predicate: the leaf value must occur in the cell.
    fn str_predicate(&self, negated: bool, cell: &str, v: &str) -> bool {
        let hit = normalize_text(cell).contains(v);
        hit != negated
    }

    /// Ordering material for a column over the given rows.
    fn column_order(
        &self,
        rows: &[usize],
        col: usize,
        path: &NodePath,
    ) -> EResult<ColumnOrder> {
        let mut dates = Vec::with_capacity(rows.len());
        for &r in rows {
            match coerce_cell(self.table.cell(r, col)) {
                TypedValue::Date(d) => dates.push(d),
                _ => {
                    dates.clear();
                    break;
                }
            }
        }
        if !rows.is_empty() && dates.len() == rows.len() {
            return Ok(ColumnOrder::Dates(dates));
        }
        let mut nums = Vec::with_capacity(rows.len());
        for &r in rows {
            let cell = self.table.cell(r, col);
            match extract_number(cell) {
                Some(n) => nums.push(n),
                None => {
                    return Err(
                        self.type_err(path, format!("`{cell}` has no numeric reading"))
                    )
                }
            }
        }
        Ok(ColumnOrder::Nums(nums))
    }

    /// Strictly numeric column reading for sum/avg (dates are rejected).
    fn column_nums(&self, rows: &[usize], col: usize, path: &NodePath) -> EResult<Vec<f64>> {
        let mut out = Vec::with_capacity(rows.len());
        for &r in rows {
            let cell = self.table.cell(r, col);
            match coerce_cell(cell) {
                TypedValue::Num(n) => out.push(n),
                TypedValue::Date(_) => {
                    return Err(self.type_err(path, format!("`{cell}` is a date, not a number")))
                }
                TypedValue::Text(_) => match extract_number(cell) {
                    Some(n) => out.push(n),
                    None => {
                        return Err(
                            self.type_err(path, format!("`{cell}` has no numeric reading"))
                        )
                    }
                },
            }
        }
        Ok(out)
    }

    fn empty_view_err(&self, path: &NodePath, rule: &str) -> ExecError {
        ExecError::EmptyView {
            path: path.clone(),
            rule: rule.to_string(),
        }
    }

    fn eval(&mut self, node: &LfNode, path: &NodePath) -> EResult<ExecValue> {
        let (name, children) = match node {
            LfNode::Rule { name, children } => (name.as_str(), children.as_slice()),
            LfNode::Value(_) => {
                return Err(self.malformed(path, "value leaf outside a scalar position"))
            }
            LfNode::Column(_) => {
                return Err(self.malformed(path, "column leaf outside an argument position"))
            }
            LfNode::Index(_) => {
                return Err(self.malformed(path, "ordinal leaf outside an argument position"))
            }
        };
        let rule = self
            .reg
            .rule(name)
            .ok_or_else(|| self.malformed(path, format!("unknown rule `{name}`")))?;
        if children.len() != rule.arity() {
            return Err(self.malformed(
                path,
                format!(
                    "rule `{name}` takes {} arguments, found {}",
                    rule.arity(),
                    children.len()
                ),
            ));
        }
        let value = self.eval_rule(name, children, path)?;
        self.record(path, &value);
        Ok(value)
    }

    fn eval_rule(&mut self, name: &str, args: &[LfNode], path: &NodePath) -> EResult<ExecValue> {
        use ExecValue as EV;
        let p = |i: usize| path.child(i);
        match name {
            // --- statements ---
            "and" => {
                let a = self.eval_bool(&args[0], &p(0))?;
                let b = self.eval_bool(&args[1], &p(1))?;
                Ok(EV::Bool(a && b))
            }
            "only" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                Ok(EV::Bool(rows.len() == 1))
            }
            "eq" | "not_eq" | "round_eq" | "greater" | "less" => {
                let a = self.eval_scalar(&args[0], &p(0), ScalarCtx::Numeric)?;
                let b = self.eval_scalar(&args[1], &p(1), ScalarCtx::Numeric)?;
                let result = match name {
                    "round_eq" => match (&a, &b) {
                        (Scalar::Num(x), Scalar::Num(y)) => self.round_eq(*x, *y),
                        (Scalar::Date(x), Scalar::Date(y)) => x == y,
                        _ => {
                            return Err(self.type_err(
                                path,
                                format!(
                                    "cannot compare {} with {}",
                                    scalar_kind(&a),
                                    scalar_kind(&b)
                                ),
                            ))
                        }
                    },
                    _ => {
                        let ord = self.compare(path, &a, &b)?;
                        match name {
                            "eq" => ord.is_eq(),
                            "not_eq" => !ord.is_eq(),
                            "greater" => ord.is_gt(),
                            "less" => ord.is_lt(),
                            _ => unreachable!(),
                        }
                    }
                };
                Ok(EV::Bool(result))
            }
            "str_eq" | "not_str_eq" => {
                let a = self.eval_scalar(&args[0], &p(0), ScalarCtx::String)?;
                let b = self.eval_scalar(&args[1], &p(1), ScalarCtx::String)?;
                let (Scalar::Str(a), Scalar::Str(b)) = (&a, &b) else {
                    unreachable!("string context always yields strings");
                };
                // Equal up to containment either way: a cell like `w 23-17`
                // matches the value `w`.
                let hit = a == b || a.contains(b.as_str()) || b.contains(a.as_str());
                Ok(EV::Bool(if name == "str_eq" { hit } else { !hit }))
            }
            "all_eq" | "all_not_eq" | "all_less" | "all_less_eq" | "all_greater"
            | "all_greater_eq" | "most_eq" | "most_not_eq" | "most_less" | "most_less_eq"
            | "most_greater" | "most_greater_eq" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                let v = self.eval_scalar(&args[2], &p(2), ScalarCtx::Numeric)?;
                let (quant, op) = name.split_once('_').unwrap();
                let hits = rows
                    .iter()
                    .filter(|&&r| self.num_predicate(op, self.cell_scalar(r, col), &v))
                    .count();
                let ok = match quant {
                    "all" => hits == rows.len(),
                    "most" => hits * 2 > rows.len(),
                    _ => unreachable!(),
                };
                Ok(EV::Bool(ok))
            }
            "all_str_eq" | "all_not_str_eq" | "most_str_eq" | "most_not_str_eq" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                let Scalar::Str(v) = self.eval_scalar(&args[2], &p(2), ScalarCtx::String)? else {
                    unreachable!();
                };
                let negated = name.contains("not_");
                let hits = rows
                    .iter()
                    .filter(|&&r| self.str_predicate(negated, self.table.cell(r, col), &v))
                    .count();
                let ok = if name.starts_with("all") {
                    hits == rows.len()
                } else {
                    hits * 2 > rows.len()
                };
                Ok(EV::Bool(ok))
            }
            // --- views ---
            "all_rows" => Ok(EV::Rows((0..self.table.n_rows()).collect())),
            "filter_eq" | "filter_not_eq" | "filter_less" | "filter_less_eq" | "filter_greater"
            | "filter_greater_eq" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                let col = self.col(&args[1], &p(1))?;
                let v = self.eval_scalar(&args[2], &p(2), ScalarCtx::Numeric)?;
                let op = name.strip_prefix("filter_").unwrap();
                Ok(EV::Rows(
                    rows.into_iter()
                        .filter(|&r| self.num_predicate(op, self.cell_scalar(r, col), &v))
                        .collect(),
                ))
            }
            "filter_str_eq" | "filter_str_not_eq" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                let col = self.col(&args[1], &p(1))?;
                let Scalar::Str(v) = self.eval_scalar(&args[2], &p(2), ScalarCtx::String)? else {
                    unreachable!();
                };
                let negated = name.ends_with("not_eq");
                Ok(EV::Rows(
                    rows.into_iter()
                        .filter(|&r| self.str_predicate(negated, self.table.cell(r, col), &v))
                        .collect(),
                ))
            }
            "filter_all" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                self.col(&args[1], &p(1))?;
                Ok(EV::Rows(rows))
            }
            // --- numeric aggregates ---
            "count" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                Ok(EV::Num(rows.len() as f64))
            }
            "sum" | "avg" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                let nums = self.column_nums(&rows, col, path)?;
                let total: f64 = nums.iter().sum();
                Ok(EV::Num(if name == "sum" {
                    total
                } else {
                    total / nums.len() as f64
                }))
            }
            "max" | "min" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                match self.column_order(&rows, col, path)? {
                    ColumnOrder::Nums(ns) => {
                        let best = ns
                            .into_iter()
                            .reduce(|a, b| if name == "max" { a.max(b) } else { a.min(b) })
                            .unwrap();
                        Ok(EV::Num(best))
                    }
                    ColumnOrder::Dates(ds) => {
                        let best = if name == "max" {
                            ds.into_iter().max()
                        } else {
                            ds.into_iter().min()
                        }
                        .unwrap();
                        Ok(EV::Date(best))
                    }
                }
            }
            "nth_max" | "nth_min" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                let i = self.ordinal(&args[2], &p(2), rows.len())?;
                match self.column_order(&rows, col, path)? {
                    ColumnOrder::Nums(mut ns) => {
                        if name == "nth_max" {
                            ns.sort_by(|a, b| b.total_cmp(a));
                        } else {
                            ns.sort_by(f64::total_cmp);
                        }
                        Ok(EV::Num(ns[i - 1]))
                    }
                    ColumnOrder::Dates(mut ds) => {
                        ds.sort();
                        if name == "nth_max" {
                            ds.reverse();
                        }
                        Ok(EV::Date(ds[i - 1]))
                    }
                }
            }
            // --- row selectors ---
            "argmax" | "argmin" | "nth_argmax" | "nth_argmin" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                if rows.is_empty() {
                    return Err(self.empty_view_err(path, name));
                }
                let col = self.col(&args[1], &p(1))?;
                let want_max = name.ends_with("argmax");
                let i = if name.starts_with("nth_") {
                    self.ordinal(&args[2], &p(2), rows.len())?
                } else {
                    1
                };
                // Rank rows by value (ties keep table order), pick the i-th.
                let mut order: Vec<usize> = (0..rows.len()).collect();
                match self.column_order(&rows, col, path)? {
                    ColumnOrder::Nums(ns) => order.sort_by(|&a, &b| {
                        let cmp = ns[a].total_cmp(&ns[b]);
                        let cmp = if want_max { cmp.reverse() } else { cmp };
                        cmp.then(rows[a].cmp(&rows[b]))
                    }),
                    ColumnOrder::Dates(ds) => order.sort_by(|&a, &b| {
                        let cmp = ds[a].cmp(&ds[b]);
                        let cmp = if want_max { cmp.reverse() } else { cmp };
                        cmp.then(rows[a].cmp(&rows[b]))
                    }),
                }
                Ok(EV::RowIndex(rows[order[i - 1]]))
            }
            // --- extracted values ---
            "num_hop" | "str_hop" => {
                let row = self.eval_row(&args[0], &p(0))?;
                let col = self.col(&args[1], &p(1))?;
                self.hop_value(name, row, col, path)
            }
            "num_hop_first" | "str_hop_first" => {
                let rows = self.eval_rows(&args[0], &p(0))?;
                let Some(&row) = rows.first() else {
                    return Err(self.empty_view_err(path, name));
                };
                let col = self.col(&args[1], &p(1))?;
                self.hop_value(name, row, col, path)
            }
            "diff" => {
                let a = self.eval_scalar(&args[0], &p(0), ScalarCtx::Numeric)?;
                let b = self.eval_scalar(&args[1], &p(1), ScalarCtx::Numeric)?;
                match (a, b) {
                    (Scalar::Num(x), Scalar::Num(y)) => Ok(EV::Num(x - y)),
                    (Scalar::Date(x), Scalar::Date(y)) => {
                        Ok(EV::Num((x - y).num_days() as f64))
                    }
                    (a, b) => Err(self.type_err(
                        path,
                        format!(
                            "cannot subtract {} from {}",
                            scalar_kind(&b),
                            scalar_kind(&a)
                        ),
                    )),
                }
            }
            other => Err(self.malformed(path, format!("rule `{other}` has no semantics"))),
        }
    }

    fn hop_value(&self, name: &str, row: usize, col: usize, path: &NodePath) -> EResult<ExecValue> {
        let cell = self.table.cell(row, col);
        if name.starts_with("str_") {
            return Ok(ExecValue::Str(normalize_text(cell)));
        }
        match coerce_cell(cell) {
            TypedValue::Num(n) => Ok(ExecValue::Num(n)),
            TypedValue::Date(d) => Ok(ExecValue::Date(d)),
            TypedValue::Text(_) => extract_number(cell)
                .map(ExecValue::Num)
                .ok_or_else(|| self.type_err(path, format!("`{cell}` has no numeric reading"))),
        }
    }
}

fn scalar_kind(s: &Scalar) -> &'static str {
    match s {
        Scalar::Num(_) => "a number",
        Scalar::Date(_) => "a date",
        Scalar::Str(_) => "text",
    }
}

fn finish_root(cfg: &ExecConfig, out: EResult<bool>) -> EResult<bool> {
    match out {
        Err(ExecError::EmptyView { .. }) if cfg.empty_view == EmptyViewPolicy::FalseAtRoot => {
            Ok(false)
        }
        other => other,
    }
}

/// Execute a statement against a table: true, false, or a typed failure.
pub fn execute(
    lf: &LogicalForm,
    table: &Table,
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
) -> Result<bool, ExecError> {
    let mut ev = Evaluator {
        table,
        reg,
        cfg,
        trace: None,
    };
    finish_root(cfg, ev.eval_bool(&lf.root, &NodePath::root()))
}

/// Execute while recording the value every rule node produced, keyed by path.
pub fn execute_traced(
    lf: &LogicalForm,
    table: &Table,
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
) -> Result<(bool, BTreeMap<NodePath, String>), ExecError> {
    let mut ev = Evaluator {
        table,
        reg,
        cfg,
        trace: Some(BTreeMap::new()),
    };
    let out = ev.eval_bool(&lf.root, &NodePath::root());
    let trace = ev.trace.take().unwrap();
    finish_root(cfg, out).map(|b| (b, trace))
}

/// Evaluate one subtree (used by content-selection probes and traces).
pub fn execute_node(
    node: &LfNode,
    table: &Table,
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
) -> Result<ExecValue, ExecError> {
    let mut ev = Evaluator {
        table,
        reg,
        cfg,
        trace: None,
    };
    ev.eval(node, &NodePath::root())
}

/// Candidate filter: keep only statements that execute to true.
pub fn fcr_accept(lf: &LogicalForm, table: &Table, reg: &GrammarRegistry, cfg: &ExecConfig) -> bool {
    matches!(execute(lf, table, reg, cfg), Ok(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_lf;

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

    fn run(text: &str) -> Result<bool, ExecError> {
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf(text, &reg).unwrap();
        execute(&lf, &table(), &reg, &ExecConfig::default())
    }

    #[test]
    fn negated_string_quantifiers_dispatch_by_their_registered_names() {
        assert_eq!(run("all_not_str_eq { all_rows ; opponent ; z }"), Ok(true));
        assert_eq!(run("all_not_str_eq { all_rows ; result ; w }"), Ok(false));
        assert_eq!(
            run("most_not_str_eq { all_rows ; opponent ; giants }"),
            Ok(true)
        );
        assert_eq!(run("most_not_str_eq { all_rows ; result ; w }"), Ok(false));
    }

    fn value(text: &str) -> ExecValue {
        // Wrap the subtree in a statement so it parses, then evaluate it.
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf(&format!("eq {{ {text} ; 0 }}"), &reg).unwrap();
        execute_node(
            &lf.root.children()[0],
            &table(),
            &reg,
            &ExecConfig::default(),
        )
        .unwrap()
    }

    const FIG_TEXT: &str =
        "eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52500 }";

    #[test]
    fn example_statement_is_true() {
        assert_eq!(run(FIG_TEXT), Ok(true));
        assert_eq!(
            run("eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52501 }"),
            Ok(false)
        );
    }

    #[test]
    fn example_trace_has_exact_average() {
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf(FIG_TEXT, &reg).unwrap();
        let (ok, trace) = execute_traced(&lf, &table(), &reg, &ExecConfig::default()).unwrap();
        assert!(ok);
        assert_eq!(trace.get(&"/0".parse().unwrap()).unwrap(), "52500");
        assert_eq!(trace.get(&"/0/0".parse().unwrap()).unwrap(), "rows[0,2,3,4]");
        assert_eq!(trace.get(&"/".parse().unwrap()).unwrap(), "true");
    }

    #[test]
    fn substring_filter_matches_inside_cells() {
        assert_eq!(
            value("count { filter_str_eq { all_rows ; result ; w } }"),
            ExecValue::Num(4.0)
        );
        assert_eq!(
            value("count { filter_str_not_eq { all_rows ; result ; w } }"),
            ExecValue::Num(1.0)
        );
        assert_eq!(
            value("count { filter_str_eq { all_rows ; opponent ; giants } }"),
            ExecValue::Num(2.0)
        );
    }

    #[test]
    fn numeric_filters_use_embedded_numbers() {
        // `w 23-17` reads as 23 in a numeric context.
        assert_eq!(
            value("count { filter_greater { all_rows ; result ; 20 } }"),
            ExecValue::Num(2.0)
        );
        assert_eq!(
            value("count { filter_eq { all_rows ; attendance ; 67000 } }"),
            ExecValue::Num(1.0)
        );
    }

    #[test]
    fn string_equality_is_bidirectional_containment() {
        assert_eq!(
            run("str_eq { str_hop { argmax { all_rows ; attendance } ; result } ; w }"),
            Ok(true)
        );
        assert_eq!(
            run("not_str_eq { str_hop { argmin { all_rows ; attendance } ; opponent } ; giants }"),
            Ok(false)
        );
    }

    #[test]
    fn quantifiers_use_strict_majority() {
        assert_eq!(run("most_str_eq { all_rows ; result ; w }"), Ok(true));
        assert_eq!(run("most_str_eq { all_rows ; result ; l }"), Ok(false));
        assert_eq!(run("all_str_eq { all_rows ; result ; w }"), Ok(false));
        assert_eq!(
            run("all_str_eq { filter_str_eq { all_rows ; result ; w } ; result ; w }"),
            Ok(true)
        );
        // 3 of 5 attendances are above 50000: a strict majority.
        assert_eq!(run("most_greater { all_rows ; attendance ; 50000 }"), Ok(true));
        assert_eq!(run("most_greater { all_rows ; attendance ; 61500 }"), Ok(false));
    }

    #[test]
    fn only_counts_exactly_one() {
        assert_eq!(
            run("only { filter_str_eq { all_rows ; result ; l } }"),
            Ok(true)
        );
        assert_eq!(
            run("only { filter_str_eq { all_rows ; result ; w } }"),
            Ok(false)
        );
        // No matches: only is false, not an error.
        assert_eq!(
            run("only { filter_str_eq { all_rows ; result ; draw } }"),
            Ok(false)
        );
    }

    #[test]
    fn count_of_empty_view_is_zero() {
        assert_eq!(
            run("eq { count { filter_str_eq { all_rows ; result ; draw } } ; 0 }"),
            Ok(true)
        );
    }

    #[test]
    fn aggregates_on_empty_views_fail() {
        let e = run("eq { avg { filter_str_eq { all_rows ; result ; draw } ; attendance } ; 0 }");
        assert!(matches!(e, Err(ExecError::EmptyView { .. })));
        let e = run("most_str_eq { filter_str_eq { all_rows ; result ; draw } ; result ; w }");
        assert!(matches!(e, Err(ExecError::EmptyView { .. })));
    }

    #[test]
    fn empty_view_policy_can_report_false() {
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf(
            "eq { avg { filter_str_eq { all_rows ; result ; draw } ; attendance } ; 0 }",
            &reg,
        )
        .unwrap();
        let cfg = ExecConfig {
            empty_view: EmptyViewPolicy::FalseAtRoot,
            ..ExecConfig::default()
        };
        assert_eq!(execute(&lf, &table(), &reg, &cfg), Ok(false));
    }

    #[test]
    fn extremes_and_ordinals() {
        assert_eq!(value("max { all_rows ; attendance }"), ExecValue::Num(67000.0));
        assert_eq!(value("min { all_rows ; attendance }"), ExecValue::Num(27500.0));
        assert_eq!(
            value("nth_max { all_rows ; attendance ; 2 }"),
            ExecValue::Num(61500.0)
        );
        assert_eq!(
            value("nth_min { all_rows ; attendance ; 1 }"),
            ExecValue::Num(27500.0)
        );
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf("eq { nth_max { all_rows ; attendance ; 6 } ; 1 }", &reg).unwrap();
        assert!(matches!(
            execute(&lf, &table(), &reg, &ExecConfig::default()),
            Err(ExecError::BadOrdinal { index: 6, size: 5, .. })
        ));
    }

    #[test]
    fn row_selection_and_hops() {
        assert_eq!(
            run("str_eq { str_hop { argmax { all_rows ; attendance } ; opponent } ; new york giants }"),
            Ok(true)
        );
        assert_eq!(
            run("eq { num_hop { argmin { all_rows ; attendance } ; result } ; 17 }"),
            Ok(true)
        );
        // Ties pick the earliest row: both giants games, argmax on result
        // number 23 beats the rest.
        assert_eq!(
            value("num_hop { nth_argmax { all_rows ; attendance ; 2 } ; attendance }"),
            ExecValue::Num(61500.0)
        );
    }

    #[test]
    fn hop_first_takes_first_row_of_view() {
        assert_eq!(
            run("eq { num_hop_first { filter_str_eq { all_rows ; result ; w } ; attendance } ; 67000 }"),
            Ok(true)
        );
        assert_eq!(
            run("str_eq { str_hop_first { filter_str_eq { all_rows ; opponent ; saints } ; result } ; w 26-14 }"),
            Ok(true)
        );
        let e = run("eq { num_hop_first { filter_str_eq { all_rows ; result ; draw } ; attendance } ; 1 }");
        assert!(matches!(e, Err(ExecError::EmptyView { .. })));
    }

    #[test]
    fn approximate_equality_tolerance() {
        // within 10%
        assert_eq!(run("round_eq { max { all_rows ; attendance } ; 65000 }"), Ok(true));
        // 27500 vs 35000 is well outside 10%
        assert_eq!(run("round_eq { min { all_rows ; attendance } ; 35000 }"), Ok(false));
    }

    #[test]
    fn diff_subtracts() {
        assert_eq!(
            run("eq { diff { max { all_rows ; attendance } ; min { all_rows ; attendance } } ; 39500 }"),
            Ok(true)
        );
    }

    #[test]
    fn date_columns_order_by_calendar() {
        let t = Table::new(
            "matches",
            vec!["date".into(), "score".into()],
            vec![
                vec!["january 12, 2008".into(), "3".into()],
                vec!["march 2, 2007".into(), "5".into()],
                vec!["november 30, 2007".into(), "1".into()],
            ],
        )
        .unwrap();
        let reg = GrammarRegistry::default_registry();
        let cfg = ExecConfig::default();
        let lf = parse_lf(
            "eq { num_hop { argmax { all_rows ; date } ; score } ; 3 }",
            &reg,
        )
        .unwrap();
        assert_eq!(execute(&lf, &t, &reg, &cfg), Ok(true));
        let lf = parse_lf(
            "eq { num_hop { argmin { all_rows ; date } ; score } ; 5 }",
            &reg,
        )
        .unwrap();
        assert_eq!(execute(&lf, &t, &reg, &cfg), Ok(true));
        // diff of two dates counts days
        let lf = parse_lf(
            "eq { diff { max { all_rows ; date } ; min { all_rows ; date } } ; 316 }",
            &reg,
        )
        .unwrap();
        assert_eq!(execute(&lf, &t, &reg, &cfg), Ok(true));
        // avg refuses date columns
        let lf = parse_lf("eq { avg { all_rows ; date } ; 3 }", &reg).unwrap();
        assert!(matches!(
            execute(&lf, &t, &reg, &cfg),
            Err(ExecError::Type { .. })
        ));
    }

    #[test]
    fn date_value_leaves_compare_with_date_cells() {
        let t = Table::new(
            "matches",
            vec!["date".into(), "score".into()],
            vec![
                vec!["january 12, 2008".into(), "3".into()],
                vec!["march 2, 2007".into(), "5".into()],
            ],
        )
        .unwrap();
        let reg = GrammarRegistry::default_registry();
        let cfg = ExecConfig::default();
        let lf = parse_lf(
            "greater { num_hop { argmax { all_rows ; date } ; date } ; march 2, 2007 }",
            &reg,
        )
        .unwrap();
        assert_eq!(execute(&lf, &t, &reg, &cfg), Ok(true));
        // A date and a plain number refuse to compare.
        let lf = parse_lf(
            "greater { num_hop { argmax { all_rows ; date } ; date } ; 5 }",
            &reg,
        )
        .unwrap();
        assert!(matches!(
            execute(&lf, &t, &reg, &cfg),
            Err(ExecError::Type { .. })
        ));
    }

    #[test]
    fn mismatched_scalar_types_fail() {
        let e = run("eq { count { all_rows } ; no number here }");
        assert!(matches!(e, Err(ExecError::Type { .. })));
    }

    #[test]
    fn unknown_columns_fail_with_path() {
        let e = run("eq { avg { all_rows ; mystery } ; 1 }");
        match e {
            Err(ExecError::UnknownColumn { path, name }) => {
                assert_eq!(path.to_string(), "/0/1");
                assert_eq!(name, "mystery");
            }
            other => panic!("expected unknown column, got {other:?}"),
        }
    }

    #[test]
    fn filter_all_keeps_every_row() {
        assert_eq!(
            value("count { filter_all { all_rows ; result } }"),
            ExecValue::Num(5.0)
        );
    }

    #[test]
    fn numeric_equality_epsilon_is_relative() {
        assert_eq!(run("eq { avg { all_rows ; attendance } ; 49940 }"), Ok(true));
        assert_eq!(
            run("eq { avg { all_rows ; attendance } ; 49940.0001 }"),
            Ok(true)
        );
        assert_eq!(run("eq { avg { all_rows ; attendance } ; 49941 }"), Ok(false));
    }
}
