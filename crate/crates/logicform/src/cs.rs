//! Content selection: classify every value leaf of a form by where its
//! text can come from.
//!
//! `Tab` values appear in the table itself (substring of a cell after
//! normalization, or numerically equal to a cell). `Inf` values are
//! inferred: they match the executed value of a sibling computation inside
//! the same comparison, within the approximate-equality tolerance. `Aux`
//! covers the rest. Precedence is Tab, then Inf, then Aux; each value leaf
//! is counted once per occurrence.

use serde::Serialize;

use crate::ast::{LfNode, LogicalForm, NodePath};
use crate::exec::{execute_node, ExecConfig, ExecValue};
use crate::grammar::{GrammarRegistry, NodeKind};
use crate::table::{coerce_cell, extract_number, normalize_text, parse_date_cell, Table, TypedValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CsCategory {
    Tab,
    Inf,
    Aux,
}

impl std::fmt::Display for CsCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CsCategory::Tab => "TAB",
            CsCategory::Inf => "INF",
            CsCategory::Aux => "AUX",
        })
    }
}

/// One classified value leaf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsValue {
    pub path: NodePath,
    pub text: String,
    pub category: CsCategory,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CsReport {
    pub values: Vec<CsValue>,
    /// Sibling probes that failed to execute while deciding `Inf`.
    pub warnings: Vec<String>,
}

impl CsReport {
    /// Texts of the table-grounded values, in leaf order.
    pub fn tab_texts(&self) -> Vec<&str> {
        self.values
            .iter()
            .filter(|v| v.category == CsCategory::Tab)
            .map(|v| v.text.as_str())
            .collect()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.values.iter().map(|v| v.text.as_str()).collect()
    }
}

/// Does the leaf text occur in the table? Substring of a normalized cell,
/// or equal to a cell under coercion.
fn appears_in_table(text: &str, table: &Table) -> bool {
    let norm = normalize_text(text);
    let typed = coerce_cell(text);
    for row in &table.rows {
        for cell in row {
            if !norm.is_empty() && normalize_text(cell).contains(&norm) {
                return true;
            }
            match (&typed, coerce_cell(cell)) {
                (TypedValue::Num(a), TypedValue::Num(b)) if a == &b => return true,
                (TypedValue::Date(a), TypedValue::Date(b)) if a == &b => return true,
                _ => {}
            }
        }
    }
    false
}

/// Does the leaf text agree with an executed sibling value, within the
/// approximate-equality tolerance for numbers?
fn matches_value(text: &str, value: &ExecValue, cfg: &ExecConfig) -> bool {
    match value {
        ExecValue::Num(s) => {
            let lit = match coerce_cell(text) {
                TypedValue::Num(n) => Some(n),
                TypedValue::Date(_) => None,
                TypedValue::Text(_) => extract_number(text),
            };
            match lit {
                Some(l) => (l - s).abs() <= cfg.round_tolerance * l.abs().max(s.abs()).max(1.0),
                None => false,
            }
        }
        ExecValue::Date(d) => parse_date_cell(text).as_ref() == Some(d),
        ExecValue::Str(s) => {
            let l = normalize_text(text);
            l == *s || s.contains(&l) || l.contains(s.as_str())
        }
        _ => false,
    }
}

/// Classify every value leaf of the form.
pub fn extract_cs(
    lf: &LogicalForm,
    table: &Table,
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
) -> CsReport {
    let mut report = CsReport::default();
    for (path, node) in lf.root.walk() {
        let LfNode::Value(text) = node else { continue };
        let category = if appears_in_table(text, table) {
            CsCategory::Tab
        } else if infers_from_sibling(lf, &path, text, table, reg, cfg, &mut report.warnings) {
            CsCategory::Inf
        } else {
            CsCategory::Aux
        };
        report.values.push(CsValue {
            path,
            text: text.clone(),
            category,
        });
    }
    report
}

/// Execute the scalar siblings of a value leaf and compare. Quantifier and
/// filter leaves have no scalar siblings, so they can never be inferred.
fn infers_from_sibling(
    lf: &LogicalForm,
    path: &NodePath,
    text: &str,
    table: &Table,
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
    warnings: &mut Vec<String>,
) -> bool {
    let Some(parent_path) = path.parent() else {
        return false;
    };
    let Some(parent) = lf.root.node_at(&parent_path) else {
        return false;
    };
    let own_idx = *path.0.last().unwrap();
    for (i, sib) in parent.children().iter().enumerate() {
        if i == own_idx {
            continue;
        }
        let LfNode::Rule { .. } = sib else { continue };
        let kind = sib.kind(reg);
        if !matches!(kind, Some(NodeKind::N) | Some(NodeKind::Obj)) {
            continue;
        }
        match execute_node(sib, table, reg, cfg) {
            Ok(value) => {
                if matches_value(text, &value, cfg) {
                    return true;
                }
            }
            Err(e) => warnings.push(format!(
                "{}: sibling of `{text}` failed to execute: {e}",
                parent_path.child(i)
            )),
        }
    }
    false
}

/// Category counts over any number of forms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CsDistribution {
    pub tab: usize,
    pub inf: usize,
    pub aux: usize,
}

impl CsDistribution {
    pub fn add(&mut self, category: CsCategory) {
        match category {
            CsCategory::Tab => self.tab += 1,
            CsCategory::Inf => self.inf += 1,
            CsCategory::Aux => self.aux += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tab + self.inf + self.aux
    }

    /// Percentages in Tab, Inf, Aux order; `None` when nothing was counted.
    pub fn percentages(&self) -> Option<[f64; 3]> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let pct = |n: usize| 100.0 * n as f64 / total as f64;
        Some([pct(self.tab), pct(self.inf), pct(self.aux)])
    }
}

/// Tally the classified values of many reports.
pub fn cs_distribution<'a>(reports: impl IntoIterator<Item = &'a CsReport>) -> CsDistribution {
    let mut dist = CsDistribution::default();
    for report in reports {
        for v in &report.values {
            dist.add(v.category);
        }
    }
    dist
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

    fn classify(text: &str) -> CsReport {
        let reg = GrammarRegistry::default_registry();
        let lf = parse_lf(text, &reg).unwrap();
        extract_cs(&lf, &table(), &reg, &ExecConfig::default())
    }

    #[test]
    fn example_values() {
        let report = classify(
            "eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52500 }",
        );
        assert_eq!(report.values.len(), 2);
        let w = &report.values[0];
        assert_eq!(w.text, "w");
        assert_eq!(w.category, CsCategory::Tab);
        assert_eq!(w.path.to_string(), "/0/0/2");
        let avg = &report.values[1];
        assert_eq!(avg.text, "52500");
        assert_eq!(avg.category, CsCategory::Inf);
        assert_eq!(avg.path.to_string(), "/1");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn cell_equal_numbers_are_table_values() {
        let report =
            classify("eq { num_hop { argmax { all_rows ; attendance } ; attendance } ; 67000 }");
        assert_eq!(report.values[0].category, CsCategory::Tab);
    }

    #[test]
    fn unrelated_values_are_auxiliary() {
        // 100000 is no cell and far from the average (49940).
        let report = classify("greater { avg { all_rows ; attendance } ; 100000 }");
        assert_eq!(report.values[0].category, CsCategory::Aux);
        // Within 10% of the sibling it counts as inferred instead.
        let report = classify("greater { avg { all_rows ; attendance } ; 48000 }");
        assert_eq!(report.values[0].category, CsCategory::Inf);
    }

    #[test]
    fn quantifier_values_never_infer() {
        // 48999 is close to nothing in the table and has no scalar sibling.
        let report = classify("most_greater { all_rows ; attendance ; 48999 }");
        assert_eq!(report.values[0].category, CsCategory::Aux);
    }

    #[test]
    fn failed_probes_warn_and_fall_through() {
        let report = classify(
            "eq { avg { filter_str_eq { all_rows ; result ; zq } ; attendance } ; 99 }",
        );
        // `zq` matches no cell and has no scalar sibling.
        assert_eq!(report.values[0].category, CsCategory::Aux);
        // `99` would need the average, which fails on the empty view.
        assert_eq!(report.values[1].category, CsCategory::Aux);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn each_occurrence_counts() {
        let report = classify(
            "and { most_str_eq { all_rows ; result ; w } ; only { filter_str_eq { all_rows ; result ; w } } }",
        );
        assert_eq!(report.values.len(), 2);
        assert!(report.values.iter().all(|v| v.category == CsCategory::Tab));
        let dist = cs_distribution([&report]);
        assert_eq!(dist.tab, 2);
        assert_eq!(dist.total(), 2);
        assert_eq!(dist.percentages(), Some([100.0, 0.0, 0.0]));
    }

    #[test]
    fn empty_distribution_has_no_percentages() {
        assert_eq!(CsDistribution::default().percentages(), None);
    }
}
