//! Scoring predictions against references, execution-rate bookkeeping, and
//! the content-selection ablation grid.

use crate::ast::{extract_sketch, LogicalForm, NodePath};
use crate::cs::{extract_cs, CsCategory, CsValue};
use crate::exec::{execute, ExecConfig, ExecError};
use crate::grammar::GrammarRegistry;
use crate::search::{generate, SearchConfig};
use crate::table::Table;
use serde::Serialize;

/// Per-record outcome of an accuracy comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordScore {
    pub index: usize,
    pub sketch_hit: bool,
    pub full_hit: bool,
}

/// Aggregate accuracy over aligned predictions and references.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub sketch_accuracy: f64,
    pub full_accuracy: f64,
    pub n: usize,
    pub per_record: Vec<RecordScore>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{predictions} predictions against {references} reference groups")]
    LengthMismatch {
        predictions: usize,
        references: usize,
    },
}

/// Strict structural comparison against any of the per-record references.
///
/// A full hit requires tree equality with some reference; a sketch hit only
/// requires the placeholder skeletons to match. A full hit is always also a
/// sketch hit because equal trees have equal skeletons.
pub fn score_accuracy(
    predictions: &[LogicalForm],
    references: &[Vec<LogicalForm>],
) -> Result<AccuracyReport, EvalError> {
    if predictions.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            references: references.len(),
        });
    }
    let mut per_record = Vec::with_capacity(predictions.len());
    let mut sketch_hits = 0usize;
    let mut full_hits = 0usize;
    for (index, (pred, refs)) in predictions.iter().zip(references).enumerate() {
        let full_hit = refs.iter().any(|r| r == pred);
        let pred_sketch = extract_sketch(pred);
        let sketch_hit = refs.iter().any(|r| extract_sketch(r) == pred_sketch);
        sketch_hits += usize::from(sketch_hit);
        full_hits += usize::from(full_hit);
        per_record.push(RecordScore {
            index,
            sketch_hit,
            full_hit,
        });
    }
    let n = predictions.len();
    let frac = |hits: usize| if n == 0 { 0.0 } else { hits as f64 / n as f64 };
    Ok(AccuracyReport {
        sketch_accuracy: frac(sketch_hits),
        full_accuracy: frac(full_hits),
        n,
        per_record,
    })
}

/// A statement that did not come out true, with the point of failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecFailure {
    pub index: usize,
    /// Node where execution failed; the root for a plain `false` verdict.
    pub path: NodePath,
    pub reason: String,
}

/// Outcome of executing a batch of statement/table pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionReport {
    /// Fraction executing to true; `None` for an empty batch rather than a
    /// vacuous success.
    pub rate: Option<f64>,
    pub n: usize,
    pub true_count: usize,
    pub failures: Vec<ExecFailure>,
}

fn error_path(e: &ExecError) -> NodePath {
    match e {
        ExecError::EmptyView { path, .. }
        | ExecError::Type { path, .. }
        | ExecError::UnknownColumn { path, .. }
        | ExecError::BadOrdinal { path, .. }
        | ExecError::Malformed { path, .. } => path.clone(),
    }
}

/// Execute every pair and report the true-rate plus per-failure paths.
pub fn execution_rate(
    pairs: &[(LogicalForm, Table)],
    reg: &GrammarRegistry,
    cfg: &ExecConfig,
) -> ExecutionReport {
    let mut true_count = 0usize;
    let mut failures = Vec::new();
    for (index, (lf, table)) in pairs.iter().enumerate() {
        match execute(lf, table, reg, cfg) {
            Ok(true) => true_count += 1,
            Ok(false) => failures.push(ExecFailure {
                index,
                path: NodePath::root(),
                reason: "executes to false".into(),
            }),
            Err(e) => failures.push(ExecFailure {
                index,
                path: error_path(&e),
                reason: e.to_string(),
            }),
        }
    }
    let n = pairs.len();
    ExecutionReport {
        rate: (n > 0).then(|| true_count as f64 / n as f64),
        n,
        true_count,
        failures,
    }
}

/// One evaluated configuration of the ablation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    /// Which value classes were fed to the generator; empty = none at all.
    pub cs_subset: Vec<CsCategory>,
    pub use_fcr: bool,
    pub report: AccuracyReport,
}

/// Grid driver: for every (value-class subset × rejection flag) cell, run
/// the generator per record with only the selected classes of the gold
/// values and score the top candidate against the gold statement.
///
/// Per-record generation failures count as misses; they never abort the
/// grid.
pub fn ablation_table(
    records: &[(LogicalForm, Table)],
    cs_subsets: &[Vec<CsCategory>],
    with_fcr: &[bool],
    reg: &GrammarRegistry,
    base: &SearchConfig,
) -> Vec<AblationRow> {
    let gold_cs: Vec<Vec<CsValue>> = records
        .iter()
        .map(|(lf, table)| extract_cs(lf, table, reg, &base.exec).values)
        .collect();
    let mut rows = Vec::new();
    for subset in cs_subsets {
        for &use_fcr in with_fcr {
            let cfg = SearchConfig {
                use_fcr,
                ..base.clone()
            };
            let mut per_record = Vec::with_capacity(records.len());
            let mut sketch_hits = 0usize;
            let mut full_hits = 0usize;
            for (index, ((gold, table), cs)) in records.iter().zip(&gold_cs).enumerate() {
                let fed: Vec<CsValue> = cs
                    .iter()
                    .filter(|v| subset.contains(&v.category))
                    .cloned()
                    .collect();
                let top = generate(table, &fed, reg, &cfg)
                    .ok()
                    .and_then(|ranked| ranked.into_iter().next());
                // No candidate at all is a miss on both metrics.
                let (sketch_hit, full_hit) = match &top {
                    Some(c) => (
                        extract_sketch(&c.lf) == extract_sketch(gold),
                        c.lf == *gold,
                    ),
                    None => (false, false),
                };
                sketch_hits += usize::from(sketch_hit);
                full_hits += usize::from(full_hit);
                per_record.push(RecordScore {
                    index,
                    sketch_hit,
                    full_hit,
                });
            }
            let n = records.len();
            let frac = |hits: usize| if n == 0 { 0.0 } else { hits as f64 / n as f64 };
            rows.push(AblationRow {
                cs_subset: subset.clone(),
                use_fcr,
                report: AccuracyReport {
                    sketch_accuracy: frac(sketch_hits),
                    full_accuracy: frac(full_hits),
                    n,
                    per_record,
                },
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::tests::{example_lf, example_table};
    use crate::ast::LfNode;
    use crate::parse::parse_lf;
    use crate::sample::{sample_lf, SampleConfig};
    use rand::prelude::*;
    use rand::rngs::StdRng;

    fn reg() -> std::sync::Arc<GrammarRegistry> {
        GrammarRegistry::default_registry()
    }

    #[test]
    fn exact_prediction_hits_both_ways() {
        let lf = example_lf();
        let report = score_accuracy(std::slice::from_ref(&lf), &[vec![lf.clone()]]).unwrap();
        assert_eq!(report.sketch_accuracy, 1.0);
        assert_eq!(report.full_accuracy, 1.0);
        assert!(report.per_record[0].sketch_hit && report.per_record[0].full_hit);
    }

    #[test]
    fn leaf_change_keeps_sketch_hit_only() {
        let reg = reg();
        let gold = example_lf();
        let tweaked = parse_lf(
            "eq { avg { filter_str_eq { all_rows ; result ; w } ; attendance } ; 52501 }",
            &reg,
        )
        .unwrap();
        let report = score_accuracy(&[tweaked], &[vec![gold]]).unwrap();
        assert_eq!(report.sketch_accuracy, 1.0);
        assert_eq!(report.full_accuracy, 0.0);
    }

    #[test]
    fn any_reference_counts() {
        let reg = reg();
        let a = parse_lf("eq { count { all_rows } ; 5 }", &reg).unwrap();
        let b = parse_lf("eq { count { all_rows } ; 6 }", &reg).unwrap();
        let report = score_accuracy(std::slice::from_ref(&b), &[vec![a, b.clone()]]).unwrap();
        assert_eq!(report.full_accuracy, 1.0);
    }

    #[test]
    fn misaligned_inputs_error() {
        let lf = example_lf();
        assert_eq!(
            score_accuracy(&[lf], &[]),
            Err(EvalError::LengthMismatch {
                predictions: 1,
                references: 0
            })
        );
    }

    #[test]
    fn full_hits_never_exceed_sketch_hits_under_perturbation() {
        let reg = reg();
        let cfg = SampleConfig::default();
        let mut rng = StdRng::seed_from_u64(5150);
        let mut predictions = Vec::new();
        let mut references = Vec::new();
        for _ in 0..1000 {
            let gold = sample_lf(&mut rng, &reg, &cfg);
            let mut pred = gold.clone();
            perturb(&mut pred.root, &mut rng);
            predictions.push(pred);
            references.push(vec![gold]);
        }
        let report = score_accuracy(&predictions, &references).unwrap();
        assert!(report.full_accuracy <= report.sketch_accuracy);
        for r in &report.per_record {
            assert!(!r.full_hit || r.sketch_hit);
        }
    }

    /// Randomly rewrite one leaf (half the time) so some predictions keep
    /// only the skeleton and some stay exact.
    fn perturb(node: &mut LfNode, rng: &mut StdRng) {
        if rng.gen_bool(0.5) {
            return;
        }
        let mut leaves: Vec<*mut LfNode> = Vec::new();
        fn collect(n: &mut LfNode, out: &mut Vec<*mut LfNode>) {
            match n {
                LfNode::Rule { children, .. } => {
                    for c in children {
                        collect(c, out);
                    }
                }
                other => out.push(other as *mut LfNode),
            }
        }
        collect(node, &mut leaves);
        if let Some(&leaf) = leaves.as_slice().choose(rng) {
            // Safety: pointers collected from one exclusive borrow, used once.
            unsafe {
                match &mut *leaf {
                    LfNode::Column(c) => c.push_str(" tweaked"),
                    LfNode::Value(v) => v.push_str(" tweaked"),
                    LfNode::Index(i) => *i = i.saturating_add(1),
                    LfNode::Rule { .. } => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn execution_rate_counts_and_logs() {
        let reg = reg();
        let table = example_table();
        let truthy = example_lf();
        let falsy = parse_lf("eq { count { all_rows } ; 6 }", &reg).unwrap();
        let broken = parse_lf(
            "eq { avg { all_rows ; attendance } ; 1 }",
            &reg,
        )
        .unwrap();
        let report = execution_rate(
            &[
                (truthy, table.clone()),
                (falsy, table.clone()),
                (broken, table),
            ],
            &reg,
            &ExecConfig::default(),
        );
        assert_eq!(report.n, 3);
        assert_eq!(report.true_count, 1);
        assert_eq!(report.rate, Some(1.0 / 3.0));
        assert_eq!(report.failures.len(), 2);
        assert_eq!(report.failures[0].path, NodePath::root());
    }

    #[test]
    fn empty_batch_is_undefined_not_perfect() {
        let reg = reg();
        let report = execution_rate(&[], &reg, &ExecConfig::default());
        assert_eq!(report.rate, None);
        assert_eq!(report.n, 0);
    }

    #[test]
    fn ablation_grid_runs_and_keeps_shape() {
        let reg = reg();
        let records = vec![(example_lf(), example_table())];
        let subsets = vec![
            vec![],
            vec![CsCategory::Tab],
            vec![CsCategory::Tab, CsCategory::Inf, CsCategory::Aux],
        ];
        let base = SearchConfig {
            beam_size: 32,
            max_steps: 4,
            max_sketch_depth: 2,
            ..SearchConfig::default()
        };
        let rows = ablation_table(&records, &subsets, &[true, false], &reg, &base);
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert_eq!(row.report.n, 1);
            assert!(row.report.full_accuracy <= row.report.sketch_accuracy);
        }
        serde_json::to_string(&rows).unwrap();
    }
}
