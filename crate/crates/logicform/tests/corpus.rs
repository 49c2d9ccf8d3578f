use logicform::{
    convert_legacy, cs_distribution, execute, extract_cs, load_dataset, strip_true_suffix,
    ExecConfig, GrammarRegistry,
};
use std::path::Path;

#[test]
fn bundled_corpus_pipeline() {
    let reg = GrammarRegistry::default_registry();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/sample50.json");
    let ds = load_dataset(&path).expect("fixture loads");
    assert_eq!(ds.len(), 50);

    let mut reports = Vec::new();
    let mut hop_first = 0usize;
    let mut true_count = 0usize;
    for rec in &ds.records {
        assert!(rec.had_true_suffix, "{}", rec.logic_str);
        let table = rec.table().expect("table builds");
        let (text, stripped) = strip_true_suffix(&rec.logic_str);
        assert!(stripped);
        let (lf, report) = convert_legacy(text, Some(&table), &reg)
            .unwrap_or_else(|e| panic!("convert {}: {e}", rec.logic_str));
        assert!(report.warnings.is_empty(), "warnings for {}", rec.logic_str);
        if report.has_hop_first() {
            hop_first += 1;
        }
        // Idempotence: converting the fixed text changes nothing.
        let (lf2, r2) = convert_legacy(&lf.to_text(), Some(&table), &reg).expect("reconvert");
        assert_eq!(lf2.to_text(), lf.to_text());
        assert!(r2.rewrites.is_empty(), "second pass rewrote {}", lf.to_text());

        let verdict = execute(&lf, &table, &reg, &ExecConfig::default())
            .unwrap_or_else(|e| panic!("exec {}: {e}", lf.to_text()));
        if verdict {
            true_count += 1;
        } else {
            panic!("false statement: {}", lf.to_text());
        }
        let cs = extract_cs(&lf, &table, &reg, &ExecConfig::default());
        assert!(cs.warnings.is_empty(), "cs warnings for {}", lf.to_text());
        reports.push(cs);
    }
    assert_eq!(true_count, 50);
    assert_eq!(hop_first, 12, "hop rewrites over views");

    let dist = cs_distribution(&reports);
    assert_eq!((dist.tab, dist.inf, dist.aux), (72, 21, 7));
}
