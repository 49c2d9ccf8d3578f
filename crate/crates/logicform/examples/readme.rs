use logicform::{execute, parse_lf, ExecConfig, GrammarRegistry, Table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = GrammarRegistry::default_registry();
    let table = Table::new(
        "1979 philadelphia eagles season",
        vec!["opponent".into(), "result".into(), "attendance".into()],
        vec![
            vec!["new york giants".into(), "w 23-17".into(), "67000".into()],
            vec!["atlanta falcons".into(), "l 14-10".into(), "39700".into()],
        ],
    )?;
    let lf = parse_lf("most_str_eq { all_rows ; result ; w }", &reg)?;
    assert!(!execute(&lf, &table, &reg, &ExecConfig::default())?);
    Ok(())
}
