//! `logicform` — command-line front end for parsing, checking, executing,
//! converting, mining and scoring logical forms over tables.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 success, 1 domain failure (bad input data, failed checks), 2 usage.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use logicform::{
    convert_legacy, cs_distribution, execute, execute_traced, extract_cs, fleiss_kappa, generate,
    load_dataset, parse_lf, score_accuracy, serialize_lf, strip_true_suffix, validate, CsCategory,
    CsReport, Dataset, DatasetRecord, EmptyViewPolicy, ExecConfig, GrammarRegistry, LogicalForm,
    RatingMatrix, ScoreWeights, SearchConfig, Table,
};

#[derive(Parser)]
#[command(name = "logicform", version, about = "Logical forms over tables: parse, execute, mine, score")]
struct Cli {
    /// JSON config file; flags override it, it overrides built-in defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Write data output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Relative tolerance for approximate numeric equality.
    #[arg(long, global = true, value_name = "T")]
    tolerance: Option<f64>,

    /// Beam width for generation.
    #[arg(long, global = true, value_name = "N")]
    beam_size: Option<usize>,

    /// Maximum sketch depth for generation.
    #[arg(long, global = true, value_name = "D")]
    max_depth: Option<usize>,

    /// Keep candidates that execute to false (disable rejection).
    #[arg(long, global = true)]
    no_fcr: bool,

    /// Random seed recorded in the effective configuration.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Value classes to use where a command consumes extracted values
    /// (repeatable); default: all three.
    #[arg(long = "cs", global = true, value_enum, value_name = "CLASS")]
    cs: Vec<CsFlag>,

    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CsFlag {
    Tab,
    Inf,
    Aux,
}

impl From<CsFlag> for CsCategory {
    fn from(f: CsFlag) -> CsCategory {
        match f {
            CsFlag::Tab => CsCategory::Tab,
            CsFlag::Inf => CsCategory::Inf,
            CsFlag::Aux => CsCategory::Aux,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a logical form, check it, and print its canonical text.
    Parse {
        /// Logical form text (modern surface syntax).
        #[arg(long)]
        lf: String,
        /// Optional table to check column names and ordinals against.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
    },
    /// Check a logical form; print the JSON list of violations.
    Check {
        #[arg(long)]
        lf: String,
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
    },
    /// Execute a statement against a table and print `true` or `false`.
    Execute {
        #[arg(long)]
        lf: String,
        #[arg(long, value_name = "FILE")]
        table: PathBuf,
        /// Print a JSON path→value map of every node instead of the verdict.
        #[arg(long)]
        trace: bool,
    },
    /// Convert legacy logic strings to the disambiguated surface form.
    Convert {
        /// A single legacy string (may carry a trailing `= true`).
        #[arg(long, conflicts_with = "dataset")]
        lf: Option<String>,
        /// Convert every record of a dataset; prints JSON lines.
        #[arg(long, value_name = "FILE")]
        dataset: Option<PathBuf>,
    },
    /// List the values a statement talks about, classified per occurrence.
    ExtractCs {
        #[arg(long)]
        lf: String,
        #[arg(long, value_name = "FILE")]
        table: PathBuf,
    },
    /// Corpus statistics: splits, conversion, execution rate, value classes.
    Stats {
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,
    },
    /// Search a table for statements that hold on it.
    Generate {
        /// Table to mine; alternative to --dataset/--index.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["dataset", "index"])]
        table: Option<PathBuf>,
        /// Dataset whose record supplies both table and gold values.
        #[arg(long, value_name = "FILE", requires = "index")]
        dataset: Option<PathBuf>,
        /// Record position within the dataset.
        #[arg(long, value_name = "I")]
        index: Option<usize>,
        /// Gold statement whose extracted values seed the search.
        #[arg(long)]
        lf: Option<String>,
        /// How many ranked candidates to print (default 10).
        #[arg(long, value_name = "N")]
        top: Option<usize>,
    },
    /// Score predicted logical forms against a dataset's gold ones.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,
        /// JSON array of predicted LF texts, aligned with the dataset.
        #[arg(long, value_name = "FILE")]
        predictions: PathBuf,
        /// Include the per-record hit table in the report.
        #[arg(long)]
        per_record: bool,
    },
    /// Fleiss' kappa of a JSON rating matrix (items × categories counts).
    Kappa {
        #[arg(long, value_name = "FILE")]
        matrix: PathBuf,
        /// Drop items on which no two raters agree before scoring.
        #[arg(long)]
        drop_disagreement: bool,
    },
}

/// Optional overrides read from `--config`; unknown keys are errors.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    eq_eps: Option<f64>,
    tolerance: Option<f64>,
    empty_view: Option<EmptyViewPolicy>,
    beam_size: Option<usize>,
    max_steps: Option<usize>,
    max_depth: Option<usize>,
    fcr: Option<bool>,
    require_cs_values: Option<bool>,
    weights: Option<ScoreWeights>,
    seed: Option<u64>,
}

/// Fully resolved settings: flags > config file > defaults.
#[derive(Serialize)]
struct Effective {
    exec: ExecConfig,
    search: SearchConfig,
    seed: u64,
}

fn resolve_config(cli: &Cli) -> Result<Effective> {
    let mut exec = ExecConfig::default();
    let mut search = SearchConfig::default();
    let mut seed = 0u64;
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let file: FileConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(v) = file.eq_eps {
            exec.eq_eps = v;
        }
        if let Some(v) = file.tolerance {
            exec.round_tolerance = v;
        }
        if let Some(v) = file.empty_view {
            exec.empty_view = v;
        }
        if let Some(v) = file.beam_size {
            search.beam_size = v;
        }
        if let Some(v) = file.max_steps {
            search.max_steps = v;
        }
        if let Some(v) = file.max_depth {
            search.max_sketch_depth = v;
        }
        if let Some(v) = file.fcr {
            search.use_fcr = v;
        }
        if let Some(v) = file.require_cs_values {
            search.require_cs_values = v;
        }
        if let Some(v) = file.weights {
            search.weights = v;
        }
        if let Some(v) = file.seed {
            seed = v;
        }
    }
    if let Some(v) = cli.tolerance {
        exec.round_tolerance = v;
    }
    if let Some(v) = cli.beam_size {
        search.beam_size = v;
    }
    if let Some(v) = cli.max_depth {
        search.max_sketch_depth = v;
    }
    if cli.no_fcr {
        search.use_fcr = false;
    }
    if let Some(v) = cli.seed {
        seed = v;
    }
    search.exec = exec.clone();
    Ok(Effective { exec, search, seed })
}

/// Data sink: `--out` file or stdout.
struct Out {
    sink: Box<dyn Write>,
}

impl Out {
    fn open(path: Option<&PathBuf>) -> Result<Out> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(
                fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            ),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Out { sink })
    }

    fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.sink, "{}", text.as_ref())?;
        Ok(())
    }

    fn json(&mut self, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        writeln!(self.sink, "{text}")?;
        Ok(())
    }
}

/// Accept a table file either in the dataset record shape or as a minimal
/// `{caption, columns, rows}` object.
fn read_table(path: &PathBuf) -> Result<Table> {
    #[derive(Deserialize)]
    struct Minimal {
        #[serde(default)]
        caption: String,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    }
    #[derive(Deserialize)]
    struct RecordShape {
        #[serde(default)]
        topic: String,
        table_header: Vec<String>,
        table_cont: Vec<Vec<String>>,
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("reading table {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing table {}", path.display()))?;
    let table = if value.get("columns").is_some() {
        let m: Minimal = serde_json::from_value(value)?;
        Table::new(m.caption, m.columns, m.rows)?
    } else {
        let r: RecordShape = serde_json::from_value(value)
            .with_context(|| "table file has neither `columns` nor `table_header`")?;
        Table::new(r.topic, r.table_header, r.table_cont)?
    };
    Ok(table)
}

fn parse_checked(
    text: &str,
    table: Option<&Table>,
    reg: &GrammarRegistry,
) -> Result<LogicalForm> {
    let lf = parse_lf(text, reg).map_err(|e| anyhow!("{e}"))?;
    let violations = validate(&lf, reg, table);
    if let Some(first) = violations.first() {
        bail!("{first}");
    }
    Ok(lf)
}

/// Gold LF of a record: strip any `= true` marker, convert the legacy
/// surface, parse. Conversion is a no-op on already-modern text.
fn gold_lf(record: &DatasetRecord, reg: &Arc<GrammarRegistry>) -> Result<LogicalForm> {
    let table = record.table()?;
    let (lf, _) = convert_legacy(record.logic_text(), Some(&table), reg)?;
    Ok(lf)
}

fn selected_categories(cli: &Cli) -> Vec<CsCategory> {
    if cli.cs.is_empty() {
        vec![CsCategory::Tab, CsCategory::Inf, CsCategory::Aux]
    } else {
        cli.cs.iter().copied().map(CsCategory::from).collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.cmd.is_none() && !cli.print_config {
        let mut usage = <Cli as clap::CommandFactory>::command();
        eprintln!("{}", usage.render_usage());
        eprintln!("run with --help for the subcommand list");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let effective = resolve_config(&cli)?;
    let mut out = Out::open(cli.out.as_ref())?;
    if cli.print_config {
        return out.json(&effective);
    }
    let Some(cmd) = &cli.cmd else {
        // Reached only via --print-config above; guarded in main otherwise.
        bail!("a subcommand is required");
    };
    let reg = GrammarRegistry::default_registry();
    match cmd {
        Cmd::Parse { lf, table } => {
            let table = table.as_ref().map(read_table).transpose()?;
            let parsed = parse_checked(lf, table.as_ref(), &reg)?;
            out.line(serialize_lf(&parsed))?;
        }
        Cmd::Check { lf, table } => {
            let table = table.as_ref().map(read_table).transpose()?;
            let parsed = parse_lf(lf, &reg).map_err(|e| anyhow!("{e}"))?;
            let violations = validate(&parsed, &reg, table.as_ref());
            let texts: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            out.json(&texts)?;
            if !texts.is_empty() {
                bail!("{} violation(s)", texts.len());
            }
        }
        Cmd::Execute { lf, table, trace } => {
            let table = read_table(table)?;
            let parsed = parse_checked(lf, Some(&table), &reg)?;
            if *trace {
                let (verdict, trace) =
                    execute_traced(&parsed, &table, &reg, &effective.exec)?;
                let map: std::collections::BTreeMap<String, String> = trace
                    .iter()
                    .map(|(path, value)| (path.to_string(), value.clone()))
                    .collect();
                out.json(&serde_json::json!({ "verdict": verdict, "nodes": map }))?;
            } else {
                let verdict = execute(&parsed, &table, &reg, &effective.exec)?;
                out.line(verdict.to_string())?;
            }
        }
        Cmd::Convert { lf, dataset } => match (lf, dataset) {
            (Some(text), None) => {
                // Without a table, ambiguous literals fall back to the
                // string-semantics twin.
                let (lf, _) = convert_legacy(text, None, &reg)?;
                out.line(serialize_lf(&lf))?;
            }
            (None, Some(path)) => {
                let ds = load_dataset(path)?;
                let mut hop_first = 0usize;
                for (index, record) in ds.records.iter().enumerate() {
                    let table = record.table()?;
                    let (lf, report) = convert_legacy(record.logic_text(), Some(&table), &reg)
                        .with_context(|| format!("record {index}"))?;
                    hop_first += usize::from(report.has_hop_first());
                    for warning in &report.warnings {
                        eprintln!("record {index}: {warning}");
                    }
                    out.line(serde_json::to_string(&serde_json::json!({
                        "index": index,
                        "text": serialize_lf(&lf),
                        "hop_first": report.has_hop_first(),
                    }))?)?;
                }
                eprintln!(
                    "converted {} records, {} with a first-row rewrite",
                    ds.records.len(),
                    hop_first
                );
            }
            _ => bail!("convert needs exactly one of --lf or --dataset"),
        },
        Cmd::ExtractCs { lf, table } => {
            let table = read_table(table)?;
            let parsed = parse_checked(lf, Some(&table), &reg)?;
            let report = extract_cs(&parsed, &table, &reg, &effective.exec);
            for warning in &report.warnings {
                eprintln!("{warning}");
            }
            let keep = selected_categories(&cli);
            let filtered = CsReport {
                values: report
                    .values
                    .into_iter()
                    .filter(|v| keep.contains(&v.category))
                    .collect(),
                warnings: vec![],
            };
            out.json(&filtered.values)?;
        }
        Cmd::Stats { dataset } => {
            let ds = load_dataset(dataset)?;
            out.json(&corpus_stats(&ds, &reg, &effective)?)?;
        }
        Cmd::Generate {
            table,
            dataset,
            index,
            lf,
            top,
        } => {
            let (table, gold) = match (table, dataset) {
                (Some(path), None) => {
                    let table = read_table(path)?;
                    let gold = lf
                        .as_ref()
                        .map(|text| convert_legacy(text, Some(&table), &reg).map(|(lf, _)| lf))
                        .transpose()?;
                    (table, gold)
                }
                (None, Some(path)) => {
                    let ds = load_dataset(path)?;
                    let index = index.expect("clap enforces --index with --dataset");
                    let record = ds
                        .records
                        .get(index)
                        .ok_or_else(|| anyhow!("record {index} out of range (0..{})", ds.len()))?;
                    (record.table()?, Some(gold_lf(record, &reg)?))
                }
                _ => bail!("generate needs exactly one of --table or --dataset with --index"),
            };
            let keep = selected_categories(&cli);
            let values = match &gold {
                Some(g) => extract_cs(g, &table, &reg, &effective.exec)
                    .values
                    .into_iter()
                    .filter(|v| keep.contains(&v.category))
                    .collect(),
                None => vec![],
            };
            let ranked = generate(&table, &values, &reg, &effective.search)
                .map_err(|e| anyhow!("{e}"))?;
            for (rank, candidate) in ranked.iter().take(top.unwrap_or(10)).enumerate() {
                out.line(serde_json::to_string(&serde_json::json!({
                    "rank": rank,
                    "score": candidate.score,
                    "text": serialize_lf(&candidate.lf),
                    "executes_true": candidate.executes_true,
                    "uses": candidate.uses_cs,
                }))?)?;
            }
        }
        Cmd::Evaluate {
            dataset,
            predictions,
            per_record,
        } => {
            let ds = load_dataset(dataset)?;
            let text = fs::read_to_string(predictions)
                .with_context(|| format!("reading predictions {}", predictions.display()))?;
            let texts: Vec<String> = serde_json::from_str(&text)
                .with_context(|| "predictions must be a JSON array of LF texts")?;
            let parsed: Vec<LogicalForm> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    parse_lf(strip_true_suffix(t).0, &reg)
                        .map_err(|e| anyhow!("prediction {i}: {e}"))
                })
                .collect::<Result<_>>()?;
            let references: Vec<Vec<LogicalForm>> = ds
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    gold_lf(r, &reg)
                        .map(|g| vec![g])
                        .map_err(|e| anyhow!("gold record {i}: {e}"))
                })
                .collect::<Result<_>>()?;
            let mut report = score_accuracy(&parsed, &references)?;
            if !per_record {
                report.per_record.clear();
            }
            out.json(&report)?;
        }
        Cmd::Kappa {
            matrix,
            drop_disagreement,
        } => {
            let text = fs::read_to_string(matrix)
                .with_context(|| format!("reading matrix {}", matrix.display()))?;
            let counts: Vec<Vec<u32>> = serde_json::from_str(&text)
                .with_context(|| "matrix must be a JSON array of per-item count rows")?;
            let mut m = RatingMatrix::new(counts)?;
            if *drop_disagreement {
                m = m.drop_full_disagreement()?;
            }
            out.line(format!("{}", fleiss_kappa(&m)?))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CorpusStats {
    records: usize,
    splits: std::collections::BTreeMap<String, usize>,
    parse_ok: usize,
    hop_first_records: usize,
    hop_first_rate: Option<f64>,
    execution: ExecStats,
    cs: CsStats,
}

#[derive(Serialize)]
struct ExecStats {
    n: usize,
    true_count: usize,
    rate: Option<f64>,
}

#[derive(Serialize)]
struct CsStats {
    tab: usize,
    inf: usize,
    aux: usize,
    percent: Option<[f64; 3]>,
}

fn corpus_stats(
    ds: &Dataset,
    reg: &Arc<GrammarRegistry>,
    effective: &Effective,
) -> Result<CorpusStats> {
    let mut splits = std::collections::BTreeMap::new();
    for record in &ds.records {
        if let Some(split) = record.split {
            *splits.entry(split.to_string()).or_insert(0) += 1;
        }
    }
    let mut parse_ok = 0usize;
    let mut hop_first_records = 0usize;
    let mut exec_n = 0usize;
    let mut exec_true = 0usize;
    let mut reports = Vec::new();
    for (index, record) in ds.records.iter().enumerate() {
        let table = match record.table() {
            Ok(t) => t,
            Err(e) => {
                eprintln!("record {index}: bad table: {e}");
                continue;
            }
        };
        let (lf, converted) = match convert_legacy(record.logic_text(), Some(&table), reg) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("record {index}: conversion failed: {e}");
                continue;
            }
        };
        parse_ok += 1;
        hop_first_records += usize::from(converted.has_hop_first());
        exec_n += 1;
        match execute(&lf, &table, reg, &effective.exec) {
            Ok(true) => exec_true += 1,
            Ok(false) => eprintln!("record {index}: executes to false at the root"),
            Err(e) => eprintln!("record {index}: {e}"),
        }
        reports.push(extract_cs(&lf, &table, reg, &effective.exec));
    }
    let dist = cs_distribution(&reports);
    Ok(CorpusStats {
        records: ds.records.len(),
        splits,
        parse_ok,
        hop_first_records,
        hop_first_rate: (parse_ok > 0).then(|| hop_first_records as f64 / parse_ok as f64),
        execution: ExecStats {
            n: exec_n,
            true_count: exec_true,
            rate: (exec_n > 0).then(|| exec_true as f64 / exec_n as f64),
        },
        cs: CsStats {
            tab: dist.tab,
            inf: dist.inf,
            aux: dist.aux,
            percent: dist.percentages(),
        },
    })
}
