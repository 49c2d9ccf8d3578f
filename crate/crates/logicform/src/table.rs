//! Tables and the cell coercion rules shared by execution, legacy
//! conversion and content-selection tagging.
//!
//! Cells are stored as raw strings; every consumer that needs a number, a
//! date or a comparable string goes through the same coercion functions so
//! the whole pipeline agrees on what a cell "is".

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A relational table: caption, column names and string-valued cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub caption: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("row {row} has {got} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
}

impl Table {
    pub fn new(
        caption: impl Into<String>,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<Table, TableError> {
        let expected = columns.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != expected {
                return Err(TableError::RaggedRow {
                    row: i,
                    expected,
                    got: row.len(),
                });
            }
        }
        Ok(Table {
            caption: caption.into(),
            columns,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Resolve a column name: exact match first, then whitespace-collapsed
    /// case-insensitive match.
    pub fn col_index(&self, name: &str) -> Result<usize, TableError> {
        if let Some(i) = self.columns.iter().position(|c| c == name) {
            return Ok(i);
        }
        let want = normalize_text(name);
        self.columns
            .iter()
            .position(|c| normalize_text(c) == want)
            .ok_or_else(|| TableError::UnknownColumn(name.to_string()))
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.rows[row][col]
    }

    /// Cells of one column, top to bottom.
    pub fn column_values(&self, col: usize) -> impl Iterator<Item = &str> {
        self.rows.iter().map(move |r| r[col].as_str())
    }
}

/// A cell interpreted for comparison. `Text` holds the whitespace-collapsed
/// lowercase form; raw text stays in the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TypedValue {
    Num(f64),
    Date(NaiveDate),
    Text(String),
}

impl TypedValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            TypedValue::Num(_) => "number",
            TypedValue::Date(_) => "date",
            TypedValue::Text(_) => "text",
        }
    }
}

impl std::fmt::Display for TypedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypedValue::Num(v) => f.write_str(&format_number(*v)),
            TypedValue::Date(d) => write!(f, "{d}"),
            TypedValue::Text(s) => f.write_str(s),
        }
    }
}

/// Collapse runs of whitespace to single spaces and lowercase.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut first = true;
    for word in s.split_whitespace() {
        if !first {
            out.push(' ');
        }
        for c in word.chars() {
            out.extend(c.to_lowercase());
        }
        first = false;
    }
    out
}

/// Render a float without a trailing `.0` when it is integral.
pub fn format_number(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Parse a cell that is a number in its entirety: optional sign, digits with
/// optional comma thousands grouping, optional decimal part, optional
/// trailing percent sign (which does not rescale the value).
pub fn parse_numeric_cell(s: &str) -> Option<f64> {
    let t = s.trim();
    let t = match t.strip_suffix('%') {
        Some(p) => p.trim_end(),
        None => t,
    };
    if t.is_empty() {
        return None;
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (rest, None),
    };
    if let Some(f) = frac_part {
        if !f.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
    }
    let digits = if int_part.contains(',') {
        let groups: Vec<&str> = int_part.split(',').collect();
        let head = groups[0];
        if head.is_empty() || head.len() > 3 || !head.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        if groups[1..]
            .iter()
            .any(|g| g.len() != 3 || !g.chars().all(|c| c.is_ascii_digit()))
        {
            return None;
        }
        groups.concat()
    } else {
        if !int_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        int_part.to_string()
    };
    if digits.is_empty() && frac_part.is_none_or(str::is_empty) {
        return None;
    }
    let text = match frac_part {
        Some(f) if !f.is_empty() => format!("{digits}.{f}"),
        _ => digits,
    };
    text.parse::<f64>().ok().map(|v| sign * v)
}

/// Numeric reading of a cell in a numeric context. Whole-cell parse first;
/// failing that, the first maximal digit run with an optional decimal part
/// (so `w 23-17` reads as 23).
pub fn extract_number(s: &str) -> Option<f64> {
    if let Some(v) = parse_numeric_cell(s) {
        return Some(v);
    }
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let tok: String = chars[start..i].iter().collect();
            return tok.parse().ok();
        }
        i += 1;
    }
    None
}

fn month_number(tok: &str) -> Option<u32> {
    const MONTHS: [(&str, &str, u32); 12] = [
        ("january", "jan", 1),
        ("february", "feb", 2),
        ("march", "mar", 3),
        ("april", "apr", 4),
        ("may", "may", 5),
        ("june", "jun", 6),
        ("july", "jul", 7),
        ("august", "aug", 8),
        ("september", "sep", 9),
        ("october", "oct", 10),
        ("november", "nov", 11),
        ("december", "dec", 12),
    ];
    let t = tok.to_lowercase();
    let t = t.trim_end_matches('.');
    for (full, short, n) in MONTHS {
        if t == full || t == short || (n == 9 && t == "sept") {
            return Some(n);
        }
    }
    None
}

fn parse_day(tok: &str) -> Option<u32> {
    if tok.is_empty() || tok.len() > 2 || !tok.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let d: u32 = tok.parse().ok()?;
    (1..=31).contains(&d).then_some(d)
}

fn parse_year(tok: &str) -> Option<i32> {
    if tok.len() != 4 || !tok.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    tok.parse().ok()
}

/// Year used for month-day cells that carry no year of their own, so they
/// still order correctly against each other (leap year, so feb 29 parses).
const PLACEHOLDER_YEAR: i32 = 2000;

/// Parse a cell as a calendar date. Recognized shapes: `1979-11-04`,
/// `november 4 1979` (optional comma), `4 november 1979`, `november 1979`
/// and `november 4`. Bare years are numbers, not dates.
pub fn parse_date_cell(s: &str) -> Option<NaiveDate> {
    let t = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
        return Some(d);
    }
    let cleaned = t.replace(',', " ");
    let toks: Vec<&str> = cleaned.split_whitespace().collect();
    match toks.as_slice() {
        [a, b] => {
            if let (Some(m), Some(d)) = (month_number(a), parse_day(b)) {
                return NaiveDate::from_ymd_opt(PLACEHOLDER_YEAR, m, d);
            }
            if let (Some(m), Some(y)) = (month_number(a), parse_year(b)) {
                return NaiveDate::from_ymd_opt(y, m, 1);
            }
            None
        }
        [a, b, c] => {
            if let (Some(m), Some(d), Some(y)) = (month_number(a), parse_day(b), parse_year(c)) {
                return NaiveDate::from_ymd_opt(y, m, d);
            }
            if let (Some(d), Some(m), Some(y)) = (parse_day(a), month_number(b), parse_year(c)) {
                return NaiveDate::from_ymd_opt(y, m, d);
            }
            None
        }
        _ => None,
    }
}

/// Interpret a cell: number first, then date, otherwise normalized text.
pub fn coerce_cell(s: &str) -> TypedValue {
    if let Some(v) = parse_numeric_cell(s) {
        return TypedValue::Num(v);
    }
    if let Some(d) = parse_date_cell(s) {
        return TypedValue::Date(d);
    }
    TypedValue::Text(normalize_text(s))
}
