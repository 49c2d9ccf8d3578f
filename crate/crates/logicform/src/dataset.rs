//! Loading table/sentence/logic records from JSON files.
//!
//! Records carry a caption (`topic`), column names (`table_header`), cell
//! rows (`table_cont`), a reference sentence (`sent`) and the legacy logic
//! string (`logic_str`), which usually ends in an `= true` marker. Unknown
//! extra fields are ignored. A path may be a single JSON array or a
//! directory holding `train.json`, `valid.json` and `test.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legacy::strip_true_suffix;
use crate::table::{Table, TableError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn from_stem(stem: &str) -> Option<Split> {
        match stem.to_lowercase().as_str() {
            "train" => Some(Split::Train),
            "valid" | "val" | "dev" => Some(Split::Valid),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetRecord {
    pub caption: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub sentence: String,
    /// The logic string exactly as stored in the file.
    pub logic_str: String,
    /// Whether the stored string carried a trailing `= true` marker.
    pub had_true_suffix: bool,
    pub split: Option<Split>,
}

impl DatasetRecord {
    /// Logic text with any trailing `= true` marker removed.
    pub fn logic_text(&self) -> &str {
        strip_true_suffix(&self.logic_str).0
    }

    pub fn table(&self) -> Result<Table, TableError> {
        Table::new(
            self.caption.clone(),
            self.columns.clone(),
            self.rows.clone(),
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &DatasetRecord> {
        self.records
            .iter()
            .filter(move |r| r.split == Some(split))
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        let mut out = [0usize; 3];
        for r in &self.records {
            match r.split {
                Some(Split::Train) => out[0] += 1,
                Some(Split::Valid) => out[1] += 1,
                Some(Split::Test) => out[2] += 1,
                None => {}
            }
        }
        out
    }

    /// Records of the given split, or all records when none are tagged
    /// (single-file datasets).
    pub fn split_or_all(&self, split: Split) -> Vec<&DatasetRecord> {
        let tagged: Vec<&DatasetRecord> = self.split(split).collect();
        if tagged.is_empty() && self.records.iter().all(|r| r.split.is_none()) {
            self.records.iter().collect()
        } else {
            tagged
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: record {index}: {message}")]
    MalformedRecord {
        path: PathBuf,
        index: usize,
        message: String,
    },
    #[error("{path}: no dataset files found (expected train.json, valid.json, test.json)")]
    NoSplits { path: PathBuf },
}

#[derive(Deserialize)]
struct RawRecord {
    topic: String,
    table_header: Vec<String>,
    table_cont: Vec<Vec<String>>,
    sent: String,
    logic_str: String,
}

fn load_file(path: &Path, split: Option<Split>) -> Result<Vec<DatasetRecord>, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: Vec<serde_json::Value> =
        serde_json::from_str(&text).map_err(|source| DatasetError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    let mut out = Vec::with_capacity(raw.len());
    for (index, value) in raw.into_iter().enumerate() {
        let rec: RawRecord =
            serde_json::from_value(value).map_err(|e| DatasetError::MalformedRecord {
                path: path.to_path_buf(),
                index,
                message: e.to_string(),
            })?;
        let ncols = rec.table_header.len();
        if let Some(bad) = rec.table_cont.iter().position(|r| r.len() != ncols) {
            return Err(DatasetError::MalformedRecord {
                path: path.to_path_buf(),
                index,
                message: format!(
                    "row {bad} has {} cells, expected {ncols}",
                    rec.table_cont[bad].len()
                ),
            });
        }
        let (_, had_true_suffix) = strip_true_suffix(&rec.logic_str);
        out.push(DatasetRecord {
            caption: rec.topic,
            columns: rec.table_header,
            rows: rec.table_cont,
            sentence: rec.sent,
            logic_str: rec.logic_str,
            had_true_suffix,
            split,
        });
    }
    Ok(out)
}

/// Load a dataset from a JSON file or a directory of split files. A file
/// named after a split tags its records accordingly.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    if path.is_dir() {
        let mut records = Vec::new();
        let mut found = false;
        for (names, split) in [
            (&["train.json"][..], Split::Train),
            (&["valid.json", "val.json", "dev.json"][..], Split::Valid),
            (&["test.json"][..], Split::Test),
        ] {
            for name in names {
                let file = path.join(name);
                if file.is_file() {
                    records.extend(load_file(&file, Some(split))?);
                    found = true;
                    break;
                }
            }
        }
        if !found {
            return Err(DatasetError::NoSplits {
                path: path.to_path_buf(),
            });
        }
        Ok(Dataset { records })
    } else {
        let split = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(Split::from_stem);
        Ok(Dataset {
            records: load_file(path, split)?,
        })
    }
}
