//! One JSON object per line, in the public TACRED field convention:
//!
//! ```text
//! {"id": "e1", "token": ["Mark", "Twain", "was", "born", "in", "Florida", "."],
//!  "subj_start": 0, "subj_end": 1, "obj_start": 5, "obj_end": 5,
//!  "relation": "per:stateorprovince_of_birth"}
//! ```
//!
//! End indices are inclusive on disk and half-open in memory. Unknown fields
//! are ignored; blank lines are skipped.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Dataset, Instance, Span};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    token: Vec<String>,
    subj_start: i64,
    subj_end: i64,
    obj_start: i64,
    obj_end: i64,
    relation: String,
}

fn span(role: &str, start: i64, end: i64, line: usize) -> Result<Span, CorpusError> {
    if start < 0 || end < start {
        return Err(CorpusError::Line {
            line,
            message: format!("{role}_end {end} is before {role}_start {start}"),
        });
    }
    Ok(Span::new(start as usize, end as usize + 1))
}

/// Parses JSONL text. `split` names the resulting dataset.
pub fn parse_jsonl(text: &str, split: &str) -> Result<Dataset, CorpusError> {
    let mut instances = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let r: Record = serde_json::from_str(raw).map_err(|e| CorpusError::Line {
            line,
            message: e.to_string(),
        })?;
        let inst = Instance::new(
            r.id,
            r.token,
            span("subj", r.subj_start, r.subj_end, line)?,
            span("obj", r.obj_start, r.obj_end, line)?,
            r.relation,
        );
        inst.check().map_err(|e| CorpusError::Line {
            line,
            message: e.to_string(),
        })?;
        instances.push(inst);
    }
    Ok(Dataset::from_instances(split, instances))
}

/// Reads a JSONL file; the split is named after the file stem.
pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Dataset, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let split = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_jsonl(&text, &split)
}

/// Serializes a dataset, one instance per line, LF endings.
pub fn to_jsonl(dataset: &Dataset) -> String {
    let mut out = String::new();
    for inst in &dataset.instances {
        let r = Record {
            id: inst.id.clone(),
            token: inst.tokens.clone(),
            subj_start: inst.subj.start as i64,
            subj_end: inst.subj.end as i64 - 1,
            obj_start: inst.obj.start as i64,
            obj_end: inst.obj.end as i64 - 1,
            relation: inst.label.clone(),
        };
        out.push_str(&serde_json::to_string(&r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, to_jsonl(dataset)).map_err(|source| CorpusError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = r#"{"id":"a","token":["Mark","Twain","was","born","in","Florida","."],"subj_start":0,"subj_end":1,"obj_start":5,"obj_end":5,"relation":"per:stateorprovince_of_birth"}
{"id":"b","token":["Acme","hired","Bob"],"subj_start":2,"subj_end":2,"obj_start":0,"obj_end":0,"relation":"per:employee_of"}

{"id":"c","token":["x","y"],"subj_start":0,"subj_end":0,"obj_start":1,"obj_end":1,"relation":"no_relation","stanford_pos":["NN","NN"]}
"#;

    #[test]
    fn reads_three_lines_with_extras() {
        let d = parse_jsonl(THREE, "train").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.instances[0].subj, Span::new(0, 2));
        assert_eq!(d.instances[0].obj, Span::new(5, 6));
        assert_eq!(
            d.classes,
            ["per:stateorprovince_of_birth", "per:employee_of", "no_relation"]
        );
    }

    #[test]
    fn reversed_span_names_line() {
        let bad = THREE.replace(r#""subj_start":2,"subj_end":2"#, r#""subj_start":2,"subj_end":1"#);
        let err = parse_jsonl(&bad, "x").unwrap_err();
        assert!(matches!(err, CorpusError::Line { line: 2, .. }), "{err}");
        assert!(err.to_string().starts_with("line 2:"));
    }

    #[test]
    fn missing_field_and_bounds() {
        let err = parse_jsonl(r#"{"id":"a","token":["x"],"subj_start":0,"subj_end":0,"obj_start":0}"#, "x")
            .unwrap_err();
        assert!(err.to_string().contains("obj_end"), "{err}");
        let err = parse_jsonl(
            r#"{"id":"a","token":["x","y"],"subj_start":0,"subj_end":0,"obj_start":1,"obj_end":4,"relation":"r"}"#,
            "x",
        )
        .unwrap_err();
        assert!(err.to_string().contains("out of bounds"), "{err}");
    }

    #[test]
    fn round_trip() {
        let d = parse_jsonl(THREE, "train").unwrap();
        assert_eq!(parse_jsonl(&to_jsonl(&d), "train").unwrap(), d);
    }

    #[test]
    fn unreadable_file_names_path() {
        let err = load_jsonl("/nonexistent/dir/train.jsonl").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/train.jsonl"));
    }
}
