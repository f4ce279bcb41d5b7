use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// On-disk layouts accepted by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// One JSON object per line with `id`, `label` and optional `text`.
    Jsonl,
    /// Tab-separated with a header row: `id`, `label` and optionally `text`.
    Tsv,
}

impl DatasetFormat {
    /// Picks a format from the file extension; anything but `.jsonl`/`.json`
    /// is treated as TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => DatasetFormat::Jsonl,
            _ => DatasetFormat::Tsv,
        }
    }
}

/// A labeled sample: unique ids, one class label per id, optional raw texts.
///
/// The label set is kept in canonical (sorted) order and every sample also
/// carries its label as an index into that order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    ids: Vec<String>,
    labels: Vec<String>,
    texts: Option<Vec<String>>,
    classes: Vec<String>,
    codes: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(ids: Vec<String>, labels: Vec<String>, texts: Option<Vec<String>>) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} ids but {} labels",
                ids.len(),
                labels.len()
            )));
        }
        if let Some(t) = &texts {
            if t.len() != ids.len() {
                return Err(Error::Dimension(format!(
                    "{} ids but {} texts",
                    ids.len(),
                    t.len()
                )));
            }
        }
        if ids.len() < 2 {
            return Err(Error::invalid(format!(
                "a dataset needs at least 2 samples, got {}",
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }

        let classes: Vec<String> = labels
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if classes.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 distinct labels, found {}",
                classes.len()
            )));
        }
        let lookup: HashMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let codes = labels.iter().map(|l| lookup[l.as_str()]).collect();

        Ok(LabeledDataset {
            ids,
            labels,
            texts,
            classes,
            codes,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn texts(&self) -> Option<&[String]> {
        self.texts.as_deref()
    }

    /// Distinct labels, sorted.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Per-sample index into [`classes`](Self::classes).
    pub fn label_codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(label)).ok()
    }

    /// Number of samples carrying each class, in class order.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &c in &self.codes {
            counts[c] += 1;
        }
        counts
    }

    /// Rows `indices`, in the given order. Fails if the subset no longer
    /// satisfies the dataset invariants.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let pick = |v: &[String]| indices.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        LabeledDataset::new(
            pick(&self.ids),
            pick(&self.labels),
            self.texts.as_deref().map(pick),
        )
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    label: Option<String>,
    text: Option<String>,
}

pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        DatasetFormat::Jsonl => read_jsonl(reader, path),
        DatasetFormat::Tsv => read_tsv(reader, path),
    }
}

fn read_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<LabeledDataset> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut texts = Vec::new();
    let mut text_lines = 0usize;
    let mut first_missing_text = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let id = rec.id.ok_or(Error::MissingField {
            line: line_no,
            field: "id",
        })?;
        let label = rec.label.ok_or(Error::MissingField {
            line: line_no,
            field: "label",
        })?;
        match rec.text {
            Some(t) => {
                text_lines += 1;
                texts.push(t);
            }
            None => {
                first_missing_text.get_or_insert(line_no);
                texts.push(String::new());
            }
        }
        ids.push(id);
        labels.push(label);
    }

    let texts = match (text_lines, first_missing_text) {
        (0, _) => None,
        (_, None) => Some(texts),
        (_, Some(line)) => {
            return Err(Error::MissingField {
                line,
                field: "text",
            })
        }
    };
    LabeledDataset::new(ids, labels, texts)
}

fn read_tsv<R: BufRead>(reader: R, path: &Path) -> Result<LabeledDataset> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::invalid("empty TSV file (header row expected)")),
    };
    let columns: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    let with_text = match columns.as_slice() {
        ["id", "label"] => false,
        ["id", "label", "text"] => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `id\\tlabel[\\ttext]`, got `{header}`"),
            })
        }
    };

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut texts = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(if with_text { 3 } else { 2 }, '\t');
        let id = fields.next().unwrap_or_default();
        let label = fields.next().filter(|l| !l.is_empty()).ok_or(Error::MissingField {
            line: line_no,
            field: "label",
        })?;
        if id.is_empty() {
            return Err(Error::MissingField {
                line: line_no,
                field: "id",
            });
        }
        if with_text {
            texts.push(fields.next().unwrap_or_default().to_string());
        } else if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "more columns than the header declares".into(),
            });
        }
        ids.push(id.to_string());
        labels.push(label.to_string());
    }
    LabeledDataset::new(ids, labels, with_text.then_some(texts))
}

/// Writes the dataset as TSV with a header row. Texts are written when
/// present; tabs and newlines inside a text are replaced by spaces.
pub fn write_dataset_tsv<W: Write>(mut w: W, dataset: &LabeledDataset) -> std::io::Result<()> {
    match dataset.texts() {
        Some(texts) => {
            writeln!(w, "id\tlabel\ttext")?;
            for ((id, label), text) in dataset.ids().iter().zip(dataset.labels()).zip(texts) {
                let text: String = text
                    .chars()
                    .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
                    .collect();
                writeln!(w, "{id}\t{label}\t{text}")?;
            }
        }
        None => write_labels_tsv(w, dataset)?,
    }
    Ok(())
}

/// Label sidecar: `id<TAB>label` rows aligned with a vector file's row order.
pub fn write_labels_tsv<W: Write>(mut w: W, dataset: &LabeledDataset) -> std::io::Result<()> {
    writeln!(w, "id\tlabel")?;
    for (id, label) in dataset.ids().iter().zip(dataset.labels()) {
        writeln!(w, "{id}\t{label}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn jsonl(s: &str) -> Result<LabeledDataset> {
        read_jsonl(Cursor::new(s), Path::new("mem"))
    }

    fn tsv(s: &str) -> Result<LabeledDataset> {
        read_tsv(Cursor::new(s), Path::new("mem"))
    }

    #[test]
    fn four_line_jsonl() {
        let ds = jsonl(
            r#"{"id":"a","label":"pos"}
{"id":"b","label":"pos"}
{"id":"c","label":"neg"}
{"id":"d","label":"neg"}
"#,
        )
        .unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.classes(), &["neg".to_string(), "pos".to_string()]);
        assert_eq!(ds.label_codes(), &[1, 1, 0, 0]);
        assert!(ds.texts().is_none());
    }

    #[test]
    fn duplicate_id_is_named() {
        let err = jsonl(
            r#"{"id":"a","label":"x"}
{"id":"a","label":"y"}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, Error::DuplicateId(id) if id == "a"));
        assert!(err.to_string().contains("`a`"));
    }

    #[test]
    fn missing_label_reports_line() {
        let err = jsonl(
            r#"{"id":"a","label":"x"}

{"id":"b"}"#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::MissingField {
                line: 3,
                field: "label"
            }
        ));
    }

    #[test]
    fn single_label_rejected() {
        assert!(matches!(
            jsonl("{\"id\":\"a\",\"label\":\"x\"}\n{\"id\":\"b\",\"label\":\"x\"}"),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn partial_texts_rejected() {
        let err = jsonl(
            r#"{"id":"a","label":"x","text":"hi"}
{"id":"b","label":"y"}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingField { line: 2, field: "text" }));
    }

    #[test]
    fn tsv_with_and_without_text() {
        let ds = tsv("id\tlabel\ttext\n1\ta\thello world\n2\tb\t\n").unwrap();
        assert_eq!(ds.texts().unwrap(), &["hello world".to_string(), String::new()]);
        let ds = tsv("id\tlabel\n1\ta\n2\tb\n").unwrap();
        assert!(ds.texts().is_none());
        assert!(matches!(tsv("id\tlabel\n1\n2\tb\n"), Err(Error::MissingField { line: 2, .. })));
        assert!(matches!(tsv("ident\tlabel\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn subset_keeps_order_and_validates() {
        let ds = tsv("id\tlabel\na\tx\nb\ty\nc\tx\n").unwrap();
        let sub = ds.subset(&[2, 1]).unwrap();
        assert_eq!(sub.ids(), &["c".to_string(), "b".to_string()]);
        assert!(ds.subset(&[0, 2]).is_err());
    }

    #[test]
    fn labels_sidecar_reads_back() {
        let ds = tsv("id\tlabel\ttext\na\tx\tfoo\nb\ty\tbar\n").unwrap();
        let mut buf = Vec::new();
        write_labels_tsv(&mut buf, &ds).unwrap();
        let back = tsv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.ids(), ds.ids());
        assert_eq!(back.labels(), ds.labels());
    }
}
