use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SAMV";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 8;

/// Dense row-major `rows × dim` matrix of finite `f32` values.
///
/// Values are kept at interchange precision so that a save/load cycle through
/// the binary format is bit-exact. Arithmetic on them is done in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("vector dimension must be at least 1".into()));
        }
        let expected = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::Dimension(format!("{rows} x {dim} overflows")))?;
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "{rows} x {dim} matrix needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim });
        }
        Ok(EmbeddingMatrix { rows, dim, data })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {dim}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        EmbeddingMatrix::new(rows.len(), dim, data)
    }

    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<f32>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| v as f32).collect())
            .collect();
        EmbeddingMatrix::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn select_rows(&self, indices: &[usize]) -> EmbeddingMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        EmbeddingMatrix {
            rows: indices.len(),
            dim: self.dim,
            data,
        }
    }
}

/// Writes the `SAMV` binary layout: magic, `u16` version, `u64` rows,
/// `u64` dim, then row-major little-endian `f32` payload.
pub fn write_vectors<W: Write>(mut w: W, m: &EmbeddingMatrix) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(m.rows as u64).to_le_bytes())?;
    w.write_all(&(m.dim as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.data.len() * 4);
    for v in &m.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn save_vectors(path: impl AsRef<Path>, m: &EmbeddingMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_vectors(BufWriter::new(file), m).map_err(|e| Error::io(path, e))
}

pub fn read_vectors(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format(format!(
            "bad magic bytes {:?}, expected \"SAMV\"",
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let rows = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    let dim = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
    let payload = &bytes[HEADER_LEN..];
    let expected = rows
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Format(format!("declared shape {rows} x {dim} overflows")))?;
    if payload.len() as u64 != expected {
        return Err(Error::Format(format!(
            "declared shape {rows} x {dim} needs {expected} payload bytes, found {}",
            payload.len()
        )));
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    EmbeddingMatrix::new(rows as usize, dim as usize, data).map_err(|e| match e {
        Error::Dimension(msg) => Error::Format(msg),
        other => other,
    })
}

/// Writes `id,v0,..,v{d-1}` CSV. Floats use the shortest representation
/// that parses back to the same `f32`.
pub fn write_vectors_csv<W: Write>(
    mut w: W,
    ids: &[String],
    m: &EmbeddingMatrix,
) -> std::io::Result<()> {
    assert_eq!(ids.len(), m.rows(), "one id per row");
    write!(w, "id")?;
    for j in 0..m.dim {
        write!(w, ",v{j}")?;
    }
    writeln!(w)?;
    for (id, row) in ids.iter().zip(m.iter_rows()) {
        write!(w, "{id}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn read_vectors_csv<R: BufRead>(reader: R) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV vector file".into()))?
        .map_err(|e| Error::Format(e.to_string()))?;
    let header = header.trim_end_matches('\r');
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"id") || cols.len() < 2 {
        return Err(Error::Format(format!("bad CSV header `{header}`")));
    }
    for (j, c) in cols[1..].iter().enumerate() {
        if *c != format!("v{j}") {
            return Err(Error::Format(format!("CSV column {} should be `v{j}`, got `{c}`", j + 1)));
        }
    }
    let dim = cols.len() - 1;

    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Format(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let row = ids.len();
        let mut fields = line.split(',');
        ids.push(fields.next().unwrap_or_default().to_string());
        let mut count = 0;
        for f in fields {
            let v: f32 = f.trim().parse().map_err(|_| Error::Parse {
                line: i + 2,
                message: format!("`{f}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row });
            }
            data.push(v);
            count += 1;
        }
        if count != dim {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("{count} values, header declares {dim}"),
            });
        }
    }
    let m = EmbeddingMatrix::new(ids.len(), dim, data)?;
    Ok((ids, m))
}

/// Loads either vector layout, sniffing the first bytes. CSV files also
/// return their id column.
pub fn load_vectors_with_ids(
    path: impl AsRef<Path>,
) -> Result<(EmbeddingMatrix, Option<Vec<String>>)> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"id,") {
        let (ids, m) = read_vectors_csv(BufReader::new(bytes.as_slice()))?;
        Ok((m, Some(ids)))
    } else {
        Ok((read_vectors(&bytes)?, None))
    }
}

pub fn load_vectors(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    load_vectors_with_ids(path).map(|(m, _)| m)
}
