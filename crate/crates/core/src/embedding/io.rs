//! Readers and writers for GloVe text, word2vec binary and the native format.
//!
//! The native format is a word2vec binary file plus a `<stem>.meta.json`
//! sidecar holding the [`SpaceMeta`] record.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use super::{EmbeddingSpace, Provenance, SpaceMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Glove,
    Word2vec,
    Native,
}

impl Format {
    /// Guesses the format from the extension: `.txt`/`.vec`/`.glove` are text,
    /// anything else is binary. Binary files with a sidecar are native.
    pub fn infer(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt" | "vec" | "glove") => Format::Glove,
            _ if sidecar_path(path).exists() => Format::Native,
            _ => Format::Word2vec,
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Metadata for a space read from `path`; the label is the file stem.
pub fn file_meta(path: &Path, format: Format) -> SpaceMeta {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    SpaceMeta {
        label,
        dimension: 0,
        vocab_size: 0,
        provenance: Provenance::File {
            path: path.display().to_string(),
            format,
        },
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::with_capacity(1 << 20, file))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(BufWriter::with_capacity(1 << 20, file))
}

/// Collects rows, letting a later duplicate of a word replace the earlier one.
#[derive(Default)]
struct RowCollector {
    terms: Vec<String>,
    rows: Vec<Vec<f64>>,
    seen: HashMap<String, usize>,
}

impl RowCollector {
    fn push(&mut self, term: String, row: Vec<f64>, location: impl FnOnce() -> String) {
        if let Some(&i) = self.seen.get(&term) {
            warn!("duplicate word {term:?} at {}; keeping the last occurrence", location());
            self.rows[i] = row;
        } else {
            self.seen.insert(term.clone(), self.terms.len());
            self.terms.push(term);
            self.rows.push(row);
        }
    }

    fn finish(self, dim: usize, meta: SpaceMeta) -> Result<EmbeddingSpace> {
        let matrix = self.rows.into_iter().flatten().collect();
        EmbeddingSpace::new(self.terms, matrix, dim, meta)
    }
}

/// Reads `word v1 ... vd` lines. The dimension is fixed by the first line; a
/// leading `count dim` header line, as written by fastText, is skipped.
pub fn read_glove_text<R: BufRead>(reader: R, meta: SpaceMeta) -> Result<EmbeddingSpace> {
    let mut dim: Option<usize> = None;
    let mut rows = RowCollector::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        if line_no == 1 && fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok()) {
            continue;
        }
        let expected = *dim.get_or_insert(fields.len() - 1);
        if fields.len() - 1 != expected {
            return Err(Error::DimensionMismatch {
                line: line_no,
                expected,
                found: fields.len() - 1,
            });
        }
        let row = fields[1..]
            .iter()
            .enumerate()
            .map(|(col, f)| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    location: format!("line {line_no}, field {}", col + 2),
                    message: format!("{f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(fields[0].to_owned(), row, || format!("line {line_no}"));
    }
    let dim = dim.ok_or_else(|| Error::Format("no embeddings in file".into()))?;
    rows.finish(dim, meta)
}

pub fn load_glove_text(path: impl AsRef<Path>) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    read_glove_text(open(path)?, file_meta(path, Format::Glove))
}

/// Writes one `word v1 ... vd` line per row with shortest round-trip decimals.
/// Values that are exact `f32`s are printed at `f32` precision.
pub fn write_glove_text<W: Write>(space: &EmbeddingSpace, mut w: W) -> Result<()> {
    for (term, row) in space.rows() {
        w.write_all(term.as_bytes())?;
        for &v in row {
            let single = v as f32;
            if f64::from(single) == v {
                write!(w, " {single}")?;
            } else {
                write!(w, " {v}")?;
            }
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_glove_text(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_glove_text(space, create(path)?).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Stream(source) => Error::io(path, source),
        other => other,
    }
}

fn truncated(what: &str) -> Error {
    Error::Format(format!("truncated file while reading {what}"))
}

fn read_header_field<R: BufRead>(reader: &mut R, delim: u8, name: &str) -> Result<usize> {
    let mut buf = Vec::new();
    reader.read_until(delim, &mut buf)?;
    if buf.pop() != Some(delim) {
        return Err(Error::Format(format!("header mismatch: missing {name}")));
    }
    let text = std::str::from_utf8(&buf).map_err(|_| Error::Format("header is not ASCII".into()))?;
    text.trim()
        .parse()
        .map_err(|_| Error::Format(format!("header mismatch: bad {name} {text:?}")))
}

/// Reads the word2vec binary layout: an ASCII `count dim` header, then per
/// entry the word, one space, `dim` little-endian `f32`s and an optional newline.
pub fn read_word2vec_binary<R: BufRead>(reader: R, meta: SpaceMeta) -> Result<EmbeddingSpace> {
    read_word2vec_binary_limited(reader, meta, None)
}

/// Like [`read_word2vec_binary`] but stops after the first `limit` entries,
/// which for frequency-sorted files keeps the most frequent words.
pub fn read_word2vec_binary_limited<R: BufRead>(
    mut reader: R,
    meta: SpaceMeta,
    limit: Option<usize>,
) -> Result<EmbeddingSpace> {
    let declared = read_header_field(&mut reader, b' ', "vocabulary size")?;
    let n_words = limit.map_or(declared, |l| l.min(declared));
    let dim = read_header_field(&mut reader, b'\n', "dimension")?;
    if dim == 0 {
        return Err(Error::Format("header mismatch: dimension 0".into()));
    }

    let mut rows = RowCollector::default();
    let mut word = Vec::new();
    let mut raw = vec![0u8; dim * 4];
    for entry in 0..n_words {
        word.clear();
        reader.read_until(b' ', &mut word)?;
        if word.pop() != Some(b' ') {
            return Err(truncated(&format!("word {}", entry + 1)));
        }
        if word.first() == Some(&b'\n') {
            word.remove(0);
        }
        if word.is_empty() {
            return Err(Error::Format(format!("empty word at entry {}", entry + 1)));
        }
        let term = match String::from_utf8(word.clone()) {
            Ok(s) => s,
            Err(_) => {
                warn!("invalid UTF-8 in word at entry {}", entry + 1);
                String::from_utf8_lossy(&word).into_owned()
            }
        };
        reader.read_exact(&mut raw).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => truncated(&format!("vector {}", entry + 1)),
            _ => Error::Stream(e),
        })?;
        let row = raw
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect();
        rows.push(term, row, || format!("entry {}", entry + 1));
    }

    if n_words < declared {
        return rows.finish(dim, meta);
    }
    let mut rest = Vec::new();
    reader.read_to_end(&mut rest)?;
    if !(rest.is_empty() || rest == b"\n") {
        return Err(Error::Format(format!("{} trailing bytes after last vector", rest.len())));
    }
    rows.finish(dim, meta)
}

pub fn load_word2vec_binary(path: impl AsRef<Path>) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    read_word2vec_binary(open(path)?, file_meta(path, Format::Word2vec))
}

/// Writes the word2vec binary layout, one newline after each vector. Entries
/// are narrowed to `f32`.
pub fn write_word2vec_binary<W: Write>(space: &EmbeddingSpace, mut w: W) -> Result<()> {
    write!(w, "{} {}\n", space.len(), space.dim())?;
    for (term, row) in space.rows() {
        w.write_all(term.as_bytes())?;
        w.write_all(b" ")?;
        for &v in row {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_word2vec_binary(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_word2vec_binary(space, create(path)?).map_err(|e| with_path(e, path))
}

pub fn save_native(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_word2vec_binary(space, path)?;
    let sidecar = sidecar_path(path);
    let json = serde_json::to_string_pretty(space.meta())?;
    fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))
}

pub fn load_native(path: impl AsRef<Path>) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    let sidecar = sidecar_path(path);
    let json = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    let meta: SpaceMeta = serde_json::from_str(&json)?;
    let space = read_word2vec_binary(open(path)?, meta)?;
    let declared = &space.meta;
    if declared.dimension != space.dim() || declared.vocab_size != space.len() {
        warn!("sidecar {} disagrees with the binary shape", sidecar.display());
    }
    Ok(space)
}

/// Loads a space, inferring the format from the path when `format` is `None`.
pub fn load_embeddings(path: impl AsRef<Path>, format: Option<Format>) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    match format.unwrap_or_else(|| Format::infer(path)) {
        Format::Glove => load_glove_text(path),
        Format::Word2vec => load_word2vec_binary(path),
        Format::Native => load_native(path),
    }
}

pub fn save_embeddings(space: &EmbeddingSpace, path: impl AsRef<Path>, format: Format) -> Result<()> {
    match format {
        Format::Glove => save_glove_text(space, path),
        Format::Word2vec => save_word2vec_binary(space, path),
        Format::Native => save_native(space, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::cosine;
    use crate::embedding::test_support::synthetic_meta;

    fn glove(text: &str) -> Result<EmbeddingSpace> {
        read_glove_text(text.as_bytes(), synthetic_meta("t"))
    }

    #[test]
    fn glove_orthogonal_rows() {
        let s = glove("a 1.0 0.0\nb 0.0 1.0").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(cosine(s.vector("a").unwrap(), s.vector("b").unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn glove_dimension_mismatch_names_line() {
        let err = glove("a 1.0 0.0\nc 1.0").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { line: 2, expected: 2, found: 1 }));
        assert!(err.to_string().starts_with("dimension mismatch at line 2"));
    }

    #[test]
    fn glove_parse_error_has_location() {
        let err = glove("a 1.0 0.0\nb 1.0 x").unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "line 2, field 3"));
    }

    #[test]
    fn glove_duplicates_keep_last_and_header_is_skipped() {
        let s = glove("3 2\na 1 0\nb 0 1\na 2 2\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.vector("a").unwrap(), [2.0, 2.0]);
        assert_eq!(s.terms(), ["a", "b"]);
    }

    fn tiny_w2v() -> Vec<u8> {
        let mut bytes = b"2 2\n".to_vec();
        bytes.extend(b"a ");
        bytes.extend(1.0f32.to_le_bytes());
        bytes.extend(0.0f32.to_le_bytes());
        bytes.extend(b"\nb ");
        bytes.extend(0.0f32.to_le_bytes());
        bytes.extend((-2.5f32).to_le_bytes());
        bytes.push(b'\n');
        bytes
    }

    #[test]
    fn word2vec_hand_written_file() {
        let s = read_word2vec_binary(&tiny_w2v()[..], synthetic_meta("t")).unwrap();
        assert_eq!(s.terms(), ["a", "b"]);
        assert_eq!(s.vector("a").unwrap(), [1.0, 0.0]);
        assert_eq!(s.vector("b").unwrap(), [0.0, -2.5]);

        let mut out = Vec::new();
        write_word2vec_binary(&s, &mut out).unwrap();
        assert_eq!(out, tiny_w2v());
    }

    #[test]
    fn word2vec_without_newlines() {
        let mut bytes = b"2 2\na ".to_vec();
        bytes.extend(1.0f32.to_le_bytes());
        bytes.extend(0.0f32.to_le_bytes());
        bytes.extend(b"b ");
        bytes.extend(0.0f32.to_le_bytes());
        bytes.extend(1.0f32.to_le_bytes());
        let s = read_word2vec_binary(&bytes[..], synthetic_meta("t")).unwrap();
        assert_eq!(s.terms(), ["a", "b"]);
    }

    #[test]
    fn word2vec_truncated_and_trailing() {
        let full = tiny_w2v();
        for cut in [2, 5, 10, full.len() - 3] {
            assert!(read_word2vec_binary(&full[..cut], synthetic_meta("t")).is_err(), "cut {cut}");
        }
        let mut extra = full.clone();
        extra.extend(b"zz");
        assert!(read_word2vec_binary(&extra[..], synthetic_meta("t")).is_err());
        assert!(read_word2vec_binary(&b"x 2\n"[..], synthetic_meta("t")).is_err());
    }

    #[test]
    fn word2vec_prefix_read() {
        let s = read_word2vec_binary_limited(&tiny_w2v()[..], synthetic_meta("t"), Some(1)).unwrap();
        assert_eq!(s.terms(), ["a"]);
        let all = read_word2vec_binary_limited(&tiny_w2v()[..], synthetic_meta("t"), Some(9)).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn native_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let s = read_word2vec_binary(&tiny_w2v()[..], synthetic_meta("corpus")).unwrap();
        let a = dir.path().join("a.bin");
        let b = dir.path().join("b.bin");
        save_native(&s, &a).unwrap();
        let loaded = load_embeddings(&a, None).unwrap();
        assert_eq!(loaded.meta(), s.meta());
        save_native(&loaded, &b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(
            fs::read(sidecar_path(&a)).unwrap(),
            fs::read(sidecar_path(&b)).unwrap()
        );
        assert_eq!(Format::infer(&a), Format::Native);
    }
}
