//! Streaming reader for libsvm-format binary classification data.
//!
//! ```text
//! <label> <index>:<value> <index>:<value> ... [# comment]
//! ```
//!
//! Indices are 1-based and strictly increasing, values are finite decimals.
//! LF and CRLF line endings are accepted. Lines that are blank after the
//! comment is stripped carry no example and are skipped by the stream;
//! [`parse_line`] itself reports them as a missing label.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Cursor, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::losses::{Label, SparseExample};

pub const DEFAULT_BUFFER: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty label")]
    EmptyLabel,
    #[error("label '{0}' is not one of the dataset's labels")]
    UnknownLabel(String),
    #[error("malformed token '{0}' (expected index:value)")]
    MalformedToken(String),
    #[error("malformed index '{0}'")]
    MalformedIndex(String),
    #[error("feature index 0 is not allowed (indices are 1-based)")]
    ZeroIndex,
    #[error("malformed value '{0}'")]
    MalformedValue(String),
    #[error("non-finite value '{0}'")]
    NonFiniteValue(String),
    #[error("index {found} does not increase past {prev}")]
    NonIncreasingIndex { prev: u32, found: u32 },
    #[error("more than two distinct labels: {0:?}")]
    TooManyLabels(Vec<String>),
}

/// A parse failure tied to its 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Label identity: numeric labels compare by value (`+1`, `1` and `1.0`
/// are the same label), anything else by text.
#[derive(Debug, Clone, PartialEq)]
enum LabelKey {
    Num(f64),
    Text(String),
}

impl LabelKey {
    fn of(token: &str) -> LabelKey {
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => LabelKey::Num(v + 0.0),
            _ => LabelKey::Text(token.to_string()),
        }
    }
}

/// Maps raw label tokens onto `{+1, -1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelMap {
    /// Numeric labels by sign: `> 0` is positive, `<= 0` negative.
    Sign,
    /// Exactly these tokens (compared as [`LabelKey`]s).
    Explicit {
        positive: String,
        negative: Option<String>,
    },
}

impl LabelMap {
    pub fn explicit(positive: impl Into<String>, negative: impl Into<String>) -> Self {
        LabelMap::Explicit {
            positive: positive.into(),
            negative: Some(negative.into()),
        }
    }

    /// Builds the map for a dataset from its distinct label tokens.
    ///
    /// Two numeric labels: the larger is positive. Otherwise the
    /// lexicographically smaller token is positive. A single numeric label
    /// maps by sign; a single text label is positive.
    pub fn from_labels<'a>(
        labels: impl IntoIterator<Item = &'a str>,
    ) -> std::result::Result<Self, ParseErrorKind> {
        let mut distinct: Vec<(&str, LabelKey)> = Vec::new();
        for l in labels {
            let key = LabelKey::of(l);
            if !distinct.iter().any(|(_, k)| *k == key) {
                distinct.push((l, key));
            }
        }
        match distinct.as_slice() {
            [] => Ok(LabelMap::Sign),
            [(_, LabelKey::Num(_))] => Ok(LabelMap::Sign),
            [(t, LabelKey::Text(_))] => Ok(LabelMap::Explicit {
                positive: t.to_string(),
                negative: None,
            }),
            [(a, ka), (b, kb)] => {
                let order = match (ka, kb) {
                    (LabelKey::Num(x), LabelKey::Num(y)) => {
                        y.partial_cmp(x).unwrap_or(Ordering::Equal)
                    }
                    _ => a.cmp(b),
                };
                let (pos, neg) = if order == Ordering::Greater {
                    (b, a)
                } else {
                    (a, b)
                };
                Ok(LabelMap::explicit(*pos, *neg))
            }
            many => {
                let mut names: Vec<String> = many.iter().map(|(t, _)| t.to_string()).collect();
                names.sort();
                Err(ParseErrorKind::TooManyLabels(names))
            }
        }
    }

    pub fn map(&self, token: &str) -> std::result::Result<Label, ParseErrorKind> {
        let key = LabelKey::of(token);
        match self {
            LabelMap::Sign => match key {
                LabelKey::Num(v) if v > 0.0 => Ok(Label::Positive),
                LabelKey::Num(_) => Ok(Label::Negative),
                LabelKey::Text(_) => Err(ParseErrorKind::UnknownLabel(token.to_string())),
            },
            LabelMap::Explicit { positive, negative } => {
                if key == LabelKey::of(positive) {
                    Ok(Label::Positive)
                } else if negative.as_deref().is_some_and(|n| key == LabelKey::of(n)) {
                    Ok(Label::Negative)
                } else {
                    Err(ParseErrorKind::UnknownLabel(token.to_string()))
                }
            }
        }
    }
}

impl fmt::Display for LabelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelMap::Sign => f.write_str("sign"),
            LabelMap::Explicit { positive, negative } => {
                write!(f, "{positive}=>+1")?;
                if let Some(n) = negative {
                    write!(f, ",{n}=>-1")?;
                }
                Ok(())
            }
        }
    }
}

/// A syntactically valid line before label mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord<'a> {
    pub label: &'a str,
    pub features: Vec<(u32, f64)>,
}

fn strip_comment(text: &str) -> &str {
    match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    }
}

fn is_blank_record(text: &str) -> bool {
    strip_comment(text).trim().is_empty()
}

/// Parses the syntax of one line without mapping its label.
pub fn parse_record(text: &str) -> std::result::Result<RawRecord<'_>, ParseErrorKind> {
    let mut tokens = strip_comment(text).split_ascii_whitespace();
    let label = match tokens.next() {
        Some(t) if !t.contains(':') => t,
        _ => return Err(ParseErrorKind::EmptyLabel),
    };
    let mut features = Vec::new();
    let mut prev = 0u32;
    for token in tokens {
        let (idx, val) = token
            .split_once(':')
            .ok_or_else(|| ParseErrorKind::MalformedToken(token.to_string()))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| ParseErrorKind::MalformedIndex(idx.to_string()))?;
        if idx == 0 {
            return Err(ParseErrorKind::ZeroIndex);
        }
        let val: f64 = val
            .parse()
            .map_err(|_| ParseErrorKind::MalformedValue(val.to_string()))?;
        if !val.is_finite() {
            return Err(ParseErrorKind::NonFiniteValue(token.to_string()));
        }
        if idx <= prev {
            return Err(ParseErrorKind::NonIncreasingIndex { prev, found: idx });
        }
        prev = idx;
        features.push((idx, val));
    }
    Ok(RawRecord { label, features })
}

/// Parses one libsvm line into an example, mapping its label through `labels`.
pub fn parse_line(
    text: &str,
    line: usize,
    labels: &LabelMap,
) -> std::result::Result<SparseExample, ParseError> {
    let wrap = |kind| ParseError { line, kind };
    let raw = parse_record(text).map_err(wrap)?;
    let label = labels.map(raw.label).map_err(wrap)?;
    Ok(SparseExample::from_parts(raw.features, label))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    FileOrder,
    Shuffled(u64),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::FileOrder => f.write_str("file"),
            Order::Shuffled(seed) => write!(f, "shuffle:{seed}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    File(PathBuf),
    Memory(Arc<str>),
}

#[derive(Debug, Clone)]
struct SharedText(Arc<str>);

impl AsRef<[u8]> for SharedText {
    fn as_ref(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

trait ReadSeek: BufRead + Seek + Send {}
impl<T: BufRead + Seek + Send> ReadSeek for T {}

/// Position of an example record inside the source.
#[derive(Debug, Clone, Copy)]
struct RecordPos {
    offset: u64,
    line: usize,
}

/// A scanned dataset. Construction makes one streaming pass to validate
/// every line and collect the example count, dimension and labels.
#[derive(Debug, Clone)]
pub struct DatasetHandle {
    name: String,
    source: Source,
    buffer_capacity: usize,
    dimension: usize,
    labels: LabelMap,
    records: Vec<RecordPos>,
}

impl DatasetHandle {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::open_with(path, None, DEFAULT_BUFFER)
    }

    /// Opens a file with an optional fixed label map and read-buffer size.
    pub fn open_with(
        path: impl AsRef<Path>,
        labels: Option<LabelMap>,
        buffer_capacity: usize,
    ) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::scan(name, Source::File(path), labels, buffer_capacity.max(1))
    }

    pub fn from_text(name: impl Into<String>, text: impl Into<Arc<str>>) -> Result<Self> {
        Self::from_text_with(name, text, None)
    }

    pub fn from_text_with(
        name: impl Into<String>,
        text: impl Into<Arc<str>>,
        labels: Option<LabelMap>,
    ) -> Result<Self> {
        Self::scan(
            name.into(),
            Source::Memory(text.into()),
            labels,
            DEFAULT_BUFFER,
        )
    }

    fn reader(source: &Source, capacity: usize) -> Result<Box<dyn ReadSeek>> {
        match source {
            Source::File(path) => {
                let file = File::open(path).map_err(|e| Error::io(path, e))?;
                Ok(Box::new(BufReader::with_capacity(capacity, file)))
            }
            Source::Memory(text) => Ok(Box::new(Cursor::new(SharedText(text.clone())))),
        }
    }

    fn io_err(&self, e: std::io::Error) -> Error {
        match &self.source {
            Source::File(p) => Error::io(p, e),
            Source::Memory(_) => Error::io(format!("<memory:{}>", self.name), e),
        }
    }

    fn scan(
        name: String,
        source: Source,
        fixed: Option<LabelMap>,
        buffer_capacity: usize,
    ) -> Result<Self> {
        let mut handle = DatasetHandle {
            name,
            source,
            buffer_capacity,
            dimension: 0,
            labels: LabelMap::Sign,
            records: Vec::new(),
        };
        let mut reader = Self::reader(&handle.source, buffer_capacity)?;
        let mut buf = String::new();
        let mut offset = 0u64;
        let mut line = 0usize;
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut seen_keys: Vec<LabelKey> = Vec::new();
        loop {
            buf.clear();
            let n = reader.read_line(&mut buf).map_err(|e| handle.io_err(e))?;
            if n == 0 {
                break;
            }
            line += 1;
            let start = offset;
            offset += n as u64;
            if is_blank_record(&buf) {
                continue;
            }
            let raw = parse_record(&buf).map_err(|kind| ParseError { line, kind })?;
            match &fixed {
                Some(map) => {
                    map.map(raw.label)
                        .map_err(|kind| ParseError { line, kind })?;
                }
                None => {
                    let key = LabelKey::of(raw.label);
                    if !seen_keys.contains(&key) {
                        seen_keys.push(key);
                        seen.insert(raw.label.to_string());
                        if seen_keys.len() > 2 {
                            return Err(ParseError {
                                line,
                                kind: ParseErrorKind::TooManyLabels(seen.into_iter().collect()),
                            }
                            .into());
                        }
                    }
                }
            }
            if let Some(&(idx, _)) = raw.features.last() {
                handle.dimension = handle.dimension.max(idx as usize);
            }
            handle.records.push(RecordPos {
                offset: start,
                line,
            });
        }
        handle.labels = match fixed {
            Some(map) => map,
            None => LabelMap::from_labels(seen.iter().map(String::as_str))
                .map_err(|kind| ParseError { line, kind })?,
        };
        Ok(handle)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_examples(&self) -> usize {
        self.records.len()
    }

    /// Largest feature index seen.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.source {
            Source::File(p) => Some(p),
            Source::Memory(_) => None,
        }
    }

    /// Iterates the examples once in the requested order.
    pub fn stream(&self, order: Order) -> Result<ExampleStream<'_>> {
        let reader = Self::reader(&self.source, self.buffer_capacity)?;
        let permutation = match order {
            Order::FileOrder => None,
            Order::Shuffled(seed) => {
                let mut idx: Vec<usize> = (0..self.records.len()).collect();
                idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                Some(idx)
            }
        };
        Ok(ExampleStream {
            handle: self,
            reader,
            permutation,
            next: 0,
            line: 0,
            buf: String::new(),
        })
    }

    /// All examples in file order, collected.
    pub fn load(&self) -> Result<Vec<SparseExample>> {
        self.stream(Order::FileOrder)?.collect()
    }
}

pub struct ExampleStream<'a> {
    handle: &'a DatasetHandle,
    reader: Box<dyn ReadSeek>,
    permutation: Option<Vec<usize>>,
    next: usize,
    line: usize,
    buf: String,
}

impl ExampleStream<'_> {
    fn read_sequential(&mut self) -> Option<Result<SparseExample>> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(self.handle.io_err(e))),
            }
            self.line += 1;
            if is_blank_record(&self.buf) {
                continue;
            }
            return Some(
                parse_line(&self.buf, self.line, &self.handle.labels).map_err(Error::from),
            );
        }
    }

    fn read_at(&mut self, pos: RecordPos) -> Result<SparseExample> {
        self.reader
            .seek(SeekFrom::Start(pos.offset))
            .map_err(|e| self.handle.io_err(e))?;
        self.buf.clear();
        self.reader
            .read_line(&mut self.buf)
            .map_err(|e| self.handle.io_err(e))?;
        Ok(parse_line(&self.buf, pos.line, &self.handle.labels)?)
    }
}

impl Iterator for ExampleStream<'_> {
    type Item = Result<SparseExample>;

    fn next(&mut self) -> Option<Self::Item> {
        match &self.permutation {
            None => self.read_sequential(),
            Some(perm) => {
                let &i = perm.get(self.next)?;
                self.next += 1;
                let pos = self.handle.records[i];
                Some(self.read_at(pos))
            }
        }
    }
}
