//! Edge streams and their text file format.
//!
//! ```text
//! # n=<n> m=<m> mode=<ins|insdel>
//! I <a> <b>
//! D <a> <b>
//! ```
//!
//! UTF-8, LF line endings, decimal integers, one update per line. The
//! serializer always emits a trailing LF after the last line.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Dims, ExactGraph, Sign, StreamUpdate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamMode {
    InsertionOnly,
    InsertionDeletion,
}

impl StreamMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StreamMode::InsertionOnly => "ins",
            StreamMode::InsertionDeletion => "insdel",
        }
    }
}

impl FromStr for StreamMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ins" => Ok(StreamMode::InsertionOnly),
            "insdel" => Ok(StreamMode::InsertionDeletion),
            other => Err(Error::InvalidParameter(format!("unknown stream mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    pub dims: Dims,
    pub mode: StreamMode,
    pub updates: Vec<StreamUpdate>,
}

impl Stream {
    pub fn new(dims: Dims, mode: StreamMode) -> Self {
        Stream {
            dims,
            mode,
            updates: Vec::new(),
        }
    }

    pub fn push(&mut self, update: StreamUpdate) -> Result<()> {
        self.dims.check_edge(update.edge)?;
        if self.mode == StreamMode::InsertionOnly && update.sign == Sign::Delete {
            return Err(Error::DeletionUnsupported);
        }
        self.updates.push(update);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    /// Appends another stream over the same vertex sets.
    pub fn extend_from(&mut self, other: &Stream) -> Result<()> {
        if other.dims != self.dims {
            return Err(Error::InvalidParameter(
                "cannot concatenate streams over different vertex sets".into(),
            ));
        }
        for u in &other.updates {
            self.push(*u)?;
        }
        Ok(())
    }

    /// Replays the stream into the exact oracle, which also checks the
    /// simple-stream discipline.
    pub fn replay(&self) -> Result<ExactGraph> {
        ExactGraph::replay(self.dims, &self.updates)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.updates.len() * 12);
        let _ = writeln!(
            out,
            "# n={} m={} mode={}",
            self.dims.n,
            self.dims.m,
            self.mode.as_str()
        );
        for u in &self.updates {
            let tag = match u.sign {
                Sign::Insert => 'I',
                Sign::Delete => 'D',
            };
            let _ = writeln!(out, "{tag} {} {}", u.edge.a, u.edge.b);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Stream> {
        let mut lines = text.split('\n').enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let (dims, mode) = parse_header(header)?;
        let mut stream = Stream::new(dims, mode);
        for (i, line) in lines {
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(' ');
            let sign = match fields.next() {
                Some("I") => Sign::Insert,
                Some("D") => Sign::Delete,
                _ => return Err(parse_err(lineno, "expected `I <a> <b>` or `D <a> <b>`")),
            };
            let a = parse_index(fields.next(), lineno)?;
            let b = parse_index(fields.next(), lineno)?;
            if fields.next().is_some() {
                return Err(parse_err(lineno, "trailing fields"));
            }
            stream
                .push(StreamUpdate {
                    edge: crate::model::Edge::new(a, b),
                    sign,
                })
                .map_err(|e| parse_err(lineno, &e.to_string()))?;
        }
        Ok(stream)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Stream> {
        Stream::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_index(field: Option<&str>, line: usize) -> Result<u32> {
    field
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| parse_err(line, "expected a decimal vertex index"))
}

fn parse_header(line: &str) -> Result<(Dims, StreamMode)> {
    let rest = line
        .strip_prefix("# ")
        .ok_or_else(|| parse_err(1, "header must start with `# `"))?;
    let (mut n, mut m, mut mode) = (None, None, None);
    for field in rest.split(' ') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, "header fields are key=value"))?;
        match key {
            "n" => n = value.parse::<u32>().ok(),
            "m" => m = value.parse::<u32>().ok(),
            "mode" => mode = value.parse::<StreamMode>().ok(),
            _ => return Err(parse_err(1, &format!("unknown header key {key:?}"))),
        }
    }
    match (n, m, mode) {
        (Some(n), Some(m), Some(mode)) => {
            let dims = Dims::new(n, m).map_err(|e| parse_err(1, &e.to_string()))?;
            Ok((dims, mode))
        }
        _ => Err(parse_err(1, "header needs n, m and mode")),
    }
}
