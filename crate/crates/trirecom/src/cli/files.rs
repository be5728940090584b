//! JSON file formats: traces and single states.

use crate::lattice::TriRegion;
use crate::moves::RecomStep;
use crate::partition::{District, Partition, PartitionError, SizeTargets};
use crate::trace::Trace;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("bad region: {0}")]
    Region(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("step {index}: {reason}")]
    Step { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub n: usize,
    pub k: [usize; 3],
}

impl Header {
    pub fn of(p: &Partition) -> Self {
        Header { n: p.region().n(), k: p.targets().k }
    }

    pub fn partition(&self, labels: Vec<District>) -> Result<Partition, FileError> {
        let region = TriRegion::new(self.n).map_err(|e| FileError::Region(e.to_string()))?;
        Ok(Partition::new(Arc::new(region), labels, SizeTargets { k: self.k })?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub untouched: District,
    pub after: Vec<District>,
    pub note: String,
}

/// A trace on disk: every step carries the full label array after it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub version: u32,
    pub header: Header,
    pub source: Vec<District>,
    pub steps: Vec<StepRecord>,
}

impl TraceFile {
    pub fn from_trace(t: &Trace) -> Self {
        TraceFile {
            version: FORMAT_VERSION,
            header: Header::of(&t.source),
            source: t.source.labels().to_vec(),
            steps: t
                .steps
                .iter()
                .zip(&t.annotations)
                .map(|(s, note)| StepRecord { untouched: s.untouched, after: s.after.clone(), note: note.clone() })
                .collect(),
        }
    }

    /// Rebuild the trace. Only the shape of each step is checked here;
    /// move validity is left to verification.
    pub fn to_trace(&self) -> Result<Trace, FileError> {
        if self.version != FORMAT_VERSION {
            return Err(FileError::Version(self.version));
        }
        let source = self.header.partition(self.source.clone())?;
        let mut t = Trace::empty(source.clone());
        for (index, s) in self.steps.iter().enumerate() {
            if s.after.len() != source.labels().len() {
                return Err(FileError::Step { index, reason: format!("assignment has length {}", s.after.len()) });
            }
            t.push(RecomStep { untouched: s.untouched, after: s.after.clone() }, s.note.clone());
        }
        Ok(t)
    }

    /// Compact JSON with one step per line.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{{\"version\":{},\n", self.version));
        out.push_str(&format!("\"header\":{},\n", serde_json::to_string(&self.header).expect("plain data")));
        out.push_str(&format!("\"source\":{},\n", serde_json::to_string(&self.source).expect("plain data")));
        out.push_str("\"steps\":[");
        for (j, s) in self.steps.iter().enumerate() {
            out.push_str(if j == 0 { "\n" } else { ",\n" });
            out.push_str(&serde_json::to_string(s).expect("plain data"));
        }
        out.push_str(if self.steps.is_empty() { "]}\n" } else { "\n]}\n" });
        out
    }
}

/// A single partition on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateFile {
    pub version: u32,
    pub header: Header,
    pub labels: Vec<District>,
}

impl StateFile {
    pub fn from_partition(p: &Partition) -> Self {
        StateFile { version: FORMAT_VERSION, header: Header::of(p), labels: p.labels().to_vec() }
    }

    pub fn to_partition(&self) -> Result<Partition, FileError> {
        if self.version != FORMAT_VERSION {
            return Err(FileError::Version(self.version));
        }
        self.header.partition(self.labels.clone())
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"version\":{},\n\"header\":{},\n\"labels\":{}}}\n",
            self.version,
            serde_json::to_string(&self.header).expect("plain data"),
            serde_json::to_string(&self.labels).expect("plain data")
        )
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io { path: name.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| FileError::Json { path: name, source })
}

/// Write through a sibling temporary file and rename it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), FileError> {
    let name = path.display().to_string();
    let io = |source| FileError::Io { path: name.clone(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
