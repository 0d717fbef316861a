//! Machine-readable claim results.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("PASS"),
            Status::Fail => f.write_str("FAIL"),
            Status::Skipped(r) => write!(f, "SKIPPED({r})"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One checked statement. A failing report always carries a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub status: Status,
    pub dims: BTreeMap<String, usize>,
    pub witness: Option<String>,
    pub elapsed_ms: u64,
}

impl ClaimReport {
    pub fn pass(id: impl Into<String>, dims: BTreeMap<String, usize>) -> Self {
        ClaimReport {
            claim_id: id.into(),
            status: Status::Pass,
            dims,
            witness: None,
            elapsed_ms: 0,
        }
    }

    pub fn fail(id: impl Into<String>, dims: BTreeMap<String, usize>, witness: impl Into<String>) -> Self {
        ClaimReport {
            claim_id: id.into(),
            status: Status::Fail,
            dims,
            witness: Some(witness.into()),
            elapsed_ms: 0,
        }
    }

    pub fn skipped(id: impl Into<String>, reason: impl Into<String>) -> Self {
        ClaimReport {
            claim_id: id.into(),
            status: Status::Skipped(reason.into()),
            dims: BTreeMap::new(),
            witness: None,
            elapsed_ms: 0,
        }
    }

    /// `pass` when `ok`, otherwise `fail` with the lazily built witness.
    pub fn check(
        id: impl Into<String>,
        ok: bool,
        dims: BTreeMap<String, usize>,
        witness: impl FnOnce() -> String,
    ) -> Self {
        if ok {
            Self::pass(id, dims)
        } else {
            Self::fail(id, dims, witness())
        }
    }

    pub fn with_elapsed(mut self, ms: u64) -> Self {
        self.elapsed_ms = ms;
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    /// `STATUS claim_id k=v … [witness: …]`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}", self.status, self.claim_id);
        for (k, v) in &self.dims {
            s.push_str(&format!(" {k}={v}"));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness: {w}"));
        }
        if self.elapsed_ms > 0 {
            s.push_str(&format!(" ({} ms)", self.elapsed_ms));
        }
        s
    }
}
