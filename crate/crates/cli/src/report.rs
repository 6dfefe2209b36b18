//! Machine-readable command output.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Process exit status; every command maps its result onto exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Holds = 0,
    Fails = 1,
    Inconclusive = 2,
    InputError = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        Self { path: path.to_string(), sha256: format!("{:x}", Sha256::digest(bytes)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub exit_code: i32,
    pub verdict: String,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}
