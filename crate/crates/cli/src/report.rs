//! The JSON report written by every successful or failed run.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// What a command hands back: verdict, data for the report, and lines for
/// standard output.
pub struct Outcome {
    pub passed: bool,
    pub result: Value,
    pub summary: Vec<String>,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: Value,
    pub status: Status,
    pub result: Value,
}

impl Report<'_> {
    /// Pretty JSON with object keys in sorted order (nested values are
    /// `serde_json::Value` maps, which are ordered).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_json())
    }
}
