//! File loading, schema-error reporting with JSON pointer paths, and the
//! exit-code contract.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Exit-code carrying error: usage, I/O and schema problems exit 1,
/// physics-check failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Schema(String),
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Schema(_) => 1,
            CliError::Physics(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Physics(m) => write!(f, "physics check failed: {m}"),
        }
    }
}

/// Violations of the state invariants exit 2; malformed input exits 1.
pub fn map_state_error(e: tomoprob::statespace::StateError) -> CliError {
    use tomoprob::statespace::StateError::*;
    match e {
        NotHermitian { .. } | TraceNotOne { .. } | NotPositiveSemidefinite { .. } => {
            CliError::Physics(e.to_string())
        }
        NotNormalized { .. } | ProbabilityOutOfRange { .. } => CliError::Physics(e.to_string()),
        _ => CliError::Schema(e.to_string()),
    }
}

pub fn map_table_error(e: tomoprob::qudit_prob::TableError) -> CliError {
    use tomoprob::qudit_prob::TableError;
    match e {
        TableError::State(inner) => map_state_error(inner),
        TableError::OutOfRange { .. } | TableError::ImpliedCornerOutOfRange(_) => {
            CliError::Schema(e.to_string())
        }
        _ => CliError::Schema(e.to_string()),
    }
}

pub fn map_cv_error(e: tomoprob::cv_tomography::CvError) -> CliError {
    use tomoprob::cv_tomography::CvError;
    match e {
        CvError::NotNormalized { .. }
        | CvError::NegativeValue { .. }
        | CvError::MomentumRangeTooSmall { .. }
        | CvError::InsufficientAngles { .. } => CliError::Physics(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

pub fn map_parosc_error(e: tomoprob::parosc::ParoscError) -> CliError {
    use tomoprob::parosc::ParoscError;
    match e {
        ParoscError::BadProfile(_) | ParoscError::TimeOutOfRange { .. } => {
            CliError::Usage(e.to_string())
        }
        ParoscError::FockIndexTooLarge { .. } => CliError::Usage(e.to_string()),
        ParoscError::Cv(inner) => map_cv_error(inner),
        _ => CliError::Physics(e.to_string()),
    }
}

/// JSON-pointer rendering of a deserialization path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for segment in path.iter() {
        use serde_path_to_error::Segment;
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(key),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Schema(format!(
            "{} at {}: {}",
            path.display(),
            pointer(e.path()),
            e.inner()
        ))
    })
}

/// Canonical JSON text: pretty-printed with a trailing newline; struct field
/// order and sorted map keys make it byte-stable.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_output(target: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match target {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
