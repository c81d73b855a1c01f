//! Versioned, checksummed model artifacts.
//!
//! An artifact is a single JSON envelope: format version, SHA-256 checksum
//! of the payload bytes, and the payload itself (the trained model with its
//! feature pipeline). Loading verifies version and checksum before any
//! deserialization of the payload.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use bugsev::model::TrainedModel;

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("unsupported artifact version {found}, this build reads version {ARTIFACT_VERSION}")]
    Version { found: u32 },

    #[error("artifact checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format_version: u32,
    checksum: String,
    payload: &'a RawValue,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    format_version: u32,
    checksum: String,
    payload: Box<RawValue>,
}

fn checksum_hex(payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Serialize and write atomically (temp file + rename in the target dir).
pub fn save_artifact(model: &TrainedModel, path: &Path) -> Result<(), ArtifactError> {
    let payload = serde_json::to_string(model)?;
    let checksum = checksum_hex(&payload);
    let raw = RawValue::from_string(payload)?;
    let envelope = EnvelopeOut {
        format_version: ARTIFACT_VERSION,
        checksum,
        payload: &raw,
    };
    let bytes = serde_json::to_string(&envelope)?;

    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Verify version and checksum, then deserialize the model.
pub fn load_artifact(path: &Path) -> Result<TrainedModel, ArtifactError> {
    let bytes = std::fs::read_to_string(path)?;
    let envelope: EnvelopeIn = serde_json::from_str(&bytes)?;
    if envelope.format_version != ARTIFACT_VERSION {
        return Err(ArtifactError::Version {
            found: envelope.format_version,
        });
    }
    let computed = checksum_hex(envelope.payload.get());
    if computed != envelope.checksum {
        return Err(ArtifactError::Checksum {
            stored: envelope.checksum,
            computed,
        });
    }
    Ok(serde_json::from_str(envelope.payload.get())?)
}
