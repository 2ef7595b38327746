use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Result;

pub const ARTIFACT_VERSION: u32 = 1;

/// Wrapper written around every command report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<C, P> {
    pub artifact_version: u32,
    pub command: String,
    pub config: C,
    /// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` when set so that
    /// reruns stay byte-identical; absent otherwise.
    pub timestamp: Option<u64>,
    pub payload: P,
}

impl<C, P> ReportEnvelope<C, P> {
    pub fn new(command: impl Into<String>, config: C, payload: P) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok());
        ReportEnvelope { artifact_version: ARTIFACT_VERSION, command: command.into(), config, timestamp, payload }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

pub fn write_report<C: Serialize, P: Serialize>(path: &Path, envelope: &ReportEnvelope<C, P>) -> Result<()> {
    write_json(path, envelope)
}

pub fn read_report<C: DeserializeOwned, P: DeserializeOwned>(path: &Path) -> Result<ReportEnvelope<C, P>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let payload = vec![0.1 + 0.2, 1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -0.0];
        let env = ReportEnvelope::new("test", "cfg".to_string(), payload.clone());
        write_report(&path, &env).unwrap();
        let back: ReportEnvelope<String, Vec<f64>> = read_report(&path).unwrap();
        for (a, b) in back.payload.iter().zip(&payload) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.command, "test");
    }
}
