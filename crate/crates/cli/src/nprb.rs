//! NPRB1 embedding files.
//!
//! Line 1 is a UTF-8 JSON header
//! `{"magic":"NPRB1","model":..,"dim":..,"count":..,"order":[ids..]}` ending
//! in `\n`. It is followed by exactly `count * dim` little-endian `f32`
//! values, row-major, rows in header order.

use std::path::Path;

use normprobe_core::{ConceptId, EmbeddingTable};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MAGIC: &str = "NPRB1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub magic: String,
    pub model: String,
    pub dim: usize,
    pub count: usize,
    pub order: Vec<String>,
}

/// Serialises a table; values are narrowed to `f32`.
pub fn encode(table: &EmbeddingTable) -> Vec<u8> {
    let header = Header {
        magic: MAGIC.into(),
        model: table.model_name().to_owned(),
        dim: table.dim(),
        count: table.len(),
        order: table.ids().iter().map(|c| c.as_str().to_owned()).collect(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serialises");
    out.push(b'\n');
    out.reserve(table.values().len() * 4);
    for &v in table.values() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

/// Parses NPRB1 bytes; `path` is only used in error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<EmbeddingTable> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| CliError::format(path, Some(1), "missing header line"))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| CliError::format(path, Some(1), format!("invalid header: {e}")))?;
    if header.magic != MAGIC {
        return Err(CliError::format(
            path,
            Some(1),
            format!("magic is `{}`, expected `{MAGIC}`", header.magic),
        ));
    }
    if header.order.len() != header.count {
        return Err(CliError::format(
            path,
            Some(1),
            format!(
                "header count is {} but order lists {} ids",
                header.count,
                header.order.len()
            ),
        ));
    }
    let payload = &bytes[newline + 1..];
    let expected = header
        .count
        .checked_mul(header.dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| CliError::format(path, Some(1), "count * dim overflows"))?;
    if payload.len() != expected {
        return Err(CliError::format(
            path,
            None,
            format!(
                "payload is {} bytes, expected {expected} ({} x {} f32)",
                payload.len(),
                header.count,
                header.dim
            ),
        ));
    }
    let ids = header
        .order
        .iter()
        .map(ConceptId::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::format(path, Some(1), e.to_string()))?;
    let values = payload
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    EmbeddingTable::from_flat(header.model, header.dim, ids, values)
        .map_err(|e| CliError::format(path, None, e.to_string()))
}

pub fn read(path: &Path) -> Result<EmbeddingTable> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes, path)
}

pub fn write(path: &Path, table: &EmbeddingTable) -> Result<()> {
    crate::output::write_atomic(path, &encode(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        let ids = ["apple", "bread", "dog"]
            .iter()
            .map(|n| ConceptId::new(n).unwrap())
            .collect();
        EmbeddingTable::from_flat("m", 2, ids, vec![0.5, -1.0, 2.25, 0.0, 1e-3, 7.0]).unwrap()
    }

    #[test]
    fn bit_exact_layout() {
        let bytes = encode(&table());
        let header =
            br#"{"magic":"NPRB1","model":"m","dim":2,"count":3,"order":["apple","bread","dog"]}"#;
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes[header.len()], b'\n');
        let payload = &bytes[header.len() + 1..];
        assert_eq!(payload.len(), 24);
        assert_eq!(&payload[..4], &0.5f32.to_le_bytes());
        assert_eq!(&payload[4..8], &[0x00, 0x00, 0x80, 0xbf]);
    }

    #[test]
    fn round_trip_through_f32() {
        let t = table();
        let back = decode(&encode(&t), Path::new("t.nprb")).unwrap();
        assert_eq!(back.ids(), t.ids());
        for (a, b) in back.values().iter().zip(t.values()) {
            assert_eq!(*a, f64::from(*b as f32));
        }
    }

    #[test]
    fn malformed_files_are_format_errors() {
        let good = encode(&table());
        let p = Path::new("x.nprb");
        let truncated = &good[..good.len() - 1];
        let mut extra = good.clone();
        extra.push(0);
        let bad_magic = String::from_utf8_lossy(&good).replacen("NPRB1", "NPRB2", 1);
        for bytes in [truncated, &extra[..], bad_magic.as_bytes(), b"no newline"] {
            let err = decode(bytes, p).unwrap_err();
            assert_eq!(err.exit_code(), crate::error::exit::FORMAT, "{err}");
        }
        let mut nan = good.clone();
        let at = nan.len() - 4;
        nan[at..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode(&nan, p), Err(CliError::Format { .. })));
    }
}
