//! JSON report documents. The report body is serialised once; its digest
//! and the wall time sit beside it so that reruns with the same
//! configuration produce byte-identical bodies.

use serde::Serialize;
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Document<'a> {
    pub report: &'a RawValue,
    pub body_sha256: String,
    pub wall_time_s: f64,
}

/// Canonical serialisation of a report body.
pub fn body_json<T: Serialize>(body: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(body)
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Wraps a serialised body with its digest and the wall time.
pub fn document_json(body: &str, wall_time_s: f64) -> serde_json::Result<String> {
    let raw = RawValue::from_string(body.to_string())?;
    let doc = Document { report: &raw, body_sha256: sha256_hex(body), wall_time_s };
    serde_json::to_string_pretty(&doc)
}

/// The body of a document produced by [`document_json`].
pub fn extract_body(document: &str) -> serde_json::Result<String> {
    #[derive(serde::Deserialize)]
    struct Doc<'a> {
        #[serde(borrow)]
        report: &'a RawValue,
    }
    let doc: Doc = serde_json::from_str(document)?;
    Ok(doc.report.get().to_string())
}
