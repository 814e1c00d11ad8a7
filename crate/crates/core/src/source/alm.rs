//! Mock ALM endpoint: a JSON document served over HTTP or read from disk.
//!
//! ```json
//! { "requirements": [
//!     { "id": "SWR-101", "title": "...", "status": "Approved",
//!       "last_modified": "2026-01-10T09:00:00Z", "category": "SWR",
//!       "scope": "feature/sensor-fusion" } ] }
//! ```
//!
//! `scope` may be omitted or `null`. Other keys are ignored.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::{validate, LoadOptions, RawRequirement, SourceError, SourceSnapshot};

/// Environment variable consulted by the CLI for the bearer token.
pub const TOKEN_ENV: &str = "REQTOCODE_ALM_TOKEN";

#[derive(Debug, Deserialize)]
struct Payload {
    requirements: Vec<PayloadRequirement>,
}

#[derive(Debug, Deserialize)]
struct PayloadRequirement {
    id: String,
    title: String,
    status: String,
    last_modified: String,
    category: String,
    #[serde(default)]
    scope: Option<String>,
}

fn is_http(endpoint: &str) -> bool {
    endpoint.starts_with("http://") || endpoint.starts_with("https://")
}

fn fetch(endpoint: &str, auth_token: Option<&str>) -> Result<String, SourceError> {
    let transport = |message: String| SourceError::Transport {
        endpoint: endpoint.to_string(),
        message,
    };
    if is_http(endpoint) {
        let mut request = ureq::get(endpoint).set("Accept", "application/json");
        if let Some(token) = auth_token {
            request = request.set("Authorization", &format!("Bearer {token}"));
        }
        let response = request.call().map_err(|e| transport(e.to_string()))?;
        let mut body = String::new();
        response
            .into_reader()
            .read_to_string(&mut body)
            .map_err(|e| transport(e.to_string()))?;
        Ok(body)
    } else {
        let path = endpoint.strip_prefix("file://").unwrap_or(endpoint);
        std::fs::read_to_string(Path::new(path)).map_err(|e| transport(e.to_string()))
    }
}

/// Loads a snapshot from the mock ALM payload at `endpoint` (URL or file path).
pub fn load_from_mock_alm(
    endpoint: &str,
    auth_token: Option<&str>,
    options: &LoadOptions,
) -> Result<SourceSnapshot, SourceError> {
    let body = fetch(endpoint, auth_token)?;
    let de = &mut serde_json::Deserializer::from_str(&body);
    let payload: Payload = serde_path_to_error::deserialize(de).map_err(|e| SourceError::Schema {
        endpoint: endpoint.to_string(),
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;

    let raw = payload
        .requirements
        .into_iter()
        .enumerate()
        .map(|(i, r)| RawRequirement {
            id: Some(r.id),
            title: Some(r.title),
            status: Some(r.status),
            last_modified: Some(r.last_modified),
            category: Some(r.category),
            scope: r.scope,
            extra: Default::default(),
            origin: format!("{endpoint}#requirements[{i}]"),
        })
        .collect();
    validate(raw, options, format!("alm:{endpoint}"))
}

/// Sends a rendered JSON report back to the mock ALM endpoint (HTTP POST), or
/// writes it to the path when the endpoint is not a URL.
pub fn post_report(endpoint: &str, auth_token: Option<&str>, json: &str) -> Result<(), SourceError> {
    let transport = |message: String| SourceError::Transport {
        endpoint: endpoint.to_string(),
        message,
    };
    if is_http(endpoint) {
        let mut request = ureq::post(endpoint).set("Content-Type", "application/json");
        if let Some(token) = auth_token {
            request = request.set("Authorization", &format!("Bearer {token}"));
        }
        request.send_string(json).map_err(|e| transport(e.to_string()))?;
        Ok(())
    } else {
        let path = endpoint.strip_prefix("file://").unwrap_or(endpoint);
        std::fs::write(path, json).map_err(|e| transport(e.to_string()))
    }
}
