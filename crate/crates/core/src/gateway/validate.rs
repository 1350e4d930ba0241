use serde::Serialize;

use crate::netcore::{validate_document, validate_parameters, Network, NetworkDocument};

/// One validation finding, located in the document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    /// JSON-pointer-style location such as `/nodes/3`.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.location, self.message)
    }
}

fn location(doc: &NetworkDocument, node: Option<&str>) -> String {
    node.and_then(|id| doc.nodes.iter().position(|n| n.id == id))
        .map_or_else(|| "/".to_string(), |i| format!("/nodes/{i}"))
}

/// Errors and warnings for a network document given as JSON text.
/// Parse failures are reported as a single error at the root.
pub fn diagnose(text: &str) -> Vec<Diagnostic> {
    let doc = match NetworkDocument::from_json(text) {
        Ok(d) => d,
        Err(e) => {
            return vec![Diagnostic {
                severity: Severity::Error,
                node: None,
                location: format!("line {}, column {}", e.line(), e.column()),
                message: format!("malformed network document: {e}"),
            }]
        }
    };
    let errors = validate_document(&doc);
    if !errors.is_empty() {
        return errors
            .iter()
            .map(|e| {
                let node = e.node().map(|n| n.to_string());
                Diagnostic {
                    severity: Severity::Error,
                    location: location(&doc, node.as_deref()),
                    node,
                    message: e.to_string(),
                }
            })
            .collect();
    }
    let net = Network::from_document(&doc).expect("document validated");
    validate_parameters(&net)
        .iter()
        .map(|w| {
            let node = match w {
                crate::netcore::Warning::Unreachable(id) => Some(id.to_string()),
                crate::netcore::Warning::ZeroProbabilityState { node, .. } => Some(node.to_string()),
                crate::netcore::Warning::ConstantShadowsPrior { constant, .. } => Some(constant.to_string()),
            };
            Diagnostic {
                severity: Severity::Warning,
                location: location(&doc, node.as_deref()),
                node,
                message: w.to_string(),
            }
        })
        .collect()
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
