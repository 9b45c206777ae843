//! Phase-tagged diagnostics with block locations.
//!
//! Every user-facing failure in the toolchain is reported as a [`Diagnostic`]:
//! well-formedness violations, runtime contract violations, type restriction
//! errors, compile errors and mapped verifier errors all share this shape so
//! the CLI can render them uniformly.

use serde::{Deserialize, Serialize};

use crate::ast::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Which stage of the pipeline produced the diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Parse,
    Wellformed,
    Runtime,
    Typecheck,
    Compile,
    Static,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub phase: Phase,
    /// Stable `E_*` / `W_*` code.
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_id: Option<NodeId>,
    /// 1-based index of the failing conjunct, for contract slots.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_index: Option<usize>,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub call_chain: Option<Vec<NodeId>>,
}

impl Diagnostic {
    pub fn error(phase: Phase, code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            phase,
            code: code.to_string(),
            block_id: None,
            slot_index: None,
            message: message.into(),
            call_chain: None,
        }
    }

    pub fn warning(phase: Phase, code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Self::error(phase, code, message)
        }
    }

    pub fn at(mut self, block_id: impl Into<NodeId>) -> Self {
        self.block_id = Some(block_id.into());
        self
    }

    pub fn slot(mut self, index: usize) -> Self {
        self.slot_index = Some(index);
        self
    }

    pub fn with_chain(mut self, chain: Vec<NodeId>) -> Self {
        self.call_chain = Some(chain);
        self
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}]", self.code)?;
        if let Some(id) = &self.block_id {
            write!(f, " at {id}")?;
        }
        if let Some(slot) = self.slot_index {
            write!(f, " (slot {slot})")?;
        }
        write!(f, ": {}", self.message)
    }
}
