//! The `qnet.json` network description: components, cascade chains,
//! uncertainty boxes and analysis requests.
//!
//! ```json
//! {
//!   "qnet_version": 1,
//!   "components": {"cav": {"modes": 1, "channels": 1, "S": [[[1, 0]]], ...}},
//!   "chains": {"pair": ["cav2", "cav"]},
//!   "uncertainties": {"box": {"target": "cav", "kind": "cavity_gamma_delta", ...}},
//!   "analyses": [{"kind": "sweep", "target": "cav", "uncertainty": "box", "grid": 11}]
//! }
//! ```
//!
//! Complex entries are `[re, im]`, matrices are arrays of rows. Chains list
//! members downstream first, so `["g2", "g1"]` is `g2 ◁ g1`.

pub mod json;
mod resolve;
mod schema;
mod write;

use std::collections::BTreeMap;
use std::fmt;

use crate::slh::SlhModel;
use crate::uncertainty::UncertaintyBox;

pub use json::Pos;
pub use resolve::{resolve_document, BoundUncertainty, ResolvedModels, Task};
pub use schema::parse_document;
pub use write::serialize_document;

pub const QNET_VERSION: u32 = 1;
pub const DEFAULT_SWEEP_GRID: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// Diagnostic codes: `ENCODING`, `SYNTAX`, `TYPE`, `UNKNOWN_FIELD`,
/// `MISSING_FIELD`, `VERSION`, `DUPLICATE_NAME`, `DANGLING_REFERENCE`,
/// `BINDING`, `INVALID_VALUE`, `DIMENSION`, `NON_FINITE`, `UNITARITY`,
/// `HERMITICITY`, `SYMMETRY`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub code: &'static str,
}

impl ParseDiagnostic {
    pub(crate) fn error(pos: Pos, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            line: pos.line,
            column: pos.column,
            message: message.into(),
            code,
        }
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} {}: {}",
            self.line,
            self.column,
            self.severity.as_str(),
            self.code,
            self.message
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    Validate,
    Statespace,
    Decompose,
    Verify,
    Sweep,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 5] = [
        AnalysisKind::Validate,
        AnalysisKind::Statespace,
        AnalysisKind::Decompose,
        AnalysisKind::Verify,
        AnalysisKind::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnalysisKind::Validate => "validate",
            AnalysisKind::Statespace => "statespace",
            AnalysisKind::Decompose => "decompose",
            AnalysisKind::Verify => "verify",
            AnalysisKind::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn needs_uncertainty(self) -> bool {
        matches!(
            self,
            AnalysisKind::Decompose | AnalysisKind::Verify | AnalysisKind::Sweep
        )
    }
}

/// One entry of `"analyses"`. `at` is used by decompose/verify, `grid` and
/// `margin` by sweep; the others keep their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub kind: AnalysisKind,
    pub target: String,
    pub uncertainty: Option<String>,
    pub at: Vec<(String, f64)>,
    pub grid: usize,
    pub margin: f64,
}

impl Analysis {
    pub fn new(kind: AnalysisKind, target: impl Into<String>) -> Self {
        Self {
            kind,
            target: target.into(),
            uncertainty: None,
            at: Vec::new(),
            grid: DEFAULT_SWEEP_GRID,
            margin: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyDecl {
    /// Component or chain name.
    pub target: String,
    pub ubox: UncertaintyBox,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkDocument {
    pub components: BTreeMap<String, SlhModel>,
    pub chains: BTreeMap<String, Vec<String>>,
    pub uncertainties: BTreeMap<String, UncertaintyDecl>,
    pub analyses: Vec<Analysis>,
}

impl NetworkDocument {
    /// Component or chain `(modes, channels)`, taking a chain's size from
    /// its first member.
    pub fn target_size(&self, name: &str) -> Option<(usize, usize)> {
        if let Some(c) = self.components.get(name) {
            return Some((c.n_modes, c.m_channels));
        }
        let first = self.chains.get(name)?.first()?;
        self.components.get(first).map(|c| (c.n_modes, c.m_channels))
    }
}

/// The cavity example document shipped with the crate.
pub const BUNDLED_CAVITY: &str = include_str!("../../data/cavity.qnet.json");
