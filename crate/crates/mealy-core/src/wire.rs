//! Request and response shapes of the HTTP/JSON interface.
//!
//! The analysis reports serialize as-is; this module adds the machine
//! envelopes shared by the service, the client and the CLI.

use serde::{Deserialize, Serialize};

use crate::builtins;
use crate::error::{Error, Result};
use crate::format;
use crate::machine::MealyMachine;
use crate::minimize::StatePartition;

/// A machine reference in a request: exactly one of `builtin` or `text`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl MachineSource {
    pub fn builtin(name: &str) -> Self {
        MachineSource {
            builtin: Some(name.to_string()),
            text: None,
        }
    }

    pub fn text(text: &str) -> Self {
        MachineSource {
            builtin: None,
            text: Some(text.to_string()),
        }
    }

    pub fn resolve(&self) -> Result<MealyMachine> {
        builtins::resolve_source(self.builtin.as_deref(), self.text.as_deref())
    }

    /// Short descriptor echoed back in reports.
    pub fn describe(&self) -> String {
        match &self.builtin {
            Some(name) => format!("builtin:{name}"),
            None => "inline".to_string(),
        }
    }
}

/// Full machine payload: labels, tables, and the `.mealy` rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDto {
    pub states: Vec<String>,
    pub letters: Vec<String>,
    pub delta: Vec<Vec<u32>>,
    pub rho: Vec<Vec<u32>>,
    pub mealy: String,
}

impl From<&MealyMachine> for MachineDto {
    fn from(m: &MealyMachine) -> Self {
        MachineDto {
            states: (0..m.n_states() as u32).map(|x| m.state_name(x)).collect(),
            letters: (0..m.n_letters() as u32).map(|i| m.letter_name(i)).collect(),
            delta: (0..m.n_states() as u32)
                .map(|x| m.transition_row(x).to_vec())
                .collect(),
            rho: (0..m.n_states() as u32).map(|x| m.output_row(x).to_vec()).collect(),
            mealy: format::render(m),
        }
    }
}

impl MachineDto {
    /// The `.mealy` text is authoritative when converting back.
    pub fn to_machine(&self) -> Result<MealyMachine> {
        format::parse(&self.mealy)
    }
}

/// A report tagged with the machine it describes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub machine: String,
    #[serde(flatten)]
    pub report: T,
}

pub fn tagged<T>(source: &MachineSource, report: T) -> Tagged<T> {
    Tagged {
        machine: source.describe(),
        report,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineResponse {
    pub machine: MachineDto,
}

/// Summary facts about one machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoReport {
    pub states: usize,
    pub letters: usize,
    pub state_labels: Vec<String>,
    pub letter_labels: Vec<String>,
    pub invertible: bool,
    pub reversible: bool,
    pub connected: bool,
    pub components: usize,
    pub msize: u64,
}

impl InfoReport {
    pub fn of(m: &MealyMachine) -> InfoReport {
        let components = m.connected_components().len();
        let (minimized, _) = crate::minimize::minimize(m);
        InfoReport {
            states: m.n_states(),
            letters: m.n_letters(),
            state_labels: (0..m.n_states() as u32).map(|x| m.state_name(x)).collect(),
            letter_labels: (0..m.n_letters() as u32).map(|i| m.letter_name(i)).collect(),
            invertible: m.is_invertible(),
            reversible: m.is_reversible(),
            connected: components == 1,
            components,
            msize: minimized.n_states() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionDto {
    pub classes: Vec<Vec<String>>,
    pub rounds: usize,
}

impl PartitionDto {
    pub fn of(m: &MealyMachine, part: &StatePartition) -> PartitionDto {
        PartitionDto {
            classes: part
                .classes
                .iter()
                .map(|c| c.iter().map(|&x| m.state_name(x)).collect())
                .collect(),
            rounds: part.rounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizeResponse {
    pub machine: MachineDto,
    pub partition: PartitionDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplyResponse {
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SameActionResponse {
    pub equal: bool,
    pub left_digest: String,
    pub right_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DotResponse {
    pub dot: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltinEntry {
    pub name: String,
    pub mealy: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltinList {
    pub builtins: Vec<BuiltinEntry>,
    /// The open-ended family pattern also accepted by lookups.
    pub patterns: Vec<String>,
}

// --- request bodies -------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MachineRequest {
    pub machine: MachineSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductRequest {
    pub left: MachineSource,
    pub right: MachineSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRequest {
    pub machine: MachineSource,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApplyRequest {
    pub machine: MachineSource,
    /// State word, rendered with the machine's labels.
    pub u: String,
    /// Letter word; empty string is the empty word.
    pub s: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitiveRequest {
    pub machine: MachineSource,
    pub depth: usize,
    #[serde(default)]
    pub dual: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsizesRequest {
    pub machine: MachineSource,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRequest {
    pub machine: MachineSource,
    pub max_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    /// Count over the symmetric generating set (states and inverses).
    #[serde(default)]
    pub group: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyRequest {
    pub machine: MachineSource,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Request {
    pub machine: MachineSource,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropositionRequest {
    pub machine: MachineSource,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinitenessRequest {
    pub machine: MachineSource,
    pub depth: usize,
    pub bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreenessRequest {
    pub machine: MachineSource,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationsRequest {
    pub machine: MachineSource,
    pub max_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SameActionRequest {
    pub left: MachineSource,
    pub u: String,
    pub right: MachineSource,
    pub v: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusRequest {
    pub states: usize,
    pub letters: usize,
    pub depth: usize,
    #[serde(default = "default_true")]
    pub invertible: bool,
    #[serde(default = "default_true")]
    pub reversible: bool,
    #[serde(default)]
    pub up_to_iso: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

fn default_true() -> bool {
    true
}

/// Error payload: `{"error": {"code": "...", "message": "..."}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

/// Stable error code for each failure class.
pub fn error_code(err: &Error) -> &'static str {
    match err {
        Error::Parse(_) => "parse-error",
        Error::UnknownBuiltin(_) => "unknown-builtin",
        Error::NotInvertible { .. } => "not-invertible",
        Error::NotReversible { .. } => "not-reversible",
        Error::AlphabetMismatch { .. } => "alphabet-mismatch",
        Error::InvalidState { .. } | Error::InvalidLetter { .. } => "invalid-index",
        Error::EmptyStateWord => "empty-state-word",
        Error::SizeLimitExceeded { .. } => "size-limit-exceeded",
        Error::CapExceeded { .. } => "cap-exceeded",
        Error::HypothesisUnmet(_) => "hypothesis-unmet",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::WordParse { .. } => "word-parse-error",
    }
}
