//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range, graph has {count} vertices")]
    VertexOutOfRange { vertex: u32, count: u32 },

    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(u32, u32),

    #[error("vertex {0} is isolated")]
    IsolatedVertex(u32),

    #[error("variable v{var} out of range, formula has {count} variables")]
    VariableOutOfRange { var: u32, count: u32 },

    #[error("variable v{var} occurs twice in clause {clause}")]
    RepeatedVariable { var: u32, clause: usize },

    #[error("assignment is partial: variable v{0} is unassigned")]
    PartialAssignment(u32),

    #[error("sequence is not a permutation of the vertex set")]
    NotAPermutation,

    #[error("{what}: limit is {limit}, got {actual}")]
    SizeLimit {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("node {node} out of range, program has {count} nodes")]
    NodeOutOfRange { node: u32, count: u32 },

    #[error("branching program contains a directed cycle")]
    CyclicProgram,

    #[error("node {0} has no in-edges but is not the root")]
    ExtraSource(u32),

    #[error("node {0} has no out-edges but is not the leaf")]
    ExtraSink(u32),

    #[error("malformed node {0}: {1}")]
    MalformedNode(u32, String),

    #[error("program is not clean: labelled edge #{0} enters a node with more than one in-neighbour")]
    NotClean(usize),

    #[error("program is not read-once")]
    NotReadOnce,

    #[error("program is not uniform")]
    NotUniform,

    #[error("edge #{0} is not irregular")]
    EdgeNotIrregular(usize),

    #[error("program computes the constant-false function")]
    ConstantFalse,

    #[error("no {t}-cover exists: a minimal vertex cover has size {smallest}")]
    NoTCover { t: u32, smallest: u32 },

    #[error("cover certificate verification failed: {0}")]
    CertificateInvalid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by exceeding a configured resource limit.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
