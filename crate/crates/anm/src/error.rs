use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for p={p}")]
    NodeOutOfRange { node: usize, p: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge set contains a directed cycle")]
    Cyclic,
    #[error("node count {p} exceeds supported maximum {max}")]
    TooManyNodes { p: usize, max: usize },
    #[error("refusing to enumerate DAGs for p={p}: {count} graphs exceed the p<={cap} cap")]
    EnumerationCap { p: usize, cap: usize, count: u128 },
    #[error("DAG count for p={0} overflows the counter")]
    CountOverflow(usize),
    #[error("node sets must be pairwise disjoint")]
    OverlappingSets,
    #[error("partially directed graph has no consistent DAG extension")]
    NotExtendable,
    #[error("graph text parse error at line {line}: {msg}")]
    GraphParse { line: usize, msg: String },

    #[error("dataset is empty")]
    EmptyData,
    #[error("dataset needs at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateName(String),
    #[error("column lengths differ: column {col} has {got} rows, expected {expect}")]
    RaggedColumns { col: usize, got: usize, expect: usize },
    #[error("csv error at row {row}, column {col}: {msg}")]
    CsvParse { row: usize, col: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("response {0} cannot be one of its own predictors")]
    ResponseInPredictors(usize),
    #[error("need n > {need} samples for {what}, got {got}")]
    TooFewSamples { need: usize, got: usize, what: &'static str },
    #[error("linear solve failed even with maximum jitter")]
    SingularSystem,
    #[error("regression on response {response} with predictors {predictors:?} failed: {source}")]
    RegressionFailed { response: usize, predictors: Vec<usize>, source: Box<Error> },

    #[error("matrices must have matching row counts: {0} vs {1}")]
    RowCountMismatch(usize, usize),
    #[error("block must have at least one column")]
    EmptyBlock,

    #[error("graphs have different node counts: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("{what} requires p <= {max}, got {got}")]
    ScaleCap { what: &'static str, max: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("family constraints violated: {0}")]
    FamilyConstraint(String),

    #[error("pair metadata error at line {line}: {msg}")]
    PairMeta { line: usize, msg: String },
    #[error("missing sample file for pair `{0}`")]
    PairFileMissing(String),
    #[error("pair `{id}` sample file error at line {line}: {msg}")]
    PairSample { id: String, line: usize, msg: String },
    #[error("no usable (non-skipped) pair records")]
    NoUsablePairs,

    #[error("bench config error: {0}")]
    BenchConfig(String),
}
