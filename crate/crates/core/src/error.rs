use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("both components of a single-qubit state are zero")]
    ZeroVector,
    #[error("malformed exact number or state: {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error(
        "constraints do not meet: first ends at vertex {left_end}, second starts at {right_start}"
    )]
    MismatchedJunction { left_end: u32, right_start: u32 },
    #[error("path has {edges} edges but {constraints} constraints were given")]
    LengthMismatch { edges: usize, constraints: usize },
    #[error("constraint {index} does not lie on path edge ({u}, {v})")]
    OffPath { index: usize, u: u32, v: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("{m} edges requested but a simple graph on {n} vertices has at most {max}")]
    TooManyEdges { n: u32, m: u64, max: u64 },
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("lattice side length must be at least 2, got {0}")]
    LatticeTooSmall(u32),
    #[error("lattice dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(u8),
    #[error("edge ({0}, {1}) is a loop or refers to a missing vertex")]
    BadEdge(u32, u32),
    #[error("edge ({0}, {1}) appears more than once")]
    ParallelEdge(u32, u32),
    #[error("graph carries no lattice geometry")]
    NotALattice,
    #[error("cycle length {len} outside the enumerable range 3..={max}")]
    CycleLength { len: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("invalid factor distribution: {0}")]
    Distribution(String),
    #[error("edge {edge}: no non-frustrating constraint found in {budget} draws")]
    ResampleBudgetExhausted { edge: usize, budget: u32 },
    #[error("{edges} edges but {constraints} constraints")]
    ConstraintCount { edges: usize, constraints: usize },
    #[error("factor index {index} out of range for f = {f}")]
    FactorOutOfRange { index: usize, f: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("instance is frustrated; fixed states are only defined for satisfiable instances")]
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error(
        "component {component} has {size} qubits, above the cap of {cap} (raise --max-component)"
    )]
    ComponentTooLarge {
        component: usize,
        size: usize,
        cap: usize,
    },
    #[error("invalid rank backend configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
