use thiserror::Error;

/// Errors raised by constructors and operations of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("distance matrix has {rows} rows but {labels} labels")]
    DimensionMismatch { labels: usize, rows: usize },
    #[error("row {row} of the distance matrix has {len} entries, expected {expected}")]
    RaggedMatrix { row: usize, len: usize, expected: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("distance({a}, {b}) is not a finite number")]
    NonFinite { a: String, b: String },
    #[error("distance({a}, {b}) = {value} is negative")]
    NegativeDistance { a: String, b: String, value: f64 },
    #[error("distance({a}, {b}) = {ab} differs from distance({b}, {a}) = {ba}")]
    AsymmetricMatrix { a: String, b: String, ab: f64, ba: f64 },
    #[error("diagonal entry for `{label}` is {value}, expected 0")]
    NonzeroDiagonal { label: String, value: f64 },
    #[error("triangle inequality fails for ({a}, {b}, {c}): {ac} > {ab} + {bc}")]
    TriangleViolation {
        a: String,
        b: String,
        c: String,
        ab: f64,
        bc: f64,
        ac: f64,
    },
    #[error("points `{a}` and `{b}` are at distance {value} <= eps")]
    DuplicatePoint { a: String, b: String, value: f64 },

    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("oriented Hausdorff distance to an empty set is undefined")]
    EmptyTarget,
    #[error("subsets live in different ambient spaces")]
    DifferentAmbient,

    #[error("correspondence does not cover {side} index {index}")]
    CoverageViolation { side: Side, index: usize },
    #[error("correspondence is sized {got:?}, spaces are sized {expected:?}")]
    SizeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("exact search over {cells} cells exceeds the budget of {max_cells}")]
    BudgetExceeded { cells: usize, max_cells: usize },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge index {index} out of range ({len} edges)")]
    UnknownEdge { index: usize, len: usize },
    #[error("edge {edge} has nonpositive length {length}")]
    NonpositiveLength { edge: usize, length: f64 },
    #[error("edge {edge} closes a cycle")]
    Cycle { edge: usize },
    #[error("tree is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("offset {offset} lies outside edge {edge} of length {length}")]
    OffsetOutOfRange { edge: usize, offset: f64, length: f64 },
    #[error("interval [{a}, {b}] is invalid on edge {edge} of length {length}")]
    BadInterval { edge: usize, a: f64, b: f64, length: f64 },
    #[error("subset belongs to a different tree")]
    DifferentTree,

    #[error("parameter {t} lies outside [0, {d}]")]
    OutOfRange { t: f64, d: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Which side of a correspondence an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
