use std::path::PathBuf;

/// Errors surfaced by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("inadmissible cartoon: {0}")]
    Inadmissible(String),
    #[error("partition does not cover the domain: area defect {0:e}")]
    NonCovering(f64),
    #[error("inadmissible problem: {0}")]
    InadmissibleProblem(String),
    #[error("linear solve failed: {0}")]
    Factorization(String),
    #[error("solver did not reach errbound {target:e} within {cycles} cycles (last {last:e})")]
    NotConverged { target: f64, cycles: usize, last: f64 },
    #[error("direction node failed (level {level}, index {index}, theta {theta}): {source}")]
    Node {
        level: usize,
        index: usize,
        theta: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("config error{}: {msg}", at_line(*.line))]
    Config { line: usize, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Line 0 stands for the command line.
fn at_line(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line}")
    }
}

impl Error {
    /// True for failures caused by user configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
