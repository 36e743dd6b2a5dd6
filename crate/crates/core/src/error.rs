use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("circulant embedding is not nonnegative definite: clipped mass fraction {clipped_fraction:e} at circulant size {circulant_size}")]
    EmbeddingNotPsd {
        clipped_fraction: f64,
        circulant_size: usize,
    },

    #[error("grid spacing {nominal:e} is finer than the lattice mesh {mesh:e}; refine the mesh")]
    GridFinerThanMesh { nominal: f64, mesh: f64 },

    #[error("Gaussian vector is zero at lattice index {index}")]
    DegenerateZeroVector { index: usize },

    #[error("Pickands-grid term {term} exceeds the Frechet bound {bound}")]
    FrechetViolation { term: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("config parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("output directory {0} already contains results; pass --force to overwrite")]
    OutputExists(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numerical, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) => 2,
            Error::Io(_) | Error::OutputExists(_) => 4,
            Error::EmbeddingNotPsd { .. }
            | Error::GridFinerThanMesh { .. }
            | Error::DegenerateZeroVector { .. }
            | Error::FrechetViolation { .. }
            | Error::Domain(_)
            | Error::Quadrature(_) => 3,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
