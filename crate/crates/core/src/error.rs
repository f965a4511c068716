use thiserror::Error;

use crate::geometry::MeshError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error(transparent)]
    Mesh(#[from] MeshError),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate system: sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")]
    DegenerateSystem { sigma_min: f64, sigma_max: f64 },

    #[error("wavenumber mismatch: field has k = {field}, eigenfunction has k = {eigen}")]
    WavenumberMismatch { field: f64, eigen: f64 },

    #[error("root bracket exhausted: found {found} of {wanted} roots of j_{order} below {limit}")]
    RootBracketExhausted {
        order: usize,
        wanted: usize,
        found: usize,
        limit: f64,
    },

    #[error("operation requires a {expected}, got a {got}")]
    UnsupportedShape {
        expected: &'static str,
        got: &'static str,
    },
}
