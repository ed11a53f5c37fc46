use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),
    /// A closed-form derivative was requested on a set where the field is not
    /// single valued. Use `calculus::singular_dir_deriv` there.
    #[error("singular point: {0}")]
    SingularPoint(String),
    /// Two consecutive path samples are too far apart in planar angle.
    #[error("path resolution too coarse: {0} (refine path)")]
    Resolution(String),
    /// A path enters the axis tube.
    #[error("path meets the x3 axis: {0}")]
    SingularPath(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// geometry of the field.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Resolution(_))
    }
}
