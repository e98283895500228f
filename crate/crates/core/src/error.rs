use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("expected {expected} channel(s), got {actual}")]
    ChannelCount { expected: usize, actual: usize },

    #[error("image too small: {width}x{height}, need at least {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("empty lightness: the lightness plane has no nonzero pixel")]
    EmptyLightness,

    #[error("uncontrollable lightness: the lightness gain does not depend on gamma")]
    UncontrollableLightness,

    #[error("curve pole: a*gamma + b = 0 at gamma = {0}")]
    CurvePole(f64),

    #[error("{path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
        if a == b {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: a.0,
                left_height: a.1,
                right_width: b.0,
                right_height: b.1,
            })
        }
    }
}
