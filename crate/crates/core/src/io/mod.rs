//! Files in and out: instances, wind series, layouts, drawings.

use std::path::PathBuf;

use thiserror::Error;

pub mod instance;
pub mod layout;
pub mod series;
pub mod svg;
pub mod synth;

pub use instance::{parse_instance, parse_instance_str, Currency, FarmInstance, SeriesSource};
pub use layout::{read_layout, LayoutFile};
pub use series::{parse_wind_series, parse_wind_series_str};
pub use svg::{render_svg, svg_string};
pub use synth::{gen_synthetic, synthetic_series, SynthParams};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("unit error at {pointer}: found `{found}`, expected `{expected}`")]
    Unit { pointer: String, found: String, expected: String },
    #[error("wind series row {row}: power {value} W outside [0, {max}]")]
    Range { row: usize, value: f64, max: f64 },
    #[error("wind series has {rows} rows; expected a positive multiple of 8760")]
    Length { rows: usize },
}

impl InputError {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        InputError::Schema { pointer: pointer.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        InputError::Io { path: path.into(), source }
    }
}
