//! Hourly per-turbine power series, one value (W) per CSV row.

use std::path::Path;

use super::InputError;
use crate::electrical::WindSeries;

pub const HOURS_PER_YEAR: usize = 8760;

/// Parses a series. An optional non-numeric header line is skipped; 8760
/// rows give one representative year, `8760·m` rows give `m` distinct years.
pub fn parse_wind_series_str(text: &str, rated_w: f64) -> Result<WindSeries, InputError> {
    let mut values = Vec::with_capacity(HOURS_PER_YEAR);
    for (n, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(p) => {
                if !(0.0..=rated_w * (1.0 + 1e-9)).contains(&p) {
                    return Err(InputError::Range { row: n + 1, value: p, max: rated_w });
                }
                values.push(p);
            }
            Err(_) if n == 0 => continue,
            Err(_) => {
                return Err(InputError::schema(format!("row {}", n + 1), format!("not a number: `{cell}`")));
            }
        }
    }
    if values.is_empty() || values.len() % HOURS_PER_YEAR != 0 {
        return Err(InputError::Length { rows: values.len() });
    }
    if values.len() == HOURS_PER_YEAR {
        return Ok(WindSeries::single_year(values));
    }
    Ok(WindSeries::per_year(values.chunks(HOURS_PER_YEAR).map(<[f64]>::to_vec).collect()))
}

pub fn parse_wind_series(path: &Path, rated_w: f64) -> Result<WindSeries, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    parse_wind_series_str(&text, rated_w)
}
