//! Layout JSON: the solution plus its audit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::InputError;
use crate::model::LayoutSolution;
use crate::validate::Violation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub instance: String,
    pub layout: LayoutSolution,
    /// Violations found by the audit when the file was written.
    pub validate: Vec<Violation>,
}

impl LayoutFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn write(&self, path: &Path) -> Result<(), InputError> {
        std::fs::write(path, self.to_json()).map_err(|e| InputError::io(path, e))
    }
}

pub fn read_layout(path: &Path) -> Result<LayoutFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| InputError::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActiveArc, SolveStatus};

    #[test]
    fn round_trip() {
        let f = LayoutFile {
            instance: "x".into(),
            layout: LayoutSolution {
                arcs: vec![ActiveArc { tail: 1, head: 2, k: 1, cable: Some(0), cost: 0.125 }],
                sigma: vec![(1, 1)],
                objective: 0.125,
                best_bound: Some(0.12),
                status: SolveStatus::GapReached,
            },
            validate: vec![Violation::SigmaSum { sum: 1, expected: 2 }],
        };
        let back: LayoutFile = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(f.to_json().contains("\"validate\""));
    }
}
