//! State files: TOML or JSON with exactly one of `matrix`, `bloch`, `x_state`.

use std::path::Path;

use corrlab::smallalg::{CMatrix, Complex64, RMatrix};
use corrlab::states::{check_positive_with, decompose_with, BlochDecomposition};
use corrlab::Tolerances;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_state: Option<XStateSpec>,
}

/// Row-major entries as `[re, im]` pairs, either flat or one list per row.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    #[serde(rename = "d_A", alias = "d_a")]
    pub d_a: usize,
    pub entries: Entries,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochSpec {
    #[serde(rename = "d_A", alias = "d_a")]
    pub d_a: usize,
    #[serde(rename = "r_A", alias = "r_a")]
    pub r_a: Vec<f64>,
    #[serde(rename = "r_B", alias = "r_b")]
    pub r_b: [f64; 3],
    /// `d_A^2 - 1` rows of 3.
    #[serde(rename = "C", alias = "c")]
    pub c: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XStateSpec {
    #[serde(rename = "r_A", alias = "r_a")]
    pub r_a: f64,
    #[serde(rename = "r_B", alias = "r_b")]
    pub r_b: f64,
    #[serde(rename = "J_x", alias = "j_x")]
    pub j_x: f64,
    #[serde(rename = "J_y", alias = "j_y")]
    pub j_y: f64,
    #[serde(rename = "J_z", alias = "j_z")]
    pub j_z: f64,
}

pub fn read_state_file(path: &Path) -> Result<StateFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_state_file(&text, path.extension().and_then(|e| e.to_str()))
}

pub fn parse_state_file(text: &str, extension: Option<&str>) -> Result<StateFile, CliError> {
    let file: StateFile = match extension {
        Some("json") => serde_json::from_str(text).map_err(|e| CliError::parse(format!("JSON: {e}")))?,
        Some("toml") => toml::from_str(text).map_err(|e| CliError::parse(format!("TOML: {e}")))?,
        _ => toml::from_str(text).or_else(|te| {
            serde_json::from_str(text).map_err(|je| CliError::parse(format!("neither TOML ({te}) nor JSON ({je})")))
        })?,
    };
    let present = [file.matrix.is_some(), file.bloch.is_some(), file.x_state.is_some()]
        .iter()
        .filter(|&&p| p)
        .count();
    if present != 1 {
        return Err(CliError::parse(format!(
            "state file must contain exactly one of `matrix`, `bloch`, `x_state` (found {present})"
        )));
    }
    Ok(file)
}

impl StateFile {
    /// Builds the state and rejects it unless it is positive within tolerance.
    pub fn to_state(&self, tol: &Tolerances) -> Result<BlochDecomposition, CliError> {
        let b = if let Some(m) = &self.matrix {
            let rho = m.to_matrix()?;
            decompose_with(&rho, m.d_a, tol.hermitian)?
        } else if let Some(s) = &self.bloch {
            let rows = s.c.len();
            let c = RMatrix::from_rows(&s.c).map_err(|e| CliError::parse(format!("C: {e}")))?;
            if c.cols() != 3 || rows + 1 != s.d_a * s.d_a {
                return Err(CliError::parse(format!(
                    "C must have d_A^2 - 1 = {} rows of 3 entries",
                    (s.d_a * s.d_a).saturating_sub(1)
                )));
            }
            BlochDecomposition::new(s.d_a, s.r_a.clone(), s.r_b, c)?
        } else {
            let x = self.x_state.expect("one form present");
            let c = RMatrix::diag(&[x.j_x, x.j_y, x.j_z - x.r_a * x.r_b]);
            BlochDecomposition::new(2, vec![0.0, 0.0, x.r_a], [0.0, 0.0, x.r_b], c)?
        };
        let pos = check_positive_with(&b.to_density_matrix(), tol.positivity);
        if !pos.positive {
            return Err(CliError::invalid_state(format!(
                "state is not positive (smallest eigenvalue {:e})",
                pos.min_eigenvalue
            )));
        }
        Ok(b)
    }
}

impl MatrixSpec {
    fn to_matrix(&self) -> Result<CMatrix, CliError> {
        let flat: Vec<[f64; 2]> = match &self.entries {
            Entries::Flat(v) => v.clone(),
            Entries::Rows(rows) => rows.concat(),
        };
        let dim = 2 * self.d_a;
        if flat.len() != dim * dim {
            return Err(CliError::parse(format!(
                "matrix with d_A = {} needs {} entries, found {}",
                self.d_a,
                dim * dim,
                flat.len()
            )));
        }
        let entries = flat.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(CMatrix::from_row_major(dim, entries)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_two_forms() {
        let text = "[x_state]\nr_A = 0\nr_B = 0\nJ_x = 0\nJ_y = 0\nJ_z = 0\n[bloch]\nd_A = 2\nr_A = [0,0,0]\nr_B = [0,0,0]\nC = [[0,0,0],[0,0,0],[0,0,0]]\n";
        assert_eq!(parse_state_file(text, Some("toml")).unwrap_err().code, 2);
    }

    #[test]
    fn nested_and_flat_entries_agree() {
        let flat = r#"{"matrix": {"d_A": 2, "entries": [[0.5,0],[0,0],[0,0],[0.5,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.5,0],[0,0],[0,0],[0.5,0]]}}"#;
        let a = parse_state_file(flat, Some("json")).unwrap().to_state(&Tolerances::default()).unwrap();
        let rows = "[matrix]\nd_A = 2\nentries = [[[0.5,0],[0,0],[0,0],[0.5,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0.5,0],[0,0],[0,0],[0.5,0]]]\n";
        let b = parse_state_file(rows, None).unwrap().to_state(&Tolerances::default()).unwrap();
        assert_eq!(a, b);
        assert!((b.correlations()[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_state_positivity_enforced() {
        let text = "[x_state]\nr_A = 0.9\nr_B = 0.25\nJ_x = 0.9\nJ_y = 0.9\nJ_z = -0.5\n";
        let f = parse_state_file(text, None).unwrap();
        assert_eq!(f.to_state(&Tolerances::default()).unwrap_err().code, 3);
    }

    #[test]
    fn bloch_shape_checked() {
        let text = "[bloch]\nd_A = 3\nr_A = [0,0,0,0,0,0,0,0]\nr_B = [0,0,0]\nC = [[0,0,0]]\n";
        let f = parse_state_file(text, None).unwrap();
        assert_eq!(f.to_state(&Tolerances::default()).unwrap_err().code, 2);
    }
}
