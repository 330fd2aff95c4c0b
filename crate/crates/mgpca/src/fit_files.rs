//! A decomposition on disk: `U.csv`, one `V_<scale>.csv` per scale and `d.csv`.
//!
//! `U.csv` holds `subject_id,u1..uK`; `V_<scale>.csv` holds `node,v1..vK` with
//! 0-based node indices; `d.csv` holds `scale,d1..dK` with one row per scale
//! in fit order.

use std::path::Path;

use mgpca_core::{FitStatus, KruskalDecomposition, Matrix, ScaleFactors};

use crate::csv_io::{read_labeled, write_labeled, LabeledMatrix};
use crate::error::{CliError, Result};

/// Scale ids become file names, so they are restricted to a safe alphabet.
pub fn check_scale_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
        && id != "."
        && id != "..";
    if ok {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "scale id `{id}` must use only letters, digits, `_`, `-` and `.`"
        )))
    }
}

fn numbered(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|h| format!("{prefix}{h}")).collect()
}

/// Writes `<prefix>U.csv`, `<prefix>V_<scale>.csv` and `<prefix>d.csv`.
pub fn write_factors(
    dir: &Path,
    prefix: &str,
    scales: &[ScaleFactors],
    factors: &Matrix,
    subject_ids: &[String],
) -> Result<()> {
    let k = factors.cols();
    write_labeled(
        &dir.join(format!("{prefix}U.csv")),
        &LabeledMatrix {
            label_header: "subject_id".into(),
            columns: numbered("u", k),
            labels: subject_ids.to_vec(),
            values: factors.clone(),
        },
    )?;
    for s in scales {
        check_scale_id(&s.scale_id)?;
        write_labeled(
            &dir.join(format!("{prefix}V_{}.csv", s.scale_id)),
            &LabeledMatrix {
                label_header: "node".into(),
                columns: numbered("v", k),
                labels: (0..s.modes.rows()).map(|a| a.to_string()).collect(),
                values: s.modes.clone(),
            },
        )?;
    }
    let d: Vec<f64> = scales
        .iter()
        .flat_map(|s| s.weights.iter().copied())
        .collect();
    write_labeled(
        &dir.join(format!("{prefix}d.csv")),
        &LabeledMatrix {
            label_header: "scale".into(),
            columns: numbered("d", k),
            labels: scales.iter().map(|s| s.scale_id.clone()).collect(),
            values: Matrix::from_row_major(scales.len(), k, d)?,
        },
    )
}

#[derive(Debug, Clone)]
pub struct StoredFit {
    pub decomposition: KruskalDecomposition,
    pub subject_ids: Vec<String>,
}

impl StoredFit {
    pub fn save(&self, dir: &Path) -> Result<()> {
        write_factors(
            dir,
            "",
            self.decomposition.scales(),
            self.decomposition.factors(),
            &self.subject_ids,
        )
    }

    /// Loads and validates a fit; orthonormality is checked on assembly.
    pub fn load(dir: &Path) -> Result<Self> {
        let u = read_labeled(&dir.join("U.csv"))?;
        let d_path = dir.join("d.csv");
        let d = read_labeled(&d_path)?;
        let k = u.values.cols();
        if d.values.cols() != k {
            return Err(CliError::format(
                &d_path,
                format!("{} weights per scale for {k} components", d.values.cols()),
            ));
        }
        let mut scales = Vec::with_capacity(d.labels.len());
        for (j, id) in d.labels.iter().enumerate() {
            check_scale_id(id)?;
            let v_path = dir.join(format!("V_{id}.csv"));
            let v = read_labeled(&v_path)?;
            if v.values.cols() != k {
                return Err(CliError::format(
                    &v_path,
                    format!("{} modes for {k} components", v.values.cols()),
                ));
            }
            scales.push(ScaleFactors {
                scale_id: id.clone(),
                weights: d.values.row(j).to_vec(),
                modes: v.values,
            });
        }
        let decomposition =
            KruskalDecomposition::from_parts(scales, u.values, Vec::new(), FitStatus::Complete)
                .map_err(|e| CliError::Format(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            decomposition,
            subject_ids: u.labels,
        })
    }
}
