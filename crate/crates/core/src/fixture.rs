//! Embedded fixture: the published per-experiment F1 matrix (31 rows by 6
//! variable groups), the published per-group summary statistics, and the
//! published top-3 table. FREQ_UI has only 7 model rows in the printed
//! record ("KNN imp. SMOTE" is absent there), which is what makes the row
//! count 8 + 7 + 8 + 8 = 31.

use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::select::GroupName;

/// Canonical model row order of the published F1 table.
pub const MODEL_ORDER: [&str; 8] = [
    "GaussianNB",
    "ComplementNB",
    "KNN",
    "DT",
    "KNN improved",
    "DT improved",
    "KNN imp. randover",
    "KNN imp. SMOTE",
];

/// Target row order of the published F1 table.
pub const TARGET_ORDER: [&str; 4] = ["UI", "FREQ_UI", "INT_UI", "STRESS_UI"];

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureRow {
    pub target: &'static str,
    pub model: &'static str,
    /// F1 per group, in [Int, Int best, Ext, Ext best, All, Best of all]
    /// order.
    pub f1: [f64; 6],
}

/// One published top-3 entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BestModelRow {
    pub target: &'static str,
    pub group: GroupName,
    pub model: &'static str,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaperFixture {
    pub rows: Vec<FixtureRow>,
    /// Published per-group (N, mean, SD) in group column order.
    pub group_summary: [(usize, f64, f64); 6],
    pub best_models: Vec<BestModelRow>,
    /// Published t-test reports: (comparison, t, df, p).
    pub reported_t: [(&'static str, f64, f64, f64); 2],
    /// Published group means in percent: intrinsic, extrinsic,
    /// intrinsic best, extrinsic best.
    pub discussion_means_pct: [f64; 4],
}

fn row(target: &'static str, model: &'static str, f1: [f64; 6]) -> FixtureRow {
    FixtureRow { target, model, f1 }
}

pub fn paper_fixture() -> PaperFixture {
    use GroupName::*;
    let rows = vec![
        row("UI", "GaussianNB", [0.58, 0.43, 0.37, 0.42, 0.46, 0.33]),
        row("UI", "ComplementNB", [0.10, 0.50, 0.46, 0.58, 0.26, 0.55]),
        row("UI", "KNN", [0.36, 0.30, 0.32, 0.46, 0.26, 0.30]),
        row("UI", "DT", [0.59, 0.39, 0.30, 0.42, 0.26, 0.37]),
        row("UI", "KNN improved", [0.32, 0.30, 0.24, 0.53, 0.26, 0.37]),
        row("UI", "DT improved", [0.43, 0.39, 0.43, 0.51, 0.26, 0.59]),
        row("UI", "KNN imp. randover", [0.53, 0.34, 0.50, 0.70, 0.26, 0.53]),
        row("UI", "KNN imp. SMOTE", [0.43, 0.41, 0.56, 0.62, 0.26, 0.59]),
        row("FREQ_UI", "GaussianNB", [0.18, 0.27, 0.70, 0.60, 0.61, 0.65]),
        row("FREQ_UI", "ComplementNB", [0.22, 0.55, 0.70, 0.71, 0.50, 0.70]),
        row("FREQ_UI", "KNN", [0.67, 0.64, 0.75, 0.56, 0.50, 0.77]),
        row("FREQ_UI", "DT", [0.74, 0.69, 0.72, 0.55, 0.50, 0.73]),
        row("FREQ_UI", "KNN improved", [0.69, 0.73, 0.61, 0.58, 0.50, 0.73]),
        row("FREQ_UI", "DT improved", [0.44, 0.73, 0.77, 0.50, 0.50, 0.73]),
        row("FREQ_UI", "KNN imp. randover", [0.27, 0.32, 0.67, 0.57, 0.50, 0.59]),
        row("INT_UI", "GaussianNB", [0.58, 0.32, 0.37, 0.42, 0.48, 0.33]),
        row("INT_UI", "ComplementNB", [0.11, 0.50, 0.37, 0.58, 0.26, 0.55]),
        row("INT_UI", "KNN", [0.36, 0.30, 0.32, 0.46, 0.26, 0.30]),
        row("INT_UI", "DT", [0.59, 0.37, 0.30, 0.42, 0.26, 0.37]),
        row("INT_UI", "KNN improved", [0.32, 0.34, 0.24, 0.53, 0.26, 0.50]),
        row("INT_UI", "DT improved", [0.43, 0.39, 0.43, 0.51, 0.26, 0.59]),
        row("INT_UI", "KNN imp. randover", [0.53, 0.34, 0.50, 0.70, 0.26, 0.53]),
        row("INT_UI", "KNN imp. SMOTE", [0.44, 0.58, 0.57, 0.71, 0.26, 0.62]),
        row("STRESS_UI", "GaussianNB", [0.46, 0.59, 0.72, 0.87, 0.73, 0.08]),
        row("STRESS_UI", "ComplementNB", [0.34, 0.81, 0.67, 0.64, 0.56, 0.68]),
        row("STRESS_UI", "KNN", [0.73, 0.81, 0.77, 0.73, 0.56, 0.81]),
        row("STRESS_UI", "DT", [0.59, 0.81, 0.93, 0.93, 0.56, 0.87]),
        row("STRESS_UI", "KNN improved", [0.79, 0.81, 0.71, 0.84, 0.56, 0.81]),
        row("STRESS_UI", "DT improved", [0.73, 0.81, 0.85, 0.93, 0.56, 0.87]),
        row("STRESS_UI", "KNN imp. randover", [0.87, 0.67, 0.70, 0.74, 0.56, 0.79]),
        row("STRESS_UI", "KNN imp. SMOTE", [0.74, 0.74, 0.73, 0.70, 0.56, 0.74]),
    ];
    let group_summary = [
        (31, 0.49, 0.20),
        (31, 0.52, 0.19),
        (31, 0.56, 0.20),
        (31, 0.61, 0.15),
        (31, 0.42, 0.15),
        (31, 0.58, 0.20),
    ];
    let best_models = vec![
        BestModelRow { target: "UI", group: ExtrinsicBest, model: "KNN imp. randover", f1: 0.70 },
        BestModelRow { target: "UI", group: ExtrinsicBest, model: "KNN imp. SMOTE", f1: 0.62 },
        BestModelRow { target: "UI", group: BestOfAll, model: "DT improved", f1: 0.59 },
        BestModelRow { target: "STRESS_UI", group: All, model: "DT", f1: 0.93 },
        BestModelRow { target: "STRESS_UI", group: ExtrinsicBest, model: "DT", f1: 0.93 },
        BestModelRow { target: "STRESS_UI", group: ExtrinsicBest, model: "DT improved", f1: 0.93 },
        BestModelRow { target: "FREQ_UI", group: BestOfAll, model: "KNN", f1: 0.77 },
        BestModelRow { target: "FREQ_UI", group: Extrinsic, model: "DT improved", f1: 0.77 },
        BestModelRow { target: "FREQ_UI", group: Extrinsic, model: "KNN", f1: 0.75 },
        BestModelRow { target: "INT_UI", group: ExtrinsicBest, model: "KNN imp. SMOTE", f1: 0.71 },
        BestModelRow { target: "INT_UI", group: ExtrinsicBest, model: "KNN imp. randover", f1: 0.70 },
        BestModelRow { target: "INT_UI", group: BestOfAll, model: "KNN imp. SMOTE", f1: 0.62 },
    ];
    PaperFixture {
        rows,
        group_summary,
        best_models,
        reported_t: [
            ("intrinsic vs extrinsic", -1.960, 30.0, 0.045),
            ("intrinsic_best vs extrinsic_best", -1.960, 30.0, 0.002),
        ],
        discussion_means_pct: [48.92, 55.65, 52.25, 61.35],
    }
}

impl PaperFixture {
    /// F1 values of one group column across all 31 rows.
    pub fn column(&self, group: GroupName) -> Vec<f64> {
        let idx = GroupName::ORDER
            .iter()
            .position(|&g| g == group)
            .expect("known group");
        self.rows.iter().map(|r| r.f1[idx]).collect()
    }

    /// Canonical byte encoding of the F1 matrix, hashed for integrity.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for row in &self.rows {
            hasher.update(row.target.as_bytes());
            hasher.update(b"|");
            hasher.update(row.model.as_bytes());
            for v in row.f1 {
                hasher.update(format!("|{v:.2}").as_bytes());
            }
            hasher.update(b"\n");
        }
        format!("{:x}", hasher.finalize())
    }

    /// Refuse to operate on an edited fixture.
    pub fn verify_integrity(&self) -> Result<(), Error> {
        let got = self.checksum();
        if got != FIXTURE_CHECKSUM {
            return Err(Error::FixtureCorrupt(format!(
                "checksum {got} != pinned {FIXTURE_CHECKSUM}"
            )));
        }
        if self.rows.len() != 31 {
            return Err(Error::FixtureCorrupt(format!(
                "{} rows, expected 31",
                self.rows.len()
            )));
        }
        if self
            .rows
            .iter()
            .any(|r| r.f1.iter().any(|&v| !(0.0..=1.0).contains(&v)))
        {
            return Err(Error::FixtureCorrupt("F1 out of [0,1]".into()));
        }
        Ok(())
    }
}

/// Pinned SHA-256 of the embedded F1 matrix.
pub const FIXTURE_CHECKSUM: &str =
    "8ccbe8b04f92b0bc2f9824d154332edc6589570fcf32cc90d67a5b00a4f23688";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_31_rows() {
        let f = paper_fixture();
        assert_eq!(f.rows.len(), 31);
        let freq_rows = f.rows.iter().filter(|r| r.target == "FREQ_UI").count();
        assert_eq!(freq_rows, 7);
        assert!(!f
            .rows
            .iter()
            .any(|r| r.target == "FREQ_UI" && r.model == "KNN imp. SMOTE"));
    }

    #[test]
    fn integrity_pin_matches() {
        paper_fixture().verify_integrity().unwrap();
    }

    #[test]
    fn integrity_detects_edit() {
        let mut f = paper_fixture();
        f.rows[0].f1[0] = 0.99;
        assert!(f.verify_integrity().is_err());
    }
}
