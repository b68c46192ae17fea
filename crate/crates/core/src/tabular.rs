//! Typed tabular data model: schema, CSV ingestion, categorical encoding,
//! fold-safe scaling, and projection onto feature groups.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::select::FeatureGroupSpec;

/// What a column holds: a fixed categorical level set or a real measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Categorical { levels: Vec<String> },
    Continuous { unit: String },
}

impl FeatureKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, FeatureKind::Categorical { .. })
    }
}

/// Predictor provenance: patient lifestyle/anthropometric (extrinsic),
/// labor/obstetric (intrinsic), or a predicted result (outcome).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Intrinsic,
    Extrinsic,
    Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.clone()) {
                return Err(Error::Schema(format!("duplicate column name `{}`", c.name)));
            }
            if let FeatureKind::Categorical { levels } = &c.kind {
                if levels.is_empty() {
                    return Err(Error::Schema(format!("column `{}` has no levels", c.name)));
                }
                let uniq: HashSet<&String> = levels.iter().collect();
                if uniq.len() != levels.len() {
                    return Err(Error::Schema(format!(
                        "column `{}` has duplicate levels",
                        c.name
                    )));
                }
            }
        }
        Ok(Schema { columns })
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&ColumnSpec, Error> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn names_with_role(&self, role: Role) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| c.role == role)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn from_json_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let schema: Schema = serde_json::from_str(&text)?;
        Schema::new(schema.columns)
    }

    pub fn to_json_file(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Column-oriented cell storage. Categorical cells are level indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnValues {
    Categorical(Vec<usize>),
    Continuous(Vec<f64>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Categorical(v) => v.len(),
            ColumnValues::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell as a real number: the level code for categoricals.
    pub fn as_f64(&self, row: usize) -> f64 {
        match self {
            ColumnValues::Categorical(v) => v[row] as f64,
            ColumnValues::Continuous(v) => v[row],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub schema: Schema,
    pub columns: Vec<ColumnValues>,
    pub n_rows: usize,
}

impl Dataset {
    pub fn new(schema: Schema, columns: Vec<ColumnValues>) -> Result<Self, Error> {
        if columns.len() != schema.columns.len() {
            return Err(Error::Schema(format!(
                "expected {} columns, got {}",
                schema.columns.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map(|c| c.len()).unwrap_or(0);
        for (spec, col) in schema.columns.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::Schema(format!(
                    "column `{}` has {} rows, expected {}",
                    spec.name,
                    col.len(),
                    n_rows
                )));
            }
            match (&spec.kind, col) {
                (FeatureKind::Categorical { levels }, ColumnValues::Categorical(codes)) => {
                    if let Some((row, &code)) =
                        codes.iter().enumerate().find(|(_, &c)| c >= levels.len())
                    {
                        return Err(Error::BadCell {
                            row,
                            column: spec.name.clone(),
                            reason: format!("level index {code} out of range"),
                        });
                    }
                }
                (FeatureKind::Continuous { .. }, ColumnValues::Continuous(vals)) => {
                    if let Some((row, _)) =
                        vals.iter().enumerate().find(|(_, v)| !v.is_finite())
                    {
                        return Err(Error::BadCell {
                            row,
                            column: spec.name.clone(),
                            reason: "non-finite value".to_string(),
                        });
                    }
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "column `{}` storage does not match its declared kind",
                        spec.name
                    )));
                }
            }
        }
        Ok(Dataset {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn column_values(&self, name: &str) -> Result<&ColumnValues, Error> {
        let idx = self
            .schema
            .position(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        Ok(&self.columns[idx])
    }

    /// Class labels for a categorical (outcome) column.
    pub fn labels(&self, name: &str) -> Result<Vec<usize>, Error> {
        match self.column_values(name)? {
            ColumnValues::Categorical(codes) => Ok(codes.clone()),
            ColumnValues::Continuous(_) => Err(Error::NotCategorical(name.to_string())),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.schema.columns.iter().map(|c| c.name.as_str()))?;
        for row in 0..self.n_rows {
            let mut rec = Vec::with_capacity(self.columns.len());
            for col in &self.columns {
                rec.push(match col {
                    ColumnValues::Categorical(v) => v[row].to_string(),
                    ColumnValues::Continuous(v) => format!("{}", v[row]),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parse a CSV file against a schema. Header names must match the schema
/// (any order). Categorical cells may be the integer code or the level name.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<Dataset, Error> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = rdr.headers()?.clone();
    let mut header_to_schema = Vec::with_capacity(headers.len());
    let mut seen = vec![false; schema.columns.len()];
    for h in headers.iter() {
        let idx = schema
            .position(h.trim())
            .ok_or_else(|| Error::UnknownColumn(h.trim().to_string()))?;
        header_to_schema.push(idx);
        seen[idx] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Schema(format!(
            "csv is missing column `{}`",
            schema.columns[missing].name
        )));
    }

    let mut columns: Vec<ColumnValues> = schema
        .columns
        .iter()
        .map(|c| match c.kind {
            FeatureKind::Categorical { .. } => ColumnValues::Categorical(Vec::new()),
            FeatureKind::Continuous { .. } => ColumnValues::Continuous(Vec::new()),
        })
        .collect();

    for (row_idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header_to_schema.len() {
            return Err(Error::BadCell {
                row: row_idx + 1,
                column: String::new(),
                reason: format!(
                    "expected {} fields, got {}",
                    header_to_schema.len(),
                    record.len()
                ),
            });
        }
        for (field, &schema_idx) in record.iter().zip(&header_to_schema) {
            let spec = &schema.columns[schema_idx];
            let cell = field.trim();
            if cell.is_empty() {
                return Err(Error::BadCell {
                    row: row_idx + 1,
                    column: spec.name.clone(),
                    reason: "missing value".to_string(),
                });
            }
            match (&spec.kind, &mut columns[schema_idx]) {
                (FeatureKind::Categorical { levels }, ColumnValues::Categorical(out)) => {
                    let code = parse_categorical(cell, levels).ok_or_else(|| Error::BadCell {
                        row: row_idx + 1,
                        column: spec.name.clone(),
                        reason: format!(
                            "`{cell}` is not one of the {} declared levels",
                            levels.len()
                        ),
                    })?;
                    out.push(code);
                }
                (FeatureKind::Continuous { .. }, ColumnValues::Continuous(out)) => {
                    let v: f64 = cell.parse().map_err(|_| Error::BadCell {
                        row: row_idx + 1,
                        column: spec.name.clone(),
                        reason: format!("`{cell}` is not a number"),
                    })?;
                    out.push(v);
                }
                _ => unreachable!("storage built from schema"),
            }
        }
    }
    Dataset::new(schema.clone(), columns)
}

fn parse_categorical(cell: &str, levels: &[String]) -> Option<usize> {
    if let Some(idx) = levels.iter().position(|l| l == cell) {
        return Some(idx);
    }
    cell.parse::<usize>().ok().filter(|&c| c < levels.len())
}

/// Label-encode a categorical column. Codes follow schema declaration order.
pub fn encode_categorical(
    dataset: &Dataset,
    column: &str,
) -> Result<(Vec<usize>, Vec<(String, usize)>), Error> {
    let spec = dataset.schema.column(column)?;
    let levels = match &spec.kind {
        FeatureKind::Categorical { levels } => levels,
        FeatureKind::Continuous { .. } => return Err(Error::NotCategorical(column.to_string())),
    };
    let codes = dataset.labels(column)?;
    let mapping = levels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    Ok((codes, mapping))
}

/// How a feature-matrix column was produced from its source column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Categorical level index carried as a real value.
    LabelCode,
    /// Continuous measurement, unscaled.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProvenance {
    pub source: String,
    pub encoding: Encoding,
}

/// Row-major real matrix with per-column provenance. Never contains an
/// outcome column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub columns: Vec<ColumnProvenance>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Indices of columns that came from continuous source variables.
    pub fn continuous_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.encoding == Encoding::Raw)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.rows[i].clone()).collect()
    }
}

/// Project a dataset onto a feature group. Outcome columns are rejected.
pub fn project_group(dataset: &Dataset, group: &FeatureGroupSpec) -> Result<FeatureMatrix, Error> {
    let mut columns = Vec::with_capacity(group.members.len());
    let mut cols = Vec::with_capacity(group.members.len());
    for name in group.executable_members() {
        let spec = dataset.schema.column(name)?;
        if spec.role == Role::Outcome {
            return Err(Error::OutcomeLeakage {
                group: group.name.to_string(),
                column: name.to_string(),
            });
        }
        let values = dataset.column_values(name)?;
        let encoding = if spec.kind.is_categorical() {
            Encoding::LabelCode
        } else {
            Encoding::Raw
        };
        columns.push(ColumnProvenance {
            source: name.to_string(),
            encoding,
        });
        cols.push(values);
    }
    let rows = (0..dataset.n_rows)
        .map(|r| cols.iter().map(|c| c.as_f64(r)).collect())
        .collect();
    Ok(FeatureMatrix { rows, columns })
}

/// Per-column standardization parameters, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    /// Column indices within the matrix this scaler applies to.
    pub cols: Vec<usize>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Columns that were constant on the training rows (sd = 0); these are
    /// centered but not divided.
    pub constant: Vec<bool>,
    /// Row indices the parameters were fitted on (audit trail).
    pub fitted_rows: Vec<usize>,
}

/// Sample mean and n-1 standard deviation of the given columns over the
/// given training rows.
pub fn fit_scaler(
    matrix: &FeatureMatrix,
    train_rows: &[usize],
    cols: &[usize],
) -> Result<ScalerParams, Error> {
    if train_rows.len() < 2 {
        return Err(Error::Scaler(format!(
            "need at least 2 training rows, got {}",
            train_rows.len()
        )));
    }
    let n = train_rows.len() as f64;
    let mut means = Vec::with_capacity(cols.len());
    let mut sds = Vec::with_capacity(cols.len());
    let mut constant = Vec::with_capacity(cols.len());
    for &c in cols {
        if c >= matrix.n_cols() {
            return Err(Error::Scaler(format!("column index {c} out of range")));
        }
        let mean = train_rows.iter().map(|&r| matrix.rows[r][c]).sum::<f64>() / n;
        let ss = train_rows
            .iter()
            .map(|&r| {
                let d = matrix.rows[r][c] - mean;
                d * d
            })
            .sum::<f64>();
        let sd = (ss / (n - 1.0)).sqrt();
        means.push(mean);
        sds.push(sd);
        constant.push(sd == 0.0);
    }
    Ok(ScalerParams {
        cols: cols.to_vec(),
        means,
        sds,
        constant,
        fitted_rows: train_rows.to_vec(),
    })
}

/// Standardize rows in place: z = (x - mean) / sd; constant columns are
/// centered only.
pub fn apply_scaler(params: &ScalerParams, rows: &mut [Vec<f64>]) -> Result<(), Error> {
    for row in rows.iter_mut() {
        for (k, &c) in params.cols.iter().enumerate() {
            if c >= row.len() {
                return Err(Error::Scaler(format!("column index {c} out of range")));
            }
            let centered = row[c] - params.means[k];
            row[c] = if params.constant[k] {
                centered
            } else {
                centered / params.sds[k]
            };
        }
    }
    Ok(())
}

/// Min-max parameters mapping each column onto [0, 1]; used for classifiers
/// that require non-negative inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    pub fitted_rows: Vec<usize>,
}

pub fn fit_minmax(matrix: &FeatureMatrix, train_rows: &[usize]) -> Result<MinMaxParams, Error> {
    if train_rows.is_empty() {
        return Err(Error::Empty);
    }
    let d = matrix.n_cols();
    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    for &r in train_rows {
        for c in 0..d {
            let v = matrix.rows[r][c];
            mins[c] = mins[c].min(v);
            maxs[c] = maxs[c].max(v);
        }
    }
    Ok(MinMaxParams {
        mins,
        maxs,
        fitted_rows: train_rows.to_vec(),
    })
}

/// Map rows onto [0, 1] per column; out-of-range held-out values clamp to
/// the boundary, constant columns map to 0.
pub fn apply_minmax(params: &MinMaxParams, rows: &mut [Vec<f64>]) {
    for row in rows.iter_mut() {
        for c in 0..params.mins.len().min(row.len()) {
            let span = params.maxs[c] - params.mins[c];
            row[c] = if span == 0.0 {
                0.0
            } else {
                ((row[c] - params.mins[c]) / span).clamp(0.0, 1.0)
            };
        }
    }
}

/// The published-study cohort schema: 19 extrinsic, 12 intrinsic, and
/// 8 outcome columns.
pub fn paper_schema() -> Schema {
    fn cat(name: &str, role: Role, levels: &[&str]) -> ColumnSpec {
        ColumnSpec {
            name: name.to_string(),
            kind: FeatureKind::Categorical {
                levels: levels.iter().map(|s| s.to_string()).collect(),
            },
            role,
        }
    }
    fn cont(name: &str, role: Role, unit: &str) -> ColumnSpec {
        ColumnSpec {
            name: name.to_string(),
            kind: FeatureKind::Continuous {
                unit: unit.to_string(),
            },
            role,
        }
    }
    use Role::{Extrinsic, Intrinsic, Outcome};
    let yn = ["No", "Yes"];
    let columns = vec![
        // Extrinsic: patient lifestyle / anthropometric characteristics.
        cont("AGE", Extrinsic, "years"),
        cont("NUM_LABOURS", Extrinsic, "count"),
        cat(
            "DIC_NULLIPAROUS",
            Extrinsic,
            &["No previous labors", "With previous labors"],
        ),
        cont("HEIGHT", Extrinsic, "cm"),
        cont("WEIGHT", Extrinsic, "kg"),
        cont("BMI", Extrinsic, "kg/m2"),
        cat(
            "CAT_BMI",
            Extrinsic,
            &["Underweight", "Normal-weight", "Overweight"],
        ),
        cont("EXTRA_KG", Extrinsic, "kg"),
        cat(
            "CAT_EXTRAKG",
            Extrinsic,
            &["10 kg or less", "11 to 15", "16 to 20", "21 to 25"],
        ),
        cat("LABOUR_PREP", Extrinsic, &["Without help", "With help"]),
        cat(
            "PROF_CHBPR",
            Extrinsic,
            &["No", "Midwife", "Midwife and Physiotherapy"],
        ),
        cat("PA_PREV", Extrinsic, &yn),
        cat(
            "FREQ_PAPREV",
            Extrinsic,
            &["No", "1 to 3 times a week", "More than 3 times a week"],
        ),
        cat("IPAQ", Extrinsic, &["Low", "Moderate", "Vigorous"]),
        cat("WALKING", Extrinsic, &yn),
        cat("STRENGTH", Extrinsic, &yn),
        cat("PILATES", Extrinsic, &yn),
        cat("AQUAGYM", Extrinsic, &yn),
        cont("NUM_PA", Extrinsic, "count"),
        // Intrinsic: labor / obstetric characteristics.
        cont("WEEK_LABOUR", Intrinsic, "weeks"),
        cat("INJURY", Intrinsic, &yn),
        cat("EPISIOTOMY", Intrinsic, &yn),
        cat("TEARING", Intrinsic, &["No", "Slight", "Moderate"]),
        cont("DURATION", Intrinsic, "hours"),
        cat("LITOTHOMY", Intrinsic, &yn),
        cat(
            "POSTURE",
            Intrinsic,
            &["Lithotomy", "Side", "Sitting / squatting", "Standing"],
        ),
        cat("ANALGESIA", Intrinsic, &yn),
        cat(
            "TYPE_ANALGESIA",
            Intrinsic,
            &["No", "Local", "Epidural", "Espinal"],
        ),
        cat(
            "TYPE_LABOUR",
            Intrinsic,
            &["Euthocic", "Forceps/Spatulae", "Vacuum cups"],
        ),
        cat("KRISTELLER", Intrinsic, &yn),
        cont("WEIGHT_BABY", Intrinsic, "g"),
        // Outcomes.
        cont("VAS_PERINE", Outcome, "VAS"),
        cat("UI", Outcome, &yn),
        cat("FREQ_UI", Outcome, &["No", "Sporadic", "Daily"]),
        cat("INT_UI", Outcome, &["No", "Mild", "Moderate", "Severe"]),
        cat("AFFECT_UI", Outcome, &yn),
        cat("BLADD_HYPER", Outcome, &yn),
        cat("STRESS_UI", Outcome, &yn),
        cat(
            "UI_PREV",
            Outcome,
            &["No", "Bladder hyperactivity", "Stress"],
        ),
    ];
    Schema::new(columns).expect("paper schema is well-formed")
}

/// The four prediction targets.
pub const TARGETS: [&str; 4] = ["UI", "STRESS_UI", "FREQ_UI", "INT_UI"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::{FeatureGroupSpec, GroupName, GroupProvenance};
    use std::io::Write;

    fn tiny_schema() -> Schema {
        Schema::new(vec![
            ColumnSpec {
                name: "AGE".into(),
                kind: FeatureKind::Continuous { unit: "years".into() },
                role: Role::Extrinsic,
            },
            ColumnSpec {
                name: "UI".into(),
                kind: FeatureKind::Categorical {
                    levels: vec!["0".into(), "1".into()],
                },
                role: Role::Outcome,
            },
        ])
        .unwrap()
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_csv_parses_cells() {
        let f = write_csv("AGE,UI\n31,1\n");
        let ds = load_csv(f.path(), &tiny_schema()).unwrap();
        assert_eq!(ds.n_rows, 1);
        assert_eq!(ds.column_values("AGE").unwrap().as_f64(0), 31.0);
        assert_eq!(ds.labels("UI").unwrap(), vec![1]);
    }

    #[test]
    fn load_csv_rejects_out_of_range_level() {
        let f = write_csv("AGE,UI\n31,2\n");
        let err = load_csv(f.path(), &tiny_schema()).unwrap_err();
        match err {
            Error::BadCell { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "UI");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_header_only() {
        let f = write_csv("UI,AGE\n");
        let ds = load_csv(f.path(), &tiny_schema()).unwrap();
        assert_eq!(ds.n_rows, 0);
    }

    #[test]
    fn load_csv_rejects_missing_cell() {
        let f = write_csv("AGE,UI\n,1\n");
        assert!(load_csv(f.path(), &tiny_schema()).is_err());
    }

    #[test]
    fn encode_follows_schema_order() {
        let schema = paper_schema();
        let n = schema.columns.len();
        let columns = schema
            .columns
            .iter()
            .map(|c| match &c.kind {
                FeatureKind::Categorical { .. } => ColumnValues::Categorical(vec![]),
                FeatureKind::Continuous { .. } => ColumnValues::Continuous(vec![]),
            })
            .collect::<Vec<_>>();
        assert_eq!(columns.len(), n);
        let ds = Dataset::new(schema, columns).unwrap();
        let (_, mapping) = encode_categorical(&ds, "CAT_BMI").unwrap();
        assert_eq!(
            mapping,
            vec![
                ("Underweight".to_string(), 0),
                ("Normal-weight".to_string(), 1),
                ("Overweight".to_string(), 2),
            ]
        );
    }

    #[test]
    fn encode_rejects_continuous() {
        let ds = Dataset::new(
            tiny_schema(),
            vec![
                ColumnValues::Continuous(vec![1.0]),
                ColumnValues::Categorical(vec![0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            encode_categorical(&ds, "AGE"),
            Err(Error::NotCategorical(_))
        ));
    }

    fn matrix(cols: usize, rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix {
            columns: (0..cols)
                .map(|i| ColumnProvenance {
                    source: format!("c{i}"),
                    encoding: Encoding::Raw,
                })
                .collect(),
            rows,
        }
    }

    #[test]
    fn scaler_mean_sd() {
        let m = matrix(1, vec![vec![1.0], vec![2.0], vec![3.0]]);
        let p = fit_scaler(&m, &[0, 1, 2], &[0]).unwrap();
        assert_eq!(p.means, vec![2.0]);
        assert_eq!(p.sds, vec![1.0]);
        assert!(!p.constant[0]);
    }

    #[test]
    fn scaler_constant_column_flagged() {
        let m = matrix(1, vec![vec![5.0], vec![5.0]]);
        let p = fit_scaler(&m, &[0, 1], &[0]).unwrap();
        assert_eq!(p.means, vec![5.0]);
        assert_eq!(p.sds, vec![0.0]);
        assert!(p.constant[0]);
        // constant column passes through centered
        let mut rows = vec![vec![7.0]];
        apply_scaler(&p, &mut rows).unwrap();
        assert_eq!(rows[0][0], 2.0);
    }

    #[test]
    fn scaler_hand_case() {
        let m = matrix(1, vec![vec![0.0], vec![0.0], vec![0.0], vec![4.0]]);
        let p = fit_scaler(&m, &[0, 1, 2, 3], &[0]).unwrap();
        assert_eq!(p.means, vec![1.0]);
        assert_eq!(p.sds, vec![2.0]);
    }

    #[test]
    fn apply_scaler_affine() {
        let m = matrix(1, vec![vec![1.0], vec![2.0], vec![3.0]]);
        let p = fit_scaler(&m, &[0, 1, 2], &[0]).unwrap();
        let mut rows = vec![vec![1.0], vec![2.0], vec![3.0], vec![10.0]];
        apply_scaler(&p, &mut rows).unwrap();
        assert_eq!(
            rows,
            vec![vec![-1.0], vec![0.0], vec![1.0], vec![8.0]]
        );
    }

    #[test]
    fn scaled_train_columns_are_standard() {
        let m = matrix(
            1,
            vec![vec![3.1], vec![-2.0], vec![0.5], vec![9.9], vec![4.2]],
        );
        let rows_idx = [0, 1, 2, 3, 4];
        let p = fit_scaler(&m, &rows_idx, &[0]).unwrap();
        let mut rows = m.rows.clone();
        apply_scaler(&p, &mut rows).unwrap();
        let n = rows.len() as f64;
        let mean = rows.iter().map(|r| r[0]).sum::<f64>() / n;
        let sd = (rows.iter().map(|r| (r[0] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 1e-9);
        assert!((sd - 1.0).abs() < 1e-9);
    }

    #[test]
    fn project_group_rejects_outcome() {
        let ds = Dataset::new(
            tiny_schema(),
            vec![
                ColumnValues::Continuous(vec![1.0]),
                ColumnValues::Categorical(vec![0]),
            ],
        )
        .unwrap();
        let group = FeatureGroupSpec {
            name: GroupName::Extrinsic,
            members: vec!["AGE".into(), "UI".into()],
            flagged: vec![],
            role_conflicts: vec![],
            provenance: GroupProvenance::SchemaDerived,
        };
        assert!(matches!(
            project_group(&ds, &group),
            Err(Error::OutcomeLeakage { .. })
        ));
    }

    #[test]
    fn paper_schema_counts() {
        let s = paper_schema();
        assert_eq!(s.names_with_role(Role::Extrinsic).len(), 19);
        assert_eq!(s.names_with_role(Role::Intrinsic).len(), 12);
        assert_eq!(s.names_with_role(Role::Outcome).len(), 8);
        for t in TARGETS {
            assert_eq!(s.column(t).unwrap().role, Role::Outcome);
        }
    }

    #[test]
    fn minmax_maps_to_unit_interval_and_clamps() {
        let m = matrix(1, vec![vec![2.0], vec![6.0]]);
        let p = fit_minmax(&m, &[0, 1]).unwrap();
        let mut rows = vec![vec![2.0], vec![4.0], vec![6.0], vec![8.0], vec![0.0]];
        apply_minmax(&p, &mut rows);
        assert_eq!(
            rows,
            vec![vec![0.0], vec![0.5], vec![1.0], vec![1.0], vec![0.0]]
        );
    }
}
