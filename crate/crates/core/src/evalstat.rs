//! Evaluation protocol: stratified folds, F1 scoring, cross-validation with
//! fold-safe preprocessing and oversampling, grid search, t-tests, and
//! per-group summary statistics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bayes::{
    fit_complement_nb, fit_gaussian_nb, predict_complement_nb, predict_gaussian_nb,
};
use crate::error::Error;
use crate::neighbors::{knn_predict, KnnModel, Weighting};
use crate::resample::{random_oversample, smote, Resampled, RowProvenance};
use crate::tabular::{apply_minmax, apply_scaler, fit_minmax, fit_scaler, FeatureMatrix};
use crate::tree::{fit_tree, predict_tree, Criterion, TreeParams};

// ---------------------------------------------------------------------------
// Folds

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    /// Per row: fold index in [0, k).
    pub assignment: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldAssignment {
    pub fn validation_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn training_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }
}

/// Partition rows into k folds. Stratified assignment keeps per-class fold
/// counts within 1 of each other while overall fold sizes also differ by at
/// most 1.
pub fn make_folds(
    y: &[usize],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<FoldAssignment, Error> {
    let n = y.len();
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if k > n {
        return Err(Error::TooManyFolds { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; n];
    if stratified {
        let mut fold_order: Vec<usize> = (0..k).collect();
        fold_order.shuffle(&mut rng);
        let mut classes: Vec<usize> = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        // Assign a global round-robin position across class blocks: each
        // class occupies a contiguous span of the counter, so both the
        // per-class and the overall fold counts stay within 1.
        let mut counter = 0usize;
        for c in classes {
            let mut members: Vec<usize> = (0..n).filter(|&i| y[i] == c).collect();
            members.shuffle(&mut rng);
            for i in members {
                assignment[i] = fold_order[counter % k];
                counter += 1;
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let base = n / k;
        let extra = n % k;
        let mut pos = 0;
        for f in 0..k {
            let size = base + usize::from(f < extra);
            for &i in &idx[pos..pos + size] {
                assignment[i] = f;
            }
            pos += size;
        }
    }
    Ok(FoldAssignment {
        assignment,
        k,
        seed,
        stratified,
    })
}

// ---------------------------------------------------------------------------
// F1

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum F1Averaging {
    Binary { pos: usize },
    Macro,
    Weighted,
}

/// F1 with the 0/0 := 0 convention applied per class.
pub fn f1_score(y_true: &[usize], y_pred: &[usize], averaging: F1Averaging) -> Result<f64, Error> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Empty);
    }
    let n_classes = y_true
        .iter()
        .chain(y_pred)
        .max()
        .map(|&m| m + 1)
        .unwrap_or(0);
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let f1_of = |c: usize| -> f64 {
        let p_den = tp[c] + fp[c];
        let r_den = tp[c] + fn_[c];
        let precision = if p_den == 0 { 0.0 } else { tp[c] as f64 / p_den as f64 };
        let recall = if r_den == 0 { 0.0 } else { tp[c] as f64 / r_den as f64 };
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    };
    Ok(match averaging {
        F1Averaging::Binary { pos } => {
            if pos >= n_classes {
                0.0
            } else {
                f1_of(pos)
            }
        }
        F1Averaging::Macro => {
            (0..n_classes).map(f1_of).sum::<f64>() / n_classes as f64
        }
        F1Averaging::Weighted => {
            let support: Vec<usize> = (0..n_classes)
                .map(|c| y_true.iter().filter(|&&t| t == c).count())
                .collect();
            let total: usize = support.iter().sum();
            (0..n_classes)
                .map(|c| f1_of(c) * support[c] as f64 / total as f64)
                .sum()
        }
    })
}

// ---------------------------------------------------------------------------
// Classifier specs (the eight trained configurations)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum HyperParams {
    Gaussian,
    Complement { alpha: f64 },
    Knn { k: usize, weighting: Weighting },
    Tree(TreeParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OversamplerKind {
    None,
    RandomOver,
    Smote { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub id: String,
    /// Default hyperparameters, used when the grid is empty.
    pub base: HyperParams,
    /// Grid-search candidates in declared order; empty for untuned models.
    pub grid: Vec<HyperParams>,
    pub oversampler: OversamplerKind,
}

impl ClassifierSpec {
    /// Oversamplers belong only to the "imp." configurations and grids only
    /// to tuned ones.
    pub fn validate(&self) -> Result<(), Error> {
        let has_oversampler = self.oversampler != OversamplerKind::None;
        if has_oversampler && !self.id.contains("imp.") {
            return Err(Error::Config(format!(
                "spec `{}` carries an oversampler but is not an imp. variant",
                self.id
            )));
        }
        if !self.grid.is_empty() && !(self.id.contains("improved") || self.id.contains("imp.")) {
            return Err(Error::Config(format!(
                "spec `{}` carries a grid but is not a tuned variant",
                self.id
            )));
        }
        Ok(())
    }
}

fn knn_grid() -> Vec<HyperParams> {
    let mut grid = Vec::new();
    for k in [1usize, 3, 5, 7, 9, 11, 15] {
        for weighting in [Weighting::Uniform, Weighting::InverseDistance] {
            grid.push(HyperParams::Knn { k, weighting });
        }
    }
    grid
}

fn tree_grid() -> Vec<HyperParams> {
    let mut grid = Vec::new();
    for criterion in [Criterion::Gini, Criterion::Entropy] {
        for max_depth in [Some(1), Some(2), Some(3), Some(5), Some(8), None] {
            for min_samples_split in [2usize, 5, 10] {
                grid.push(HyperParams::Tree(TreeParams {
                    criterion,
                    max_depth,
                    min_samples_split,
                }));
            }
        }
    }
    grid
}

/// The eight trained model configurations.
pub fn default_specs() -> Vec<ClassifierSpec> {
    let knn_default = HyperParams::Knn {
        k: 5,
        weighting: Weighting::Uniform,
    };
    vec![
        ClassifierSpec {
            id: "GaussianNB".into(),
            base: HyperParams::Gaussian,
            grid: vec![],
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "ComplementNB".into(),
            base: HyperParams::Complement { alpha: 1.0 },
            grid: vec![],
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "KNN".into(),
            base: knn_default.clone(),
            grid: vec![],
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "DT".into(),
            base: HyperParams::Tree(TreeParams::default()),
            grid: vec![],
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "KNN improved".into(),
            base: knn_default.clone(),
            grid: knn_grid(),
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "DT improved".into(),
            base: HyperParams::Tree(TreeParams::default()),
            grid: tree_grid(),
            oversampler: OversamplerKind::None,
        },
        ClassifierSpec {
            id: "KNN imp. randover".into(),
            base: knn_default.clone(),
            grid: knn_grid(),
            oversampler: OversamplerKind::RandomOver,
        },
        ClassifierSpec {
            id: "KNN imp. SMOTE".into(),
            base: knn_default,
            grid: knn_grid(),
            oversampler: OversamplerKind::Smote { k: 5 },
        },
    ]
}

// ---------------------------------------------------------------------------
// Cross-validation

/// Audit trail of one fold's data handling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAudit {
    pub train_rows: Vec<usize>,
    pub validation_rows: Vec<usize>,
    /// Rows the scaler was fitted on (dataset indices).
    pub scaler_rows: Vec<usize>,
    /// Original rows referenced by oversampled copies (dataset indices).
    pub oversample_sources: Vec<usize>,
}

impl FoldAudit {
    /// No validation row participated in scaler fitting or oversampling.
    pub fn leakage_free(&self) -> bool {
        let val: std::collections::HashSet<usize> =
            self.validation_rows.iter().copied().collect();
        self.scaler_rows.iter().all(|r| !val.contains(r))
            && self.oversample_sources.iter().all(|r| !val.contains(r))
            && self.scaler_rows.iter().all(|r| self.train_rows.contains(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVResult {
    pub per_fold_f1: Vec<f64>,
    pub mean_f1: f64,
    pub chosen: HyperParams,
    pub seed: u64,
    pub averaging: F1Averaging,
    /// Per-fold notes (missing classes, clamped k, SMOTE fallback).
    pub fold_notes: Vec<Vec<String>>,
    pub audits: Vec<FoldAudit>,
}

impl CVResult {
    pub fn leakage_free(&self) -> bool {
        self.audits.iter().all(FoldAudit::leakage_free)
    }
}

fn fit_and_score(
    hp: &HyperParams,
    train_x: &[Vec<f64>],
    train_y: &[usize],
    val_x: &[Vec<f64>],
    val_y: &[usize],
    averaging: F1Averaging,
    notes: &mut Vec<String>,
) -> Result<f64, Error> {
    let preds: Vec<usize> = match hp {
        HyperParams::Gaussian => {
            let model = fit_gaussian_nb(train_x, train_y)?;
            val_x
                .iter()
                .map(|r| predict_gaussian_nb(&model, r).map(|(l, _)| l))
                .collect::<Result<_, _>>()?
        }
        HyperParams::Complement { alpha } => match fit_complement_nb(train_x, train_y, *alpha) {
            Ok(model) => val_x
                .iter()
                .map(|r| predict_complement_nb(&model, r))
                .collect::<Result<_, _>>()?,
            Err(Error::SingleClass) => {
                // degenerate training fold: predict the lone class
                notes.push("training fold single-class; constant prediction".into());
                vec![train_y[0]; val_x.len()]
            }
            Err(e) => return Err(e),
        },
        HyperParams::Knn { k, weighting } => {
            let eff_k = (*k).min(train_x.len());
            if eff_k < *k {
                notes.push(format!("k clamped from {k} to {eff_k}"));
            }
            let model = KnnModel::fit(train_x.to_vec(), train_y.to_vec(), eff_k, *weighting)?;
            val_x
                .iter()
                .map(|r| knn_predict(&model, r).map(|(l, _)| l))
                .collect::<Result<_, _>>()?
        }
        HyperParams::Tree(params) => {
            let model = fit_tree(train_x, train_y, *params)?;
            val_x
                .iter()
                .map(|r| predict_tree(&model, r))
                .collect::<Result<_, _>>()?
        }
    };
    f1_score(val_y, &preds, averaging)
}

/// Run one hyperparameter setting through every fold. Scalers and
/// oversamplers see training rows only; the mean is the arithmetic mean of
/// per-fold F1 values.
pub fn cross_validate(
    spec: &ClassifierSpec,
    hp: &HyperParams,
    x: &FeatureMatrix,
    y: &[usize],
    folds: &FoldAssignment,
    averaging: F1Averaging,
    seed: u64,
) -> Result<CVResult, Error> {
    spec.validate()?;
    if folds.assignment.len() != y.len() || y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: folds.assignment.len(),
        });
    }
    let mut per_fold_f1 = Vec::with_capacity(folds.k);
    let mut fold_notes = Vec::with_capacity(folds.k);
    let mut audits = Vec::with_capacity(folds.k);
    for fold in 0..folds.k {
        let train_idx = folds.training_rows(fold);
        let val_idx = folds.validation_rows(fold);
        let mut notes = Vec::new();

        // fold-safe scaling: parameters come from training rows only
        let mut train_x = x.select_rows(&train_idx);
        let mut val_x = x.select_rows(&val_idx);
        let scaler_rows = match hp {
            HyperParams::Complement { .. } => {
                // complement NB needs non-negative inputs: min-max to [0,1]
                let params = fit_minmax(x, &train_idx)?;
                apply_minmax(&params, &mut train_x);
                apply_minmax(&params, &mut val_x);
                params.fitted_rows
            }
            _ => {
                let cont = x.continuous_columns();
                if cont.is_empty() || train_idx.len() < 2 {
                    train_idx.clone()
                } else {
                    let params = fit_scaler(x, &train_idx, &cont)?;
                    if params.constant.iter().any(|&c| c) {
                        notes.push("constant continuous column on training fold".into());
                    }
                    apply_scaler(&params, &mut train_x)?;
                    apply_scaler(&params, &mut val_x)?;
                    params.fitted_rows
                }
            }
        };

        let mut train_y: Vec<usize> = val_or_train_labels(y, &train_idx);
        let val_y: Vec<usize> = val_or_train_labels(y, &val_idx);

        let full_classes: std::collections::BTreeSet<usize> = y.iter().copied().collect();
        let fold_classes: std::collections::BTreeSet<usize> =
            train_y.iter().copied().collect();
        if fold_classes.len() < full_classes.len() {
            notes.push(format!(
                "training fold missing {} class(es); scored on remaining",
                full_classes.len() - fold_classes.len()
            ));
        }

        // oversample training rows only, never validation
        let fold_seed = crate::derive_seed(seed, &format!("{}/fold{}", spec.id, fold));
        let mut oversample_sources = Vec::new();
        if spec.oversampler != OversamplerKind::None && fold_classes.len() >= 2 {
            let resampled: Resampled = match spec.oversampler {
                OversamplerKind::RandomOver => {
                    random_oversample(&train_x, &train_y, fold_seed)?
                }
                OversamplerKind::Smote { k } => match smote(&train_x, &train_y, k, fold_seed) {
                    Ok(r) => {
                        if !r.clamped_k.is_empty() {
                            notes.push(format!("SMOTE k clamped: {:?}", r.clamped_k));
                        }
                        r
                    }
                    Err(Error::SmoteSingleton { class }) => {
                        notes.push(format!(
                            "SMOTE fallback to RandomOver: class {class} has one row"
                        ));
                        random_oversample(&train_x, &train_y, fold_seed)?
                    }
                    Err(e) => return Err(e),
                },
                OversamplerKind::None => unreachable!(),
            };
            // provenance indices are positions in the training subset; map
            // back to dataset row indices for the audit
            for p in &resampled.appended {
                match p {
                    RowProvenance::Duplicate { source } => {
                        oversample_sources.push(train_idx[*source]);
                    }
                    RowProvenance::Synthetic {
                        seed_row,
                        neighbor_row,
                        ..
                    } => {
                        oversample_sources.push(train_idx[*seed_row]);
                        oversample_sources.push(train_idx[*neighbor_row]);
                    }
                }
            }
            train_x = resampled.x;
            train_y = resampled.y;
        }

        let f1 = fit_and_score(
            hp,
            &train_x,
            &train_y,
            &val_x,
            &val_y,
            averaging,
            &mut notes,
        )?;
        per_fold_f1.push(f1);
        fold_notes.push(notes);
        audits.push(FoldAudit {
            train_rows: train_idx,
            validation_rows: val_idx,
            scaler_rows,
            oversample_sources,
        });
    }
    let mean_f1 = per_fold_f1.iter().sum::<f64>() / per_fold_f1.len() as f64;
    Ok(CVResult {
        per_fold_f1,
        mean_f1,
        chosen: hp.clone(),
        seed,
        averaging,
        fold_notes,
        audits,
    })
}

fn val_or_train_labels(y: &[usize], idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&i| y[i]).collect()
}

/// Evaluate every grid point on the same folds and keep the best mean F1.
/// Ties keep the earliest point in declared grid order. Returns the winner
/// and the number of evaluations performed.
pub fn grid_search(
    spec: &ClassifierSpec,
    x: &FeatureMatrix,
    y: &[usize],
    folds: &FoldAssignment,
    averaging: F1Averaging,
    seed: u64,
) -> Result<(CVResult, usize), Error> {
    let points: Vec<&HyperParams> = if spec.grid.is_empty() {
        vec![&spec.base]
    } else {
        spec.grid.iter().collect()
    };
    let mut best: Option<CVResult> = None;
    let mut evaluations = 0usize;
    for hp in points {
        let result = cross_validate(spec, hp, x, y, folds, averaging, seed)?;
        evaluations += 1;
        let better = best
            .as_ref()
            .map_or(true, |b| result.mean_f1 > b.mean_f1);
        if better {
            best = Some(result);
        }
    }
    Ok((best.expect("grid is non-empty"), evaluations))
}

// ---------------------------------------------------------------------------
// t-tests and group statistics

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestKind {
    Paired,
    IndependentPooled,
    IndependentWelch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub kind: TTestKind,
    pub t: f64,
    pub df: f64,
    pub p_two_sided: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub sd_a: f64,
    pub sd_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() < 2 {
        0.0
    } else {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, sd)
}

pub fn t_test(a: &[f64], b: &[f64], kind: TTestKind) -> Result<TTestResult, Error> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument(
            "each sample needs at least 2 values".into(),
        ));
    }
    let (mean_a, sd_a) = mean_sd(a);
    let (mean_b, sd_b) = mean_sd(b);
    let (t, df) = match kind {
        TTestKind::Paired => {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    got: b.len(),
                });
            }
            let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let (d_mean, d_sd) = mean_sd(&diffs);
            if d_sd == 0.0 {
                return Err(Error::ZeroVariance);
            }
            let n = diffs.len() as f64;
            (d_mean / (d_sd / n.sqrt()), n - 1.0)
        }
        TTestKind::IndependentPooled => {
            let na = a.len() as f64;
            let nb = b.len() as f64;
            let pooled_var =
                ((na - 1.0) * sd_a * sd_a + (nb - 1.0) * sd_b * sd_b) / (na + nb - 2.0);
            if pooled_var == 0.0 {
                return Err(Error::ZeroVariance);
            }
            let se = (pooled_var * (1.0 / na + 1.0 / nb)).sqrt();
            ((mean_a - mean_b) / se, na + nb - 2.0)
        }
        TTestKind::IndependentWelch => {
            let na = a.len() as f64;
            let nb = b.len() as f64;
            let va = sd_a * sd_a / na;
            let vb = sd_b * sd_b / nb;
            if va + vb == 0.0 {
                return Err(Error::ZeroVariance);
            }
            let se = (va + vb).sqrt();
            let df = (va + vb).powi(2)
                / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
            ((mean_a - mean_b) / se, df)
        }
    };
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    let p_two_sided = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TTestResult {
        kind,
        t,
        df,
        p_two_sided: p_two_sided.clamp(0.0, 1.0),
        mean_a,
        mean_b,
        sd_a,
        sd_b,
        n_a: a.len(),
        n_b: b.len(),
    })
}

/// Per-column N, mean, and n-1 SD of an F1 matrix given column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: Vec<usize>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

pub fn group_stats(columns: &[Vec<f64>]) -> Result<GroupStats, Error> {
    let mut n = Vec::with_capacity(columns.len());
    let mut mean = Vec::with_capacity(columns.len());
    let mut sd = Vec::with_capacity(columns.len());
    for col in columns {
        if col.is_empty() {
            return Err(Error::Empty);
        }
        let (m, s) = mean_sd(col);
        n.push(col.len());
        mean.push(m);
        sd.push(s);
    }
    Ok(GroupStats { n, mean, sd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn folds_leave_one_out_shape() {
        let y = vec![0; 10];
        let f = make_folds(&y, 10, 1, false).unwrap();
        for fold in 0..10 {
            assert_eq!(f.validation_rows(fold).len(), 1);
        }
    }

    #[test]
    fn folds_93_by_10() {
        let y: Vec<usize> = (0..93).map(|i| i % 2).collect();
        for stratified in [false, true] {
            let f = make_folds(&y, 10, 42, stratified).unwrap();
            let mut sizes: Vec<usize> =
                (0..10).map(|fold| f.validation_rows(fold).len()).collect();
            sizes.sort_unstable();
            // 93 = 7 folds of 9 + 3 folds of 10
            assert_eq!(sizes, vec![9, 9, 9, 9, 9, 9, 9, 10, 10, 10]);
        }
    }

    #[test]
    fn stratified_preserves_class_ratio() {
        let y: Vec<usize> = (0..100).map(|i| usize::from(i < 30)).collect();
        let f = make_folds(&y, 10, 7, true).unwrap();
        for fold in 0..10 {
            let rows = f.validation_rows(fold);
            let minority = rows.iter().filter(|&&i| y[i] == 1).count();
            assert!((2..=4).contains(&minority), "fold {fold}: {minority}");
        }
    }

    #[test]
    fn folds_partition_property() {
        for seed in 0..5u64 {
            for (n, k) in [(11usize, 2usize), (29, 7), (40, 10)] {
                let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
                for stratified in [false, true] {
                    let f = make_folds(&y, k, seed, stratified).unwrap();
                    let mut seen = vec![0usize; n];
                    for fold in 0..k {
                        for i in f.validation_rows(fold) {
                            seen[i] += 1;
                        }
                    }
                    assert!(seen.iter().all(|&c| c == 1));
                    let sizes: Vec<usize> =
                        (0..k).map(|fold| f.validation_rows(fold).len()).collect();
                    let min = sizes.iter().min().unwrap();
                    let max = sizes.iter().max().unwrap();
                    assert!(max - min <= 1);
                }
            }
        }
    }

    #[test]
    fn folds_rejects_k_over_n() {
        assert!(matches!(
            make_folds(&[0, 1], 3, 1, false),
            Err(Error::TooManyFolds { .. })
        ));
    }

    #[test]
    fn f1_perfect_every_averaging() {
        let y = vec![0, 1, 2, 1, 0];
        for avg in [
            F1Averaging::Binary { pos: 1 },
            F1Averaging::Macro,
            F1Averaging::Weighted,
        ] {
            assert_relative_eq!(f1_score(&y, &y, avg).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn f1_binary_hand_case() {
        // TP=2, FP=1, FN=1 for class 1
        let y_true = vec![1, 1, 1, 0, 0];
        let y_pred = vec![1, 1, 0, 1, 0];
        assert_relative_eq!(
            f1_score(&y_true, &y_pred, F1Averaging::Binary { pos: 1 }).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn f1_multiclass_matches_confusion_oracle() {
        // confusion: a: TP2 FP1 FN0; b: TP1 FP1 FN2; c: TP1 FP1 FN1
        let y_true = vec![0, 0, 1, 1, 1, 2, 2];
        let y_pred = vec![0, 0, 1, 0, 2, 2, 1];
        let f1a = 2.0 * (2.0 / 3.0) * 1.0 / (2.0 / 3.0 + 1.0);
        let f1b = 2.0 * 0.5 * (1.0 / 3.0) / (0.5 + 1.0 / 3.0);
        let f1c = 2.0 * 0.5 * 0.5 / (0.5 + 0.5);
        let macro_expect = (f1a + f1b + f1c) / 3.0;
        let weighted_expect = (2.0 * f1a + 3.0 * f1b + 2.0 * f1c) / 7.0;
        assert_relative_eq!(
            f1_score(&y_true, &y_pred, F1Averaging::Macro).unwrap(),
            macro_expect,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            f1_score(&y_true, &y_pred, F1Averaging::Weighted).unwrap(),
            weighted_expect,
            epsilon = 1e-12
        );
    }

    #[test]
    fn f1_all_wrong_is_zero() {
        let y_true = vec![0, 0, 1, 1];
        let y_pred = vec![1, 1, 0, 0];
        for avg in [
            F1Averaging::Binary { pos: 1 },
            F1Averaging::Macro,
            F1Averaging::Weighted,
        ] {
            assert_eq!(f1_score(&y_true, &y_pred, avg).unwrap(), 0.0);
        }
    }

    #[test]
    fn default_spec_invariants() {
        let specs = default_specs();
        assert_eq!(specs.len(), 8);
        for s in &specs {
            s.validate().unwrap();
        }
        assert_eq!(specs[6].oversampler, OversamplerKind::RandomOver);
        assert_eq!(specs[7].oversampler, OversamplerKind::Smote { k: 5 });
        assert_eq!(specs[4].grid.len(), 14);
        assert_eq!(specs[5].grid.len(), 36);
    }

    #[test]
    fn paired_t_hand_case() {
        // differences {1,2,3}: t = 2*sqrt(3), df = 2
        let a = vec![2.0, 4.0, 6.0];
        let b = vec![1.0, 2.0, 3.0];
        let r = t_test(&a, &b, TTestKind::Paired).unwrap();
        assert_relative_eq!(r.t, 2.0 * 3.0f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.df, 2.0);
        assert!(r.p_two_sided > 0.0 && r.p_two_sided < 1.0);
    }

    #[test]
    fn paired_t_zero_variance_error() {
        let a = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            t_test(&a, &a, TTestKind::Paired),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn t_antisymmetric_all_kinds() {
        let a = vec![0.1, 0.5, 0.4, 0.9, 0.3];
        let b = vec![0.2, 0.6, 0.8, 0.7, 0.5];
        for kind in [
            TTestKind::Paired,
            TTestKind::IndependentPooled,
            TTestKind::IndependentWelch,
        ] {
            let ab = t_test(&a, &b, kind).unwrap();
            let ba = t_test(&b, &a, kind).unwrap();
            assert_relative_eq!(ab.t, -ba.t, epsilon = 1e-12);
            assert_relative_eq!(ab.p_two_sided, ba.p_two_sided, epsilon = 1e-12);
        }
    }

    #[test]
    fn group_stats_basics() {
        let s = group_stats(&[vec![0.5, 0.5, 0.5], vec![1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(s.n, vec![3, 3]);
        assert_eq!(s.mean[0], 0.5);
        assert_eq!(s.sd[0], 0.0);
        assert_relative_eq!(s.sd[1], 1.0, epsilon = 1e-12);
        assert!(group_stats(&[vec![]]).is_err());
    }

    fn toy_matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        use crate::tabular::{ColumnProvenance, Encoding};
        let d = rows[0].len();
        FeatureMatrix {
            columns: (0..d)
                .map(|i| ColumnProvenance {
                    source: format!("f{i}"),
                    encoding: Encoding::Raw,
                })
                .collect(),
            rows,
        }
    }

    fn separable_data(n: usize) -> (FeatureMatrix, Vec<usize>) {
        // both classes carry a high-valued feature so models that only see
        // nonzero evidence (complement NB) can also separate them
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = i % 2;
                vec![
                    c as f64 * 10.0 + (i % 5) as f64 * 0.1,
                    (1 - c) as f64 * 10.0 + (i % 5) as f64 * 0.1,
                ]
            })
            .collect();
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        (toy_matrix(rows), y)
    }

    #[test]
    fn cv_perfectly_separable_scores_one() {
        let (x, y) = separable_data(40);
        let folds = make_folds(&y, 10, 3, true).unwrap();
        for spec in default_specs() {
            let (result, _) =
                grid_search(&spec, &x, &y, &folds, F1Averaging::Binary { pos: 1 }, 9).unwrap();
            assert_relative_eq!(result.mean_f1, 1.0, epsilon = 1e-12);
            assert!(result.leakage_free(), "spec {}", spec.id);
        }
    }

    #[test]
    fn cv_oversampler_balances_training_only() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| usize::from(i < 6)).collect();
        let x = toy_matrix(rows);
        let folds = make_folds(&y, 5, 11, true).unwrap();
        let spec = &default_specs()[6]; // KNN imp. randover
        let result = cross_validate(
            spec,
            &spec.base,
            &x,
            &y,
            &folds,
            F1Averaging::Binary { pos: 1 },
            21,
        )
        .unwrap();
        assert!(result.leakage_free());
        for audit in &result.audits {
            assert!(!audit.oversample_sources.is_empty());
        }
    }

    #[test]
    fn grid_search_exhaustive_and_single_point() {
        let (x, y) = separable_data(20);
        let folds = make_folds(&y, 4, 5, true).unwrap();
        let specs = default_specs();
        let avg = F1Averaging::Binary { pos: 1 };
        let (_, evals) = grid_search(&specs[4], &x, &y, &folds, avg, 1).unwrap();
        assert_eq!(evals, specs[4].grid.len());
        let (single, evals1) = grid_search(&specs[0], &x, &y, &folds, avg, 1).unwrap();
        assert_eq!(evals1, 1);
        let direct =
            cross_validate(&specs[0], &specs[0].base, &x, &y, &folds, avg, 1).unwrap();
        assert_eq!(single, direct);
    }

    #[test]
    fn grid_search_prefers_larger_k_with_mislabeled_point() {
        // one far-off mislabeled training point: K=1 memorizes it, K>1 does not
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut y = Vec::new();
        for i in 0..12 {
            rows.push(vec![i as f64 * 0.1]);
            y.push(0);
        }
        for i in 0..12 {
            rows.push(vec![10.0 + i as f64 * 0.1]);
            y.push(1);
        }
        // mislabeled outlier sitting inside class 0 territory
        rows.push(vec![0.55]);
        y.push(1);
        let x = toy_matrix(rows);
        let folds = make_folds(&y, 5, 2, true).unwrap();
        let spec = &default_specs()[4]; // KNN improved
        let (result, _) =
            grid_search(spec, &x, &y, &folds, F1Averaging::Macro, 3).unwrap();
        match result.chosen {
            HyperParams::Knn { k, .. } => assert!(k > 1, "selected k = {k}"),
            _ => panic!("expected knn params"),
        }
    }

    #[test]
    fn cv_deterministic() {
        let (x, y) = separable_data(30);
        let folds = make_folds(&y, 6, 8, true).unwrap();
        let spec = &default_specs()[7];
        let avg = F1Averaging::Weighted;
        let a = cross_validate(spec, &spec.base, &x, &y, &folds, avg, 77).unwrap();
        let b = cross_validate(spec, &spec.base, &x, &y, &folds, avg, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cv_permutation_null_is_mediocre() {
        // label-permuted 50/50 data: mean F1 should hover near chance
        let mut means = Vec::new();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..40)
                .map(|_| vec![rand::Rng::gen::<f64>(&mut rng), rand::Rng::gen::<f64>(&mut rng)])
                .collect();
            let mut y: Vec<usize> = (0..40).map(|i| i % 2).collect();
            y.shuffle(&mut rng);
            let x = toy_matrix(rows);
            let folds = make_folds(&y, 10, seed, true).unwrap();
            let spec = &default_specs()[0];
            let r = cross_validate(
                spec,
                &spec.base,
                &x,
                &y,
                &folds,
                F1Averaging::Binary { pos: 1 },
                seed,
            )
            .unwrap();
            means.push(r.mean_f1);
        }
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        assert!((0.3..0.7).contains(&grand), "null mean F1 = {grand}");
    }

    proptest! {
        #[test]
        fn f1_bounded(labels in prop::collection::vec((0usize..3, 0usize..3), 1..30)) {
            let y_true: Vec<usize> = labels.iter().map(|(t, _)| *t).collect();
            let y_pred: Vec<usize> = labels.iter().map(|(_, p)| *p).collect();
            for avg in [F1Averaging::Binary { pos: 1 }, F1Averaging::Macro, F1Averaging::Weighted] {
                let f1 = f1_score(&y_true, &y_pred, avg).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&f1));
            }
        }
    }
}
