//! Synthetic cohort generator. Produces datasets conforming to the cohort
//! schema with a plantable effect structure so the full protocol can be
//! exercised end to end without the (unreleased) clinical data.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tabular::{ColumnValues, Dataset, FeatureKind, Role, Schema};

/// Marginal distribution of one feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Marginal {
    /// Level probabilities in schema level order; must sum to 1.
    Categorical { probs: Vec<f64> },
    /// Normal(mean, sd) clamped to [min, max].
    Continuous {
        mean: f64,
        sd: f64,
        min: f64,
        max: f64,
    },
}

/// Planted dependence of one target on predictor columns, on the log-odds
/// (binary) or latent (ordinal) scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSpec {
    pub coefficients: Vec<(String, f64)>,
    pub intercept: f64,
    pub noise_sd: f64,
    /// Strictly increasing latent thresholds for multiclass targets;
    /// level = number of thresholds below the latent value. Empty for
    /// binary targets.
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortConfig {
    pub n_rows: usize,
    pub seed: u64,
    /// EffectSpec per prediction target.
    pub effects: BTreeMap<String, EffectSpec>,
    /// Marginal per non-target column (features and leftover outcomes).
    pub marginals: BTreeMap<String, Marginal>,
}

impl CohortConfig {
    pub fn validate(&self, schema: &Schema) -> Result<(), Error> {
        if self.n_rows == 0 {
            return Err(Error::Config("n_rows must be at least 1".into()));
        }
        for (target, effect) in &self.effects {
            let spec = schema.column(target)?;
            if spec.role != Role::Outcome {
                return Err(Error::Config(format!("`{target}` is not an outcome")));
            }
            let levels = match &spec.kind {
                FeatureKind::Categorical { levels } => levels.len(),
                FeatureKind::Continuous { .. } => {
                    return Err(Error::Config(format!(
                        "target `{target}` must be categorical"
                    )))
                }
            };
            let expected_thresholds = if levels == 2 { 0 } else { levels - 1 };
            if effect.thresholds.len() != expected_thresholds {
                return Err(Error::Config(format!(
                    "target `{target}` needs {expected_thresholds} thresholds, got {}",
                    effect.thresholds.len()
                )));
            }
            if !effect.thresholds.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Config(format!(
                    "target `{target}` thresholds must be strictly increasing"
                )));
            }
            for (name, _) in &effect.coefficients {
                let col = schema.column(name)?;
                if col.role == Role::Outcome {
                    return Err(Error::Config(format!(
                        "effect for `{target}` references outcome column `{name}`"
                    )));
                }
            }
        }
        for (name, marginal) in &self.marginals {
            let spec = schema.column(name)?;
            match (&spec.kind, marginal) {
                (FeatureKind::Categorical { levels }, Marginal::Categorical { probs }) => {
                    if probs.len() != levels.len() {
                        return Err(Error::Config(format!(
                            "column `{name}`: {} probs for {} levels",
                            probs.len(),
                            levels.len()
                        )));
                    }
                    let total: f64 = probs.iter().sum();
                    if (total - 1.0).abs() > 1e-9 || probs.iter().any(|&p| p < 0.0) {
                        return Err(Error::Config(format!(
                            "column `{name}`: probs must be non-negative and sum to 1"
                        )));
                    }
                }
                (FeatureKind::Continuous { .. }, Marginal::Continuous { sd, min, max, .. }) => {
                    if *sd < 0.0 || min > max {
                        return Err(Error::Config(format!(
                            "column `{name}`: invalid continuous marginal"
                        )));
                    }
                }
                _ => {
                    return Err(Error::Config(format!(
                        "column `{name}`: marginal kind does not match schema"
                    )))
                }
            }
        }
        Ok(())
    }
}

fn sample_categorical(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Generate a dataset against the given schema. Features are sampled from
/// their marginals; each effect target is drawn from a logistic (binary) or
/// cumulative-threshold (ordinal) model over its linear predictor plus
/// Gaussian noise. Deterministic given the seed.
pub fn generate_cohort(schema: &Schema, config: &CohortConfig) -> Result<Dataset, Error> {
    config.validate(schema)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_rows;

    // sample every non-effect column from its marginal
    let mut columns: Vec<ColumnValues> = Vec::with_capacity(schema.columns.len());
    for spec in &schema.columns {
        if config.effects.contains_key(&spec.name) {
            // placeholder; filled below from the effect model
            columns.push(match &spec.kind {
                FeatureKind::Categorical { .. } => ColumnValues::Categorical(vec![0; n]),
                FeatureKind::Continuous { .. } => ColumnValues::Continuous(vec![0.0; n]),
            });
            continue;
        }
        let marginal = config.marginals.get(&spec.name).ok_or_else(|| {
            Error::Config(format!("no marginal configured for column `{}`", spec.name))
        })?;
        columns.push(match marginal {
            Marginal::Categorical { probs } => ColumnValues::Categorical(
                (0..n).map(|_| sample_categorical(probs, &mut rng)).collect(),
            ),
            Marginal::Continuous { mean, sd, min, max } => {
                let dist = Normal::new(*mean, (*sd).max(f64::MIN_POSITIVE))
                    .map_err(|e| Error::Config(format!("marginal: {e}")))?;
                ColumnValues::Continuous(
                    (0..n)
                        .map(|_| dist.sample(&mut rng).clamp(*min, *max))
                        .collect(),
                )
            }
        });
    }

    // effect-driven targets, in schema order for determinism
    for (idx, spec) in schema.columns.iter().enumerate() {
        let Some(effect) = config.effects.get(&spec.name) else {
            continue;
        };
        let noise = Normal::new(0.0, effect.noise_sd.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::Config(format!("noise: {e}")))?;
        let mut codes = Vec::with_capacity(n);
        for row in 0..n {
            let mut lin = effect.intercept;
            for (name, coef) in &effect.coefficients {
                let col_idx = schema.position(name).expect("validated");
                lin += coef * columns[col_idx].as_f64(row);
            }
            let latent = lin + noise.sample(&mut rng);
            let code = if effect.thresholds.is_empty() {
                let p = 1.0 / (1.0 + (-latent).exp());
                usize::from(rng.gen::<f64>() < p)
            } else {
                effect.thresholds.iter().filter(|&&t| latent > t).count()
            };
            codes.push(code);
        }
        columns[idx] = ColumnValues::Categorical(codes);
    }

    Dataset::new(schema.clone(), columns)
}

/// A plausible default synthetic configuration for the cohort schema. This
/// is synthetic data for harness testing, not a reconstruction of any real
/// cohort. Extrinsic activity variables carry the planted signal for the
/// four targets, and STRESS_UI is kept clearly imbalanced.
pub fn default_cohort_config(n_rows: usize, seed: u64) -> CohortConfig {
    let mut marginals = BTreeMap::new();
    let mut cat = |name: &str, probs: &[f64]| {
        marginals.insert(
            name.to_string(),
            Marginal::Categorical {
                probs: probs.to_vec(),
            },
        );
    };
    cat("DIC_NULLIPAROUS", &[0.55, 0.45]);
    cat("CAT_BMI", &[0.08, 0.72, 0.20]);
    cat("CAT_EXTRAKG", &[0.30, 0.40, 0.22, 0.08]);
    cat("LABOUR_PREP", &[0.35, 0.65]);
    cat("PROF_CHBPR", &[0.35, 0.45, 0.20]);
    cat("PA_PREV", &[0.40, 0.60]);
    cat("FREQ_PAPREV", &[0.40, 0.42, 0.18]);
    cat("IPAQ", &[0.35, 0.50, 0.15]);
    cat("WALKING", &[0.25, 0.75]);
    cat("STRENGTH", &[0.70, 0.30]);
    cat("PILATES", &[0.65, 0.35]);
    cat("AQUAGYM", &[0.75, 0.25]);
    cat("INJURY", &[0.80, 0.20]);
    cat("EPISIOTOMY", &[0.60, 0.40]);
    cat("TEARING", &[0.55, 0.30, 0.15]);
    cat("LITOTHOMY", &[0.30, 0.70]);
    cat("POSTURE", &[0.60, 0.20, 0.12, 0.08]);
    cat("ANALGESIA", &[0.25, 0.75]);
    cat("TYPE_ANALGESIA", &[0.25, 0.10, 0.55, 0.10]);
    cat("TYPE_LABOUR", &[0.75, 0.15, 0.10]);
    cat("KRISTELLER", &[0.80, 0.20]);
    cat("AFFECT_UI", &[0.75, 0.25]);
    cat("BLADD_HYPER", &[0.85, 0.15]);
    cat("UI_PREV", &[0.80, 0.12, 0.08]);
    let mut cont = |name: &str, mean: f64, sd: f64, min: f64, max: f64| {
        marginals.insert(
            name.to_string(),
            Marginal::Continuous { mean, sd, min, max },
        );
    };
    cont("AGE", 31.0, 4.5, 18.0, 40.0);
    cont("NUM_LABOURS", 1.6, 0.9, 1.0, 5.0);
    cont("HEIGHT", 164.0, 6.0, 145.0, 185.0);
    cont("WEIGHT", 66.0, 9.0, 45.0, 110.0);
    cont("BMI", 24.5, 3.2, 16.0, 38.0);
    cont("EXTRA_KG", 12.0, 4.0, 2.0, 25.0);
    cont("NUM_PA", 1.2, 1.0, 0.0, 4.0);
    cont("WEEK_LABOUR", 39.4, 1.1, 37.0, 42.0);
    cont("DURATION", 7.5, 3.5, 1.0, 24.0);
    cont("WEIGHT_BABY", 3300.0, 420.0, 2200.0, 4600.0);
    cont("VAS_PERINE", 2.5, 1.8, 0.0, 10.0);

    let mut effects = BTreeMap::new();
    let extrinsic_signal = vec![
        ("AQUAGYM".to_string(), -2.2),
        ("FREQ_PAPREV".to_string(), -0.9),
        ("EXTRA_KG".to_string(), 0.16),
    ];
    effects.insert(
        "UI".to_string(),
        EffectSpec {
            coefficients: extrinsic_signal.clone(),
            intercept: -2.1,
            noise_sd: 1.0,
            thresholds: vec![],
        },
    );
    effects.insert(
        "STRESS_UI".to_string(),
        EffectSpec {
            coefficients: extrinsic_signal.clone(),
            intercept: -3.2,
            noise_sd: 1.0,
            thresholds: vec![],
        },
    );
    effects.insert(
        "FREQ_UI".to_string(),
        EffectSpec {
            coefficients: extrinsic_signal.clone(),
            intercept: 0.0,
            noise_sd: 1.0,
            thresholds: vec![0.6, 2.4],
        },
    );
    effects.insert(
        "INT_UI".to_string(),
        EffectSpec {
            coefficients: extrinsic_signal,
            intercept: 0.0,
            noise_sd: 1.0,
            thresholds: vec![0.6, 2.0, 3.4],
        },
    );

    CohortConfig {
        n_rows,
        seed,
        effects,
        marginals,
    }
}
