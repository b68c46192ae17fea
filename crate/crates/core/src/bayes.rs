//! Gaussian and Complement Naive Bayes classifiers.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Normal density with mean `mu` and standard deviation `sigma` > 0.
pub fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64, Error> {
    if sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let z = (x - mu) / sigma;
    Ok((-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
}

/// Gaussian Naive Bayes: class priors plus per-class per-feature normal
/// parameters, with a variance floor for degenerate columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianNbModel {
    /// Class labels present at fit time, ascending.
    pub classes: Vec<usize>,
    pub priors: Vec<f64>,
    /// means[class][feature]
    pub means: Vec<Vec<f64>>,
    /// sds[class][feature], floored at sqrt(epsilon)
    pub sds: Vec<Vec<f64>>,
    /// True where the stored sd was raised to the floor.
    pub floored: Vec<Vec<bool>>,
    pub epsilon: f64,
}

const VAR_FLOOR_SCALE: f64 = 1e-9;

pub fn fit_gaussian_nb(x: &[Vec<f64>], y: &[usize]) -> Result<GaussianNbModel, Error> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Empty);
    }
    let d = x[0].len();
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();

    // Floor relative to the largest per-feature variance over all rows.
    let n = x.len() as f64;
    let mut max_var = 0.0f64;
    for j in 0..d {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n.max(1.0);
        max_var = max_var.max(var);
    }
    let epsilon = VAR_FLOOR_SCALE * if max_var > 0.0 { max_var } else { 1.0 };
    let floor = epsilon.sqrt();

    let mut priors = Vec::with_capacity(classes.len());
    let mut means = Vec::with_capacity(classes.len());
    let mut sds = Vec::with_capacity(classes.len());
    let mut floored = Vec::with_capacity(classes.len());
    for &c in &classes {
        let rows: Vec<&Vec<f64>> = x
            .iter()
            .zip(y)
            .filter(|(_, &label)| label == c)
            .map(|(r, _)| r)
            .collect();
        let nc = rows.len() as f64;
        priors.push(nc / n);
        let mut mu = vec![0.0; d];
        let mut sd = vec![0.0; d];
        let mut fl = vec![false; d];
        for j in 0..d {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / nc;
            mu[j] = m;
            let s = if rows.len() < 2 {
                // Single-sample class: n-1 denominator undefined; flag.
                0.0
            } else {
                (rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (nc - 1.0)).sqrt()
            };
            if s < floor {
                sd[j] = floor;
                fl[j] = true;
            } else {
                sd[j] = s;
            }
        }
        means.push(mu);
        sds.push(sd);
        floored.push(fl);
    }
    Ok(GaussianNbModel {
        classes,
        priors,
        means,
        sds,
        floored,
        epsilon,
    })
}

/// Predict a label and the normalized per-class posteriors. Products are
/// taken in log space; ties break toward the lowest class index.
pub fn predict_gaussian_nb(
    model: &GaussianNbModel,
    x: &[f64],
) -> Result<(usize, Vec<f64>), Error> {
    if x.len() != model.means[0].len() {
        return Err(Error::DimensionMismatch {
            expected: model.means[0].len(),
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut log_post = Vec::with_capacity(model.classes.len());
    for (ci, _) in model.classes.iter().enumerate() {
        let mut lp = model.priors[ci].ln();
        for (j, &v) in x.iter().enumerate() {
            let mu = model.means[ci][j];
            let sd = model.sds[ci][j];
            let z = (v - mu) / sd;
            lp += -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        }
        log_post.push(lp);
    }
    let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut post: Vec<f64> = log_post.iter().map(|&lp| (lp - max).exp()).collect();
    let total: f64 = post.iter().sum();
    for p in &mut post {
        *p /= total;
    }
    let best = argmax_lowest_tie(&post);
    Ok((model.classes[best], post))
}

fn argmax_lowest_tie(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Complement Naive Bayes: per-class weights built from the feature totals
/// of all samples outside the class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplementNbModel {
    pub classes: Vec<usize>,
    /// weights[class][feature]: length-normalized log complement frequencies.
    pub weights: Vec<Vec<f64>>,
    pub alpha: f64,
}

pub fn fit_complement_nb(
    x: &[Vec<f64>],
    y: &[usize],
    alpha: f64,
) -> Result<ComplementNbModel, Error> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Empty);
    }
    if alpha <= 0.0 {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if x.iter().any(|r| r.iter().any(|&v| v < 0.0 || !v.is_finite())) {
        return Err(Error::InvalidArgument(
            "complement NB requires non-negative finite features".into(),
        ));
    }
    let d = x[0].len();
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let mut weights = Vec::with_capacity(classes.len());
    for &c in &classes {
        // Feature totals over every sample NOT in class c, alpha-smoothed.
        let mut totals = vec![alpha; d];
        for (row, &label) in x.iter().zip(y) {
            if label != c {
                for (t, &v) in totals.iter_mut().zip(row) {
                    *t += v;
                }
            }
        }
        let denom: f64 = totals.iter().sum();
        let mut w: Vec<f64> = totals.iter().map(|&t| (t / denom).ln()).collect();
        let norm: f64 = w.iter().map(|v| v.abs()).sum();
        if norm > 0.0 {
            for v in &mut w {
                *v /= norm;
            }
        }
        weights.push(w);
    }
    Ok(ComplementNbModel {
        classes,
        weights,
        alpha,
    })
}

/// Per-class complement scores sum(x_j * w_cj); the winning class is the one
/// with the minimal score, ties toward the lowest class index.
pub fn complement_scores(model: &ComplementNbModel, x: &[f64]) -> Result<Vec<f64>, Error> {
    if x.len() != model.weights[0].len() {
        return Err(Error::DimensionMismatch {
            expected: model.weights[0].len(),
            got: x.len(),
        });
    }
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "complement NB requires non-negative finite features".into(),
        ));
    }
    Ok(model
        .weights
        .iter()
        .map(|w| x.iter().zip(w).map(|(&v, &wj)| v * wj).sum())
        .collect())
}

pub fn predict_complement_nb(model: &ComplementNbModel, x: &[f64]) -> Result<usize, Error> {
    let scores = complement_scores(model, x)?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    Ok(model.classes[best])
}
