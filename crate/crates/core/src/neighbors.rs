//! K-nearest-neighbors classifier over Euclidean distance, exact full scan.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnModel {
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<usize>,
    pub k: usize,
    pub weighting: Weighting,
}

const INV_DIST_DELTA: f64 = 1e-12;

impl KnnModel {
    pub fn fit(
        train_x: Vec<Vec<f64>>,
        train_y: Vec<usize>,
        k: usize,
        weighting: Weighting,
    ) -> Result<Self, Error> {
        if train_x.is_empty() || train_x.len() != train_y.len() {
            return Err(Error::Empty);
        }
        if k == 0 || k > train_x.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} must be in 1..={}",
                train_x.len()
            )));
        }
        Ok(KnnModel {
            train_x,
            train_y,
            k,
            weighting,
        })
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64, Error> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Predict a label and per-class probabilities. The neighbor set is the K
/// smallest distances, ties at the K-th distance broken by training row
/// index. Label ties break toward the lowest class index.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<(usize, Vec<f64>), Error> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut dists: Vec<(f64, usize)> = model
        .train_x
        .iter()
        .enumerate()
        .map(|(i, row)| Ok((euclidean_distance(x, row)?, i)))
        .collect::<Result<_, Error>>()?;
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let neighbors = &dists[..model.k];

    let n_classes = model.train_y.iter().max().unwrap() + 1;
    let mut weights = vec![0.0; n_classes];
    match model.weighting {
        Weighting::Uniform => {
            for &(_, i) in neighbors {
                weights[model.train_y[i]] += 1.0 / model.k as f64;
            }
        }
        Weighting::InverseDistance => {
            // An exact-match neighbor dominates: zero-distance neighbors
            // share all the weight.
            let zeros: Vec<usize> = neighbors
                .iter()
                .filter(|(d, _)| *d == 0.0)
                .map(|&(_, i)| i)
                .collect();
            if !zeros.is_empty() {
                for &i in &zeros {
                    weights[model.train_y[i]] += 1.0 / zeros.len() as f64;
                }
            } else {
                let mut total = 0.0;
                let mut raw = Vec::with_capacity(neighbors.len());
                for &(d, i) in neighbors {
                    let w = 1.0 / (d + INV_DIST_DELTA);
                    raw.push((w, i));
                    total += w;
                }
                for (w, i) in raw {
                    weights[model.train_y[i]] += w / total;
                }
            }
        }
    }
    let mut best = 0;
    for (c, &w) in weights.iter().enumerate().skip(1) {
        if w > weights[best] {
            best = c;
        }
    }
    Ok((best, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn distance_3_4_5() {
        assert_eq!(
            euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            5.0
        );
    }

    #[test]
    fn distance_identity_and_mismatch() {
        assert_eq!(euclidean_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn k1_exact_match() {
        let m = KnnModel::fit(
            vec![vec![0.0], vec![5.0]],
            vec![0, 1],
            1,
            Weighting::Uniform,
        )
        .unwrap();
        let (label, probs) = knn_predict(&m, &[5.0]).unwrap();
        assert_eq!(label, 1);
        assert_eq!(probs, vec![0.0, 1.0]);
    }

    #[test]
    fn k3_majority_counts() {
        let m = KnnModel::fit(
            vec![vec![0.0], vec![0.1], vec![0.2], vec![9.0]],
            vec![0, 0, 1, 1],
            3,
            Weighting::Uniform,
        )
        .unwrap();
        let (label, probs) = knn_predict(&m, &[0.0]).unwrap();
        assert_eq!(label, 0);
        assert_relative_eq!(probs[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(probs[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_distance_neighbor_dominates() {
        let m = KnnModel::fit(
            vec![vec![0.0], vec![0.001], vec![0.002]],
            vec![1, 0, 0],
            3,
            Weighting::InverseDistance,
        )
        .unwrap();
        let (label, probs) = knn_predict(&m, &[0.0]).unwrap();
        assert_eq!(label, 1);
        assert_eq!(probs[1], 1.0);
    }

    #[test]
    fn k_equals_n_gives_majority() {
        let m = KnnModel::fit(
            vec![vec![0.0], vec![100.0], vec![101.0]],
            vec![1, 0, 0],
            3,
            Weighting::Uniform,
        )
        .unwrap();
        let (label, _) = knn_predict(&m, &[0.0]).unwrap();
        assert_eq!(label, 0);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(KnnModel::fit(vec![vec![0.0]], vec![0], 0, Weighting::Uniform).is_err());
        assert!(KnnModel::fit(vec![vec![0.0]], vec![0], 2, Weighting::Uniform).is_err());
    }

    proptest! {
        #[test]
        fn distance_symmetric(a in prop::collection::vec(-100.0f64..100.0, 4),
                              b in prop::collection::vec(-100.0f64..100.0, 4)) {
            let d1 = euclidean_distance(&a, &b).unwrap();
            let d2 = euclidean_distance(&b, &a).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
            prop_assert!(d1 >= 0.0);
        }

        #[test]
        fn uniform_probs_are_multiples_of_one_over_k(
            seedless in prop::collection::vec((-10.0f64..10.0, 0usize..3), 8..20),
            q in prop::collection::vec(-10.0f64..10.0, 1),
            k in 1usize..8,
        ) {
            let x: Vec<Vec<f64>> = seedless.iter().map(|(v, _)| vec![*v]).collect();
            let y: Vec<usize> = seedless.iter().map(|(_, c)| *c).collect();
            let m = KnnModel::fit(x, y, k, Weighting::Uniform).unwrap();
            let (_, probs) = knn_predict(&m, &q).unwrap();
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for p in probs {
                let scaled = p * k as f64;
                prop_assert!((scaled - scaled.round()).abs() < 1e-9);
            }
        }
    }
}
