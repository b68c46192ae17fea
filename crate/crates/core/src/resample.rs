//! Class-balancing oversamplers: RandomOver duplication and SMOTE
//! synthetic interpolation. Both preserve the original rows in order and
//! append new rows after them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::neighbors::euclidean_distance;

/// Per-class balancing targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplePlan {
    /// (class, original count, target count), ascending by class.
    pub per_class: Vec<(usize, usize, usize)>,
    pub seed: u64,
}

fn plan(y: &[usize], seed: u64) -> Result<ResamplePlan, Error> {
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let counts: Vec<usize> = classes
        .iter()
        .map(|&c| y.iter().filter(|&&l| l == c).count())
        .collect();
    let majority = *counts.iter().max().unwrap();
    Ok(ResamplePlan {
        per_class: classes
            .iter()
            .zip(&counts)
            .map(|(&c, &n)| (c, n, majority))
            .collect(),
        seed,
    })
}

/// Where an appended row came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RowProvenance {
    /// RandomOver duplicate of the given original row index.
    Duplicate { source: usize },
    /// SMOTE interpolation between two original row indices.
    Synthetic {
        seed_row: usize,
        neighbor_row: usize,
        lambda: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resampled {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub plan: ResamplePlan,
    /// Provenance for rows beyond the original n; indices refer to the
    /// input matrix.
    pub appended: Vec<RowProvenance>,
    /// Classes where the requested k had to be clamped to class size - 1.
    pub clamped_k: Vec<(usize, usize)>,
}

/// Duplicate minority rows uniformly at random (with replacement) until all
/// class counts equal the majority count.
pub fn random_oversample(x: &[Vec<f64>], y: &[usize], seed: u64) -> Result<Resampled, Error> {
    let plan = plan(y, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out_x = x.to_vec();
    let mut out_y = y.to_vec();
    let mut appended = Vec::new();
    for &(class, count, target) in &plan.per_class {
        let members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        for _ in count..target {
            let source = members[rng.gen_range(0..members.len())];
            out_x.push(x[source].clone());
            out_y.push(class);
            appended.push(RowProvenance::Duplicate { source });
        }
    }
    Ok(Resampled {
        x: out_x,
        y: out_y,
        plan,
        appended,
        clamped_k: Vec::new(),
    })
}

/// SMOTE: each synthetic row interpolates between a random minority seed row
/// and one of its k nearest same-class neighbors with lambda ~ U[0,1].
pub fn smote(x: &[Vec<f64>], y: &[usize], k: usize, seed: u64) -> Result<Resampled, Error> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let plan = plan(y, seed)?;
    for &(class, count, target) in &plan.per_class {
        if target > count && count < 2 {
            return Err(Error::SmoteSingleton { class });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out_x = x.to_vec();
    let mut out_y = y.to_vec();
    let mut appended = Vec::new();
    let mut clamped_k = Vec::new();
    for &(class, count, target) in &plan.per_class {
        if target == count {
            continue;
        }
        let members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        let eff_k = k.min(members.len() - 1);
        if eff_k < k {
            clamped_k.push((class, eff_k));
        }
        // k nearest same-class neighbors of each member, precomputed.
        let neighbor_lists: Vec<Vec<usize>> = members
            .iter()
            .map(|&i| {
                let mut dists: Vec<(f64, usize)> = members
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (euclidean_distance(&x[i], &x[j]).unwrap(), j))
                    .collect();
                dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                dists.truncate(eff_k);
                dists.into_iter().map(|(_, j)| j).collect()
            })
            .collect();
        for _ in count..target {
            let m = rng.gen_range(0..members.len());
            let seed_row = members[m];
            let neighbor_row = neighbor_lists[m][rng.gen_range(0..eff_k)];
            let lambda: f64 = rng.gen_range(0.0..1.0);
            let synth: Vec<f64> = x[seed_row]
                .iter()
                .zip(&x[neighbor_row])
                .map(|(&a, &b)| a + lambda * (b - a))
                .collect();
            out_x.push(synth);
            out_y.push(class);
            appended.push(RowProvenance::Synthetic {
                seed_row,
                neighbor_row,
                lambda,
            });
        }
    }
    Ok(Resampled {
        x: out_x,
        y: out_y,
        plan,
        appended,
        clamped_k,
    })
}
