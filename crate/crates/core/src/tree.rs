//! Decision-tree classifier with entropy/Gini splitting and a randomized
//! tree ensemble used for feature importance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Gini,
    Entropy,
}

/// Base-2 entropy of a class count vector; 0*log0 taken as 0.
pub fn entropy(counts: &[usize]) -> Result<f64, Error> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Empty);
    }
    let n = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

/// Gini impurity 1 - sum(p_i^2).
pub fn gini(counts: &[usize]) -> Result<f64, Error> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Empty);
    }
    let n = total as f64;
    Ok(1.0
        - counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                p * p
            })
            .sum::<f64>())
}

fn impurity(criterion: Criterion, counts: &[usize]) -> f64 {
    match criterion {
        Criterion::Gini => gini(counts).unwrap(),
        Criterion::Entropy => entropy(counts).unwrap(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub parent_impurity: f64,
    pub child_impurity: f64,
    pub gain: f64,
}

fn class_counts(y: &[usize], rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &r in rows {
        counts[y[r]] += 1;
    }
    counts
}

/// Greedy exhaustive split search: candidate thresholds are midpoints
/// between consecutive distinct sorted values per feature. Returns the
/// split maximizing impurity reduction, or None when the node is pure or
/// every feature is constant. Zero-gain splits on impure nodes are kept so
/// parity patterns remain solvable by deeper levels. Ties break toward the
/// lowest feature index, then the lowest threshold.
pub fn best_split(
    x: &[Vec<f64>],
    y: &[usize],
    rows: &[usize],
    criterion: Criterion,
) -> Result<Option<Split>, Error> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 rows".into()));
    }
    let d = x[rows[0]].len();
    if d == 0 {
        return Err(Error::InvalidArgument("zero-width matrix".into()));
    }
    let n_classes = y.iter().max().unwrap() + 1;
    let parent_counts = class_counts(y, rows, n_classes);
    let parent = impurity(criterion, &parent_counts);
    if parent == 0.0 {
        return Ok(None);
    }
    let n = rows.len() as f64;

    let mut best: Option<Split> = None;
    for j in 0..d {
        let mut values: Vec<f64> = rows.iter().map(|&r| x[r][j]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for pair in values.windows(2) {
            let t = (pair[0] + pair[1]) / 2.0;
            let mut left = vec![0usize; n_classes];
            let mut right = vec![0usize; n_classes];
            for &r in rows {
                if x[r][j] <= t {
                    left[y[r]] += 1;
                } else {
                    right[y[r]] += 1;
                }
            }
            let nl: usize = left.iter().sum();
            let nr: usize = right.iter().sum();
            let child = (nl as f64 / n) * impurity(criterion, &left)
                + (nr as f64 / n) * impurity(criterion, &right);
            let gain = (parent - child).max(0.0);
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain + 1e-15,
            };
            if better {
                best = Some(Split {
                    feature: j,
                    threshold: t,
                    parent_impurity: parent,
                    child_impurity: child,
                    gain,
                });
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// None = unlimited depth.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        // vanilla "DT" configuration
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Internal {
        split: Split,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        counts: Vec<usize>,
        label: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: Node,
    pub params: TreeParams,
    pub n_features: usize,
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate().skip(1) {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

fn grow(
    x: &[Vec<f64>],
    y: &[usize],
    rows: &[usize],
    params: &TreeParams,
    depth: usize,
    n_classes: usize,
) -> Node {
    let counts = class_counts(y, rows, n_classes);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_stop = params.max_depth.is_some_and(|m| depth >= m);
    if pure || depth_stop || rows.len() < params.min_samples_split {
        return Node::Leaf {
            label: majority(&counts),
            counts,
        };
    }
    match best_split(x, y, rows, params.criterion).ok().flatten() {
        None => Node::Leaf {
            label: majority(&counts),
            counts,
        },
        Some(split) => {
            let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| x[r][split.feature] <= split.threshold);
            let left = grow(x, y, &lrows, params, depth + 1, n_classes);
            let right = grow(x, y, &rrows, params, depth + 1, n_classes);
            Node::Internal {
                split,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

pub fn fit_tree(x: &[Vec<f64>], y: &[usize], params: TreeParams) -> Result<TreeModel, Error> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Empty);
    }
    if params.min_samples_split < 2 {
        return Err(Error::InvalidArgument(
            "min_samples_split must be at least 2".into(),
        ));
    }
    let rows: Vec<usize> = (0..x.len()).collect();
    let n_classes = y.iter().max().unwrap() + 1;
    let root = grow(x, y, &rows, &params, 0, n_classes);
    Ok(TreeModel {
        root,
        params,
        n_features: x[0].len(),
    })
}

pub fn predict_tree(model: &TreeModel, x: &[f64]) -> Result<usize, Error> {
    if x.len() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut node = &model.root;
    loop {
        match node {
            Node::Leaf { label, .. } => return Ok(*label),
            Node::Internal { split, left, right } => {
                node = if x[split.feature] <= split.threshold {
                    left
                } else {
                    right
                };
            }
        }
    }
}

/// Indented text dump of a fitted tree.
pub fn render_tree(model: &TreeModel) -> String {
    fn walk(node: &Node, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match node {
            Node::Leaf { counts, label } => {
                out.push_str(&format!("{pad}leaf label={label} counts={counts:?}\n"));
            }
            Node::Internal { split, left, right } => {
                out.push_str(&format!(
                    "{pad}x[{}] <= {:.6} (gain {:.6})\n",
                    split.feature, split.threshold, split.gain
                ));
                walk(left, indent + 1, out);
                walk(right, indent + 1, out);
            }
        }
    }
    let mut out = String::new();
    walk(&model.root, 0, &mut out);
    out
}

/// Extremely-randomized ensemble importance: each node draws one uniform
/// random threshold per feature within its observed range and keeps the best
/// candidate; importance is size-weighted impurity reduction per feature,
/// averaged over trees and normalized to sum to 1.
pub fn randomized_importance(
    x: &[Vec<f64>],
    y: &[usize],
    n_trees: usize,
    seed: u64,
) -> Result<Vec<f64>, Error> {
    if n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be >= 1".into()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 rows for importance".into(),
        ));
    }
    let d = x[0].len();
    let n_classes = y.iter().max().unwrap() + 1;
    let n_total = x.len() as f64;
    let mut acc = vec![0.0; d];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    fn grow_random(
        x: &[Vec<f64>],
        y: &[usize],
        rows: &[usize],
        n_classes: usize,
        n_total: f64,
        rng: &mut ChaCha8Rng,
        acc: &mut [f64],
    ) {
        let counts = class_counts(y, rows, n_classes);
        if rows.len() < 2 || counts.iter().filter(|&&c| c > 0).count() <= 1 {
            return;
        }
        let parent = gini(&counts).unwrap();
        let n = rows.len() as f64;
        let d = x[rows[0]].len();
        let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, gain)
        for j in 0..d {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &r in rows {
                lo = lo.min(x[r][j]);
                hi = hi.max(x[r][j]);
            }
            if lo == hi {
                continue;
            }
            let t = rng.gen_range(lo..hi);
            let mut left = vec![0usize; n_classes];
            let mut right = vec![0usize; n_classes];
            for &r in rows {
                if x[r][j] <= t {
                    left[y[r]] += 1;
                } else {
                    right[y[r]] += 1;
                }
            }
            let nl: usize = left.iter().sum();
            let nr: usize = right.iter().sum();
            if nl == 0 || nr == 0 {
                continue;
            }
            let child = (nl as f64 / n) * gini(&left).unwrap()
                + (nr as f64 / n) * gini(&right).unwrap();
            let gain = parent - child;
            if gain > 0.0 && best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((j, t, gain));
            }
        }
        if let Some((j, t, gain)) = best {
            acc[j] += (n / n_total) * gain;
            let (lrows, rrows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| x[r][j] <= t);
            grow_random(x, y, &lrows, n_classes, n_total, rng, acc);
            grow_random(x, y, &rrows, n_classes, n_total, rng, acc);
        }
    }

    let rows: Vec<usize> = (0..x.len()).collect();
    for _ in 0..n_trees {
        grow_random(x, y, &rows, n_classes, n_total, &mut rng, &mut acc);
    }
    let total: f64 = acc.iter().sum();
    if total > 0.0 {
        for v in &mut acc {
            *v /= total;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_hand_cases() {
        assert_relative_eq!(entropy(&[5, 5]).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(entropy(&[7, 0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(entropy(&[1, 1, 1, 1]).unwrap(), 2.0, epsilon = 1e-12);
        assert!(entropy(&[0, 0]).is_err());
    }

    #[test]
    fn gini_hand_cases() {
        assert_relative_eq!(gini(&[5, 5]).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(gini(&[7, 0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(gini(&[2, 1, 1]).unwrap(), 0.625, epsilon = 1e-12);
        assert!(gini(&[0]).is_err());
    }

    fn separable() -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![0, 0, 1, 1],
        )
    }

    #[test]
    fn best_split_perfect() {
        let (x, y) = separable();
        let rows = [0, 1, 2, 3];
        let s = best_split(&x, &y, &rows, Criterion::Gini).unwrap().unwrap();
        assert_eq!(s.feature, 0);
        assert_relative_eq!(s.threshold, 2.5, epsilon = 1e-12);
        assert_relative_eq!(s.gain, s.parent_impurity, epsilon = 1e-12);
        assert_relative_eq!(s.child_impurity, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn best_split_pure_returns_none() {
        let x = vec![vec![1.0], vec![2.0]];
        let y = vec![0, 0];
        assert!(best_split(&x, &y, &[0, 1], Criterion::Entropy)
            .unwrap()
            .is_none());
    }

    #[test]
    fn fit_separable_depth_one() {
        let (x, y) = separable();
        let m = fit_tree(&x, &y, TreeParams::default()).unwrap();
        for (row, &label) in x.iter().zip(&y) {
            assert_eq!(predict_tree(&m, row).unwrap(), label);
        }
        assert!(matches!(
            m.root,
            Node::Internal { ref left, ref right, .. }
                if matches!(**left, Node::Leaf { .. }) && matches!(**right, Node::Leaf { .. })
        ));
    }

    #[test]
    fn max_depth_zero_is_majority_leaf() {
        let (x, y) = separable();
        let m = fit_tree(
            &x,
            &y,
            TreeParams {
                max_depth: Some(0),
                ..TreeParams::default()
            },
        )
        .unwrap();
        match &m.root {
            Node::Leaf { label, .. } => assert_eq!(*label, 0), // tie -> lowest
            _ => panic!("expected single leaf"),
        }
    }

    #[test]
    fn xor_solved_at_depth_two() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![0, 0, 1, 1];
        let m = fit_tree(
            &x,
            &y,
            TreeParams {
                max_depth: Some(2),
                ..TreeParams::default()
            },
        )
        .unwrap();
        let acc = x
            .iter()
            .zip(&y)
            .filter(|(row, &l)| predict_tree(&m, row).unwrap() == l)
            .count();
        assert_eq!(acc, 4);
    }

    #[test]
    fn traversal_extremes() {
        let (x, y) = separable();
        let m = fit_tree(&x, &y, TreeParams::default()).unwrap();
        assert_eq!(predict_tree(&m, &[-100.0]).unwrap(), 0);
        assert_eq!(predict_tree(&m, &[100.0]).unwrap(), 1);
    }

    #[test]
    fn render_is_nonempty() {
        let (x, y) = separable();
        let m = fit_tree(&x, &y, TreeParams::default()).unwrap();
        let text = render_tree(&m);
        assert!(text.contains("x[0] <="));
        assert!(text.contains("leaf"));
    }

    #[test]
    fn importance_favors_predictive_feature() {
        // feature 0 perfectly predictive, feature 1 noise
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut rng_state = 12345u64;
        for i in 0..40 {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let noise = (rng_state >> 33) as f64 / (1u64 << 31) as f64;
            let label = i % 2;
            x.push(vec![label as f64, noise]);
            y.push(label);
        }
        let imp = randomized_importance(&x, &y, 100, 7).unwrap();
        assert!(imp[0] > 0.8, "importance {imp:?}");
        assert_relative_eq!(imp.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn importance_deterministic_under_seed() {
        let (x, y) = separable();
        let a = randomized_importance(&x, &y, 20, 42).unwrap();
        let b = randomized_importance(&x, &y, 20, 42).unwrap();
        assert_eq!(a, b);
    }

    fn audit_structure(node: &Node, depth: usize, params: &TreeParams) {
        match node {
            Node::Leaf { counts, .. } => {
                assert!(counts.iter().sum::<usize>() > 0, "empty leaf");
            }
            Node::Internal { split, left, right } => {
                if let Some(md) = params.max_depth {
                    assert!(depth < md, "split deeper than max_depth");
                }
                assert!(split.gain >= 0.0);
                assert!(split.child_impurity <= split.parent_impurity + 1e-12);
                audit_structure(left, depth + 1, params);
                audit_structure(right, depth + 1, params);
            }
        }
    }

    #[test]
    fn structural_audit_random_data() {
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        for depth in [Some(1), Some(3), None] {
            let x: Vec<Vec<f64>> = (0..30).map(|_| vec![next(), next()]).collect();
            let y: Vec<usize> = (0..30).map(|_| (next() * 3.0) as usize).collect();
            let params = TreeParams {
                criterion: Criterion::Entropy,
                max_depth: depth,
                min_samples_split: 4,
            };
            let m = fit_tree(&x, &y, params).unwrap();
            audit_structure(&m.root, 0, &params);
        }
    }
}
