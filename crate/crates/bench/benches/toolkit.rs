use criterion::{criterion_group, criterion_main, Criterion};

use partum::cohort::{default_cohort_config, generate_cohort};
use partum::evalstat::{cross_validate, make_folds, default_specs, F1Averaging};
use partum::resample::smote;
use partum::select::{build_groups, GroupMode, GroupName};
use partum::tabular::{paper_schema, project_group, FeatureMatrix};
use partum::tree::{fit_tree, TreeParams};

fn cohort_matrix() -> (FeatureMatrix, Vec<usize>) {
    let schema = paper_schema();
    let dataset = generate_cohort(&schema, &default_cohort_config(93, 42)).unwrap();
    let groups = build_groups(&schema, "UI", GroupMode::Replication, Some(&dataset)).unwrap();
    let all = groups
        .into_iter()
        .find(|g| g.name == GroupName::All)
        .unwrap();
    let x = project_group(&dataset, &all).unwrap();
    let y = dataset.labels("UI").unwrap();
    (x, y)
}

fn bench_tree_fit(c: &mut Criterion) {
    let (x, y) = cohort_matrix();
    c.bench_function("tree_fit_93x31", |b| {
        b.iter(|| fit_tree(&x.rows, &y, TreeParams::default()).unwrap())
    });
}

fn bench_smote(c: &mut Criterion) {
    let (x, y) = cohort_matrix();
    c.bench_function("smote_93x31_k5", |b| {
        b.iter(|| smote(&x.rows, &y, 5, 7).unwrap())
    });
}

fn bench_cross_validate(c: &mut Criterion) {
    let (x, y) = cohort_matrix();
    let folds = make_folds(&y, 10, 1, true).unwrap();
    let spec = default_specs().into_iter().find(|s| s.id == "KNN").unwrap();
    c.bench_function("cv_knn_10fold", |b| {
        b.iter(|| {
            cross_validate(
                &spec,
                &spec.base,
                &x,
                &y,
                &folds,
                F1Averaging::Binary { pos: 1 },
                3,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_tree_fit, bench_smote, bench_cross_validate);
criterion_main!(benches);
