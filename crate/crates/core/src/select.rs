//! Univariate best-k feature scoring and the six per-target feature groups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tabular::{Dataset, Role, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupName {
    Intrinsic,
    IntrinsicBest,
    Extrinsic,
    ExtrinsicBest,
    All,
    BestOfAll,
}

impl GroupName {
    pub const ORDER: [GroupName; 6] = [
        GroupName::Intrinsic,
        GroupName::IntrinsicBest,
        GroupName::Extrinsic,
        GroupName::ExtrinsicBest,
        GroupName::All,
        GroupName::BestOfAll,
    ];

    /// Column headings in the published report order.
    pub fn heading(self) -> &'static str {
        match self {
            GroupName::Intrinsic => "Int.",
            GroupName::IntrinsicBest => "Int. best",
            GroupName::Extrinsic => "Ext.",
            GroupName::ExtrinsicBest => "Ext. best",
            GroupName::All => "All",
            GroupName::BestOfAll => "Best of all",
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupName::Intrinsic => "intrinsic",
            GroupName::IntrinsicBest => "intrinsic_best",
            GroupName::Extrinsic => "extrinsic",
            GroupName::ExtrinsicBest => "extrinsic_best",
            GroupName::All => "all",
            GroupName::BestOfAll => "best_of_all",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupProvenance {
    SchemaDerived,
    /// Fixed replication configuration transcribed from the published
    /// selection table.
    PublishedFixed,
    DataDriven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGroupSpec {
    pub name: GroupName,
    pub members: Vec<String>,
    /// Members carried verbatim from the publication that have no schema
    /// definition; excluded from executable runs.
    pub flagged: Vec<String>,
    /// Members whose published role tag conflicts with the schema role.
    pub role_conflicts: Vec<String>,
    pub provenance: GroupProvenance,
}

impl FeatureGroupSpec {
    /// Members usable in an executable run (flagged placeholders removed).
    pub fn executable_members(&self) -> impl Iterator<Item = &str> {
        self.members
            .iter()
            .filter(|m| !self.flagged.contains(m))
            .map(String::as_str)
    }

    pub fn has_flagged(&self) -> bool {
        !self.flagged.is_empty()
    }
}

/// One-way ANOVA F statistic of a feature against class labels. Zero
/// within-group variance with nonzero between-group variance yields +inf,
/// which ranks highest.
pub fn anova_f_score(feature: &[f64], y: &[usize]) -> Result<f64, Error> {
    if feature.len() != y.len() || feature.is_empty() {
        return Err(Error::Empty);
    }
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let n = feature.len() as f64;
    let grand = feature.iter().sum::<f64>() / n;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for &c in &classes {
        let vals: Vec<f64> = feature
            .iter()
            .zip(y)
            .filter(|(_, &l)| l == c)
            .map(|(&v, _)| v)
            .collect();
        if vals.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "class {c} has fewer than 2 samples"
            )));
        }
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        ss_between += vals.len() as f64 * (m - grand) * (m - grand);
        ss_within += vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    let df_between = (classes.len() - 1) as f64;
    let df_within = n - classes.len() as f64;
    let ms_between = ss_between / df_between;
    let ms_within = ss_within / df_within;
    if ms_within == 0.0 {
        return Ok(if ms_between == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(ms_between / ms_within)
}

/// Top-k feature names by score, descending; ties keep the earlier
/// (schema-order) column.
pub fn select_k_best<F>(
    columns: &[(String, Vec<f64>)],
    y: &[usize],
    k: usize,
    scorer: F,
) -> Result<Vec<String>, Error>
where
    F: Fn(&[f64], &[usize]) -> Result<f64, Error>,
{
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > columns.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds feature count {}",
            columns.len()
        )));
    }
    let mut scored: Vec<(usize, f64)> = columns
        .iter()
        .enumerate()
        .map(|(i, (_, col))| Ok((i, scorer(col, y)?)))
        .collect::<Result<_, Error>>()?;
    // stable by construction: equal scores keep ascending index order
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(i, _)| columns[i].0.clone())
        .collect())
}

fn group(
    name: GroupName,
    provenance: GroupProvenance,
    members: &[&str],
    flagged: &[&str],
    role_conflicts: &[&str],
) -> FeatureGroupSpec {
    FeatureGroupSpec {
        name,
        members: members.iter().map(|s| s.to_string()).collect(),
        flagged: flagged.iter().map(|s| s.to_string()).collect(),
        role_conflicts: role_conflicts.iter().map(|s| s.to_string()).collect(),
        provenance,
    }
}

/// The published best-variable selections, with name typos mapped to
/// canonical schema names (TYPE_PARTO -> TYPE_LABOUR, EPISIOTOM ->
/// EPISIOTOMY, AQUAGY -> AQUAGYM). The token GROUP has no schema definition
/// and is carried as a flagged placeholder. DIC_NULLIPAROUS and NUM_LABOURS
/// appear under "Intrinsic best" although the schema declares them
/// extrinsic; the conflict is recorded, not resolved.
fn published_best_groups(target: &str) -> Result<[FeatureGroupSpec; 3], Error> {
    use GroupName::*;
    use GroupProvenance::PublishedFixed;
    let conflict = ["DIC_NULLIPAROUS", "NUM_LABOURS"];
    Ok(match target {
        "UI" | "INT_UI" => [
            group(
                IntrinsicBest,
                PublishedFixed,
                &["KRISTELLER", "DIC_NULLIPAROUS", "NUM_LABOURS"],
                &[],
                &conflict,
            ),
            group(
                ExtrinsicBest,
                PublishedFixed,
                &["AQUAGYM", "GROUP", "WEIGHT"],
                &["GROUP"],
                &[],
            ),
            group(
                BestOfAll,
                PublishedFixed,
                &["AQUAGYM", "KRISTELLER", "DIC_NULLIPAROUS"],
                &[],
                &[],
            ),
        ],
        "STRESS_UI" => [
            group(
                IntrinsicBest,
                PublishedFixed,
                &["KRISTELLER", "DIC_NULLIPAROUS", "NUM_LABOURS"],
                &[],
                &conflict,
            ),
            group(
                ExtrinsicBest,
                PublishedFixed,
                &["AQUAGYM", "FREQ_PAPREV", "IPAQ"],
                &[],
                &[],
            ),
            group(
                BestOfAll,
                PublishedFixed,
                &["AQUAGYM", "KRISTELLER", "DIC_NULLIPAROUS"],
                &[],
                &[],
            ),
        ],
        "FREQ_UI" => [
            group(
                IntrinsicBest,
                PublishedFixed,
                &["TYPE_LABOUR", "EPISIOTOMY", "DIC_NULLIPAROUS"],
                &[],
                &["DIC_NULLIPAROUS"],
            ),
            group(
                ExtrinsicBest,
                PublishedFixed,
                &["AQUAGYM", "STRENGTH", "PILATES"],
                &[],
                &[],
            ),
            group(
                BestOfAll,
                PublishedFixed,
                &["TYPE_LABOUR", "AQUAGYM", "STRENGTH"],
                &[],
                &[],
            ),
        ],
        other => return Err(Error::InvalidArgument(format!("unknown target `{other}`"))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupMode {
    /// Best groups transcribed verbatim from the publication.
    Replication,
    /// Best groups recomputed with select_k_best(k=3) on the dataset.
    DataDriven,
}

/// Build the six feature groups for a target. Data-driven mode requires a
/// dataset to score against.
pub fn build_groups(
    schema: &Schema,
    target: &str,
    mode: GroupMode,
    dataset: Option<&Dataset>,
) -> Result<Vec<FeatureGroupSpec>, Error> {
    if !crate::tabular::TARGETS.contains(&target) {
        return Err(Error::InvalidArgument(format!("unknown target `{target}`")));
    }
    let intrinsic = schema.names_with_role(Role::Intrinsic);
    let extrinsic = schema.names_with_role(Role::Extrinsic);
    let all: Vec<String> = schema
        .columns
        .iter()
        .filter(|c| c.role != Role::Outcome)
        .map(|c| c.name.clone())
        .collect();

    let whole = |name: GroupName, members: &[String]| FeatureGroupSpec {
        name,
        members: members.to_vec(),
        flagged: vec![],
        role_conflicts: vec![],
        provenance: GroupProvenance::SchemaDerived,
    };

    let [int_best, ext_best, best_of_all] = match mode {
        GroupMode::Replication => published_best_groups(target)?,
        GroupMode::DataDriven => {
            let ds = dataset.ok_or_else(|| {
                Error::InvalidArgument("data-driven groups require a dataset".into())
            })?;
            let y = ds.labels(target)?;
            let pick = |names: &[String], gname: GroupName| -> Result<FeatureGroupSpec, Error> {
                let columns: Vec<(String, Vec<f64>)> = names
                    .iter()
                    .map(|n| {
                        let col = ds.column_values(n)?;
                        Ok((
                            n.clone(),
                            (0..ds.n_rows).map(|r| col.as_f64(r)).collect(),
                        ))
                    })
                    .collect::<Result<_, Error>>()?;
                let members = select_k_best(&columns, &y, 3, anova_f_score)?;
                Ok(FeatureGroupSpec {
                    name: gname,
                    members,
                    flagged: vec![],
                    role_conflicts: vec![],
                    provenance: GroupProvenance::DataDriven,
                })
            };
            [
                pick(&intrinsic, GroupName::IntrinsicBest)?,
                pick(&extrinsic, GroupName::ExtrinsicBest)?,
                pick(&all, GroupName::BestOfAll)?,
            ]
        }
    };

    Ok(vec![
        whole(GroupName::Intrinsic, &intrinsic),
        int_best,
        whole(GroupName::Extrinsic, &extrinsic),
        ext_best,
        whole(GroupName::All, &all),
        best_of_all,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::paper_schema;
    use approx::assert_relative_eq;

    #[test]
    fn f_zero_for_constant_feature() {
        let f = vec![3.0; 6];
        let y = vec![0, 0, 0, 1, 1, 1];
        assert_eq!(anova_f_score(&f, &y).unwrap(), 0.0);
    }

    #[test]
    fn f_infinite_for_perfect_separation() {
        let f = vec![0.0, 0.0, 1.0, 1.0];
        let y = vec![0, 0, 1, 1];
        assert!(anova_f_score(&f, &y).unwrap().is_infinite());
    }

    #[test]
    fn f_hand_anova_table() {
        // groups {1,2,3} vs {2,3,4}: F = 1.5
        let f = vec![1.0, 2.0, 3.0, 2.0, 3.0, 4.0];
        let y = vec![0, 0, 0, 1, 1, 1];
        assert_relative_eq!(anova_f_score(&f, &y).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn select_k_best_matches_sort_oracle() {
        let columns = vec![
            ("a".to_string(), vec![1.0, 2.0, 1.5, 2.5]),
            ("b".to_string(), vec![0.0, 0.0, 10.0, 10.0]),
            ("c".to_string(), vec![5.0, 5.1, 4.9, 5.0]),
        ];
        let y = vec![0, 0, 1, 1];
        let picked = select_k_best(&columns, &y, 3, anova_f_score).unwrap();
        let mut scored: Vec<(String, f64)> = columns
            .iter()
            .map(|(n, c)| (n.clone(), anova_f_score(c, &y).unwrap()))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let oracle: Vec<String> = scored.into_iter().map(|(n, _)| n).collect();
        assert_eq!(picked, oracle);
        assert_eq!(picked[0], "b");
    }

    #[test]
    fn select_k_best_rejects_bad_k() {
        let columns = vec![("a".to_string(), vec![1.0, 2.0])];
        assert!(select_k_best(&columns, &[0, 1], 0, anova_f_score).is_err());
        assert!(select_k_best(&columns, &[0, 1], 2, anova_f_score).is_err());
    }

    #[test]
    fn replication_groups_ui() {
        let schema = paper_schema();
        let groups = build_groups(&schema, "UI", GroupMode::Replication, None).unwrap();
        assert_eq!(groups.len(), 6);
        let names: Vec<GroupName> = groups.iter().map(|g| g.name).collect();
        assert_eq!(names, GroupName::ORDER);
        let ext_best = &groups[3];
        assert_eq!(ext_best.members, vec!["AQUAGYM", "GROUP", "WEIGHT"]);
        assert_eq!(ext_best.flagged, vec!["GROUP"]);
        assert_eq!(
            ext_best.executable_members().collect::<Vec<_>>(),
            vec!["AQUAGYM", "WEIGHT"]
        );
        // intrinsic best carries the published role conflict
        assert!(groups[1]
            .role_conflicts
            .contains(&"DIC_NULLIPAROUS".to_string()));
    }

    #[test]
    fn replication_groups_freq_ui_canonical_names() {
        let schema = paper_schema();
        let groups = build_groups(&schema, "FREQ_UI", GroupMode::Replication, None).unwrap();
        assert_eq!(
            groups[5].members,
            vec!["TYPE_LABOUR", "AQUAGYM", "STRENGTH"]
        );
        assert_eq!(
            groups[1].members,
            vec!["TYPE_LABOUR", "EPISIOTOMY", "DIC_NULLIPAROUS"]
        );
        // every non-flagged member resolves in the schema
        for g in &groups {
            for m in g.executable_members() {
                assert!(schema.position(m).is_some(), "unknown member {m}");
            }
        }
    }

    #[test]
    fn intrinsic_union_extrinsic_is_all() {
        let schema = paper_schema();
        for target in crate::tabular::TARGETS {
            let groups = build_groups(&schema, target, GroupMode::Replication, None).unwrap();
            let mut union: Vec<&String> =
                groups[0].members.iter().chain(&groups[2].members).collect();
            union.sort();
            let mut all: Vec<&String> = groups[4].members.iter().collect();
            all.sort();
            assert_eq!(union, all);
        }
    }

    #[test]
    fn unknown_target_rejected() {
        let schema = paper_schema();
        assert!(build_groups(&schema, "VAS_PERINE", GroupMode::Replication, None).is_err());
    }
}
