//! From-scratch tabular classification toolkit and experiment harness for
//! studying postpartum urinary incontinence predictors.
//!
//! The crate bundles the classifiers (Gaussian and Complement Naive Bayes,
//! KNN, decision trees), class-balancing oversamplers (RandomOver, SMOTE),
//! univariate feature selection, a stratified cross-validation engine with
//! grid search and t-tests, a synthetic cohort generator, and a protocol
//! runner that produces per-target/model/group F1 reports and verifies the
//! published summary statistics against an embedded fixture.

pub mod bayes;
pub mod cohort;
pub mod error;
pub mod evalstat;
pub mod fixture;
pub mod neighbors;
pub mod protocol;
pub mod report;
pub mod resample;
pub mod select;
pub mod tabular;
pub mod tree;

pub use error::Error;

/// Crate version embedded in machine-format reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a over bytes; used to derive per-run RNG seeds from the master seed
/// so results are independent of execution schedule.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive a child seed from a master seed and a run identifier string.
pub fn derive_seed(master: u64, ident: &str) -> u64 {
    let mut buf = master.to_le_bytes().to_vec();
    buf.extend_from_slice(ident.as_bytes());
    fnv1a(&buf)
}
