//! Boole's inequality for three dichotomic variables: exact checks on
//! triple- and pair-collected data, joint-distribution feasibility, and
//! contextual models that exceed the bound when data arrive in pairs.

pub mod boole;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod exact;
pub mod model;
pub mod representability;
pub mod simplex;

pub use boole::{
    boole_margins, check_pair_dataset, check_triple_dataset, exhaustive_lemma, per_sample_form,
    BooleReport, Margin, SignPattern, Verdict,
};
pub use error::{Error, Result};
pub use model::{
    correlations_from_pairs, correlations_from_triples, pair_correlation, CorrelationTriple,
    ExactCorrelation, GroupLabel, Outcome, PairDataset, PairRun, Setting, TripleDataset, TripleRun,
};
pub use representability::{
    achievable_set_bruteforce, find_joint_distribution, is_triple_representable,
    synthesize_triples, FeasibilityResult, JointDistribution,
};
