//! Dichotomic outcomes, triple- and pair-collected datasets, and exact
//! pairwise correlations.
//!
//! Every dataset-level correlation is an integer `(sum, count)` pair; floating
//! point only enters through externally supplied targets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational, to_f64, Rational};

/// A single measurement result, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i64 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(Error::InvalidOutcome(other.to_string())),
        }
    }

    pub fn from_bool_plus(plus: bool) -> Self {
        if plus {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn times(self, other: Outcome) -> Outcome {
        if self == other {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

/// Setting index 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Setting(u8);

impl Setting {
    pub const ONE: Setting = Setting(1);
    pub const TWO: Setting = Setting(2);
    pub const THREE: Setting = Setting(3);
    pub const ALL: [Setting; 3] = [Setting::ONE, Setting::TWO, Setting::THREE];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=3).contains(&index) {
            Ok(Setting(index))
        } else {
            Err(Error::InvalidParameter(format!("setting index {index} not in 1..=3")))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position, for array lookups.
    pub fn position(self) -> usize {
        self.0 as usize - 1
    }
}

/// One run of the triple-collection regime: all three outcomes recorded together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TripleRun {
    pub alpha: usize,
    pub outcomes: [Outcome; 3],
}

impl TripleRun {
    pub fn a1(&self) -> Outcome {
        self.outcomes[0]
    }

    pub fn a2(&self) -> Outcome {
        self.outcomes[1]
    }

    pub fn a3(&self) -> Outcome {
        self.outcomes[2]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleDataset {
    runs: Vec<TripleRun>,
}

impl TripleDataset {
    /// Validates that `runs` is nonempty and numbered `1..=M` in order.
    pub fn new(runs: Vec<TripleRun>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, run) in runs.iter().enumerate() {
            if run.alpha != i + 1 {
                return Err(Error::NonContiguousRuns {
                    expected: i + 1,
                    found: run.alpha,
                });
            }
        }
        Ok(Self { runs })
    }

    /// Numbers the triples `1..=M` in the given order.
    pub fn from_outcomes<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = [Outcome; 3]>,
    {
        let runs = triples
            .into_iter()
            .enumerate()
            .map(|(i, outcomes)| TripleRun {
                alpha: i + 1,
                outcomes,
            })
            .collect();
        Self::new(runs)
    }

    pub fn runs(&self) -> &[TripleRun] {
        &self.runs
    }

    pub fn m(&self) -> usize {
        self.runs.len()
    }

    /// Appends `other`, renumbering its runs.
    pub fn concat(&self, other: &TripleDataset) -> TripleDataset {
        let triples = self.runs.iter().chain(other.runs.iter()).map(|r| r.outcomes);
        TripleDataset::from_outcomes(triples).expect("concatenation of nonempty datasets")
    }

    /// The three pair-collected views of this dataset, each group seeing every run.
    pub fn as_pair_dataset(&self) -> PairDataset {
        let mut groups: [Vec<PairRun>; 3] = Default::default();
        for group in GroupLabel::ALL {
            let (first, second) = group.settings();
            groups[group.position()] = self
                .runs
                .iter()
                .map(|run| PairRun {
                    group,
                    alpha: run.alpha,
                    out_first: run.outcomes[first.position()],
                    out_second: run.outcomes[second.position()],
                    times: None,
                })
                .collect();
        }
        let [g12, g13, g23] = groups;
        PairDataset::new(g12, g13, g23).expect("triple dataset is nonempty")
    }
}

/// Which pair of settings was measured together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupLabel {
    G12,
    G13,
    G23,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 3] = [GroupLabel::G12, GroupLabel::G13, GroupLabel::G23];

    /// The two settings in ascending order.
    pub fn settings(self) -> (Setting, Setting) {
        match self {
            GroupLabel::G12 => (Setting::ONE, Setting::TWO),
            GroupLabel::G13 => (Setting::ONE, Setting::THREE),
            GroupLabel::G23 => (Setting::TWO, Setting::THREE),
        }
    }

    pub fn position(self) -> usize {
        match self {
            GroupLabel::G12 => 0,
            GroupLabel::G13 => 1,
            GroupLabel::G23 => 2,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            GroupLabel::G12 => "12",
            GroupLabel::G13 => "13",
            GroupLabel::G23 => "23",
        }
    }

    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "12" => Ok(GroupLabel::G12),
            "13" => Ok(GroupLabel::G13),
            "23" => Ok(GroupLabel::G23),
            other => Err(Error::InvalidParameter(format!("unknown group {other:?}"))),
        }
    }

    pub fn contains(self, setting: Setting) -> bool {
        let (a, b) = self.settings();
        a == setting || b == setting
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.code())
    }
}

/// One run of the pair-collection regime.
///
/// `out_first` belongs to the lower setting index of `group`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRun {
    pub group: GroupLabel,
    pub alpha: usize,
    pub out_first: Outcome,
    pub out_second: Outcome,
    pub times: Option<(f64, f64)>,
}

impl PairRun {
    pub fn product(&self) -> Outcome {
        self.out_first.times(self.out_second)
    }

    fn validate(&self) -> Result<()> {
        if let Some((t1, t2)) = self.times {
            if t1.is_nan() || t2.is_nan() {
                return Err(Error::InvalidParameter("NaN timestamp".into()));
            }
            if t1 > t2 {
                return Err(Error::UnorderedTimestamps {
                    first: t1,
                    second: t2,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    groups: [Vec<PairRun>; 3],
}

impl PairDataset {
    pub fn new(runs_12: Vec<PairRun>, runs_13: Vec<PairRun>, runs_23: Vec<PairRun>) -> Result<Self> {
        let groups = [runs_12, runs_13, runs_23];
        for (label, runs) in GroupLabel::ALL.into_iter().zip(groups.iter()) {
            if runs.is_empty() {
                return Err(Error::EmptyGroup(label.code()));
            }
            for (i, run) in runs.iter().enumerate() {
                if run.group != label {
                    return Err(Error::GroupMismatch {
                        expected: label.code(),
                        found: run.group.code(),
                    });
                }
                if run.alpha != i + 1 {
                    return Err(Error::NonContiguousRuns {
                        expected: i + 1,
                        found: run.alpha,
                    });
                }
                run.validate()?;
            }
        }
        Ok(Self { groups })
    }

    /// Sorts arbitrary runs into their groups (stable), then validates.
    pub fn from_runs<I: IntoIterator<Item = PairRun>>(runs: I) -> Result<Self> {
        let mut groups: [Vec<PairRun>; 3] = Default::default();
        for run in runs {
            groups[run.group.position()].push(run);
        }
        let [g12, g13, g23] = groups;
        Self::new(g12, g13, g23)
    }

    pub fn group(&self, label: GroupLabel) -> &[PairRun] {
        &self.groups[label.position()]
    }

    pub fn runs_12(&self) -> &[PairRun] {
        self.group(GroupLabel::G12)
    }

    pub fn runs_13(&self) -> &[PairRun] {
        self.group(GroupLabel::G13)
    }

    pub fn runs_23(&self) -> &[PairRun] {
        self.group(GroupLabel::G23)
    }

    /// `[m1, m2, m3]`.
    pub fn counts(&self) -> [usize; 3] {
        [self.groups[0].len(), self.groups[1].len(), self.groups[2].len()]
    }

    /// All runs, group by group.
    pub fn iter(&self) -> impl Iterator<Item = &PairRun> {
        self.groups.iter().flatten()
    }
}

/// `sum / count` of outcome products, kept as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactCorrelation {
    sum: i64,
    count: u64,
}

impl ExactCorrelation {
    pub fn new(sum: i64, count: u64) -> Result<Self> {
        let valid = count > 0
            && sum.unsigned_abs() <= count
            && (sum.rem_euclid(2) as u64) == count % 2;
        if valid {
            Ok(Self { sum, count })
        } else {
            Err(Error::InvalidParameter(format!(
                "({sum}, {count}) is not a sum of {count} signs"
            )))
        }
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn ratio(&self) -> Rational {
        rational(self.sum as i128, self.count as i128)
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.ratio())
    }
}

/// Averages a list of outcome products given as integers (each must be `±1`).
pub fn pair_correlation(products: &[i64]) -> Result<ExactCorrelation> {
    if products.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sum = 0i64;
    for &p in products {
        sum += Outcome::from_value(p)?.value();
    }
    ExactCorrelation::new(sum, products.len() as u64)
}

fn correlation_of<I: IntoIterator<Item = Outcome>>(products: I) -> Result<ExactCorrelation> {
    let (sum, count) = products
        .into_iter()
        .fold((0i64, 0u64), |(s, c), p| (s + p.value(), c + 1));
    if count == 0 {
        return Err(Error::EmptySample);
    }
    ExactCorrelation::new(sum, count)
}

/// `(F12, F13, F23)` in one of three representations.
///
/// `Exact` comes from datasets, `Rational` from exactly specified targets and
/// `Approximate` from real-valued targets.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationTriple {
    Exact([ExactCorrelation; 3]),
    Rational([Rational; 3]),
    Approximate([f64; 3]),
}

impl CorrelationTriple {
    pub fn approximate(f12: f64, f13: f64, f23: f64) -> Self {
        CorrelationTriple::Approximate([f12, f13, f23])
    }

    pub fn rational(f12: Rational, f13: Rational, f23: Rational) -> Self {
        CorrelationTriple::Rational([f12, f13, f23])
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, CorrelationTriple::Approximate(_))
    }

    pub fn values(&self) -> [f64; 3] {
        match self {
            CorrelationTriple::Exact(c) => c.map(|x| x.value()),
            CorrelationTriple::Rational(r) => r.map(|x| to_f64(&x)),
            CorrelationTriple::Approximate(v) => *v,
        }
    }

    /// Exact components, `None` for approximate triples.
    pub fn ratios(&self) -> Option<[Rational; 3]> {
        match self {
            CorrelationTriple::Exact(c) => Some(c.map(|x| x.ratio())),
            CorrelationTriple::Rational(r) => Some(*r),
            CorrelationTriple::Approximate(_) => None,
        }
    }

    pub fn exact_components(&self) -> Option<&[ExactCorrelation; 3]> {
        match self {
            CorrelationTriple::Exact(c) => Some(c),
            _ => None,
        }
    }
}

/// `(F12, F13, F23)` from a triple dataset; all three share the count `M`.
pub fn correlations_from_triples(ds: &TripleDataset) -> Result<CorrelationTriple> {
    let pick = |i: usize, j: usize| {
        correlation_of(ds.runs().iter().map(|r| r.outcomes[i].times(r.outcomes[j])))
    };
    Ok(CorrelationTriple::Exact([pick(0, 1)?, pick(0, 2)?, pick(1, 2)?]))
}

/// `(F12, F13, F23)` each from its own group only.
pub fn correlations_from_pairs(ds: &PairDataset) -> Result<CorrelationTriple> {
    let mut out = [ExactCorrelation { sum: 0, count: 1 }; 3];
    for label in GroupLabel::ALL {
        out[label.position()] = correlation_of(ds.group(label).iter().map(PairRun::product))
            .map_err(|_| Error::EmptyGroup(label.code()))?;
    }
    Ok(CorrelationTriple::Exact(out))
}
