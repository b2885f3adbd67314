//! Exhaustive search over deterministic group-contextual strategies.

use crate::boole::{boole_margins, BooleReport};
use crate::exact::{to_f64, Rational};
use crate::model::{
    CorrelationTriple, ExactCorrelation, GroupLabel, Outcome, PairDataset, PairRun, Setting,
};

/// Each group's answers for its (first, second) setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub answers: [[Outcome; 2]; 3],
}

impl DeterministicStrategy {
    /// The strategy that answers `values[i]` for setting `i + 1` in every group.
    pub fn from_setting_values(values: [Outcome; 3]) -> Self {
        Self {
            answers: GroupLabel::ALL.map(|g| {
                let (a, b) = g.settings();
                [values[a.position()], values[b.position()]]
            }),
        }
    }

    pub fn answer(&self, group: GroupLabel, setting: Setting) -> Option<Outcome> {
        let (a, b) = group.settings();
        let pair = self.answers[group.position()];
        if setting == a {
            Some(pair[0])
        } else if setting == b {
            Some(pair[1])
        } else {
            None
        }
    }

    /// No setting is answered differently by two groups.
    pub fn is_context_free(&self) -> bool {
        Setting::ALL.into_iter().all(|s| {
            let mut seen = GroupLabel::ALL.into_iter().filter_map(|g| self.answer(g, s));
            let first = seen.next().expect("every setting is in two groups");
            seen.all(|o| o == first)
        })
    }

    /// One run per group.
    pub fn dataset(&self) -> PairDataset {
        let run = |g: GroupLabel| {
            let [a, b] = self.answers[g.position()];
            vec![PairRun {
                group: g,
                alpha: 1,
                out_first: a,
                out_second: b,
                times: None,
            }]
        };
        PairDataset::new(run(GroupLabel::G12), run(GroupLabel::G13), run(GroupLabel::G23))
            .expect("one run per group")
    }

    pub fn correlations(&self) -> CorrelationTriple {
        CorrelationTriple::Exact(self.answers.map(|[a, b]| {
            ExactCorrelation::new(a.times(b).value(), 1).expect("single product")
        }))
    }

    pub fn report(&self) -> BooleReport {
        boole_margins(&self.correlations()).expect("correlations in range")
    }
}

/// All 64 strategies, in a fixed order.
pub fn all_deterministic_strategies() -> Vec<DeterministicStrategy> {
    (0..64u32)
        .map(|code| {
            let bit = |k: u32| Outcome::from_bool_plus(code >> k & 1 == 0);
            DeterministicStrategy {
                answers: [[bit(5), bit(4)], [bit(3), bit(2)], [bit(1), bit(0)]],
            }
        })
        .collect()
}

/// The eight strategies that answer each setting the same in every group.
pub fn context_free_strategies() -> Vec<DeterministicStrategy> {
    crate::boole::all_sign_triples()
        .into_iter()
        .map(DeterministicStrategy::from_setting_values)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: DeterministicStrategy,
    pub violation: Rational,
    /// Every strategy attaining `violation`, in search order.
    pub maximizers: Vec<DeterministicStrategy>,
    pub evaluated: usize,
}

impl SearchResult {
    pub fn violation_value(&self) -> f64 {
        to_f64(&self.violation)
    }
}

/// Maximizes the violation amount over `candidates`; the first maximizer wins.
pub fn search_strategies(candidates: &[DeterministicStrategy]) -> SearchResult {
    let scored: Vec<(DeterministicStrategy, Rational)> = candidates
        .iter()
        .map(|s| (*s, s.report().violation_amount.exact().expect("exact")))
        .collect();
    let violation = scored.iter().map(|(_, v)| *v).max().expect("nonempty search");
    let maximizers: Vec<_> = scored
        .iter()
        .filter(|(_, v)| *v == violation)
        .map(|(s, _)| *s)
        .collect();
    SearchResult {
        best: maximizers[0],
        violation,
        maximizers,
        evaluated: candidates.len(),
    }
}

pub fn violation_search_deterministic() -> SearchResult {
    search_strategies(&all_deterministic_strategies())
}

pub fn violation_search_context_free() -> SearchResult {
    search_strategies(&context_free_strategies())
}
