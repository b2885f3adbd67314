//! Measurement models and the pair-collection protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boole::{boole_margins, check_triple_dataset, BooleReport};
use crate::error::{Error, Result};
use crate::model::{
    correlations_from_pairs, CorrelationTriple, GroupLabel, Outcome, PairDataset, PairRun,
    Setting, TripleDataset,
};

/// Random source handed to hidden-variable samplers.
pub type SubstreamRng = ChaCha8Rng;

/// Independent stream for run `alpha` of `group` (`None` for triple-mode runs).
pub fn substream(seed: u64, group: Option<GroupLabel>, alpha: usize) -> SubstreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slot = group.map_or(0, |g| g.position() as u64 + 1);
    rng.set_stream((slot << 48) | alpha as u64);
    rng
}

/// What a contextual outcome rule may see besides the setting and λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementContext {
    pub group: GroupLabel,
    /// Time stamp of this particular measurement, when the schedule has one.
    pub time: Option<f64>,
}

type ContextFreeFn<L> = dyn Fn(Setting, &L) -> Outcome + Send + Sync;
type ContextualFn<L> = dyn Fn(Setting, &L, &MeasurementContext) -> Outcome + Send + Sync;

pub enum OutcomeRule<L> {
    /// Outcome depends on the setting and the preparation only.
    ContextFree(Box<ContextFreeFn<L>>),
    /// Outcome may also depend on which pair is measured and when.
    Contextual(Box<ContextualFn<L>>),
}

/// A hidden-variable sampler plus an outcome rule.
///
/// Context-freeness is a property of the rule's type: a context-free rule is
/// never handed the group or the time stamp.
pub struct MeasurementModel<L> {
    description: String,
    sampler: Box<dyn Fn(&mut SubstreamRng) -> L + Send + Sync>,
    rule: OutcomeRule<L>,
}

impl<L> MeasurementModel<L> {
    pub fn context_free<S, F>(description: impl Into<String>, sampler: S, rule: F) -> Self
    where
        S: Fn(&mut SubstreamRng) -> L + Send + Sync + 'static,
        F: Fn(Setting, &L) -> Outcome + Send + Sync + 'static,
    {
        Self {
            description: description.into(),
            sampler: Box::new(sampler),
            rule: OutcomeRule::ContextFree(Box::new(rule)),
        }
    }

    pub fn contextual<S, F>(description: impl Into<String>, sampler: S, rule: F) -> Self
    where
        S: Fn(&mut SubstreamRng) -> L + Send + Sync + 'static,
        F: Fn(Setting, &L, &MeasurementContext) -> Outcome + Send + Sync + 'static,
    {
        Self {
            description: description.into(),
            sampler: Box::new(sampler),
            rule: OutcomeRule::Contextual(Box::new(rule)),
        }
    }

    pub fn is_context_free(&self) -> bool {
        matches!(self.rule, OutcomeRule::ContextFree(_))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn sample(&self, rng: &mut SubstreamRng) -> L {
        (self.sampler)(rng)
    }

    /// Evaluates the rule; the context is dropped for context-free models.
    pub fn outcome(&self, setting: Setting, lambda: &L, ctx: &MeasurementContext) -> Outcome {
        match &self.rule {
            OutcomeRule::ContextFree(f) => f(setting, lambda),
            OutcomeRule::Contextual(f) => f(setting, lambda, ctx),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledRun {
    pub group: GroupLabel,
    pub times: Option<(f64, f64)>,
}

/// The order in which pair runs are taken; run `alpha` is entry `alpha - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    runs: Vec<ScheduledRun>,
}

impl Schedule {
    pub fn new(runs: Vec<ScheduledRun>) -> Result<Self> {
        let schedule = Self { runs };
        for (label, n) in GroupLabel::ALL.into_iter().zip(schedule.counts()) {
            if n == 0 {
                return Err(Error::EmptyGroup(label.code()));
            }
        }
        for run in &schedule.runs {
            if let Some((t1, t2)) = run.times {
                if !(t1 <= t2) {
                    return Err(Error::UnorderedTimestamps {
                        first: t1,
                        second: t2,
                    });
                }
            }
        }
        Ok(schedule)
    }

    /// `counts[g]` untimed runs per group, group after group.
    pub fn untimed(counts: [usize; 3]) -> Result<Self> {
        let runs = GroupLabel::ALL
            .into_iter()
            .flat_map(|group| {
                std::iter::repeat_n(ScheduledRun { group, times: None }, counts[group.position()])
            })
            .collect();
        Self::new(runs)
    }

    /// `m` runs per group, each setting measured at `time_of(setting)`.
    pub fn timed(m: usize, time_of: impl Fn(Setting) -> f64) -> Result<Self> {
        let runs = GroupLabel::ALL
            .into_iter()
            .flat_map(|group| {
                let (a, b) = group.settings();
                let times = Some((time_of(a), time_of(b)));
                std::iter::repeat_n(ScheduledRun { group, times }, m)
            })
            .collect();
        Self::new(runs)
    }

    pub fn runs(&self) -> &[ScheduledRun] {
        &self.runs
    }

    pub fn counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for run in &self.runs {
            counts[run.group.position()] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub correlations: CorrelationTriple,
    pub boole: BooleReport,
    pub counts: [usize; 3],
    pub description: String,
    pub seed: Option<u64>,
}

impl ExperimentReport {
    pub fn from_pairs(ds: &PairDataset, description: impl Into<String>, seed: Option<u64>) -> Result<Self> {
        let correlations = correlations_from_pairs(ds)?;
        let boole = boole_margins(&correlations)?;
        Ok(Self {
            correlations,
            boole,
            counts: ds.counts(),
            description: description.into(),
            seed,
        })
    }
}

/// Runs the pair-collection protocol: a fresh λ for every run, drawn from the
/// run's own substream, then both of the group's settings evaluated on it.
///
/// Output is a function of `seed` alone; the thread count does not matter.
pub fn run_pair_protocol<L>(
    model: &MeasurementModel<L>,
    schedule: &Schedule,
    seed: u64,
) -> Result<(PairDataset, ExperimentReport)> {
    let mut next_alpha = [0usize; 3];
    let planned: Vec<(ScheduledRun, usize)> = schedule
        .runs()
        .iter()
        .map(|run| {
            let slot = &mut next_alpha[run.group.position()];
            *slot += 1;
            (*run, *slot)
        })
        .collect();

    let runs: Vec<PairRun> = planned
        .par_iter()
        .map(|(run, alpha)| {
            let mut rng = substream(seed, Some(run.group), *alpha);
            let lambda = model.sample(&mut rng);
            let (first, second) = run.group.settings();
            let ctx = |time| MeasurementContext {
                group: run.group,
                time,
            };
            PairRun {
                group: run.group,
                alpha: *alpha,
                out_first: model.outcome(first, &lambda, &ctx(run.times.map(|t| t.0))),
                out_second: model.outcome(second, &lambda, &ctx(run.times.map(|t| t.1))),
                times: run.times,
            }
        })
        .collect();

    let dataset = PairDataset::from_runs(runs)?;
    let report = ExperimentReport::from_pairs(&dataset, model.description(), Some(seed))?;
    Ok((dataset, report))
}

/// Triple mode: one λ per run and all three settings read from it.
///
/// Only context-free models qualify, since no single group context applies.
pub fn run_triple_protocol<L>(
    model: &MeasurementModel<L>,
    m: usize,
    seed: u64,
) -> Result<(TripleDataset, BooleReport)> {
    let OutcomeRule::ContextFree(rule) = &model.rule else {
        return Err(Error::InvalidParameter(
            "triple mode needs a context-free model".into(),
        ));
    };
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let triples: Vec<[Outcome; 3]> = (1..=m)
        .into_par_iter()
        .map(|alpha| {
            let lambda = model.sample(&mut substream(seed, None, alpha));
            Setting::ALL.map(|s| rule(s, &lambda))
        })
        .collect();
    let ds = TripleDataset::from_outcomes(triples)?;
    let report = check_triple_dataset(&ds)?;
    Ok((ds, report))
}
