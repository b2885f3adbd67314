//! Random context-free models: finite λ alphabets, random rule tables and
//! random λ distributions. Under pair collection their averages still respect
//! the Boole bound up to sampling error; under triple collection exactly.

use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::protocol::{run_pair_protocol, run_triple_protocol, MeasurementModel, Schedule, SubstreamRng};
use crate::boole::{boole_margins, BooleReport};
use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};
use crate::model::{CorrelationTriple, Outcome, Setting};

/// Largest λ alphabet drawn by [`FiniteModel::random`].
pub const MAX_ALPHABET: usize = 8;

/// Smallest per-group count accepted by [`context_free_property_run`].
pub const MIN_RUNS_PER_GROUP: usize = 100;

/// λ takes values `0..k` with the given probabilities; `table[λ][i]` is the
/// answer to setting `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModel {
    pub probabilities: Vec<f64>,
    pub table: Vec<[Outcome; 3]>,
}

impl FiniteModel {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let k = rng.gen_range(1..=MAX_ALPHABET);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let table = (0..k)
            .map(|_| [0; 3].map(|_| Outcome::from_bool_plus(rng.gen())))
            .collect();
        Self {
            probabilities: raw.iter().map(|w| w / total).collect(),
            table,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.table.len()
    }

    /// `sum_λ p(λ) A(i, λ) A(j, λ)` for the three pairs.
    pub fn expected_correlations(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (p, row) in self.probabilities.iter().zip(&self.table) {
            let [a1, a2, a3] = row.map(|o| o.value() as f64);
            out[0] += p * a1 * a2;
            out[1] += p * a1 * a3;
            out[2] += p * a2 * a3;
        }
        out
    }

    pub fn to_measurement_model(&self) -> MeasurementModel<usize> {
        let dist = WeightedIndex::new(&self.probabilities).expect("positive weights");
        let table = self.table.clone();
        MeasurementModel::context_free(
            format!("finite context-free model, {} preparations", self.alphabet_size()),
            move |rng: &mut SubstreamRng| rng.sample(&dist),
            move |setting: Setting, lambda: &usize| table[*lambda][setting.position()],
        )
    }
}

/// `-5 * sqrt(3) / sqrt(m)`.
pub fn statistical_margin_bound(m_per_group: usize) -> f64 {
    -5.0 * 3f64.sqrt() / (m_per_group as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRunSummary {
    pub trials: usize,
    pub m_per_group: usize,
    pub seed: u64,
    /// Smallest facet margin over all pair-mode runs.
    pub worst_pair_margin: Rational,
    /// Smallest facet margin over all triple-mode runs.
    pub worst_triple_margin: Rational,
    pub bound: f64,
}

impl PropertyRunSummary {
    pub fn within_bound(&self) -> bool {
        to_f64(&self.worst_pair_margin) >= self.bound
    }
}

/// Per-trial seeds: the model, the pair run and the triple run each get their own.
fn trial_seeds(seed: u64, trial: usize) -> (ChaCha8Rng, u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let pair_seed = rng.gen();
    let triple_seed = rng.gen();
    (rng, pair_seed, triple_seed)
}

/// Pair-mode and triple-mode reports of one model.
pub fn evaluate_model<L>(
    model: &MeasurementModel<L>,
    m_per_group: usize,
    pair_seed: u64,
    triple_seed: u64,
) -> Result<(BooleReport, BooleReport)> {
    if !model.is_context_free() {
        return Err(Error::InvalidParameter("model must be context-free".into()));
    }
    let (_, pair) = run_pair_protocol(model, &Schedule::untimed([m_per_group; 3])?, pair_seed)?;
    let (_, triple) = run_triple_protocol(model, m_per_group, triple_seed)?;
    Ok((pair.boole, triple))
}

/// Runs `trials` random context-free models in both collection modes and
/// records the worst facet margins.
pub fn context_free_property_run(
    m_per_group: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyRunSummary> {
    if m_per_group < MIN_RUNS_PER_GROUP {
        return Err(Error::InvalidParameter(format!(
            "m_per_group must be at least {MIN_RUNS_PER_GROUP}, got {m_per_group}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let results: Vec<(Rational, Rational)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (mut rng, pair_seed, triple_seed) = trial_seeds(seed, trial);
            let model = FiniteModel::random(&mut rng).to_measurement_model();
            let (pair, triple) = evaluate_model(&model, m_per_group, pair_seed, triple_seed)?;
            Ok((
                pair.min_margin().exact().expect("exact"),
                triple.min_margin().exact().expect("exact"),
            ))
        })
        .collect::<Result<_>>()?;

    let worst_pair_margin = results.iter().map(|r| r.0).min().expect("trials >= 1");
    let worst_triple_margin = results.iter().map(|r| r.1).min().expect("trials >= 1");
    Ok(PropertyRunSummary {
        trials,
        m_per_group,
        seed,
        worst_pair_margin,
        worst_triple_margin,
        bound: statistical_margin_bound(m_per_group),
    })
}

/// The random models a property run with this seed draws, for inspection.
pub fn property_run_models(trials: usize, seed: u64) -> Vec<FiniteModel> {
    (0..trials)
        .map(|trial| FiniteModel::random(&mut trial_seeds(seed, trial).0))
        .collect()
}

/// Facet report of a finite model's exact expectation values.
pub fn expected_report(model: &FiniteModel) -> Result<BooleReport> {
    boole_margins(&CorrelationTriple::Approximate(model.expected_correlations()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boole::Margin;
    use crate::exact::rational;
    use crate::representability::{is_triple_representable, FEASIBILITY_TOLERANCE};

    #[test]
    fn deterministic_plus_rule_sits_on_the_boundary() {
        let model = FiniteModel {
            probabilities: vec![1.0],
            table: vec![[Outcome::Plus; 3]],
        }
        .to_measurement_model();
        let (pair, triple) = evaluate_model(&model, 100, 1, 2).unwrap();
        let zero = Margin::Exact(rational(0, 1));
        let four = Margin::Exact(rational(4, 1));
        assert_eq!(pair.margins, [zero, zero, zero, four]);
        assert_eq!(triple.margins, [zero, zero, zero, four]);
    }

    #[test]
    fn expectations_are_representable() {
        for model in property_run_models(200, 17) {
            let c = CorrelationTriple::Approximate(model.expected_correlations());
            assert!(is_triple_representable(&c, FEASIBILITY_TOLERANCE).unwrap());
        }
    }

    #[test]
    fn small_property_run() {
        let summary = context_free_property_run(500, 10, 3).unwrap();
        assert!(summary.within_bound());
        assert!(summary.worst_triple_margin >= rational(0, 1));
        assert_eq!(summary, context_free_property_run(500, 10, 3).unwrap());
    }

    #[test]
    fn argument_checks() {
        assert!(context_free_property_run(99, 1, 0).is_err());
        assert!(context_free_property_run(100, 0, 0).is_err());
    }

    #[test]
    fn bound_value() {
        assert!((statistical_margin_bound(10_000) + 0.0866).abs() < 1e-4);
    }
}
