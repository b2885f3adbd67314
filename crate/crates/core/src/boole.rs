//! The Boole inequality `|F12 ± F13| <= 1 ± F23`, expanded into four linear
//! facets `1 - (s12*F12 + s13*F13 + s23*F23) >= 0` with `s12*s13*s23 = -1`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{clamp_nonnegative, to_f64, Rational};
use crate::model::{
    correlations_from_pairs, correlations_from_triples, CorrelationTriple, Outcome, PairDataset,
    TripleDataset, TripleRun,
};

/// Range and verdict tolerance for approximate correlations.
pub const APPROX_TOLERANCE: f64 = 1e-12;

/// Signs `(s12, s13, s23)` of one facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignPattern {
    /// `(+, +, -)`
    Ppm,
    /// `(+, -, +)`
    Pmp,
    /// `(-, +, +)`
    Mpp,
    /// `(-, -, -)`
    Mmm,
}

impl SignPattern {
    pub const ALL: [SignPattern; 4] = [
        SignPattern::Ppm,
        SignPattern::Pmp,
        SignPattern::Mpp,
        SignPattern::Mmm,
    ];

    pub fn signs(self) -> [i64; 3] {
        match self {
            SignPattern::Ppm => [1, 1, -1],
            SignPattern::Pmp => [1, -1, 1],
            SignPattern::Mpp => [-1, 1, 1],
            SignPattern::Mmm => [-1, -1, -1],
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            SignPattern::Ppm => "ppm",
            SignPattern::Pmp => "pmp",
            SignPattern::Mpp => "mpp",
            SignPattern::Mmm => "mmm",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == key)
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A facet margin: exact for exact inputs, real otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    Exact(Rational),
    Approx(f64),
}

impl Margin {
    pub fn value(&self) -> f64 {
        match self {
            Margin::Exact(r) => to_f64(r),
            Margin::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            Margin::Exact(r) => Some(*r),
            Margin::Approx(_) => None,
        }
    }

    /// Negative beyond the tolerance that applies to this representation.
    pub fn is_violating(&self) -> bool {
        match self {
            Margin::Exact(r) => r.is_negative(),
            Margin::Approx(x) => *x < -APPROX_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BooleReport {
    /// Indexed by [`SignPattern::position`].
    pub margins: [Margin; 4],
    pub verdict: Verdict,
    pub violation_amount: Margin,
    pub worst_pattern: SignPattern,
}

impl BooleReport {
    pub fn margin(&self, pattern: SignPattern) -> Margin {
        self.margins[pattern.position()]
    }

    pub fn min_margin(&self) -> Margin {
        self.margin(self.worst_pattern)
    }

    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }
}

fn check_range_exact(r: &Rational) -> Result<()> {
    let one = Rational::from_integer(1);
    if *r > one || *r < -one {
        return Err(Error::CorrelationOutOfRange(r.to_string()));
    }
    Ok(())
}

fn check_range_approx(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > 1.0 + APPROX_TOLERANCE {
        return Err(Error::CorrelationOutOfRange(x.to_string()));
    }
    Ok(())
}

/// Evaluates all four facets of the Boole inequality on `c`.
///
/// The worst pattern is the first facet (in [`SignPattern::ALL`] order) with
/// the smallest margin.
pub fn boole_margins(c: &CorrelationTriple) -> Result<BooleReport> {
    match c.ratios() {
        Some(f) => {
            f.iter().try_for_each(check_range_exact)?;
            let margins = SignPattern::ALL.map(|p| {
                let s = p.signs();
                let dot = f[0] * s[0] as i128 + f[1] * s[1] as i128 + f[2] * s[2] as i128;
                Rational::from_integer(1) - dot
            });
            let worst = argmin(&margins, |a, b| a < b);
            let verdict = if margins[worst].is_negative() {
                Verdict::Violated
            } else {
                Verdict::Satisfied
            };
            Ok(BooleReport {
                margins: margins.map(Margin::Exact),
                verdict,
                violation_amount: Margin::Exact(clamp_nonnegative(-margins[worst])),
                worst_pattern: SignPattern::ALL[worst],
            })
        }
        None => {
            let f = c.values();
            f.iter().try_for_each(|&x| check_range_approx(x))?;
            let margins = SignPattern::ALL.map(|p| {
                let s = p.signs();
                1.0 - (s[0] as f64 * f[0] + s[1] as f64 * f[1] + s[2] as f64 * f[2])
            });
            let worst = argmin(&margins, |a, b| a < b);
            let verdict = if margins[worst] < -APPROX_TOLERANCE {
                Verdict::Violated
            } else {
                Verdict::Satisfied
            };
            Ok(BooleReport {
                margins: margins.map(Margin::Approx),
                verdict,
                violation_amount: Margin::Approx((-margins[worst]).max(0.0)),
                worst_pattern: SignPattern::ALL[worst],
            })
        }
    }
}

fn argmin<T>(xs: &[T; 4], less: impl Fn(&T, &T) -> bool) -> usize {
    let mut best = 0;
    for i in 1..4 {
        if less(&xs[i], &xs[best]) {
            best = i;
        }
    }
    best
}

/// `s12*a1*a2 + s13*a1*a3 + s23*a2*a3`; always `1` or `-3`.
pub fn per_sample_form(run: &TripleRun, pattern: SignPattern) -> i64 {
    form_value(&run.outcomes, pattern)
}

fn form_value(a: &[Outcome; 3], pattern: SignPattern) -> i64 {
    let [a1, a2, a3] = a.map(Outcome::value);
    let [s12, s13, s23] = pattern.signs();
    s12 * a1 * a2 + s13 * a1 * a3 + s23 * a2 * a3
}

/// The eight sign triples, `+` before `-` in each position.
pub fn all_sign_triples() -> [[Outcome; 3]; 8] {
    let mut out = [[Outcome::Plus; 3]; 8];
    for (k, slot) in out.iter_mut().enumerate() {
        for (i, o) in slot.iter_mut().enumerate() {
            *o = Outcome::from_bool_plus(k >> (2 - i) & 1 == 0);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaRow {
    pub triple: [Outcome; 3],
    pub pattern: SignPattern,
    pub value: i64,
}

/// Evaluates the per-run form for every sign triple under every facet (32 rows).
///
/// Since each value is at most 1, each facet's average over any triple
/// dataset is at most 1, i.e. every margin is nonnegative.
pub fn exhaustive_lemma() -> Vec<LemmaRow> {
    all_sign_triples()
        .into_iter()
        .flat_map(|triple| {
            SignPattern::ALL.into_iter().map(move |pattern| LemmaRow {
                triple,
                pattern,
                value: form_value(&triple, pattern),
            })
        })
        .collect()
}

/// Boole report of a triple dataset. Always satisfied, but computed rather
/// than assumed.
pub fn check_triple_dataset(ds: &TripleDataset) -> Result<BooleReport> {
    boole_margins(&correlations_from_triples(ds)?)
}

/// Boole report on the three group averages of a pair dataset; either verdict
/// is possible.
pub fn check_pair_dataset(ds: &PairDataset) -> Result<BooleReport> {
    boole_margins(&correlations_from_pairs(ds)?)
}

/// The two absolute-value inequalities evaluated directly, without facets.
pub fn absolute_value_form_holds(f: [f64; 3], tol: f64) -> bool {
    let [f12, f13, f23] = f;
    (f12 + f13).abs() <= 1.0 + f23 + tol && (f12 - f13).abs() <= 1.0 - f23 + tol
}

/// Exact counterpart of [`absolute_value_form_holds`].
pub fn absolute_value_form_holds_exact(f: [Rational; 3]) -> bool {
    let one = Rational::from_integer(1);
    let [f12, f13, f23] = f;
    (f12 + f13).abs() <= one + f23 && (f12 - f13).abs() <= one - f23
}

/// Exact margins sum; four for any input.
pub fn margin_sum(report: &BooleReport) -> Margin {
    match report.margins[0] {
        Margin::Exact(_) => Margin::Exact(
            report
                .margins
                .iter()
                .fold(Rational::zero(), |acc, m| acc + m.exact().unwrap()),
        ),
        Margin::Approx(_) => Margin::Approx(report.margins.iter().map(Margin::value).sum()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use Outcome::{Minus as M, Plus as P};

    fn exact_margins(c: CorrelationTriple) -> [Rational; 4] {
        boole_margins(&c).unwrap().margins.map(|m| m.exact().unwrap())
    }

    fn r(n: i128) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn margin_examples() {
        let rep = boole_margins(&CorrelationTriple::approximate(0.0, 0.0, 0.0)).unwrap();
        assert!(rep.margins.iter().all(|m| m.value() == 1.0));
        assert!(rep.is_satisfied());

        let m = exact_margins(CorrelationTriple::rational(r(1), r(1), r(1)));
        assert_eq!(m, [r(0), r(0), r(0), r(4)]);
        let rep = boole_margins(&CorrelationTriple::rational(r(1), r(1), r(1))).unwrap();
        assert!(rep.is_satisfied());
        assert_eq!(rep.violation_amount, Margin::Exact(r(0)));

        let rep = boole_margins(&CorrelationTriple::rational(r(1), r(1), r(-1))).unwrap();
        assert_eq!(rep.worst_pattern, SignPattern::Ppm);
        assert_eq!(rep.min_margin(), Margin::Exact(r(-2)));
        assert_eq!(rep.verdict, Verdict::Violated);
        assert_eq!(rep.violation_amount, Margin::Exact(r(2)));
    }

    #[test]
    fn out_of_range_is_rejected() {
        let err = boole_margins(&CorrelationTriple::approximate(1.1, 0.0, 0.0));
        assert!(matches!(err, Err(Error::CorrelationOutOfRange(_))));
        let err = boole_margins(&CorrelationTriple::rational(r(0), rational(-3, 2), r(0)));
        assert!(matches!(err, Err(Error::CorrelationOutOfRange(_))));
        let err = boole_margins(&CorrelationTriple::approximate(f64::NAN, 0.0, 0.0));
        assert!(err.is_err());
        // inside the tolerance band
        assert!(boole_margins(&CorrelationTriple::approximate(1.0 + 1e-13, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn approximate_ties_count_as_satisfied() {
        let rep = boole_margins(&CorrelationTriple::approximate(1.0, 1.0, 1.0 - 1e-13)).unwrap();
        assert!(rep.min_margin().value() < 0.0);
        assert!(rep.is_satisfied());
    }

    #[test]
    fn per_sample_examples() {
        let run = |o| TripleRun { alpha: 1, outcomes: o };
        assert_eq!(per_sample_form(&run([P, P, P]), SignPattern::Ppm), 1);
        assert_eq!(per_sample_form(&run([P, M, M]), SignPattern::Ppm), -3);
        assert_eq!(per_sample_form(&run([M, P, M]), SignPattern::Mmm), 1);
    }

    #[test]
    fn lemma_table_shape() {
        let table = exhaustive_lemma();
        assert_eq!(table.len(), 32);
        assert!(table.iter().all(|row| row.value == 1 || row.value == -3));
        for p in SignPattern::ALL {
            let ones = table.iter().filter(|r| r.pattern == p && r.value == 1).count();
            let neg = table.iter().filter(|r| r.pattern == p && r.value == -3).count();
            assert_eq!((ones, neg), (6, 2));
        }
        assert_eq!(table.iter().map(|r| r.value).max(), Some(1));
        assert_eq!(table.iter().map(|r| r.value).min(), Some(-3));
    }

    #[test]
    fn sign_triples_are_distinct_and_ordered() {
        let all = all_sign_triples();
        assert_eq!(all[0], [P, P, P]);
        assert_eq!(all[1], [P, P, M]);
        assert_eq!(all[7], [M, M, M]);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn triple_dataset_examples() {
        let ds = TripleDataset::from_outcomes([[P, P, P]]).unwrap();
        let rep = check_triple_dataset(&ds).unwrap();
        assert!(rep.is_satisfied());
        assert_eq!(rep.min_margin(), Margin::Exact(r(0)));

        let ds = TripleDataset::from_outcomes([[P, P, M], [M, P, P]]).unwrap();
        let c = correlations_from_triples(&ds).unwrap();
        assert_eq!(c.values(), [0.0, -1.0, 0.0]);
        let m = exact_margins(c);
        assert_eq!(m, [r(2), r(0), r(2), r(0)]);
        assert!(check_triple_dataset(&ds).unwrap().is_satisfied());
    }

    #[test]
    fn pair_dataset_can_violate() {
        use crate::model::{GroupLabel, PairRun};
        let run = |g, a, b| PairRun {
            group: g,
            alpha: 1,
            out_first: a,
            out_second: b,
            times: None,
        };
        let ds = PairDataset::new(
            vec![run(GroupLabel::G12, P, P)],
            vec![run(GroupLabel::G13, P, P)],
            vec![run(GroupLabel::G23, P, M)],
        )
        .unwrap();
        let rep = check_pair_dataset(&ds).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        assert_eq!(rep.violation_amount, Margin::Exact(r(2)));

        let triples = TripleDataset::from_outcomes([[P, M, P], [M, M, P], [P, P, P]]).unwrap();
        assert!(check_pair_dataset(&triples.as_pair_dataset()).unwrap().is_satisfied());
    }

    #[test]
    fn margins_sum_to_four() {
        let rep = boole_margins(&CorrelationTriple::rational(
            rational(1, 3),
            rational(-2, 7),
            rational(5, 11),
        ))
        .unwrap();
        assert_eq!(margin_sum(&rep), Margin::Exact(r(4)));
    }
}
