//! Which correlation targets can triple-collected data produce?
//!
//! The facet criterion answers the question directly; [`find_joint_distribution`]
//! answers it independently by solving the 8-weight feasibility problem, and
//! [`achievable_set_bruteforce`] enumerates small datasets outright.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::boole::{all_sign_triples, boole_margins, Margin, SignPattern};
use crate::error::{Error, Result};
use crate::exact::{rational, to_f64, Rational};
use crate::model::{CorrelationTriple, ExactCorrelation, Outcome, TripleDataset};
use crate::simplex::{phase_one, LpScalar};

/// Tolerance for real-valued targets, both for the facet criterion and the solver residual.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Largest `m` accepted by [`achievable_set_bruteforce`].
pub const BRUTEFORCE_MAX_RUNS: usize = 6;

/// Probability weights on the eight sign triples, in [`all_sign_triples`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    weights: [f64; 8],
    exact: Option<[Rational; 8]>,
}

impl JointDistribution {
    pub fn weights(&self) -> &[f64; 8] {
        &self.weights
    }

    /// Present when the distribution was solved in exact arithmetic.
    pub fn exact_weights(&self) -> Option<&[Rational; 8]> {
        self.exact.as_ref()
    }

    pub fn support(&self) -> impl Iterator<Item = ([Outcome; 3], f64)> + '_ {
        all_sign_triples()
            .into_iter()
            .zip(self.weights)
            .filter(|(_, w)| *w > 0.0)
    }

    /// `sum_a w(a) a_i a_j` for `(1,2)`, `(1,3)`, `(2,3)`.
    pub fn correlations(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (triple, w) in all_sign_triples().iter().zip(self.weights) {
            for (k, p) in pair_products(triple).into_iter().enumerate() {
                out[k] += w * p as f64;
            }
        }
        out
    }

    pub fn exact_correlations(&self) -> Option<[Rational; 3]> {
        let exact = self.exact.as_ref()?;
        let mut out = [<Rational as Zero>::zero(); 3];
        for (triple, w) in all_sign_triples().iter().zip(exact) {
            for (k, p) in pair_products(triple).into_iter().enumerate() {
                out[k] += *w * p as i128;
            }
        }
        Some(out)
    }
}

fn pair_products(a: &[Outcome; 3]) -> [i64; 3] {
    let [a1, a2, a3] = a.map(Outcome::value);
    [a1 * a2, a1 * a3, a2 * a3]
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityResult {
    Distribution(JointDistribution),
    /// The facet whose margin is negative.
    Certificate(SignPattern),
}

impl FeasibilityResult {
    pub fn distribution(&self) -> Option<&JointDistribution> {
        match self {
            FeasibilityResult::Distribution(d) => Some(d),
            FeasibilityResult::Certificate(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<SignPattern> {
        match self {
            FeasibilityResult::Certificate(p) => Some(*p),
            FeasibilityResult::Distribution(_) => None,
        }
    }
}

/// True iff every facet margin is at least `-tol`.
pub fn is_triple_representable(c: &CorrelationTriple, tol: f64) -> Result<bool> {
    let report = boole_margins(c)?;
    Ok(report.margins.iter().all(|m| match m {
        Margin::Exact(r) => !r.is_negative() || to_f64(r) >= -tol,
        Margin::Approx(x) => *x >= -tol,
    }))
}

fn constraint_matrix<T: LpScalar>(embed: impl Fn(i64) -> T) -> Vec<Vec<T>> {
    let triples = all_sign_triples();
    let mut rows = vec![triples.iter().map(|_| embed(1)).collect::<Vec<_>>()];
    for k in 0..3 {
        rows.push(triples.iter().map(|t| embed(pair_products(t)[k])).collect());
    }
    rows
}

/// Solves for a joint distribution on `{±1}^3` with the given pairwise
/// correlations, or returns the violated facet.
///
/// Exact targets are solved in rational arithmetic; approximate ones in `f64`
/// with residual tolerance [`FEASIBILITY_TOLERANCE`]. The returned weights form
/// a basic solution, so at most four sign triples carry weight.
pub fn find_joint_distribution(c: &CorrelationTriple) -> Result<FeasibilityResult> {
    let report = boole_margins(c)?;
    let certificate = || FeasibilityResult::Certificate(report.worst_pattern);

    match c.ratios() {
        Some(f) => {
            let a = constraint_matrix(|v| Rational::from_integer(v as i128));
            let b = [Rational::from_integer(1), f[0], f[1], f[2]];
            let lp = phase_one(&a, &b);
            if !lp.residual.is_zero() {
                return Ok(certificate());
            }
            let exact: [Rational; 8] = lp.solution.try_into().expect("eight weights");
            Ok(FeasibilityResult::Distribution(JointDistribution {
                weights: exact.map(|w| to_f64(&w)),
                exact: Some(exact),
            }))
        }
        None => {
            let f = c.values();
            let a = constraint_matrix(|v| v as f64);
            let lp = phase_one(&a, &[1.0, f[0], f[1], f[2]]);
            if lp.residual > FEASIBILITY_TOLERANCE {
                return Ok(certificate());
            }
            let mut weights: [f64; 8] = lp.solution.try_into().expect("eight weights");
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            Ok(FeasibilityResult::Distribution(JointDistribution {
                weights,
                exact: None,
            }))
        }
    }
}

/// Builds `m` triples whose empirical correlations approximate exact targets.
///
/// Multiplicities are `m * w` rounded by largest remainder over the solver's
/// joint distribution, ties going to the earlier sign triple. Because that
/// distribution has at most four support points, each empirical correlation is
/// within `2/m` of its target, and equal to it whenever the target is
/// achievable with `m` runs.
pub fn synthesize_triples(c: &CorrelationTriple, m: usize) -> Result<TripleDataset> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if !c.is_exact() {
        return Err(Error::InvalidParameter(
            "synthesis needs exact rational targets".into(),
        ));
    }
    let dist = match find_joint_distribution(c)? {
        FeasibilityResult::Distribution(d) => d,
        FeasibilityResult::Certificate(p) => return Err(Error::Infeasible(p)),
    };
    let weights = dist.exact_weights().expect("exact path");
    let counts = largest_remainder(weights, m as i128);

    let triples = all_sign_triples()
        .into_iter()
        .zip(counts)
        .flat_map(|(t, n)| std::iter::repeat_n(t, n as usize));
    TripleDataset::from_outcomes(triples)
}

fn largest_remainder(weights: &[Rational; 8], m: i128) -> [i128; 8] {
    let scaled = weights.map(|w| w * m);
    let mut counts = scaled.map(|s| s.floor().to_integer());
    let assigned: i128 = counts.iter().sum();
    let mut order: Vec<usize> = (0..8).collect();
    // stable sort keeps lexicographic order among equal remainders
    order.sort_by(|&i, &j| scaled[j].fract().cmp(&scaled[i].fract()));
    for &k in order.iter().take((m - assigned) as usize) {
        counts[k] += 1;
    }
    counts
}

/// Every exact correlation triple produced by some dataset of `m` triples,
/// found by enumerating all `8^m` datasets.
pub fn achievable_set_bruteforce(m: usize) -> Result<BTreeSet<[ExactCorrelation; 3]>> {
    if !(1..=BRUTEFORCE_MAX_RUNS).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "brute force needs 1 <= m <= {BRUTEFORCE_MAX_RUNS}, got {m}"
        )));
    }
    let products: Vec<[i64; 3]> = all_sign_triples().iter().map(pair_products).collect();

    // partitioned by the first run's triple; the union is partition-independent
    let sums: BTreeSet<[i64; 3]> = (0..8usize)
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeSet::new();
            let rest = m - 1;
            let total = 8usize.pow(rest as u32);
            for code in 0..total {
                let mut s = products[first];
                let mut c = code;
                for _ in 0..rest {
                    let p = products[c % 8];
                    c /= 8;
                    s = [s[0] + p[0], s[1] + p[1], s[2] + p[2]];
                }
                found.insert(s);
            }
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });

    Ok(sums
        .into_iter()
        .map(|s| s.map(|x| ExactCorrelation::new(x, m as u64).expect("sum of m signs")))
        .collect())
}

/// All exact triples `(s12, s13, s23) / m` with each `s` a possible sum of `m`
/// signs, i.e. `|s| <= m` and `s = m (mod 2)`.
pub fn parity_grid(m: usize) -> Vec<[ExactCorrelation; 3]> {
    let m = m as i64;
    let values: Vec<i64> = (-m..=m).step_by(2).collect();
    let mut out = Vec::with_capacity(values.len().pow(3));
    for &a in &values {
        for &b in &values {
            for &c in &values {
                out.push([a, b, c].map(|s| ExactCorrelation::new(s, m as u64).expect("grid point")));
            }
        }
    }
    out
}

/// Whether `m` runs can be split into the four product classes of the sign
/// triples in the proportions these correlations require.
///
/// Each run's products satisfy `p12 * p13 * p23 = 1`, so beyond parity the sums
/// obey `s12 + s13 + s23 = -m (mod 4)`; this is the grid on which the facet
/// criterion and enumeration coincide.
pub fn on_run_lattice(c: &[ExactCorrelation; 3]) -> bool {
    let m = c[0].count();
    if c.iter().any(|x| x.count() != m) {
        return false;
    }
    let total = c[0].sum() + c[1].sum() + c[2].sum() + m as i64;
    total.mod_floor(&4) == 0
}

/// Barycentric weights of the tetrahedron vertices `(1,1,1)`, `(1,-1,-1)`,
/// `(-1,1,-1)`, `(-1,-1,1)`: each is the margin of the opposite facet over four.
pub fn vertex_mixture(f: [Rational; 3]) -> Result<[Rational; 4]> {
    let report = boole_margins(&CorrelationTriple::Rational(f))?;
    let quarter = |p: SignPattern| report.margin(p).exact().expect("exact") * rational(1, 4);
    Ok([
        quarter(SignPattern::Mmm),
        quarter(SignPattern::Mpp),
        quarter(SignPattern::Pmp),
        quarter(SignPattern::Ppm),
    ])
}
