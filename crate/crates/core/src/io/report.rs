//! The structured report written by the CLI.
//!
//! Field order is fixed by the struct definitions, so identical inputs give
//! byte-identical JSON.

use serde::{Deserialize, Serialize};

use crate::boole::{BooleReport, Margin, SignPattern};
use crate::error::{Error, Result};
use crate::exact::{rational, render_decimal, Rational};
use crate::experiments::ExperimentReport;
use crate::model::{CorrelationTriple, ExactCorrelation};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationDoc {
    pub sum: i64,
    pub count: u64,
    pub decimal: String,
}

impl From<&ExactCorrelation> for CorrelationDoc {
    fn from(c: &ExactCorrelation) -> Self {
        Self {
            sum: c.sum(),
            count: c.count(),
            decimal: render_decimal(&c.ratio()),
        }
    }
}

/// An exact rational with its decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalDoc {
    pub num: i128,
    pub den: i128,
    pub decimal: String,
}

impl From<&Rational> for RationalDoc {
    fn from(r: &Rational) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
            decimal: render_decimal(r),
        }
    }
}

impl RationalDoc {
    pub fn ratio(&self) -> Rational {
        rational(self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correlations {
    pub f12: CorrelationDoc,
    pub f13: CorrelationDoc,
    pub f23: CorrelationDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margins {
    pub ppm: RationalDoc,
    pub pmp: RationalDoc,
    pub mpp: RationalDoc,
    pub mmm: RationalDoc,
}

impl Margins {
    pub fn get(&self, pattern: SignPattern) -> &RationalDoc {
        match pattern {
            SignPattern::Ppm => &self.ppm,
            SignPattern::Pmp => &self.pmp,
            SignPattern::Mpp => &self.mpp,
            SignPattern::Mmm => &self.mmm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub f12: u64,
    pub f13: u64,
    pub f23: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub correlations: Correlations,
    pub margins: Margins,
    pub verdict: String,
    pub violation_amount: RationalDoc,
    pub counts: Counts,
    pub scenario: String,
    pub seed: Option<u64>,
    pub tool_version: String,
}

fn exact_margin(m: &Margin) -> Result<RationalDoc> {
    m.exact()
        .map(|r| RationalDoc::from(&r))
        .ok_or_else(|| Error::InvalidParameter("reports need exact margins".into()))
}

impl ReportDocument {
    /// Builds a report from dataset-derived (exact) correlations.
    pub fn new(
        correlations: &CorrelationTriple,
        boole: &BooleReport,
        scenario: &str,
        seed: Option<u64>,
    ) -> Result<Self> {
        let c = correlations
            .exact_components()
            .ok_or_else(|| Error::InvalidParameter("reports need dataset correlations".into()))?;
        let m = |p: SignPattern| exact_margin(&boole.margin(p));
        Ok(Self {
            correlations: Correlations {
                f12: (&c[0]).into(),
                f13: (&c[1]).into(),
                f23: (&c[2]).into(),
            },
            margins: Margins {
                ppm: m(SignPattern::Ppm)?,
                pmp: m(SignPattern::Pmp)?,
                mpp: m(SignPattern::Mpp)?,
                mmm: m(SignPattern::Mmm)?,
            },
            verdict: boole.verdict.as_str().to_string(),
            violation_amount: exact_margin(&boole.violation_amount)?,
            counts: Counts {
                f12: c[0].count(),
                f13: c[1].count(),
                f23: c[2].count(),
            },
            scenario: scenario.to_string(),
            seed,
            tool_version: TOOL_VERSION.to_string(),
        })
    }

    pub fn from_experiment(report: &ExperimentReport, scenario: &str) -> Result<Self> {
        Self::new(&report.correlations, &report.boole, scenario, report.seed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn margin_sum(&self) -> Rational {
        SignPattern::ALL
            .iter()
            .map(|p| self.margins.get(*p).ratio())
            .fold(rational(0, 1), |a, b| a + b)
    }

    /// Every decimal field equals the rendering of its exact counterpart.
    pub fn decimals_consistent(&self) -> bool {
        let corr_ok = [&self.correlations.f12, &self.correlations.f13, &self.correlations.f23]
            .iter()
            .all(|c| render_decimal(&rational(c.sum as i128, c.count as i128)) == c.decimal);
        let margin_ok = SignPattern::ALL
            .iter()
            .map(|p| self.margins.get(*p))
            .chain(std::iter::once(&self.violation_amount))
            .all(|r| render_decimal(&r.ratio()) == r.decimal);
        corr_ok && margin_ok
    }

    pub fn to_text(&self) -> String {
        let c = &self.correlations;
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for (name, f) in [("F12", &c.f12), ("F13", &c.f13), ("F23", &c.f23)] {
            out.push_str(&format!("{name} = {}/{} = {}\n", f.sum, f.count, f.decimal));
        }
        for p in SignPattern::ALL {
            let m = self.margins.get(p);
            out.push_str(&format!("margin {p} = {}\n", m.decimal));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out.push_str(&format!("violation amount: {}\n", self.violation_amount.decimal));
        out
    }

    /// `pattern,num,den,decimal` rows for the four facets.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,num,den,decimal\n");
        for p in SignPattern::ALL {
            let m = self.margins.get(p);
            out.push_str(&format!("{p},{},{},{}\n", m.num, m.den, m.decimal));
        }
        out
    }
}
