//! Doctors and patients: three doctors, each date staffed by one pair of
//! them, every verdict a fixed function of (doctor, date).
//!
//! Date `d` is staffed by G12 when `d % 3 == 0`, G13 when `1`, G23 when `2`.
//! Doctor 2 answers `+1` on G12 dates and `-1` on G23 dates; doctors 1 and 3
//! always answer `+1`. Pair-collected averages come out as `(1, 1, -1)`.

use rand::Rng;

use super::protocol::{
    run_pair_protocol, ExperimentReport, MeasurementContext, MeasurementModel, Schedule,
    ScheduledRun, SubstreamRng,
};
use crate::error::{Error, Result};
use crate::model::{GroupLabel, Outcome, PairDataset, Setting};

pub type DoctorRule = fn(Setting, u64) -> Outcome;

pub fn date_group(date: u64) -> GroupLabel {
    match date % 3 {
        0 => GroupLabel::G12,
        1 => GroupLabel::G13,
        _ => GroupLabel::G23,
    }
}

/// The date-dependent rule.
pub fn doctor_rule(doctor: Setting, date: u64) -> Outcome {
    match (doctor.index(), date_group(date)) {
        (2, GroupLabel::G23) => Outcome::Minus,
        _ => Outcome::Plus,
    }
}

/// Everyone answers `+1` regardless of date.
pub fn constant_doctor_rule(_doctor: Setting, _date: u64) -> Outcome {
    Outcome::Plus
}

/// λ is the patient's identifier; the rule reads only the date stamp.
pub fn doctors_model(rule: DoctorRule, description: &str) -> MeasurementModel<u64> {
    MeasurementModel::contextual(
        description.to_string(),
        |rng: &mut SubstreamRng| rng.gen::<u64>(),
        move |doctor, _patient: &u64, ctx: &MeasurementContext| {
            let date = ctx.time.expect("doctors runs carry the date") as u64;
            rule(doctor, date)
        },
    )
}

/// Patients of date `d` form `m_per_date` runs stamped with time `d`.
pub fn doctors_schedule(num_dates: usize, m_per_date: usize) -> Result<Schedule> {
    if num_dates < 3 || !num_dates.is_multiple_of(3) {
        return Err(Error::InvalidParameter(format!(
            "number of dates must be a positive multiple of 3, got {num_dates}"
        )));
    }
    if m_per_date == 0 {
        return Err(Error::InvalidParameter("patients per date must be at least 1".into()));
    }
    let runs = (0..num_dates as u64)
        .flat_map(|d| {
            std::iter::repeat_n(ScheduledRun {
                group: date_group(d),
                times: Some((d as f64, d as f64)),
            }, m_per_date)
        })
        .collect();
    Schedule::new(runs)
}

pub fn doctors_scenario_with(
    rule: DoctorRule,
    description: &str,
    num_dates: usize,
    m_per_date: usize,
    seed: u64,
) -> Result<(PairDataset, ExperimentReport)> {
    let schedule = doctors_schedule(num_dates, m_per_date)?;
    run_pair_protocol(&doctors_model(rule, description), &schedule, seed)
}

pub fn doctors_scenario(num_dates: usize, m_per_date: usize) -> Result<(PairDataset, ExperimentReport)> {
    doctors_scenario_with(doctor_rule, "doctors", num_dates, m_per_date, 0)
}

/// True when every recorded verdict equals `rule(doctor, date)`.
pub fn verdicts_follow_rule(ds: &PairDataset, rule: DoctorRule) -> bool {
    ds.iter().all(|run| {
        let Some((t, _)) = run.times else { return false };
        let (a, b) = run.group.settings();
        run.out_first == rule(a, t as u64) && run.out_second == rule(b, t as u64)
    })
}
