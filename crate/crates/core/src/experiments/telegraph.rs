//! A clock-stamped scenario: λ is a random telegraph path and the apparatus
//! multiplies outcomes by a sign that depends on the measured pair.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::protocol::{
    run_pair_protocol, ExperimentReport, MeasurementContext, MeasurementModel, Schedule,
    SubstreamRng,
};
use crate::error::{Error, Result};
use crate::model::{GroupLabel, Outcome, PairDataset, Setting};

/// A `±1` path that starts with a uniform sign and flips at Poisson times.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphPath {
    pub initial: Outcome,
    /// Sorted flip times within `[0, horizon]`.
    pub flips: Vec<f64>,
}

impl TelegraphPath {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, gamma: f64, horizon: f64) -> Self {
        let initial = Outcome::from_bool_plus(rng.gen());
        let mut flips = Vec::new();
        if gamma > 0.0 {
            let wait = Exp::new(gamma).expect("positive rate");
            let mut t = wait.sample(rng);
            while t <= horizon {
                flips.push(t);
                t += wait.sample(rng);
            }
        }
        Self { initial, flips }
    }

    pub fn value_at(&self, t: f64) -> Outcome {
        let n = self.flips.partition_point(|&f| f <= t);
        if n % 2 == 0 {
            self.initial
        } else {
            self.initial.flip()
        }
    }
}

/// `e^{-2 gamma tau}`, the autocorrelation of the telegraph process.
pub fn telegraph_autocorrelation(gamma: f64, tau: f64) -> f64 {
    (-2.0 * gamma * tau).exp()
}

/// Smallest `x` for which `(x, x², -x)` violates the Boole bound.
pub fn violation_threshold() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// Apparatus signs, per group, for the group's (first, second) setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignSchedule {
    signs: [[Outcome; 2]; 3],
}

impl SignSchedule {
    pub fn identity() -> Self {
        Self {
            signs: [[Outcome::Plus; 2]; 3],
        }
    }

    /// Identity except that group G23 reports setting 3 with flipped sign.
    pub fn flip_in_g23() -> Self {
        Self::identity().with_flip(GroupLabel::G23, Setting::THREE)
    }

    pub fn with_flip(mut self, group: GroupLabel, setting: Setting) -> Self {
        let (first, _) = group.settings();
        assert!(group.contains(setting), "{setting:?} not measured in {group}");
        let slot = usize::from(setting != first);
        self.signs[group.position()][slot] = self.signs[group.position()][slot].flip();
        self
    }

    pub fn sign(&self, group: GroupLabel, setting: Setting) -> Outcome {
        let (first, _) = group.settings();
        self.signs[group.position()][usize::from(setting != first)]
    }

    /// Product of the two apparatus signs of `group`.
    pub fn pair_sign(&self, group: GroupLabel) -> f64 {
        let [a, b] = self.signs[group.position()];
        a.times(b).value() as f64
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphParams {
    pub gamma: f64,
    pub delta: f64,
    pub signs: SignSchedule,
}

impl TelegraphParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be > 0, got {}", self.delta)));
        }
        Ok(())
    }

    /// Setting `i` is read at `(i - 1) * delta`.
    pub fn setting_time(&self, setting: Setting) -> f64 {
        (setting.index() - 1) as f64 * self.delta
    }

    /// `x = e^{-2 gamma delta}`.
    pub fn x(&self) -> f64 {
        telegraph_autocorrelation(self.gamma, self.delta)
    }

    /// Expected `(F12, F13, F23)`: the raw process correlation over each
    /// group's time gap times the group's apparatus sign product.
    pub fn expected_correlations(&self) -> [f64; 3] {
        GroupLabel::ALL.map(|g| {
            let (a, b) = g.settings();
            let tau = self.setting_time(b) - self.setting_time(a);
            telegraph_autocorrelation(self.gamma, tau) * self.signs.pair_sign(g)
        })
    }
}

/// The contextual model: outcome = λ(t_m) times the apparatus sign for the
/// measured pair.
pub fn telegraph_model(params: TelegraphParams) -> Result<MeasurementModel<TelegraphPath>> {
    params.validate()?;
    let horizon = params.setting_time(Setting::THREE);
    let description = format!(
        "telegraph gamma={} delta={} signs={}",
        params.gamma,
        params.delta,
        if params.signs.is_identity() { "identity" } else { "custom" }
    );
    Ok(MeasurementModel::contextual(
        description,
        move |rng: &mut SubstreamRng| TelegraphPath::sample(rng, params.gamma, horizon),
        move |setting, path: &TelegraphPath, ctx: &MeasurementContext| {
            let t = ctx.time.expect("telegraph runs are time-stamped");
            path.value_at(t).times(params.signs.sign(ctx.group, setting))
        },
    ))
}

pub fn telegraph_scenario(
    params: TelegraphParams,
    m_per_group: usize,
    seed: u64,
) -> Result<(PairDataset, ExperimentReport)> {
    if m_per_group == 0 {
        return Err(Error::InvalidParameter("m_per_group must be at least 1".into()));
    }
    let model = telegraph_model(params)?;
    let schedule = Schedule::timed(m_per_group, |s| params.setting_time(s))?;
    run_pair_protocol(&model, &schedule, seed)
}
