//! Model primitives: parameters, the stage game and the one-period expected
//! payoffs of a strategic young player facing a partner with a clear record.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("b must exceed 1 (got {0})")]
    BenefitTooSmall(f64),
    #[error("pi must lie in [0, 1] (got {0})")]
    HonestFractionOutOfRange(f64),
    #[error("alpha must lie in [0, 1) (got {0})")]
    ForgivenessOutOfRange(f64),
    #[error("cost distribution is invalid: {0}")]
    InvalidCostDistribution(String),
    #[error("loss must lie in [0, 1] (got {0})")]
    LossOutOfRange(f64),
}

/// Distribution of the private loss from being exploited, supported on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostDistribution<T> {
    /// `F(x) = x`.
    Uniform,
    /// `F(x) = x^exponent`, exponent > 0.
    Power { exponent: T },
}

#[allow(clippy::derivable_impls)] // derive would require T: Default
impl<T> Default for CostDistribution<T> {
    fn default() -> Self {
        CostDistribution::Uniform
    }
}

impl<T: Scalar> CostDistribution<T> {
    pub fn cdf(&self, x: T) -> T {
        let x = x.max(T::zero()).min(T::one());
        match *self {
            CostDistribution::Uniform => x,
            CostDistribution::Power { exponent } => x.powf(exponent),
        }
    }

    /// Inverse CDF, used to draw losses from a uniform variate.
    pub fn quantile(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        match *self {
            CostDistribution::Uniform => u,
            CostDistribution::Power { exponent } => u.powf(exponent.recip()),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, CostDistribution::Uniform)
    }

    fn validate(&self) -> Result<(), ModelError> {
        match *self {
            CostDistribution::Uniform => Ok(()),
            CostDistribution::Power { exponent } => {
                if exponent.is_finite() && exponent > T::zero() {
                    Ok(())
                } else {
                    Err(ModelError::InvalidCostDistribution(format!(
                        "power exponent must be positive and finite (got {exponent})"
                    )))
                }
            }
        }
    }
}

/// The primitive triple (pi, b, alpha) plus the cost distribution.
///
/// Fields are private so every instance satisfies `b > 1`, `0 <= pi <= 1`
/// and `0 <= alpha < 1`. The discount factor is fixed at one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", into = "RawParams<T>")]
#[serde(bound = "T: Scalar")]
pub struct ModelParams<T> {
    pi: T,
    b: T,
    alpha: T,
    cost_distribution: CostDistribution<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawParams<T> {
    pi: T,
    b: T,
    #[serde(default)]
    alpha: T,
    #[serde(default)]
    cost_distribution: CostDistribution<T>,
}

impl<T: Scalar> TryFrom<RawParams<T>> for ModelParams<T> {
    type Error = ModelError;

    fn try_from(raw: RawParams<T>) -> Result<Self, Self::Error> {
        ModelParams::new(raw.pi, raw.b, raw.alpha)?.with_cost_distribution(raw.cost_distribution)
    }
}

impl<T: Scalar> From<ModelParams<T>> for RawParams<T> {
    fn from(p: ModelParams<T>) -> Self {
        RawParams {
            pi: p.pi,
            b: p.b,
            alpha: p.alpha,
            cost_distribution: p.cost_distribution,
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(pi: T, b: T, alpha: T) -> Result<Self, ModelError> {
        // NaN fails every comparison below and is rejected along with the rest.
        if !(b > T::one()) || !b.is_finite() {
            return Err(ModelError::BenefitTooSmall(b.as_f64()));
        }
        if !(pi >= T::zero() && pi <= T::one()) {
            return Err(ModelError::HonestFractionOutOfRange(pi.as_f64()));
        }
        if !(alpha >= T::zero() && alpha < T::one()) {
            return Err(ModelError::ForgivenessOutOfRange(alpha.as_f64()));
        }
        Ok(Self {
            pi,
            b,
            alpha,
            cost_distribution: CostDistribution::Uniform,
        })
    }

    pub fn with_cost_distribution(mut self, dist: CostDistribution<T>) -> Result<Self, ModelError> {
        dist.validate()?;
        self.cost_distribution = dist;
        Ok(self)
    }

    pub fn with_alpha(self, alpha: T) -> Result<Self, ModelError> {
        Self::new(self.pi, self.b, alpha)?.with_cost_distribution(self.cost_distribution)
    }

    pub fn with_pi(self, pi: T) -> Result<Self, ModelError> {
        Self::new(pi, self.b, self.alpha)?.with_cost_distribution(self.cost_distribution)
    }

    /// Fraction of honest types in each group.
    pub fn pi(&self) -> T {
        self.pi
    }

    /// Benefit from defecting against a cooperator.
    pub fn b(&self) -> T {
        self.b
    }

    /// Per-period probability that a stigma is erased.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn cost_distribution(&self) -> &CostDistribution<T> {
        &self.cost_distribution
    }

    /// Discount factor. Always one.
    pub fn delta(&self) -> T {
        T::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Cooperate,
    Defect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagePayoffs<T> {
    pub row_payoff: T,
    pub col_payoff: T,
}

fn check_unit<T: Scalar>(loss: T) -> Result<(), ModelError> {
    if loss >= T::zero() && loss <= T::one() {
        Ok(())
    } else {
        Err(ModelError::LossOutOfRange(loss.as_f64()))
    }
}

/// Payoff to the actor for one Prisoner's Dilemma match.
pub fn stage_payoff<T: Scalar>(
    action_self: Action,
    action_other: Action,
    loss_self: T,
    params: &ModelParams<T>,
) -> Result<T, ModelError> {
    check_unit(loss_self)?;
    Ok(match (action_self, action_other) {
        (Action::Defect, Action::Defect) => T::zero(),
        (Action::Cooperate, Action::Cooperate) => T::one(),
        (Action::Defect, Action::Cooperate) => params.b,
        (Action::Cooperate, Action::Defect) => -loss_self,
    })
}

/// Both entries of the normal-form matrix for one match.
pub fn stage_payoffs<T: Scalar>(
    row: Action,
    col: Action,
    row_loss: T,
    col_loss: T,
    params: &ModelParams<T>,
) -> Result<StagePayoffs<T>, ModelError> {
    Ok(StagePayoffs {
        row_payoff: stage_payoff(row, col, row_loss, params)?,
        col_payoff: stage_payoff(col, row, col_loss, params)?,
    })
}

/// Probability that next period's young partner cooperates with a clear
/// old player when strategic young players use `cutoff`.
pub fn meeting_coop_prob<T: Scalar>(cutoff: T, params: &ModelParams<T>) -> T {
    debug_assert!(cutoff >= T::zero() && cutoff <= T::one(), "cutoff outside [0, 1]");
    let pi = params.pi;
    pi + (T::one() - pi) * params.cost_distribution.cdf(cutoff)
}

/// Expected lifetime payoff of a young strategic player who defects against
/// a clear old partner, with forgiveness probability `alpha`.
pub fn defect_payoff<T: Scalar>(cutoff: T, params: &ModelParams<T>) -> T {
    let pi = params.pi;
    let meet = meeting_coop_prob(cutoff, params);
    params.b * (pi + (T::one() - pi) * meet + params.alpha * pi * meet)
}

/// Expected lifetime payoff of a young strategic player with private loss
/// `loss_self` who cooperates. Cooperation never creates a stigma, so alpha
/// does not enter.
pub fn coop_payoff<T: Scalar>(loss_self: T, cutoff: T, params: &ModelParams<T>) -> T {
    debug_assert!(loss_self >= T::zero() && loss_self <= T::one(), "loss outside [0, 1]");
    let pi = params.pi;
    -(T::one() - pi) * loss_self + pi + meeting_coop_prob(cutoff, params) * params.b
}
