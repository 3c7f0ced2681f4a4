use serde::{Deserialize, Serialize};

use super::{Age, AgentKind, AgentRecord, MARGINAL_BAND};
use crate::model::Action;
use crate::scalar::Scalar;

/// Count, sum and sum of squares of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    /// Standard error of the mean (unbiased variance).
    pub fn std_error(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        Some((var / n).sqrt())
    }
}

/// Lifetime (young + old) payoffs of retired agents, by stratum.
///
/// The marginal strata hold strategic agents whose loss lies within
/// [`MARGINAL_BAND`] below (cooperators) or above (defectors) the cutoff.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LifetimeStats {
    pub honest: Moments,
    pub strategic: Moments,
    pub marginal_cooperators: Moments,
    pub marginal_defectors: Moments,
}

impl LifetimeStats {
    pub(crate) fn record<T: Scalar>(&mut self, agent: &AgentRecord<T>, payoff: f64, cutoff: f64) {
        match agent.kind {
            AgentKind::Honest => self.honest.push(payoff),
            AgentKind::Strategic => {
                self.strategic.push(payoff);
                let loss = agent.loss.as_f64();
                if loss <= cutoff && loss >= cutoff - MARGINAL_BAND {
                    self.marginal_cooperators.push(payoff);
                } else if loss > cutoff && loss <= cutoff + MARGINAL_BAND {
                    self.marginal_defectors.push(payoff);
                }
            }
        }
    }

    pub fn merge(&mut self, other: &LifetimeStats) {
        self.honest.merge(&other.honest);
        self.strategic.merge(&other.strategic);
        self.marginal_cooperators.merge(&other.marginal_cooperators);
        self.marginal_defectors.merge(&other.marginal_defectors);
    }
}

/// Counts for one period. Payoff sums are per (kind, age).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeriodStats {
    pub period: u64,
    pub matches: u64,
    pub coop_actions: u64,
    pub defect_actions: u64,
    pub young_total: u64,
    /// Young players whose old partner had a clear record.
    pub young_clear_partner: u64,
    pub young_coop_clear: u64,
    pub young_coop_total: u64,
    pub old_total: u64,
    pub old_coop: u64,
    pub old_stigmatized: u64,
    pub stigma_acquired: u64,
    pub payoff_honest_young: Moments,
    pub payoff_honest_old: Moments,
    pub payoff_strategic_young: Moments,
    pub payoff_strategic_old: Moments,
}

impl PeriodStats {
    pub(crate) fn new(period: u64) -> Self {
        Self {
            period,
            ..Self::default()
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record_match<T: Scalar>(
        &mut self,
        young: &AgentRecord<T>,
        old: &AgentRecord<T>,
        young_action: Action,
        old_action: Action,
        young_payoff: T,
        old_payoff: T,
        acquired: bool,
    ) {
        self.matches += 1;
        for action in [young_action, old_action] {
            match action {
                Action::Cooperate => self.coop_actions += 1,
                Action::Defect => self.defect_actions += 1,
            }
        }
        let young_coop = young_action == Action::Cooperate;
        self.young_total += 1;
        self.young_coop_total += u64::from(young_coop);
        if !old.stigmatized {
            self.young_clear_partner += 1;
            self.young_coop_clear += u64::from(young_coop);
        }
        self.old_total += 1;
        self.old_coop += u64::from(old_action == Action::Cooperate);
        self.old_stigmatized += u64::from(old.stigmatized);
        self.stigma_acquired += u64::from(acquired);

        for (agent, payoff) in [(young, young_payoff), (old, old_payoff)] {
            let slot = match (agent.kind, agent.age) {
                (AgentKind::Honest, Age::Young) => &mut self.payoff_honest_young,
                (AgentKind::Honest, Age::Old) => &mut self.payoff_honest_old,
                (AgentKind::Strategic, Age::Young) => &mut self.payoff_strategic_young,
                (AgentKind::Strategic, Age::Old) => &mut self.payoff_strategic_old,
            };
            slot.push(payoff.as_f64());
        }
    }

    fn merge(&mut self, other: &PeriodStats) {
        self.matches += other.matches;
        self.coop_actions += other.coop_actions;
        self.defect_actions += other.defect_actions;
        self.young_total += other.young_total;
        self.young_clear_partner += other.young_clear_partner;
        self.young_coop_clear += other.young_coop_clear;
        self.young_coop_total += other.young_coop_total;
        self.old_total += other.old_total;
        self.old_coop += other.old_coop;
        self.old_stigmatized += other.old_stigmatized;
        self.stigma_acquired += other.stigma_acquired;
        self.payoff_honest_young.merge(&other.payoff_honest_young);
        self.payoff_honest_old.merge(&other.payoff_honest_old);
        self.payoff_strategic_young.merge(&other.payoff_strategic_young);
        self.payoff_strategic_old.merge(&other.payoff_strategic_old);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PayoffMeans {
    pub honest_young: Option<f64>,
    pub honest_old: Option<f64>,
    pub strategic_young: Option<f64>,
    pub strategic_old: Option<f64>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Measured frequencies over the periods after burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub cutoff: f64,
    pub cohort_size: usize,
    pub matches_total: u64,
    pub young_coop_rate_given_clear: f64,
    pub young_coop_rate_unconditional: f64,
    pub old_coop_rate: f64,
    pub stigma_prevalence_old: f64,
    /// Fraction of a young cohort that acquires a stigma.
    pub stigma_acquired_per_cohort: f64,
    pub mean_payoff: PayoffMeans,
    /// Pooled counts behind the rates above.
    pub totals: PeriodStats,
    pub lifetime: LifetimeStats,
    pub series: Vec<PeriodStats>,
}

impl SimStats {
    pub(crate) fn from_series(
        cutoff: f64,
        cohort_size: usize,
        series: Vec<PeriodStats>,
        lifetime: LifetimeStats,
    ) -> Self {
        let mut totals = PeriodStats::default();
        for p in &series {
            totals.merge(p);
        }
        totals.period = series.first().map_or(0, |p| p.period);
        Self::from_totals(cutoff, cohort_size, totals, lifetime, series)
    }

    fn from_totals(
        cutoff: f64,
        cohort_size: usize,
        totals: PeriodStats,
        lifetime: LifetimeStats,
        series: Vec<PeriodStats>,
    ) -> Self {
        Self {
            cutoff,
            cohort_size,
            matches_total: totals.matches,
            young_coop_rate_given_clear: ratio(totals.young_coop_clear, totals.young_clear_partner),
            young_coop_rate_unconditional: ratio(totals.young_coop_total, totals.young_total),
            old_coop_rate: ratio(totals.old_coop, totals.old_total),
            stigma_prevalence_old: ratio(totals.old_stigmatized, totals.old_total),
            stigma_acquired_per_cohort: ratio(totals.stigma_acquired, totals.young_total),
            mean_payoff: PayoffMeans {
                honest_young: totals.payoff_honest_young.mean(),
                honest_old: totals.payoff_honest_old.mean(),
                strategic_young: totals.payoff_strategic_young.mean(),
                strategic_old: totals.payoff_strategic_old.mean(),
            },
            totals,
            lifetime,
            series,
        }
    }

    /// Pools replications in index order. The per-period series is dropped.
    pub fn pooled(replications: &[SimStats]) -> Option<SimStats> {
        let first = replications.first()?;
        let mut totals = PeriodStats::default();
        let mut lifetime = LifetimeStats::default();
        for r in replications {
            totals.merge(&r.totals);
            lifetime.merge(&r.lifetime);
        }
        totals.period = first.totals.period;
        Some(Self::from_totals(
            first.cutoff,
            first.cohort_size,
            totals,
            lifetime,
            Vec::new(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_mean_and_error() {
        let mut m = Moments::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            m.push(x);
        }
        assert_eq!(m.mean(), Some(2.5));
        let se = m.std_error().unwrap();
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(Moments::default().mean(), None);
    }
}
