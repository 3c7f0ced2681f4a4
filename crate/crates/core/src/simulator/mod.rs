//! Seeded Monte Carlo simulation of the two-group matching protocol.
//!
//! Each period the young cohort of group A meets the old cohort of group B
//! under a uniform random perfect matching, and vice versa. Young players who
//! defect against a cooperating partner are flagged; the flag is visible at
//! their one remaining match and may be erased at the aging transition.
//! Aging moves a cohort into the other group.

mod stats;
mod theory;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{enumerate_equilibria, EquilibriumError};
use crate::model::{stage_payoff, Action, ModelError, ModelParams};
use crate::parallel::map_ordered;
use crate::scalar::Scalar;

pub use stats::{LifetimeStats, Moments, PayoffMeans, PeriodStats, SimStats};
pub use theory::{compare_to_theory, ReportLine, VerificationReport, MARGINAL_BAND, PASS_SIGMAS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error("invariant violated in period {period}: {message}")]
    InvariantViolation { period: u64, message: String },
    #[error("stratum '{stratum}' has {count} observations; at least {required} are needed")]
    InsufficientSamples { stratum: String, count: u64, required: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub fn other(self) -> Self {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }

    fn index(self) -> usize {
        match self {
            Group::A => 0,
            Group::B => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    Honest,
    Strategic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Age {
    Young,
    Old,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord<T> {
    pub id: u64,
    pub group: Group,
    pub kind: AgentKind,
    pub loss: T,
    pub stigmatized: bool,
    pub age: Age,
    /// Period in which the agent was young; `None` for the initial old cohorts.
    pub born: Option<u64>,
    /// Payoff from the young-age match, once played.
    pub young_payoff: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectionPolicy {
    MinEquilibrium,
    MaxEquilibrium,
    InteriorIfExists,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategySpec<T> {
    /// Strategic young players use this cutoff whether or not it is an equilibrium.
    Cutoff(T),
    /// Cutoff picked from the equilibrium set before the run.
    Select(SelectionPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SimConfig<T> {
    pub params: ModelParams<T>,
    /// Agents per group per generation.
    pub cohort_size: usize,
    pub periods: usize,
    /// Leading periods excluded from statistics.
    pub burn_in: usize,
    pub seed: u64,
    pub strategy: StrategySpec<T>,
}

impl<T: Scalar> SimConfig<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.cohort_size == 0 {
            return Err(SimError::InvalidConfig("cohort_size must be at least 1".into()));
        }
        if self.periods == 0 {
            return Err(SimError::InvalidConfig("periods must be at least 1".into()));
        }
        if self.burn_in >= self.periods {
            return Err(SimError::InvalidConfig("burn_in must be less than periods".into()));
        }
        if let StrategySpec::Cutoff(c) = self.strategy {
            if !(c >= T::zero() && c <= T::one()) {
                return Err(SimError::InvalidConfig(format!("cutoff must lie in [0, 1] (got {c})")));
            }
        }
        Ok(())
    }

    /// The cutoff strategic young players use in this run.
    ///
    /// A continuum resolves to 0, 1 or 1/2 for min, max and interior
    /// selection. With no strategic players (pi = 1) the cutoff is
    /// irrelevant; min gives 0, the others 1.
    pub fn resolve_cutoff(&self) -> Result<T, SimError> {
        let policy = match self.strategy {
            StrategySpec::Cutoff(c) => return Ok(c),
            StrategySpec::Select(policy) => policy,
        };
        let set = match enumerate_equilibria(&self.params) {
            Ok(set) => set,
            Err(EquilibriumError::Vacuous) => {
                return Ok(match policy {
                    SelectionPolicy::MinEquilibrium => T::zero(),
                    _ => T::one(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let cutoff = match policy {
            SelectionPolicy::MinEquilibrium => set.min_cutoff(),
            SelectionPolicy::MaxEquilibrium => set.max_cutoff(),
            SelectionPolicy::InteriorIfExists if set.continuum => Some(T::lit(0.5)),
            SelectionPolicy::InteriorIfExists => set
                .find(crate::equilibrium::EquilibriumKind::Interior)
                .map(|e| e.cutoff)
                .or_else(|| set.max_cutoff()),
        };
        cutoff.ok_or_else(|| SimError::InvalidConfig("empty equilibrium set".into()))
    }
}

/// Random stream for replication `replication` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Two young and two old cohorts; cohorts are indexed by group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Population<T> {
    pub period: u64,
    pub young: [Vec<AgentRecord<T>>; 2],
    pub old: [Vec<AgentRecord<T>>; 2],
    next_id: u64,
}

/// Lifetime payoffs of the cohort that retired at the end of a period.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RetiredCohort {
    pub born: Option<u64>,
    pub lifetime: LifetimeStats,
}

fn new_agent<T: Scalar, R: Rng>(
    id: u64,
    group: Group,
    age: Age,
    born: Option<u64>,
    params: &ModelParams<T>,
    rng: &mut R,
) -> AgentRecord<T> {
    let kind = if rng.random::<f64>() < params.pi().as_f64() {
        AgentKind::Honest
    } else {
        AgentKind::Strategic
    };
    let loss = params.cost_distribution().quantile(T::lit(rng.random::<f64>()));
    AgentRecord {
        id,
        group,
        kind,
        loss,
        stigmatized: false,
        age,
        born,
        young_payoff: T::zero(),
    }
}

fn action_of<T: Scalar>(agent: &AgentRecord<T>, partner_stigmatized: bool, cutoff: T) -> Action {
    if partner_stigmatized {
        return Action::Defect;
    }
    match (agent.kind, agent.age) {
        (AgentKind::Honest, _) => Action::Cooperate,
        (AgentKind::Strategic, Age::Old) => Action::Defect,
        (AgentKind::Strategic, Age::Young) if agent.loss <= cutoff => Action::Cooperate,
        (AgentKind::Strategic, Age::Young) => Action::Defect,
    }
}

/// Fresh population: young and old cohorts of `cohort_size` per group, all clear.
pub fn init_population<T: Scalar, R: Rng>(config: &SimConfig<T>, rng: &mut R) -> Population<T> {
    let mut next_id = 0;
    let mut cohort = |group, age, born, rng: &mut R| {
        (0..config.cohort_size)
            .map(|_| {
                next_id += 1;
                new_agent(next_id - 1, group, age, born, &config.params, rng)
            })
            .collect::<Vec<_>>()
    };
    let young = [
        cohort(Group::A, Age::Young, Some(0), rng),
        cohort(Group::B, Age::Young, Some(0), rng),
    ];
    let old = [
        cohort(Group::A, Age::Old, None, rng),
        cohort(Group::B, Age::Old, None, rng),
    ];
    Population {
        period: 0,
        young,
        old,
        next_id,
    }
}

impl<T: Scalar> Population<T> {
    fn violation(&self, message: String) -> SimError {
        SimError::InvariantViolation {
            period: self.period,
            message,
        }
    }

    /// Plays one period, ages the cohorts and admits fresh young cohorts.
    pub fn step<R: Rng>(
        &mut self,
        params: &ModelParams<T>,
        cutoff: T,
        rng: &mut R,
    ) -> Result<(PeriodStats, RetiredCohort), SimError> {
        let mut stats = PeriodStats::new(self.period);
        let mut retired = RetiredCohort::default();

        for young_group in [Group::A, Group::B] {
            let yi = young_group.index();
            let oi = young_group.other().index();
            if self.young[yi].len() != self.old[oi].len() {
                return Err(self.violation(format!(
                    "young {young_group:?} cohort has {} agents but old {:?} cohort has {}",
                    self.young[yi].len(),
                    young_group.other(),
                    self.old[oi].len()
                )));
            }
            let mut order: Vec<usize> = (0..self.old[oi].len()).collect();
            order.shuffle(rng);

            for (y, &o) in order.iter().enumerate() {
                let young = self.young[yi][y];
                let old = self.old[oi][o];
                if young.stigmatized {
                    return Err(self.violation(format!("young agent {} is stigmatized at matching", young.id)));
                }
                if old.stigmatized && old.kind == AgentKind::Honest {
                    return Err(self.violation(format!("honest agent {} is stigmatized", old.id)));
                }

                let young_action = action_of(&young, old.stigmatized, cutoff);
                let old_action = action_of(&old, young.stigmatized, cutoff);
                let young_payoff = stage_payoff(young_action, old_action, young.loss, params)?;
                let old_payoff = stage_payoff(old_action, young_action, old.loss, params)?;

                let acquired = young_action == Action::Defect && old_action == Action::Cooperate;
                if acquired && young.kind == AgentKind::Honest {
                    return Err(self.violation(format!("honest agent {} defected on a cooperator", young.id)));
                }

                stats.record_match(
                    &young,
                    &old,
                    young_action,
                    old_action,
                    young_payoff,
                    old_payoff,
                    acquired,
                );
                if old.born.is_some() {
                    retired
                        .lifetime
                        .record(&old, (old.young_payoff + old_payoff).as_f64(), cutoff.as_f64());
                }

                let agent = &mut self.young[yi][y];
                agent.young_payoff = young_payoff;
                agent.stigmatized = acquired;
            }
        }
        retired.born = self.period.checked_sub(1);

        // Retire the old, age the young into the other group, erase stigma.
        let alpha = params.alpha().as_f64();
        let [young_a, young_b] = std::mem::take(&mut self.young);
        let mut new_old = [young_b, young_a];
        for (gi, cohort) in new_old.iter_mut().enumerate() {
            let group = if gi == 0 { Group::A } else { Group::B };
            for agent in cohort.iter_mut() {
                agent.group = group;
                agent.age = Age::Old;
                if agent.stigmatized && rng.random::<f64>() < alpha {
                    agent.stigmatized = false;
                }
            }
        }
        self.old = new_old;

        self.period += 1;
        let born = Some(self.period);
        let n = self.old[0].len();
        for (gi, group) in [Group::A, Group::B].into_iter().enumerate() {
            self.young[gi] = (0..n)
                .map(|_| {
                    self.next_id += 1;
                    new_agent(self.next_id - 1, group, Age::Young, born, params, rng)
                })
                .collect();
        }
        Ok((stats, retired))
    }
}

/// Runs one replication with the stream derived from `(seed, replication)`.
pub fn run_replication<T: Scalar>(config: &SimConfig<T>, replication: u64) -> Result<SimStats, SimError> {
    config.validate()?;
    let cutoff = config.resolve_cutoff()?;
    let mut rng = replication_rng(config.seed, replication);
    let mut population = init_population(config, &mut rng);
    let mut series = Vec::with_capacity(config.periods - config.burn_in);
    let mut lifetime = LifetimeStats::default();
    let burn_in = config.burn_in as u64;
    for period in 0..config.periods as u64 {
        let (period_stats, retired) = population.step(&config.params, cutoff, &mut rng)?;
        if period >= burn_in {
            series.push(period_stats);
        }
        if retired.born.is_some_and(|born| born >= burn_in) {
            lifetime.merge(&retired.lifetime);
        }
    }
    Ok(SimStats::from_series(
        cutoff.as_f64(),
        config.cohort_size,
        series,
        lifetime,
    ))
}

/// Executes the configured run (replication 0).
pub fn run<T: Scalar>(config: &SimConfig<T>) -> Result<SimStats, SimError> {
    run_replication(config, 0)
}

/// Independent replications `0..count`, in replication order.
pub fn run_replications<T: Scalar>(
    config: &SimConfig<T>,
    count: usize,
    threads: usize,
) -> Result<Vec<SimStats>, SimError> {
    let indices: Vec<u64> = (0..count as u64).collect();
    map_ordered(&indices, threads, |&r| run_replication(config, r))
        .into_iter()
        .collect()
}
