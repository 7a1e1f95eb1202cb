//! Rewards, costs and expected utilities, ending in the replicator field.

use serde::{Deserialize, Serialize};

use super::probability::{joint_assignment_pmf, recovery_pmf};
use super::{
    EipConfig, GameError, InvariantViolation, MixedStrategyProfile, PureStrategyProfile, TaskSpec,
};

/// Switches that change how payoffs are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffOptions {
    /// Charge the full `f(w_i)` in the utilization cost instead of the
    /// per-cloud share `f(w_i) / E_i`.
    #[serde(rename = "utilization_cost_literal_eq10", default)]
    pub literal_utilization_cost: bool,
}

/// A validated game instance.
///
/// The part of each pure-profile payoff that does not depend on the mixed
/// profile (fixed, base and additional rewards minus energy cost, averaged
/// over task types) is enumerated once at construction; only the
/// utilization cost is evaluated per call.
#[derive(Debug, Clone)]
pub struct Game {
    eips: Vec<EipConfig>,
    tasks: Vec<TaskSpec>,
    options: PayoffOptions,
    offsets: Vec<usize>,
    strides: Vec<usize>,
    /// `rewards[i][profile]`: task-weighted expected reward of provider `i`.
    rewards: Vec<Vec<f64>>,
}

impl Game {
    pub fn new(
        eips: Vec<EipConfig>,
        tasks: Vec<TaskSpec>,
        options: PayoffOptions,
    ) -> Result<Self, GameError> {
        let mut violations: Vec<InvariantViolation> = Vec::new();
        if eips.is_empty() {
            violations.push(InvariantViolation::new(
                "eips",
                "at least one provider required",
            ));
        }
        if tasks.is_empty() {
            violations.push(InvariantViolation::new(
                "tasks",
                "at least one task type required",
            ));
        }
        for (i, e) in eips.iter().enumerate() {
            violations.extend(e.validate(&format!("eips[{i}]")));
        }
        for (p, t) in tasks.iter().enumerate() {
            violations.extend(t.validate(&format!("tasks[{p}]")));
        }
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        let total_rate: f64 = tasks.iter().map(|t| t.arrival_rate).sum();
        if total_rate <= 0.0 {
            return Err(GameError::NoArrivals);
        }

        let mut offsets = vec![0];
        for e in &eips {
            offsets.push(offsets.last().unwrap() + e.strategy_count());
        }
        let mut strides = vec![0; eips.len()];
        let mut stride = 1;
        for i in (0..eips.len()).rev() {
            strides[i] = stride;
            stride *= eips[i].strategy_count();
        }
        let profile_count = stride;

        let mut rewards = vec![vec![0.0; profile_count]; eips.len()];
        let mut contributions = vec![0usize; eips.len()];
        for flat in 0..profile_count {
            let mut rem = flat;
            for (h, c) in contributions.iter_mut().enumerate() {
                *c = rem / strides[h];
                rem %= strides[h];
            }
            let l = PureStrategyProfile(contributions.clone());
            for (i, eip) in eips.iter().enumerate() {
                rewards[i][flat] = tasks
                    .iter()
                    .map(|t| t.arrival_rate / total_rate * expected_task_reward(eip, i, &l, t))
                    .sum();
            }
        }

        Ok(Self {
            eips,
            tasks,
            options,
            offsets,
            strides,
            rewards,
        })
    }

    pub fn eips(&self) -> &[EipConfig] {
        &self.eips
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn options(&self) -> PayoffOptions {
        self.options
    }

    /// Total number of strategy components across providers.
    pub fn dimension(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.eips.iter().map(EipConfig::strategy_count).collect()
    }

    pub fn check_profile(&self, x: &MixedStrategyProfile) -> Result<(), GameError> {
        let expected = self.strategy_counts();
        let actual = x.shape();
        if expected != actual {
            return Err(GameError::Shape { expected, actual });
        }
        Ok(())
    }

    pub fn uniform_profile(&self) -> MixedStrategyProfile {
        MixedStrategyProfile::uniform(&self.eips)
    }

    /// Expected number of provider `i`'s clouds playing strategy `j`.
    pub fn expected_clouds(&self, i: usize, j: usize, x: &MixedStrategyProfile) -> f64 {
        self.eips[i].num_clouds as f64 * x.get(i, j)
    }

    fn block<'a>(&self, flat: &'a [f64], i: usize) -> &'a [f64] {
        &flat[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Fraction `w_i` of provider `i`'s capacity allocated to the federation.
    pub fn utilization(&self, i: usize, x: &MixedStrategyProfile) -> f64 {
        utilization_of(&self.eips[i], x.block(i))
    }

    /// Utilization cost `C²_{i,j}` charged to a cloud of provider `i`
    /// contributing `j` workers.
    pub fn utilization_cost(&self, i: usize, j: usize, x: &MixedStrategyProfile) -> f64 {
        utilization_cost_of(&self.eips[i], x.block(i), j, self.options)
    }

    /// Expected utility of provider `i` under pure profile `l` for a single
    /// task type, by explicit enumeration of placements and recoveries.
    pub fn pure_payoff(
        &self,
        i: usize,
        l: &PureStrategyProfile,
        x: &MixedStrategyProfile,
        task: &TaskSpec,
    ) -> f64 {
        expected_task_reward(&self.eips[i], i, l, task) - self.utilization_cost(i, l.counts()[i], x)
    }

    /// Expected utility `u_{i,j}(x)` of a provider-`i` cloud contributing `j`
    /// workers against the opponents' mixed strategies, averaged over task
    /// types by arrival rate.
    pub fn mixed_payoff(&self, i: usize, j: usize, x: &MixedStrategyProfile) -> f64 {
        self.mixed_payoff_flat(x.as_flat(), i, j)
    }

    /// `u_{i,j}(x)` for every `j`.
    pub fn strategy_payoffs(&self, i: usize, x: &MixedStrategyProfile) -> Vec<f64> {
        (0..self.eips[i].strategy_count())
            .map(|j| self.mixed_payoff_flat(x.as_flat(), i, j))
            .collect()
    }

    /// Population-average payoff `u_i(x)`.
    pub fn average_payoff(&self, i: usize, x: &MixedStrategyProfile) -> f64 {
        let flat = x.as_flat();
        self.block(flat, i)
            .iter()
            .enumerate()
            .map(|(j, &p)| p * self.mixed_payoff_flat(flat, i, j))
            .sum()
    }

    /// Replicator field `φ_{i,j} = γ x_{i,j} (u_{i,j}(x) − u_i(x))`, flattened
    /// provider-major.
    pub fn replicator_rhs(&self, x: &MixedStrategyProfile, gamma: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.replicator_rhs_flat(x.as_flat(), gamma, &mut out);
        out
    }

    /// Same as [`Game::replicator_rhs`] on a raw state vector, which need
    /// not lie exactly on the simplex.
    pub fn replicator_rhs_flat(&self, state: &[f64], gamma: f64, out: &mut [f64]) {
        debug_assert_eq!(state.len(), self.dimension());
        for i in 0..self.eips.len() {
            let lo = self.offsets[i];
            let block = self.block(state, i);
            let mut average = 0.0;
            for (j, &p) in block.iter().enumerate() {
                let u = self.mixed_payoff_flat(state, i, j);
                out[lo + j] = u;
                average += p * u;
            }
            for (j, &p) in block.iter().enumerate() {
                out[lo + j] = gamma * p * (out[lo + j] - average);
            }
        }
    }

    fn mixed_payoff_flat(&self, state: &[f64], i: usize, j: usize) -> f64 {
        let n = self.eips.len();
        let table = &self.rewards[i];
        let cost = utilization_cost_of(&self.eips[i], self.block(state, i), j, self.options);

        // Odometer over the opponents' contributions.
        let mut digits = vec![0usize; n];
        let mut reward = 0.0;
        let mut mass = 0.0;
        loop {
            let mut weight = 1.0;
            let mut flat = j * self.strides[i];
            for h in (0..n).filter(|&h| h != i) {
                weight *= state[self.offsets[h] + digits[h]];
                flat += digits[h] * self.strides[h];
            }
            reward += weight * table[flat];
            mass += weight;

            let mut h = 0;
            loop {
                if h == n {
                    return reward - cost * mass;
                }
                if h == i {
                    h += 1;
                    continue;
                }
                digits[h] += 1;
                if digits[h] < self.eips[h].strategy_count() {
                    break;
                }
                digits[h] = 0;
                h += 1;
            }
        }
    }
}

fn utilization_of(eip: &EipConfig, block: &[f64]) -> f64 {
    eip.num_clouds as f64 * mean_contribution(block) / eip.capacity as f64
}

fn mean_contribution(block: &[f64]) -> f64 {
    block.iter().enumerate().map(|(q, &p)| q as f64 * p).sum()
}

/// `f(w) = −C ρ (1 − 1/(1 − w))`.
pub(crate) fn utilization_cost_function(eip: &EipConfig, w: f64) -> f64 {
    -eip.fixed_cost * eip.calibration_ratio * (1.0 - 1.0 / (1.0 - w))
}

fn utilization_cost_of(eip: &EipConfig, block: &[f64], j: usize, options: PayoffOptions) -> f64 {
    let mean = mean_contribution(block);
    // A provider contributing nothing on average bears no utilization cost.
    if mean == 0.0 {
        return 0.0;
    }
    let w = eip.num_clouds as f64 * mean / eip.capacity as f64;
    let share = j as f64 * block[j] / mean;
    let f = utilization_cost_function(eip, w);
    if options.literal_utilization_cost {
        share * f
    } else {
        share * f / eip.num_clouds as f64
    }
}

/// `r₂ + E_ñ[(r₀ n − c D / k) ñ_i + E_k̃[r₁ k k̃_i | ñ]]` for provider `i`.
/// An infeasible federation (fewer than `n` pooled workers) earns only the
/// fixed reward.
fn expected_task_reward(
    eip: &EipConfig,
    i: usize,
    l: &PureStrategyProfile,
    task: &TaskSpec,
) -> f64 {
    let n = task.n as f64;
    let k = task.k as f64;
    let per_worker = task.r0 * n - eip.cpu_cost * task.cycles / k;
    let mut expectation = 0.0;
    for placement in joint_assignment_pmf(l, task.n) {
        let recovered: f64 = recovery_pmf(&placement.counts, task.k)
            .expect("a complete placement always holds n >= k workers")
            .iter()
            .map(|o| o.probability * o.counts[i] as f64)
            .sum();
        expectation += placement.probability
            * (per_worker * placement.counts[i] as f64 + task.r1 * k * recovered);
    }
    task.r2 + expectation
}
