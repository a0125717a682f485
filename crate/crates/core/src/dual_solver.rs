//! Dual decomposition solver for joint power loading and user assignment.
//!
//! Each iteration:
//!
//! 1. solves the auxiliary scalar `x* = (sum lambda)^+ / 2`,
//! 2. loads power on every candidate slot with the closed form
//!    `P* = (lambda_a / (eta_b + v h) - (P' f + sigma2) / g)^+`,
//! 3. assigns every user to the slot minimizing its per-slot dual cost,
//!    resolving collisions greedily,
//! 4. refreshes the interference seen by each slot from this iterate's
//!    powers (a Jacobi sweep), and
//! 5. takes a projected subgradient step on `(lambda, eta, v)`.
//!
//! The per-slot dual cost is `-lambda ln(1 + SINR) + (eta + v h) P`; the
//! closed-form power is its exact minimizer over `P >= 0`. Rates reported
//! and used in the multiplier updates are in bits/s/Hz, so `lambda` acts as
//! a weight per nat.
//!
//! Subgradient iterates are not monotone and need not be primal feasible,
//! so every iterate is scaled back into the feasible set and the one with
//! the largest minimum rate is kept. The Lagrangian has no price for
//! cross-tier interference and its per-user water-filling switches weak
//! users off entirely, so the iterates alone can end up less fair than an
//! equal split. The loop therefore also remembers the few best assignments
//! it visited and, at the end, computes max-min fair powers for each of
//! them exactly (see [`max_min_fair_powers`]); the best candidate overall
//! is returned.

use crate::error::{Error, Result};
use crate::model::{Assignment, ChannelRealization, NetworkConfig, PowerAllocation, Slot, Topology};
use crate::rate::{self, InterferenceState, RateVector};

/// Water level used when a slot carries no price at all (`eta + v h = 0`),
/// as a multiple of the largest BS budget.
pub const PRICE_FREE_CAP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchedule {
    Constant,
    /// `step / sqrt(iteration)`.
    Diminishing,
}

/// How the per-user rate multipliers are kept in range after a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMultiplierRule {
    /// Clamp at zero only. Because `x* >= 0` and rates are nonnegative the
    /// step direction is never positive, so the multipliers drain to zero.
    Clamp,
    /// Euclidean projection onto `{lambda >= 0, sum lambda = mass}`. The
    /// common `-x` term then cancels and only rate differences matter.
    Simplex { mass: f64 },
}

/// Everything [`update_duals`] needs beyond the iterate itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRule {
    pub lambda: RateMultiplierRule,
    /// Divide each budget residual by its budget and the interference
    /// residual by `I_th`, so every price moves on the same relative scale.
    pub relative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub step: f64,
    pub schedule: StepSchedule,
    /// Stop once the largest multiplier change in one iteration is below this.
    pub tolerance: f64,
    pub init_lambda: f64,
    pub init_eta: f64,
    pub init_v: f64,
    /// `None` selects the simplex rule with the initial multiplier mass.
    pub rate_rule: Option<RateMultiplierRule>,
    /// See [`UpdateRule::relative`].
    pub relative_steps: bool,
    /// How many of the best distinct assignments get exact max-min fair
    /// powers after the loop. Zero returns the best raw iterate.
    pub refine_candidates: usize,
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            step: 0.01,
            schedule: StepSchedule::Constant,
            tolerance: 1e-4,
            init_lambda: 0.6,
            init_eta: 0.6,
            init_v: 0.1,
            rate_rule: None,
            relative_steps: true,
            refine_candidates: 4,
            record_trace: false,
        }
    }
}

impl SolverOptions {
    pub fn step_at(&self, iteration: usize) -> f64 {
        match self.schedule {
            StepSchedule::Constant => self.step,
            StepSchedule::Diminishing => self.step / (iteration.max(1) as f64).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.step.is_finite()
            && self.step > 0.0
            && self.tolerance >= 0.0
            && [self.init_lambda, self.init_eta, self.init_v]
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid solver options: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    pub v: f64,
    pub step: f64,
    pub x: f64,
}

impl DualState {
    pub fn initial(num_users: usize, num_bs: usize, options: &SolverOptions) -> Self {
        let lambda = vec![options.init_lambda; num_users];
        let x = solve_x(&lambda);
        Self {
            lambda,
            eta: vec![options.init_eta; num_bs],
            v: options.init_v,
            step: options.step,
            x,
        }
    }

    /// Largest absolute multiplier difference between two states.
    pub fn max_change(&self, other: &DualState) -> f64 {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        d(&self.lambda, &other.lambda)
            .max(d(&self.eta, &other.eta))
            .max((self.v - other.v).abs())
    }
}

/// Constraint slack of a power allocation: positive entries are violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// Per BS: total transmitted power minus budget.
    pub budget: Vec<f64>,
    /// Aggregate interference at the primary receiver minus the threshold.
    pub interference: f64,
}

impl Residuals {
    pub fn compute(
        assignment: &Assignment,
        powers: &[f64],
        channels: &ChannelRealization,
        config: &NetworkConfig,
    ) -> Self {
        let mut used = vec![0.0; config.num_bs];
        let mut interference = 0.0;
        for (a, &slot) in assignment.slots().iter().enumerate() {
            used[slot.bs] += powers[a];
            interference += powers[a] * channels.h(a, slot);
        }
        let budget = used.iter().enumerate().map(|(b, u)| u - config.budget(b)).collect();
        Self {
            budget,
            interference: interference - config.interference_threshold,
        }
    }

    /// Largest violation, or zero when every constraint holds.
    pub fn max_violation(&self) -> f64 {
        self.budget.iter().copied().fold(self.interference, f64::max).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub step: f64,
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    pub v: f64,
    /// Minimum rate of this iterate after feasibility restoration.
    pub min_rate: f64,
    /// Largest constraint violation of the raw iterate.
    pub max_violation: f64,
    pub max_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub assignment: Assignment,
    pub powers: PowerAllocation,
    pub rates: RateVector,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Residuals,
    pub dual: Option<DualState>,
    pub trace: Vec<TraceRow>,
}

/// Minimizer of `x^2 - x * sum(lambda)`, clamped at zero.
pub fn solve_x(lambda: &[f64]) -> f64 {
    0.5 * lambda.iter().sum::<f64>().max(0.0)
}

/// Closed-form power on one slot.
///
/// `price` is `eta_b + v h`, `effective_noise` is `P' f + sigma2`. A zero
/// price makes the water level `lambda / price` unbounded; it is capped at
/// `cap` and so is the returned power. A dead channel (`g == 0`) gets no
/// power.
pub fn kkt_power(lambda: f64, price: f64, g: f64, effective_noise: f64, cap: f64) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    let level = if price > 0.0 { (lambda / price).min(cap) } else { cap };
    (level - effective_noise / g).max(0.0).min(cap)
}

/// Per-slot dual cost `-lambda ln(1 + P g / xi) + price * P`.
pub fn subproblem_objective(power: f64, lambda: f64, price: f64, g: f64, effective_noise: f64) -> f64 {
    -lambda * (power * g / effective_noise).ln_1p() + price * power
}

fn price_free_cap(config: &NetworkConfig) -> f64 {
    PRICE_FREE_CAP_FACTOR * config.macro_power.max(config.pico_power)
}

/// Closed-form power for `user` on `slot` under the current multipliers
/// and interference picture.
pub fn solve_power(
    user: usize,
    slot: Slot,
    dual: &DualState,
    channels: &ChannelRealization,
    interference: &InterferenceState,
    cap: f64,
) -> f64 {
    let price = dual.eta[slot.bs] + dual.v * channels.h(user, slot);
    kkt_power(
        dual.lambda[user],
        price,
        channels.g(user, slot),
        interference.effective_noise(user, slot),
        cap,
    )
}

/// Greedy collision resolution over a `users x slots` cost table.
///
/// Users are served in ascending order of their cheapest slot (ties by
/// user index) and each takes its cheapest slot still free (ties by slot
/// index). Returns the chosen slot index per user.
pub fn greedy_assign(costs: &[Vec<f64>]) -> Result<Vec<usize>> {
    let users = costs.len();
    let slots = costs.first().map_or(0, Vec::len);
    if users > slots {
        return Err(Error::InfeasibleAssignment { users, slots });
    }
    let argmin = |row: &[f64], taken: &[bool]| -> usize {
        let mut best = usize::MAX;
        for (s, &c) in row.iter().enumerate() {
            if !taken[s] && (best == usize::MAX || c < row[best]) {
                best = s;
            }
        }
        best
    };
    let none_taken = vec![false; slots];
    let mut order: Vec<(f64, usize)> = costs
        .iter()
        .enumerate()
        .map(|(a, row)| (row[argmin(row, &none_taken)], a))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut taken = vec![false; slots];
    let mut choice = vec![0; users];
    for (_, a) in order {
        let s = argmin(&costs[a], &taken);
        taken[s] = true;
        choice[a] = s;
    }
    Ok(choice)
}

/// Picks a slot for every user from the per-slot dual costs and returns the
/// assignment together with the closed-form powers on the chosen slots.
///
/// Candidate powers are boxed to the serving BS budget, which every
/// feasible allocation respects anyway.
pub fn assign_users(
    dual: &DualState,
    channels: &ChannelRealization,
    topology: &Topology,
    interference: &InterferenceState,
    config: &NetworkConfig,
) -> Result<(Assignment, PowerAllocation)> {
    let legal = topology.legal_slots();
    if config.num_users > legal.len() {
        return Err(Error::InfeasibleAssignment {
            users: config.num_users,
            slots: legal.len(),
        });
    }
    let cap = price_free_cap(config);
    let mut powers = vec![vec![0.0; legal.len()]; config.num_users];
    let costs: Vec<Vec<f64>> = (0..config.num_users)
        .map(|a| {
            legal
                .iter()
                .enumerate()
                .map(|(s, &slot)| {
                    let p = solve_power(a, slot, dual, channels, interference, cap.min(config.budget(slot.bs)));
                    powers[a][s] = p;
                    let price = dual.eta[slot.bs] + dual.v * channels.h(a, slot);
                    subproblem_objective(
                        p,
                        dual.lambda[a],
                        price,
                        channels.g(a, slot),
                        interference.effective_noise(a, slot),
                    )
                })
                .collect()
        })
        .collect();
    let choice = greedy_assign(&costs)?;
    let assignment = Assignment::new(choice.iter().map(|&s| legal[s]).collect());
    let chosen = choice.iter().enumerate().map(|(a, &s)| powers[a][s]).collect();
    Ok((assignment, chosen))
}

/// Euclidean projection of `y` onto `{z >= 0, sum z = mass}`.
pub fn project_simplex(y: &[f64], mass: f64) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - mass) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// One projected subgradient step on all multipliers.
///
/// `rates` are the per-user rates of the primal iterate. Each multiplier
/// moves along its constraint's violation:
/// `lambda_a += step (-rate_a - x)`, `eta_b += step (sum P_b - budget_b)`,
/// `v += step (sum P h - I_th)`, and all are kept nonnegative. With
/// `rule.relative` the last two residuals are divided by their bounds.
pub fn update_duals(
    state: &DualState,
    assignment: &Assignment,
    powers: &[f64],
    rates: &[f64],
    channels: &ChannelRealization,
    config: &NetworkConfig,
    rule: UpdateRule,
) -> DualState {
    let step = state.step;
    let stepped: Vec<f64> = state
        .lambda
        .iter()
        .zip(rates)
        .map(|(l, r)| l + step * (-r - state.x))
        .collect();
    let lambda = match rule.lambda {
        RateMultiplierRule::Clamp => stepped.into_iter().map(|l| l.max(0.0)).collect(),
        RateMultiplierRule::Simplex { mass } => project_simplex(&stepped, mass),
    };
    let residuals = Residuals::compute(assignment, powers, channels, config);
    let eta = state
        .eta
        .iter()
        .zip(&residuals.budget)
        .enumerate()
        .map(|(b, (e, r))| {
            let r = if rule.relative { r / config.budget(b) } else { *r };
            (e + step * r).max(0.0)
        })
        .collect();
    let v = if config.interference_threshold.is_finite() {
        let r = residuals.interference;
        let r = if rule.relative {
            r / config.interference_threshold
        } else {
            r
        };
        (state.v + step * r).max(0.0)
    } else {
        0.0
    };
    DualState {
        lambda,
        eta,
        v,
        step,
        x: state.x,
    }
}

/// Scales powers down until every BS budget and then the interference cap
/// hold. Each scaling uses the largest uniform factor that restores the
/// violated constraint; feasible allocations are returned unchanged.
pub fn project_feasible(
    powers: &[f64],
    assignment: &Assignment,
    channels: &ChannelRealization,
    config: &NetworkConfig,
) -> PowerAllocation {
    let mut out = powers.to_vec();
    let mut used = vec![0.0; config.num_bs];
    for (a, &slot) in assignment.slots().iter().enumerate() {
        used[slot.bs] += out[a];
    }
    for (a, &slot) in assignment.slots().iter().enumerate() {
        let budget = config.budget(slot.bs);
        if used[slot.bs] > budget {
            out[a] *= budget / used[slot.bs];
        }
    }
    let interference: f64 = assignment
        .slots()
        .iter()
        .enumerate()
        .map(|(a, &slot)| out[a] * channels.h(a, slot))
        .sum();
    if interference > config.interference_threshold {
        let k = config.interference_threshold / interference;
        out.iter_mut().for_each(|p| *p *= k);
    }
    out
}

/// Which assignment policy the dual loop runs with.
#[derive(Debug, Clone)]
pub(crate) enum AssignmentPolicy {
    Optimize,
    Fixed(Assignment),
}

/// Joint power loading and user assignment (OAOP).
pub fn solve_oaop(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    options: &SolverOptions,
) -> Result<SolverReport> {
    run_dual_loop(config, topology, channels, options, AssignmentPolicy::Optimize)
}

pub(crate) fn run_dual_loop(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    options: &SolverOptions,
    policy: AssignmentPolicy,
) -> Result<SolverReport> {
    config.validate()?;
    options.validate()?;
    if let AssignmentPolicy::Fixed(a) = &policy {
        a.validate(config.num_users, topology)?;
    }
    let rule = UpdateRule {
        lambda: options.rate_rule.unwrap_or(RateMultiplierRule::Simplex {
            mass: options.init_lambda * config.num_users as f64,
        }),
        relative: options.relative_steps,
    };
    let cap = price_free_cap(config);
    let mut dual = DualState::initial(config.num_users, config.num_bs, options);
    let mut interference = InterferenceState::quiet(config.num_users, topology, config.noise_psd);
    let mut best: Option<(Assignment, PowerAllocation, RateVector)> = None;
    // Best distinct assignments seen, by projected min-rate, descending.
    let mut candidates: Vec<(f64, Assignment)> = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=options.max_iters {
        iterations = k;
        dual.step = options.step_at(k);
        dual.x = solve_x(&dual.lambda);

        let (assignment, powers) = match &policy {
            AssignmentPolicy::Optimize => assign_users(&dual, channels, topology, &interference, config)?,
            AssignmentPolicy::Fixed(a) => {
                let powers = a
                    .slots()
                    .iter()
                    .enumerate()
                    .map(|(u, &slot)| {
                        solve_power(u, slot, &dual, channels, &interference, cap.min(config.budget(slot.bs)))
                    })
                    .collect();
                (a.clone(), powers)
            }
        };

        let raw = rate::evaluate(&assignment, &powers, channels, config, topology)?;
        let feasible = project_feasible(&powers, &assignment, channels, config);
        let rates = rate::evaluate(&assignment, &feasible, channels, config, topology)?;
        let min_rate = rates.min_rate;
        remember(&mut candidates, min_rate, &assignment, options.refine_candidates);
        if best.as_ref().is_none_or(|(_, _, r)| min_rate > r.min_rate) {
            best = Some((assignment.clone(), feasible, rates));
        }

        let next = update_duals(&dual, &assignment, &powers, &raw.rates, channels, config, rule);
        let change = next.max_change(&dual);
        if options.record_trace {
            trace.push(TraceRow {
                iteration: k,
                step: dual.step,
                lambda: dual.lambda.clone(),
                eta: dual.eta.clone(),
                v: dual.v,
                min_rate,
                max_violation: Residuals::compute(&assignment, &powers, channels, config).max_violation(),
                max_change: change,
            });
        }
        interference = InterferenceState::from_allocation(&assignment, &powers, channels, topology, config.noise_psd);
        dual = next;
        if change < options.tolerance {
            converged = true;
            break;
        }
    }

    for (_, assignment) in &candidates {
        let powers = max_min_fair_powers(assignment, channels, config, topology);
        let rates = rate::evaluate(assignment, &powers, channels, config, topology)?;
        if best.as_ref().is_none_or(|(_, _, r)| rates.min_rate > r.min_rate) {
            best = Some((assignment.clone(), powers, rates));
        }
    }

    let (assignment, powers, rates) = best.expect("at least one iteration runs");
    let residuals = Residuals::compute(&assignment, &powers, channels, config);
    Ok(SolverReport {
        assignment,
        powers,
        rates,
        iterations,
        converged,
        residuals,
        dual: Some(dual),
        trace,
    })
}

/// Keeps `pool` as the `capacity` best distinct assignments by score.
fn remember(pool: &mut Vec<(f64, Assignment)>, score: f64, assignment: &Assignment, capacity: usize) {
    if capacity == 0 {
        return;
    }
    if let Some(i) = pool.iter().position(|(_, a)| a == assignment) {
        if pool[i].0 >= score {
            return;
        }
        pool.remove(i);
    }
    let at = pool.partition_point(|(s, _)| *s >= score);
    if at < capacity {
        pool.insert(at, (score, assignment.clone()));
        pool.truncate(capacity);
    }
}

/// A fixed assignment seen as independent co-channel pairs.
///
/// Interference only couples the two users sharing a channel across tiers,
/// so the minimal powers reaching given rates come from a 2x2 linear system
/// per pair.
struct PairSystem<'a> {
    assignment: &'a Assignment,
    channels: &'a ChannelRealization,
    config: &'a NetworkConfig,
    partner: Vec<Option<usize>>,
}

impl<'a> PairSystem<'a> {
    fn new(
        assignment: &'a Assignment,
        channels: &'a ChannelRealization,
        config: &'a NetworkConfig,
        topology: &Topology,
    ) -> Self {
        let occupancy = assignment.occupancy(topology);
        let partner = assignment
            .slots()
            .iter()
            .map(|&slot| {
                topology
                    .interfering_slot(slot)
                    .and_then(|s| occupancy[topology.slot_index(s)])
            })
            .collect();
        Self {
            assignment,
            channels,
            config,
            partner,
        }
    }

    /// `gamma / g` for a user: the power per unit of interference-plus-noise
    /// needed to reach its target.
    fn unit_cost(&self, user: usize, target: f64) -> std::result::Result<f64, ()> {
        let gamma = target.exp2() - 1.0;
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let g = self.channels.g(user, self.assignment.slot(user));
        if g > 0.0 {
            Ok(gamma / g)
        } else {
            Err(())
        }
    }

    /// Minimal powers reaching `targets` (bits/s/Hz per user). On failure,
    /// returns the users whose targets are unreachable at any power.
    fn min_powers(&self, targets: &[f64]) -> std::result::Result<Vec<f64>, Vec<usize>> {
        let sigma2 = self.config.noise_psd;
        let mut out = vec![0.0; targets.len()];
        for (a, p) in out.iter_mut().enumerate() {
            let c_a = self.unit_cost(a, targets[a]).map_err(|_| vec![a])?;
            if c_a == 0.0 {
                continue;
            }
            *p = match self.partner[a] {
                None => c_a * sigma2,
                Some(o) => {
                    let c_o = self.unit_cost(o, targets[o]).map_err(|_| vec![o])?;
                    let f_a = self.channels.f(a, self.assignment.slot(a));
                    let f_o = self.channels.f(o, self.assignment.slot(o));
                    let coupling = c_a * f_a * c_o * f_o;
                    if coupling >= 1.0 {
                        return Err(vec![a, o]);
                    }
                    c_a * sigma2 * (1.0 + f_a * c_o) / (1.0 - coupling)
                }
            };
        }
        Ok(out)
    }

    /// Users tied to a constraint that `targets` break; empty when the
    /// targets are reachable within every budget and the interference cap.
    fn blocking(&self, targets: &[f64]) -> Vec<usize> {
        let powers = match self.min_powers(targets) {
            Ok(p) => p,
            Err(users) => return users,
        };
        let residuals = Residuals::compute(self.assignment, &powers, self.channels, self.config);
        if residuals.interference > 0.0 {
            return (0..targets.len()).collect();
        }
        let mut out = Vec::new();
        for (a, slot) in self.assignment.slots().iter().enumerate() {
            if residuals.budget[slot.bs] > 0.0 {
                out.push(a);
                out.extend(self.partner[a]);
            }
        }
        out
    }
}

/// Max-min fair powers for a fixed assignment, by progressive filling.
///
/// All users share a common rate target that is raised (by bisection) until
/// a budget, the interference cap or an unreachable pair blocks it. Users
/// tied to the blocking constraint are frozen at that level and the rest
/// keep rising. The first level reached is the largest minimum rate this
/// assignment admits; every later user gets the most it can without pulling
/// anyone below it down. The result is always feasible.
pub fn max_min_fair_powers(
    assignment: &Assignment,
    channels: &ChannelRealization,
    config: &NetworkConfig,
    topology: &Topology,
) -> PowerAllocation {
    const BISECTION_STEPS: usize = 64;
    let system = PairSystem::new(assignment, channels, config, topology);
    let n = assignment.num_users();
    let mut frozen: Vec<Option<f64>> = vec![None; n];
    let mut level = 0.0_f64;
    let targets = |t: f64, frozen: &[Option<f64>]| -> Vec<f64> { frozen.iter().map(|f| f.unwrap_or(t)).collect() };

    while frozen.iter().any(Option::is_none) {
        let mut lo = level;
        let mut hi = level.max(1.0);
        // Past ~1024 bits the SINR overflows and every budget breaks, so
        // the bound only matters for degenerate (infinite) gains.
        while hi < 4096.0 && system.blocking(&targets(hi, &frozen)).is_empty() {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if system.blocking(&targets(mid, &frozen)).is_empty() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        level = lo;
        let mut progressed = false;
        for a in system.blocking(&targets(hi, &frozen)) {
            if frozen[a].is_none() {
                frozen[a] = Some(level);
                progressed = true;
            }
        }
        if !progressed {
            // Only already-frozen users block; nobody can move further.
            frozen.iter_mut().filter(|f| f.is_none()).for_each(|f| *f = Some(level));
        }
    }
    let targets: Vec<f64> = frozen.into_iter().map(|f| f.unwrap_or(level)).collect();
    system
        .min_powers(&targets)
        .expect("the final targets were checked reachable")
}
