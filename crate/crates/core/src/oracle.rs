//! Exhaustive reference solver for tiny instances.
//!
//! Every collision-free assignment is enumerated and, for each, every
//! combination of per-user powers on the grid `{k P_b / n : k = 0..=n}`.
//! Points violating a budget or the interference cap are discarded; the
//! rest are scored with exact interference coupling. Doubling `n` nests the
//! old grid inside the new one, so refining never loses the incumbent.

use crate::dual_solver::{Residuals, SolverReport};
use crate::error::{Error, Result};
use crate::model::{Assignment, ChannelRealization, NetworkConfig, Slot, Topology};
use crate::rate::{self, RateVector};

pub const MAX_USERS: usize = 3;
pub const MAX_CHANNELS: usize = 3;
pub const MAX_BS: usize = 3;
pub const MAX_GRID_POINTS: usize = 64;
pub const DEFAULT_GRID_POINTS: usize = 32;

pub fn check_guard(config: &NetworkConfig, grid_points: usize) -> Result<()> {
    if config.num_users > MAX_USERS
        || config.num_channels > MAX_CHANNELS
        || config.num_bs > MAX_BS
        || grid_points > MAX_GRID_POINTS
        || grid_points == 0
    {
        return Err(Error::TooLarge(format!(
            "oracle accepts at most {MAX_USERS} users, {MAX_CHANNELS} channels, {MAX_BS} BSs and \
             1..={MAX_GRID_POINTS} grid points; got A={} C={} B={} grid={grid_points}",
            config.num_users, config.num_channels, config.num_bs
        )));
    }
    Ok(())
}

/// All collision-free assignments, in lexicographic order of legal-slot
/// indices.
pub fn enumerate_assignments(num_users: usize, topology: &Topology) -> Vec<Assignment> {
    fn recurse(legal: &[Slot], used: &mut Vec<bool>, current: &mut Vec<Slot>, left: usize, out: &mut Vec<Assignment>) {
        if left == 0 {
            out.push(Assignment::new(current.clone()));
            return;
        }
        for (i, &slot) in legal.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(slot);
            recurse(legal, used, current, left - 1, out);
            current.pop();
            used[i] = false;
        }
    }
    let legal = topology.legal_slots();
    let mut out = Vec::new();
    if num_users <= legal.len() {
        recurse(
            &legal,
            &mut vec![false; legal.len()],
            &mut Vec::new(),
            num_users,
            &mut out,
        );
    }
    out
}

pub fn brute_force_maxmin(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    grid_points: usize,
) -> Result<SolverReport> {
    config.validate()?;
    check_guard(config, grid_points)?;
    let assignments = enumerate_assignments(config.num_users, topology);
    if assignments.is_empty() {
        return Err(Error::InfeasibleAssignment {
            users: config.num_users,
            slots: topology.legal_slots().len(),
        });
    }
    let mut best: Option<SolverReport> = None;
    let mut evaluated = 0;
    for assignment in &assignments {
        let report = grid_search(config, topology, channels, assignment, grid_points)?;
        evaluated += report.iterations;
        if best.as_ref().is_none_or(|b| report.rates.min_rate > b.rates.min_rate) {
            best = Some(report);
        }
    }
    let mut best = best.expect("at least one assignment");
    best.iterations = evaluated;
    Ok(best)
}

/// Grid search over powers only, for one fixed assignment.
pub fn brute_force_fixed(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    assignment: &Assignment,
    grid_points: usize,
) -> Result<SolverReport> {
    config.validate()?;
    check_guard(config, grid_points)?;
    assignment.validate(config.num_users, topology)?;
    grid_search(config, topology, channels, assignment, grid_points)
}

fn grid_search(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    assignment: &Assignment,
    grid_points: usize,
) -> Result<SolverReport> {
    let n = assignment.num_users();
    let levels: Vec<Vec<f64>> = assignment
        .slots()
        .iter()
        .map(|s| {
            let budget = config.budget(s.bs);
            (0..=grid_points)
                .map(|k| budget * k as f64 / grid_points as f64)
                .collect()
        })
        .collect();
    let mut best: Option<(Vec<f64>, RateVector)> = None;
    let mut evaluated = 0usize;
    let mut idx = vec![0usize; n];
    let mut powers = vec![0.0; n];
    loop {
        for a in 0..n {
            powers[a] = levels[a][idx[a]];
        }
        let res = Residuals::compute(assignment, &powers, channels, config);
        if res.budget.iter().all(|r| *r <= 0.0) && res.interference <= 0.0 {
            evaluated += 1;
            let rates = rate::evaluate(assignment, &powers, channels, config, topology)?;
            if best.as_ref().is_none_or(|(_, r)| rates.min_rate > r.min_rate) {
                best = Some((powers.clone(), rates));
            }
        }
        // odometer
        let mut a = 0;
        while a < n {
            idx[a] += 1;
            if idx[a] <= grid_points {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == n {
            break;
        }
    }
    let (powers, rates) = best.expect("the all-zero point is always feasible");
    let residuals = Residuals::compute(assignment, &powers, channels, config);
    Ok(SolverReport {
        assignment: assignment.clone(),
        powers,
        rates,
        iterations: evaluated,
        converged: true,
        residuals,
        dual: None,
        trace: Vec::new(),
    })
}
