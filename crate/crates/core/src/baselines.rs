//! Fixed-assignment comparison schemes.
//!
//! FAOP keeps a fixed user-to-slot assignment and optimizes power with the
//! same dual loop as the joint scheme. FAFP keeps the same assignment and
//! splits each BS budget equally among its users.

use crate::dual_solver::{self, AssignmentPolicy, Residuals, SolverOptions, SolverReport};
use crate::error::{Error, Result};
use crate::model::{Assignment, ChannelRealization, NetworkConfig, Topology};
use crate::rate;

/// Round-robin assignment: user `a` takes the `a`-th legal slot in
/// (BS, channel) lexicographic order.
pub fn fixed_assignment(config: &NetworkConfig, topology: &Topology) -> Result<Assignment> {
    let legal = topology.legal_slots();
    if config.num_users > legal.len() {
        return Err(Error::InfeasibleAssignment {
            users: config.num_users,
            slots: legal.len(),
        });
    }
    Ok(Assignment::new(legal[..config.num_users].to_vec()))
}

pub fn solve_faop(
    config: &NetworkConfig,
    topology: &Topology,
    channels: &ChannelRealization,
    options: &SolverOptions,
) -> Result<SolverReport> {
    let fixed = fixed_assignment(config, topology)?;
    dual_solver::run_dual_loop(config, topology, channels, options, AssignmentPolicy::Fixed(fixed))
}

/// Equal split of every BS budget over the users it serves.
pub fn equal_split(assignment: &Assignment, config: &NetworkConfig) -> Vec<f64> {
    let mut load = vec![0usize; config.num_bs];
    for slot in assignment.slots() {
        load[slot.bs] += 1;
    }
    assignment
        .slots()
        .iter()
        .map(|slot| config.budget(slot.bs) / load[slot.bs] as f64)
        .collect()
}

pub fn solve_fafp(config: &NetworkConfig, topology: &Topology, channels: &ChannelRealization) -> Result<SolverReport> {
    config.validate()?;
    let assignment = fixed_assignment(config, topology)?;
    let split = equal_split(&assignment, config);
    let powers = dual_solver::project_feasible(&split, &assignment, channels, config);
    let rates = rate::evaluate(&assignment, &powers, channels, config, topology)?;
    let residuals = Residuals::compute(&assignment, &powers, channels, config);
    Ok(SolverReport {
        assignment,
        powers,
        rates,
        iterations: 0,
        converged: true,
        residuals,
        dual: None,
        trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Slot, MACRO_BS};
    use crate::oracle;

    fn setup(config: &NetworkConfig) -> (Topology, ChannelRealization) {
        (Topology::build(config).unwrap(), ChannelRealization::draw(config))
    }

    #[test]
    fn fixed_assignment_is_lexicographic() {
        let config = NetworkConfig {
            num_users: 2,
            num_channels: 2,
            num_bs: 2,
            ..Default::default()
        };
        let topology = Topology::build(&config).unwrap();
        let a = fixed_assignment(&config, &topology).unwrap();
        assert_eq!(a.slots(), &[Slot::new(0, MACRO_BS), Slot::new(1, MACRO_BS)]);
        let one = NetworkConfig {
            num_users: 1,
            ..config.clone()
        };
        assert_eq!(
            fixed_assignment(&one, &topology).unwrap().slots(),
            &[Slot::new(0, MACRO_BS)]
        );
        let five = NetworkConfig { num_users: 5, ..config };
        assert!(matches!(
            fixed_assignment(&five, &topology),
            Err(Error::InfeasibleAssignment { users: 5, slots: 4 })
        ));
    }

    #[test]
    fn fixed_assignment_seats_the_default_network() {
        let config = NetworkConfig::default();
        let topology = Topology::build(&config).unwrap();
        assert!(topology.legal_slots().len() >= 30);
        fixed_assignment(&config, &topology)
            .unwrap()
            .validate(30, &topology)
            .unwrap();
    }

    #[test]
    fn equal_split_examples() {
        let config = NetworkConfig {
            num_users: 4,
            num_channels: 4,
            num_bs: 2,
            pico_power: 2.0,
            ..Default::default()
        };
        let a = Assignment::new((0..4).map(|c| Slot::new(c, 1)).collect());
        assert_eq!(equal_split(&a, &config), vec![0.5; 4]);
    }

    #[test]
    fn fafp_without_cap_is_the_plain_split() {
        let config = NetworkConfig {
            interference_threshold: f64::INFINITY,
            ..Default::default()
        };
        let (topology, channels) = setup(&config);
        let report = solve_fafp(&config, &topology, &channels).unwrap();
        let assignment = fixed_assignment(&config, &topology).unwrap();
        assert_eq!(report.powers, equal_split(&assignment, &config));
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
    }

    #[test]
    fn fafp_halves_when_cap_exceeded_twice() {
        let config = NetworkConfig {
            num_users: 2,
            num_channels: 2,
            num_bs: 2,
            interference_threshold: 20.0,
            ..Default::default()
        };
        let topology = Topology::build(&config).unwrap();
        // 10 W each at h = 2 puts 40 = 2 I_th on the primary receiver.
        let channels = ChannelRealization::from_fn(2, 2, 2, |_, _| (1.0, 0.5, 2.0));
        let report = solve_fafp(&config, &topology, &channels).unwrap();
        assert_eq!(report.powers, vec![5.0, 5.0]);
        assert!(report.residuals.max_violation() == 0.0);
    }

    #[test]
    fn fafp_is_deterministic() {
        let config = NetworkConfig::default();
        let (topology, channels) = setup(&config);
        assert_eq!(
            solve_fafp(&config, &topology, &channels).unwrap(),
            solve_fafp(&config, &topology, &channels).unwrap()
        );
    }

    #[test]
    fn faop_matches_oaop_on_the_same_assignment() {
        for seed in 0..20 {
            let config = NetworkConfig {
                num_users: 2,
                num_channels: 2,
                num_bs: 2,
                rng_seed: seed,
                ..Default::default()
            };
            let (topology, channels) = setup(&config);
            let options = SolverOptions::default();
            let oaop = dual_solver::solve_oaop(&config, &topology, &channels, &options).unwrap();
            let pinned = dual_solver::run_dual_loop(
                &config,
                &topology,
                &channels,
                &options,
                AssignmentPolicy::Fixed(oaop.assignment.clone()),
            )
            .unwrap();
            assert!(
                (pinned.rates.min_rate - oaop.rates.min_rate).abs() < 1e-6,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn faop_tracks_its_oracle_and_beats_fafp() {
        let (mut near_oracle, mut above_fafp) = (0, 0);
        for seed in 0..200 {
            let config = NetworkConfig {
                num_users: 2,
                num_channels: 2,
                num_bs: 2,
                rng_seed: seed,
                ..Default::default()
            };
            let (topology, channels) = setup(&config);
            let faop = solve_faop(&config, &topology, &channels, &SolverOptions::default()).unwrap();
            let fafp = solve_fafp(&config, &topology, &channels).unwrap();
            let assignment = fixed_assignment(&config, &topology).unwrap();
            let grid = oracle::brute_force_fixed(&config, &topology, &channels, &assignment, 32).unwrap();
            if faop.rates.min_rate <= grid.rates.min_rate * 1.05 && faop.rates.min_rate >= grid.rates.min_rate * 0.95 {
                near_oracle += 1;
            }
            if faop.rates.min_rate >= fafp.rates.min_rate {
                above_fafp += 1;
            }
        }
        assert!(
            near_oracle >= 190,
            "{near_oracle}/200 within 5% of the fixed-assignment oracle"
        );
        assert!(above_fafp >= 190, "{above_fafp}/200 at least FAFP");
    }
}
