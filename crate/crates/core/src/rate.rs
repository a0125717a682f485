//! SINR, achievable rate and the fairness/throughput metrics.
//!
//! Rates are spectral efficiencies in bits/s/Hz; no bandwidth factor is
//! applied anywhere.

use crate::error::{Error, Result};
use crate::model::{Assignment, ChannelRealization, NetworkConfig, Slot, Topology};

/// `p * g / (p_interferer * f + sigma2)`.
#[inline]
pub fn sinr(p: f64, g: f64, p_interferer: f64, f: f64, sigma2: f64) -> f64 {
    p * g / (p_interferer * f + sigma2)
}

/// `log2(1 + sinr)`.
#[inline]
pub fn user_rate(sinr_value: f64) -> f64 {
    (1.0 + sinr_value).log2()
}

/// Largest rate divided by the mean rate. One means perfectly equal rates.
pub fn peak_to_average_ratio(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::UndefinedMetric("peak-to-average ratio of no users"));
    }
    let sum: f64 = rates.iter().sum();
    if sum <= 0.0 {
        return Err(Error::UndefinedMetric("peak-to-average ratio with all-zero rates"));
    }
    let peak = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(peak / (sum / rates.len() as f64))
}

pub fn sum_throughput(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::UndefinedMetric("sum throughput of no users"));
    }
    Ok(rates.iter().sum())
}

/// Symmetric percentage gap `100 |x - y| / max(x, y)`; zero when both are zero.
pub fn percentage_gap(x: f64, y: f64) -> f64 {
    let denom = x.max(y);
    if denom == 0.0 {
        0.0
    } else {
        100.0 * (x - y).abs() / denom
    }
}

/// Interference-plus-noise seen by every (user, slot) pair under a given
/// allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceState {
    num_channels: usize,
    num_bs: usize,
    interferer_power: Vec<f64>,
    effective_noise: Vec<f64>,
}

impl InterferenceState {
    /// No transmitting interferers: every effective noise equals `sigma2`.
    pub fn quiet(num_users: usize, topology: &Topology, sigma2: f64) -> Self {
        let n = num_users * topology.num_channels() * topology.num_bs();
        Self {
            num_channels: topology.num_channels(),
            num_bs: topology.num_bs(),
            interferer_power: vec![0.0; n],
            effective_noise: vec![sigma2; n],
        }
    }

    /// Interference each user would see on each slot if every other user
    /// kept its current slot and power. A user never interferes with itself,
    /// so its own current transmission is ignored when it looks at the
    /// slot that collides with it.
    pub fn from_allocation(
        assignment: &Assignment,
        powers: &[f64],
        channels: &ChannelRealization,
        topology: &Topology,
        sigma2: f64,
    ) -> Self {
        let num_users = assignment.num_users();
        let mut state = Self::quiet(num_users, topology, sigma2);
        let occupancy = assignment.occupancy(topology);
        for user in 0..num_users {
            for c in 0..topology.num_channels() {
                for b in 0..topology.num_bs() {
                    let slot = Slot::new(c, b);
                    let Some(other) = topology.interfering_slot(slot) else {
                        continue;
                    };
                    let p = match occupancy[topology.slot_index(other)] {
                        Some(occupant) if occupant != user => powers[occupant],
                        _ => continue,
                    };
                    let i = state.idx(user, slot);
                    state.interferer_power[i] = p;
                    state.effective_noise[i] = p * channels.f(user, slot) + sigma2;
                }
            }
        }
        state
    }

    #[inline]
    fn idx(&self, user: usize, slot: Slot) -> usize {
        (user * self.num_channels + slot.channel) * self.num_bs + slot.bs
    }

    #[inline]
    pub fn effective_noise(&self, user: usize, slot: Slot) -> f64 {
        self.effective_noise[self.idx(user, slot)]
    }

    #[inline]
    pub fn interferer_power(&self, user: usize, slot: Slot) -> f64 {
        self.interferer_power[self.idx(user, slot)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    pub rates: Vec<f64>,
    pub min_rate: f64,
    pub sum_rate: f64,
    /// `None` when every rate is zero.
    pub pr: Option<f64>,
}

impl RateVector {
    pub fn from_rates(rates: Vec<f64>) -> Self {
        let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
        let sum_rate = rates.iter().sum();
        let pr = peak_to_average_ratio(&rates).ok();
        Self {
            rates,
            min_rate,
            sum_rate,
            pr,
        }
    }
}

/// Power of the BS interfering with `user`'s slot, under the allocation.
pub fn interferer_power_of(
    user: usize,
    assignment: &Assignment,
    powers: &[f64],
    occupancy: &[Option<usize>],
    topology: &Topology,
) -> f64 {
    topology
        .interfering_slot(assignment.slot(user))
        .and_then(|other| occupancy[topology.slot_index(other)])
        .map_or(0.0, |occupant| powers[occupant])
}

/// Per-user rates of a complete allocation with exact interference coupling.
pub fn evaluate(
    assignment: &Assignment,
    powers: &[f64],
    channels: &ChannelRealization,
    config: &NetworkConfig,
    topology: &Topology,
) -> Result<RateVector> {
    assignment.validate(config.num_users, topology)?;
    if powers.len() != config.num_users {
        return Err(Error::InvalidAssignment(format!(
            "{} powers for {} users",
            powers.len(),
            config.num_users
        )));
    }
    if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidAssignment(format!(
            "power {p} is not a finite nonnegative value"
        )));
    }
    let occupancy = assignment.occupancy(topology);
    let rates = (0..config.num_users)
        .map(|a| {
            let slot = assignment.slot(a);
            let p_int = interferer_power_of(a, assignment, powers, &occupancy, topology);
            user_rate(sinr(
                powers[a],
                channels.g(a, slot),
                p_int,
                channels.f(a, slot),
                config.noise_psd,
            ))
        })
        .collect();
    Ok(RateVector::from_rates(rates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MACRO_BS;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr(1.0, 2.0, 0.0, 5.0, 0.1), 20.0);
        assert_eq!(sinr(0.0, 3.0, 1.0, 2.0, 0.1), 0.0);
        assert!((sinr(1.0, 1.0, 1.0, 0.9, 0.1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(user_rate(0.0), 0.0);
        assert_eq!(user_rate(1.0), 1.0);
        // ln 21 / ln 2
        assert!((user_rate(20.0) - 4.392_317_422_778_761).abs() < 1e-12);
    }

    #[test]
    fn pr_examples() {
        assert_eq!(peak_to_average_ratio(&[2.0, 2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(peak_to_average_ratio(&[4.0, 0.0, 2.0]).unwrap(), 2.0);
        assert_eq!(peak_to_average_ratio(&[1.0, 3.0]).unwrap(), 1.5);
        assert!(matches!(
            peak_to_average_ratio(&[0.0, 0.0]),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn sum_examples() {
        assert_eq!(sum_throughput(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert!(sum_throughput(&[]).is_err());
        assert_eq!(sum_throughput(&[0.5; 30]).unwrap(), 15.0);
    }

    #[test]
    fn gap_is_symmetric_and_bounded() {
        assert_eq!(percentage_gap(2.0, 1.0), 50.0);
        assert_eq!(percentage_gap(1.0, 2.0), 50.0);
        assert_eq!(percentage_gap(0.0, 0.0), 0.0);
    }

    fn single_user_setup(g: f64) -> (NetworkConfig, Topology, ChannelRealization) {
        let config = NetworkConfig {
            num_users: 1,
            num_bs: 2,
            num_channels: 1,
            ..NetworkConfig::default()
        };
        let topology = Topology::build(&config).unwrap();
        let channels = ChannelRealization::from_fn(1, 1, 2, |_, _| (g, 0.7, 0.3));
        (config, topology, channels)
    }

    #[test]
    fn evaluate_single_user() {
        let (config, topology, channels) = single_user_setup(1.0);
        let a = Assignment::new(vec![Slot::new(0, MACRO_BS)]);
        let r = evaluate(&a, &[1.0], &channels, &config, &topology).unwrap();
        assert!((r.rates[0] - 11f64.log2()).abs() < 1e-15);
        assert_eq!(r.pr, Some(1.0));
    }

    #[test]
    fn evaluate_symmetric_picos() {
        let config = NetworkConfig {
            num_users: 2,
            num_bs: 3,
            num_channels: 2,
            ..NetworkConfig::default()
        };
        let topology = Topology::build(&config).unwrap();
        let channels = ChannelRealization::from_fn(2, 2, 3, |_, _| (1.5, 0.5, 0.5));
        let a = Assignment::new(vec![Slot::new(0, 1), Slot::new(1, 2)]);
        let r = evaluate(&a, &[0.5, 0.5], &channels, &config, &topology).unwrap();
        assert_eq!(r.rates[0], r.rates[1]);
        assert_eq!(r.pr, Some(1.0));
    }

    #[test]
    fn evaluate_rejects_invalid_assignment() {
        let (config, topology, channels) = single_user_setup(1.0);
        let a = Assignment::new(vec![Slot::new(0, 1), Slot::new(0, 0)]);
        assert!(evaluate(&a, &[1.0, 1.0], &channels, &config, &topology).is_err());
    }

    #[test]
    fn interference_state_excludes_self() {
        let config = NetworkConfig {
            num_users: 2,
            num_bs: 2,
            num_channels: 1,
            ..NetworkConfig::default()
        };
        let topology = Topology::build(&config).unwrap();
        let channels = ChannelRealization::from_fn(2, 1, 2, |_, _| (1.0, 2.0, 1.0));
        let a = Assignment::new(vec![Slot::new(0, 0), Slot::new(0, 1)]);
        let st = InterferenceState::from_allocation(&a, &[3.0, 0.5], &channels, &topology, 0.1);
        // User 0 on the macro slot hears the pico at 0.5 W.
        assert_eq!(st.interferer_power(0, Slot::new(0, 0)), 0.5);
        assert!((st.effective_noise(0, Slot::new(0, 0)) - 1.1).abs() < 1e-15);
        // User 0 looking at the pico slot would collide with its own macro
        // transmission, which does not count.
        assert_eq!(st.interferer_power(0, Slot::new(0, 1)), 0.0);
        assert_eq!(st.interferer_power(1, Slot::new(0, 1)), 3.0);
    }

    /// Direct transcription of the SINR formula over explicit triples.
    fn oracle_rates(
        slots: &[(usize, usize)],
        powers: &[f64],
        g: &dyn Fn(usize, usize, usize) -> f64,
        f: &dyn Fn(usize, usize, usize) -> f64,
        owner: &dyn Fn(usize) -> usize,
        sigma2: f64,
    ) -> Vec<f64> {
        (0..slots.len())
            .map(|a| {
                let (c, b) = slots[a];
                let b_int = if b == 0 { owner(c) } else { 0 };
                let mut p_int = 0.0;
                for (u, &(cu, bu)) in slots.iter().enumerate() {
                    if u != a && cu == c && bu == b_int {
                        p_int += powers[u];
                    }
                }
                let s = powers[a] * g(a, c, b) / (p_int * f(a, c, b) + sigma2);
                (1.0 + s).ln() / std::f64::consts::LN_2
            })
            .collect()
    }

    #[test]
    fn evaluate_matches_independent_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..1000u64 {
            let config = NetworkConfig {
                num_users: rng.random_range(1..=3),
                num_bs: rng.random_range(2..=3),
                num_channels: rng.random_range(2..=4),
                noise_psd: rng.random_range(0.01..1.0),
                rng_seed: trial,
                ..NetworkConfig::default()
            };
            let topology = Topology::build(&config).unwrap();
            let channels = ChannelRealization::draw(&config);
            let mut legal = topology.legal_slots();
            // random distinct slots
            for i in (1..legal.len()).rev() {
                legal.swap(i, rng.random_range(0..=i));
            }
            let slots: Vec<Slot> = legal[..config.num_users].to_vec();
            let powers: Vec<f64> = (0..config.num_users).map(|_| rng.random_range(0.0..3.0)).collect();
            let a = Assignment::new(slots.clone());
            let got = evaluate(&a, &powers, &channels, &config, &topology).unwrap();
            let pairs: Vec<(usize, usize)> = slots.iter().map(|s| (s.channel, s.bs)).collect();
            let want = oracle_rates(
                &pairs,
                &powers,
                &|a, c, b| channels.g(a, Slot::new(c, b)),
                &|a, c, b| channels.f(a, Slot::new(c, b)),
                &|c| topology.owner_of(c).unwrap(),
                config.noise_psd,
            );
            for (x, y) in got.rates.iter().zip(&want) {
                let rel = if *y == 0.0 { x.abs() } else { ((x - y) / y).abs() };
                assert!(rel <= 1e-12, "trial {trial}: {x} vs {y}");
            }
        }
    }

    proptest! {
        #[test]
        fn pr_scale_invariant(rates in prop::collection::vec(0.01f64..10.0, 1..20), k in 0.01f64..100.0) {
            let base = peak_to_average_ratio(&rates).unwrap();
            let scaled: Vec<f64> = rates.iter().map(|r| r * k).collect();
            let s = peak_to_average_ratio(&scaled).unwrap();
            prop_assert!((base - s).abs() <= 1e-12 * base);
            prop_assert!(base >= 1.0 - 1e-12);
        }

        #[test]
        fn rate_monotone_in_own_power(p in 0.0f64..10.0, dp in 0.0f64..5.0, g in 0.0f64..5.0,
                                      pi in 0.0f64..10.0, f in 0.0f64..5.0) {
            let r0 = user_rate(sinr(p, g, pi, f, 0.1));
            let r1 = user_rate(sinr(p + dp, g, pi, f, 0.1));
            prop_assert!(r1 >= r0);
            let r2 = user_rate(sinr(p, g, pi + dp, f, 0.1));
            prop_assert!(r2 <= r0);
        }
    }
}
