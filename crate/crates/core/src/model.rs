//! Network configuration, two-tier topology and random channel generation.
//!
//! Base station index `0` is the macro BS; indices `1..num_bs` are picos.
//! Channels and users are likewise zero-based. The macro may use every
//! channel, while the picos split the channel range into disjoint,
//! contiguous blocks so that picos never interfere with each other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the macro base station.
pub const MACRO_BS: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub num_users: usize,
    pub num_bs: usize,
    pub num_channels: usize,
    /// Macro BS power budget in watts.
    pub macro_power: f64,
    /// Per-pico power budget in watts.
    pub pico_power: f64,
    /// Interference-temperature cap at the primary receiver, in watts.
    /// May be `f64::INFINITY` to disable the constraint.
    pub interference_threshold: f64,
    pub noise_psd: f64,
    pub rng_seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            num_users: 30,
            num_bs: 5,
            num_channels: 20,
            macro_power: 20.0,
            pico_power: 1.0,
            interference_threshold: 30.0,
            noise_psd: 0.1,
            rng_seed: 0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_users == 0 {
            return fail("num_users must be at least 1".into());
        }
        if self.num_bs < 2 {
            return fail(format!("num_bs must be at least 2, got {}", self.num_bs));
        }
        if self.num_channels < self.num_bs - 1 {
            return fail(format!(
                "num_channels ({}) must be at least num_bs - 1 ({})",
                self.num_channels,
                self.num_bs - 1
            ));
        }
        for (name, value) in [
            ("macro_power", self.macro_power),
            ("pico_power", self.pico_power),
            ("noise_psd", self.noise_psd),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return fail(format!("{name} must be finite and positive, got {value}"));
            }
        }
        // +inf is allowed and means "no interference cap".
        if self.interference_threshold.is_nan() || self.interference_threshold <= 0.0 {
            return fail(format!(
                "interference_threshold must be positive, got {}",
                self.interference_threshold
            ));
        }
        Ok(())
    }

    /// Power budget of base station `bs`.
    pub fn budget(&self, bs: usize) -> f64 {
        if bs == MACRO_BS {
            self.macro_power
        } else {
            self.pico_power
        }
    }

    pub fn budgets(&self) -> Vec<f64> {
        (0..self.num_bs).map(|b| self.budget(b)).collect()
    }
}

/// A (channel, base station) pair a user can be served on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub channel: usize,
    pub bs: usize,
}

impl Slot {
    pub fn new(channel: usize, bs: usize) -> Self {
        Self { channel, bs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    num_bs: usize,
    num_channels: usize,
    /// `pico_channels[k]` holds the channels of BS `k + 1`.
    pico_channels: Vec<Vec<usize>>,
    /// Pico BS owning each channel, if any.
    channel_owner: Vec<Option<usize>>,
}

impl Topology {
    /// Splits the channel range evenly and contiguously across the picos.
    /// The first `C mod (B-1)` picos receive one extra channel.
    pub fn build(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        let picos = config.num_bs - 1;
        let base = config.num_channels / picos;
        let extra = config.num_channels % picos;
        let mut pico_channels = Vec::with_capacity(picos);
        let mut channel_owner = vec![None; config.num_channels];
        let mut next = 0;
        for k in 0..picos {
            let len = base + usize::from(k < extra);
            let set: Vec<usize> = (next..next + len).collect();
            for &c in &set {
                channel_owner[c] = Some(k + 1);
            }
            pico_channels.push(set);
            next += len;
        }
        Ok(Self {
            num_bs: config.num_bs,
            num_channels: config.num_channels,
            pico_channels,
            channel_owner,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn macro_channels(&self) -> std::ops::Range<usize> {
        0..self.num_channels
    }

    pub fn pico_channel_sets(&self) -> &[Vec<usize>] {
        &self.pico_channels
    }

    pub fn owner_of(&self, channel: usize) -> Option<usize> {
        self.channel_owner.get(channel).copied().flatten()
    }

    pub fn is_legal(&self, slot: Slot) -> bool {
        if slot.channel >= self.num_channels || slot.bs >= self.num_bs {
            return false;
        }
        slot.bs == MACRO_BS || self.owner_of(slot.channel) == Some(slot.bs)
    }

    /// The slot whose transmission interferes with `slot`: the macro on the
    /// same channel for a pico slot, the owning pico for a macro slot.
    pub fn interfering_slot(&self, slot: Slot) -> Option<Slot> {
        if slot.bs == MACRO_BS {
            self.owner_of(slot.channel).map(|b| Slot::new(slot.channel, b))
        } else {
            Some(Slot::new(slot.channel, MACRO_BS))
        }
    }

    /// All legal slots in (bs, channel) lexicographic order.
    pub fn legal_slots(&self) -> Vec<Slot> {
        let mut slots: Vec<Slot> = self.macro_channels().map(|c| Slot::new(c, MACRO_BS)).collect();
        for (k, set) in self.pico_channels.iter().enumerate() {
            slots.extend(set.iter().map(|&c| Slot::new(c, k + 1)));
        }
        slots
    }

    /// Dense index of a slot in an `C x B` table.
    pub fn slot_index(&self, slot: Slot) -> usize {
        slot.channel * self.num_bs + slot.bs
    }
}

/// Per-(user, channel, BS) linear power gains.
///
/// `g` is the direct link, `f` the cross-tier interfering link seen by the
/// user when served on that slot, and `h` the link toward the primary
/// receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    num_users: usize,
    num_channels: usize,
    num_bs: usize,
    g: Vec<f64>,
    f: Vec<f64>,
    h: Vec<f64>,
}

impl ChannelRealization {
    /// Draws every entry i.i.d. from a unit-mean exponential, in the order
    /// all of `g`, then `f`, then `h`, each laid out `[user][channel][bs]`.
    /// Entries for slots a topology forbids are drawn too, so a realization
    /// depends only on the dimensions and the seed.
    pub fn draw(config: &NetworkConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let n = config.num_users * config.num_channels * config.num_bs;
        let mut sample = || -> Vec<f64> { (0..n).map(|_| Exp1.sample(&mut rng)).collect() };
        let g = sample();
        let f = sample();
        let h = sample();
        Self {
            num_users: config.num_users,
            num_channels: config.num_channels,
            num_bs: config.num_bs,
            g,
            f,
            h,
        }
    }

    /// Builds a realization from explicit `[user][channel][bs]` tables.
    pub fn from_fn(
        num_users: usize,
        num_channels: usize,
        num_bs: usize,
        mut gains: impl FnMut(usize, Slot) -> (f64, f64, f64),
    ) -> Self {
        let n = num_users * num_channels * num_bs;
        let (mut g, mut f, mut h) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for a in 0..num_users {
            for c in 0..num_channels {
                for b in 0..num_bs {
                    let (gv, fv, hv) = gains(a, Slot::new(c, b));
                    g.push(gv);
                    f.push(fv);
                    h.push(hv);
                }
            }
        }
        Self {
            num_users,
            num_channels,
            num_bs,
            g,
            f,
            h,
        }
    }

    #[inline]
    fn idx(&self, user: usize, slot: Slot) -> usize {
        debug_assert!(user < self.num_users && slot.channel < self.num_channels && slot.bs < self.num_bs);
        (user * self.num_channels + slot.channel) * self.num_bs + slot.bs
    }

    #[inline]
    pub fn g(&self, user: usize, slot: Slot) -> f64 {
        self.g[self.idx(user, slot)]
    }

    #[inline]
    pub fn f(&self, user: usize, slot: Slot) -> f64 {
        self.f[self.idx(user, slot)]
    }

    #[inline]
    pub fn h(&self, user: usize, slot: Slot) -> f64 {
        self.h[self.idx(user, slot)]
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.num_users, self.num_channels, self.num_bs)
    }

    /// Iterates over every drawn gain (`g`, then `f`, then `h`).
    pub fn all_gains(&self) -> impl Iterator<Item = f64> + '_ {
        self.g.iter().chain(&self.f).chain(&self.h).copied()
    }
}

/// One (channel, BS) slot per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    slots: Vec<Slot>,
}

impl Assignment {
    pub fn new(slots: Vec<Slot>) -> Self {
        Self { slots }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, user: usize) -> Slot {
        self.slots[user]
    }

    pub fn num_users(&self) -> usize {
        self.slots.len()
    }

    /// Binary association indicator for a (user, channel, BS) triple.
    pub fn alpha(&self, user: usize, slot: Slot) -> u8 {
        u8::from(self.slots.get(user) == Some(&slot))
    }

    /// Checks that every user holds exactly one legal slot and that no slot
    /// is shared.
    pub fn validate(&self, num_users: usize, topology: &Topology) -> Result<()> {
        if self.slots.len() != num_users {
            return Err(Error::InvalidAssignment(format!(
                "{} users but {} slots assigned",
                num_users,
                self.slots.len()
            )));
        }
        let mut taken = vec![false; topology.num_channels() * topology.num_bs()];
        for (user, &slot) in self.slots.iter().enumerate() {
            if !topology.is_legal(slot) {
                return Err(Error::InvalidAssignment(format!(
                    "user {user} assigned to illegal slot (channel {}, bs {})",
                    slot.channel, slot.bs
                )));
            }
            let i = topology.slot_index(slot);
            if taken[i] {
                return Err(Error::InvalidAssignment(format!(
                    "slot (channel {}, bs {}) shared by more than one user",
                    slot.channel, slot.bs
                )));
            }
            taken[i] = true;
        }
        Ok(())
    }

    /// Map from dense slot index to occupying user.
    pub fn occupancy(&self, topology: &Topology) -> Vec<Option<usize>> {
        let mut occ = vec![None; topology.num_channels() * topology.num_bs()];
        for (user, &slot) in self.slots.iter().enumerate() {
            occ[topology.slot_index(slot)] = Some(user);
        }
        occ
    }
}

/// Transmit power on each user's assigned slot, indexed by user.
pub type PowerAllocation = Vec<f64>;
