//! Primary-user occupancy, per-node sensing and channel bookkeeping.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::geo::Position;

/// Largest channel group a [`ChannelSet`] can hold.
pub const MAX_CHANNELS: usize = 128;
pub const DEFAULT_CHANNELS: usize = 100;

/// Position of a channel in the globally ordered channel group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChannelId(pub u16);

impl ChannelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ch{}", self.0)
    }
}

/// Set of idle channels, one bit per channel.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ChannelSet(u128);

impl ChannelSet {
    pub const EMPTY: ChannelSet = ChannelSet(0);

    /// Every channel of a group of `n` channels.
    pub fn full(n: usize) -> ChannelSet {
        assert!(n <= MAX_CHANNELS, "channel group of {n} exceeds {MAX_CHANNELS}");
        if n == MAX_CHANNELS {
            ChannelSet(u128::MAX)
        } else {
            ChannelSet((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> ChannelSet {
        ChannelSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn insert(&mut self, ch: ChannelId) {
        self.0 |= 1u128 << ch.0;
    }

    pub fn remove(&mut self, ch: ChannelId) {
        self.0 &= !(1u128 << ch.0);
    }

    pub fn contains(self, ch: ChannelId) -> bool {
        self.0 & (1u128 << ch.0) != 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 & other.0)
    }

    pub fn lowest(self) -> Option<ChannelId> {
        (self.0 != 0).then(|| ChannelId(self.0.trailing_zeros() as u16))
    }

    pub fn iter(self) -> impl Iterator<Item = ChannelId> {
        (0..MAX_CHANNELS as u16)
            .map(ChannelId)
            .filter(move |c| self.contains(*c))
    }
}

impl FromIterator<ChannelId> for ChannelSet {
    fn from_iter<I: IntoIterator<Item = ChannelId>>(iter: I) -> Self {
        let mut set = ChannelSet::EMPTY;
        for ch in iter {
            set.insert(ch);
        }
        set
    }
}

impl fmt::Debug for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.0)).finish()
    }
}

/// C_n, the number of idle channels both ends share.
pub fn common_idle_count(a: ChannelSet, b: ChannelSet) -> u32 {
    a.intersection(b).len()
}

/// Operating channel of a link: the lowest-index common idle channel.
pub fn link_channel(a: ChannelSet, b: ChannelSet) -> Option<ChannelId> {
    a.intersection(b).lowest()
}

/// Tuning time from channel `p` to channel `q`, `step` seconds per channel of
/// separation in the group.
pub fn switching_delay(p: ChannelId, q: ChannelId, step: f64) -> f64 {
    step * f64::from(p.0.abs_diff(q.0))
}

/// Two-state (busy/idle) primary-user process per channel and spatial cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PuActivityModel {
    /// Mean busy period, seconds. May be infinite.
    pub mean_on: f64,
    /// Mean idle period, seconds. May be infinite.
    pub mean_off: f64,
    /// The area is split into `cells_per_side`² independent PU cells.
    pub cells_per_side: usize,
    pub miss_probability: f64,
    pub false_alarm_probability: f64,
}

impl Default for PuActivityModel {
    fn default() -> Self {
        PuActivityModel {
            mean_on: 5.0,
            mean_off: 15.0,
            cells_per_side: 4,
            miss_probability: 0.0,
            false_alarm_probability: 0.0,
        }
    }
}

impl PuActivityModel {
    pub fn validate(&self) -> Result<(), InputError> {
        for (name, v) in [("mean_on", self.mean_on), ("mean_off", self.mean_off)] {
            if v.is_nan() || v <= 0.0 {
                return Err(InputError::invalid(name, v, "must be > 0"));
            }
        }
        if self.mean_on.is_infinite() && self.mean_off.is_infinite() {
            return Err(InputError::invalid(
                "mean_on",
                self.mean_on,
                "mean_on and mean_off cannot both be infinite",
            ));
        }
        if self.cells_per_side == 0 {
            return Err(InputError::invalid("cells_per_side", 0.0, "must be >= 1"));
        }
        for (name, p) in [
            ("miss_probability", self.miss_probability),
            ("false_alarm_probability", self.false_alarm_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(InputError::invalid(name, p, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Long-run fraction of time a channel is busy.
    pub fn busy_fraction(&self) -> f64 {
        match (self.mean_on.is_infinite(), self.mean_off.is_infinite()) {
            (true, _) => 1.0,
            (_, true) => 0.0,
            _ => self.mean_on / (self.mean_on + self.mean_off),
        }
    }
}

/// A PU toggling a channel in one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuTransition {
    pub time: f64,
    pub cell: usize,
    pub channel: ChannelId,
    pub busy: bool,
}

#[derive(Debug, Clone)]
struct Timeline {
    initially_busy: bool,
    toggles: Vec<f64>,
}

impl Timeline {
    fn busy_at(&self, t: f64) -> bool {
        let flips = self.toggles.partition_point(|&x| x <= t);
        self.initially_busy ^ (flips % 2 == 1)
    }
}

fn exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    if mean.is_infinite() {
        return f64::INFINITY;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    -mean * u.ln()
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn unit_hash(parts: &[u64]) -> f64 {
    let h = parts.iter().fold(0u64, |acc, &p| splitmix(acc ^ p));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Pre-drawn PU occupancy over `[0, horizon]` for every (cell, channel).
///
/// Occupancy is a pure function of (cell, time, seed): every timeline is
/// generated up front from its own ChaCha stream.
#[derive(Debug, Clone)]
pub struct PuField {
    model: PuActivityModel,
    channels: usize,
    area_side: f64,
    seed: u64,
    timelines: Vec<Timeline>,
}

impl PuField {
    pub fn new(
        model: PuActivityModel,
        channels: usize,
        area_side: f64,
        horizon: f64,
        seed: u64,
    ) -> Result<PuField, InputError> {
        model.validate()?;
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(InputError::invalid("channels", channels as f64, "must lie in 1..=128"));
        }
        let cells = model.cells_per_side * model.cells_per_side;
        let p_busy = model.busy_fraction();
        let mut timelines = Vec::with_capacity(cells * channels);
        for idx in 0..cells * channels {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let initially_busy = rng.gen_bool(p_busy);
            let mut busy = initially_busy;
            let mut t = 0.0;
            let mut toggles = Vec::new();
            loop {
                t += exponential(&mut rng, if busy { model.mean_on } else { model.mean_off });
                if t > horizon {
                    break;
                }
                toggles.push(t);
                busy = !busy;
            }
            timelines.push(Timeline {
                initially_busy,
                toggles,
            });
        }
        Ok(PuField {
            model,
            channels,
            area_side,
            seed,
            timelines,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn cell_count(&self) -> usize {
        self.model.cells_per_side * self.model.cells_per_side
    }

    pub fn cell_of(&self, pos: Position) -> usize {
        let n = self.model.cells_per_side;
        let width = self.area_side / n as f64;
        let col = ((pos.x / width).floor().max(0.0) as usize).min(n - 1);
        let row = ((pos.y / width).floor().max(0.0) as usize).min(n - 1);
        row * n + col
    }

    pub fn busy_at(&self, cell: usize, channel: ChannelId, t: f64) -> bool {
        self.timelines[cell * self.channels + channel.index()].busy_at(t)
    }

    /// Ground-truth idle set of a cell.
    pub fn cell_idle(&self, cell: usize, t: f64) -> ChannelSet {
        (0..self.channels as u16)
            .map(ChannelId)
            .filter(|&ch| !self.busy_at(cell, ch, t))
            .collect()
    }

    /// Applies the configured miss / false-alarm probabilities to a ground
    /// truth idle set. Deterministic in (cell, time, seed).
    pub fn apply_sensing_errors(&self, cell: usize, t: f64, truth: ChannelSet) -> ChannelSet {
        let miss = self.model.miss_probability;
        let false_alarm = self.model.false_alarm_probability;
        if miss == 0.0 && false_alarm == 0.0 {
            return truth;
        }
        let mut sensed = truth;
        for ch in (0..self.channels as u16).map(ChannelId) {
            let u = unit_hash(&[self.seed, cell as u64, u64::from(ch.0), t.to_bits()]);
            if truth.contains(ch) {
                if u < false_alarm {
                    sensed.remove(ch);
                }
            } else if u < miss {
                sensed.insert(ch);
            }
        }
        sensed
    }

    /// Every toggle in time order, ties by (cell, channel).
    pub fn transitions(&self) -> Vec<PuTransition> {
        let mut out = Vec::new();
        for (idx, tl) in self.timelines.iter().enumerate() {
            let cell = idx / self.channels;
            let channel = ChannelId((idx % self.channels) as u16);
            let mut busy = tl.initially_busy;
            for &time in &tl.toggles {
                busy = !busy;
                out.push(PuTransition {
                    time,
                    cell,
                    channel,
                    busy,
                });
            }
        }
        out.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then(a.cell.cmp(&b.cell))
                .then(a.channel.cmp(&b.channel))
        });
        out
    }
}

/// Idle channels an energy detector at `node_position` reports at `time`.
pub fn sense(node_position: Position, time: f64, field: &PuField) -> ChannelSet {
    let cell = field.cell_of(node_position);
    field.apply_sensing_errors(cell, time, field.cell_idle(cell, time))
}
