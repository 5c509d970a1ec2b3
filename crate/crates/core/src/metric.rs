//! Link delay terms, transmit weight, reliability and the next-hop
//! determination factor (NHDF), per link and accumulated over a path.
//!
//! NHDF values grow as `(ξ_T/δ_E)^{C_n}` with `C_n` commonly in the tens, far
//! beyond `f64` range, so [`Nhdf`] and [`PathWeight`] carry natural logarithms.
//! Comparisons and argmax are unaffected; [`Nhdf::value`] converts back
//! (saturating to `+∞`).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::spectrum::{switching_delay, ChannelId};

/// δ^N, δ^K and δ^M of one link. The link delay δ^E is always derived as
/// their sum and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkDelays {
    pub queuing: f64,
    pub backoff: f64,
    pub switching: f64,
}

impl LinkDelays {
    pub fn total(&self) -> f64 {
        self.queuing + self.backoff + self.switching
    }
}

/// δ^E = δ^M + δ^N + δ^K.
pub fn link_delay(d: &LinkDelays) -> f64 {
    d.total()
}

/// δ^N = S·V_i / RT_i.
pub fn queuing_delay(packet_bits: f64, neighbors: u32, data_rate: f64) -> Result<f64, InputError> {
    if !(data_rate.is_finite() && data_rate > 0.0) {
        return Err(InputError::invalid("data rate", data_rate, "must be > 0"));
    }
    if !(packet_bits.is_finite() && packet_bits >= 0.0) {
        return Err(InputError::invalid("packet size", packet_bits, "must be >= 0"));
    }
    Ok(packet_bits * f64::from(neighbors) / data_rate)
}

/// δ^K = z / ((1 − b_c)(1 − (1 − b_c)^{V_i − 1})).
///
/// Undefined for `V_i <= 1` (zero denominator); see [`backoff_or_window`].
pub fn backoff_delay(collision_prob: f64, neighbors: u32, window: f64) -> Result<f64, InputError> {
    if !(collision_prob > 0.0 && collision_prob < 1.0) {
        return Err(InputError::invalid(
            "collision probability",
            collision_prob,
            "must lie in (0, 1)",
        ));
    }
    if !(window.is_finite() && window >= 0.0) {
        return Err(InputError::invalid("window", window, "must be >= 0"));
    }
    if neighbors <= 1 {
        return Err(InputError::DegenerateContention { neighbors });
    }
    let q = 1.0 - collision_prob;
    let contenders = i32::try_from(neighbors - 1).unwrap_or(i32::MAX);
    Ok(window / (q * (1.0 - q.powi(contenders))))
}

/// Back-off with a lone transmitter waiting one contention window.
pub fn backoff_or_window(collision_prob: f64, neighbors: u32, window: f64) -> Result<f64, InputError> {
    match backoff_delay(collision_prob, neighbors, window) {
        Err(InputError::DegenerateContention { .. }) => Ok(window),
        other => other,
    }
}

/// ξ_T = Φ_t / (τ_v · δ^L_p · s).
pub fn transmit_weight(range: f64, tau_v: f64, path_delay: f64, speed: f64) -> Result<f64, InputError> {
    for (name, v) in [
        ("transmission range", range),
        ("displacement", tau_v),
        ("path delay", path_delay),
        ("speed", speed),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(InputError::invalid(name, v, "must be finite and > 0"));
        }
    }
    Ok(range / (tau_v * path_delay * speed))
}

/// Reliability factor RF. `Infinite` marks a node found malicious.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Reliability {
    Factor(f64),
    Infinite,
}

impl Reliability {
    pub const TRUSTED: Reliability = Reliability::Factor(1.0);

    /// RF = e^{RN}.
    pub fn from_reports(reports: u32) -> Reliability {
        Reliability::Factor(f64::from(reports).exp())
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Reliability::Infinite)
    }

    /// Larger of two factors; used to summarise a path.
    pub fn max(self, other: Reliability) -> Reliability {
        match (self, other) {
            (Reliability::Factor(a), Reliability::Factor(b)) => Reliability::Factor(a.max(b)),
            _ => Reliability::Infinite,
        }
    }
}

/// RF = e^{RN}, RF(0) = 1.
pub fn reliability(reports: i64) -> Result<f64, InputError> {
    if reports < 0 {
        return Err(InputError::invalid("report count", reports as f64, "must be >= 0"));
    }
    Ok((reports as f64).exp())
}

/// Per-link NHDF. Zero means the link is excluded: RF = ∞ or no common
/// idle channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nhdf {
    log: Option<f64>,
}

impl Nhdf {
    pub const EXCLUDED: Nhdf = Nhdf { log: None };

    pub fn from_log(log: f64) -> Nhdf {
        Nhdf { log: Some(log) }
    }

    /// Builds from a plain value; 0 is the excluded marker.
    pub fn from_value(v: f64) -> Nhdf {
        if v > 0.0 {
            Nhdf::from_log(v.ln())
        } else {
            Nhdf::EXCLUDED
        }
    }

    pub fn is_excluded(&self) -> bool {
        self.log.is_none()
    }

    /// ln N, `None` when excluded.
    pub fn ln(&self) -> Option<f64> {
        self.log
    }

    pub fn value(&self) -> f64 {
        self.log.map_or(0.0, f64::exp)
    }
}

/// N_{i,j} = (ξ_T / δ^E_{i,j})^{C_n} / RF.
pub fn link_nhdf(xi_t: f64, link_delay: f64, common_channels: u32, rf: Reliability) -> Result<Nhdf, InputError> {
    if !(link_delay.is_finite() && link_delay > 0.0) {
        return Err(InputError::invalid("link delay", link_delay, "must be > 0"));
    }
    if !(xi_t.is_finite() && xi_t > 0.0) {
        return Err(InputError::invalid("transmit weight", xi_t, "must be > 0"));
    }
    let rf = match rf {
        Reliability::Infinite => return Ok(Nhdf::EXCLUDED),
        Reliability::Factor(f) if f.is_finite() && f >= 1.0 => f,
        Reliability::Factor(f) => return Err(InputError::invalid("reliability factor", f, "must be finite and >= 1")),
    };
    if common_channels == 0 {
        return Ok(Nhdf::EXCLUDED);
    }
    let base = (xi_t / link_delay).ln();
    Ok(Nhdf::from_log(f64::from(common_channels) * base - rf.ln()))
}

/// Cumulative NHDF of a path, N_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathWeight {
    log: Option<f64>,
}

impl PathWeight {
    pub const ZERO: PathWeight = PathWeight { log: None };

    pub fn is_zero(&self) -> bool {
        self.log.is_none()
    }

    pub fn ln(&self) -> Option<f64> {
        self.log
    }

    pub fn value(&self) -> f64 {
        self.log.map_or(0.0, f64::exp)
    }

    /// Total order: zero below every positive weight.
    pub fn total_cmp(&self, other: &PathWeight) -> Ordering {
        match (self.log, other.log) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.total_cmp(&b),
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// N_p = Σ N_{i,j} in path order. An empty path weighs 0, and so does any
/// path with an excluded link.
pub fn path_weight(links: &[Nhdf]) -> PathWeight {
    let mut acc: Option<f64> = None;
    for link in links {
        let l = match link.log {
            Some(l) => l,
            None => return PathWeight::ZERO,
        };
        acc = Some(match acc {
            None => l,
            Some(a) => log_add(a, l),
        });
    }
    PathWeight { log: acc }
}

/// Knobs for the delay and weight terms that the formulas leave open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricParams {
    /// b_c
    pub collision_probability: f64,
    /// z, seconds
    pub contention_window: f64,
    /// a, seconds per channel step
    pub switch_step_delay: f64,
    /// Substituted for θ when a movement vector has zero length.
    pub theta_floor: f64,
    /// Lower bound on the estimated speed s.
    pub speed_floor: f64,
    /// Lower bound on τ_v.
    pub tau_floor: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            collision_probability: 0.1,
            contention_window: 1e-3,
            switch_step_delay: 10e-3,
            theta_floor: 1e-3,
            speed_floor: 0.01,
            tau_floor: 1e-3,
        }
    }
}

impl MetricParams {
    pub fn validate(&self) -> Result<(), InputError> {
        let b = self.collision_probability;
        if !(b > 0.0 && b < 1.0) {
            return Err(InputError::invalid("collision_probability", b, "must lie in (0, 1)"));
        }
        for (name, v) in [
            ("contention_window", self.contention_window),
            ("theta_floor", self.theta_floor),
            ("speed_floor", self.speed_floor),
            ("tau_floor", self.tau_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(InputError::invalid(name, v, "must be finite and > 0"));
            }
        }
        let a = self.switch_step_delay;
        if !(a.is_finite() && a >= 0.0) {
            return Err(InputError::invalid("switch_step_delay", a, "must be >= 0"));
        }
        Ok(())
    }

    /// Delay terms for a node with `neighbors` neighbours sending `bits` at
    /// `data_rate` on channel `to`, having last used `from` (no switch when
    /// `None`).
    pub fn delays(
        &self,
        bits: f64,
        data_rate: f64,
        neighbors: u32,
        from: Option<ChannelId>,
        to: ChannelId,
    ) -> Result<LinkDelays, InputError> {
        Ok(LinkDelays {
            queuing: queuing_delay(bits, neighbors, data_rate)?,
            backoff: backoff_or_window(self.collision_probability, neighbors, self.contention_window)?,
            switching: from.map_or(0.0, |p| switching_delay(p, to, self.switch_step_delay)),
        })
    }
}
