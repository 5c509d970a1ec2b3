//! Vehicle kinematics, RSSI ranging and the motion estimators that feed the
//! transmit weight.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn advanced(&self, v: Velocity, dt: f64) -> Position {
        Position::new(self.x + v.x * dt, self.y + v.y * dt)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn clamped(&self, side: f64) -> Position {
        Position::new(self.x.clamp(0.0, side), self.y.clamp(0.0, side))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Velocity {
    pub x: f64,
    pub y: f64,
}

impl Velocity {
    pub const ZERO: Velocity = Velocity { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Velocity { x, y }
    }

    pub fn speed(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Log-distance model used to turn a received path loss into a range estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RangingParams {
    /// ω
    pub loss_exponent: f64,
    /// υ, metres. 0.0508 m is the 5.9 GHz carrier of 802.11p.
    pub wavelength: f64,
    /// l0, metres.
    pub reference_distance: f64,
}

impl Default for RangingParams {
    fn default() -> Self {
        RangingParams {
            loss_exponent: 2.0,
            wavelength: 0.0508,
            reference_distance: 1.0,
        }
    }
}

impl RangingParams {
    pub fn validate(&self) -> Result<(), InputError> {
        positive("loss_exponent", self.loss_exponent)?;
        positive("wavelength", self.wavelength)?;
        positive("reference_distance", self.reference_distance)?;
        Ok(())
    }

    /// Free-space loss at the reference distance, 20·log10(4π·l0/υ).
    pub fn reference_loss(&self) -> f64 {
        20.0 * (4.0 * PI * self.reference_distance / self.wavelength).log10()
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), InputError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(InputError::invalid(name, value, "must be finite and > 0"))
    }
}

/// Distance implied by a measured path loss `kappa` (dB).
pub fn path_loss_to_distance(kappa: f64, params: &RangingParams) -> Result<f64, InputError> {
    params.validate()?;
    if !kappa.is_finite() {
        return Err(InputError::invalid("path loss", kappa, "must be finite"));
    }
    let exponent = (kappa - params.reference_loss()) / (10.0 * params.loss_exponent);
    Ok(10f64.powf(exponent) * params.reference_distance)
}

/// Path loss a receiver at distance `d` observes; exact inverse of
/// [`path_loss_to_distance`].
pub fn distance_to_path_loss(d: f64, params: &RangingParams) -> Result<f64, InputError> {
    params.validate()?;
    positive("distance", d)?;
    Ok(params.reference_loss() + 10.0 * params.loss_exponent * (d / params.reference_distance).log10())
}

/// Coordinates a node reports around one reply: where it heard the request
/// (at `received_at`) and where it was when it answered (at `sent_at`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedFix {
    /// T1
    pub received_at: f64,
    /// T2
    pub sent_at: f64,
    /// Δ, the transmission time of the reply.
    pub transmission_time: f64,
    pub received_pos: Position,
    pub sent_pos: Position,
}

impl TimedFix {
    pub fn interval(&self) -> f64 {
        (self.sent_at + self.transmission_time) - self.received_at
    }
}

/// Speed over a timed fix.
///
/// The printed formula pairs α_r with γ_r (x and y of one point); the
/// intended quantity is the Euclidean distance between the receive and the
/// send coordinates, which is what this computes.
pub fn estimate_speed(fix: &TimedFix) -> Result<f64, InputError> {
    let interval = fix.interval();
    if !(interval.is_finite() && interval > 0.0) {
        return Err(InputError::invalid(
            "fix interval",
            interval,
            "(T2 + Δ) - T1 must be > 0",
        ));
    }
    Ok(fix.received_pos.distance(&fix.sent_pos) / interval)
}

/// Angle between the neighbour's and the destination's movement vectors, in
/// [0, π].
pub fn heading_angle(
    neighbor_recv: Position,
    neighbor_send: Position,
    dest_recv: Position,
    dest_send: Position,
) -> Result<f64, InputError> {
    let (ax, ay) = (neighbor_send.x - neighbor_recv.x, neighbor_send.y - neighbor_recv.y);
    let (bx, by) = (dest_send.x - dest_recv.x, dest_send.y - dest_recv.y);
    let na = ax.hypot(ay);
    let nb = bx.hypot(by);
    if na == 0.0 || nb == 0.0 || !(na.is_finite() && nb.is_finite()) {
        return Err(InputError::DegenerateMotion);
    }
    let cos = ((ax * bx + ay * by) / (na * nb)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// τ_v = d·θ
pub fn displacement(d: f64, theta: f64) -> Result<f64, InputError> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(InputError::invalid("distance", d, "must be finite and >= 0"));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(InputError::invalid("angle", theta, "must be finite and >= 0"));
    }
    Ok(d * theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingPolicy {
    /// Vehicles drive along ±x with a small lateral wobble.
    StraightRoadBidirectional,
    RandomWaypoint,
    /// Fixed per-node velocities; nodes stop at the area edge.
    Scripted(Vec<Velocity>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityModel {
    pub area_side: f64,
    pub max_speed: f64,
    pub heading_policy: HeadingPolicy,
    pub rng_seed: u64,
}

/// Motion state of one vehicle. `velocity` is the velocity applied during the
/// interval that starts at the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    pub position: Position,
    pub velocity: Velocity,
    cruise: f64,
    lane: f64,
    waypoint: Option<Position>,
}

impl Kinematics {
    pub fn at(position: Position) -> Self {
        Kinematics {
            position,
            velocity: Velocity::ZERO,
            cruise: 0.0,
            lane: 1.0,
            waypoint: None,
        }
    }
}

const LANE_WOBBLE: f64 = 0.05;

/// Seeded mobility stepper.
#[derive(Debug, Clone)]
pub struct Mobility {
    model: MobilityModel,
    rng: ChaCha8Rng,
    planned_dt: f64,
}

impl Mobility {
    /// Prepares kinematics for `positions` (or uniform random positions when
    /// `None`) and plans the first interval of length `dt`.
    pub fn new(
        model: MobilityModel,
        node_count: usize,
        positions: Option<&[Position]>,
        dt: f64,
    ) -> (Mobility, Vec<Kinematics>) {
        let mut rng = ChaCha8Rng::seed_from_u64(model.rng_seed);
        let side = model.area_side;
        let mut nodes: Vec<Kinematics> = (0..node_count)
            .map(|i| {
                let position = match positions {
                    Some(p) => p[i],
                    None => Position::new(rng.gen_range(0.0..=side), rng.gen_range(0.0..=side)),
                };
                let mut k = Kinematics::at(position);
                k.lane = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                k.cruise = model.max_speed * rng.gen_range(0.5..=1.0);
                k
            })
            .collect();
        let mut mobility = Mobility {
            model,
            rng,
            planned_dt: dt,
        };
        mobility.plan(&mut nodes);
        (mobility, nodes)
    }

    pub fn model(&self) -> &MobilityModel {
        &self.model
    }

    /// Replaces a scripted node's velocity from the next planned interval on.
    /// No effect under the other heading policies.
    pub fn set_scripted_velocity(&mut self, node: usize, v: Velocity) {
        if let HeadingPolicy::Scripted(vs) = &mut self.model.heading_policy {
            if let Some(slot) = vs.get_mut(node) {
                *slot = v;
            }
        }
    }

    /// Moves every node by its planned velocity for `dt` and plans the next
    /// interval. No node moves further than `max_speed · dt`.
    pub fn step(&mut self, nodes: &mut [Kinematics], dt: f64) {
        if dt <= 0.0 {
            return;
        }
        let side = self.model.area_side;
        for k in nodes.iter_mut() {
            k.position = k.position.advanced(k.velocity, dt).clamped(side);
        }
        self.planned_dt = dt;
        self.plan(nodes);
    }

    fn plan(&mut self, nodes: &mut [Kinematics]) {
        let dt = self.planned_dt;
        let side = self.model.area_side;
        let max_speed = self.model.max_speed;
        match &self.model.heading_policy {
            HeadingPolicy::StraightRoadBidirectional => {
                for k in nodes.iter_mut() {
                    if max_speed <= 0.0 {
                        k.velocity = Velocity::ZERO;
                        continue;
                    }
                    let wobble = self.rng.gen_range(-LANE_WOBBLE..=LANE_WOBBLE);
                    let mut v = Velocity::new(k.lane * k.cruise * wobble.cos(), k.cruise * wobble.sin());
                    let next = k.position.advanced(v, dt);
                    if next.x < 0.0 || next.x > side {
                        k.lane = -k.lane;
                        v.x = -v.x;
                    }
                    if next.y < 0.0 || next.y > side {
                        v.y = -v.y;
                    }
                    k.velocity = v;
                }
            }
            HeadingPolicy::RandomWaypoint => {
                for k in nodes.iter_mut() {
                    if max_speed <= 0.0 {
                        k.velocity = Velocity::ZERO;
                        continue;
                    }
                    let target = match k.waypoint {
                        Some(w) if w.distance(&k.position) > 1e-9 => w,
                        _ => {
                            let w = Position::new(self.rng.gen_range(0.0..=side), self.rng.gen_range(0.0..=side));
                            k.cruise = max_speed * self.rng.gen_range(0.1..=1.0);
                            w
                        }
                    };
                    k.waypoint = Some(target);
                    let dist = target.distance(&k.position);
                    if dist <= 1e-9 {
                        k.velocity = Velocity::ZERO;
                        continue;
                    }
                    let speed = k.cruise.min(dist / dt);
                    k.velocity = Velocity::new(
                        (target.x - k.position.x) / dist * speed,
                        (target.y - k.position.y) / dist * speed,
                    );
                }
            }
            HeadingPolicy::Scripted(velocities) => {
                for (k, v) in nodes.iter_mut().zip(velocities) {
                    let next = k.position.advanced(*v, dt);
                    let mut v = *v;
                    if next.x < 0.0 || next.x > side {
                        v.x = 0.0;
                    }
                    if next.y < 0.0 || next.y > side {
                        v.y = 0.0;
                    }
                    k.velocity = v;
                }
            }
        }
    }
}

/// Position of `k` at `elapsed` seconds into the current interval.
pub fn interpolate(k: &Kinematics, elapsed: f64, area_side: f64) -> Position {
    k.position.advanced(k.velocity, elapsed).clamped(area_side)
}
