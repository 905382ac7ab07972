//! Longitudinal virtual-platoon simulation.
//!
//! Every vehicle tracks a point on a virtual lane: the virtual leader moves at
//! `v_des`, and a vehicle of depth `d` aims to sit `d * d_des` behind it. A
//! PID law on that position error drives a double integrator. Positions are
//! measured along each vehicle's own lane: negative before the stop line,
//! `0` at box entry and the movement's path length at box exit.

use std::io;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    build_conflict_sets, ConflictClass, ConflictMatrix, GeometryError, IntersectionGeometry, Lane,
    VehicleRecord,
};
use crate::graphs::build_cdg;
use crate::schedule::{PassingSchedule, Scheduler};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("vehicle {0} has no depth in the schedule")]
    Unscheduled(usize),
    #[error("safety violation at t={t:.2}s: vehicles {a} ({lane_a}) and {b} ({lane_b}) are both inside the box")]
    SafetyViolation {
        t: f64,
        a: usize,
        b: usize,
        lane_a: Lane,
        lane_b: Lane,
    },
    #[error("horizon of {0} steps reached before every vehicle left the intersection")]
    HorizonExceeded(usize),
    #[error("scheduling failed: {0}")]
    Scheduling(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        PidGains {
            kp: 0.45,
            ki: 0.0,
            kd: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Distance from the stop line at which vehicles enter the control zone.
    pub control_zone: f64,
    /// Desired gap between consecutive depths on the virtual lane.
    pub d_des: f64,
    pub v_des: f64,
    /// Speed cap used when a vehicle has to catch up with its target.
    pub v_max: f64,
    pub dt: f64,
    pub gains: PidGains,
    pub a_max: f64,
    pub horizon_steps: usize,
    /// Vehicles this close to the stop line keep their depth on re-solves.
    pub lock_radius: f64,
    /// Vehicles running ahead of their target keep cruising up to this
    /// distance from the stop line and wait there for the target.
    pub hold_distance: f64,
    /// A spawn is held back while the lane's last vehicle is within this
    /// distance of the control-zone border.
    pub spawn_gap: f64,
    /// Seconds between Bernoulli arrival trials.
    pub arrival_slot: f64,
    pub geometry: IntersectionGeometry,
    pub abort_on_violation: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            control_zone: 1000.0,
            d_des: 25.0,
            v_des: 10.0,
            v_max: 20.0,
            dt: 0.05,
            gains: PidGains::default(),
            a_max: 3.0,
            horizon_steps: 40_000,
            lock_radius: 50.0,
            hold_distance: 500.0,
            spawn_gap: 10.0,
            arrival_slot: 1.0,
            geometry: IntersectionGeometry::default(),
            abort_on_violation: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("control_zone", self.control_zone),
            ("d_des", self.d_des),
            ("v_des", self.v_des),
            ("v_max", self.v_max),
            ("dt", self.dt),
            ("a_max", self.a_max),
            ("lock_radius", self.lock_radius),
            ("hold_distance", self.hold_distance),
            ("spawn_gap", self.spawn_gap),
            ("arrival_slot", self.arrival_slot),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.dt > 0.1 {
            return Err(SimError::InvalidConfig(format!(
                "dt must be at most 0.1 s, got {}",
                self.dt
            )));
        }
        if self.v_max < self.v_des {
            return Err(SimError::InvalidConfig(
                "v_max must not be below v_des".into(),
            ));
        }
        let g = self.gains;
        if g.kp < 0.0 || g.ki < 0.0 || g.kd < 0.0 {
            return Err(SimError::InvalidConfig(
                "PID gains must be non-negative".into(),
            ));
        }
        if self.horizon_steps == 0 {
            return Err(SimError::InvalidConfig(
                "horizon_steps must be positive".into(),
            ));
        }
        self.geometry.validate()?;
        Ok(())
    }

    /// Time between consecutive depths passing the same point.
    pub fn layer_headway(&self) -> f64 {
        self.d_des / self.v_des
    }
}

/// Per-lane Bernoulli arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalModel {
    /// Arrival probability per lane per slot.
    pub p: f64,
    pub seed: u64,
    pub n_total: usize,
}

/// A vehicle already inside the control zone at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FleetVehicle {
    pub lane: Lane,
    /// Distance to the stop line, metres.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimInput {
    Arrivals(ArrivalModel),
    /// Vehicles in arrival order.
    Fleet(Vec<FleetVehicle>),
}

impl SimInput {
    /// Fleet input from static records (distance = record position).
    pub fn from_records(records: &[VehicleRecord]) -> Self {
        SimInput::Fleet(
            records
                .iter()
                .map(|r| FleetVehicle {
                    lane: r.lane,
                    distance: r.position,
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

/// Point on the virtual lane a vehicle is asked to follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub position: f64,
    pub velocity: f64,
}

/// Target position on the virtual lane for a vehicle of the given depth.
pub fn virtual_position(
    schedule: &PassingSchedule,
    vehicle: usize,
    leader_position: f64,
    d_des: f64,
) -> Result<f64, SimError> {
    if vehicle == 0 || vehicle > schedule.vehicle_count() || schedule.depth(vehicle) == 0 {
        return Err(SimError::Unscheduled(vehicle));
    }
    Ok(leader_position - schedule.depth(vehicle) as f64 * d_des)
}

/// PID on position error with the velocity error as derivative term,
/// saturated at `±a_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PidController {
    pub gains: PidGains,
    pub a_max: f64,
    integral: f64,
}

const INTEGRAL_LIMIT: f64 = 50.0;

impl PidController {
    pub fn new(gains: PidGains, a_max: f64) -> Self {
        PidController {
            gains,
            a_max,
            integral: 0.0,
        }
    }

    pub fn step(&mut self, state: &VehicleState, target: Target, dt: f64) -> f64 {
        let error = target.position - state.position;
        if self.gains.ki > 0.0 {
            self.integral = (self.integral + error * dt).clamp(-INTEGRAL_LIMIT, INTEGRAL_LIMIT);
        }
        let derivative = target.velocity - state.velocity;
        let u = self.gains.kp * error + self.gains.ki * self.integral + self.gains.kd * derivative;
        u.clamp(-self.a_max, self.a_max)
    }
}

/// Acceleration bound that keeps `spawn_gap` to the vehicle ahead on the
/// same lane. Only binds when the scheduled target would close that gap.
fn following_limit(state: &VehicleState, ahead: &VehicleState, cfg: &SimConfig) -> f64 {
    let gap = ahead.position - state.position;
    let g = cfg.gains;
    (g.kp * (gap - cfg.spawn_gap) + g.kd * (ahead.velocity - state.velocity))
        .clamp(-cfg.a_max, cfg.a_max)
}

/// Semi-implicit Euler update of one vehicle.
fn integrate(state: &mut VehicleState, accel: f64, dt: f64, v_max: f64) {
    state.acceleration = accel;
    state.velocity = (state.velocity + accel * dt).clamp(0.0, v_max);
    state.position += state.velocity * dt;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub scheduler: Scheduler,
    pub n_vehicles: usize,
    /// Seconds from the first spawn until the last vehicle leaves the box.
    pub evacuation_time: f64,
    pub d_all: usize,
    /// Time in the control zone per vehicle, by arrival index.
    pub travel_times: Vec<f64>,
    /// Box exit time per vehicle, by arrival index.
    pub exit_times: Vec<f64>,
    /// Final depth per vehicle, by arrival index.
    pub depths: Vec<usize>,
    pub safety_violations: usize,
    /// Largest gap error to the virtual predecessor at box entry.
    pub max_entry_spacing_error: f64,
    /// Largest position spread between equal-depth vehicles at box entry.
    pub max_same_depth_desync: f64,
    pub min_same_lane_gap: f64,
    pub resolves: usize,
}

impl SimMetrics {
    /// Scalar summary as a flat JSON object.
    pub fn to_flat_json(&self) -> serde_json::Value {
        let mean = if self.travel_times.is_empty() {
            0.0
        } else {
            self.travel_times.iter().sum::<f64>() / self.travel_times.len() as f64
        };
        let max = self.travel_times.iter().copied().fold(0.0, f64::max);
        let gap = if self.min_same_lane_gap.is_finite() {
            serde_json::json!(self.min_same_lane_gap)
        } else {
            serde_json::Value::Null
        };
        serde_json::json!({
            "scheduler": self.scheduler.name(),
            "n_vehicles": self.n_vehicles,
            "evacuation_time": self.evacuation_time,
            "d_all": self.d_all,
            "mean_travel_time": mean,
            "max_travel_time": max,
            "safety_violations": self.safety_violations,
            "max_entry_spacing_error": self.max_entry_spacing_error,
            "max_same_depth_desync": self.max_same_depth_desync,
            "min_same_lane_gap": gap,
            "resolves": self.resolves,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub vehicle: usize,
    pub lane: Lane,
    pub pos: f64,
    pub vel: f64,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub metrics: SimMetrics,
    /// Wall-clock time spent inside scheduler calls.
    pub scheduler_time: Duration,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Writes rows as CSV with header `t,vehicle,lane,pos,vel,depth`.
pub fn write_trajectory_csv<W: io::Write>(rows: &[TrajectoryRow], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "vehicle", "lane", "pos", "vel", "depth"])?;
    for r in rows {
        w.write_record([
            format!("{:.2}", r.t),
            r.vehicle.to_string(),
            r.lane.to_string(),
            format!("{:.3}", r.pos),
            format!("{:.3}", r.vel),
            r.depth.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_file(rows: &[TrajectoryRow], path: &Path) -> Result<(), SimError> {
    write_trajectory_csv(rows, std::fs::File::create(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    /// Record a trajectory row for every vehicle every this many seconds.
    pub trajectory_interval: Option<f64>,
}

struct SimVehicle {
    lane: Lane,
    /// Previous vehicle on the same lane, 0-based.
    lane_pred: Option<usize>,
    spawn_time: f64,
    state: VehicleState,
    pid: PidController,
    depth: usize,
    parent: usize,
    entered: bool,
    exit_time: Option<f64>,
    path_length: f64,
}

struct World<'a> {
    cfg: &'a SimConfig,
    matrix: ConflictMatrix,
    scheduler: Scheduler,
    vehicles: Vec<SimVehicle>,
    /// Time at which the virtual leader crosses the stop line.
    leader_anchor: Option<f64>,
    scheduler_time: Duration,
    resolves: usize,
}

impl World<'_> {
    fn leader_position(&self, t: f64) -> f64 {
        self.leader_anchor
            .map_or(0.0, |anchor| self.cfg.v_des * (t - anchor))
    }

    fn spawn(&mut self, lane: Lane, distance: f64, t: f64) {
        let lane_pred = self.vehicles.iter().rposition(|v| v.lane == lane);
        // Never enter faster than a slower vehicle just ahead on the lane.
        let velocity = lane_pred
            .map(|k| &self.vehicles[k])
            .filter(|p| p.exit_time.is_none())
            .map_or(self.cfg.v_des, |p| p.state.velocity.min(self.cfg.v_des));
        self.vehicles.push(SimVehicle {
            lane,
            lane_pred,
            spawn_time: t,
            state: VehicleState {
                position: -distance,
                velocity,
                acceleration: 0.0,
            },
            pid: PidController::new(self.cfg.gains, self.cfg.a_max),
            depth: 0,
            parent: 0,
            entered: false,
            exit_time: None,
            path_length: self.matrix.path_length(lane),
        });
    }

    /// Re-plans every vehicle that is not locked. Locked vehicles (close to
    /// the stop line, or ahead of one that is) keep their depth; the rest
    /// are scheduled as a fresh batch placed behind them.
    fn resolve(&mut self, t: f64) -> Result<(), SimError> {
        let cfg = self.cfg;
        let lock_depth = self
            .vehicles
            .iter()
            .filter(|v| v.depth > 0 && v.state.position >= -cfg.lock_radius)
            .map(|v| v.depth)
            .max()
            .unwrap_or(0);
        let free: Vec<usize> = (0..self.vehicles.len())
            .filter(|&k| {
                let v = &self.vehicles[k];
                v.depth == 0 || (v.depth > lock_depth && v.state.position < -cfg.lock_radius)
            })
            .collect();
        if free.is_empty() {
            return Ok(());
        }

        // Batch layers must be reachable: a vehicle cannot arrive before
        // covering its distance at the mean of cruise and catch-up speed.
        let mut base = lock_depth;
        if let Some(anchor) = self.leader_anchor {
            let catch_up = 0.5 * (cfg.v_des + cfg.v_max);
            let h = cfg.layer_headway();
            let floor = free
                .iter()
                .map(|&k| {
                    let arrival = t - self.vehicles[k].state.position / catch_up;
                    ((arrival - anchor) / h).ceil().max(0.0) as usize
                })
                .max()
                .unwrap_or(0);
            base = base.max(floor.saturating_sub(1));
        }

        let mut lane_rank = [0usize; 12];
        let records: Vec<VehicleRecord> = free
            .iter()
            .enumerate()
            .map(|(local, &k)| {
                let v = &self.vehicles[k];
                let rank = lane_rank[v.lane.id()];
                lane_rank[v.lane.id()] += 1;
                VehicleRecord::new(local + 1, v.lane, -v.state.position, rank)
            })
            .collect();
        let table = build_conflict_sets(&self.matrix, &records)
            .map_err(|e| SimError::Scheduling(e.to_string()))?;
        let cdg =
            build_cdg(&table, records.len()).map_err(|e| SimError::Scheduling(e.to_string()))?;

        let started = Instant::now();
        let schedule = self.scheduler.schedule(&cdg);
        self.scheduler_time += started.elapsed();
        self.resolves += 1;

        for (local, &k) in free.iter().enumerate() {
            let i = local + 1;
            let p = schedule.parent(i);
            self.vehicles[k].depth = base + schedule.depth(i);
            self.vehicles[k].parent = if p == 0 { 0 } else { free[p - 1] + 1 };
        }

        if self.leader_anchor.is_none() {
            // Anchor so that nobody present has to drive faster than v_des.
            let h = cfg.layer_headway();
            let anchor = self
                .vehicles
                .iter()
                .map(|v| t - v.state.position / cfg.v_des - v.depth as f64 * h)
                .fold(f64::NEG_INFINITY, f64::max);
            self.leader_anchor = Some(anchor);
        }
        Ok(())
    }
}

/// Runs one simulation to completion.
pub fn simulate(
    input: &SimInput,
    scheduler: Scheduler,
    cfg: &SimConfig,
    options: SimOptions,
) -> Result<SimOutcome, SimError> {
    cfg.validate()?;
    let mut world = World {
        cfg,
        matrix: ConflictMatrix::from_geometry(&cfg.geometry)?,
        scheduler,
        vehicles: Vec::new(),
        leader_anchor: None,
        scheduler_time: Duration::ZERO,
        resolves: 0,
    };

    let (n_total, mut rng, p) = match input {
        SimInput::Arrivals(model) => {
            if !(0.0..=1.0).contains(&model.p) {
                return Err(SimError::InvalidConfig(format!(
                    "p must lie in [0, 1], got {}",
                    model.p
                )));
            }
            (
                model.n_total,
                Some(ChaCha8Rng::seed_from_u64(model.seed)),
                model.p,
            )
        }
        SimInput::Fleet(vs) => {
            for v in vs {
                world.spawn(v.lane, v.distance, 0.0);
            }
            (vs.len(), None, 0.0)
        }
    };
    if n_total == 0 {
        return Ok(SimOutcome {
            metrics: empty_metrics(scheduler),
            scheduler_time: Duration::ZERO,
            trajectory: Vec::new(),
        });
    }
    if rng.is_some() && p == 0.0 {
        return Err(SimError::InvalidConfig(
            "p = 0 never spawns a vehicle".into(),
        ));
    }
    if !world.vehicles.is_empty() {
        world.resolve(0.0)?;
    }

    let dt = cfg.dt;
    let slot_steps = ((cfg.arrival_slot / dt).round() as usize).max(1);
    let log_steps = options
        .trajectory_interval
        .map(|s| ((s / dt).round() as usize).max(1));
    let mut pending = [0usize; 12];
    let mut requested = 0usize;
    let mut trajectory = Vec::new();
    let mut violations = Vec::<(usize, usize)>::new();
    let mut max_spacing_err = 0.0f64;
    let mut max_desync = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut exited = 0usize;
    let mut in_box: Vec<usize> = Vec::new();

    for step in 0..cfg.horizon_steps {
        let t = step as f64 * dt;

        if let Some(rng) = rng.as_mut() {
            if step % slot_steps == 0 {
                for lane in Lane::all() {
                    if requested >= n_total {
                        break;
                    }
                    if rng.gen_bool(p) {
                        pending[lane.id()] += 1;
                        requested += 1;
                    }
                }
            }
            let mut spawned = false;
            for lane in Lane::all() {
                if pending[lane.id()] == 0 {
                    continue;
                }
                let blocked = world
                    .vehicles
                    .iter()
                    .rev()
                    .find(|v| v.lane == lane)
                    .is_some_and(|v| v.state.position < -cfg.control_zone + cfg.spawn_gap);
                if !blocked {
                    world.spawn(lane, cfg.control_zone, t);
                    pending[lane.id()] -= 1;
                    spawned = true;
                }
            }
            if spawned {
                world.resolve(t)?;
            }
        }

        if let Some(every) = log_steps {
            if step % every == 0 {
                for (k, v) in world.vehicles.iter().enumerate() {
                    if v.exit_time.is_none() {
                        trajectory.push(TrajectoryRow {
                            t,
                            vehicle: k + 1,
                            lane: v.lane,
                            pos: v.state.position,
                            vel: v.state.velocity,
                            depth: v.depth,
                        });
                    }
                }
            }
        }

        // Advance the dynamics to t + dt.
        let t_next = t + dt;
        let leader = world.leader_position(t);
        let mut accel = Vec::with_capacity(world.vehicles.len());
        for k in 0..world.vehicles.len() {
            let target = Target {
                position: leader - world.vehicles[k].depth as f64 * cfg.d_des,
                velocity: cfg.v_des,
            };
            let v = &world.vehicles[k];
            let pred = v
                .lane_pred
                .map(|p| &world.vehicles[p])
                .filter(|p| p.exit_time.is_none())
                .map(|p| p.state);
            let state = v.state;
            let mut a = world.vehicles[k].pid.step(&state, target, dt);
            if target.position < state.position && state.position < -cfg.hold_distance {
                let cruise = cfg.gains.kd * (cfg.v_des - state.velocity);
                let hold = cfg.gains.kp * (-cfg.hold_distance - state.position)
                    - cfg.gains.kd * state.velocity;
                a = a.max(cruise).min(hold).clamp(-cfg.a_max, cfg.a_max);
            }
            if let Some(p) = pred {
                a = a.min(following_limit(&state, &p, cfg));
            }
            accel.push(a);
        }
        for (v, a) in world.vehicles.iter_mut().zip(accel) {
            integrate(&mut v.state, a, dt, cfg.v_max);
        }
        let leader_next = world.leader_position(t_next);

        // Entry measurements, exits.
        for k in 0..world.vehicles.len() {
            let v = &world.vehicles[k];
            if !v.entered && v.state.position >= 0.0 {
                let parent_pos = if v.parent == 0 {
                    leader_next
                } else {
                    world.vehicles[v.parent - 1].state.position
                };
                let parent_depth = if v.parent == 0 {
                    0
                } else {
                    world.vehicles[v.parent - 1].depth
                };
                let expected = (v.depth - parent_depth) as f64 * cfg.d_des;
                max_spacing_err =
                    max_spacing_err.max((parent_pos - v.state.position - expected).abs());
                for (j, w) in world.vehicles.iter().enumerate() {
                    if j != k && w.depth == v.depth {
                        max_desync = max_desync.max((w.state.position - v.state.position).abs());
                    }
                }
                world.vehicles[k].entered = true;
            }
            let v = &world.vehicles[k];
            if v.exit_time.is_none() && v.state.position >= v.path_length {
                world.vehicles[k].exit_time = Some(t_next);
                exited += 1;
            }
        }

        // Same-lane spacing on the approach.
        let mut last_on_lane: [Option<f64>; 12] = [None; 12];
        for v in &world.vehicles {
            if v.exit_time.is_some() {
                continue;
            }
            if let Some(ahead) = last_on_lane[v.lane.id()] {
                min_gap = min_gap.min(ahead - v.state.position);
            }
            last_on_lane[v.lane.id()] = Some(v.state.position);
        }

        // Box occupancy audit.
        in_box.clear();
        in_box.extend(
            world
                .vehicles
                .iter()
                .enumerate()
                .filter(|(_, v)| v.state.position >= 0.0 && v.state.position <= v.path_length)
                .map(|(k, _)| k),
        );
        for (x, &a) in in_box.iter().enumerate() {
            for &b in &in_box[x + 1..] {
                let (la, lb) = (world.vehicles[a].lane, world.vehicles[b].lane);
                if world.matrix.lane_class(la, lb) == ConflictClass::None {
                    continue;
                }
                if cfg.abort_on_violation {
                    return Err(SimError::SafetyViolation {
                        t: t_next,
                        a: a + 1,
                        b: b + 1,
                        lane_a: la,
                        lane_b: lb,
                    });
                }
                if !violations.contains(&(a, b)) {
                    violations.push((a, b));
                }
            }
        }

        if exited == n_total {
            let first_spawn = world
                .vehicles
                .iter()
                .map(|v| v.spawn_time)
                .fold(f64::INFINITY, f64::min);
            let exit_times: Vec<f64> = world
                .vehicles
                .iter()
                .map(|v| v.exit_time.expect("all vehicles exited"))
                .collect();
            let last_exit = exit_times.iter().copied().fold(0.0, f64::max);
            let metrics = SimMetrics {
                scheduler,
                n_vehicles: n_total,
                evacuation_time: last_exit - first_spawn,
                d_all: world.vehicles.iter().map(|v| v.depth).max().unwrap_or(0),
                travel_times: world
                    .vehicles
                    .iter()
                    .zip(&exit_times)
                    .map(|(v, &e)| e - v.spawn_time)
                    .collect(),
                exit_times,
                depths: world.vehicles.iter().map(|v| v.depth).collect(),
                safety_violations: violations.len(),
                max_entry_spacing_error: max_spacing_err,
                max_same_depth_desync: max_desync,
                min_same_lane_gap: min_gap,
                resolves: world.resolves,
            };
            return Ok(SimOutcome {
                metrics,
                scheduler_time: world.scheduler_time,
                trajectory,
            });
        }
    }
    Err(SimError::HorizonExceeded(cfg.horizon_steps))
}

fn empty_metrics(scheduler: Scheduler) -> SimMetrics {
    SimMetrics {
        scheduler,
        n_vehicles: 0,
        evacuation_time: 0.0,
        d_all: 0,
        travel_times: Vec::new(),
        exit_times: Vec::new(),
        depths: Vec::new(),
        safety_violations: 0,
        max_entry_spacing_error: 0.0,
        max_same_depth_desync: 0.0,
        min_same_lane_gap: f64::INFINITY,
        resolves: 0,
    }
}
