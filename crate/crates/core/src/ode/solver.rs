//! Shooting integration from the axis to the equator.
//!
//! Chart A runs in `r` from the series start until `w` reaches `-w_switch`,
//! then chart B runs in decreasing `z` until `u' = 0`. Events are located on
//! the dense output of each accepted step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::dopri::{DenseStep, Stepper};
use crate::ode::rhs::{chart_switch, rhs_chart_a, rhs_chart_b, ChartAState, ChartBState};
use crate::ode::series::{series_start, series_state};
use crate::params::HelfrichParams;

/// Integrator settings. `eps_start` and `r_max` default to values scaled by
/// the expected size of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub eps_start: Option<f64>,
    pub w_switch: f64,
    pub r_max: Option<f64>,
    pub max_steps: usize,
    pub event_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            eps_start: None,
            w_switch: 10.0,
            r_max: None,
            max_steps: 1_000_000,
            event_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad("rel-tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return bad("abs-tol must be positive");
        }
        if let Some(e) = self.eps_start {
            if !(e > 0.0) || !e.is_finite() {
                return bad("eps-start must be positive");
            }
        }
        if !(self.w_switch > 1.0) || !self.w_switch.is_finite() {
            return bad("w-switch must exceed 1");
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0) {
                return bad("r-max must be positive");
            }
        }
        if self.max_steps == 0 {
            return bad("max-steps must be positive");
        }
        if !(self.event_tol > 0.0) || !self.event_tol.is_finite() {
            return bad("event-tol must be positive");
        }
        Ok(())
    }

    /// Series start radius, `min(1e-5, 1e-3 sqrt(32 w0' / (3p)))` when `p > 0`.
    pub fn eps_start_for(&self, params: &HelfrichParams, w0p: f64) -> f64 {
        self.eps_start.unwrap_or_else(|| {
            if params.p > 0.0 {
                (1e-3 * (32.0 * w0p / (3.0 * params.p)).sqrt()).min(1e-5)
            } else {
                1e-5
            }
        })
    }

    /// Abort radius, `1e3 sqrt(w0'/p + 1)` when `p > 0`, else `1e3`.
    pub fn r_max_for(&self, params: &HelfrichParams, w0p: f64) -> f64 {
        self.r_max.unwrap_or_else(|| {
            if params.p > 0.0 {
                1e3 * (w0p / params.p + 1.0).sqrt()
            } else {
                1e3
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    MaxOfW,
    ZeroOfW,
    ChartSwitch,
    Equator,
    BlowUpPositive,
    Aborted,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::MaxOfW => "MaxOfW",
            EventKind::ZeroOfW => "ZeroOfW",
            EventKind::ChartSwitch => "ChartSwitch",
            EventKind::Equator => "Equator",
            EventKind::BlowUpPositive => "BlowUpPositive",
            EventKind::Aborted => "Aborted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventState {
    A(ChartAState),
    B(ChartBState),
}

impl EventState {
    pub fn r(&self) -> f64 {
        match self {
            EventState::A(a) => a.r,
            EventState::B(b) => b.u,
        }
    }

    pub fn z(&self) -> f64 {
        match self {
            EventState::A(a) => a.z,
            EventState::B(b) => b.z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    /// Independent variable at the event: `r` in chart A, `z` in chart B.
    pub location: f64,
    pub state: EventState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbortReason {
    RadiusLimit,
    StepLimit,
    /// `|w|` fell back below `w_switch / 2` in chart B.
    LeftChartB,
    AxisReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Equator,
    BlowUpPositive,
    Aborted(AbortReason),
}

/// Queries this far outside a chart range (relative) are treated as
/// rounding and evaluated on the end step.
const RANGE_SLACK: f64 = 1e-12;

/// Result of [`integrate`]: dense output on both charts plus events.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: HelfrichParams,
    pub w0p: f64,
    pub config: SolverConfig,
    pub eps: f64,
    pub chart_a: Vec<DenseStep<6>>,
    /// End of the chart-A range (switch point or terminal event).
    pub r_end: f64,
    pub chart_b: Vec<DenseStep<6>>,
    /// Chart-B range `[z_end, z_start]`; empty when chart B was not entered.
    pub z_start: f64,
    pub z_end: f64,
    pub events: Vec<Event>,
    pub status: Status,
}

impl Trajectory {
    pub fn event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn require(&self, kind: EventKind) -> Result<&Event> {
        self.event(kind).ok_or(Error::MissingEvent(kind.name()))
    }

    pub fn has_chart_b(&self) -> bool {
        !self.chart_b.is_empty()
    }

    fn step_a(&self, r: f64) -> Result<&DenseStep<6>> {
        let slack = RANGE_SLACK * (1.0 + r.abs());
        if !(r >= self.eps - slack && r <= self.r_end + slack) || self.chart_a.is_empty() {
            return Err(Error::OutOfRange { value: r, lo: 0.0, hi: self.r_end });
        }
        let i = self.chart_a.partition_point(|s| s.x1() < r);
        Ok(&self.chart_a[i.min(self.chart_a.len() - 1)])
    }

    fn step_b(&self, z: f64) -> Result<&DenseStep<6>> {
        let slack = RANGE_SLACK * (1.0 + z.abs());
        if !(z <= self.z_start + slack && z >= self.z_end - slack) || self.chart_b.is_empty() {
            return Err(Error::OutOfRange { value: z, lo: self.z_end, hi: self.z_start });
        }
        let i = self.chart_b.partition_point(|s| s.x1() > z);
        Ok(&self.chart_b[i.min(self.chart_b.len() - 1)])
    }

    /// Chart-A state at radius `r`; below the start radius the axis series
    /// is used.
    pub fn state_a(&self, r: f64) -> Result<ChartAState> {
        if r > 0.0 && r < self.eps {
            return Ok(series_state(&self.params, self.w0p, r));
        }
        let s = self.step_a(r)?;
        Ok(ChartAState::from_array(r, &s.eval(r)))
    }

    /// Derivative of the chart-A interpolant at `r`, in array order
    /// `[w, w', z, area, volume, energy]`.
    pub fn derivative_a(&self, r: f64) -> Result<[f64; 6]> {
        let s = self.step_a(r)?;
        Ok(s.derivative(r))
    }

    pub fn state_b(&self, z: f64) -> Result<ChartBState> {
        let s = self.step_b(z)?;
        Ok(ChartBState::from_array(z, &s.eval(z)))
    }

    pub fn derivative_b(&self, z: f64) -> Result<[f64; 6]> {
        let s = self.step_b(z)?;
        Ok(s.derivative(z))
    }

    /// First radius in chart A where `g` changes sign from positive to
    /// non-positive.
    pub fn locate_a<G: Fn(&ChartAState) -> f64>(&self, g: G) -> Option<f64> {
        let tol = self.config.event_tol;
        for st in &self.chart_a {
            let t_end = if st.x1() > self.r_end { (self.r_end - st.x0) / st.h } else { 1.0 };
            let t = first_crossing(st, |y| g(&ChartAState::from_array(f64::NAN, y)), t_end, tol);
            if let Some(t) = t {
                return Some(st.x0 + t * st.h);
            }
        }
        None
    }

    /// First height in chart B (scanning from the switch point) where `g`
    /// changes sign from positive to non-positive.
    pub fn locate_b<G: Fn(&ChartBState) -> f64>(&self, g: G) -> Option<f64> {
        let tol = self.config.event_tol;
        for st in &self.chart_b {
            let t_end = if st.x1() < self.z_end { (self.z_end - st.x0) / st.h } else { 1.0 };
            let t = first_crossing(st, |y| g(&ChartBState::from_array(f64::NAN, y)), t_end, tol);
            if let Some(t) = t {
                return Some(st.x0 + t * st.h);
            }
        }
        None
    }

    /// Final accumulator values `(area, volume, energy)` at the end of the
    /// trajectory.
    pub fn final_accumulators(&self) -> Option<(f64, f64, f64)> {
        let y = match (self.chart_b.last(), self.chart_a.last()) {
            (Some(_), _) => self.state_b(self.z_end).ok()?.to_array(),
            (None, Some(_)) => self.state_a(self.r_end).ok()?.to_array(),
            _ => return None,
        };
        Some((y[3], y[4], y[5]))
    }
}

/// First `t` in `(0, 1]` where `g` crosses from strictly positive to
/// non-positive along the step, located by a coarse scan and bisection.
fn first_crossing<G>(step: &DenseStep<6>, g: G, t_end: f64, tol: f64) -> Option<f64>
where
    G: Fn(&[f64; 6]) -> f64,
{
    const SCAN: usize = 16;
    let at = |t: f64| step.x0 + t * step.h;
    let mut t_prev = 0.0;
    let mut g_prev = g(&step.y0());
    for i in 1..=SCAN {
        let t = t_end * i as f64 / SCAN as f64;
        let gv = g(&step.eval(at(t)));
        if g_prev > 0.0 && gv <= 0.0 {
            let (mut lo, mut hi) = (t_prev, t);
            let tol_t = tol / step.h.abs();
            for _ in 0..200 {
                if hi - lo <= tol_t {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if g(&step.eval(at(mid))) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(hi);
        }
        t_prev = t;
        g_prev = gv;
    }
    None
}

struct Found {
    kind: EventKind,
    t: f64,
}

/// Integrates the shape equation from the axis with `w'(0) = w0p`.
pub fn integrate(params: &HelfrichParams, w0p: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    if !(w0p > 0.0) || !w0p.is_finite() {
        return Err(Error::InvalidSlope(w0p));
    }
    cfg.validate()?;
    if !params.is_finite() {
        return Err(Error::InvalidConfig("parameters must be finite".into()));
    }
    let eps = cfg.eps_start_for(params, w0p);
    let r_max = cfg.r_max_for(params, w0p);
    let start = series_start(params, w0p, eps)?;

    let f_a = |r: f64, y: &[f64; 6]| rhs_chart_a(&ChartAState::from_array(r, y), params);
    let f_b = |z: f64, y: &[f64; 6]| rhs_chart_b(&ChartBState::from_array(z, y), params);

    let mut traj = Trajectory {
        params: *params,
        w0p,
        config: *cfg,
        eps,
        chart_a: Vec::new(),
        r_end: eps,
        chart_b: Vec::new(),
        z_start: 0.0,
        z_end: 0.0,
        events: Vec::new(),
        status: Status::Aborted(AbortReason::StepLimit),
    };
    let ws = cfg.w_switch;
    let tol = cfg.event_tol;
    let mut steps = 0usize;

    // chart A
    let mut stepper = Stepper::new(cfg.rel_tol, cfg.abs_tol);
    let mut r = eps;
    let mut y = start.to_array();
    let mut k1 = f_a(r, &y)?;
    let mut h = stepper.initial_step(&f_a, r, &y, &k1, 1.0, 0.25 * r)?;
    let mut seen_max = false;
    let mut seen_zero = false;
    let switch_state = loop {
        if steps >= cfg.max_steps {
            traj.r_end = r;
            return Ok(abort(traj, AbortReason::StepLimit, EventState::A(ChartAState::from_array(r, &y)), r));
        }
        steps += 1;
        let acc = stepper.step(&f_a, r, &y, &k1, h, 0.25 * r)?;
        let step = acc.dense;
        let t_end = if acc.x1 > r_max { (r_max - r) / (acc.x1 - r) } else { 1.0 };

        let mut found: Vec<Found> = Vec::new();
        if !seen_max {
            if let Some(t) = first_crossing(&step, |y| y[1], t_end, tol) {
                found.push(Found { kind: EventKind::MaxOfW, t });
            }
        }
        if !seen_zero {
            if let Some(t) = first_crossing(&step, |y| y[0], t_end, tol) {
                found.push(Found { kind: EventKind::ZeroOfW, t });
            }
        }
        if let Some(t) = first_crossing(&step, |y| y[0] + ws, t_end, tol) {
            found.push(Found { kind: EventKind::ChartSwitch, t });
        }
        if let Some(t) = first_crossing(&step, |y| ws - y[0], t_end, tol) {
            found.push(Found { kind: EventKind::BlowUpPositive, t });
        }
        // stable sort keeps the causal order for coincident events
        found.sort_by(|a, b| a.t.total_cmp(&b.t));

        let mut terminal = None;
        for ev in found {
            let x = step.x0 + ev.t * step.h;
            let st = ChartAState::from_array(x, &step.eval(x));
            traj.events.push(Event { kind: ev.kind, location: x, state: EventState::A(st) });
            match ev.kind {
                EventKind::MaxOfW => seen_max = true,
                EventKind::ZeroOfW => seen_zero = true,
                _ => {
                    terminal = Some((ev.kind, x, st));
                    break;
                }
            }
        }
        traj.chart_a.push(step);
        if let Some((kind, x, st)) = terminal {
            traj.r_end = x;
            if kind == EventKind::BlowUpPositive {
                traj.status = Status::BlowUpPositive;
                return Ok(traj);
            }
            break st;
        }
        if t_end < 1.0 {
            traj.r_end = r_max;
            let st = ChartAState::from_array(r_max, &traj.chart_a.last().unwrap().eval(r_max));
            return Ok(abort(traj, AbortReason::RadiusLimit, EventState::A(st), r_max));
        }
        r = acc.x1;
        y = acc.y1;
        k1 = acc.k7;
        h = acc.h_next;
        traj.r_end = r;
    };

    // chart B
    let b0 = chart_switch(&switch_state)?;
    let mut z = b0.z;
    traj.z_start = z;
    traj.z_end = z;
    let mut y = b0.to_array();
    let mut k1 = f_b(z, &y)?;
    let mut stepper = Stepper::new(cfg.rel_tol, cfg.abs_tol);
    let mut h = stepper.initial_step(&f_b, z, &y, &k1, -1.0, 0.25 * y[0])?;
    let s_floor = -2.0 / ws;
    loop {
        if steps >= cfg.max_steps {
            return Ok(abort(traj, AbortReason::StepLimit, EventState::B(ChartBState::from_array(z, &y)), z));
        }
        steps += 1;
        let acc = stepper.step(&f_b, z, &y, &k1, h, 0.25 * y[0])?;
        let step = acc.dense;

        // (t, None) is the equator, (t, Some(reason)) an abort
        let mut found: Vec<(f64, Option<AbortReason>)> = Vec::new();
        if let Some(t) = first_crossing(&step, |y| -y[1], 1.0, tol) {
            found.push((t, None));
        }
        if let Some(t) = first_crossing(&step, |y| y[1] - s_floor, 1.0, tol) {
            found.push((t, Some(AbortReason::LeftChartB)));
        }
        if let Some(t) = first_crossing(&step, |y| y[0], 1.0, tol) {
            found.push((t, Some(AbortReason::AxisReached)));
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(&(t, reason)) = found.first() {
            let x = step.x0 + t * step.h;
            let st = ChartBState::from_array(x, &step.eval(x));
            traj.chart_b.push(step);
            traj.z_end = x;
            return Ok(match reason {
                None => {
                    traj.events.push(Event { kind: EventKind::Equator, location: x, state: EventState::B(st) });
                    traj.status = Status::Equator;
                    traj
                }
                Some(reason) => abort(traj, reason, EventState::B(st), x),
            });
        }
        traj.chart_b.push(step);
        z = acc.x1;
        y = acc.y1;
        k1 = acc.k7;
        h = acc.h_next;
        traj.z_end = z;
    }
}

fn abort(mut traj: Trajectory, reason: AbortReason, state: EventState, at: f64) -> Trajectory {
    traj.events.push(Event { kind: EventKind::Aborted, location: at, state });
    traj.status = Status::Aborted(reason);
    traj
}
