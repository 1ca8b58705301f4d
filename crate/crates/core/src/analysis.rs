//! Landmarks, classification, pointwise geometry, residual checks and
//! surface totals computed from a [`Trajectory`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::rhs::{eta_a, eta_b, eta_scaled_b, kappa_longitudinal, kappa_meridional, ChartAState, ChartBState};
use crate::ode::solver::{EventKind, EventState, Status, Trajectory};
use crate::params::HelfrichParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub r_m: Option<f64>,
    pub w_max: Option<f64>,
    pub r0: Option<f64>,
    pub wp_at_r0: Option<f64>,
    pub r_inf: Option<f64>,
    pub z_inf: Option<f64>,
    /// Strict extrema of `w` on `(0, r0)`, or on the whole chart-A range when
    /// `w` has no zero.
    pub n_critical_points: usize,
    pub critical_points: Vec<f64>,
}

impl Landmarks {
    pub fn r0(&self) -> Result<f64> {
        self.r0.ok_or(Error::MissingEvent("ZeroOfW"))
    }

    pub fn wp_at_r0(&self) -> Result<f64> {
        self.wp_at_r0.ok_or(Error::MissingEvent("ZeroOfW"))
    }

    pub fn r_m(&self) -> Result<f64> {
        self.r_m.ok_or(Error::MissingEvent("MaxOfW"))
    }

    pub fn r_inf(&self) -> Result<f64> {
        self.r_inf.ok_or(Error::MissingEvent("Equator"))
    }

    pub fn z_inf(&self) -> Result<f64> {
        self.z_inf.ok_or(Error::MissingEvent("Equator"))
    }
}

/// Number of scan intervals used to count sign changes of `w'`.
const CRITICAL_SCAN: usize = 20_000;

pub fn extract_landmarks(traj: &Trajectory) -> Landmarks {
    let max = traj.event(EventKind::MaxOfW);
    let zero = traj.event(EventKind::ZeroOfW);
    let eq = traj.event(EventKind::Equator);

    let (r0, wp_at_r0) = match zero.map(|e| e.state) {
        Some(EventState::A(a)) => (Some(a.r), Some(a.wp)),
        _ => (None, None),
    };
    let (r_inf, z_inf) = match eq.map(|e| e.state) {
        Some(EventState::B(b)) => (Some(b.u), Some(b.z)),
        _ => (None, None),
    };
    let end = r0.unwrap_or(traj.r_end);
    let critical_points = sign_changes_of_wp(traj, end);
    Landmarks {
        r_m: max.map(|e| e.location),
        w_max: max.map(|e| e.state.r()).and_then(|r| traj.state_a(r).ok()).map(|s| s.w),
        r0,
        wp_at_r0,
        r_inf,
        z_inf,
        n_critical_points: critical_points.len(),
        critical_points,
    }
}

/// Locations of sign changes of `w'` on `(0, end)`; zeros without a sign
/// change are not counted.
fn sign_changes_of_wp(traj: &Trajectory, end: f64) -> Vec<f64> {
    let wp = |r: f64| traj.state_a(r).map(|s| s.wp).unwrap_or(f64::NAN);
    let lo = traj.eps;
    let mut out = Vec::new();
    let mut prev_r = lo;
    let mut prev = wp(lo);
    for i in 1..=CRITICAL_SCAN {
        let r = lo + (end - lo) * i as f64 / CRITICAL_SCAN as f64;
        let v = wp(r);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            let (mut a, mut b) = (prev_r, r);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if (wp(m) > 0.0) == (prev > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= traj.config.event_tol {
                    break;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = v;
        prev_r = r;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    Biconcave,
    BlowUpPositive,
    Multimodal,
    NonNegativeDisplacement,
    Indeterminate,
}

impl ClassKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Biconcave => "Biconcave",
            ClassKind::BlowUpPositive => "BlowUpPositive",
            ClassKind::Multimodal => "Multimodal",
            ClassKind::NonNegativeDisplacement => "NonNegativeDisplacement",
            ClassKind::Indeterminate => "Indeterminate",
        }
    }
}

impl std::fmt::Display for ClassKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict plus which of the three conditions held. `None` means the
/// condition could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ClassKind,
    /// `w` has a single strict maximum before its zero.
    pub unimodal: Option<bool>,
    /// The equator was reached at finite radius.
    pub equator: bool,
    /// `z` at the equator is negative and finite.
    pub negative_height: Option<bool>,
    /// `z(r_M) > z(0)`: the axis sits in a dimple. Reported only.
    pub dimpled: Option<bool>,
    pub evidence: String,
}

pub fn classify(traj: &Trajectory, lm: &Landmarks) -> Classification {
    let unimodal = lm.r0.map(|_| lm.n_critical_points == 1);
    let cap = traj.config.r_max_for(&traj.params, traj.w0p) * traj.config.w_switch;
    let negative_height = lm.z_inf.map(|z| z < 0.0 && z.abs() <= cap);
    let (kind, evidence) = match traj.status {
        Status::Aborted(reason) => (ClassKind::Indeterminate, format!("integration aborted: {reason:?}")),
        Status::BlowUpPositive => (ClassKind::BlowUpPositive, "w reached +w_switch before any zero".to_string()),
        Status::Equator => {
            if unimodal != Some(true) {
                (ClassKind::Multimodal, format!("{} critical points of w before r0", lm.n_critical_points))
            } else if negative_height != Some(true) {
                (ClassKind::NonNegativeDisplacement, format!("z at equator = {:?}", lm.z_inf))
            } else {
                (ClassKind::Biconcave, "unimodal, equator reached, negative height".to_string())
            }
        }
    };
    let dimpled = lm.r_m.and_then(|rm| traj.state_a(rm).ok()).map(|s| s.z > 0.0);
    Classification { kind, unimodal, equator: traj.status == Status::Equator, negative_height, dimpled, evidence }
}

/// Convenience: landmarks and classification in one go.
pub fn analyze(traj: &Trajectory) -> (Landmarks, Classification) {
    let lm = extract_landmarks(traj);
    let c = classify(traj, &lm);
    (lm, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySample {
    pub r: f64,
    pub z: f64,
    pub w: f64,
    pub kappa_m: f64,
    pub kappa_l: f64,
    pub h: f64,
    pub k: f64,
    /// Not defined exactly at the equator.
    pub eta: Option<f64>,
}

fn sample_from_a(params: &HelfrichParams, s: &ChartAState) -> GeometrySample {
    let km = kappa_meridional(s.r, s.w);
    let kl = kappa_longitudinal(s.w, s.wp);
    GeometrySample {
        r: s.r,
        z: s.z,
        w: s.w,
        kappa_m: km,
        kappa_l: kl,
        h: 0.5 * (km + kl),
        k: km * kl,
        eta: Some(eta_a(params, s.r, s.w, s.wp)),
    }
}

/// Below this `|u'|` the graph slope is not formed and curvatures are taken
/// directly in `u`-variables.
const UP_LIMIT: f64 = 1e-6;

fn sample_from_b(params: &HelfrichParams, s: &ChartBState) -> GeometrySample {
    let (km, kl, eta) = if s.up.abs() > UP_LIMIT {
        let (w, wp) = (1.0 / s.up, -s.upp / s.up.powi(3));
        (kappa_meridional(s.u, w), kappa_longitudinal(w, wp), Some(eta_b(params, s.u, s.up, s.upp)))
    } else {
        (s.kappa_meridional(), s.kappa_longitudinal(), None)
    };
    GeometrySample { r: s.u, z: s.z, w: s.w(), kappa_m: km, kappa_l: kl, h: 0.5 * (km + kl), k: km * kl, eta }
}

/// Geometry at radius `r` in chart A.
pub fn geometry_at(traj: &Trajectory, r: f64) -> Result<GeometrySample> {
    if !(r > 0.0 && r <= traj.r_end) {
        return Err(Error::OutOfRange { value: r, lo: 0.0, hi: traj.r_end });
    }
    Ok(sample_from_a(&traj.params, &traj.state_a(r)?))
}

/// Geometry at height `z` in chart B.
pub fn geometry_at_z(traj: &Trajectory, z: f64) -> Result<GeometrySample> {
    Ok(sample_from_b(&traj.params, &traj.state_b(z)?))
}

/// Terms of the shape equation written as `lhs - sum(rhs terms)`, with the
/// magnitude of the largest single term.
pub fn el_residual_at(params: &HelfrichParams, r: f64, w: f64, wp: f64, wpp: f64) -> (f64, f64) {
    let g = 1.0 + w * w;
    let sg = g.sqrt();
    let g32 = g * sg;
    let g52 = g32 * g;
    let g72 = g52 * g;
    let terms = [
        2.0 * r * wpp / g52,
        -5.0 * r * w * wp * wp / g72,
        2.0 * wp / g52,
        -(2.0 * w + w * w * w) / (r * g32),
        -2.0 * params.c0 * w * w / g,
        -params.linear() * r * w / sg,
        0.5 * params.p * r * r,
    ];
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    (terms.iter().sum(), scale)
}

/// Number of chart-A points at which the variational residual is sampled.
pub const EL_SAMPLES: usize = 2000;

/// Maximum normalized residual of the shape equation along chart A, with
/// `w''` taken from the derivative of the dense-output interpolant.
pub fn el_residual(traj: &Trajectory) -> f64 {
    let (lo, hi) = (traj.eps, traj.r_end);
    let mut worst = 0.0f64;
    for i in 0..=EL_SAMPLES {
        let r = lo + (hi - lo) * i as f64 / EL_SAMPLES as f64;
        let (Ok(s), Ok(d)) = (traj.state_a(r), traj.derivative_a(r)) else { continue };
        let (res, scale) = el_residual_at(&traj.params, r, s.w, s.wp, d[1]);
        if scale > 0.0 {
            worst = worst.max(res.abs() / scale);
        }
    }
    worst
}

fn equator_state(traj: &Trajectory) -> Result<ChartBState> {
    match traj.require(EventKind::Equator)?.state {
        EventState::B(b) => Ok(b),
        EventState::A(_) => Err(Error::MissingEvent("Equator")),
    }
}

/// Relative mismatch of `K^2 = -(1/r_inf) Q(-1/r_inf)` at the equator.
pub fn equator_identity_residual(traj: &Trajectory) -> Result<f64> {
    let b = equator_state(traj)?;
    let k = b.kappa_meridional() * b.kappa_longitudinal();
    let k2 = k * k;
    let target = -traj.params.q(-1.0 / b.u) / b.u;
    Ok((k2 - target).abs() / k2.max(1e-30))
}

/// Relative disagreement of the two charts inside their overlap: one run
/// stays in chart A up to `|w| = 2 w_switch`, the other switches at
/// `w_switch`; both are compared at `|w| = 1.5 w_switch`. Returns the larger
/// of the relative differences in `r` and `z`.
pub fn chart_overlap_discrepancy(params: &HelfrichParams, w0p: f64, cfg: &crate::ode::SolverConfig) -> Result<f64> {
    let w_switch = cfg.w_switch;
    let w_mid = 1.5 * w_switch;
    let long_a = crate::ode::integrate(params, w0p, &crate::ode::SolverConfig { w_switch: 2.0 * w_switch, ..*cfg })?;
    let regular = crate::ode::integrate(params, w0p, cfg)?;
    let r_a = long_a.locate_a(|s| s.w + w_mid).ok_or(Error::MissingEvent("ChartSwitch"))?;
    let a = long_a.state_a(r_a)?;
    let z_b = regular.locate_b(|s| -(s.up + 1.0 / w_mid)).ok_or(Error::MissingEvent("ChartSwitch"))?;
    let b = regular.state_b(z_b)?;
    let dr = (a.r - b.u).abs() / a.r.abs();
    let dz = (a.z - b.z).abs() / a.z.abs().max(a.r.abs());
    Ok(dr.max(dz))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub sup_eta: f64,
    pub eta_at_equator_extrapolated: f64,
    /// Extrapolated limit of `eta |u'|` (equivalently `eta / sqrt(1 + w^2)`).
    pub eta_scaled_limit: f64,
    /// `|eta|` grew monotonically by more than 10x over the last two decades.
    pub diverging: bool,
    /// Supremum of `w'^2 / (|w| (1 + w^2)^{5/2})` over chart B.
    pub wprime_ratio_sup: f64,
    /// Its limit `u''^2` at the equator.
    pub wprime_ratio_limit: f64,
}

/// Samples per decade of distance to the equator.
const ETA_PER_DECADE: usize = 10;
const ETA_DECADES: usize = 4;

/// Samples `eta` along chart B at geometrically shrinking distance to the
/// equator and extrapolates its limit.
pub fn eta_boundedness(traj: &Trajectory) -> Result<EtaReport> {
    let b_eq = equator_state(traj)?;
    let z_inf = b_eq.z;
    let span = traj.z_start - z_inf;
    let p = &traj.params;
    let mut taus = Vec::new();
    let n = ETA_PER_DECADE * ETA_DECADES;
    for k in 0..=n {
        taus.push(span * 10f64.powf(-(k as f64) / ETA_PER_DECADE as f64));
    }
    let mut etas = Vec::with_capacity(taus.len());
    let mut sup_eta = 0.0f64;
    let mut sup_ratio = 0.0f64;
    for &t in &taus {
        let s = traj.state_b((z_inf + t).min(traj.z_start))?;
        let e = eta_b(p, s.u, s.up, s.upp);
        sup_eta = sup_eta.max(e.abs());
        etas.push(e);
        let big_s = 1.0 + s.up * s.up;
        sup_ratio = sup_ratio.max(s.upp * s.upp / big_s.powf(2.5));
    }
    // linear Richardson on the two smallest distances (ratio 10^(1/10))
    let ratio = 10f64.powf(1.0 / ETA_PER_DECADE as f64);
    let richardson = |f_small: f64, f_big: f64| (ratio * f_small - f_big) / (ratio - 1.0);
    let eta_lim = richardson(etas[n], etas[n - 1]);
    let scaled = |t: f64| -> Result<f64> {
        let s = traj.state_b((z_inf + t).min(traj.z_start))?;
        Ok(eta_scaled_b(p, s.u, s.up, s.upp) * (1.0 + s.up * s.up).sqrt())
    };
    let scaled_lim = richardson(scaled(taus[n])?, scaled(taus[n - 1])?);

    let tail = &etas[n - 2 * ETA_PER_DECADE..];
    let monotone = tail.windows(2).all(|w| w[1].abs() >= w[0].abs());
    let diverging = monotone && tail[tail.len() - 1].abs() > 10.0 * tail[0].abs();

    let q = b_eq.upp;
    Ok(EtaReport {
        sup_eta,
        eta_at_equator_extrapolated: eta_lim,
        eta_scaled_limit: scaled_lim,
        diverging,
        wprime_ratio_sup: sup_ratio,
        wprime_ratio_limit: q * q / (1.0 + b_eq.up * b_eq.up).powf(2.5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTotals {
    pub area: f64,
    pub volume: f64,
    pub helfrich_energy: f64,
}

/// Totals of the closed surface (both halves) from the accumulators.
pub fn surface_totals(traj: &Trajectory) -> Result<SurfaceTotals> {
    equator_state(traj)?;
    let (area, vol, energy) = traj.final_accumulators().ok_or(Error::MissingEvent("Equator"))?;
    let volume = -2.0 * PI * vol;
    Ok(SurfaceTotals {
        area: 4.0 * PI * area,
        volume,
        helfrich_energy: 4.0 * PI * energy + traj.params.p * volume,
    })
}

/// Area and enclosed volume of the closed surface obtained by revolving the
/// polyline `(r_i, z_i)` (from the axis to the reflection plane) and
/// reflecting it. Uses exact frustum formulas on each segment.
pub fn polyline_totals(points: &[(f64, f64)]) -> (f64, f64) {
    let mut area = 0.0;
    let mut vol = 0.0;
    for seg in points.windows(2) {
        let ((r1, z1), (r2, z2)) = (seg[0], seg[1]);
        let len = (r2 - r1).hypot(z2 - z1);
        area += PI * (r1 + r2) * len;
        vol += PI / 3.0 * (z2 - z1) * (r1 * r1 + r1 * r2 + r2 * r2);
    }
    (2.0 * area, -2.0 * vol)
}

/// Half profile sampled on the dense output: `per_step` points per accepted
/// step on both charts, starting at the axis.
pub fn dense_polyline(traj: &Trajectory, per_step: usize) -> Result<Vec<(f64, f64)>> {
    equator_state(traj)?;
    let mut pts = vec![(0.0, 0.0)];
    let mut push_series = |r: f64| {
        let s = crate::ode::series::series_state(&traj.params, traj.w0p, r);
        pts.push((s.r, s.z));
    };
    for i in 1..=per_step {
        push_series(traj.eps * i as f64 / per_step as f64);
    }
    for st in &traj.chart_a {
        let end = st.x1().min(traj.r_end);
        for i in 1..=per_step {
            let r = st.x0 + (end - st.x0) * i as f64 / per_step as f64;
            let s = traj.state_a(r)?;
            pts.push((s.r, s.z));
        }
        if st.x1() >= traj.r_end {
            break;
        }
    }
    for st in &traj.chart_b {
        let end = st.x1().max(traj.z_end);
        for i in 1..=per_step {
            let z = st.x0 + (end - st.x0) * i as f64 / per_step as f64;
            let s = traj.state_b(z)?;
            pts.push((s.u, s.z));
        }
        if st.x1() <= traj.z_end {
            break;
        }
    }
    // the reflection plane is z = z_inf
    let z_inf = traj.z_end;
    Ok(pts.into_iter().map(|(r, z)| (r, z - z_inf)).collect())
}

/// Independent check of [`surface_totals`]: frustum quadrature of the dense
/// output, returning `(area, volume)`.
pub fn requadrature(traj: &Trajectory) -> Result<(f64, f64)> {
    Ok(polyline_totals(&dense_polyline(traj, 64)?))
}

/// Point on the half profile, in chart-independent form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub geometry: GeometrySample,
    /// Height above the reflection plane, `z - z_inf`.
    pub height: f64,
}

/// `n` points on the half profile from the axis to the equator, spaced
/// uniformly in arclength.
pub fn half_profile(traj: &Trajectory, n: usize) -> Result<Vec<ProfilePoint>> {
    let eq = equator_state(traj)?;
    let n = n.max(2);
    // fine parameter grid: (chart, parameter, r, z)
    const FINE: usize = 4000;
    let mut grid: Vec<(bool, f64, f64, f64)> = Vec::with_capacity(2 * FINE + 2);
    for i in 0..=FINE {
        let r = traj.r_end * i as f64 / FINE as f64;
        let z = if r == 0.0 { 0.0 } else { traj.state_a(r)?.z };
        grid.push((true, r, r, z));
    }
    for i in 1..=FINE {
        let z = traj.z_start + (traj.z_end - traj.z_start) * i as f64 / FINE as f64;
        grid.push((false, z, traj.state_b(z)?.u, z));
    }
    let mut arc = vec![0.0];
    for w in grid.windows(2) {
        let d = (w[1].2 - w[0].2).hypot(w[1].3 - w[0].3);
        arc.push(arc.last().unwrap() + d);
    }
    let total = *arc.last().unwrap();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let target = total * k as f64 / (n - 1) as f64;
        let i = arc.partition_point(|&a| a < target).clamp(1, grid.len() - 1);
        let (g0, g1) = (grid[i - 1], grid[i]);
        let frac = if arc[i] > arc[i - 1] { (target - arc[i - 1]) / (arc[i] - arc[i - 1]) } else { 0.0 };
        let geom = if k == 0 {
            axis_sample(traj)
        } else if k == n - 1 {
            sample_from_b(&traj.params, &eq)
        } else if g0.0 == g1.0 {
            let x = g0.1 + frac * (g1.1 - g0.1);
            if g1.0 { geometry_at(traj, x.max(traj.eps * 1e-3))? } else { geometry_at_z(traj, x)? }
        } else {
            // segment straddles the chart switch; snap to the nearer end
            if frac < 0.5 { geometry_at(traj, g0.1)? } else { geometry_at_z(traj, g1.1)? }
        };
        out.push(ProfilePoint { height: geom.z - eq.z, geometry: geom });
    }
    Ok(out)
}

fn axis_sample(traj: &Trajectory) -> GeometrySample {
    let k = traj.w0p;
    GeometrySample {
        r: 0.0,
        z: 0.0,
        w: 0.0,
        kappa_m: k,
        kappa_l: k,
        h: k,
        k: k * k,
        eta: Some(0.0),
    }
}

/// Closed cross-section curve: the half profile `(r, Z)` mirrored to
/// `(r, -Z)`, `(-r, -Z)` and `(-r, Z)`. Starts at the top of the axis and
/// runs clockwise; the first point is not repeated at the end.
pub fn profile(traj: &Trajectory, n: usize) -> Result<Vec<(f64, f64)>> {
    let (_, c) = analyze(traj);
    if c.kind != ClassKind::Biconcave {
        return Err(Error::NotBiconcave(c.kind.name().to_string()));
    }
    let half: Vec<(f64, f64)> = half_profile(traj, n)?.iter().map(|p| (p.geometry.r, p.height)).collect();
    Ok(mirror_closed(&half))
}

/// Mirrors a half profile running from `(0, Z0)` to `(r_inf, 0)` into a
/// closed curve of `4m - 4` points.
pub fn mirror_closed(half: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let m = half.len();
    let mut out = Vec::with_capacity(4 * m);
    out.extend(half.iter().copied());
    out.extend(half.iter().rev().skip(1).map(|&(x, y)| (x, -y)));
    out.extend(half.iter().skip(1).map(|&(x, y)| (-x, -y)));
    out.extend(half.iter().rev().skip(1).take(m.saturating_sub(2)).map(|&(x, y)| (-x, y)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::solver::{integrate, SolverConfig};

    fn reference() -> Trajectory {
        integrate(&HelfrichParams::new(1.0, 0.25, 1.0), 0.05, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn sphere_polyline() {
        let n = 200_000;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = 0.5 * PI * i as f64 / n as f64;
                (t.sin(), t.cos())
            })
            .collect();
        let (a, v) = polyline_totals(&pts);
        assert!((a / (4.0 * PI) - 1.0).abs() < 1e-6);
        assert!((v / (4.0 / 3.0 * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reference_landmarks() {
        let t = reference();
        let (lm, c) = analyze(&t);
        assert_eq!(c.kind, ClassKind::Biconcave, "{}", c.evidence);
        assert_eq!(lm.n_critical_points, 1);
        let (rm, r0, ri) = (lm.r_m.unwrap(), lm.r0.unwrap(), lm.r_inf.unwrap());
        assert!(0.0 < rm && rm < r0 && r0 < ri);
        assert!(lm.w_max.unwrap() > 0.0 && lm.wp_at_r0.unwrap() < 0.0);
        assert!((lm.critical_points[0] - rm).abs() < 1e-9);
    }

    #[test]
    fn axis_and_zero_geometry() {
        let t = reference();
        let g = geometry_at(&t, 1e-7).unwrap();
        assert!((g.kappa_m - 0.05).abs() < 1e-9 && (g.kappa_l - 0.05).abs() < 1e-9);
        let r0 = extract_landmarks(&t).r0.unwrap();
        let g = geometry_at(&t, r0).unwrap();
        assert!(g.kappa_m.abs() < 1e-10 && g.k <= 1e-12);
        assert!(geometry_at(&t, 10.0).is_err());
    }

    #[test]
    fn equator_curvature() {
        let t = reference();
        let g = geometry_at_z(&t, t.z_end).unwrap();
        let r_inf = extract_landmarks(&t).r_inf.unwrap();
        assert!((g.kappa_m + 1.0 / r_inf).abs() < 1e-9);
        assert!(g.eta.is_none());
    }

    #[test]
    fn residual_sensitivity_is_linear() {
        let p = HelfrichParams::new(1.0, 0.25, 1.0);
        let (r, w, wp) = (0.3, 0.02, -0.1);
        let wpp = crate::ode::rhs::shape_wpp(&p, r, w, wp);
        let (res0, _) = el_residual_at(&p, r, w, wp, wpp);
        let (res1, _) = el_residual_at(&p, r, w, wp, wpp + 1e-3);
        let coeff = 2.0 * r / (1.0 + w * w).powf(2.5);
        assert!(res0.abs() < 1e-15);
        assert!(((res1 - res0) / (1e-3 * coeff) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_profile_is_symmetric() {
        let t = reference();
        let c = profile(&t, 101).unwrap();
        assert_eq!(c.len(), 4 * 101 - 4);
        for &(x, y) in &c {
            let has = |a: f64, b: f64| c.iter().any(|&(u, v)| (u - a).abs() < 1e-15 && (v - b).abs() < 1e-15);
            assert!(has(-x, y) && has(x, -y));
        }
    }

    #[test]
    fn blow_up_has_no_profile() {
        let t = integrate(&HelfrichParams::new(5.0, 0.0, 0.1), 1.0, &SolverConfig::default()).unwrap();
        let lm = extract_landmarks(&t);
        assert!(lm.r0.is_none());
        assert_eq!(lm.r0(), Err(Error::MissingEvent("ZeroOfW")));
        assert!(matches!(profile(&t, 10), Err(Error::NotBiconcave(_))));
        assert!(surface_totals(&t).is_err());
    }
}
