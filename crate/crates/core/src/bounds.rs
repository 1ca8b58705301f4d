//! Executable checks of the quantitative estimates for small initial slope:
//! per-run inequalities with margins, the `w0' -> 0` asymptotic sweep and
//! the parameter-space classification sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, ClassKind, Classification, Landmarks};
use crate::error::{Error, Result};
use crate::ode::rhs::kappa_meridional;
use crate::ode::solver::{integrate, EventKind, EventState, SolverConfig, Status, Trajectory};
use crate::params::{analyze_cubic, derived_constants, max_r_on, DerivedConstants, HelfrichParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckId {
    R0Upper,
    WpR0Upper,
    AreaPosUpper,
    KappaMonotone,
    KappaPrimeBound,
    KappaBound,
    XiFloor,
    RInfUpper,
    NegAreaLower,
    WprimeOrdBounded,
    ZInfNegative,
    IntVLowerRatio,
    // informational variants
    R0UpperLoose,
    AreaPosUpperAlt,
    RInfUpperAlt,
    KappaPrimeBoundQuadratic,
    NegAreaQuadratic,
    BLowerChain,
    WprimeOrdAllSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

/// One inequality `lhs <= rhs`. Passes iff the hypothesis holds and
/// `margin = rhs - lhs >= -tol` (or `> 0` for strict checks with `tol = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: CheckId,
    pub hypothesis_satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub outcome: Outcome,
    pub informational: bool,
}

impl CheckRecord {
    fn new(check_id: CheckId, hypothesis: bool, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        let ok = if tol == 0.0 { margin > 0.0 } else { margin >= -tol };
        let outcome = match (hypothesis, ok) {
            (false, _) => Outcome::Skipped,
            (true, true) => Outcome::Pass,
            (true, false) => Outcome::Fail,
        };
        Self { check_id, hypothesis_satisfied: hypothesis, lhs, rhs, margin, tol, outcome, informational: false }
    }

    fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Relative tolerance applied to scalar checks.
pub const CHECK_RTOL: f64 = 1e-8;
/// Absolute tolerance for pointwise checks along the profile.
pub const POINTWISE_TOL: f64 = 1e-8;
/// Samples on `(0, r0)` for the pointwise checks.
const POINTWISE_SAMPLES: usize = 4000;

fn scaled_tol(lhs: f64, rhs: f64) -> f64 {
    CHECK_RTOL * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

fn scalar(id: CheckId, hyp: bool, lhs: f64, rhs: f64) -> CheckRecord {
    CheckRecord::new(id, hyp, lhs, rhs, scaled_tol(lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub w0p: f64,
    pub constants: DerivedConstants,
    pub records: Vec<CheckRecord>,
}

impl BoundsReport {
    pub fn get(&self, id: CheckId) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check_id == id)
    }

    /// No non-informational check failed.
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.informational || r.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> Vec<CheckId> {
        self.records
            .iter()
            .filter(|r| !r.informational && r.outcome == Outcome::Fail)
            .map(|r| r.check_id)
            .collect()
    }
}

/// Evaluates every check on one trajectory that reached the equator.
pub fn check_single(traj: &Trajectory, lm: &Landmarks, consts: &DerivedConstants) -> Result<BoundsReport> {
    if traj.status != Status::Equator {
        return Err(Error::MissingEvent("Equator"));
    }
    let params = &traj.params;
    let w0p = traj.w0p;
    let r0 = lm.r0()?;
    let wp0 = lm.wp_at_r0()?;
    let r_inf = lm.r_inf()?;
    let z_inf = lm.z_inf()?;
    let z_r0 = traj.state_a(r0)?.z;
    let dp = consts.delta_plus;
    let xi = consts.xi;
    let delta = consts.delta;

    let q_neg = consts.q_negative_on_start_interval();
    let r_neg = max_r_on(params, w0p) < 0.0;
    let xi_pos = q_neg && xi > 0.0;
    let delta_pos = consts.delta_plus > 0.0 && consts.delta_minus > 0.0;

    let mut recs = Vec::new();

    recs.push(scalar(CheckId::R0Upper, q_neg, r0 * r0, 16.0 * w0p / dp));
    recs.push(scalar(CheckId::R0UpperLoose, q_neg, r0 * r0, 64.0 * w0p / dp).info());
    recs.push(scalar(CheckId::WpR0Upper, q_neg, wp0, -dp * r0 * r0 / 8.0));

    // z(r0) is the integral of w over [0, r0]
    let area_bound = 4.0 * w0p * w0p / (dp * xi.sqrt());
    recs.push(scalar(CheckId::AreaPosUpper, xi_pos, z_r0, area_bound));
    let area_alt = 4.0 * w0p * w0p / (dp.powf(1.5) * xi.sqrt());
    recs.push(scalar(CheckId::AreaPosUpperAlt, xi_pos, z_r0, area_alt).info());

    // pointwise checks on (0, r0)
    let mut kappa_prev = f64::INFINITY;
    let mut max_increase = f64::NEG_INFINITY;
    let mut kp_margin = f64::INFINITY;
    let mut kp_at = (0.0, 0.0);
    let mut kp2_margin = f64::INFINITY;
    let mut kp2_at = (0.0, 0.0);
    let mut k_margin = f64::INFINITY;
    let mut k_at = (0.0, 0.0);
    let mut xi_margin = f64::INFINITY;
    let mut xi_at = 0.0;
    for i in 1..POINTWISE_SAMPLES {
        let r = r0 * i as f64 / POINTWISE_SAMPLES as f64;
        let s = traj.state_a(r)?;
        let g = 1.0 + s.w * s.w;
        let kappa = kappa_meridional(r, s.w);
        let kappa_p = s.wp / (r * g * g.sqrt()) - s.w / (r * r * g.sqrt());
        max_increase = max_increase.max(kappa - kappa_prev);
        kappa_prev = kappa;

        let bound = -dp * r / 8.0;
        if bound - kappa_p < kp_margin {
            kp_margin = bound - kappa_p;
            kp_at = (kappa_p, bound);
        }
        let bound2 = -dp * r * r / 8.0;
        if bound2 - kappa_p < kp2_margin {
            kp2_margin = bound2 - kappa_p;
            kp2_at = (kappa_p, bound2);
        }
        let kb = w0p - dp * r * r / 16.0;
        if kb - kappa < k_margin {
            k_margin = kb - kappa;
            k_at = (kappa, kb);
        }
        let one_minus = 1.0 - r * r * kappa * kappa;
        if one_minus - xi < xi_margin {
            xi_margin = one_minus - xi;
            xi_at = one_minus;
        }
    }
    recs.push(CheckRecord::new(CheckId::KappaMonotone, r_neg, max_increase, 0.0, POINTWISE_TOL));
    recs.push(CheckRecord::new(CheckId::KappaPrimeBound, q_neg, kp_at.0, kp_at.1, POINTWISE_TOL));
    recs.push(CheckRecord::new(CheckId::KappaPrimeBoundQuadratic, q_neg, kp2_at.0, kp2_at.1, POINTWISE_TOL).info());
    recs.push(CheckRecord::new(CheckId::KappaBound, q_neg, k_at.0, k_at.1, POINTWISE_TOL));
    recs.push(CheckRecord::new(CheckId::XiFloor, xi_pos, xi, xi_at, POINTWISE_TOL));

    let x = r_inf - r0;
    let b = (delta * r0 * r0 * wp0.abs()).sqrt();
    let r_inf_bound = std::f64::consts::FRAC_PI_2 / b;
    recs.push(scalar(CheckId::RInfUpper, delta_pos, x, r_inf_bound));
    let delta_alt = (dp / 4.0).min(consts.delta_minus / 2.0);
    let b_alt = (delta_alt * r0 * r0 * wp0.abs()).sqrt();
    recs.push(scalar(CheckId::RInfUpperAlt, delta_pos, x, std::f64::consts::FRAC_PI_2 / b_alt).info());

    let neg_area = z_r0 - z_inf;
    let bx = b * x;
    let log_bound = if bx < std::f64::consts::FRAC_PI_2 { -(bx.cos()).ln() / b } else { f64::INFINITY };
    recs.push(scalar(CheckId::NegAreaLower, delta_pos, log_bound, neg_area));
    recs.push(scalar(CheckId::NegAreaQuadratic, delta_pos, 0.5 * b * x * x, log_bound).info());
    recs.push(scalar(CheckId::BLowerChain, delta_pos, (delta * dp / 8.0).sqrt() * r0 * r0, b).info());

    let (tail_sup, all_sup, limit) = wprime_ratio(traj)?;
    recs.push(scalar(CheckId::WprimeOrdBounded, true, tail_sup, 2.0 * limit));
    recs.push(scalar(CheckId::WprimeOrdAllSamples, true, all_sup, 2.0 * limit).info());

    recs.push(CheckRecord::new(CheckId::ZInfNegative, true, z_inf, 0.0, 0.0));

    // r0^2 <= r0^2 w'(r0)^2 x^2 + x L int|w| on [r0, r_inf]
    let l = 1.0
        + 2.0 * params.c0.abs() * r_inf
        + params.linear().max(0.0) * r_inf * r_inf
        + 0.5 * params.p.max(0.0) * r_inf.powi(3);
    let rhs = r0 * r0 * wp0 * wp0 * x * x + x * l * neg_area;
    recs.push(scalar(CheckId::IntVLowerRatio, true, r0 * r0, rhs));

    Ok(BoundsReport { w0p, constants: *consts, records: recs })
}

/// Samples of `w'^2 / (|w| (1 + w^2)^{5/2})` with `|w| > 1e-3`: the sup over
/// the blow-down tail (`w <= -1` and chart B), the sup over all samples, and
/// the equator limit `u''^2`.
fn wprime_ratio(traj: &Trajectory) -> Result<(f64, f64, f64)> {
    const N: usize = 4000;
    let mut tail = 0.0f64;
    let mut all = 0.0f64;
    for i in 1..=N {
        let r = traj.eps + (traj.r_end - traj.eps) * i as f64 / N as f64;
        let s = traj.state_a(r)?;
        if s.w.abs() <= 1e-3 {
            continue;
        }
        let v = s.wp * s.wp / (s.w.abs() * (1.0 + s.w * s.w).powf(2.5));
        all = all.max(v);
        if s.w <= -1.0 {
            tail = tail.max(v);
        }
    }
    for i in 0..=N {
        let z = traj.z_start + (traj.z_end - traj.z_start) * i as f64 / N as f64;
        let s = traj.state_b(z)?;
        let v = s.upp * s.upp / (1.0 + s.up * s.up).powf(2.5);
        all = all.max(v);
        tail = tail.max(v);
    }
    let eq = match traj.require(EventKind::Equator)?.state {
        EventState::B(b) => b,
        EventState::A(_) => return Err(Error::MissingEvent("Equator")),
    };
    Ok((tail, all, eq.upp * eq.upp))
}

/// Geometric grid from `hi` down to `lo` with `n` points.
pub fn geometric_grid(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n).map(|i| hi * (lo / hi).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Default asymptotic grid: 16 points from `1e-1` to `1e-4`.
pub fn default_asymptotic_grid() -> Vec<f64> {
    geometric_grid(1e-1, 1e-4, 16)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPoint {
    pub w0p: f64,
    pub classification: ClassKind,
    pub rm2_over_w0p: f64,
    pub r02_over_w0p: f64,
    pub wp_r0_over_w0p: f64,
    pub pos_area_over_w0p2: f64,
    pub neg_area_over_w0p: f64,
    pub z_inf: f64,
}

/// Acceptance bands applied at `w0' <= BAND_MAX_W0P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBands {
    pub rm2_min: f64,
    pub r02_max: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    pub pos_area_max: f64,
}

impl AsymptoticBands {
    pub fn for_pressure(p: f64) -> Self {
        Self {
            rm2_min: 32.0 / (3.0 * p) * 0.9,
            r02_max: 32.0 / p * 1.1,
            slope_min: -2.2,
            slope_max: -0.6,
            pos_area_max: 8.0 / p * 1.1,
        }
    }
}

pub const BAND_MAX_W0P: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub params: HelfrichParams,
    pub points: Vec<AsymptoticPoint>,
    /// Grid points that did not classify as biconcave, with the reason.
    pub excluded: Vec<(f64, String)>,
    pub bands: AsymptoticBands,
    pub limits: AsymptoticLimits,
    /// Empirical infimum of `int |w| / w0'` beyond `r0` over the grid.
    pub neg_area_ratio_inf: f64,
    pub band_violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimits {
    pub rm2: f64,
    pub r02: f64,
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub pos_area: f64,
}

impl AsymptoticReport {
    pub fn passes(&self) -> bool {
        self.band_violations.is_empty()
    }
}

fn asymptotic_point(params: &HelfrichParams, w0p: f64, cfg: &SolverConfig) -> std::result::Result<AsymptoticPoint, String> {
    let traj = integrate(params, w0p, cfg).map_err(|e| e.to_string())?;
    let (lm, c) = analyze(&traj);
    if c.kind != ClassKind::Biconcave {
        return Err(c.kind.name().to_string());
    }
    let (r0, rm) = (lm.r0.unwrap(), lm.r_m.unwrap());
    let z_r0 = traj.state_a(r0).map_err(|e| e.to_string())?.z;
    let z_inf = lm.z_inf.unwrap();
    Ok(AsymptoticPoint {
        w0p,
        classification: c.kind,
        rm2_over_w0p: rm * rm / w0p,
        r02_over_w0p: r0 * r0 / w0p,
        wp_r0_over_w0p: lm.wp_at_r0.unwrap() / w0p,
        pos_area_over_w0p2: z_r0 / (w0p * w0p),
        neg_area_over_w0p: (z_r0 - z_inf) / w0p,
        z_inf,
    })
}

/// Runs the grid in parallel and evaluates the asymptotic bands.
pub fn asymptotic_sweep(params: &HelfrichParams, grid: &[f64], cfg: &SolverConfig) -> AsymptoticReport {
    let results: Vec<_> = grid.par_iter().map(|&w| (w, asymptotic_point(params, w, cfg))).collect();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (w, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => excluded.push((w, e)),
        }
    }
    let p = params.p;
    let bands = AsymptoticBands::for_pressure(p);
    let mut violations = Vec::new();
    for pt in points.iter().filter(|pt| pt.w0p <= BAND_MAX_W0P) {
        let w = pt.w0p;
        if pt.rm2_over_w0p < bands.rm2_min {
            violations.push(format!("w0'={w:e}: r_M^2/w0' = {} < {}", pt.rm2_over_w0p, bands.rm2_min));
        }
        if pt.r02_over_w0p > bands.r02_max {
            violations.push(format!("w0'={w:e}: r0^2/w0' = {} > {}", pt.r02_over_w0p, bands.r02_max));
        }
        if !(pt.wp_r0_over_w0p >= bands.slope_min && pt.wp_r0_over_w0p <= bands.slope_max) {
            violations.push(format!("w0'={w:e}: w'(r0)/w0' = {} outside band", pt.wp_r0_over_w0p));
        }
        if pt.rm2_over_w0p > pt.r02_over_w0p {
            violations.push(format!("w0'={w:e}: r_M > r0"));
        }
        if pt.z_inf >= 0.0 {
            violations.push(format!("w0'={w:e}: z_inf = {} is not negative", pt.z_inf));
        }
    }
    // positive-area ratio at the two smallest slopes
    let mut by_slope: Vec<&AsymptoticPoint> = points.iter().collect();
    by_slope.sort_by(|a, b| a.w0p.total_cmp(&b.w0p));
    for pt in by_slope.iter().take(2) {
        if pt.pos_area_over_w0p2 > bands.pos_area_max {
            violations.push(format!("w0'={:e}: int w / w0'^2 = {} > {}", pt.w0p, pt.pos_area_over_w0p2, bands.pos_area_max));
        }
    }
    let inf = points.iter().map(|p| p.neg_area_over_w0p).fold(f64::INFINITY, f64::min);
    if !(inf > 0.0) && !points.is_empty() {
        violations.push(format!("int |w| / w0' has non-positive infimum {inf}"));
    }
    AsymptoticReport {
        params: *params,
        points,
        excluded,
        bands,
        limits: AsymptoticLimits {
            rm2: 32.0 / (3.0 * p),
            r02: 32.0 / p,
            slope_lo: -2.0,
            slope_hi: -2.0 / 3.0,
            pos_area: 8.0 / p,
        },
        neg_area_ratio_inf: inf,
        band_violations: violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub params: HelfrichParams,
    pub w0p: f64,
    /// Classification name, or `Error` when integration failed.
    pub classification: String,
    pub landmarks: Option<Landmarks>,
    pub roots_all_positive: bool,
    /// Inside the small-slope regime where biconcavity is guaranteed but
    /// the cell did not classify as such.
    pub anomaly: bool,
    pub error: Option<String>,
}

/// Fraction of the smallest root of `Q` below which a non-biconcave result
/// counts as an anomaly.
pub const ANOMALY_FRACTION: f64 = 0.01;

/// True if the small-slope guarantee applies to `(params, w0p)`.
pub fn in_guaranteed_regime(params: &HelfrichParams, w0p: f64) -> bool {
    let ca = analyze_cubic(params);
    params.p > 0.0
        && ca.all_roots_positive
        && ca.smallest_root().is_some_and(|root| w0p <= ANOMALY_FRACTION * root)
}

pub fn classify_cell(params: &HelfrichParams, w0p: f64, cfg: &SolverConfig) -> PhaseCell {
    let ca = analyze_cubic(params);
    let guaranteed = in_guaranteed_regime(params, w0p);
    match integrate(params, w0p, cfg) {
        Ok(traj) => {
            let (lm, c): (Landmarks, Classification) = analyze(&traj);
            PhaseCell {
                params: *params,
                w0p,
                classification: c.kind.name().to_string(),
                landmarks: Some(lm),
                roots_all_positive: ca.all_roots_positive,
                anomaly: guaranteed && c.kind != ClassKind::Biconcave,
                error: None,
            }
        }
        Err(e) => PhaseCell {
            params: *params,
            w0p,
            classification: "Error".to_string(),
            landmarks: None,
            roots_all_positive: ca.all_roots_positive,
            anomaly: guaranteed,
            error: Some(e.to_string()),
        },
    }
}

/// Classifies every cell; output order matches input order.
pub fn phase_sweep(cells: &[(HelfrichParams, f64)], cfg: &SolverConfig) -> Vec<PhaseCell> {
    cells.par_iter().map(|(p, w)| classify_cell(p, *w, cfg)).collect()
}

/// Integrates, classifies and runs [`check_single`] in one call.
pub fn check_run(params: &HelfrichParams, w0p: f64, cfg: &SolverConfig) -> Result<(Trajectory, Landmarks, Classification, BoundsReport)> {
    let traj = integrate(params, w0p, cfg)?;
    let (lm, c) = analyze(&traj);
    let consts = derived_constants(params, w0p)?;
    let report = check_single(&traj, &lm, &consts)?;
    Ok((traj, lm, c, report))
}
