//! JSON reports and the phase-sweep table.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{
    analyze, el_residual, equator_identity_residual, eta_boundedness, surface_totals, ClassKind, Classification,
    EtaReport, Landmarks, SurfaceTotals,
};
use crate::bounds::{asymptotic_sweep, check_single, AsymptoticReport, BoundsReport, PhaseCell};
use crate::error::Result;
use crate::ode::solver::{EventKind, Status, Trajectory};
use crate::ode::{integrate, SolverConfig};
use crate::params::{analyze_cubic, derived_constants, CubicAnalysis, HelfrichParams};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub params: HelfrichParams,
    pub w0p: f64,
    pub config: SolverConfig,
    pub eps_start: f64,
    pub cubic: CubicAnalysis,
    pub status: Status,
    pub events: Vec<(EventKind, f64)>,
    pub landmarks: Landmarks,
    pub classification: Classification,
    pub totals: Option<SurfaceTotals>,
    pub el_residual: f64,
    pub equator_identity_residual: Option<f64>,
    pub eta: Option<EtaReport>,
    pub bounds_report: Option<BoundsReport>,
}

impl SolveReport {
    pub fn kind(&self) -> ClassKind {
        self.classification.kind
    }
}

/// Everything `solve` reports about one trajectory. Quantities that need
/// the equator are `None` when it was not reached.
pub fn solve_report(traj: &Trajectory) -> Result<SolveReport> {
    let (landmarks, classification) = analyze(traj);
    let reached = traj.status == Status::Equator;
    let bounds_report = if reached {
        let consts = derived_constants(&traj.params, traj.w0p)?;
        check_single(traj, &landmarks, &consts).ok()
    } else {
        None
    };
    Ok(SolveReport {
        params: traj.params,
        w0p: traj.w0p,
        config: traj.config,
        eps_start: traj.eps,
        cubic: analyze_cubic(&traj.params),
        status: traj.status,
        events: traj.events.iter().map(|e| (e.kind, e.location)).collect(),
        totals: surface_totals(traj).ok(),
        el_residual: el_residual(traj),
        equator_identity_residual: equator_identity_residual(traj).ok(),
        eta: if reached { eta_boundedness(traj).ok() } else { None },
        landmarks,
        classification,
        bounds_report,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyPoint {
    pub w0p: f64,
    pub classification: ClassKind,
    pub bounds_report: BoundsReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Excluded {
    pub w0p: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub params: HelfrichParams,
    pub config: SolverConfig,
    pub points: Vec<VerifyPoint>,
    /// Sweep points that did not produce a biconcave profile.
    pub excluded: Vec<Excluded>,
    pub asymptotic: AsymptoticReport,
    pub failures: Vec<String>,
    pub all_pass: bool,
}

fn verify_point(params: &HelfrichParams, w0p: f64, cfg: &SolverConfig) -> std::result::Result<VerifyPoint, String> {
    let traj = integrate(params, w0p, cfg).map_err(|e| e.to_string())?;
    let (lm, c) = analyze(&traj);
    if c.kind != ClassKind::Biconcave {
        return Err(c.kind.name().to_string());
    }
    let consts = derived_constants(params, w0p).map_err(|e| e.to_string())?;
    let report = check_single(&traj, &lm, &consts).map_err(|e| e.to_string())?;
    Ok(VerifyPoint { w0p, classification: c.kind, bounds_report: report })
}

/// Bound checks at every grid point plus the asymptotic sweep over the same
/// grid. Non-biconcave points are listed as excluded and do not fail the run.
pub fn verify(params: &HelfrichParams, grid: &[f64], cfg: &SolverConfig) -> VerifyReport {
    use rayon::prelude::*;
    let results: Vec<_> = grid.par_iter().map(|&w| (w, verify_point(params, w, cfg))).collect();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let mut failures = Vec::new();
    for (w0p, r) in results {
        match r {
            Ok(pt) => {
                for id in pt.bounds_report.failures() {
                    failures.push(format!("w0'={w0p:e}: {id:?}"));
                }
                points.push(pt);
            }
            Err(reason) => excluded.push(Excluded { w0p, reason }),
        }
    }
    let asymptotic = asymptotic_sweep(params, grid, cfg);
    failures.extend(asymptotic.band_violations.iter().cloned());
    VerifyReport {
        params: *params,
        config: *cfg,
        points,
        excluded,
        asymptotic,
        all_pass: failures.is_empty(),
        failures,
    }
}

pub const PHASE_HEADER: &str = "c0,lambda,p,w0p,classification,r_M,r0,wp_r0,r_inf,z_inf,roots_all_positive";

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Phase table; absent landmarks are empty fields.
pub fn phase_csv(cells: &[PhaseCell]) -> String {
    let mut s = String::new();
    s.push_str(PHASE_HEADER);
    s.push('\n');
    for c in cells {
        let lm = c.landmarks.as_ref();
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{},{},{}",
            c.params.c0,
            c.params.lambda,
            c.params.p,
            c.w0p,
            c.classification,
            cell(lm.and_then(|l| l.r_m)),
            cell(lm.and_then(|l| l.r0)),
            cell(lm.and_then(|l| l.wp_at_r0)),
            cell(lm.and_then(|l| l.r_inf)),
            cell(lm.and_then(|l| l.z_inf)),
            c.roots_all_positive
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::classify_cell;

    #[test]
    fn blow_up_report_has_no_equator_quantities() {
        let traj = integrate(&HelfrichParams::new(5.0, 0.0, 0.1), 1.0, &SolverConfig::default()).unwrap();
        let r = solve_report(&traj).unwrap();
        assert_eq!(r.kind(), ClassKind::BlowUpPositive);
        assert!(r.totals.is_none() && r.bounds_report.is_none());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"classification\""));
        assert!(json.contains("\"equatorIdentityResidual\":null"));
    }

    #[test]
    fn phase_rows_have_empty_fields_for_missing_landmarks() {
        let cfg = SolverConfig::default();
        let cells = vec![classify_cell(&HelfrichParams::new(5.0, 0.0, 0.1), 1.0, &cfg)];
        let csv = phase_csv(&cells);
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 11);
        assert!(row.contains("BlowUpPositive"));
        assert!(row.contains(",,"));
    }
}
