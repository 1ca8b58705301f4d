//! File emitters and run configuration for the command-line tool.

pub mod config;
pub mod csv;
pub mod obj;
pub mod report;
pub mod svg;

use crate::analysis::{half_profile, mirror_closed, profile};
use crate::error::Result;
use crate::ode::solver::Trajectory;

pub use config::{ConfigLayer, Format, RunConfig};

/// Number of points on the half profile used for plots.
pub const PLOT_SAMPLES: usize = 400;

/// SVG of the closed cross-section; fails with `NotBiconcave` otherwise.
pub fn plot_svg(traj: &Trajectory) -> Result<String> {
    let curve = profile(traj, PLOT_SAMPLES)?;
    Ok(svg::render(&curve, &traj.params, traj.w0p))
}

/// SVG from a half profile `(r, height)` that starts on the axis and ends on
/// the equator.
pub fn plot_half(half: &[(f64, f64)], params: &crate::params::HelfrichParams, w0p: f64) -> String {
    svg::render(&mirror_closed(half), params, w0p)
}

/// Mesh of the closed surface with `segments_profile` intervals per half.
pub fn mesh(traj: &Trajectory, segments_theta: usize, segments_profile: usize) -> Result<obj::Mesh> {
    // classification gate
    profile(traj, 2)?;
    let half: Vec<(f64, f64)> =
        half_profile(traj, segments_profile + 1)?.iter().map(|p| (p.geometry.r, p.height)).collect();
    Ok(obj::revolve(&half, segments_theta))
}
