//! Profile table: `r,z,w,kappa_m,kappa_l,H,K`, one row per sample, values in
//! round-trip scientific notation.

use std::io::{self, Write};

use crate::analysis::{geometry_at, half_profile, GeometrySample};
use crate::error::Result;
use crate::ode::solver::{Status, Trajectory};

pub const HEADER: &str = "r,z,w,kappa_m,kappa_l,H,K";

/// Samples for the profile table. Trajectories that reach the equator are
/// sampled uniformly in arclength over both charts; others over the chart-A
/// range only.
pub fn profile_samples(traj: &Trajectory, n: usize) -> Result<Vec<GeometrySample>> {
    if traj.status == Status::Equator {
        return Ok(half_profile(traj, n)?.into_iter().map(|p| p.geometry).collect());
    }
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let r = traj.eps + (traj.r_end - traj.eps) * i as f64 / (n - 1) as f64;
            geometry_at(traj, r)
        })
        .collect()
}

fn row(s: &GeometrySample) -> [f64; 7] {
    [s.r, s.z, s.w, s.kappa_m, s.kappa_l, s.h, s.k]
}

pub fn write_profile<W: Write>(mut out: W, samples: &[GeometrySample]) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for s in samples {
        let cells: Vec<String> = row(s).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn profile_to_string(samples: &[GeometrySample]) -> String {
    let mut buf = Vec::new();
    write_profile(&mut buf, samples).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses a table written by [`write_profile`].
pub fn parse_profile(text: &str) -> std::result::Result<Vec<[f64; 7]>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => return Err(format!("expected header {HEADER:?}, got {other:?}")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", i + 2))?;
        let arr: [f64; 7] = vals.try_into().map_err(|v: Vec<f64>| format!("line {}: {} columns", i + 2, v.len()))?;
        rows.push(arr);
    }
    Ok(rows)
}
