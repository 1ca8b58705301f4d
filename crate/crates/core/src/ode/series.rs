//! Start-up expansion at the rotational axis.
//!
//! The shape equation is singular at `r = 0`. Its solution with `w(0) = 0`,
//! `w'(0) = w0'` is odd in `r`; substituting `w = w0' r + a3 r^3` and matching
//! the `O(r^2)` terms gives `a3 = (Q(w0') + 7 w0'^3) / 16`. The integrator
//! starts from this expansion at a small radius `eps`.

use crate::error::{Error, Result};
use crate::ode::rhs::{energy_density, shape_wpp_split, ChartAState};
use crate::params::HelfrichParams;

/// Cubic coefficient of the axis expansion of `w`.
pub fn cubic_coefficient(params: &HelfrichParams, w0p: f64) -> f64 {
    (params.q(w0p) + 7.0 * w0p.powi(3)) / 16.0
}

/// Truncated series state at radius `r` with an explicit cubic coefficient.
/// Accumulators are integrated term by term from the axis.
pub fn series_state_with(params: &HelfrichParams, w0p: f64, a3: f64, r: f64) -> ChartAState {
    let r2 = r * r;
    let r4 = r2 * r2;
    let w = w0p * r + a3 * r2 * r;
    let wp = w0p + 3.0 * a3 * r2;
    let z = 0.5 * w0p * r2 + 0.25 * a3 * r4;
    let area = 0.5 * r2 + 0.125 * w0p * w0p * r4;
    let volume = 0.25 * w0p * r4 + a3 * r4 * r2 / 6.0;

    // 2H = 2 w0' + (4 a3 - 2 w0'^3) r^2 + O(r^4)
    let h0 = w0p;
    let h2 = 2.0 * a3 - w0p.powi(3);
    let e0 = energy_density(params, h0);
    let e2 = 2.0 * (2.0 * h0 + params.c0) * 2.0 * h2 + 0.5 * e0 * w0p * w0p;
    let energy = 0.5 * e0 * r2 + 0.25 * e2 * r4;

    ChartAState { r, w, wp, z, area, volume, energy }
}

/// Series state at `r`, valid for any `0 < r` small against the solution's
/// length scale. Does not validate its arguments.
pub fn series_state(params: &HelfrichParams, w0p: f64, r: f64) -> ChartAState {
    series_state_with(params, w0p, cubic_coefficient(params, w0p), r)
}

/// `|w''_series - w''_shape|` at `r` for the series with cubic coefficient
/// `a3`. `w - r w' = -2 a3 r^3` is passed exactly because forming it from the
/// rounded state loses the `O(r^3)` signal.
pub fn series_residual_with(params: &HelfrichParams, w0p: f64, a3: f64, r: f64) -> f64 {
    let s = series_state_with(params, w0p, a3, r);
    (6.0 * a3 * r - shape_wpp_split(params, r, s.w, s.wp, -2.0 * a3 * r.powi(3))).abs()
}

/// Residual of the shape equation along the start-up series; `O(r^3)`.
pub fn series_residual(params: &HelfrichParams, w0p: f64, r: f64) -> f64 {
    series_residual_with(params, w0p, cubic_coefficient(params, w0p), r)
}

/// Starting state at `r = eps`.
pub fn series_start(params: &HelfrichParams, w0p: f64, eps: f64) -> Result<ChartAState> {
    if !(w0p > 0.0) || !w0p.is_finite() {
        return Err(Error::InvalidSlope(w0p));
    }
    let a3 = cubic_coefficient(params, w0p);
    let correction = a3.abs() * eps.powi(3);
    let too_large = !(eps > 0.0)
        || correction > 0.01 * w0p * eps
        || (params.p > 0.0 && eps >= 0.1 * (w0p / params.p + 1.0).sqrt());
    if too_large {
        return Err(Error::EpsTooLarge { eps, correction });
    }
    Ok(series_state_with(params, w0p, a3, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> HelfrichParams {
        HelfrichParams::new(1.0, 0.25, 1.0)
    }

    #[test]
    fn cubic_coefficient_reference_example() {
        assert!((cubic_coefficient(&reference(), 0.1) + 0.021_687_5).abs() < 1e-16);
    }

    #[test]
    fn slope_at_axis() {
        let s = series_start(&reference(), 0.05, 1e-7).unwrap();
        assert!((s.w / s.r - 0.05).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(series_start(&reference(), 0.0, 1e-5), Err(Error::InvalidSlope(0.0)));
        assert!(matches!(series_start(&reference(), 0.05, 0.5), Err(Error::EpsTooLarge { .. })));
        assert!(matches!(series_start(&reference(), 0.05, 0.0), Err(Error::EpsTooLarge { .. })));
    }

    fn residual(a3: f64, eps: f64) -> f64 {
        series_residual_with(&reference(), 0.1, a3, eps)
    }

    fn loglog_slope(f: impl Fn(f64) -> f64) -> f64 {
        let xs: [f64; 3] = [1e-3, 1e-4, 1e-5];
        let pts: Vec<(f64, f64)> = xs.iter().map(|&e| (e.ln(), f(e).ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn residual_order_with_and_without_cubic_term() {
        let a3 = cubic_coefficient(&reference(), 0.1);
        let with = loglog_slope(|e| residual(a3, e));
        let without = loglog_slope(|e| residual(0.0, e));
        assert!(with >= 2.5, "slope with a3 = {with}");
        assert!((without - 1.0).abs() < 0.1, "slope without a3 = {without}");
    }
}
