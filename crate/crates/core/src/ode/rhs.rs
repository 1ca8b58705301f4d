//! Right-hand sides of the shape equation in the two coordinate charts.
//!
//! Chart A is the graph `z(r)` with slope `w = z'(r)`; the shape equation is
//! a second-order ODE for `w`. Chart B is the inverse graph `u(z) = r(z)`,
//! used through the vertical tangent at the equator. There the same equation
//! is third order in `u`: with `s = u'`, `q = u''` and `S = 1 + s^2`,
//!
//! ```text
//! u''' = N(u, s, q) / s
//! N    = 3q^2 - 5q^2/(2S) - q s^2/u - (1 + 2s^2) S/(2u^2)
//!        + c0 S^{3/2}/u - (c0^2 + lambda) S^2/2 - p u S^{5/2}/4
//! ```
//!
//! along the branch `w = 1/s < 0`. `N` vanishes with `s` on every solution
//! that reaches the equator, which is how the boundary curvature identity
//! `q^2 = -u Q(-1/u)` at `s = 0` arises.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::HelfrichParams;

/// State in graph coordinates, with quadrature accumulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartAState {
    pub r: f64,
    /// Slope `z'(r)`.
    pub w: f64,
    /// `w'(r)`.
    pub wp: f64,
    /// Height, `z(0) = 0`.
    pub z: f64,
    /// `int r sqrt(1 + w^2) dr`.
    pub area: f64,
    /// `int r^2 w dr`.
    pub volume: f64,
    /// `int [(2H + c0)^2 + lambda] r sqrt(1 + w^2) dr`.
    pub energy: f64,
}

impl ChartAState {
    pub(crate) fn to_array(self) -> [f64; 6] {
        [self.w, self.wp, self.z, self.area, self.volume, self.energy]
    }

    pub(crate) fn from_array(r: f64, y: &[f64; 6]) -> Self {
        Self {
            r,
            w: y[0],
            wp: y[1],
            z: y[2],
            area: y[3],
            volume: y[4],
            energy: y[5],
        }
    }
}

/// State in inverse-graph coordinates. `z` is the independent variable and
/// decreases during integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartBState {
    pub z: f64,
    /// Radius `r(z)`.
    pub u: f64,
    /// `u'(z) = 1/w`.
    pub up: f64,
    /// `u''(z)`.
    pub upp: f64,
    pub area: f64,
    pub volume: f64,
    pub energy: f64,
}

impl ChartBState {
    pub(crate) fn to_array(self) -> [f64; 6] {
        [self.u, self.up, self.upp, self.area, self.volume, self.energy]
    }

    pub(crate) fn from_array(z: f64, y: &[f64; 6]) -> Self {
        Self {
            z,
            u: y[0],
            up: y[1],
            upp: y[2],
            area: y[3],
            volume: y[4],
            energy: y[5],
        }
    }

    /// Slope in graph coordinates. Past the equator (`up >= 0`) the graph
    /// slope is `-inf`.
    pub fn w(&self) -> f64 {
        if self.up < 0.0 {
            1.0 / self.up
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `w'(r) = -u''/u'^3`.
    pub fn wp(&self) -> f64 {
        if self.up < 0.0 {
            -self.upp / self.up.powi(3)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Meridional curvature, `w / (r sqrt(1 + w^2))` written in `u`-variables.
    pub fn kappa_meridional(&self) -> f64 {
        -1.0 / (self.u * (1.0 + self.up * self.up).sqrt())
    }

    /// Longitudinal curvature, `w' / (1 + w^2)^{3/2}` written in `u`-variables.
    pub fn kappa_longitudinal(&self) -> f64 {
        self.upp / (1.0 + self.up * self.up).powf(1.5)
    }
}

#[inline]
pub fn kappa_meridional(r: f64, w: f64) -> f64 {
    w / (r * (1.0 + w * w).sqrt())
}

#[inline]
pub fn kappa_longitudinal(w: f64, wp: f64) -> f64 {
    wp / (1.0 + w * w).powf(1.5)
}

/// Mean curvature of the graph, `[w' + (w/r)(1 + w^2)] / (2 (1 + w^2)^{3/2})`.
/// Negative on the upper half of a round sphere.
#[inline]
pub fn mean_curvature(r: f64, w: f64, wp: f64) -> f64 {
    0.5 * (kappa_meridional(r, w) + kappa_longitudinal(w, wp))
}

/// `w''` from the shape equation.
///
/// The `-2w'` and `(2w + w^3)/r` terms are combined into
/// `[2(w - r w') + w^3 (3 + w^2)] / (r (1 + w^2)^{5/2})` so that the
/// leading-order cancellation near the axis happens on `w - r w'`, which is
/// computed to full relative accuracy.
pub fn shape_wpp(params: &HelfrichParams, r: f64, w: f64, wp: f64) -> f64 {
    shape_wpp_split(params, r, w, wp, w - r * wp)
}

/// [`shape_wpp`] with `w - r w'` supplied by the caller, for states where the
/// difference is known analytically.
pub(crate) fn shape_wpp_split(params: &HelfrichParams, r: f64, w: f64, wp: f64, w_minus_rwp: f64) -> f64 {
    let w2 = w * w;
    let g = 1.0 + w2;
    let sg = g.sqrt();
    let g52 = g * g * sg;
    let g72 = g52 * g;

    let bending = 5.0 * r * w * wp * wp / g72;
    let axis = (2.0 * w_minus_rwp + w2 * w * (3.0 + w2)) / (r * g52);
    let spontaneous = 2.0 * params.c0 * w2 / g;
    let tension = params.linear() * r * w / sg;
    let pressure = -0.5 * params.p * r * r;

    g52 / (2.0 * r) * (bending + axis + spontaneous + tension + pressure)
}

/// Energy density `(2H + c0)^2 + lambda`.
#[inline]
pub fn energy_density(params: &HelfrichParams, h: f64) -> f64 {
    let t = 2.0 * h + params.c0;
    t * t + params.lambda
}

/// Derivatives of `(w, w', z, area, volume, energy)` with respect to `r`.
pub fn rhs_chart_a(state: &ChartAState, params: &HelfrichParams) -> Result<[f64; 6]> {
    let ChartAState { r, w, wp, .. } = *state;
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let wpp = shape_wpp(params, r, w, wp);
    let ds = r * (1.0 + w * w).sqrt();
    let h = mean_curvature(r, w, wp);
    Ok([wp, wpp, w, ds, r * r * w, energy_density(params, h) * ds])
}

/// `kappa''` from the curvature form of the shape equation,
/// `r k'' = -r k (r k' + k)^2 / (2(1 - r^2 k^2)) - 3 k' + r Q(k) / (2(1 - r^2 k^2))`.
pub fn rhs_kappa(r: f64, kappa: f64, kappap: f64, params: &HelfrichParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let denom = 1.0 - r * r * kappa * kappa;
    if denom.abs() < 1e-12 {
        return Err(Error::SingularDenominator(denom));
    }
    let y = r * kappap + kappa;
    let rk2 = -r * kappa * y * y / (2.0 * denom) - 3.0 * kappap + r * params.q(kappa) / (2.0 * denom);
    Ok(rk2 / r)
}

/// Hands a chart-A state at a negative slope over to chart B.
pub fn chart_switch(a: &ChartAState) -> Result<ChartBState> {
    if !(a.w < 0.0) {
        return Err(Error::BadSwitch(a.w));
    }
    let s = 1.0 / a.w;
    Ok(ChartBState {
        z: a.z,
        u: a.r,
        up: s,
        // w' = -u''/u'^3
        upp: -a.wp * s * s * s,
        area: a.area,
        volume: a.volume,
        energy: a.energy,
    })
}

/// Inverse of [`chart_switch`].
pub fn chart_switch_back(b: &ChartBState) -> ChartAState {
    ChartAState {
        r: b.u,
        w: b.w(),
        wp: b.wp(),
        z: b.z,
        area: b.area,
        volume: b.volume,
        energy: b.energy,
    }
}

/// The numerator `N` of `u''' = N / u'`.
pub fn chart_b_numerator(params: &HelfrichParams, u: f64, s: f64, q: f64) -> f64 {
    let s2 = s * s;
    let big_s = 1.0 + s2;
    let root = big_s.sqrt();
    let s32 = big_s * root;
    let s52 = s32 * big_s;
    3.0 * q * q - 5.0 * q * q / (2.0 * big_s) - q * s2 / u - (1.0 + 2.0 * s2) * big_s / (2.0 * u * u)
        + params.c0 * s32 / u
        - 0.5 * params.linear() * big_s * big_s
        - 0.25 * params.p * u * s52
}

/// Derivatives of `(u, u', u'', area, volume, energy)` with respect to `z`.
///
/// The accumulators continue the chart-A integrals: `r^2 w dr = u^2 dz`, and
/// the area and energy densities carry a minus sign because `z` decreases.
pub fn rhs_chart_b(state: &ChartBState, params: &HelfrichParams) -> Result<[f64; 6]> {
    let ChartBState { z, u, up: s, upp: q, .. } = *state;
    if !(u > 0.0) {
        return Err(Error::NonPositiveRadius(u));
    }
    let uppp = chart_b_numerator(params, u, s, q) / s;
    if !uppp.is_finite() {
        return Err(Error::NonFinite(z));
    }
    let ds = u * (1.0 + s * s).sqrt();
    let h = 0.5 * (state.kappa_meridional() + state.kappa_longitudinal());
    Ok([s, q, uppp, -ds, u * u, -energy_density(params, h) * ds])
}

/// The bracket of the boundary functional divided by `sqrt(1 + w^2)`, in
/// `u`-variables. It tends to zero at the equator on every solution.
pub fn eta_scaled_b(params: &HelfrichParams, u: f64, s: f64, q: f64) -> f64 {
    let big_s = 1.0 + s * s;
    let root = big_s.sqrt();
    u * q * q / (big_s * big_s * big_s) - 1.0 / (u * big_s) + 2.0 * params.c0 / root
        - params.linear() * u
        - 0.5 * params.p * u * u / root
}

/// `eta(r)` in graph variables.
pub fn eta_a(params: &HelfrichParams, r: f64, w: f64, wp: f64) -> f64 {
    let g = 1.0 + w * w;
    let sg = g.sqrt();
    r * wp * wp / (g * g * sg) - w * w / (r * sg) - 2.0 * params.c0 * w - params.linear() * r * sg
        + 0.5 * params.p * r * r * w
}

/// `eta` in chart-B variables, `eta = -G sqrt(S) / s` with `G` from
/// [`eta_scaled_b`]. Not defined at `s = 0`.
pub fn eta_b(params: &HelfrichParams, u: f64, s: f64, q: f64) -> f64 {
    -eta_scaled_b(params, u, s, q) * (1.0 + s * s).sqrt() / s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> HelfrichParams {
        HelfrichParams::new(1.0, 0.25, 1.0)
    }

    fn a_state(r: f64, w: f64, wp: f64) -> ChartAState {
        ChartAState { r, w, wp, z: 0.0, area: 0.0, volume: 0.0, energy: 0.0 }
    }

    #[test]
    fn flat_state_is_driven_by_pressure_only() {
        let p = HelfrichParams::new(0.0, 0.0, 1.0);
        let d = rhs_chart_a(&a_state(1.0, 0.0, 0.0), &p).unwrap();
        assert!((d[1] + 0.25).abs() < 1e-15);
        let d = rhs_chart_a(&a_state(2.0, 0.0, 0.0), &p).unwrap();
        assert!((d[1] + 0.5).abs() < 1e-15);
        // c0 and lambda only enter through w-dependent terms
        let d = rhs_chart_a(&a_state(2.0, 0.0, 0.0), &reference()).unwrap();
        assert!((d[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn chart_a_rejects_axis() {
        assert_eq!(rhs_chart_a(&a_state(0.0, 0.0, 1.0), &reference()), Err(Error::NonPositiveRadius(0.0)));
    }

    #[test]
    fn kappa_at_rest() {
        let k = rhs_kappa(1.0, 0.0, 0.0, &reference()).unwrap();
        assert!((k + 0.25).abs() < 1e-15);
    }

    #[test]
    fn kappa_singular_denominator() {
        assert!(matches!(rhs_kappa(1.0, 1.0, 0.0, &reference()), Err(Error::SingularDenominator(_))));
        assert!(matches!(rhs_kappa(2.0, -0.5, 0.3, &reference()), Err(Error::SingularDenominator(_))));
    }

    #[test]
    fn switch_definition() {
        let a = ChartAState { r: 2.0, w: -10.0, wp: -3.0, z: -0.3, area: 1.5, volume: -0.7, energy: 4.0 };
        let b = chart_switch(&a).unwrap();
        assert_eq!(b.z, -0.3);
        assert_eq!(b.u, 2.0);
        assert!((b.up + 0.1).abs() < 1e-17);
        assert_eq!((b.area, b.volume, b.energy), (1.5, -0.7, 4.0));
        let back = chart_switch_back(&b);
        assert!((back.w + 10.0).abs() < 1e-13);
        assert!((back.wp + 3.0).abs() < 1e-12);
    }

    #[test]
    fn switch_needs_negative_slope() {
        let a = a_state(1.0, 0.5, 0.0);
        assert_eq!(chart_switch(&a), Err(Error::BadSwitch(0.5)));
    }

    #[test]
    fn chart_b_matches_chart_a_through_chain_rule() {
        let p = HelfrichParams::new(0.4, -0.3, 1.7);
        for &(r, w, wp) in &[(1.1, -3.0, -2.0), (0.7, -12.0, -40.0), (2.5, -1.5, 0.3)] {
            let a = a_state(r, w, wp);
            let b = chart_switch(&a).unwrap();
            let db = rhs_chart_b(&b, &p).unwrap();
            let wpp_a = shape_wpp(&p, r, w, wp);
            // w'' = (1/u') d/dz(-u''/u'^3)
            let (s, q, qq) = (b.up, b.upp, db[2]);
            let wpp_b = (-qq / s.powi(3) + 3.0 * q * q / s.powi(4)) / s;
            assert!((wpp_a - wpp_b).abs() <= 1e-10 * wpp_a.abs().max(1.0), "{wpp_a} {wpp_b}");
            // accumulators: dr = s dz
            let da = rhs_chart_a(&a, &p).unwrap();
            for i in 3..6 {
                assert!((da[i] * s - db[i]).abs() < 1e-12 * da[i].abs().max(1.0));
            }
            // z decreases in chart B, so the area still grows
            assert!(db[3] < 0.0);
        }
    }

    #[test]
    fn numerator_vanishes_iff_boundary_identity() {
        let p = reference();
        let u = 1.3;
        let target = -u * p.q(-1.0 / u);
        let q = -target.sqrt();
        assert!(chart_b_numerator(&p, u, 0.0, q).abs() < 1e-14);
        assert!(eta_scaled_b(&p, u, 0.0, q).abs() < 1e-14);
        assert!(chart_b_numerator(&p, u, 0.0, 1.1 * q).abs() > 1e-3);
    }

    #[test]
    fn eta_forms_agree() {
        let p = HelfrichParams::new(-0.3, 0.8, 0.6);
        let a = a_state(0.9, -4.0, -7.0);
        let b = chart_switch(&a).unwrap();
        let ea = eta_a(&p, a.r, a.w, a.wp);
        let eb = eta_b(&p, b.u, b.up, b.upp);
        assert!((ea - eb).abs() < 1e-11 * ea.abs().max(1.0), "{ea} {eb}");
    }

    #[test]
    fn curvature_forms_agree() {
        let a = a_state(0.9, -4.0, -7.0);
        let b = chart_switch(&a).unwrap();
        assert!((kappa_meridional(a.r, a.w) - b.kappa_meridional()).abs() < 1e-14);
        assert!((kappa_longitudinal(a.w, a.wp) - b.kappa_longitudinal()).abs() < 1e-14);
    }
}
