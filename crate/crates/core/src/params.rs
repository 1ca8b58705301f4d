//! Physical parameters and the polynomials that govern the qualitative
//! behaviour of the shape equation.
//!
//! The cubic `Q(t) = t^3 + 2 c0 t^2 + (c0^2 + lambda) t - p/2` and its
//! quadratic truncation `R(t) = Q(t) - t^3` decide whether the initial value
//! problem produces a biconcave profile. This module evaluates both, isolates
//! the real roots of `Q`, and computes the extremal constants of `-Q` that
//! enter every quantitative bound checked by [`crate::bounds`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spontaneous curvature `c0`, tensile stress `lambda` and osmotic pressure
/// difference `p`, all in one consistent (arbitrary) length unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelfrichParams {
    pub c0: f64,
    pub lambda: f64,
    pub p: f64,
}

impl HelfrichParams {
    pub fn new(c0: f64, lambda: f64, p: f64) -> Self {
        Self { c0, lambda, p }
    }

    /// Coefficient of the linear term of `Q`, `c0^2 + lambda`.
    #[inline]
    pub fn linear(&self) -> f64 {
        self.c0 * self.c0 + self.lambda
    }

    /// Monic coefficients `[1, 2 c0, c0^2 + lambda, -p/2]`, highest degree first.
    pub fn cubic_coefficients(&self) -> [f64; 4] {
        [1.0, 2.0 * self.c0, self.linear(), -0.5 * self.p]
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.lambda.is_finite() && self.p.is_finite()
    }

    #[inline]
    pub fn q(&self, t: f64) -> f64 {
        eval_q(t, self)
    }

    #[inline]
    pub fn r(&self, t: f64) -> f64 {
        eval_r(t, self)
    }

    /// `Q'(t) = 3 t^2 + 4 c0 t + (c0^2 + lambda)`.
    #[inline]
    pub fn q_prime(&self, t: f64) -> f64 {
        (3.0 * t + 4.0 * self.c0) * t + self.linear()
    }
}

/// `Q(t)` in Horner order.
#[inline]
pub fn eval_q(t: f64, params: &HelfrichParams) -> f64 {
    ((t + 2.0 * params.c0) * t + params.linear()) * t - 0.5 * params.p
}

/// `R(t) = 2 c0 t^2 + (c0^2 + lambda) t - p/2`.
#[inline]
pub fn eval_r(t: f64, params: &HelfrichParams) -> f64 {
    (2.0 * params.c0 * t + params.linear()) * t - 0.5 * params.p
}

/// A distinct real root together with its multiplicity (1, 2 or 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

/// Real roots and critical points of `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicAnalysis {
    /// Distinct real roots, sorted ascending.
    pub real_roots: Vec<Root>,
    /// True iff every real root is strictly positive. A root at exactly zero
    /// (which happens for `p = 0`) makes this false.
    pub all_roots_positive: bool,
    /// Real roots of `Q'`, sorted ascending.
    pub critical_points: Vec<f64>,
}

impl CubicAnalysis {
    pub fn smallest_root(&self) -> Option<f64> {
        self.real_roots.first().map(|r| r.value)
    }

    /// Smallest strictly positive real root, if any.
    pub fn smallest_positive_root(&self) -> Option<f64> {
        self.real_roots.iter().map(|r| r.value).find(|&v| v > 0.0)
    }
}

/// Bound on the rounding error of a Horner evaluation of `Q` at `t`.
fn q_rounding_bound(t: f64, params: &HelfrichParams) -> f64 {
    let a = t.abs();
    let mag = ((a + 2.0 * params.c0.abs()) * a + params.linear().abs()) * a + 0.5 * params.p.abs();
    16.0 * f64::EPSILON * mag.max(f64::MIN_POSITIVE)
}

/// Critical points of `Q` from the quadratic formula, in a cancellation-free form.
fn critical_points(params: &HelfrichParams) -> Vec<f64> {
    // 3 t^2 + 4 c0 t + (c0^2 + lambda)
    let a = 3.0;
    let b = 4.0 * params.c0;
    let c = params.linear();
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + if b < 0.0 { -sq } else { sq });
    let (mut t1, mut t2) = (qq / a, if qq != 0.0 { c / qq } else { -qq / a });
    if t1 > t2 {
        std::mem::swap(&mut t1, &mut t2);
    }
    vec![t1, t2]
}

/// Safeguarded Newton iteration on a bracket `[lo, hi]` where `Q` changes sign.
fn polish_root(params: &HelfrichParams, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = params.q(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if params.q(hi) == 0.0 {
        return hi;
    }
    let lo_negative = f_lo < 0.0;

    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = params.q(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let dfx = params.q_prime(x);
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let converged = (next - x).abs() <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
        x = next;
        if converged || next <= lo || next >= hi {
            break;
        }
    }
    x
}

/// Isolates the real roots of `Q`.
///
/// The monotone intervals of `Q` are delimited by the closed-form critical
/// points; each interval holding a sign change yields one root, polished by
/// safeguarded Newton. A critical value that vanishes to rounding accuracy is
/// reported as a repeated root.
pub fn analyze_cubic(params: &HelfrichParams) -> CubicAnalysis {
    let crit = critical_points(params);
    let coeffs = params.cubic_coefficients();
    // Cauchy bound on the modulus of every root.
    let bound = 1.0 + coeffs[1..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let is_zero = |t: f64| params.q(t).abs() <= q_rounding_bound(t, params);

    let mut roots: Vec<Root> = Vec::with_capacity(3);
    match crit.as_slice() {
        [] => roots.push(Root {
            value: polish_root(params, -bound, bound),
            multiplicity: 1,
        }),
        [c] => {
            if is_zero(*c) {
                roots.push(Root { value: *c, multiplicity: 3 });
            } else if params.q(*c) > 0.0 {
                roots.push(Root { value: polish_root(params, -bound, *c), multiplicity: 1 });
            } else {
                roots.push(Root { value: polish_root(params, *c, bound), multiplicity: 1 });
            }
        }
        [c1, c2] => {
            // c1 is the local maximum, c2 the local minimum.
            let (q1, q2) = (params.q(*c1), params.q(*c2));
            let (z1, z2) = (is_zero(*c1), is_zero(*c2));
            if z1 && z2 {
                // Both critical values vanish only when the critical points merge.
                roots.push(Root { value: 0.5 * (c1 + c2), multiplicity: 3 });
            } else if z1 {
                roots.push(Root { value: *c1, multiplicity: 2 });
                roots.push(Root { value: polish_root(params, *c2, bound), multiplicity: 1 });
            } else if z2 {
                roots.push(Root { value: polish_root(params, -bound, *c1), multiplicity: 1 });
                roots.push(Root { value: *c2, multiplicity: 2 });
            } else {
                if q1 > 0.0 {
                    roots.push(Root { value: polish_root(params, -bound, *c1), multiplicity: 1 });
                    if q2 < 0.0 {
                        roots.push(Root { value: polish_root(params, *c1, *c2), multiplicity: 1 });
                    }
                }
                if q2 < 0.0 {
                    roots.push(Root { value: polish_root(params, *c2, bound), multiplicity: 1 });
                }
            }
        }
        _ => unreachable!("a quadratic has at most two roots"),
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));

    let all_roots_positive = roots.iter().all(|r| r.value > 0.0);
    CubicAnalysis {
        real_roots: roots,
        all_roots_positive,
        critical_points: crit,
    }
}

/// Extremal values of `-Q` on `[0, w0']` and on `(-inf, 0]`, and the
/// combinations of them used by the quantitative bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `max { -Q(t) : 0 <= t <= w0' }`.
    pub mu: f64,
    /// `min { -Q(t) : 0 <= t <= w0' }`.
    pub delta_plus: f64,
    /// `min { -Q(t) : t <= 0 }`; may be `<= 0` when `Q` has a non-positive root.
    pub delta_minus: f64,
    /// `1 - 64 w0'^3 / (27 delta_plus)`, or `-inf` when `delta_plus <= 0`.
    pub xi: f64,
    /// `min { delta_plus / 8, delta_minus / 2 }`.
    pub delta: f64,
    pub w0p: f64,
}

impl DerivedConstants {
    /// `Q < 0` on the whole of `[0, w0']`.
    pub fn q_negative_on_start_interval(&self) -> bool {
        self.delta_plus > 0.0
    }
}

pub fn derived_constants(params: &HelfrichParams, w0p: f64) -> Result<DerivedConstants> {
    if !(w0p > 0.0) || !w0p.is_finite() {
        return Err(Error::InvalidSlope(w0p));
    }
    let crit = critical_points(params);

    let mut q_min = params.q(0.0).min(params.q(w0p));
    let mut q_max = params.q(0.0).max(params.q(w0p));
    for &c in crit.iter().filter(|&&c| c > 0.0 && c < w0p) {
        let v = params.q(c);
        q_min = q_min.min(v);
        q_max = q_max.max(v);
    }

    // Q -> -inf as t -> -inf, so the supremum over t <= 0 is attained at 0
    // or at a negative critical point.
    let sup_neg = crit
        .iter()
        .filter(|&&c| c < 0.0)
        .map(|&c| params.q(c))
        .fold(params.q(0.0), f64::max);

    let mu = -q_min;
    let delta_plus = -q_max;
    let delta_minus = -sup_neg;
    let xi = if delta_plus > 0.0 {
        1.0 - 64.0 * w0p.powi(3) / (27.0 * delta_plus)
    } else {
        f64::NEG_INFINITY
    };
    Ok(DerivedConstants {
        mu,
        delta_plus,
        delta_minus,
        xi,
        delta: (delta_plus / 8.0).min(delta_minus / 2.0),
        w0p,
    })
}

/// Largest value of `R` on `[0, w0']`. `R` is quadratic, so the maximum is at
/// an endpoint or at the vertex.
pub fn max_r_on(params: &HelfrichParams, w0p: f64) -> f64 {
    let mut m = params.r(0.0).max(params.r(w0p));
    let a = 2.0 * params.c0;
    if a != 0.0 {
        let v = -params.linear() / (2.0 * a);
        if v > 0.0 && v < w0p {
            m = m.max(params.r(v));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> HelfrichParams {
        HelfrichParams::new(1.0, 0.25, 1.0)
    }

    #[test]
    fn q_examples() {
        let p = HelfrichParams::new(0.3, -1.7, 2.4);
        assert_eq!(eval_q(0.0, &p), -1.2);
        assert_eq!(eval_q(1.0, &HelfrichParams::new(0.0, 0.0, 2.0)), 0.0);
        assert!((eval_q(0.1, &reference()) + 0.354).abs() < 1e-15);
    }

    #[test]
    fn r_examples() {
        let p = HelfrichParams::new(0.3, -1.7, 2.4);
        assert_eq!(eval_r(0.0, &p), -1.2);
        assert!((eval_r(1.0, &HelfrichParams::new(5.0, 0.0, 0.1)) - 34.95).abs() < 1e-12);
    }

    #[test]
    fn single_root_of_t_cubed_minus_one() {
        let a = analyze_cubic(&HelfrichParams::new(0.0, 0.0, 2.0));
        assert_eq!(a.real_roots.len(), 1);
        assert!((a.real_roots[0].value - 1.0).abs() < 1e-15);
        assert!(a.all_roots_positive);
    }

    #[test]
    fn three_roots_factorable() {
        // (t + 1)(t^2 - t - 1)
        let a = analyze_cubic(&HelfrichParams::new(0.0, -2.0, 2.0));
        let v: Vec<f64> = a.real_roots.iter().map(|r| r.value).collect();
        let s5 = 5f64.sqrt();
        let expected = [-1.0, (1.0 - s5) / 2.0, (1.0 + s5) / 2.0];
        assert_eq!(v.len(), 3);
        for (x, e) in v.iter().zip(expected) {
            assert!((x - e).abs() < 1e-14, "{x} vs {e}");
        }
        assert!(!a.all_roots_positive);
    }

    #[test]
    fn reference_parameters_single_positive_root() {
        let a = analyze_cubic(&reference());
        assert_eq!(a.real_roots.len(), 1);
        // bisection oracle on [0.25, 0.30], 40 digits
        assert!((a.real_roots[0].value - 0.268_828_085_849_210_9).abs() < 1e-15);
        assert!(a.all_roots_positive);
        assert_eq!(a.critical_points, vec![-5.0 / 6.0, -0.5]);
    }

    #[test]
    fn zero_root_is_not_positive() {
        // p = 0 and c0^2 + lambda > 0: Q = t (t^2 + 2 t + 1.25) has only t = 0.
        let a = analyze_cubic(&HelfrichParams::new(1.0, 0.25, 0.0));
        assert_eq!(a.real_roots.len(), 1);
        assert_eq!(a.real_roots[0].value, 0.0);
        assert!(!a.all_roots_positive);
    }

    #[test]
    fn double_root_reported_once() {
        // (t - 1)^2 (t - 2) = t^3 - 4 t^2 + 5 t - 2: c0 = -2, lambda = 1, p = 4
        let a = analyze_cubic(&HelfrichParams::new(-2.0, 1.0, 4.0));
        assert_eq!(a.real_roots.len(), 2);
        assert_eq!(a.real_roots[0].multiplicity, 2);
        assert!((a.real_roots[0].value - 1.0).abs() < 1e-12);
        assert!((a.real_roots[1].value - 2.0).abs() < 1e-12);
        assert!(a.all_roots_positive);
    }

    #[test]
    fn triple_root() {
        // (t - 1)^3 = t^3 - 3 t^2 + 3 t - 1: c0 = -1.5, lambda = 0.75, p = 2
        let a = analyze_cubic(&HelfrichParams::new(-1.5, 0.75, 2.0));
        assert_eq!(a.real_roots.len(), 1);
        assert_eq!(a.real_roots[0].multiplicity, 3);
        assert!((a.real_roots[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_constants_reference_example() {
        let d = derived_constants(&reference(), 0.1).unwrap();
        assert!((d.delta_plus - 0.354).abs() < 1e-15);
        assert!((d.mu - 0.5).abs() < 1e-15);
        assert!((d.delta_minus - 0.5).abs() < 1e-15);
        assert!((d.delta - 0.354 / 8.0).abs() < 1e-15);
        assert!(d.xi < 1.0 && d.xi > 0.0);
    }

    #[test]
    fn derived_constants_small_slope_limit() {
        let p = HelfrichParams::new(0.7, 0.1, 1.3);
        let d = derived_constants(&p, 1e-9).unwrap();
        assert!((d.delta_plus - 0.65).abs() < 1e-8);
        assert!((d.mu - 0.65).abs() < 1e-8);
    }

    #[test]
    fn derived_constants_rejects_non_positive_slope() {
        assert_eq!(derived_constants(&reference(), -0.1), Err(Error::InvalidSlope(-0.1)));
        assert_eq!(derived_constants(&reference(), 0.0), Err(Error::InvalidSlope(0.0)));
    }

    #[test]
    fn r_maximum_on_interval() {
        let p = reference();
        // R increasing on [0, 0.1]
        assert_eq!(max_r_on(&p, 0.1), p.r(0.1));
        let q = HelfrichParams::new(-1.0, 0.0, 0.1);
        // R = -2 t^2 + t - 0.05, vertex at t = 0.25
        assert!((max_r_on(&q, 1.0) - q.r(0.25)).abs() < 1e-15);
    }
}
