//! Dormand-Prince 5(4) embedded pair with PI step-size control and the
//! fourth-order continuous extension of Hairer, Norsett and Wanner.
//!
//! The stepper works on fixed-size state arrays and integrates in either
//! direction of the independent variable (the sign of `h`).

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order solution minus embedded fourth-order solution
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<const N: usize> {
    pub x0: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn y0(&self) -> [f64; N] {
        self.coeffs[0]
    }

    pub fn y1(&self) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.coeffs[0][i] + self.coeffs[1][i];
        }
        y
    }

    /// True if `x` lies in the closed step interval.
    pub fn contains(&self, x: f64) -> bool {
        let (a, b) = if self.h >= 0.0 { (self.x0, self.x1()) } else { (self.x1(), self.x0) };
        x >= a && x <= b
    }

    #[inline]
    fn theta(&self, x: f64) -> f64 {
        (x - self.x0) / self.h
    }

    pub fn component(&self, i: usize, x: f64) -> f64 {
        let t = self.theta(x);
        let t1 = 1.0 - t;
        let c = &self.coeffs;
        c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])))
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.component(i, x);
        }
        y
    }

    /// Derivative of the interpolant with respect to `x`.
    pub fn derivative(&self, x: f64) -> [f64; N] {
        let t = self.theta(x);
        let t1 = 1.0 - t;
        let c = &self.coeffs;
        let mut dy = [0.0; N];
        for (i, d) in dy.iter_mut().enumerate() {
            let a = c[3][i] + t1 * c[4][i];
            let da = -c[4][i];
            let b = c[2][i] + t * a;
            let db = a + t * da;
            let cc = c[1][i] + t1 * b;
            let dcc = -b + t1 * db;
            *d = (cc + t * dcc) / self.h;
        }
        dy
    }
}

/// Weighted RMS norm with per-component scale `atol + rtol * max(|a|, |b|)`.
fn error_norm<const N: usize>(err: &[f64; N], a: &[f64; N], b: &[f64; N], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = atol + rtol * a[i].abs().max(b[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / N as f64).sqrt()
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Raw result of one Dormand-Prince step of size `h`.
pub struct RawStep<const N: usize> {
    pub y1: [f64; N],
    pub err: [f64; N],
    /// `f(x + h, y1)`, reused as the first stage of the next step.
    pub k7: [f64; N],
    stages: [[f64; N]; 7],
}

/// Single explicit step; `k1 = f(x, y)` must be supplied. Returns `None` if a
/// stage fails or evaluates to a non-finite value.
pub fn raw_step<F, const N: usize>(f: &F, x: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Option<RawStep<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    macro_rules! stage {
        ($x:expr, $y:expr) => {{
            // any failure inside a trial step just rejects it
            match f($x, &$y) {
                Ok(k) if all_finite(&k) => k,
                _ => return None,
            }
        }};
    }
    let k2 = stage!(x + C2 * h, axpy(y, h, &[(A21, k1)]));
    let k3 = stage!(x + C3 * h, axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = stage!(x + C4 * h, axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = stage!(x + C5 * h, axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = stage!(x + h, axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    if !all_finite(&y1) {
        return None;
    }
    let k7 = stage!(x + h, y1);
    let zero = [0.0; N];
    let err = axpy(&zero, h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
    Some(RawStep { y1, err, k7, stages: [*k1, k2, k3, k4, k5, k6, k7] })
}

impl<const N: usize> RawStep<N> {
    pub fn dense(&self, x0: f64, y0: &[f64; N], h: f64) -> DenseStep<N> {
        let k = &self.stages;
        let mut coeffs = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = self.y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            coeffs[0][i] = y0[i];
            coeffs[1][i] = ydiff;
            coeffs[2][i] = bspl;
            coeffs[3][i] = ydiff - h * k[6][i] - bspl;
            coeffs[4][i] =
                h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
        }
        DenseStep { x0, h, coeffs }
    }
}

/// An accepted adaptive step.
pub struct Accepted<const N: usize> {
    pub x1: f64,
    pub y1: [f64; N],
    pub k7: [f64; N],
    pub dense: DenseStep<N>,
    /// Proposed size of the next step (signed).
    pub h_next: f64,
}

/// Adaptive driver state: tolerances and the PI controller memory.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub rel_tol: f64,
    pub abs_tol: f64,
    err_old: f64,
    last_rejected: bool,
}

impl Stepper {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, err_old: 1e-4, last_rejected: false }
    }

    /// Initial step-size guess (Hairer's `hinit`), signed by `direction`.
    pub fn initial_step<F, const N: usize>(&self, f: &F, x: f64, y: &[f64; N], k1: &[f64; N], direction: f64, h_max: f64) -> Result<f64>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let zero = [0.0; N];
        let d0 = error_norm(y, &zero, y, self.rel_tol, self.abs_tol);
        let d1 = error_norm(k1, &zero, y, self.rel_tol, self.abs_tol);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(h_max);
        let y1 = axpy(y, direction * h0, &[(1.0, k1)]);
        let k2 = f(x + direction * h0, &y1)?;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = k2[i] - k1[i];
        }
        let d2 = error_norm(&diff, &zero, y, self.rel_tol, self.abs_tol) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok(direction * (100.0 * h0).min(h1).min(h_max))
    }

    /// Takes one accepted step starting with trial size `h`, rejecting and
    /// shrinking as needed. `|h|` is capped at `h_max`.
    pub fn step<F, const N: usize>(&mut self, f: &F, x: f64, y: &[f64; N], k1: &[f64; N], h: f64, h_max: f64) -> Result<Accepted<N>>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let direction = if h < 0.0 { -1.0 } else { 1.0 };
        let mut h = direction * h.abs().min(h_max);
        loop {
            if h.abs() < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::StepUnderflow { at: x, h: h.abs() });
            }
            let Some(raw) = raw_step(f, x, y, k1, h) else {
                h *= 0.25;
                self.last_rejected = true;
                continue;
            };
            let err = error_norm(&raw.err, y, &raw.y1, self.rel_tol, self.abs_tol);
            let expo = 0.2 - 0.75 * BETA;
            let fac11 = err.powf(expo);
            if err <= 1.0 {
                let mut fac = fac11 / self.err_old.powf(BETA);
                fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_next = h / fac;
                if self.last_rejected {
                    h_next = direction * h_next.abs().min(h.abs());
                }
                self.err_old = err.max(1e-4);
                self.last_rejected = false;
                let dense = raw.dense(x, y, h);
                return Ok(Accepted { x1: x + h, y1: raw.y1, k7: raw.k7, dense, h_next });
            }
            let shrink = (fac11 / SAFETY).min(1.0 / FAC_MIN);
            h /= shrink.max(1.0 + 1e-3);
            self.last_rejected = true;
        }
    }
}

/// Integrates with a fixed number of equal steps; no error control. Used to
/// measure the convergence order of the pair.
pub fn integrate_fixed<F, const N: usize>(f: &F, x0: f64, y0: [f64; N], x1: f64, steps: usize) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let h = (x1 - x0) / steps as f64;
    let mut y = y0;
    let mut k1 = f(x0, &y)?;
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let raw = raw_step(f, x, &y, &k1, h).ok_or(Error::NonFinite(x))?;
        y = raw.y1;
        k1 = raw.k7;
    }
    Ok(y)
}
