#![allow(dead_code)]

use helfrich::HelfrichParams;

/// `(mu, delta_plus, delta_minus)` by brute-force sampling of `-Q`:
/// `n` points on `[0, w0']`, and `n` points on `[-T, 0]` with `T` past every
/// point where `-Q` could still be below its value at the origin.
pub fn sampled_constants(p: &HelfrichParams, w0p: f64, n: usize) -> (f64, f64, f64) {
    let neg_q = |t: f64| -(t * t * t + 2.0 * p.c0 * t * t + (p.c0 * p.c0 + p.lambda) * t - 0.5 * p.p);
    let mut mu = f64::NEG_INFINITY;
    let mut dp = f64::INFINITY;
    for i in 0..=n {
        let v = neg_q(w0p * i as f64 / n as f64);
        mu = mu.max(v);
        dp = dp.min(v);
    }
    // for t < -T the cubic term dominates and -Q(t) > -Q(0)
    let t_max = 4.0 * (1.0 + 2.0 * p.c0.abs() + (p.c0 * p.c0 + p.lambda).abs());
    let mut dm = f64::INFINITY;
    let mut best = 0.0;
    for i in 0..=n {
        let t = -t_max * i as f64 / n as f64;
        let v = neg_q(t);
        if v < dm {
            dm = v;
            best = t;
        }
    }
    // polish the grid minimum by golden-section search on its bracket
    let h = t_max / n as f64;
    let (mut a, mut b) = ((best - h).max(-t_max), (best + h).min(0.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if neg_q(c) < neg_q(d) {
            b = d;
        } else {
            a = c;
        }
    }
    dm = dm.min(neg_q(0.5 * (a + b)));
    (mu, dp, dm)
}

/// `kappa''` of `kappa = w / (r sqrt(1 + w^2))` by the chain rule, given
/// `w, w', w''`.
pub fn kappa_derivatives(r: f64, w: f64, wp: f64, wpp: f64) -> (f64, f64, f64) {
    let q = 1.0 + w * w;
    let k = w / (r * q.sqrt());
    let kp = wp / (r * q.powf(1.5)) - w / (r * r * q.sqrt());
    let kpp = wpp / (r * q.powf(1.5)) - 2.0 * wp / (r * r * q.powf(1.5)) - 3.0 * w * wp * wp / (r * q.powf(2.5))
        + 2.0 * w / (r * r * r * q.sqrt());
    (k, kp, kpp)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn reference() -> HelfrichParams {
    HelfrichParams::new(1.0, 0.25, 1.0)
}
