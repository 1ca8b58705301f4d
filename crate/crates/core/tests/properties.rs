use proptest::prelude::*;

use helfrich::analysis::mirror_closed;
use helfrich::export::config::{ConfigLayer, Format, RunConfig};
use helfrich::export::csv::{parse_profile, profile_to_string};
use helfrich::export::obj::revolve;
use helfrich::ode::{rhs_chart_a, rhs_kappa, series_start, ChartAState};
use helfrich::params::{eval_q, eval_r};
use helfrich::{analyze_cubic, derived_constants, HelfrichParams};

mod common;
use common::{kappa_derivatives, sampled_constants};

fn params() -> impl Strategy<Value = HelfrichParams> {
    (-3.0..3.0f64, -2.0..3.0f64, -2.0..4.0f64).prop_map(|(c0, l, p)| HelfrichParams::new(c0, l, p))
}

proptest! {
    #[test]
    fn q_minus_r_is_cube(p in params(), t in -5.0..5.0f64) {
        let d = eval_q(t, &p) - eval_r(t, &p);
        prop_assert!((d - t * t * t).abs() <= 1e-12 * (1.0 + eval_q(t, &p).abs() + t.abs().powi(3)));
    }

    #[test]
    fn roots_are_roots(p in params()) {
        let ca = analyze_cubic(&p);
        prop_assert!(!ca.real_roots.is_empty());
        for r in &ca.real_roots {
            let t = r.value;
            let scale = t.abs().powi(3) + 2.0 * (p.c0 * t * t).abs() + (p.linear() * t).abs() + 0.5 * p.p.abs() + 1.0;
            // multiple roots are only determined to ~sqrt(eps)
            let tol = if r.multiplicity > 1 { 1e-7 } else { 1e-12 };
            prop_assert!(eval_q(t, &p).abs() <= tol * scale, "Q({t}) = {}", eval_q(t, &p));
        }
        prop_assert_eq!(ca.all_roots_positive, ca.real_roots.iter().all(|r| r.value > 0.0));
    }

    #[test]
    fn derived_constants_match_sampling(p in params(), w0p in 1e-3..2.0f64) {
        let d = derived_constants(&p, w0p).unwrap();
        let o = sampled_constants(&p, w0p, 100_000);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-6 * (1.0 + b.abs());
        prop_assert!(close(d.mu, o.0), "mu {} vs {}", d.mu, o.0);
        prop_assert!(close(d.delta_plus, o.1), "delta+ {} vs {}", d.delta_plus, o.1);
        prop_assert!(close(d.delta_minus, o.2), "delta- {} vs {}", d.delta_minus, o.2);
        prop_assert!(d.mu >= d.delta_plus);
        prop_assert!(d.delta <= d.delta_plus / 8.0 && d.delta <= d.delta_minus / 2.0);
    }

    #[test]
    fn kappa_form_agrees_with_graph_form(
        p in params(),
        r in 1e-2..5.0f64,
        w in -8.0..8.0f64,
        wp in -5.0..5.0f64,
    ) {
        let s = ChartAState { r, w, wp, z: 0.0, area: 0.0, volume: 0.0, energy: 0.0 };
        let da = rhs_chart_a(&s, &p).unwrap();
        let (k, kp, kpp) = kappa_derivatives(r, w, wp, da[1]);
        let direct = rhs_kappa(r, k, kp, &p).unwrap();
        let scale = 1.0 + kpp.abs() + (kp / r).abs() + (k / (r * r)).abs();
        prop_assert!((direct - kpp).abs() <= 1e-9 * scale, "{direct} vs {kpp}");
    }

    #[test]
    fn series_start_slope(p in params(), w0p in 1e-3..0.5f64, eps in 1e-7..1e-5f64) {
        if let Ok(s) = series_start(&p, w0p, eps) {
            prop_assert!((s.wp / w0p - 1.0).abs() < 1e-6);
            prop_assert!((s.w / (w0p * eps) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::array::uniform7(prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL), 1..20)) {
        let samples: Vec<_> = rows
            .iter()
            .map(|v| helfrich::analysis::GeometrySample {
                r: v[0], z: v[1], w: v[2], kappa_m: v[3], kappa_l: v[4], h: v[5], k: v[6], eta: None,
            })
            .collect();
        let back = parse_profile(&profile_to_string(&samples)).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            for i in 0..7 {
                prop_assert_eq!(a[i].to_bits(), b[i].to_bits());
            }
        }
    }

    #[test]
    fn config_precedence(
        mask_flag in prop::array::uniform6(any::<bool>()),
        mask_file in prop::array::uniform6(any::<bool>()),
        vals in prop::array::uniform6(1.5..3.0f64),
    ) {
        // six keys: c0, lambda, p, w0p, rel-tol, w-switch; flag values are
        // vals, file values vals + 1, defaults from the built-in layer
        let layer = |m: [bool; 6], off: f64| ConfigLayer {
            c0: m[0].then_some(vals[0] + off),
            lambda: m[1].then_some(vals[1] + off),
            p: m[2].then_some(vals[2] + off),
            w0p: m[3].then_some(vals[3] + off),
            rel_tol: m[4].then_some((vals[4] + off) * 1e-9),
            w_switch: m[5].then_some(vals[5] + off + 10.0),
            ..Default::default()
        };
        let defaults = ConfigLayer::defaults(None);
        let cfg = RunConfig::layered(layer(mask_flag, 0.0), Some(layer(mask_file, 1.0)), defaults.clone()).unwrap();
        let pick = |i: usize, d: f64| if mask_flag[i] { vals[i] } else if mask_file[i] { vals[i] + 1.0 } else { d };
        prop_assert_eq!(cfg.params.c0, pick(0, defaults.c0.unwrap()));
        prop_assert_eq!(cfg.params.lambda, pick(1, defaults.lambda.unwrap()));
        prop_assert_eq!(cfg.params.p, pick(2, defaults.p.unwrap()));
        prop_assert_eq!(cfg.w0p, pick(3, defaults.w0p.unwrap()));
        let rel = if mask_flag[4] { vals[4] * 1e-9 } else if mask_file[4] { (vals[4] + 1.0) * 1e-9 } else { defaults.rel_tol.unwrap() };
        prop_assert_eq!(cfg.solver.rel_tol, rel);
        let ws = if mask_flag[5] { vals[5] + 10.0 } else if mask_file[5] { vals[5] + 1.0 + 10.0 } else { defaults.w_switch.unwrap() };
        prop_assert_eq!(cfg.solver.w_switch, ws);
    }

    #[test]
    fn mirrored_curve_is_symmetric(ys in prop::collection::vec(0.0..1.0f64, 3..30)) {
        let m = ys.len();
        let half: Vec<(f64, f64)> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (i as f64, if i + 1 == m { 0.0 } else { y + 0.1 }))
            .collect();
        let closed = mirror_closed(&half);
        prop_assert_eq!(closed.len(), 4 * m - 4);
        for &(x, y) in &closed {
            prop_assert!(closed.contains(&(-x, y)) && closed.contains(&(x, -y)));
        }
    }

    #[test]
    fn mesh_is_closed_sphere(m in 2usize..20, n_theta in 3usize..40) {
        let half: Vec<(f64, f64)> = (0..=m)
            .map(|j| {
                let t = std::f64::consts::FRAC_PI_2 * j as f64 / m as f64;
                (t.sin(), 0.5 * t.cos())
            })
            .collect();
        let mesh = revolve(&half, n_theta);
        prop_assert_eq!(mesh.vertices.len(), n_theta * (2 * m - 1) + 2);
        prop_assert_eq!(mesh.euler_characteristic(), 2);
        prop_assert!(mesh.volume() > 0.0);
    }
}

#[test]
fn format_names_parse() {
    assert_eq!("obj".parse::<Format>().unwrap(), Format::Obj);
    assert!("png".parse::<Format>().is_err());
}
