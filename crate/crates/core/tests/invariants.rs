mod common;

use lowthrust_mpc::constants::{MU_EARTH, TWO_PI};
use lowthrust_mpc::coords::{kep_to_cart, CartesianState, EquinoctialElements, KeplerianElements};
use lowthrust_mpc::dynamics::{gate_margin, Propagator};
use lowthrust_mpc::guidance::{
    apply_thrust_errors, read_csv, GuidanceLog, NodeRecord, TerminalSummary, ThrustErrorModel,
};
use lowthrust_mpc::reference::EdelbaumLeg;
use lowthrust_mpc::tracker::{delta_v_prime, TrackMode};
use nalgebra::Vector3;
use proptest::prelude::*;

/// Measure of `{u ∈ [0, 2π): margin(u) ≥ 0}` from sign changes located by
/// bisection on a fine grid.
pub fn thrust_on_fraction(margin: impl Fn(f64) -> f64) -> f64 {
    let n = 3600;
    let h = TWO_PI / n as f64;
    let mut on = 0.0;
    for j in 0..n {
        let (u0, u1) = (j as f64 * h, (j + 1) as f64 * h);
        let (m0, m1) = (margin(u0), margin(u1));
        if (m0 >= 0.0) == (m1 >= 0.0) {
            if m0 >= 0.0 {
                on += h;
            }
            continue;
        }
        let (mut lo, mut hi) = (u0, u1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (margin(mid) >= 0.0) == (m0 >= 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        on += if m0 >= 0.0 { s - u0 } else { u1 - s };
    }
    on / TWO_PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_duty_fraction_equals_dc(l_c in 0.0..TWO_PI, dc in 0.05..1.0f64) {
        let f = thrust_on_fraction(|u| gate_margin(u, l_c, dc));
        prop_assert!((f - dc).abs() < 1e-6, "fraction {f} vs {dc}");
    }

    #[test]
    fn edelbaum_is_symmetric(a0 in 6600.0..7600.0f64, af in 6600.0..7600.0f64, i0 in 0.5..2.5f64, di in -0.2..0.2f64) {
        let fwd = EdelbaumLeg::new(a0, i0, af, i0 + di, MU_EARTH).unwrap().dv;
        let back = EdelbaumLeg::new(af, i0 + di, a0, i0, MU_EARTH).unwrap().dv;
        prop_assert!((fwd - back).abs() <= 1e-12 * fwd.max(1e-9));
    }

    #[test]
    fn edelbaum_grows_with_plane_change(a0 in 6600.0..7000.0f64, da in -300.0..300.0f64, di in 1e-4..0.1f64, s in 1.01..2.0f64) {
        let dv = |di: f64| EdelbaumLeg::new(a0, 1.7, a0 + da, 1.7 + di, MU_EARTH).unwrap().dv;
        prop_assert!(dv(di * s) > dv(di));
    }

    #[test]
    fn edelbaum_grows_with_altitude_gap(a0 in 6600.0..7000.0f64, da in 1.0..400.0f64, di in 0.0..0.1f64, s in 1.01..2.0f64) {
        // Lowering: always monotone. Raising: monotone without plane change.
        let lower = |da: f64| EdelbaumLeg::new(a0, 1.7, a0 - da, 1.7 + di, MU_EARTH).unwrap().dv;
        prop_assert!(lower(da * s) > lower(da));
        let raise = |da: f64| EdelbaumLeg::new(a0, 1.7, a0 + da, 1.7, MU_EARTH).unwrap().dv;
        prop_assert!(raise(da * s) > raise(da));
    }

    #[test]
    fn dv_prime_is_homogeneous(a in 6700.0..7100.0f64, f in -0.004..0.004f64, g in -0.004..0.004f64,
                               h in -1.2..1.2f64, k in -1.2..1.2f64,
                               da in -5.0..5.0f64, dh in -1e-3..1e-3f64, dk in -1e-3..1e-3f64, lambda in 0.1..4.0f64) {
        let e2 = f * f + g * g;
        let current = EquinoctialElements { p: a * (1.0 - e2), f, g, h, k, l: 0.3 };
        let shifted = |s: f64| EquinoctialElements { p: (a + s * da) * (1.0 - e2), f, g, h: h + s * dh, k: k + s * dk, l: 0.3 };
        let (_, base) = delta_v_prime(&current, &shifted(1.0), MU_EARTH, TrackMode::Full);
        let (_, scaled) = delta_v_prime(&current, &shifted(lambda), MU_EARTH, TrackMode::Full);
        prop_assert!((scaled - lambda * base).abs() <= 1e-9 * (lambda * base).max(1e-12));
        let (_, zero) = delta_v_prime(&current, &current, MU_EARTH, TrackMode::Full);
        prop_assert!(zero.abs() < 1e-12);
    }

    #[test]
    fn mass_never_increases(ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in -1.0..1.0f64, scale in 0.0..1.0f64, dt in 10.0..300.0f64) {
        let prop = Propagator::low_fidelity(&common::spacecraft());
        let x0 = kep_to_cart(&KeplerianElements::osculating(6900.0, 0.002, 1.7, 0.2, 0.1, 0.4), MU_EARTH, 0.0);
        let dir = Vector3::new(ax, ay, az);
        let a = if dir.norm() > 1e-9 { dir.normalize() * scale * prop.cfg.max_accel(800.0) } else { Vector3::zeros() };
        let (_, m1) = prop.step_fixed(&x0, 800.0, dt, &a);
        if a.norm() == 0.0 {
            prop_assert_eq!(m1, 800.0);
        } else {
            prop_assert!(m1 < 800.0);
        }
    }

    #[test]
    fn thrust_errors_are_reproducible_and_bounded_by_sign(seed in 0u64..1000, segment in 0usize..50,
                                                          sigma_t in 0.0..0.2f64, p in 0.0..0.5f64) {
        let model = ThrustErrorModel { p_misthrust: p, sigma_t, sigma_beta: 0.1, seed, forced_off_segments: 0 };
        let planned: Vec<Vector3<f64>> = (0..8).map(|j| Vector3::new(0.0, 1e-7, 2e-8 * j as f64)).collect();
        let a = apply_thrust_errors(&planned, &model, segment);
        let b = apply_thrust_errors(&planned, &model, segment);
        prop_assert_eq!(&a.accels, &b.accels);
        prop_assert_eq!(a.misthrust, b.misthrust);
        if a.misthrust {
            prop_assert!(a.accels.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn csv_round_trips(values in proptest::collection::vec(proptest::array::uniform13(-1e4..1e4f64), 1..20)) {
        let nodes: Vec<NodeRecord> = values
            .iter()
            .map(|v| NodeRecord {
                t: v[0].abs(),
                state: CartesianState::new(Vector3::new(v[1], v[2], v[3]), Vector3::new(v[4], v[5], v[6]), v[0].abs()),
                mass: v[7].abs(),
                accel: Vector3::new(v[8], v[9], v[10]) * 1e-12,
                eta: v[11].signum().max(0.0),
                dv_cum: v[12].abs(),
            })
            .collect();
        let log = GuidanceLog {
            nodes,
            segments: vec![],
            references: vec![],
            recompute_times: vec![],
            summary: TerminalSummary {
                da_km: 0.0,
                di_deg: None,
                draan_deg: None,
                tof_days: 0.0,
                dv_ms: 0.0,
                dv_prime_ms: 0.0,
                final_mass: 0.0,
                recomputations: 0,
                segments: 0,
            },
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), log.nodes.len());
        for (x, y) in back.iter().zip(&log.nodes) {
            let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * q.abs().max(f64::MIN_POSITIVE);
            prop_assert!(close(x.t, y.t) && close(x.mass, y.mass) && close(x.eta, y.eta) && close(x.dv_cum, y.dv_cum));
            for j in 0..3 {
                prop_assert!(close(x.state.r[j], y.state.r[j]) && close(x.state.v[j], y.state.v[j]) && close(x.accel[j], y.accel[j]));
            }
        }
    }
}

/// Raising the final orbit makes a large plane change cheaper: with
/// `v_f > v_0 cos(πΔi/2)` the total falls as the altitude gap grows.
#[test]
fn edelbaum_raise_with_plane_change_is_not_monotone() {
    let dv = |da: f64| {
        EdelbaumLeg::new(6600.0, 1.7, 6600.0 + da, 1.78, MU_EARTH)
            .unwrap()
            .dv
    };
    assert!(dv(1.01) < dv(1.0));
    assert!(dv(400.0) > dv(1.0));
}

#[test]
fn gate_fraction_at_listed_duty_cycles() {
    for dc in [0.3, 0.4, 0.5, 1.0] {
        for l_c in [0.0, 1.0, 2.5, 4.0] {
            let f = thrust_on_fraction(|u| gate_margin(u, l_c, dc));
            assert!((f - dc).abs() < 1e-6, "dc {dc} l_c {l_c}: {f}");
        }
    }
}
