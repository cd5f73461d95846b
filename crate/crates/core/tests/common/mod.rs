#![allow(dead_code)]

use lowthrust_mpc::coords::{
    cart_to_geqoe, cart_to_mean, kep_to_cart, kep_to_equinoctial, KeplerianElements,
};
use lowthrust_mpc::dynamics::{Propagator, SpacecraftConfig};
use lowthrust_mpc::tracker::{build_segment_problem, SegmentGuess, SegmentProblem, TrackMode};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn spacecraft() -> SpacecraftConfig {
    SpacecraftConfig {
        m0: 800.0,
        t_max: 0.06,
        isp: 1300.0,
        g0: 9.80665,
        duty_cycle: 0.5,
        cd: 2.2,
        area: 0.01,
    }
}

/// A small random segment: random LEO orbit, 4 to 12 steps, random gate
/// pattern, random guess thrust and a target a few hundred metres and a few
/// millidegrees away.
pub fn random_segment(seed: u64) -> SegmentProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prop = Propagator::low_fidelity(&spacecraft());
    let body = prop.model.conversion_body();
    let kep = KeplerianElements::osculating(
        rng.random_range(6650.0..7200.0),
        rng.random_range(0.0005..0.008),
        rng.random_range(0.4..2.9),
        rng.random_range(0.0..6.28),
        rng.random_range(0.0..6.28),
        rng.random_range(0.0..6.28),
    );
    let x0 = kep_to_cart(&kep, body.mu, 0.0);
    let steps = rng.random_range(4..=12usize);
    let dt = rng.random_range(120.0..300.0);
    let amax = prop.cfg.max_accel(800.0);
    let mut eta: Vec<f64> = (0..steps)
        .map(|_| if rng.random_bool(0.8) { 1.0 } else { 0.0 })
        .collect();
    eta[0] = 1.0;
    let accels: Vec<Vector3<f64>> = eta
        .iter()
        .map(|&e| {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            v.normalize() * e * amax * rng.random_range(0.0..0.9)
        })
        .collect();
    let t: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let mut states = vec![x0];
    let mut masses = vec![800.0];
    for k in 0..steps {
        let (x1, m1) = prop.step_fixed(&states[k], masses[k], dt, &accels[k]);
        states.push(x1);
        masses.push(m1);
    }
    let geqoe = states
        .iter()
        .map(|x| cart_to_geqoe(x, &body).unwrap().to_scaled(&body))
        .collect();
    let guess = SegmentGuess {
        t,
        states,
        geqoe,
        accels,
        masses,
        eta,
    };
    let mut end = cart_to_mean(guess.states.last().unwrap(), &body).unwrap();
    end.a += rng.random_range(-0.5..0.5);
    end.i += rng.random_range(-5e-5..5e-5);
    end.raan += rng.random_range(-5e-5..5e-5);
    end.e = 0.0;
    let mode = if rng.random_bool(0.75) {
        TrackMode::Full
    } else {
        TrackMode::SemiMajorAxis
    };
    let mut p =
        build_segment_problem(&guess, kep_to_equinoctial(&end).unwrap(), mode, &prop).unwrap();
    p.dv_prime_weight = rng.random_range(1.2..3.0);
    p
}

/// Bounds on the optimum of
///
///   min Σ c_k ‖a_k‖ + w ‖r(a)‖,  ‖a_k‖ ≤ b_k,
///
/// with `r` the affine terminal Δv′ vector, from its three-dimensional dual
///
///   max_{‖λ‖ ≤ w}  λ·d − Σ b_k (‖N_kᵀ λ‖ − c_k)₊ ,
///
/// solved by the central-cut ellipsoid method. `N_k` and `d` are read off
/// `dv_prime_vector` by unit perturbations. Returns `(lower, upper)`: the
/// best dual value and a certified upper bound on the dual optimum.
pub fn dual_bounds(p: &SegmentProblem) -> (f64, f64) {
    let n = p.steps();
    let zero = vec![Vector3::zeros(); n];
    let d = p.dv_prime_vector(&zero);
    let unit = 1e-7;
    let blocks: Vec<Matrix3<f64>> = (0..n)
        .map(|k| {
            let mut m = Matrix3::zeros();
            for j in 0..3 {
                let mut a = zero.clone();
                a[k][j] = unit;
                m.set_column(j, &((p.dv_prime_vector(&a) - d) / unit));
            }
            m
        })
        .collect();
    let c: Vec<f64> = (0..n).map(|k| p.dt(k) * 1e3).collect();
    let w = p.dv_prime_weight;

    let value_grad = |l: &Vector3<f64>| {
        let mut v = l.dot(&d);
        let mut g = d;
        for k in 0..n {
            let q = blocks[k].transpose() * l;
            let qn = q.norm();
            if qn > c[k] && p.bounds[k] > 0.0 {
                v -= p.bounds[k] * (qn - c[k]);
                g -= blocks[k] * q * (p.bounds[k] / qn);
            }
        }
        (v, g)
    };

    let mut centre = Vector3::zeros();
    let mut shape = Matrix3::identity() * (w * w);
    let (mut best, _) = value_grad(&centre);
    let mut upper = f64::INFINITY;
    let nn = 3.0;
    for _ in 0..6000 {
        // Cut direction pointing away from the kept half-space.
        let cut = if centre.norm() > w {
            centre
        } else {
            let (v, g) = value_grad(&centre);
            best = best.max(v);
            let spread = (g.transpose() * shape * g)[0].max(0.0).sqrt();
            upper = upper.min(v + spread);
            if spread <= 1e-13 * (1.0 + v.abs()) {
                break;
            }
            -g
        };
        let pg = shape * cut;
        let denom = (cut.transpose() * pg)[0];
        if !(denom > 0.0) {
            break;
        }
        let gt = pg / denom.sqrt();
        centre -= gt / (nn + 1.0);
        shape = (shape - gt * gt.transpose() * (2.0 / (nn + 1.0))) * (nn * nn / (nn * nn - 1.0));
        shape = (shape + shape.transpose()) * 0.5;
    }
    (best, upper)
}
