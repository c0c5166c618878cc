mod common;

use common::{random_instance, unit_cfg};
use ofdm_energy::temin::{
    bs_energy_gradient, solve_p2, solve_slot, solve_temin, solve_temin_tmax, v_of_t, SlotWeights,
    TimeChoice,
};
use ofdm_energy::{ChannelMatrix, DemandVector, Error};
use ndarray::array;

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn single_pair(f: f64, q: f64, p_avg: f64, p_tc: f64) -> (f64, f64) {
    let v = |t: f64| (2f64.powf(q / t) - 1.0) / f;
    let energy = |t: f64| t * v(t) + p_tc * t;
    // Work in log T so the bracket can be wide.
    let ln_t = golden(-10.0, 10.0, |x| energy(x.exp()));
    let mut t = ln_t.exp();
    if v(t) > p_avg {
        // Power limit binds: smallest T with v(T) = P_avg.
        t = q / (1.0 + f * p_avg).log2();
    }
    (t, energy(t))
}

#[test]
fn single_pair_matches_golden_section() {
    for &(f, q, p_avg, p_tc) in &[
        (2.0, 3.0, 100.0, 1.0),
        (0.5, 1.0, 100.0, 0.2),
        (1.0, 4.0, 3.0, 5.0),
        (4.0, 2.0, 0.5, 10.0),
    ] {
        let cfg = unit_cfg(1, p_avg, p_tc);
        let chan = ChannelMatrix::new(array![[f]], &cfg).unwrap();
        let demand = DemandVector::new(vec![q]).unwrap();
        let res = solve_temin(&cfg, &chan, &demand).unwrap();
        let (t_ref, e_ref) = single_pair(f, q, p_avg, p_tc);
        assert!((res.slot.duration - t_ref).abs() < 1e-6 * t_ref, "{f} {q}: {} vs {t_ref}", res.slot.duration);
        assert!((res.report.bs_energy - e_ref).abs() < 1e-8 * e_ref, "{} vs {e_ref}", res.report.bs_energy);
    }
}

#[test]
fn gradient_matches_finite_difference() {
    let cfg = unit_cfg(3, 1e6, 0.7);
    let (chan, demand) = random_instance(5, 3, 6, &cfg);
    let energy = |t: f64| t * solve_p2(&cfg, &chan, &demand, t).unwrap().v + cfg.p_tc() * t;
    for &t in &[0.5, 1.0, 2.0, 4.0] {
        let (v, cert) = v_of_t(&cfg, &chan, &demand, t).unwrap();
        let g = bs_energy_gradient(&cfg, &demand, t, v, &cert);
        let h = 1e-4 * t;
        let fd = (energy(t + h) - energy(t - h)) / (2.0 * h);
        assert!((g - fd).abs() < 1e-5 * (1.0 + fd.abs()), "T={t}: {g} vs {fd}");
    }
}

#[test]
fn energy_convex_and_power_decreasing_in_t() {
    let cfg = unit_cfg(3, 1e6, 0.7);
    let (chan, demand) = random_instance(9, 3, 6, &cfg);
    let ts: Vec<f64> = (0..12).map(|i| 0.25 * 1.3f64.powi(i)).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| solve_p2(&cfg, &chan, &demand, t).unwrap().v).collect();
    for w in vs.windows(2) {
        assert!(w[1] < w[0]);
    }
    let e = |t: f64| t * solve_p2(&cfg, &chan, &demand, t).unwrap().v;
    for w in ts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        assert!(e(mid) <= 0.5 * (e(w[0]) + e(w[1])) * (1.0 + 1e-9));
    }
}

#[test]
fn stationary_or_power_limited_at_optimum() {
    for seed in 0..4 {
        for &p_avg in &[1e6, 2.0] {
            let cfg = unit_cfg(2, p_avg, 1.0);
            let (chan, demand) = random_instance(seed, 2, 4, &cfg);
            let res = solve_temin(&cfg, &chan, &demand).unwrap();
            let s = &res.slot;
            match s.choice {
                TimeChoice::Stationary => assert!(s.gradient.abs() < 1e-6, "{}", s.gradient),
                TimeChoice::PowerLimited => {
                    assert!(s.p2.v <= p_avg * (1.0 + 1e-12));
                    assert!(s.p2.v > p_avg * (1.0 - 1e-6));
                    assert!(s.gradient < 0.0);
                }
                TimeChoice::TimeLimited => panic!("no time limit set"),
            }
        }
    }
}

#[test]
fn time_limit_binds_or_is_infeasible() {
    let cfg = unit_cfg(2, 1e6, 0.1);
    let (chan, demand) = random_instance(3, 2, 4, &cfg);
    let free = solve_temin(&cfg, &chan, &demand).unwrap();
    let t_free = free.slot.duration;

    let tight = cfg.with_t_max(Some(0.5 * t_free)).unwrap();
    let res = solve_temin_tmax(&tight, &chan, &demand).unwrap();
    assert_eq!(res.slot.choice, TimeChoice::TimeLimited);
    assert_eq!(res.slot.duration, 0.5 * t_free);
    assert!(res.report.bs_energy >= free.report.bs_energy);

    let loose = cfg.with_t_max(Some(2.0 * t_free)).unwrap();
    let res = solve_temin_tmax(&loose, &chan, &demand).unwrap();
    assert!((res.slot.duration - t_free).abs() < 1e-8 * t_free);

    let low_power = unit_cfg(2, 0.01, 0.1).with_t_max(Some(1e-3)).unwrap();
    let fastest = SlotWeights {
        tx_weight: 0.0,
        const_power: 1.0,
    };
    let t_min = solve_slot(&low_power, &chan, &demand, fastest, None).unwrap().duration;
    assert!(t_min > 1e-3);
    match solve_temin_tmax(&low_power, &chan, &demand) {
        Err(Error::Infeasible { diagnostic, .. }) => {
            assert!((diagnostic - t_min).abs() < 1e-8 * t_min, "{diagnostic} vs {t_min}")
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn zero_circuit_power_has_no_finite_optimum() {
    let cfg = unit_cfg(1, 1e6, 0.0);
    let chan = ChannelMatrix::new(array![[1.0, 2.0]], &cfg).unwrap();
    let demand = DemandVector::new(vec![2.0]).unwrap();
    assert!(matches!(solve_temin(&cfg, &chan, &demand), Err(Error::Domain(_))));
}

#[test]
fn receiver_only_weights_go_to_power_limit() {
    let cfg = unit_cfg(2, 3.0, 1.0);
    let (chan, demand) = random_instance(1, 2, 4, &cfg);
    let w = SlotWeights {
        tx_weight: 0.0,
        const_power: 1.0,
    };
    let s = solve_slot(&cfg, &chan, &demand, w, None).unwrap();
    assert_eq!(s.choice, TimeChoice::PowerLimited);
    assert!(s.p2.v <= 3.0 && s.p2.v > 3.0 * (1.0 - 1e-6));
}
