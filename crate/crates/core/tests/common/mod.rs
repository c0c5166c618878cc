#![allow(dead_code)]

use ndarray::Array2;
use ofdm_energy::{ChannelMatrix, DemandVector, SystemConfig, SystemParams, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `W = 1`, `Γ N0 W = 1`, so normalized gains equal raw gains.
pub fn unit_cfg(k: usize, p_avg: f64, p_tc: f64) -> SystemConfig<f64> {
    SystemConfig::new(SystemParams {
        bandwidth_hz: 1.0,
        noise_psd_w_per_hz: 1.0,
        snr_gap: 1.0,
        p_avg_w: p_avg,
        p_tc_w: p_tc,
        p_rc_w: 0.5,
        alpha0: 1.0,
        alphas: vec![1.0; k],
        t_max_s: None,
        tol: Tolerances::default(),
    })
    .unwrap()
}

pub fn random_instance(
    seed: u64,
    k: usize,
    n: usize,
    cfg: &SystemConfig<f64>,
) -> (ChannelMatrix<f64>, DemandVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gains = Array2::from_shape_fn((k, n), |_| {
        // Exponential-like spread over two decades.
        10f64.powf(rng.gen_range(-1.0..1.0))
    });
    let bits = (0..k).map(|_| rng.gen_range(0.5..3.0)).collect();
    (
        ChannelMatrix::new(gains, cfg).unwrap(),
        DemandVector::new(bits).unwrap(),
    )
}

/// Power needed to carry `rate` (bits/s at `W = 1`) on gains `f` by
/// bisection on the water level.
pub fn waterfill_power(f: &[f64], rate: f64) -> f64 {
    let rate_at = |w: f64| -> f64 { f.iter().map(|&g| (w * g).log2().max(0.0)).sum() };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while rate_at(hi) < rate {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let w = 0.5 * (lo + hi);
        if rate_at(w) > rate {
            hi = w;
        } else {
            lo = w;
        }
    }
    let w = 0.5 * (lo + hi);
    f.iter().map(|&g| (w - 1.0 / g).max(0.0)).sum()
}

/// Best exclusive subcarrier assignment (no time sharing), by enumeration.
pub fn best_exclusive_assignment(gains: &Array2<f64>, rates: &[f64]) -> f64 {
    let (k, n) = gains.dim();
    let total = k.pow(n as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut owner = vec![0usize; n];
        let mut c = code;
        for o in owner.iter_mut() {
            *o = c % k;
            c /= k;
        }
        let mut v = 0.0;
        let mut ok = true;
        for kk in 0..k {
            let f: Vec<f64> = (0..n).filter(|&nn| owner[nn] == kk).map(|nn| gains[[kk, nn]]).collect();
            if f.is_empty() {
                ok = false;
                break;
            }
            v += waterfill_power(&f, rates[kk]);
        }
        if ok {
            best = best.min(v);
        }
    }
    best
}
