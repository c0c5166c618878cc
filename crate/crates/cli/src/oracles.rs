//! Reference computations that share no code with the solvers. The
//! acceptance runner compares solver output against these.

use ndarray::Array2;
use ofdm_energy::{
    Allocation, ChannelMatrix, DemandVector, DualBeta, DualCertificate, SystemConfig,
    SystemParams, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Receiver-energy D-TDMA problem in raw form: minimize `sum_k cost_k t_k`
/// over bit loads `s_{k,n} >= 0` and on-times `t_k > 0` subject to
/// `sum_n s_{k,n} >= q_k` and
/// `sum_k t_k sum_n (e^{a s/t} - 1) / f <= p_avg sum_k t_k`.
#[derive(Clone, Debug)]
pub struct TdmaProblem {
    pub f: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub cost: Vec<f64>,
    pub a: f64,
    pub p_avg: f64,
}

impl TdmaProblem {
    pub fn from_instance(
        cfg: &SystemConfig<f64>,
        chan: &ChannelMatrix<f64>,
        demand: &DemandVector<f64>,
    ) -> Self {
        Self {
            f: (0..chan.k()).map(|k| chan.f_row(k).to_vec()).collect(),
            q: demand.bits().to_vec(),
            cost: cfg.alphas().iter().map(|&a| a * cfg.p_rc()).collect(),
            a: std::f64::consts::LN_2 / cfg.w(),
            p_avg: cfg.p_avg(),
        }
    }

    fn k(&self) -> usize {
        self.q.len()
    }

    fn n(&self) -> usize {
        self.f[0].len()
    }

    /// Power constraint value `g`; positive means violated.
    fn constraint(&self, t: &[f64], s: &[Vec<f64>]) -> f64 {
        let mut g = 0.0;
        for k in 0..self.k() {
            let mut p = 0.0;
            for n in 0..self.n() {
                p += (self.a * s[k][n] / t[k]).exp_m1() / self.f[k][n];
            }
            g += t[k] * (p - self.p_avg);
        }
        g
    }

    fn constraint_grad(&self, t: &[f64], s: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (kk, nn) = (self.k(), self.n());
        let mut gt = vec![-self.p_avg; kk];
        let mut gs = vec![vec![0.0; nn]; kk];
        for k in 0..kk {
            for n in 0..nn {
                let x = self.a * s[k][n] / t[k];
                let e = x.exp();
                gs[k][n] = self.a * e / self.f[k][n];
                gt[k] += (e - 1.0 - x * e) / self.f[k][n];
            }
        }
        (gt, gs)
    }
}

#[derive(Clone, Debug)]
pub struct TdmaReference {
    pub objective: f64,
    pub on_time: Vec<f64>,
    pub bits: Vec<Vec<f64>>,
    /// Power constraint residual over `p_avg sum t` (positive = violated).
    pub violation: f64,
    pub iterations: usize,
}

/// Euclidean projection onto `{x >= 0, sum x = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let th = (cum - total) / (i + 1) as f64;
        if x - th > 0.0 {
            theta = th;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

const T_FLOOR: f64 = 1e-12;

struct Point {
    t: Vec<f64>,
    s: Vec<Vec<f64>>,
}

impl Point {
    fn flat(&self) -> Vec<f64> {
        let mut out = self.t.clone();
        for row in &self.s {
            out.extend_from_slice(row);
        }
        out
    }
}

/// Augmented-Lagrangian method on the single power constraint, each inner
/// problem solved by projected gradient with Barzilai-Borwein steps and
/// Armijo backtracking. Demand rows are kept tight by projecting each
/// terminal's bit loads onto a scaled simplex.
pub fn tdma_reference(p: &TdmaProblem) -> TdmaReference {
    let (kk, nn) = (p.k(), p.n());
    let mut x = Point {
        t: vec![1.0; kk],
        s: p.q.iter().map(|&q| vec![q / nn as f64; nn]).collect(),
    };
    // Start strictly feasible: stretch all slots until the power fits.
    let mut scale = 1e-3;
    loop {
        let t: Vec<f64> = x.t.iter().map(|_| scale).collect();
        if p.constraint(&t, &x.s) < 0.0 {
            x.t = t;
            break;
        }
        scale *= 2.0;
    }

    let lagr = |pt: &Point, mu: f64, rho: f64| -> f64 {
        let g = p.constraint(&pt.t, &pt.s);
        let obj: f64 = pt.t.iter().zip(&p.cost).map(|(t, c)| t * c).sum();
        let h = (mu + rho * g).max(0.0);
        obj + (h * h - mu * mu) / (2.0 * rho)
    };
    let grad = |pt: &Point, mu: f64, rho: f64| -> Vec<f64> {
        let g = p.constraint(&pt.t, &pt.s);
        let h = (mu + rho * g).max(0.0);
        let (gt, gs) = p.constraint_grad(&pt.t, &pt.s);
        let mut out: Vec<f64> = (0..kk).map(|k| p.cost[k] + h * gt[k]).collect();
        for row in gs {
            out.extend(row.into_iter().map(|v| h * v));
        }
        out
    };
    let project = |flat: &[f64]| -> Point {
        let t = flat[..kk].iter().map(|&v| v.max(T_FLOOR)).collect();
        let s = (0..kk)
            .map(|k| project_simplex(&flat[kk + k * nn..kk + (k + 1) * nn], p.q[k]))
            .collect();
        Point { t, s }
    };

    let obj_scale: f64 = x.t.iter().zip(&p.cost).map(|(t, c)| t * c).sum();
    let mut mu = 0.0;
    let mut rho = 10.0 / obj_scale.max(1e-300);
    let mut iterations = 0;
    let mut prev_g = f64::INFINITY;
    for _outer in 0..80 {
        let mut step = 1e-3;
        let mut last: Option<(Vec<f64>, Vec<f64>)> = None;
        for _inner in 0..20_000 {
            iterations += 1;
            let xf = x.flat();
            let gr = grad(&x, mu, rho);
            if let Some((px, pg)) = &last {
                let ds: Vec<f64> = xf.iter().zip(px).map(|(a, b)| a - b).collect();
                let dg: Vec<f64> = gr.iter().zip(pg).map(|(a, b)| a - b).collect();
                let ss: f64 = ds.iter().map(|v| v * v).sum();
                let sy: f64 = ds.iter().zip(&dg).map(|(a, b)| a * b).sum();
                step = if sy > 0.0 { (ss / sy).clamp(1e-12, 1e6) } else { step * 2.0 };
            }
            let l0 = lagr(&x, mu, rho);
            let mut accepted = None;
            let mut alpha = step;
            for _ in 0..60 {
                let trial: Vec<f64> = xf.iter().zip(&gr).map(|(v, g)| v - alpha * g).collect();
                let cand = project(&trial);
                let lc = lagr(&cand, mu, rho);
                let dec: f64 = cand
                    .flat()
                    .iter()
                    .zip(&xf)
                    .zip(&gr)
                    .map(|((c, v), g)| g * (c - v))
                    .sum();
                if lc.is_finite() && lc <= l0 + 1e-4 * dec {
                    accepted = Some(cand);
                    break;
                }
                alpha *= 0.5;
            }
            let Some(next) = accepted else { break };
            let moved = next
                .flat()
                .iter()
                .zip(&xf)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1e-3))
                .fold(0.0, f64::max);
            last = Some((xf, gr));
            x = next;
            if moved < 1e-13 {
                break;
            }
        }
        let g = p.constraint(&x.t, &x.s);
        mu = (mu + rho * g).max(0.0);
        let scale: f64 = p.p_avg * x.t.iter().sum::<f64>();
        if g.abs() <= 1e-12 * scale {
            break;
        }
        if g.abs() > 0.25 * prev_g {
            rho *= 10.0;
        }
        prev_g = g.abs();
    }
    let g = p.constraint(&x.t, &x.s);
    TdmaReference {
        objective: x.t.iter().zip(&p.cost).map(|(t, c)| t * c).sum(),
        violation: g / (p.p_avg * x.t.iter().sum::<f64>()),
        on_time: x.t,
        bits: x.s,
        iterations,
    }
}

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
pub fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
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

/// One terminal on one subcarrier: minimize `T p(T) + p_tc T` with
/// `p(T) = (2^{q/(W T)} - 1) / f <= p_avg`. Returns `(T, energy)`.
pub fn single_pair_energy(f: f64, q: f64, w: f64, p_avg: f64, p_tc: f64) -> (f64, f64) {
    let p = |t: f64| (2f64.powf(q / (w * t)) - 1.0) / f;
    let energy = |t: f64| t * p(t) + p_tc * t;
    let t_min = q / (w * (1.0 + f * p_avg).log2());
    // The energy is convex in T; search in log T above the power limit.
    let x = golden_section(t_min.ln(), t_min.ln() + 40.0, |x| energy(x.exp()));
    let t = x.exp().max(t_min);
    (t, energy(t))
}

/// Dual value of the fixed-frame OFDMA problem at a certificate, from the
/// Lagrangian minimized in closed form per pair:
/// `sum_k λ_k c_k - sum_n β_n + sum_{k,n} min(0, β_n - φ_{k,n})` with
/// `φ = w ln(w f) - w + 1/f` for water level `w = λ/a` above `1/f`.
pub fn ofdma_dual_value(
    cfg: &SystemConfig<f64>,
    chan: &ChannelMatrix<f64>,
    demand: &DemandVector<f64>,
    t: f64,
    cert: &DualCertificate<f64>,
) -> f64 {
    let a = std::f64::consts::LN_2 / cfg.w();
    let beta = match &cert.beta {
        DualBeta::PerSubcarrier(b) => b.clone(),
        DualBeta::Scalar(b) => vec![*b; chan.n()],
    };
    let mut d = 0.0;
    for k in 0..chan.k() {
        d += cert.lambda[k] * demand.bits()[k] / t;
    }
    for n in 0..chan.n() {
        d -= beta[n];
        for k in 0..chan.k() {
            let w = cert.lambda[k] / a;
            let f = chan.f(k, n);
            let phi = if w * f > 1.0 { w * (w * f).ln() - w + 1.0 / f } else { 0.0 };
            d += (beta[n] - phi).min(0.0);
        }
    }
    d
}

/// Unit-scale configuration (`W = 1`, `Γ N0 W = 1`) with the given weights.
pub fn unit_config(
    alphas: Vec<f64>,
    p_avg: f64,
    p_tc: f64,
    p_rc: f64,
    alpha0: f64,
) -> SystemConfig<f64> {
    SystemConfig::new(SystemParams {
        bandwidth_hz: 1.0,
        noise_psd_w_per_hz: 1.0,
        snr_gap: 1.0,
        p_avg_w: p_avg,
        p_tc_w: p_tc,
        p_rc_w: p_rc,
        alpha0,
        alphas,
        t_max_s: None,
        tol: Tolerances::default(),
    })
    .expect("unit configuration is valid")
}

/// Small random instance: gains spread over two decades, demands of a few
/// bits, random receiver weights and power budget.
pub fn random_instance(
    seed: u64,
    k: usize,
    n: usize,
) -> (SystemConfig<f64>, ChannelMatrix<f64>, DemandVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = (0..k).map(|_| rng.gen_range(0.5..2.0)).collect();
    let p_avg = 10f64.powf(rng.gen_range(-0.5..1.0));
    let cfg = unit_config(alphas, p_avg, 1.0, 0.5, 1.0);
    let gains = Array2::from_shape_fn((k, n), |_| 10f64.powf(rng.gen_range(-1.0..1.0)));
    let bits = (0..k).map(|_| rng.gen_range(0.5..3.0)).collect();
    (
        cfg.clone(),
        ChannelMatrix::new(gains, &cfg).expect("positive gains"),
        DemandVector::new(bits).expect("positive demand"),
    )
}

/// A random schedule in which at least one subcarrier is time-shared, and
/// the demand it exactly delivers (less a hair, so rounding stays feasible).
pub fn random_shared_allocation(
    rng: &mut impl Rng,
    cfg: &SystemConfig<f64>,
    chan: &ChannelMatrix<f64>,
) -> (Allocation<f64>, DemandVector<f64>) {
    let (k, n) = (chan.k(), chan.n());
    let duration = rng.gen_range(0.5..2.0);
    let mut rho = Array2::zeros((k, n));
    for nn in 0..n {
        let used = rng.gen_range(0.6..1.0);
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = w.iter().sum();
        for kk in 0..k {
            rho[[kk, nn]] = used * w[kk] / sum;
        }
    }
    let mut power = Array2::from_shape_fn((k, n), |_| rng.gen_range(0.1..1.0));
    let avg: f64 = rho.iter().zip(power.iter()).map(|(r, p)| r * p).sum();
    let target = rng.gen_range(0.3..1.0) * cfg.p_avg();
    power.mapv_inplace(|p| p * target / avg);
    let on_time = (0..k)
        .map(|kk| {
            let busy = duration * rho.row(kk).iter().fold(0.0f64, |m, &r| m.max(r));
            rng.gen_range(busy..=duration)
        })
        .collect();
    let alloc = Allocation {
        duration,
        rho,
        power,
        on_time,
        grouping: None,
    };
    let bits = alloc
        .delivered_bits(cfg, chan)
        .into_iter()
        .map(|b| b * (1.0 - 1e-9))
        .collect();
    (alloc, DemandVector::new(bits).expect("positive delivered bits"))
}
