//! Base-station energy minimization under OFDMA.
//!
//! For a fixed frame length `T` the average-power problem over time-sharing
//! factors `ρ` and rate loads `m = ρ r` is convex and separable once the
//! demand rows (multipliers `λ_k`) and the subcarrier rows (`β_n`) are
//! dualized. Per pair the Lagrangian minimum is
//!
//! `min(0, o)`, `o(λ, β) = (λ/a - 1/f)^+ - (λ/a) ln(λ f / a)^+ + β`,
//!
//! attained by `ρ = 1` when `o < 0`. For a given `λ` the best `β_n` is
//! `max_k φ_{k,n}` with `φ = -o|_{β=0} >= 0`, so the dual reduces to the
//! K-dimensional concave function
//!
//! `G(μ) = sum_k a μ_k c_k - sum_n max_k φ_{k,n}(μ_k)`,  `μ = λ / a`,
//!
//! which the ellipsoid method maximizes. The primal is read off the
//! subcarrier winners; shared subcarriers are resolved by a small LP and the
//! per-terminal water levels are then refit so every demand is met exactly.
//!
//! The outer problem over `T` is convex; its derivative is
//! `v(T) - (1/T) sum_k λ_k Q_k + P_tc`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{
    energy_report, validate_allocation, Allocation, ChannelMatrix, DemandVector, DualBeta,
    DualCertificate, EnergyReport, Slot, SystemConfig,
};
use crate::numerics::{ellipsoid_maximize, lp_feasible, EllipsoidSettings, Eval, LinearSystem, LpOutcome};
use crate::scalar::Scalar;

/// Primal residual below which the winner-takes-all assignment is accepted.
const POINTWISE_RESIDUAL: f64 = 1e-6;
/// Initial tie tolerance for shared subcarriers, relative to `1 + β_n` (W).
const TIE_TOL: f64 = 1e-7;
/// Relative duality gap that triggers a retry of the dual solve.
const GAP_RETRY: f64 = 1e-6;
const MAX_T_STEPS: usize = 200;

/// `(λ/a - 1/f)^+ - (λ/a) ln(λ f / a)^+ + β`.
pub fn o_fn<T: Scalar>(cfg: &SystemConfig<T>, f_kn: T, lambda_k: T, beta_n: T) -> T {
    let mu = lambda_k / cfg.a();
    beta_n - phi(mu, f_kn)
}

/// `μ ln(μ f)^+ - (μ - 1/f)^+`, the negated `β`-free part of `o`.
#[inline]
fn phi<T: Scalar>(mu: T, f: T) -> T {
    let x = mu * f;
    if x > T::one() {
        mu * x.ln() - mu + T::one() / f
    } else {
        T::zero()
    }
}

/// Pointwise minimizer of the per-pair Lagrangian: `(m, ρ)`, with `m` in
/// bits/s. Ties (`o == 0`) resolve to `ρ = 0`.
pub fn p2_pointwise<T: Scalar>(cfg: &SystemConfig<T>, f_kn: T, lambda_k: T, beta_n: T) -> (T, T) {
    if o_fn(cfg, f_kn, lambda_k, beta_n) < T::zero() {
        let m = (lambda_k * f_kn / cfg.a()).ln().pos() / cfg.a();
        (m, T::one())
    } else {
        (T::zero(), T::zero())
    }
}

/// Joint dual function `g(λ, β)` with its supergradient in `(λ, β)`.
///
/// `∂g/∂λ_k = c_k - sum_n m_{k,n}` and `∂g/∂β_n = sum_k ρ_{k,n} - 1`; these
/// are the negatives of the subgradients of `-g`.
pub fn p2_dual<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    rates: &[T],
    lambda: &[T],
    beta: &[T],
) -> (T, Vec<T>, Vec<T>) {
    let (k, n) = (chan.k(), chan.n());
    let mut value: T = lambda.iter().zip(rates).map(|(&l, &c)| l * c).sum::<T>()
        - beta.iter().copied().sum::<T>();
    let mut g_l: Vec<T> = rates.to_vec();
    let mut g_b = vec![-T::one(); n];
    for nn in 0..n {
        for kk in 0..k {
            let o = o_fn(cfg, chan.f(kk, nn), lambda[kk], beta[nn]);
            if o < T::zero() {
                value += o;
                let (m, _) = p2_pointwise(cfg, chan.f(kk, nn), lambda[kk], beta[nn]);
                g_l[kk] -= m;
                g_b[nn] += T::one();
            }
        }
    }
    (value, g_l, g_b)
}

/// Reduced dual `G(μ)` and a supergradient in `μ` (water levels, W).
fn reduced_dual<T: Scalar>(
    chan: &ChannelMatrix<T>,
    a_rates: &[T],
    mu: &[T],
    grad: &mut [T],
) -> T {
    let (k, n) = (chan.k(), chan.n());
    let mut value = T::zero();
    for kk in 0..k {
        value += mu[kk] * a_rates[kk];
        grad[kk] = a_rates[kk];
    }
    let norm = chan.normalized();
    for nn in 0..n {
        let mut best = T::zero();
        let mut arg = usize::MAX;
        for kk in 0..k {
            let ph = phi(mu[kk], norm[[kk, nn]]);
            if ph > best {
                best = ph;
                arg = kk;
            }
        }
        if arg != usize::MAX {
            value -= best;
            grad[arg] -= (mu[arg] * norm[[arg, nn]]).ln();
        }
    }
    value
}

/// Water level `μ` with `sum_n ρ_n ln(μ f_n)^+ = target` (closed form over
/// the active set).
fn level_for_rate<T: Scalar>(f: &[T], rho: &[T], target: T) -> Option<T> {
    let mut idx: Vec<usize> = (0..f.len()).filter(|&i| rho[i] > T::zero()).collect();
    if idx.is_empty() {
        return None;
    }
    idx.sort_by(|&i, &j| f[j].partial_cmp(&f[i]).unwrap());
    let mut wsum = T::zero();
    let mut lsum = T::zero();
    let mut ln_mu = T::zero();
    for (pos, &i) in idx.iter().enumerate() {
        wsum += rho[i];
        lsum += rho[i] * f[i].ln();
        ln_mu = (target - lsum) / wsum;
        let next_inactive = idx
            .get(pos + 1)
            .map(|&j| ln_mu + f[j].ln() <= T::zero())
            .unwrap_or(true);
        if next_inactive {
            break;
        }
    }
    Some(ln_mu.exp())
}

/// How the primal point of a P2 solve was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Recovery {
    /// Every subcarrier had a single winner.
    Pointwise,
    /// Shared subcarriers resolved by the feasibility LP with this tie
    /// tolerance (W, relative to `1 + β_n`).
    Lp { tie_tol: f64 },
    /// The LP needed bounded slack on the demand rows; the refit restores
    /// the demands exactly.
    LpRelaxed { tie_tol: f64 },
}

/// Optimum of the fixed-`T` average-power problem.
#[derive(Clone, Debug, PartialEq)]
pub struct P2Solution<T> {
    /// Rate loads `m = ρ r`, K x N (bits/s).
    pub m: Array2<T>,
    pub rho: Array2<T>,
    /// Powers while a pair is scheduled, K x N (W).
    pub power: Array2<T>,
    /// Optimal average power `v(T)` (W).
    pub v: T,
    /// `λ_k` and per-subcarrier `β_n`; `gap = v - dual value` (W).
    pub cert: DualCertificate<T>,
    /// Pairs fixed by the sign of `o`.
    pub a1: Vec<(usize, usize)>,
    /// Pairs with `o` within the tie tolerance of zero.
    pub a2: Vec<(usize, usize)>,
    /// Per-terminal water levels `p + 1/f` of the returned primal (W).
    pub levels: Vec<T>,
    pub dual_value: T,
    pub recovery: Recovery,
    pub ellipsoid_iterations: usize,
}

impl<T: Scalar> P2Solution<T> {
    pub fn relative_gap(&self) -> T {
        self.cert.gap / self.v.abs().max(T::min_positive_value())
    }
}

/// Solves the fixed-`T` problem: minimize average power subject to rate
/// demands `c_k = Q_k / T` and `sum_k ρ_{k,n} <= 1`.
pub fn solve_p2<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    t: T,
) -> Result<P2Solution<T>> {
    solve_p2_warm(cfg, chan, demand, t, None)
}

/// [`solve_p2`] with an optional starting guess for the water levels.
pub fn solve_p2_warm<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    t: T,
    warm: Option<&[T]>,
) -> Result<P2Solution<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("frame length {t}")));
    }
    if demand.len() != chan.k() {
        return Err(Error::Shape("demand and channel disagree on K".into()));
    }
    let k = chan.k();
    let a = cfg.a();
    let rates: Vec<T> = demand.bits().iter().map(|&q| q / t).collect();
    let a_rates: Vec<T> = rates.iter().map(|&c| a * c).collect();

    // Lower bounds: level needed if terminal k had every subcarrier alone.
    let ones = vec![T::one(); chan.n()];
    let kt = T::from_usize(k).unwrap();
    let share = vec![T::one() / kt; chan.n()];
    let mut lower = Vec::with_capacity(k);
    let mut equal = Vec::with_capacity(k);
    for kk in 0..k {
        let row: Vec<T> = chan.f_row(kk).to_vec();
        lower.push(level_for_rate(&row, &ones, a_rates[kk]).unwrap());
        equal.push(level_for_rate(&row, &share, a_rates[kk]).unwrap());
    }

    let mut attempts: Vec<(Vec<T>, T)> = Vec::new();
    if let Some(w) = warm.filter(|w| w.len() == k && w.iter().all(|x| x.is_finite() && *x > T::zero())) {
        attempts.push((w.to_vec(), T::lit(4.0)));
    }
    attempts.push((equal.clone(), T::lit(1e3)));
    attempts.push((equal.clone(), T::lit(1e6)));

    let mut best: Option<P2Solution<T>> = None;
    let mut last_err = None;
    for (scale, radius) in attempts {
        match p2_attempt(cfg, chan, &rates, &a_rates, &lower, &scale, radius) {
            Ok(sol) => {
                let done = sol.relative_gap() <= T::lit(GAP_RETRY);
                let better = best
                    .as_ref()
                    .map(|b| sol.relative_gap() < b.relative_gap())
                    .unwrap_or(true);
                if better {
                    best = Some(sol);
                }
                if done {
                    break;
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one attempt runs"),
    }
}

fn p2_attempt<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    rates: &[T],
    a_rates: &[T],
    lower: &[T],
    scale: &[T],
    radius: T,
) -> Result<P2Solution<T>> {
    let k = chan.k();
    let mut mu = vec![T::zero(); k];
    let mut grad = vec![T::zero(); k];
    let mut settings = EllipsoidSettings::for_dim(k);
    settings.min_volume_ratio = T::zero();
    settings.rel_tol = cfg.tol().dual_rel;
    settings.abs_tol = T::min_positive_value();
    let center = vec![T::one(); k];
    let res = ellipsoid_maximize(
        |x| {
            // Infeasible below the single-terminal level bound.
            for kk in 0..k {
                let lb = lower[kk] / scale[kk];
                if x[kk] < lb {
                    let mut normal = vec![T::zero(); k];
                    normal[kk] = T::one();
                    return Ok(Eval::Infeasible { normal, depth: lb - x[kk] });
                }
            }
            for kk in 0..k {
                mu[kk] = x[kk] * scale[kk];
            }
            let value = reduced_dual(chan, a_rates, &mu, &mut grad);
            let supergrad = (0..k).map(|kk| grad[kk] * scale[kk]).collect();
            Ok(Eval::Point { value, supergrad })
        },
        &center,
        radius,
        &settings,
    )?;
    let mu_hat: Vec<T> = res.x.iter().zip(scale).map(|(&x, &s)| x * s).collect();
    recover_primal(cfg, chan, rates, a_rates, &mu_hat, res.iterations)
}

struct Refit<T> {
    rho: Array2<T>,
    power: Array2<T>,
    m: Array2<T>,
    levels: Vec<T>,
    v: T,
}

/// Refits each terminal's water level so its demand is met exactly with the
/// given shares. `None` if some terminal has no share at all.
fn refit<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    a_rates: &[T],
    rho: Array2<T>,
) -> Option<Refit<T>> {
    let (k, n) = (chan.k(), chan.n());
    let a = cfg.a();
    let mut levels = Vec::with_capacity(k);
    let mut power = Array2::zeros((k, n));
    let mut m = Array2::zeros((k, n));
    for kk in 0..k {
        let f: Vec<T> = chan.f_row(kk).to_vec();
        let r: Vec<T> = rho.row(kk).to_vec();
        let w = level_for_rate(&f, &r, a_rates[kk])?;
        levels.push(w);
        for nn in 0..n {
            if rho[[kk, nn]] > T::zero() {
                let x = (w * f[nn]).ln().pos();
                power[[kk, nn]] = (w - T::one() / f[nn]).pos();
                m[[kk, nn]] = rho[[kk, nn]] * x / a;
            }
        }
    }
    let v = rho.iter().zip(power.iter()).map(|(&r, &p)| r * p).sum();
    Some(Refit {
        rho,
        power,
        m,
        levels,
        v,
    })
}

fn recover_primal<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    rates: &[T],
    a_rates: &[T],
    mu: &[T],
    iterations: usize,
) -> Result<P2Solution<T>> {
    let (k, n) = (chan.k(), chan.n());
    let a = cfg.a();
    let mut phis = Array2::zeros((k, n));
    for kk in 0..k {
        for nn in 0..n {
            phis[[kk, nn]] = phi(mu[kk], chan.f(kk, nn));
        }
    }
    let beta: Vec<T> = (0..n)
        .map(|nn| phis.column(nn).iter().fold(T::zero(), |m, &p| m.max(p)))
        .collect();
    let ell = |kk: usize, nn: usize| (mu[kk] * chan.f(kk, nn)).ln().pos() / a;

    // Candidates are refit and the cheapest wins; the dual point is only
    // approximate, so no single rounding rule is reliable on its own.
    let mut best: Option<(Refit<T>, Recovery, f64)> = None;
    let mut consider = |rho: Array2<T>, how: Recovery, tie: f64| {
        if let Some(r) = refit(cfg, chan, a_rates, rho) {
            if best.as_ref().map(|b| r.v < b.0.v).unwrap_or(true) {
                best = Some((r, how, tie));
            }
        }
    };

    // Winner takes each subcarrier.
    let mut winners = Array2::zeros((k, n));
    for nn in 0..n {
        let mut arg = 0;
        for kk in 1..k {
            if phis[[kk, nn]] > phis[[arg, nn]] {
                arg = kk;
            }
        }
        winners[[arg, nn]] = T::one();
    }
    let winners_exact = (0..k).all(|kk| {
        let got: T = (0..n).map(|nn| winners[[kk, nn]] * ell(kk, nn)).sum();
        got.rel_diff(rates[kk]) < T::lit(POINTWISE_RESIDUAL)
    });
    consider(winners, Recovery::Pointwise, TIE_TOL);

    if !winners_exact {
        let mut tie = TIE_TOL;
        while tie <= 1e-3 {
            if let Some(r) = lp_recover(chan, rates, &phis, &beta, &ell, T::lit(tie), None)? {
                consider(r, Recovery::Lp { tie_tol: tie }, tie);
                break;
            }
            tie *= 100.0;
        }
        'relaxed: for &tie in &[TIE_TOL, 1e-5, 1e-3] {
            for &sigma in &[1e-6, 1e-4, 1e-2] {
                if let Some(r) =
                    lp_recover(chan, rates, &phis, &beta, &ell, T::lit(tie), Some(T::lit(sigma)))?
                {
                    consider(r, Recovery::LpRelaxed { tie_tol: tie }, tie);
                    break 'relaxed;
                }
            }
        }
    }
    let (
        Refit {
            rho,
            power,
            m,
            levels,
            v,
        },
        recovery,
        tie_used,
    ) = best.ok_or_else(|| {
        Error::Numeric(format!(
            "primal recovery failed at duals {:?}",
            mu.iter().map(|x| x.as_f64()).collect::<Vec<_>>()
        ))
    })?;

    let mut g = vec![T::zero(); k];
    let dual_hat = reduced_dual(chan, a_rates, mu, &mut g);
    let dual_fit = reduced_dual(chan, a_rates, &levels, &mut g);
    let (dual_value, mu_cert) = if dual_fit >= dual_hat {
        (dual_fit, levels.clone())
    } else {
        (dual_hat, mu.to_vec())
    };
    let beta_cert: Vec<T> = (0..n)
        .map(|nn| {
            (0..k)
                .map(|kk| phi(mu_cert[kk], chan.f(kk, nn)))
                .fold(T::zero(), T::max)
        })
        .collect();

    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let tie = T::lit(tie_used);
    for nn in 0..n {
        for kk in 0..k {
            if beta[nn] - phis[[kk, nn]] <= tie * (T::one() + beta[nn]) {
                a2.push((kk, nn));
            } else {
                a1.push((kk, nn));
            }
        }
    }
    Ok(P2Solution {
        m,
        rho,
        power,
        v,
        cert: DualCertificate {
            lambda: mu_cert.iter().map(|&x| a * x).collect(),
            beta: DualBeta::PerSubcarrier(beta_cert),
            gap: v - dual_value,
        },
        a1,
        a2,
        levels,
        dual_value,
        recovery,
        ellipsoid_iterations: iterations,
    })
}

/// Solves the linear system of shared subcarriers: for each subcarrier the
/// tied terminals' shares sum to one, and each terminal's rate from its
/// shares matches its demand, up to a relative slack of `slack` if given.
fn lp_recover<T: Scalar>(
    chan: &ChannelMatrix<T>,
    rates: &[T],
    phis: &Array2<T>,
    beta: &[T],
    ell: &dyn Fn(usize, usize) -> T,
    tie: T,
    slack: Option<T>,
) -> Result<Option<Array2<T>>> {
    let (k, n) = (chan.k(), chan.n());
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for nn in 0..n {
        for kk in 0..k {
            if beta[nn] - phis[[kk, nn]] <= tie * (T::one() + beta[nn]) {
                vars.push((kk, nn));
            }
        }
    }
    let nv = vars.len();
    let extra = if slack.is_some() { 2 * k } else { 0 };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for nn in 0..n {
        let row: Vec<(usize, T)> = vars
            .iter()
            .enumerate()
            .filter(|(_, &(_, vn))| vn == nn)
            .map(|(i, _)| (i, T::one()))
            .collect();
        rows.push(row);
        rhs.push(T::one());
    }
    for kk in 0..k {
        let mut row: Vec<(usize, T)> = vars
            .iter()
            .enumerate()
            .filter(|(_, &(vk, _))| vk == kk)
            .map(|(i, &(vk, vn))| (i, ell(vk, vn) / rates[kk]))
            .collect();
        if slack.is_some() {
            row.push((nv + 2 * kk, -T::one()));
            row.push((nv + 2 * kk + 1, T::one()));
        }
        rows.push(row);
        rhs.push(T::one());
    }
    let sys = LinearSystem {
        n_vars: nv + extra,
        rows,
        rhs,
    };
    let lo = vec![T::zero(); nv + extra];
    let mut hi = vec![T::one(); nv + extra];
    if let Some(s) = slack {
        for h in &mut hi[nv..] {
            *h = s;
        }
    }
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(1e3));
    match lp_feasible(&sys, &lo, &hi, tol)? {
        LpOutcome::Feasible(x) => {
            let mut rho = Array2::zeros((k, n));
            for (i, &(kk, nn)) in vars.iter().enumerate() {
                rho[[kk, nn]] = x[i];
            }
            Ok(Some(rho))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
    }
}

/// Lower bound on `v(T)`: the power each terminal would need with every
/// subcarrier to itself, maximized over terminals.
pub fn power_lower_bound<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    t: T,
) -> T {
    let ones = vec![T::one(); chan.n()];
    (0..chan.k())
        .map(|kk| {
            let f: Vec<T> = chan.f_row(kk).to_vec();
            let w = level_for_rate(&f, &ones, cfg.a() * demand.bits()[kk] / t).unwrap();
            f.iter().map(|&g| (w - T::one() / g).pos()).sum::<T>()
        })
        .fold(T::zero(), T::max)
}

/// Optimal average power `v(T)` and its certificate.
pub fn v_of_t<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    t: T,
) -> Result<(T, DualCertificate<T>)> {
    let s = solve_p2(cfg, chan, demand, t)?;
    Ok((s.v, s.cert))
}

/// `d/dT [T v(T) + P_tc T] = v(T) - (1/T) sum_k λ_k Q_k + P_tc`.
pub fn bs_energy_gradient<T: Scalar>(
    cfg: &SystemConfig<T>,
    demand: &DemandVector<T>,
    t: T,
    v: T,
    cert: &DualCertificate<T>,
) -> T {
    v - lambda_q(demand, cert) / t + cfg.p_tc()
}

fn lambda_q<T: Scalar>(demand: &DemandVector<T>, cert: &DualCertificate<T>) -> T {
    cert.lambda
        .iter()
        .zip(demand.bits())
        .map(|(&l, &q)| l * q)
        .sum()
}

/// Weights of the single-slot problem `min α_tx T v(T) + P_const T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotWeights<T> {
    /// Weight on transmit energy (`α0`).
    pub tx_weight: T,
    /// Constant power charged per second of the slot (W).
    pub const_power: T,
}

impl<T: Scalar> SlotWeights<T> {
    /// Plain base-station energy: `T v(T) + P_tc T`.
    pub fn bs_energy(cfg: &SystemConfig<T>) -> Self {
        Self {
            tx_weight: T::one(),
            const_power: cfg.p_tc(),
        }
    }

    /// Joint objective of a slot shared by `members`:
    /// `α0 (T v + P_tc T) + sum_k α_k P_rc T`.
    pub fn joint(cfg: &SystemConfig<T>, members: &[usize]) -> Self {
        let rx: T = members.iter().map(|&k| cfg.alphas()[k] * cfg.p_rc()).sum();
        Self {
            tx_weight: cfg.alpha0(),
            const_power: cfg.alpha0() * cfg.p_tc() + rx,
        }
    }

    pub fn with_time_price(self, nu: T) -> Self {
        Self {
            const_power: self.const_power + nu,
            ..self
        }
    }
}

/// Which condition fixed the returned frame length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeChoice {
    /// Stationary point of the objective.
    Stationary,
    /// Average power limit active: `v(T) = P_avg`.
    PowerLimited,
    /// Upper time limit active.
    TimeLimited,
}

/// Result of the single-slot OFDMA search over `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotSolution<T> {
    pub duration: T,
    pub p2: P2Solution<T>,
    /// `α_tx (T v) + P_const T` (J).
    pub objective: T,
    /// Objective derivative at the returned `T` (W).
    pub gradient: T,
    pub choice: TimeChoice,
    /// Number of fixed-`T` solves performed.
    pub evaluations: usize,
}

struct Evaluator<'a, T: Scalar> {
    cfg: &'a SystemConfig<T>,
    chan: &'a ChannelMatrix<T>,
    demand: &'a DemandVector<T>,
    weights: SlotWeights<T>,
    cache: Vec<(T, P2Solution<T>)>,
    count: usize,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    fn solve(&mut self, t: T) -> Result<P2Solution<T>> {
        if let Some((_, s)) = self.cache.iter().find(|(x, _)| *x == t) {
            return Ok(s.clone());
        }
        // Water levels scale smoothly with T; reuse the nearest solve.
        let warm = self
            .cache
            .iter()
            .min_by(|x, y| {
                (x.0 / t).ln().abs().partial_cmp(&(y.0 / t).ln().abs()).unwrap()
            })
            .map(|(_, s)| s.levels.clone());
        let s = solve_p2_warm(self.cfg, self.chan, self.demand, t, warm.as_deref())?;
        self.count += 1;
        if self.cache.len() >= 64 {
            self.cache.remove(0);
        }
        self.cache.push((t, s.clone()));
        Ok(s)
    }

    fn gradient(&mut self, t: T) -> Result<T> {
        let s = self.solve(t)?;
        let w = self.weights;
        Ok(w.tx_weight * (s.v - lambda_q(self.demand, &s.cert) / t) + w.const_power)
    }

    fn v(&mut self, t: T) -> Result<T> {
        Ok(self.solve(t)?.v)
    }
}

/// Minimizes `α_tx T v(T) + P_const T` subject to `v(T) <= P_avg` and an
/// optional `T <= t_max`.
pub fn solve_slot<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    weights: SlotWeights<T>,
    t_max: Option<T>,
) -> Result<SlotSolution<T>> {
    if !(weights.tx_weight >= T::zero()) || !(weights.const_power >= T::zero()) {
        return Err(Error::Domain("slot weights must be nonnegative".into()));
    }
    let mut ev = Evaluator {
        cfg,
        chan,
        demand,
        weights,
        cache: Vec::new(),
        count: 0,
    };
    let p_avg = cfg.p_avg();
    let rel = cfg.tol().time_rel;
    let t0 = demand.total() / (T::from_usize(chan.n()).unwrap() * cfg.w());

    if let Some(tm) = t_max {
        let slack = T::one() + cfg.tol().slack;
        // The cheap bound screens out hopeless limits before any P2 solve,
        // which could overflow at very short frames.
        if power_lower_bound(cfg, chan, demand, tm) > p_avg * slack || ev.v(tm)? > p_avg * slack {
            let mut start = tm;
            while power_lower_bound(cfg, chan, demand, start) > p_avg {
                start = start * T::lit(2.0);
            }
            let t_min = power_limited_time(&mut ev, start, rel)?;
            return Err(Error::Infeasible {
                reason: format!(
                    "T_max = {tm} s is below the shortest frame that meets P_avg ({t_min} s)"
                ),
                diagnostic: t_min.as_f64(),
            });
        }
        if weights.tx_weight == T::zero() && weights.const_power == T::zero() {
            return finish(&mut ev, tm, TimeChoice::TimeLimited);
        }
        if weights.tx_weight > T::zero() && ev.gradient(tm)? <= T::zero() {
            return finish(&mut ev, tm, TimeChoice::TimeLimited);
        }
    }

    let (t_star, choice) = if weights.tx_weight == T::zero() {
        if weights.const_power == T::zero() {
            return Err(Error::Config("all slot weights are zero".into()));
        }
        (power_limited_time(&mut ev, t0, rel)?, TimeChoice::PowerLimited)
    } else if weights.const_power == T::zero() {
        return Err(Error::Domain(
            "no finite optimal frame length: with zero constant power the energy keeps \
             decreasing as the frame grows"
                .into(),
        ));
    } else {
        let ts = stationary_time(&mut ev, t0, rel)?;
        if ev.v(ts)? > p_avg {
            (power_limited_time(&mut ev, ts, rel)?, TimeChoice::PowerLimited)
        } else {
            (ts, TimeChoice::Stationary)
        }
    };
    let (t_final, choice) = match t_max {
        Some(tm) if t_star > tm => (tm, TimeChoice::TimeLimited),
        _ => (t_star, choice),
    };
    finish(&mut ev, t_final, choice)
}

fn finish<T: Scalar>(ev: &mut Evaluator<'_, T>, t: T, choice: TimeChoice) -> Result<SlotSolution<T>> {
    let p2 = ev.solve(t)?;
    let w = ev.weights;
    let gradient = w.tx_weight * (p2.v - lambda_q(ev.demand, &p2.cert) / t) + w.const_power;
    Ok(SlotSolution {
        duration: t,
        objective: w.tx_weight * t * p2.v + w.const_power * t,
        gradient,
        p2,
        choice,
        evaluations: ev.count,
    })
}

/// Root of the nondecreasing objective derivative.
fn stationary_time<T: Scalar>(ev: &mut Evaluator<'_, T>, t0: T, rel: T) -> Result<T> {
    let two = T::lit(2.0);
    let mut lo = t0;
    let mut steps = 0;
    while ev.gradient(lo)? >= T::zero() {
        lo = lo / two;
        steps += 1;
        if steps > MAX_T_STEPS {
            return Err(Error::Numeric("no lower bracket for the stationary frame length".into()));
        }
    }
    let mut hi = if lo < t0 { lo * two } else { t0 * two };
    steps = 0;
    while ev.gradient(hi)? <= T::zero() {
        lo = hi;
        hi = hi * two;
        steps += 1;
        if steps > MAX_T_STEPS {
            return Err(Error::Numeric("no upper bracket for the stationary frame length".into()));
        }
    }
    while hi - lo > rel * hi {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if ev.gradient(mid)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}

/// Smallest `T` with `v(T) <= P_avg` (returned from the feasible side).
fn power_limited_time<T: Scalar>(ev: &mut Evaluator<'_, T>, start: T, rel: T) -> Result<T> {
    let two = T::lit(2.0);
    let p_avg = ev.cfg.p_avg();
    let mut hi = start;
    let mut steps = 0;
    while ev.v(hi)? > p_avg {
        hi = hi * two;
        steps += 1;
        if steps > MAX_T_STEPS {
            return Err(Error::Numeric("average power never drops below P_avg".into()));
        }
    }
    let mut lo = hi / two;
    steps = 0;
    while ev.v(lo)? <= p_avg {
        hi = lo;
        lo = lo / two;
        steps += 1;
        if steps > MAX_T_STEPS {
            return Err(Error::Numeric("no lower bracket for v(T) = P_avg".into()));
        }
    }
    while hi - lo > rel * hi {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if ev.v(mid)? <= p_avg {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Single-slot OFDMA schedule of a [`SlotSolution`]; every receiver stays
/// on for the whole frame.
pub fn ofdma_allocation<T: Scalar>(sol: &SlotSolution<T>) -> Allocation<T> {
    let k = sol.p2.rho.nrows();
    Allocation {
        duration: sol.duration,
        rho: sol.p2.rho.clone(),
        power: sol.p2.power.clone(),
        on_time: vec![sol.duration; k],
        grouping: Some(vec![Slot {
            members: (0..k).collect(),
            duration: sol.duration,
        }]),
    }
}

/// Full outcome of a transmit-energy solve.
#[derive(Clone, Debug, PartialEq)]
pub struct TeminResult<T> {
    pub allocation: Allocation<T>,
    pub report: EnergyReport<T>,
    pub slot: SlotSolution<T>,
}

fn temin_impl<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    t_max: Option<T>,
) -> Result<TeminResult<T>> {
    if cfg.k() != chan.k() || demand.len() != chan.k() {
        return Err(Error::Shape("config, channel and demand disagree on K".into()));
    }
    let slot = solve_slot(cfg, chan, demand, SlotWeights::bs_energy(cfg), t_max)?;
    let allocation = ofdma_allocation(&slot);
    let v = validate_allocation(cfg, chan, demand, &allocation);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let report = energy_report(cfg, demand, &allocation)?;
    Ok(TeminResult {
        allocation,
        report,
        slot,
    })
}

/// Minimizes base-station energy `T v(T) + P_tc T` under OFDMA.
pub fn solve_temin<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<TeminResult<T>> {
    temin_impl(cfg, chan, demand, None)
}

/// [`solve_temin`] with `T <= T_max` from the configuration.
pub fn solve_temin_tmax<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<TeminResult<T>> {
    temin_impl(cfg, chan, demand, cfg.t_max())
}
