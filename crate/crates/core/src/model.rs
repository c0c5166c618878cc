//! Domain types and closed-form physical formulas.
//!
//! Units are fixed across the crate: bits, seconds, watts, joules and hertz.
//! The noise power spectral density is stored in W/Hz; use
//! [`dbm_per_hz_to_w`] at the boundary when starting from dBm/Hz.

use std::fmt;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Converts a noise spectral density from dBm/Hz to W/Hz.
pub fn dbm_per_hz_to_w<T: Scalar>(dbm: T) -> T {
    T::lit(10.0).powf(dbm / T::lit(10.0)) * T::lit(1e-3)
}

/// Solver tolerance bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Absolute bracket width at which the power-multiplier bisection stops.
    pub beta_delta: T,
    /// Relative bracket width for bisections over transmission time.
    pub time_rel: T,
    /// Relative accuracy target of the dual (ellipsoid) solve.
    pub dual_rel: T,
    /// Relative constraint slack accepted by [`validate_allocation`].
    pub slack: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(8.0);
        Self {
            beta_delta: T::lit(1e-10).max(floor),
            time_rel: T::lit(1e-9).max(floor),
            dual_rel: T::lit(1e-10).max(floor),
            slack: T::lit(1e-9).max(floor * T::lit(4.0)),
        }
    }
}

/// Raw physical and algorithmic parameters, validated by [`SystemConfig::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams<T> {
    /// Subcarrier bandwidth `W` in Hz.
    pub bandwidth_hz: T,
    /// One-sided noise PSD `N0` in W/Hz.
    pub noise_psd_w_per_hz: T,
    /// SNR gap `Γ >= 1`.
    pub snr_gap: T,
    /// Average transmit power limit at the base station (W).
    pub p_avg_w: T,
    /// Base-station non-transmission power (W).
    pub p_tc_w: T,
    /// Receiver power of a mobile terminal while on (W).
    pub p_rc_w: T,
    /// Weight on base-station energy.
    pub alpha0: T,
    /// Per-terminal energy weights; the length fixes the number of terminals.
    pub alphas: Vec<T>,
    /// Optional cap on the total transmission time (s).
    pub t_max_s: Option<T>,
    pub tol: Tolerances<T>,
}

/// Validated, immutable system configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<T> {
    params: SystemParams<T>,
}

impl<T: Scalar> SystemConfig<T> {
    pub fn new(params: SystemParams<T>) -> Result<Self> {
        let p = &params;
        let finite_pos = |x: T| x.is_finite() && x > T::zero();
        if !finite_pos(p.bandwidth_hz) {
            return Err(Error::Config("bandwidth must be positive".into()));
        }
        if !finite_pos(p.noise_psd_w_per_hz) {
            return Err(Error::Config("noise PSD must be positive".into()));
        }
        if !(p.snr_gap >= T::one()) || !p.snr_gap.is_finite() {
            return Err(Error::Config("SNR gap must be >= 1".into()));
        }
        if !finite_pos(p.p_avg_w) {
            return Err(Error::Config("average power limit must be positive".into()));
        }
        if !(p.p_tc_w >= T::zero()) || !p.p_tc_w.is_finite() {
            return Err(Error::Config("non-transmission power must be >= 0".into()));
        }
        if !finite_pos(p.p_rc_w) {
            return Err(Error::Config("receiver power must be positive".into()));
        }
        if p.alphas.is_empty() {
            return Err(Error::Config("at least one terminal weight required".into()));
        }
        if !(p.alpha0 >= T::zero()) || !p.alpha0.is_finite() {
            return Err(Error::Config("alpha0 must be >= 0".into()));
        }
        if p.alphas.iter().any(|&a| !(a >= T::zero()) || !a.is_finite()) {
            return Err(Error::Config("terminal weights must be >= 0".into()));
        }
        if p.alpha0 == T::zero() && p.alphas.iter().all(|&a| a == T::zero()) {
            return Err(Error::Config("all energy weights are zero".into()));
        }
        if let Some(tm) = p.t_max_s {
            if !(tm > T::zero()) {
                return Err(Error::Config("T_max must be positive".into()));
            }
        }
        let t = &p.tol;
        if [t.beta_delta, t.time_rel, t.dual_rel, t.slack]
            .iter()
            .any(|&x| !finite_pos(x))
        {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &SystemParams<T> {
        &self.params
    }

    pub fn w(&self) -> T {
        self.params.bandwidth_hz
    }
    pub fn n0(&self) -> T {
        self.params.noise_psd_w_per_hz
    }
    pub fn gamma(&self) -> T {
        self.params.snr_gap
    }
    pub fn p_avg(&self) -> T {
        self.params.p_avg_w
    }
    pub fn p_tc(&self) -> T {
        self.params.p_tc_w
    }
    pub fn p_rc(&self) -> T {
        self.params.p_rc_w
    }
    pub fn alpha0(&self) -> T {
        self.params.alpha0
    }
    pub fn alphas(&self) -> &[T] {
        &self.params.alphas
    }
    pub fn t_max(&self) -> Option<T> {
        self.params.t_max_s
    }
    pub fn tol(&self) -> &Tolerances<T> {
        &self.params.tol
    }
    /// Number of terminals.
    pub fn k(&self) -> usize {
        self.params.alphas.len()
    }

    /// `ln 2 / W`, the nats-per-bit scale used by the inverted rate formula.
    pub fn a(&self) -> T {
        T::LN_2() / self.w()
    }

    /// Copy with new energy weights.
    pub fn with_weights(&self, alpha0: T, alphas: Vec<T>) -> Result<Self> {
        let mut p = self.params.clone();
        p.alpha0 = alpha0;
        p.alphas = alphas;
        Self::new(p)
    }

    pub fn with_t_max(&self, t_max: Option<T>) -> Result<Self> {
        let mut p = self.params.clone();
        p.t_max_s = t_max;
        Self::new(p)
    }

    pub fn with_tolerances(&self, tol: Tolerances<T>) -> Result<Self> {
        let mut p = self.params.clone();
        p.tol = tol;
        Self::new(p)
    }

    /// Copy restricted to the terminals in `members` (weights re-indexed).
    pub fn select(&self, members: &[usize]) -> Result<Self> {
        let mut p = self.params.clone();
        p.alphas = members.iter().map(|&k| self.params.alphas[k]).collect();
        Self::new(p)
    }
}

/// Channel power gains `h[k,n]` and normalized gains `f = h / (Γ N0 W)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix<T> {
    gains: Array2<T>,
    norm: Array2<T>,
}

impl<T: Scalar> ChannelMatrix<T> {
    pub fn new(gains: Array2<T>, cfg: &SystemConfig<T>) -> Result<Self> {
        let (k, n) = gains.dim();
        if k == 0 || n == 0 {
            return Err(Error::Shape("channel matrix must be non-empty".into()));
        }
        if gains.iter().any(|&h| !(h > T::zero()) || !h.is_finite()) {
            return Err(Error::Domain("channel gains must be positive and finite".into()));
        }
        let scale = cfg.gamma() * cfg.n0() * cfg.w();
        let norm = gains.mapv(|h| h / scale);
        Ok(Self { gains, norm })
    }

    /// Builds from row vectors.
    pub fn from_rows(rows: &[Vec<T>], cfg: &SystemConfig<T>) -> Result<Self> {
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("ragged channel rows".into()));
        }
        let flat: Vec<T> = rows.iter().flatten().copied().collect();
        let gains = Array2::from_shape_vec((rows.len(), n), flat)
            .map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(gains, cfg)
    }

    pub fn k(&self) -> usize {
        self.gains.nrows()
    }
    pub fn n(&self) -> usize {
        self.gains.ncols()
    }
    pub fn gains(&self) -> &Array2<T> {
        &self.gains
    }
    pub fn normalized(&self) -> &Array2<T> {
        &self.norm
    }
    #[inline]
    pub fn h(&self, k: usize, n: usize) -> T {
        self.gains[[k, n]]
    }
    #[inline]
    pub fn f(&self, k: usize, n: usize) -> T {
        self.norm[[k, n]]
    }
    pub fn f_row(&self, k: usize) -> ArrayView1<'_, T> {
        self.norm.row(k)
    }
    pub fn h_row(&self, k: usize) -> ArrayView1<'_, T> {
        self.gains.row(k)
    }

    /// Sub-matrix with the rows in `members`, in that order.
    pub fn select(&self, members: &[usize]) -> Self {
        Self {
            gains: self.gains.select(ndarray::Axis(0), members),
            norm: self.norm.select(ndarray::Axis(0), members),
        }
    }
}

/// Per-terminal bit requirements.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandVector<T> {
    bits: Vec<T>,
}

impl<T: Scalar> DemandVector<T> {
    pub fn new(bits: Vec<T>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Shape("empty demand vector".into()));
        }
        if bits.iter().any(|&q| !(q > T::zero()) || !q.is_finite()) {
            return Err(Error::Domain("demands must be positive".into()));
        }
        Ok(Self { bits })
    }
    pub fn bits(&self) -> &[T] {
        &self.bits
    }
    pub fn len(&self) -> usize {
        self.bits.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
    pub fn total(&self) -> T {
        self.bits.iter().copied().sum()
    }
    pub fn select(&self, members: &[usize]) -> Self {
        Self {
            bits: members.iter().map(|&k| self.bits[k]).collect(),
        }
    }
}

/// One time slot of a TS-OFDMA frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Slot<T> {
    pub members: Vec<usize>,
    pub duration: T,
}

/// A complete schedule. Fields are public so callers can build arbitrary
/// (possibly invalid) schedules and check them with [`validate_allocation`].
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation<T> {
    /// Total transmission time `T` (s).
    pub duration: T,
    /// Time-sharing factors, K x N.
    pub rho: Array2<T>,
    /// Transmit powers while the pair is scheduled, K x N (W).
    pub power: Array2<T>,
    /// Receiver on-times `t_k` (s).
    pub on_time: Vec<T>,
    pub grouping: Option<Vec<Slot<T>>>,
}

impl<T: Scalar> Allocation<T> {
    pub fn k(&self) -> usize {
        self.rho.nrows()
    }
    pub fn n(&self) -> usize {
        self.rho.ncols()
    }

    /// Average transmit power `sum rho * p`.
    pub fn average_power(&self) -> T {
        self.rho
            .iter()
            .zip(self.power.iter())
            .map(|(&r, &p)| r * p)
            .sum()
    }

    /// Bits delivered to each terminal over the frame.
    pub fn delivered_bits(&self, cfg: &SystemConfig<T>, chan: &ChannelMatrix<T>) -> Vec<T> {
        (0..self.k())
            .map(|k| {
                (0..self.n())
                    .map(|n| {
                        let r = rate_normalized(cfg, chan.f(k, n), self.power[[k, n]].pos());
                        self.duration * self.rho[[k, n]] * r
                    })
                    .sum()
            })
            .collect()
    }

    /// Structural invariants: ranges, per-subcarrier share, on-time bounds
    /// and grouping consistency.
    pub fn check_structure(&self, slack: T) -> Vec<Violation> {
        let mut out = Vec::new();
        let (k, n) = self.rho.dim();
        if self.power.dim() != (k, n) || self.on_time.len() != k {
            out.push(Violation::new(ConstraintKind::Shape, vec![], f64::NAN));
            return out;
        }
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            out.push(Violation::new(
                ConstraintKind::Duration,
                vec![],
                self.duration.as_f64(),
            ));
        }
        for ((kk, nn), &r) in self.rho.indexed_iter() {
            if !(r >= T::zero()) || r > T::one() + slack {
                out.push(Violation::new(
                    ConstraintKind::ShareRange,
                    vec![kk, nn],
                    r.as_f64(),
                ));
            }
            let p = self.power[[kk, nn]];
            if !(p >= T::zero()) || !p.is_finite() {
                out.push(Violation::new(ConstraintKind::PowerSign, vec![kk, nn], p.as_f64()));
            }
        }
        for nn in 0..n {
            let s: T = self.rho.column(nn).sum();
            if s > T::one() + slack {
                out.push(Violation::new(
                    ConstraintKind::SubcarrierShare,
                    vec![nn],
                    (T::one() - s).as_f64(),
                ));
            }
        }
        let tt = self.duration;
        for kk in 0..k {
            let t = self.on_time[kk];
            let busy = self
                .rho
                .row(kk)
                .iter()
                .fold(T::zero(), |m, &r| m.max(r * tt));
            let abs = slack * tt.abs().max(T::min_positive_value());
            if !(t >= T::zero()) || busy > t + slack * t + abs || t > tt + slack * tt {
                out.push(Violation::new(
                    ConstraintKind::OnTime,
                    vec![kk],
                    (t - busy).min(tt - t).as_f64(),
                ));
            }
        }
        if let Some(slots) = &self.grouping {
            let mut seen = vec![0usize; k];
            let mut total = T::zero();
            for (j, s) in slots.iter().enumerate() {
                if s.members.is_empty() {
                    out.push(Violation::new(ConstraintKind::Grouping, vec![j], 0.0));
                }
                total += s.duration;
                for &m in &s.members {
                    if m >= k {
                        out.push(Violation::new(ConstraintKind::Grouping, vec![j, m], 0.0));
                        continue;
                    }
                    seen[m] += 1;
                    if self.on_time[m].rel_diff(s.duration) > slack * T::lit(10.0) {
                        out.push(Violation::new(
                            ConstraintKind::Grouping,
                            vec![j, m],
                            (s.duration - self.on_time[m]).as_f64(),
                        ));
                    }
                }
            }
            for (m, &c) in seen.iter().enumerate() {
                if c != 1 {
                    out.push(Violation::new(ConstraintKind::Grouping, vec![m], c as f64));
                }
            }
            if total.rel_diff(tt) > slack * T::lit(10.0) {
                out.push(Violation::new(
                    ConstraintKind::Grouping,
                    vec![],
                    (tt - total).as_f64(),
                ));
            }
        }
        out
    }
}

/// Which constraint a [`Violation`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// Shares on one subcarrier sum to more than one.
    SubcarrierShare,
    /// A terminal receives fewer bits than it requires.
    Demand,
    /// Average transmit power above the limit.
    AveragePower,
    /// A time-sharing factor outside `[0, 1]`.
    ShareRange,
    /// Negative or non-finite power.
    PowerSign,
    /// Non-positive frame duration.
    Duration,
    /// On-time outside `[max_n T rho, T]`.
    OnTime,
    /// Slot partition inconsistent with the on-times or the frame.
    Grouping,
    /// Array dimensions disagree.
    Shape,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintKind::SubcarrierShare => "subcarrier share sum <= 1",
            ConstraintKind::Demand => "delivered bits >= demand",
            ConstraintKind::AveragePower => "average power <= P_avg",
            ConstraintKind::ShareRange => "0 <= rho <= 1",
            ConstraintKind::PowerSign => "power >= 0",
            ConstraintKind::Duration => "T > 0",
            ConstraintKind::OnTime => "max_n T*rho <= t_k <= T",
            ConstraintKind::Grouping => "slot partition",
            ConstraintKind::Shape => "array shapes",
        };
        f.write_str(s)
    }
}

/// A violated constraint with its indices and signed slack (negative means
/// violated by that amount, in the constraint's natural unit).
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub indices: Vec<usize>,
    pub slack: f64,
}

impl Violation {
    pub fn new(kind: ConstraintKind, indices: Vec<usize>, slack: f64) -> Self {
        Self { kind, indices, slack }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?} (slack {:.3e})", self.kind, self.indices, self.slack)
    }
}

/// Energy and efficiency figures of an allocation.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport<T> {
    /// Base-station energy `E_t` (J).
    pub bs_energy: T,
    /// Per-terminal receiver energy `E_r,k` (J).
    pub mt_energy: Vec<T>,
    /// `sum alpha_k E_r,k` (J).
    pub mt_energy_weighted: T,
    /// `alpha0 E_t + sum alpha_k E_r,k` (J).
    pub wstre: T,
    /// Sum demand over base-station energy (bits/J).
    pub ee_bs: T,
    /// Sum demand over summed terminal energy (bits/J).
    pub ee_mt: T,
    /// Sum demand per unit time and bandwidth (bits/s/Hz).
    pub spectral_efficiency: T,
}

/// Power-constraint multiplier: scalar for the D-TDMA problem, one per
/// subcarrier for the OFDMA problem.
#[derive(Clone, Debug, PartialEq)]
pub enum DualBeta<T> {
    Scalar(T),
    PerSubcarrier(Vec<T>),
}

/// Optimal dual variables attesting a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate<T> {
    /// Multipliers of the per-terminal data constraints.
    pub lambda: Vec<T>,
    pub beta: DualBeta<T>,
    /// `primal - dual` in the problem's objective unit.
    pub gap: T,
}

/// `W log2(1 + h p / (Γ N0 W))`.
pub fn subcarrier_rate<T: Scalar>(cfg: &SystemConfig<T>, h: T, p: T) -> Result<T> {
    if !(p >= T::zero()) {
        return Err(Error::Domain(format!("negative power {p}")));
    }
    if !(h > T::zero()) {
        return Err(Error::Domain(format!("non-positive gain {h}")));
    }
    let f = h / (cfg.gamma() * cfg.n0() * cfg.w());
    Ok(rate_normalized(cfg, f, p))
}

/// `W log2(1 + f p)` for a normalized gain `f`.
#[inline]
pub fn rate_normalized<T: Scalar>(cfg: &SystemConfig<T>, f: T, p: T) -> T {
    cfg.w() * (f * p).ln_1p() / T::LN_2()
}

/// Power needed on a subcarrier with normalized gain `f` to carry rate `r`:
/// `(e^{a r} - 1) / f`.
pub fn invert_rate<T: Scalar>(cfg: &SystemConfig<T>, f: T, r: T) -> Result<T> {
    if !(f > T::zero()) {
        return Err(Error::Domain(format!("non-positive normalized gain {f}")));
    }
    if !(r >= T::zero()) {
        return Err(Error::Domain(format!("negative rate {r}")));
    }
    Ok((cfg.a() * r).exp_m1() / f)
}

/// Energies and efficiencies of a structurally valid allocation.
pub fn energy_report<T: Scalar>(
    cfg: &SystemConfig<T>,
    demand: &DemandVector<T>,
    alloc: &Allocation<T>,
) -> Result<EnergyReport<T>> {
    if alloc.k() != demand.len() || alloc.k() != cfg.k() {
        return Err(Error::Shape(format!(
            "allocation has {} terminals, demand {}, config {}",
            alloc.k(),
            demand.len(),
            cfg.k()
        )));
    }
    let v = alloc.check_structure(cfg.tol().slack);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let tt = alloc.duration;
    let bs_energy = tt * alloc.average_power() + tt * cfg.p_tc();
    let mt_energy: Vec<T> = alloc.on_time.iter().map(|&t| cfg.p_rc() * t).collect();
    let mt_energy_weighted: T = mt_energy
        .iter()
        .zip(cfg.alphas())
        .map(|(&e, &a)| a * e)
        .sum();
    let q = demand.total();
    let mt_sum: T = mt_energy.iter().copied().sum();
    let ratio = |num: T, den: T| {
        if den > T::zero() {
            num / den
        } else {
            T::infinity()
        }
    };
    Ok(EnergyReport {
        bs_energy,
        wstre: cfg.alpha0() * bs_energy + mt_energy_weighted,
        mt_energy,
        mt_energy_weighted,
        ee_bs: ratio(q, bs_energy),
        ee_mt: ratio(q, mt_sum),
        spectral_efficiency: q / (tt * T::from_usize(alloc.n()).unwrap() * cfg.w()),
    })
}

/// All constraint violations of `alloc`; empty iff it is feasible.
pub fn validate_allocation<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    alloc: &Allocation<T>,
) -> Vec<Violation> {
    if alloc.k() != chan.k() || alloc.n() != chan.n() || demand.len() != chan.k() {
        return vec![Violation::new(ConstraintKind::Shape, vec![], f64::NAN)];
    }
    let slack = cfg.tol().slack;
    let mut out = alloc.check_structure(slack);
    if out.iter().any(|v| v.kind == ConstraintKind::Shape) {
        return out;
    }
    for (k, (&got, &need)) in alloc
        .delivered_bits(cfg, chan)
        .iter()
        .zip(demand.bits())
        .enumerate()
    {
        if !(got >= need - slack * need) {
            out.push(Violation::new(
                ConstraintKind::Demand,
                vec![k],
                (got - need).as_f64(),
            ));
        }
    }
    let pbar = alloc.average_power();
    if !(pbar <= cfg.p_avg() + slack * cfg.p_avg()) {
        out.push(Violation::new(
            ConstraintKind::AveragePower,
            vec![],
            (cfg.p_avg() - pbar).as_f64(),
        ));
    }
    out
}


#[cfg(test)]
mod tests {
    use super::testutil::unit_cfg;
    use super::*;
    use ndarray::array;

    fn cfg_with(p_tc: f64, p_rc: f64) -> SystemConfig<f64> {
        let mut p = unit_cfg(1).params().clone();
        p.p_tc_w = p_tc;
        p.p_rc_w = p_rc;
        SystemConfig::new(p).unwrap()
    }

    #[test]
    fn rate_unit_snr_is_one_bit() {
        let cfg = unit_cfg(1);
        assert!((subcarrier_rate(&cfg, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(subcarrier_rate(&cfg, 3.0, 0.0).unwrap(), 0.0);
        assert!(subcarrier_rate(&cfg, 1.0, -1.0).is_err());
    }

    #[test]
    fn rate_in_f32() {
        let p = unit_cfg(1).params().clone();
        let cfg32 = SystemConfig::<f32>::new(SystemParams {
            bandwidth_hz: p.bandwidth_hz as f32,
            noise_psd_w_per_hz: 1.0,
            snr_gap: 1.0,
            p_avg_w: 2.0,
            p_tc_w: 1.0,
            p_rc_w: 0.5,
            alpha0: 0.0,
            alphas: vec![1.0],
            t_max_s: None,
            tol: Tolerances::default(),
        })
        .unwrap();
        assert!((subcarrier_rate(&cfg32, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((invert_rate(&cfg32, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn paper_scale_rate_matches_high_precision_value() {
        // W = 2e4 Hz, Γ = 1, N0 = 10^-20.4 W/Hz, h = 1e-10, p = 1 W.
        // Reference from a 50-digit mpmath evaluation of W*log2(1+SNR).
        let mut p = unit_cfg(1).params().clone();
        p.bandwidth_hz = 2e4;
        p.noise_psd_w_per_hz = 10f64.powf(-20.4);
        let cfg = SystemConfig::new(p).unwrap();
        let r = subcarrier_rate(&cfg, 1e-10, 1.0).unwrap();
        let reference = 405_206.819_119_462_768;
        assert!(r.rel_diff(reference) < 1e-12, "{r}");
    }

    #[test]
    fn dbm_conversion() {
        let n0: f64 = dbm_per_hz_to_w(-174.0);
        assert!(n0.rel_diff(10f64.powf(-20.4)) < 1e-12);
    }

    #[test]
    fn invert_rate_basics() {
        let cfg = unit_cfg(1);
        assert_eq!(invert_rate(&cfg, 2.0, 0.0).unwrap(), 0.0);
        assert!((invert_rate(&cfg, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_bad_values() {
        let base = unit_cfg(2).params().clone();
        let mut p = base.clone();
        p.snr_gap = 0.5;
        assert!(SystemConfig::new(p).is_err());
        let mut p = base.clone();
        p.alphas = vec![0.0, 0.0];
        assert!(SystemConfig::new(p).is_err());
        let mut p = base.clone();
        p.t_max_s = Some(0.0);
        assert!(SystemConfig::new(p).is_err());
        let mut p = base;
        p.p_rc_w = 0.0;
        assert!(SystemConfig::new(p).is_err());
    }

    #[test]
    fn channel_normalization_consistent() {
        let mut p = unit_cfg(2).params().clone();
        p.bandwidth_hz = 2e4;
        p.noise_psd_w_per_hz = 4e-21;
        p.snr_gap = 2.0;
        let cfg = SystemConfig::new(p).unwrap();
        let ch = ChannelMatrix::new(array![[1e-10, 3e-11], [2e-12, 5e-9]], &cfg).unwrap();
        for k in 0..2 {
            for n in 0..2 {
                let back = ch.f(k, n) * 2.0 * 4e-21 * 2e4;
                assert!(back.rel_diff(ch.h(k, n)) < 1e-12);
            }
        }
        assert!(ChannelMatrix::new(array![[1.0, 0.0]], &cfg).is_err());
    }

    #[test]
    fn idle_frame_energy() {
        let cfg = cfg_with(20.0, 0.5);
        let d = DemandVector::new(vec![1.0]).unwrap();
        let alloc = Allocation {
            duration: 1.0,
            rho: array![[0.0, 0.0]],
            power: array![[0.0, 0.0]],
            on_time: vec![0.0],
            grouping: None,
        };
        let rep = energy_report(&cfg, &d, &alloc).unwrap();
        assert_eq!(rep.bs_energy, 20.0);
        assert_eq!(rep.mt_energy, vec![0.0]);
    }

    #[test]
    fn single_pair_energy_by_hand() {
        // E_t = T (rho p + P_tc) = 3 (2 + 20) = 66; E_r = 0.5 * 3 = 1.5.
        let cfg = cfg_with(20.0, 0.5);
        let d = DemandVector::new(vec![1.0]).unwrap();
        let alloc = Allocation {
            duration: 3.0,
            rho: array![[1.0]],
            power: array![[2.0]],
            on_time: vec![3.0],
            grouping: None,
        };
        let rep = energy_report(&cfg, &d, &alloc).unwrap();
        assert!((rep.bs_energy - 66.0).abs() < 1e-12);
        assert!((rep.mt_energy[0] - 1.5).abs() < 1e-12);
        assert_eq!(rep.wstre, cfg.alpha0() * rep.bs_energy + rep.mt_energy_weighted);
    }

    #[test]
    fn paper_constants_accepted() {
        let mut p = unit_cfg(4).params().clone();
        p.p_tc_w = 20.0;
        p.p_rc_w = 0.5;
        p.p_avg_w = 30.0;
        let cfg = SystemConfig::new(p).unwrap();
        assert_eq!((cfg.p_tc(), cfg.p_rc(), cfg.p_avg()), (20.0, 0.5, 30.0));
    }

    #[test]
    fn energy_report_rejects_structural_violation() {
        let cfg = cfg_with(1.0, 0.5);
        let d = DemandVector::new(vec![1.0]).unwrap();
        let alloc = Allocation {
            duration: 1.0,
            rho: array![[0.5]],
            power: array![[1.0]],
            on_time: vec![0.1],
            grouping: None,
        };
        match energy_report(&cfg, &d, &alloc) {
            Err(Error::Validation(v)) => assert_eq!(v[0].kind, ConstraintKind::OnTime),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversubscribed_subcarrier_flagged_once() {
        let cfg = unit_cfg(2);
        let ch = ChannelMatrix::new(array![[1.0, 1.0], [1.0, 1.0]], &cfg).unwrap();
        let d = DemandVector::new(vec![0.1, 0.1]).unwrap();
        let alloc = Allocation {
            duration: 1.0,
            rho: array![[0.75, 0.5], [0.75, 0.5]],
            power: array![[0.5, 0.5], [0.5, 0.5]],
            on_time: vec![1.0, 1.0],
            grouping: None,
        };
        let v = validate_allocation(&cfg, &ch, &d, &alloc);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].kind, ConstraintKind::SubcarrierShare);
        assert_eq!(v[0].indices, vec![0]);
    }

    #[test]
    fn zero_power_misses_every_demand() {
        let cfg = unit_cfg(3);
        let ch = ChannelMatrix::new(ndarray::Array2::from_elem((3, 2), 1.0), &cfg).unwrap();
        let d = DemandVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let alloc = Allocation {
            duration: 1.0,
            rho: ndarray::Array2::from_elem((3, 2), 1.0 / 3.0),
            power: ndarray::Array2::zeros((3, 2)),
            on_time: vec![1.0; 3],
            grouping: None,
        };
        let v = validate_allocation(&cfg, &ch, &d, &alloc);
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|x| x.kind == ConstraintKind::Demand));
    }

    #[test]
    fn grouping_checks() {
        let cfg = unit_cfg(2);
        let base = Allocation {
            duration: 2.0,
            rho: array![[0.5, 0.5], [0.5, 0.5]],
            power: array![[1.0, 1.0], [1.0, 1.0]],
            on_time: vec![1.0, 1.0],
            grouping: Some(vec![
                Slot { members: vec![0], duration: 1.0 },
                Slot { members: vec![1], duration: 1.0 },
            ]),
        };
        assert!(base.check_structure(cfg.tol().slack).is_empty());
        let mut bad = base.clone();
        bad.grouping = Some(vec![Slot { members: vec![0, 0], duration: 2.0 }]);
        let v = bad.check_structure(cfg.tol().slack);
        assert!(v.iter().all(|x| x.kind == ConstraintKind::Grouping));
        assert!(!v.is_empty());
    }
}
