//! α0 x J tradeoff sweeps over channel realizations.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use clap::ValueEnum;
use ofdm_energy::scenario::ScenarioSpec;
use ofdm_energy::tsofdma::{
    cog_grouping, exhaustive_grouping, partitions, solve_grouping, solve_grouping_tmax,
    GroupedSolution, Grouping, EXHAUSTIVE_MAX_K,
};
use ofdm_energy::{ChannelMatrix, DemandVector, Error, Result, SystemConfig};
use serde::Serialize;

use crate::solve::{instance, Overrides};

pub const COLUMNS: [&str; 11] = [
    "seed",
    "J",
    "mode",
    "alpha0",
    "E_t_J",
    "E_r_weighted_J",
    "ee_bs_bits_per_J",
    "ee_mt_bits_per_J",
    "se_bits_per_s_per_Hz",
    "T_s",
    "runtime_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Correlation-based grouping heuristic.
    Cog,
    /// Best of all partitions into J slots.
    Exhaustive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Cog => "cog",
            Mode::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    /// One row per seed.
    PerSeed,
    /// Rows averaged over seeds; the seed column reads `mean`.
    Mean,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub alpha0: Vec<f64>,
    pub j_values: Vec<usize>,
    pub modes: Vec<Mode>,
    pub seeds: Vec<u64>,
    pub aggregate: Aggregate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl SweepSpec {
    /// Every `J` in `1..=K`, COG grouping, the default α0 grid, one seed.
    pub fn defaults(spec: &ScenarioSpec) -> Self {
        Self {
            alpha0: default_alpha0_grid(spec),
            j_values: (1..=spec.k()).collect(),
            modes: vec![Mode::Cog],
            seeds: vec![spec.seed],
            aggregate: Aggregate::PerSeed,
            t_max_s: None,
            tol: None,
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.alpha0.is_empty() || self.j_values.is_empty() || self.modes.is_empty() {
            return Err(Error::Config("sweep grids must be nonempty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one realization is required".into()));
        }
        if let Some(a) = self.alpha0.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alpha0 value {a} must be finite and nonnegative")));
        }
        if let Some(j) = self.j_values.iter().find(|&&j| j == 0 || j > k) {
            return Err(Error::Config(format!("J = {j} outside 1..={k}")));
        }
        if self.modes.contains(&Mode::Exhaustive) && k > EXHAUSTIVE_MAX_K {
            return Err(Error::TooLarge(format!(
                "exhaustive grouping refused for K = {k}; it is limited to K <= {EXHAUSTIVE_MAX_K}"
            )));
        }
        Ok(())
    }
}

/// `0` followed by 25 log-spaced points from `1e-3` to `1e3` times
/// `P_rc / P_tc`.
pub fn default_alpha0_grid(spec: &ScenarioSpec) -> Vec<f64> {
    let base = spec.p_rc_w / spec.p_tc_w;
    let mut grid = vec![0.0];
    grid.extend(log_space(1e-3 * base, 1e3 * base, 25));
    grid
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Parses `v1,v2,...` or a log-spaced range `lo:hi:n` (with `lo > 0`).
pub fn parse_alpha0(s: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Config(format!("alpha0 '{s}': {what}"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let mut out = if let [lo, hi, n] = s.split(':').collect::<Vec<_>>()[..] {
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n.trim().parse().map_err(|_| bad("point count"))?;
        if !(lo > 0.0 && hi >= lo && n >= 1) {
            return Err(bad("range needs 0 < lo <= hi and n >= 1"));
        }
        log_space(lo, hi, n)
    } else if s.contains(':') {
        return Err(bad("range must be lo:hi:n"));
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// `None` for rows averaged over seeds.
    pub seed: Option<u64>,
    pub j: usize,
    pub mode: Mode,
    pub alpha0: f64,
    pub e_t: f64,
    pub e_r_weighted: f64,
    pub ee_bs: f64,
    pub ee_mt: f64,
    pub se: f64,
    pub t: f64,
    pub runtime_ms: f64,
}

struct Job {
    seed: u64,
    j: usize,
    mode: Mode,
    alpha0: f64,
}

fn best_partition(
    cfg: &SystemConfig<f64>,
    chan: &ChannelMatrix<f64>,
    demand: &DemandVector<f64>,
    j: usize,
    t_max: f64,
) -> Result<GroupedSolution<f64>> {
    let mut best: Option<GroupedSolution<f64>> = None;
    let mut last_err = None;
    for slots in partitions(chan.k(), j) {
        let g = Grouping::from_slots(chan, slots)?;
        match solve_grouping_tmax(cfg, chan, demand, &g, t_max) {
            Ok(s) => {
                if best.as_ref().map(|b| s.objective() < b.objective()).unwrap_or(true) {
                    best = Some(s);
                }
            }
            Err(e) if e.is_infeasible() => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one partition"))
}

fn run_cell(spec: &ScenarioSpec, sweep: &SweepSpec, job: &Job) -> Result<Row> {
    let ov = Overrides {
        seed: Some(job.seed),
        alpha0: Some(job.alpha0),
        t_max: sweep.t_max_s,
        tol: sweep.tol,
    };
    let start = Instant::now();
    let (cfg, chan, demand) = instance(spec, job.seed, &ov)?;
    let sol = match (job.mode, sweep.t_max_s) {
        (Mode::Cog, None) => solve_grouping(&cfg, &chan, &demand, &cog_grouping(&chan, job.j)?)?,
        (Mode::Cog, Some(tm)) => {
            solve_grouping_tmax(&cfg, &chan, &demand, &cog_grouping(&chan, job.j)?, tm)?
        }
        (Mode::Exhaustive, None) => exhaustive_grouping(&cfg, &chan, &demand, job.j)?,
        (Mode::Exhaustive, Some(tm)) => best_partition(&cfg, &chan, &demand, job.j, tm)?,
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let r = &sol.report;
    Ok(Row {
        seed: Some(job.seed),
        j: job.j,
        mode: job.mode,
        alpha0: job.alpha0,
        e_t: r.bs_energy,
        e_r_weighted: r.mt_energy_weighted,
        ee_bs: r.ee_bs,
        ee_mt: r.ee_mt,
        se: r.spectral_efficiency,
        t: sol.allocation.duration,
        runtime_ms,
    })
}

/// Runs every `(seed, J, mode, α0)` cell on `workers` threads. Rows come
/// back sorted by that key regardless of completion order.
pub fn run_sweep(spec: &ScenarioSpec, sweep: &SweepSpec, workers: usize) -> Result<Vec<Row>> {
    sweep.validate(spec.k())?;
    let mut alpha0 = sweep.alpha0.clone();
    alpha0.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut seeds = sweep.seeds.clone();
    seeds.sort_unstable();
    let mut js = sweep.j_values.clone();
    js.sort_unstable();
    let mut modes = sweep.modes.clone();
    modes.sort();

    let mut jobs = Vec::new();
    for &seed in &seeds {
        for &j in &js {
            for &mode in &modes {
                for &a in &alpha0 {
                    jobs.push(Job {
                        seed,
                        j,
                        mode,
                        alpha0: a,
                    });
                }
            }
        }
    }

    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(jobs.len()));
    thread::scope(|s| {
        for _ in 0..workers.max(1).min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let r = run_cell(spec, sweep, job);
                done.lock().unwrap().push((i, r));
            });
        }
    });
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|(i, _)| *i);
    let rows = done
        .into_iter()
        .map(|(i, r)| {
            r.map_err(|e| match e {
                Error::Infeasible { reason, diagnostic } => Error::Infeasible {
                    reason: format!(
                        "seed {}, J = {}, alpha0 = {}: {reason}",
                        jobs[i].seed, jobs[i].j, jobs[i].alpha0
                    ),
                    diagnostic,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match sweep.aggregate {
        Aggregate::PerSeed => rows,
        Aggregate::Mean => mean_over_seeds(&rows),
    })
}

/// Averages rows sharing `(J, mode, α0)`.
pub fn mean_over_seeds(rows: &[Row]) -> Vec<Row> {
    let mut out: Vec<(Row, usize)> = Vec::new();
    for r in rows {
        match out
            .iter_mut()
            .find(|(m, _)| m.j == r.j && m.mode == r.mode && m.alpha0 == r.alpha0)
        {
            Some((m, n)) => {
                m.e_t += r.e_t;
                m.e_r_weighted += r.e_r_weighted;
                m.ee_bs += r.ee_bs;
                m.ee_mt += r.ee_mt;
                m.se += r.se;
                m.t += r.t;
                m.runtime_ms += r.runtime_ms;
                *n += 1;
            }
            None => out.push((Row { seed: None, ..r.clone() }, 1)),
        }
    }
    let mut out: Vec<Row> = out
        .into_iter()
        .map(|(mut m, n)| {
            let n = n as f64;
            m.e_t /= n;
            m.e_r_weighted /= n;
            m.ee_bs /= n;
            m.ee_mt /= n;
            m.se /= n;
            m.t /= n;
            m.runtime_ms /= n;
            m
        })
        .collect();
    out.sort_by(|a, b| {
        (a.j, a.mode)
            .cmp(&(b.j, b.mode))
            .then(a.alpha0.partial_cmp(&b.alpha0).unwrap())
    });
    out
}

fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv<W: Write>(rows: &[Row], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(COLUMNS)?;
    for r in rows {
        wr.write_record([
            r.seed.map(|s| s.to_string()).unwrap_or_else(|| "mean".into()),
            r.j.to_string(),
            r.mode.name().to_string(),
            sci(r.alpha0),
            sci(r.e_t),
            sci(r.e_r_weighted),
            sci(r.ee_bs),
            sci(r.ee_mt),
            sci(r.se),
            sci(r.t),
            format!("{:.3}", r.runtime_ms),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    columns: [&'static str; 11],
    sweep: &'a SweepSpec,
    scenario: &'a ScenarioSpec,
}

/// TOML sidecar describing how a CSV was produced.
pub fn metadata_toml(spec: &ScenarioSpec, sweep: &SweepSpec) -> String {
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        columns: COLUMNS,
        sweep,
        scenario: spec,
    };
    toml::to_string(&meta).expect("metadata is plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ofdm_energy::scenario::default_paper_scenario;

    #[test]
    fn alpha0_list_and_range() {
        assert_eq!(parse_alpha0("1, 0,0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        let r = parse_alpha0("0.01:100:5").unwrap();
        assert_eq!(r.len(), 5);
        assert!((r[2] - 1.0).abs() < 1e-12);
        assert!(parse_alpha0("0:1:3").is_err());
        assert!(parse_alpha0("1:2").is_err());
        assert!(parse_alpha0("x").is_err());
    }

    #[test]
    fn default_grid_spans_six_decades() {
        let spec = default_paper_scenario();
        let g = default_alpha0_grid(&spec);
        assert_eq!(g.len(), 26);
        assert_eq!(g[0], 0.0);
        let base = spec.p_rc_w / spec.p_tc_w;
        assert!((g[1] / base - 1e-3).abs() < 1e-15);
        assert!((g[25] / base - 1e3).abs() < 1e-9);
    }

    #[test]
    fn exhaustive_refused_above_limit() {
        let mut spec = default_paper_scenario();
        for _ in 0..3 {
            spec.distances_m.push(500.0);
            spec.demand_bits.push(1e4);
            spec.alphas.push(1.0);
        }
        let mut sweep = SweepSpec::defaults(&spec);
        sweep.modes = vec![Mode::Exhaustive];
        assert!(matches!(sweep.validate(spec.k()), Err(Error::TooLarge(_))));
    }

    #[test]
    fn mean_rows_average() {
        let row = |seed, e| Row {
            seed: Some(seed),
            j: 1,
            mode: Mode::Cog,
            alpha0: 1.0,
            e_t: e,
            e_r_weighted: e,
            ee_bs: e,
            ee_mt: e,
            se: e,
            t: e,
            runtime_ms: e,
        };
        let m = mean_over_seeds(&[row(1, 1.0), row(2, 3.0)]);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].seed, None);
        assert_eq!(m[0].e_t, 2.0);
    }
}
