//! Single solves of a scenario realization.

use clap::ValueEnum;
use ofdm_energy::scenario::{generate_channels, ScenarioSpec};
use ofdm_energy::temin::solve_temin_tmax;
use ofdm_energy::tsofdma::solve_wstremin_tmax;
use ofdm_energy::wsre::solve_wsremin_tdma_tmax;
use ofdm_energy::{
    energy_report, validate_allocation, ChannelMatrix, DemandVector, Result, SystemConfig,
    Tolerances,
};

use crate::output::{
    time_choice_name, AllocationOut, CertificateOut, DetailsOut, ReportOut, SolveOutput,
    ValidationOut,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    /// Weighted receiver energy under D-TDMA.
    Wsre,
    /// Base-station energy under OFDMA.
    Temin,
    /// Joint weighted energy under time-slotted OFDMA.
    Wstremin,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Wsre => "wsre",
            Solver::Temin => "temin",
            Solver::Wstremin => "wstremin",
        }
    }
}

/// Overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha0: Option<f64>,
    pub t_max: Option<f64>,
    /// Relative solver tolerance (time search, dual accuracy and the
    /// power-multiplier bracket).
    pub tol: Option<f64>,
}

/// Configuration, channel and demand of one realization.
pub fn instance(
    spec: &ScenarioSpec,
    seed: u64,
    ov: &Overrides,
) -> Result<(SystemConfig<f64>, ChannelMatrix<f64>, DemandVector<f64>)> {
    let mut cfg = spec.config::<f64>()?;
    if let Some(a0) = ov.alpha0 {
        cfg = cfg.with_weights(a0, spec.alphas.clone())?;
    }
    if ov.t_max.is_some() {
        cfg = cfg.with_t_max(ov.t_max)?;
    }
    if let Some(tol) = ov.tol {
        cfg = cfg.with_tolerances(Tolerances {
            beta_delta: tol,
            time_rel: tol,
            dual_rel: tol,
            ..Tolerances::default()
        })?;
    }
    let chan = generate_channels(spec, seed, &cfg)?;
    let demand = spec.demand()?;
    Ok((cfg, chan, demand))
}

pub fn run_solve(spec: &ScenarioSpec, solver: Solver, ov: &Overrides) -> Result<SolveOutput> {
    let seed = ov.seed.unwrap_or(spec.seed);
    let (cfg, chan, demand) = instance(spec, seed, ov)?;
    let all: Vec<usize> = (0..chan.k()).collect();
    let mut details = DetailsOut::default();
    let (alloc, certificates) = match solver {
        Solver::Wsre => {
            let (sol, alloc) = solve_wsremin_tdma_tmax(&cfg, &chan, &demand)?;
            (alloc, vec![CertificateOut::new("tdma", all, &sol.cert)])
        }
        Solver::Temin => {
            let res = solve_temin_tmax(&cfg, &chan, &demand)?;
            details.time_choice = Some(time_choice_name(res.slot.choice));
            details.p2_evaluations = Some(res.slot.evaluations);
            let cert = CertificateOut::new("ofdma", all, &res.slot.p2.cert);
            (res.allocation, vec![cert])
        }
        Solver::Wstremin => {
            let res = solve_wstremin_tmax(&cfg, &chan, &demand)?;
            details.slots = Some(res.j());
            details.candidates = res.candidates.clone();
            let best = res.best;
            let mut certs = Vec::new();
            if let Some(b) = &best.singletons {
                certs.push(CertificateOut::new("singletons", b.members.clone(), &b.solution.cert));
            }
            for s in &best.shared {
                certs.push(CertificateOut::new("shared", s.members.clone(), &s.solution.p2.cert));
            }
            (best.allocation, certs)
        }
    };
    let report = energy_report(&cfg, &demand, &alloc)?;
    let violations = validate_allocation(&cfg, &chan, &demand, &alloc);
    Ok(SolveOutput {
        solver: solver.name().to_string(),
        seed,
        alpha0: cfg.alpha0(),
        t_max_s: cfg.t_max(),
        version: env!("CARGO_PKG_VERSION"),
        allocation: AllocationOut::from(&alloc),
        report: ReportOut::from(&report),
        certificates,
        validation: ValidationOut::new(&violations),
        details,
    })
}
