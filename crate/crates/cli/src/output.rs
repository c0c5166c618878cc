//! JSON shapes written by `solve`.

use ofdm_energy::temin::TimeChoice;
use ofdm_energy::{Allocation, DualBeta, DualCertificate, EnergyReport, Violation};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SlotOut {
    pub members: Vec<usize>,
    pub duration_s: f64,
}

#[derive(Debug, Serialize)]
pub struct AllocationOut {
    pub duration_s: f64,
    /// Row per terminal, column per subcarrier.
    pub rho: Vec<Vec<f64>>,
    pub power_w: Vec<Vec<f64>>,
    pub on_time_s: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Vec<SlotOut>>,
}

impl From<&Allocation<f64>> for AllocationOut {
    fn from(a: &Allocation<f64>) -> Self {
        let rows = |m: &ndarray::Array2<f64>| m.rows().into_iter().map(|r| r.to_vec()).collect();
        Self {
            duration_s: a.duration,
            rho: rows(&a.rho),
            power_w: rows(&a.power),
            on_time_s: a.on_time.clone(),
            grouping: a.grouping.as_ref().map(|g| {
                g.iter()
                    .map(|s| SlotOut {
                        members: s.members.clone(),
                        duration_s: s.duration,
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportOut {
    pub bs_energy_j: f64,
    pub mt_energy_j: Vec<f64>,
    pub mt_energy_weighted_j: f64,
    pub weighted_total_j: f64,
    pub ee_bs_bits_per_j: f64,
    pub ee_mt_bits_per_j: f64,
    pub se_bits_per_s_per_hz: f64,
}

impl From<&EnergyReport<f64>> for ReportOut {
    fn from(r: &EnergyReport<f64>) -> Self {
        Self {
            bs_energy_j: r.bs_energy,
            mt_energy_j: r.mt_energy.clone(),
            mt_energy_weighted_j: r.mt_energy_weighted,
            weighted_total_j: r.wstre,
            ee_bs_bits_per_j: r.ee_bs,
            ee_mt_bits_per_j: r.ee_mt,
            se_bits_per_s_per_hz: r.spectral_efficiency,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum BetaOut {
    Scalar(f64),
    PerSubcarrier(Vec<f64>),
}

/// Dual certificate of one solved block; `members` are global terminal
/// indices in the order of `lambda`.
#[derive(Debug, Serialize)]
pub struct CertificateOut {
    pub block: String,
    pub members: Vec<usize>,
    pub lambda: Vec<f64>,
    pub beta: BetaOut,
    pub gap: f64,
}

impl CertificateOut {
    pub fn new(block: &str, members: Vec<usize>, c: &DualCertificate<f64>) -> Self {
        Self {
            block: block.to_string(),
            members,
            lambda: c.lambda.clone(),
            beta: match &c.beta {
                DualBeta::Scalar(b) => BetaOut::Scalar(*b),
                DualBeta::PerSubcarrier(b) => BetaOut::PerSubcarrier(b.clone()),
            },
            gap: c.gap,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidationOut {
    pub feasible: bool,
    pub violations: Vec<String>,
}

impl ValidationOut {
    pub fn new(v: &[Violation]) -> Self {
        Self {
            feasible: v.is_empty(),
            violations: v.iter().map(|x| x.to_string()).collect(),
        }
    }
}

/// Solver-specific facts about how the schedule was reached.
#[derive(Debug, Default, Serialize)]
pub struct DetailsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_choice: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_evaluations: Option<usize>,
    /// `(J, objective)` of every grouping tried.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<(usize, f64)>,
}

pub fn time_choice_name(c: TimeChoice) -> &'static str {
    match c {
        TimeChoice::Stationary => "stationary",
        TimeChoice::PowerLimited => "power-limited",
        TimeChoice::TimeLimited => "time-limited",
    }
}

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub solver: String,
    pub seed: u64,
    pub alpha0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    pub version: &'static str,
    pub allocation: AllocationOut,
    pub report: ReportOut,
    pub certificates: Vec<CertificateOut>,
    pub validation: ValidationOut,
    pub details: DetailsOut,
}
