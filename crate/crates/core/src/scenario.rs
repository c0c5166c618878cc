//! Reproducible scenarios: system constants, terminal layout and
//! frequency-selective Rayleigh channel draws.
//!
//! Each terminal's channel is `taps` equal-energy complex Gaussian taps at
//! delays `0..taps`, total mean energy `d^-pathloss_exp`, taken through an
//! unnormalized N-point DFT; the gain is `|H(n)|^2`. Draws use ChaCha20
//! seeded from the scenario seed with stream id = terminal index, so adding
//! terminals leaves earlier terminals' channels unchanged.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    dbm_per_hz_to_w, ChannelMatrix, DemandVector, SystemConfig, SystemParams, Tolerances,
};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

/// Redraws allowed per terminal before giving up on an all-nonzero channel.
const MAX_REDRAWS: usize = 16;

/// Scenario file contents. All quantities carry their unit in the name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub schema_version: u32,
    pub seed: u64,
    pub subcarriers: usize,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_per_hz: f64,
    pub snr_gap: f64,
    pub p_avg_w: f64,
    pub p_tc_w: f64,
    pub p_rc_w: f64,
    pub alpha0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    pub taps: usize,
    pub pathloss_exp: f64,
    pub distances_m: Vec<f64>,
    pub demand_bits: Vec<f64>,
    pub alphas: Vec<f64>,
}

/// Four terminals at 400/600/800/700 m needing 8.5/11.5/14.5/17.5 kbit over
/// 16 subcarriers of 20 kHz, six-tap Rayleigh fading, path-loss exponent 4.
pub fn default_paper_scenario() -> ScenarioSpec {
    ScenarioSpec {
        schema_version: SCHEMA_VERSION,
        seed: 1,
        subcarriers: 16,
        bandwidth_hz: 20e3,
        noise_psd_dbm_per_hz: -174.0,
        snr_gap: 1.0,
        p_avg_w: 30.0,
        p_tc_w: 20.0,
        p_rc_w: 0.5,
        alpha0: 1.0,
        t_max_s: None,
        taps: 6,
        pathloss_exp: 4.0,
        distances_m: vec![400.0, 600.0, 800.0, 700.0],
        demand_bits: vec![8500.0, 11500.0, 14500.0, 17500.0],
        alphas: vec![1.0; 4],
    }
}

impl ScenarioSpec {
    pub fn k(&self) -> usize {
        self.distances_m.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        if k == 0 {
            return Err(Error::Config("distances_m: no terminals".into()));
        }
        if self.demand_bits.len() != k || self.alphas.len() != k {
            return Err(Error::Config(format!(
                "distances_m, demand_bits and alphas must have equal lengths ({}, {}, {})",
                k,
                self.demand_bits.len(),
                self.alphas.len()
            )));
        }
        if self.taps == 0 {
            return Err(Error::Config("taps must be at least 1".into()));
        }
        if self.subcarriers == 0 {
            return Err(Error::Config("subcarriers must be at least 1".into()));
        }
        if !(self.pathloss_exp > 0.0) {
            return Err(Error::Config("pathloss_exp must be positive".into()));
        }
        if let Some(i) = self.distances_m.iter().position(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!("distances_m[{i}] must be positive")));
        }
        if !self.noise_psd_dbm_per_hz.is_finite() {
            return Err(Error::Config("noise_psd_dbm_per_hz must be finite".into()));
        }
        Ok(())
    }

    /// System configuration in scalar type `T`.
    pub fn config<T: Scalar>(&self) -> Result<SystemConfig<T>> {
        self.validate()?;
        SystemConfig::new(SystemParams {
            bandwidth_hz: T::lit(self.bandwidth_hz),
            noise_psd_w_per_hz: dbm_per_hz_to_w(T::lit(self.noise_psd_dbm_per_hz)),
            snr_gap: T::lit(self.snr_gap),
            p_avg_w: T::lit(self.p_avg_w),
            p_tc_w: T::lit(self.p_tc_w),
            p_rc_w: T::lit(self.p_rc_w),
            alpha0: T::lit(self.alpha0),
            alphas: self.alphas.iter().map(|&x| T::lit(x)).collect(),
            t_max_s: self.t_max_s.map(T::lit),
            tol: Tolerances::default(),
        })
    }

    pub fn demand<T: Scalar>(&self) -> Result<DemandVector<T>> {
        DemandVector::new(self.demand_bits.iter().map(|&x| T::lit(x)).collect())
    }
}

/// Raw gains `|H_k(n)|^2` and the number of tap vectors that had to be
/// redrawn because some subcarrier came out exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelDraw {
    pub gains: Array2<f64>,
    pub redraws: usize,
}

/// Draws the K x N gain matrix for `seed`.
pub fn draw_gains(spec: &ScenarioSpec, seed: u64) -> Result<ChannelDraw> {
    spec.validate()?;
    let (k, n) = (spec.k(), spec.subcarriers);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut gains = Array2::zeros((k, n));
    let mut redraws = 0;
    for kk in 0..k {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(kk as u64);
        let var = spec.distances_m[kk].powf(-spec.pathloss_exp) / spec.taps as f64;
        let sd = (var / 2.0).sqrt();
        let mut attempt = 0;
        loop {
            let mut buf = vec![Complex::new(0.0, 0.0); n];
            // Taps beyond N fold onto the circular channel.
            for i in 0..spec.taps {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                buf[i % n] += Complex::new(sd * re, sd * im);
            }
            fft.process(&mut buf);
            if buf.iter().all(|h| h.norm_sqr() > 0.0) {
                for (nn, h) in buf.iter().enumerate() {
                    gains[[kk, nn]] = h.norm_sqr();
                }
                break;
            }
            attempt += 1;
            redraws += 1;
            if attempt > MAX_REDRAWS {
                return Err(Error::Numeric(format!(
                    "terminal {kk}: channel has a zero subcarrier after {MAX_REDRAWS} redraws"
                )));
            }
        }
    }
    Ok(ChannelDraw { gains, redraws })
}

/// Channel matrix for `seed`, normalized against `cfg`.
pub fn generate_channels<T: Scalar>(
    spec: &ScenarioSpec,
    seed: u64,
    cfg: &SystemConfig<T>,
) -> Result<ChannelMatrix<T>> {
    let draw = draw_gains(spec, seed)?;
    ChannelMatrix::new(draw.gains.mapv(T::lit), cfg)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let spec: ScenarioSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

pub fn save_scenario(spec: &ScenarioSpec, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, scenario_to_string(spec)?)?;
    Ok(())
}

pub fn scenario_to_string(spec: &ScenarioSpec) -> Result<String> {
    spec.validate()?;
    toml::to_string(spec).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_channel_with_one_tap() {
        let mut spec = default_paper_scenario();
        spec.taps = 1;
        let g = draw_gains(&spec, 3).unwrap().gains;
        for row in g.rows() {
            assert!(row.iter().all(|&x| (x - row[0]).abs() <= 1e-12 * row[0]));
        }
    }

    #[test]
    fn parseval_per_terminal() {
        let spec = default_paper_scenario();
        // Re-draw the taps exactly as the generator does.
        for seed in 0..5 {
            let g = draw_gains(&spec, seed).unwrap().gains;
            for kk in 0..spec.k() {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                rng.set_stream(kk as u64);
                let var = spec.distances_m[kk].powf(-4.0) / 6.0;
                let mut energy = 0.0;
                for _ in 0..6 {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    energy += var / 2.0 * (re * re + im * im);
                }
                let freq: f64 = g.row(kk).sum() / spec.subcarriers as f64;
                assert!((freq - energy).abs() <= 1e-10 * energy);
            }
        }
    }

    #[test]
    fn adding_a_terminal_keeps_earlier_draws() {
        let spec = default_paper_scenario();
        let mut more = spec.clone();
        more.distances_m.push(500.0);
        more.demand_bits.push(1000.0);
        more.alphas.push(1.0);
        let a = draw_gains(&spec, 9).unwrap().gains;
        let b = draw_gains(&more, 9).unwrap().gains;
        for kk in 0..4 {
            assert_eq!(a.row(kk), b.row(kk));
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut spec = default_paper_scenario();
        spec.alphas.pop();
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
    }
}
