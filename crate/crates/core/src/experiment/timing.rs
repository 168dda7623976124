//! Decode wall time against lattice size for CBF noise.

use std::time::Instant;

use super::cbf::{kind_name, norm_name, sample_cbf_error};
use super::config::{ExperimentConfig, ExperimentKind};
use super::output::ResultRow;
use super::stats::{linear_fit, mean_interval, power_law_exponent, trial_seed, LinearFit};
use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, recovery_frame, syndrome_of};
use crate::noise::{cbf_network_factors, IsingGeometry};

/// Mean per-decode times at one size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingPoint {
    pub d: usize,
    pub qubits: usize,
    /// Full decode: recovery, contraction and correction selection.
    pub decode_s: f64,
    pub decode_half_width: f64,
    /// Logical-Choi contraction only.
    pub contraction_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub points: Vec<TimingPoint>,
    /// `t = a·N + b` fit of the decode times.
    pub decode_fit: LinearFit,
    /// Log-log slope of decode time against `N`.
    pub decode_exponent: f64,
    pub contraction_fit: LinearFit,
    pub contraction_exponent: f64,
}

/// Times `cfg.samples` decodes per size, after one warm-up, on one thread (workers are ignored
/// so the measurements do not compete for cores). Syndromes come from the
/// CBF sampler at the first 1/β.
pub fn run_timing(cfg: &ExperimentConfig) -> Result<TimingReport> {
    if cfg.kind != ExperimentKind::Timing {
        return Err(Error::Config("run_timing needs a timing config".into()));
    }
    cfg.validate()?;
    let params = cfg.ising(cfg.inv_betas[0]);
    let dec = DecoderConfig { chi: cfg.chi, norm: cfg.norm, ..DecoderConfig::default() };
    let mut points = Vec::new();
    for (pi, &d) in cfg.sizes.iter().enumerate() {
        let lat = build_lattice(d, d)?;
        let noise = cbf_network_factors(&params, &lat)?;
        let decoder = Decoder::new(&lat, &noise, dec)?;
        let geo = IsingGeometry::new(&lat);
        let mut decode_times = Vec::with_capacity(cfg.samples);
        let mut contraction = 0.0;
        // one untimed decode so allocations and caches are warm
        let e = sample_cbf_error(&geo, &params, cfg.burn_in_sweeps, trial_seed(cfg.seed, pi as u64, u64::MAX));
        decoder.decode(&syndrome_of(&e, &lat)?)?;
        for i in 0..cfg.samples {
            let e = sample_cbf_error(&geo, &params, cfg.burn_in_sweeps, trial_seed(cfg.seed, pi as u64, i as u64));
            let s = syndrome_of(&e, &lat)?;
            let start = Instant::now();
            let res = decoder.decode(&s);
            decode_times.push(start.elapsed().as_secs_f64());
            res?;
            let r = recovery_frame(&s, &lat)?;
            let sn = decoder.network().impose_syndrome(&s, &r)?;
            let start = Instant::now();
            sn.logical_choi(&dec)?;
            contraction += start.elapsed().as_secs_f64();
        }
        let (mean, half) = mean_interval(&decode_times);
        points.push(TimingPoint {
            d,
            qubits: lat.num_qubits(),
            decode_s: mean,
            decode_half_width: half,
            contraction_s: contraction / cfg.samples as f64,
        });
    }
    let n: Vec<f64> = points.iter().map(|p| p.qubits as f64).collect();
    let t: Vec<f64> = points.iter().map(|p| p.decode_s).collect();
    let c: Vec<f64> = points.iter().map(|p| p.contraction_s).collect();
    let enough = points.len() >= 2;
    Ok(TimingReport {
        decode_fit: if enough { linear_fit(&n, &t) } else { LinearFit { slope: f64::NAN, intercept: f64::NAN, r2: f64::NAN } },
        decode_exponent: if enough { power_law_exponent(&n, &t) } else { f64::NAN },
        contraction_fit: if enough { linear_fit(&n, &c) } else { LinearFit { slope: f64::NAN, intercept: f64::NAN, r2: f64::NAN } },
        contraction_exponent: if enough { power_law_exponent(&n, &c) } else { f64::NAN },
        points,
    })
}

impl TimingReport {
    /// Per-size rows followed by fit summaries (size 0).
    pub fn rows(&self, cfg: &ExperimentConfig) -> Vec<ResultRow> {
        let base = ResultRow {
            experiment: kind_name(cfg.kind).into(),
            decoder: "tn".into(),
            metric: String::new(),
            size: 0,
            width: 0,
            height: 0,
            qubits: 0,
            param: "inv_beta".into(),
            param_value: cfg.inv_betas[0],
            chi: cfg.chi,
            norm: norm_name(cfg),
            samples: cfg.samples,
            seed: cfg.seed,
            value: 0.0,
            half_width: 0.0,
            failures: None,
            decode_errors: 0,
            wall_time_s: None,
        };
        let mut rows = Vec::new();
        for p in &self.points {
            let at = ResultRow { size: p.d, width: p.d, height: p.d, qubits: p.qubits, ..base.clone() };
            rows.push(ResultRow {
                metric: "decode-time-s".into(),
                value: p.decode_s,
                half_width: p.decode_half_width,
                wall_time_s: Some(p.decode_s * cfg.samples as f64),
                ..at.clone()
            });
            rows.push(ResultRow {
                metric: "contraction-time-s".into(),
                value: p.contraction_s,
                wall_time_s: Some(p.contraction_s * cfg.samples as f64),
                ..at
            });
        }
        let fits = [
            ("decode-affine-r2", self.decode_fit.r2),
            ("decode-affine-slope-s", self.decode_fit.slope),
            ("decode-loglog-exponent", self.decode_exponent),
            ("contraction-affine-r2", self.contraction_fit.r2),
            ("contraction-loglog-exponent", self.contraction_exponent),
        ];
        for (m, v) in fits {
            rows.push(ResultRow { metric: m.into(), value: v, ..base.clone() });
        }
        rows
    }
}
