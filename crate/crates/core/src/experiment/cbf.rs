//! Correlated bit-flip Monte Carlo: logical error rates of the tensor-network,
//! matching and (small lattices) exact maximum-likelihood decoders.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, ExperimentKind};
use super::output::ResultRow;
use super::stats::{par_map, trial_seed, wilson_interval, Z95};
use crate::baselines::{CosetTable, Mwpm};
use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, homology_class, recovery_frame, syndrome_of, Lattice, PauliFrame, Syndrome};
use crate::noise::{cbf_network_factors, CbfChain, ChainStart, IsingGeometry, IsingParams, MAX_ENUMERATION_SITES};
use crate::pauli::Pauli;

/// An error configuration drawn for one trial: a chain started from the
/// error-free configuration and run for `burn_in` sweeps.
pub fn sample_cbf_error(geo: &IsingGeometry, p: &IsingParams, burn_in: usize, seed: u64) -> PauliFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = CbfChain::new(geo, *p, ChainStart::AllUp, &mut rng);
    for _ in 0..burn_in {
        chain.sweep(&mut rng);
    }
    chain.config().to_frame()
}

/// Per-trial outcome: `Some(true)` is a logical failure, `None` a decode error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbfTrial {
    pub tn: Option<bool>,
    pub mwpm: Option<bool>,
    pub ml: Option<bool>,
}

/// Everything needed to run trials at one (d, β) point.
pub struct CbfPoint {
    pub lat: Lattice,
    pub params: IsingParams,
    geo: IsingGeometry,
    tn: Decoder,
    mwpm: Mwpm,
    ml: Option<CosetTable>,
}

impl CbfPoint {
    pub fn new(d: usize, params: IsingParams, dec: DecoderConfig) -> Result<Self> {
        let lat = build_lattice(d, d)?;
        let noise = cbf_network_factors(&params, &lat)?;
        let tn = Decoder::new(&lat, &noise, dec)?;
        let ml = if lat.num_qubits() <= MAX_ENUMERATION_SITES { Some(CosetTable::new(&params, &lat)?) } else { None };
        Ok(CbfPoint { geo: IsingGeometry::new(&lat), mwpm: Mwpm::new(&lat), tn, ml, params, lat })
    }

    pub fn decoder(&self) -> &Decoder {
        &self.tn
    }

    /// Runs one trial; `cache` memoizes decoder outputs by syndrome.
    pub fn trial(&self, burn_in: usize, seed: u64, cache: &mut HashMap<Syndrome, [Option<Pauli>; 3]>) -> Result<CbfTrial> {
        let e = sample_cbf_error(&self.geo, &self.params, burn_in, seed);
        let s = syndrome_of(&e, &self.lat)?;
        let r = recovery_frame(&s, &self.lat)?;
        let truth = homology_class(&e.compose(&r), &self.lat)?;
        let out = match cache.get(&s) {
            Some(v) => *v,
            None => {
                let v = [
                    self.tn.decode(&s).ok().map(|d| d.correction),
                    self.mwpm.decode(&s).ok(),
                    self.ml.as_ref().and_then(|t| t.decode(&s).ok()),
                ];
                cache.insert(s, v);
                v
            }
        };
        let fail = |c: Option<Pauli>| c.map(|c| c != truth);
        Ok(CbfTrial { tn: fail(out[0]), mwpm: fail(out[1]), ml: self.ml.as_ref().and(fail(out[2])) })
    }
}

fn rate_row(cfg: &ExperimentConfig, point: &CbfPoint, d: usize, inv_beta: f64, decoder: &str, outcomes: &[Option<bool>]) -> ResultRow {
    let done: Vec<bool> = outcomes.iter().flatten().copied().collect();
    let failures = done.iter().filter(|&&f| f).count();
    let n = done.len();
    let rate = if n > 0 { failures as f64 / n as f64 } else { f64::NAN };
    let (_, half) = wilson_interval(failures, n, Z95);
    ResultRow {
        experiment: kind_name(cfg.kind).into(),
        decoder: decoder.into(),
        metric: "logical-error-rate".into(),
        size: d,
        width: point.lat.width(),
        height: point.lat.height(),
        qubits: point.lat.num_qubits(),
        param: "inv_beta".into(),
        param_value: inv_beta,
        chi: cfg.chi,
        norm: norm_name(cfg),
        samples: outcomes.len(),
        seed: cfg.seed,
        value: rate,
        half_width: half,
        failures: Some(failures),
        decode_errors: outcomes.len() - n,
        wall_time_s: None,
    }
}

pub(crate) fn kind_name(k: ExperimentKind) -> &'static str {
    match k {
        ExperimentKind::AdSweep => "ad-sweep",
        ExperimentKind::AdSizeSweep => "ad-size-sweep",
        ExperimentKind::CbfSweep => "cbf-sweep",
        ExperimentKind::OracleCheck => "oracle-check",
        ExperimentKind::Timing => "timing",
    }
}

pub(crate) fn norm_name(cfg: &ExperimentConfig) -> String {
    serde_json::to_value(cfg.norm).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Logical error rates per (d, 1/β), with Wilson intervals. Rows come in
/// config order: sizes outermost, then 1/β, then decoders tn, mwpm and
/// (when the lattice is small enough to enumerate) optimal.
pub fn run_cbf_benchmark(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if cfg.kind != ExperimentKind::CbfSweep {
        return Err(Error::Config("run_cbf_benchmark needs a cbf-sweep config".into()));
    }
    cfg.validate()?;
    let dec = DecoderConfig { chi: cfg.chi, norm: cfg.norm, ..DecoderConfig::default() };
    let mut rows = Vec::new();
    let mut point_index = 0u64;
    for &d in &cfg.sizes {
        for &ib in &cfg.inv_betas {
            let point = CbfPoint::new(d, cfg.ising(ib), dec)?;
            let pi = point_index;
            point_index += 1;
            let trials = par_map(cfg.samples, cfg.workers, HashMap::new, |cache, i| {
                point.trial(cfg.burn_in_sweeps, trial_seed(cfg.seed, pi, i as u64), cache)
            });
            let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;
            let pick = |f: fn(&CbfTrial) -> Option<bool>| trials.iter().map(f).collect::<Vec<_>>();
            rows.push(rate_row(cfg, &point, d, ib, "tn", &pick(|t| t.tn)));
            rows.push(rate_row(cfg, &point, d, ib, "mwpm", &pick(|t| t.mwpm)));
            if point.ml.is_some() {
                rows.push(rate_row(cfg, &point, d, ib, "optimal", &pick(|t| t.ml)));
            }
        }
    }
    Ok(rows)
}
