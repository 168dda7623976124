//! Amplitude-damping Monte Carlo: mean diamond distance of the corrected
//! logical channel for the tensor-network, optimal and matching decoders.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cbf::{kind_name, norm_name};
use super::config::{ExperimentConfig, ExperimentKind};
use super::output::ResultRow;
use super::stats::{mean_interval, par_map, trial_seed};
use crate::baselines::Mwpm;
use crate::channels::{distance_from_identity, select_from_channel, QubitChannel, SelectionNorm};
use crate::decoder::{exact_chi, Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, Lattice, Syndrome};
use crate::noise::{amplitude_damping, iid_network_factors};
use crate::oracle::{DenseNoise, DenseOracle, MAX_DENSE_SITES};
use crate::pauli::Pauli;
use crate::sampling::{sample_syndrome, NetworkOutcomes};

/// The AD lattice of width parameter `w`: `2w-1` columns along the logical
/// X, `w` rows.
pub fn ad_lattice(w: usize) -> Result<Lattice> {
    build_lattice(2 * w - 1, w)
}

/// Source of exact syndromes and logical channels: the dense simulator when
/// the lattice is small enough, exact network contraction otherwise.
enum Exact {
    Dense(DenseOracle),
    Network { outcomes: NetworkOutcomes, decoder: Decoder },
}

/// Diamond distances of the corrected channel, indexed by decoder
/// (tn, optimal, mwpm); `None` for a decode error.
type Distances = [Option<f64>; 3];

enum Sampler {
    Dense(DenseOracle),
    Network(NetworkOutcomes),
}

struct Worker {
    sampler: Sampler,
    cache: HashMap<Syndrome, Distances>,
}

pub struct AdPoint {
    pub lat: Lattice,
    pub gamma: f64,
    tn: Decoder,
    mwpm: Mwpm,
    exact: Exact,
}

impl AdPoint {
    pub fn new(w: usize, gamma: f64, dec: DecoderConfig) -> Result<Self> {
        let lat = ad_lattice(w)?;
        let k = amplitude_damping(gamma)?;
        let noise = iid_network_factors(&k, &lat)?;
        let exact = if lat.num_qubits() <= MAX_DENSE_SITES {
            Exact::Dense(DenseOracle::new(&lat, DenseNoise::Iid(k))?)
        } else {
            let chi = exact_chi(&lat, &noise);
            Exact::Network {
                outcomes: NetworkOutcomes::new(&lat, &noise, chi)?,
                decoder: Decoder::new(&lat, &noise, DecoderConfig { chi, ..dec })?,
            }
        };
        Ok(AdPoint { tn: Decoder::new(&lat, &noise, dec)?, mwpm: Mwpm::new(&lat), exact, lat, gamma })
    }

    /// Worker-local state: a sampler (the network one memoizes prefixes)
    /// and a distance cache keyed by syndrome.
    fn worker(&self) -> Worker {
        let sampler = match &self.exact {
            Exact::Dense(o) => Sampler::Dense(o.clone()),
            Exact::Network { outcomes, .. } => Sampler::Network(outcomes.clone()),
        };
        Worker { sampler, cache: HashMap::new() }
    }

    fn exact_channel(&self, s: &Syndrome) -> Result<QubitChannel> {
        match &self.exact {
            Exact::Dense(o) => o.logical_channel(s)?.0.normalized(),
            Exact::Network { decoder, .. } => Ok(decoder.decode(s)?.channel),
        }
    }

    fn distances(&self, s: &Syndrome) -> Result<Distances> {
        let e = self.exact_channel(s)?;
        let (opt, opt_d) = select_from_channel(&e, SelectionNorm::Diamond)?;
        let mut memo: HashMap<Pauli, f64> = HashMap::from([(opt, opt_d)]);
        let mut dist = |p: Pauli| -> Result<f64> {
            if let Some(&d) = memo.get(&p) {
                return Ok(d);
            }
            let d = distance_from_identity(&QubitChannel::pauli_conjugation(p).compose(&e), SelectionNorm::Diamond)?;
            memo.insert(p, d);
            Ok(d)
        };
        let tn = match self.tn.decode(s) {
            Ok(r) => Some(dist(r.correction)?),
            Err(_) => None,
        };
        let mw = match self.mwpm.decode(s) {
            Ok(c) => Some(dist(c)?),
            Err(_) => None,
        };
        Ok([tn, Some(opt_d), mw])
    }

    fn trial(&self, w: &mut Worker, seed: u64) -> Result<Distances> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = match &mut w.sampler {
            Sampler::Dense(o) => sample_syndrome(o, &mut rng)?,
            Sampler::Network(o) => sample_syndrome(o, &mut rng)?,
        };
        if let Some(d) = w.cache.get(&s) {
            return Ok(*d);
        }
        let d = self.distances(&s)?;
        w.cache.insert(s, d);
        Ok(d)
    }
}

/// Mean diamond distance per (W, γ) and decoder (tn, optimal, mwpm).
pub fn run_ad_benchmark(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if !matches!(cfg.kind, ExperimentKind::AdSweep | ExperimentKind::AdSizeSweep) {
        return Err(Error::Config("run_ad_benchmark needs an ad-sweep or ad-size-sweep config".into()));
    }
    cfg.validate()?;
    let dec = DecoderConfig { chi: cfg.chi, norm: cfg.norm, ..DecoderConfig::default() };
    let mut rows = Vec::new();
    let mut point_index = 0u64;
    for &w in &cfg.sizes {
        for &g in &cfg.gammas {
            let point = AdPoint::new(w, g, dec)?;
            let pi = point_index;
            point_index += 1;
            let trials = par_map(cfg.samples, cfg.workers, || point.worker(), |st, i| point.trial(st, trial_seed(cfg.seed, pi, i as u64)));
            let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;
            for (k, name) in ["tn", "optimal", "mwpm"].into_iter().enumerate() {
                let xs: Vec<f64> = trials.iter().filter_map(|t| t[k]).collect();
                let (mean, half) = mean_interval(&xs);
                rows.push(ResultRow {
                    experiment: kind_name(cfg.kind).into(),
                    decoder: name.into(),
                    metric: "diamond-distance-mean".into(),
                    size: w,
                    width: point.lat.width(),
                    height: point.lat.height(),
                    qubits: point.lat.num_qubits(),
                    param: "gamma".into(),
                    param_value: g,
                    chi: cfg.chi,
                    norm: norm_name(cfg),
                    samples: cfg.samples,
                    seed: cfg.seed,
                    value: mean,
                    half_width: half,
                    failures: None,
                    decode_errors: cfg.samples - xs.len(),
                    wall_time_s: None,
                });
            }
        }
    }
    Ok(rows)
}
