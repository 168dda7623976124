//! Syndrome sampling for general (non-Pauli) noise by the chain rule:
//! checks are drawn one at a time from their conditional distribution given
//! the outcomes drawn so far. The logical input is maximally mixed, so the
//! sampled distribution is `p(s) = tr[Π_s N(Π_C)] / 2`.

use std::collections::HashMap;

use rand::Rng;

use crate::decoder::{CodeNetwork, ContractionMode, DecoderConfig, FaceWeight};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Syndrome};
use crate::noise::NoiseNetworkFactor;
use crate::oracle::DenseOracle;

/// Probability of a partial outcome assignment (checks ordered X first).
pub trait OutcomeModel {
    fn lattice(&self) -> &Lattice;
    fn marginal(&mut self, outcomes: &[Option<bool>]) -> Result<f64>;
}

impl OutcomeModel for DenseOracle {
    fn lattice(&self) -> &Lattice {
        DenseOracle::lattice(self)
    }

    fn marginal(&mut self, outcomes: &[Option<bool>]) -> Result<f64> {
        Ok(self.marginal_probability(outcomes))
    }
}

/// Marginals from exact contractions of the code network with unmeasured
/// checks, memoized by prefix.
#[derive(Debug, Clone)]
pub struct NetworkOutcomes {
    net: CodeNetwork,
    cfg: DecoderConfig,
    cache: HashMap<Vec<Option<bool>>, f64>,
}

impl NetworkOutcomes {
    /// `chi` should be large enough for exact contraction.
    pub fn new(lat: &Lattice, noise: &NoiseNetworkFactor, chi: usize) -> Result<Self> {
        let net = CodeNetwork::new(lat, noise, ContractionMode::Collapsed)?;
        Ok(NetworkOutcomes { net, cfg: DecoderConfig::with_chi(chi), cache: HashMap::new() })
    }

    pub fn cached_prefixes(&self) -> usize {
        self.cache.len()
    }
}

impl OutcomeModel for NetworkOutcomes {
    fn lattice(&self) -> &Lattice {
        self.net.lattice()
    }

    fn marginal(&mut self, outcomes: &[Option<bool>]) -> Result<f64> {
        if let Some(&p) = self.cache.get(outcomes) {
            return Ok(p);
        }
        let weights = outcomes.iter().map(|o| o.map_or(FaceWeight::Unmeasured, FaceWeight::Measured)).collect();
        let v = self.net.with_weights(weights)?.trace_value(&self.cfg)?;
        let p = (v.value().re / 2.0).max(0.0);
        self.cache.insert(outcomes.to_vec(), p);
        Ok(p)
    }
}

/// Draws one syndrome check by check.
pub fn sample_syndrome<M: OutcomeModel>(model: &mut M, rng: &mut impl Rng) -> Result<Syndrome> {
    let lat = model.lattice().clone();
    let m = lat.num_checks();
    let mut outcomes: Vec<Option<bool>> = vec![None; m];
    let mut p_prefix = model.marginal(&outcomes)?;
    for f in 0..m {
        outcomes[f] = Some(true);
        let p1 = model.marginal(&outcomes)?;
        if !(p_prefix > 0.0) {
            return Err(Error::ZeroProbability);
        }
        let cond = (p1 / p_prefix).clamp(0.0, 1.0);
        if rng.gen::<f64>() < cond {
            p_prefix = p1;
        } else {
            outcomes[f] = Some(false);
            p_prefix = model.marginal(&outcomes)?;
        }
    }
    let nx = lat.x_faces().len();
    let flips: Vec<bool> = outcomes.iter().map(|o| o.unwrap()).collect();
    Ok(Syndrome { x: flips[..nx].to_vec(), z: flips[nx..].to_vec() })
}

/// Dense chain-rule sampling (lattices within the dense bound).
pub fn sample_syndrome_general(oracle: &mut DenseOracle, rng: &mut impl Rng) -> Result<Syndrome> {
    sample_syndrome(oracle, rng)
}
