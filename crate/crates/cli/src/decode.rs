//! The `decode` input document and its report.

use serde::{Deserialize, Serialize};
use surftn::{
    amplitude_damping, build_lattice, cbf_network_factors, iid_network_factors, ContractionMode, Decoder, DecoderConfig,
    Error, IsingParams, KrausChannel, Lattice, NoiseNetworkFactor, SelectionNorm, Syndrome, C64,
};

/// Noise model block: a name plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    AmplitudeDamping {
        gamma: f64,
    },
    BitFlip {
        p: f64,
    },
    /// Correlated bit flips; `h`, `j1`, `j2` default to the benchmark values.
    Cbf {
        inv_beta: f64,
        #[serde(default = "default_h")]
        h: f64,
        #[serde(default = "default_j1")]
        j1: f64,
        #[serde(default = "default_j2")]
        j2: f64,
    },
    /// Explicit Kraus operators, each a 2x2 matrix of `[re, im]` pairs.
    Kraus {
        ops: Vec<[[[f64; 2]; 2]; 2]>,
    },
}

fn default_h() -> f64 {
    0.01
}
fn default_j1() -> f64 {
    1.0
}
fn default_j2() -> f64 {
    -1.5
}

impl NoiseSpec {
    pub fn factors(&self, lat: &Lattice) -> Result<NoiseNetworkFactor, Error> {
        match self {
            NoiseSpec::AmplitudeDamping { gamma } => iid_network_factors(&amplitude_damping(*gamma)?, lat),
            NoiseSpec::BitFlip { p } => iid_network_factors(&KrausChannel::bit_flip(*p)?, lat),
            NoiseSpec::Cbf { inv_beta, h, j1, j2 } => {
                if !(*inv_beta > 0.0) {
                    return Err(Error::Config(format!("inv_beta {inv_beta} must be positive")));
                }
                cbf_network_factors(&IsingParams { beta: 1.0 / inv_beta, h: *h, j1: *j1, j2: *j2 }, lat)
            }
            NoiseSpec::Kraus { ops } => {
                let ops = ops.iter().map(|m| m.map(|row| row.map(|[re, im]| C64::new(re, im)))).collect();
                iid_network_factors(&KrausChannel::new(ops)?, lat)
            }
        }
    }
}

/// Decoder options; unset fields take the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSpec {
    pub chi: Option<usize>,
    pub norm: Option<SelectionNorm>,
    pub tol: Option<f64>,
    pub mode: Option<ContractionMode>,
}

impl DecoderSpec {
    pub fn resolve(&self) -> DecoderConfig {
        let d = DecoderConfig::default();
        DecoderConfig {
            chi: self.chi.unwrap_or(d.chi),
            norm: self.norm.unwrap_or(d.norm),
            tol: self.tol.unwrap_or(d.tol),
            mode: self.mode.unwrap_or(d.mode),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeInput {
    pub width: usize,
    pub height: usize,
    pub noise: NoiseSpec,
    pub syndrome: Syndrome,
    #[serde(default)]
    pub decoder: DecoderSpec,
}

/// Everything the command reports, with the resolved input echoed.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeReport {
    pub config: serde_json::Value,
    pub lattice: serde_json::Value,
    pub correction: surftn::Pauli,
    pub distance: f64,
    /// Normalized logical PTM before correction, rows are outputs.
    pub channel_ptm: [[f64; 4]; 4],
    pub truncation_error: f64,
    pub network: surftn::NetworkKind,
}

/// Checks the input and prepares the lattice, noise and decoder settings.
pub fn prepare(input: &DecodeInput) -> Result<(Lattice, NoiseNetworkFactor, DecoderConfig), Error> {
    let lat = build_lattice(input.width, input.height)?;
    input.syndrome.validate(&lat)?;
    let cfg = input.decoder.resolve();
    cfg.validate()?;
    let noise = input.noise.factors(&lat)?;
    Ok((lat, noise, cfg))
}

pub fn run(input: &DecodeInput) -> Result<DecodeReport, Error> {
    let (lat, noise, cfg) = prepare(input)?;
    let r = Decoder::new(&lat, &noise, cfg)?.decode(&input.syndrome)?;
    let config = serde_json::json!({
        "width": input.width,
        "height": input.height,
        "noise": input.noise,
        "syndrome": input.syndrome,
        "decoder": cfg,
    });
    Ok(DecodeReport {
        config,
        lattice: lat.to_json(),
        correction: r.correction,
        distance: r.distance,
        channel_ptm: r.channel.ptm,
        truncation_error: r.stats.truncation_error,
        network: r.stats.kind,
    })
}
