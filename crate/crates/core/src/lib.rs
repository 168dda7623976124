//! Tensor-network decoding of the surface code under general local noise.

pub mod baselines;
pub mod boundary;
pub mod channels;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod sampling;
pub mod tensor;

pub use boundary::{contract_grid, BoundaryChain, Cell, GridNetwork, GridValue};
pub use error::{Error, Result};
pub use lattice::{build_lattice, homology_class, recovery_frame, syndrome_of, CheckKind, Face, Lattice, PauliFrame, Syndrome};
pub use pauli::{Pauli, PhasedPauli};
pub use tensor::{contract, svd_split, Split, Tensor, C64};
pub use baselines::{ml_decode_cbf_exact, mwpm_decode, CosetTable, Mwpm};
pub use channels::{
    diamond_distance_from_identity, select_correction, trace_distance_from_identity, KrausChannel, LogicalChoi,
    QubitChannel, SelectionNorm,
};
pub use decoder::{build_code_network, decode, ContractionMode, DecodeResult, Decoder, DecoderConfig, NetworkKind};
pub use noise::{
    amplitude_damping, cbf_energy, cbf_mcmc_sample, cbf_network_factors, iid_network_factors, IsingParams,
    NoiseNetworkFactor, SpinConfig,
};
pub use oracle::{DenseNoise, DenseOracle};
pub use sampling::{sample_syndrome, NetworkOutcomes, OutcomeModel};
