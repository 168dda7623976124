//! Benchmark noise models: i.i.d. amplitude damping and correlated bit-flip
//! (CBF) noise drawn from an Ising-type Boltzmann distribution.
//!
//! CBF energy: `E(σ) = -h Σσ_i - J1 Σ_<ij> σ_i σ_j - J2 Σ_f Π_{i∈f} σ_i`,
//! where the four-body sum runs over the Z-check faces (the faces whose
//! checks detect bit flips), so the J2 term is fixed by the syndrome.

use crate::channels::{ptm_from_kraus, KrausChannel, Ptm};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, PauliFrame};
use crate::tensor::{C64, ONE, ZERO};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("damping parameter {gamma} outside [0,1]")));
    }
    let k0 = [[ONE, ZERO], [ZERO, C64::new((1.0 - gamma).sqrt(), 0.0)]];
    let k1 = [[ZERO, C64::new(gamma.sqrt(), 0.0)], [ZERO, ZERO]];
    KrausChannel::new(vec![k0, k1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub beta: f64,
    pub h: f64,
    pub j1: f64,
    pub j2: f64,
}

impl IsingParams {
    /// J1 = 1, J2 = -1.5, h = 0.01 at inverse temperature `beta`.
    pub fn benchmark(beta: f64) -> Self {
        IsingParams { beta, h: 0.01, j1: 1.0, j2: -1.5 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.beta, self.h, self.j1, self.j2].iter().all(|v| v.is_finite());
        if !finite || self.beta < 0.0 {
            return Err(Error::Domain(format!("invalid Ising parameters {self:?}")));
        }
        Ok(())
    }
}

/// One spin per site; -1 marks a bit flip.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    pub spins: Vec<i8>,
}

impl SpinConfig {
    pub fn all_up(n: usize) -> Self {
        SpinConfig { spins: vec![1; n] }
    }

    /// Bit `i` of `mask` set means site `i` is flipped.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        SpinConfig { spins: (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect() }
    }

    pub fn to_frame(&self) -> PauliFrame {
        let n = self.spins.len();
        PauliFrame { x: self.spins.iter().map(|&s| s < 0).collect(), z: vec![false; n] }
    }
}

/// Precomputed neighbourhoods for fast energy differences.
#[derive(Debug, Clone)]
pub struct IsingGeometry {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    plaquettes: Vec<Vec<usize>>,
    site_plaquettes: Vec<Vec<usize>>,
}

impl IsingGeometry {
    pub fn new(lat: &Lattice) -> Self {
        let n = lat.num_qubits();
        let edges = lat.edges();
        let mut neighbours = vec![Vec::new(); n];
        for &(a, b) in &edges {
            neighbours[a].push(b);
            neighbours[b].push(a);
        }
        let plaquettes: Vec<Vec<usize>> = lat.z_faces().iter().map(|f| f.sites.clone()).collect();
        let mut site_plaquettes = vec![Vec::new(); n];
        for (i, p) in plaquettes.iter().enumerate() {
            for &s in p {
                site_plaquettes[s].push(i);
            }
        }
        IsingGeometry { n, edges, neighbours, plaquettes, site_plaquettes }
    }

    pub fn energy(&self, spins: &[i8], p: &IsingParams) -> f64 {
        let field: f64 = spins.iter().map(|&s| s as f64).sum();
        let pair: f64 = self.edges.iter().map(|&(a, b)| (spins[a] * spins[b]) as f64).sum();
        let plaq: f64 = self.plaquettes.iter().map(|f| f.iter().map(|&s| spins[s] as f64).product::<f64>()).sum();
        -p.h * field - p.j1 * pair - p.j2 * plaq
    }

    /// `E(σ with site i flipped) - E(σ)`.
    pub fn flip_delta(&self, spins: &[i8], i: usize, p: &IsingParams) -> f64 {
        let s = spins[i] as f64;
        let nb: f64 = self.neighbours[i].iter().map(|&j| spins[j] as f64).sum();
        let plaq: f64 = self.site_plaquettes[i]
            .iter()
            .map(|&f| self.plaquettes[f].iter().map(|&k| spins[k] as f64).product::<f64>())
            .sum();
        2.0 * p.h * s + 2.0 * p.j1 * s * nb + 2.0 * p.j2 * plaq
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }
}

pub fn cbf_energy(sigma: &SpinConfig, p: &IsingParams, lat: &Lattice) -> Result<f64> {
    if sigma.spins.len() != lat.num_qubits() {
        return Err(Error::Domain(format!("{} spins for {} sites", sigma.spins.len(), lat.num_qubits())));
    }
    Ok(IsingGeometry::new(lat).energy(&sigma.spins, p))
}

/// Largest lattice the exact enumeration accepts.
pub const MAX_ENUMERATION_SITES: usize = 20;

/// Boltzmann probabilities of all `2^N` configurations, indexed by the
/// flip mask of [`SpinConfig::from_mask`].
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub probs: Vec<f64>,
    pub log_partition: f64,
}

pub fn cbf_exact_distribution(p: &IsingParams, lat: &Lattice) -> Result<ExactDistribution> {
    p.validate()?;
    let n = lat.num_qubits();
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::Capacity(format!("{n} sites exceeds enumeration bound {MAX_ENUMERATION_SITES}")));
    }
    let geo = IsingGeometry::new(lat);
    let mut spins = vec![1i8; n];
    let log_w: Vec<f64> = (0..1u64 << n)
        .map(|mask| {
            for (i, s) in spins.iter_mut().enumerate() {
                *s = if mask >> i & 1 == 1 { -1 } else { 1 };
            }
            -p.beta * geo.energy(&spins, p)
        })
        .collect();
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|v| *v /= z);
    Ok(ExactDistribution { probs, log_partition: max + z.ln() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainStart {
    /// Every spin +1 (the error-free configuration).
    AllUp,
    /// Independent uniformly random spins.
    Uniform,
}

/// Single-site Metropolis chain with a fixed (row-major) scan order.
#[derive(Debug, Clone)]
pub struct CbfChain<'g> {
    geo: &'g IsingGeometry,
    params: IsingParams,
    spins: Vec<i8>,
}

impl<'g> CbfChain<'g> {
    pub fn new(geo: &'g IsingGeometry, params: IsingParams, start: ChainStart, rng: &mut impl Rng) -> Self {
        let spins = match start {
            ChainStart::AllUp => vec![1; geo.n],
            ChainStart::Uniform => (0..geo.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
        };
        CbfChain { geo, params, spins }
    }

    pub fn sweep(&mut self, rng: &mut impl Rng) {
        for i in 0..self.geo.n {
            self.try_flip(i, rng);
        }
    }

    /// One Metropolis update at site `i`; returns whether the flip was accepted.
    pub fn try_flip(&mut self, i: usize, rng: &mut impl Rng) -> bool {
        let de = self.geo.flip_delta(&self.spins, i, &self.params);
        let accept = de <= 0.0 || rng.gen::<f64>() < (-self.params.beta * de).exp();
        if accept {
            self.spins[i] = -self.spins[i];
        }
        accept
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn set_spins(&mut self, spins: &[i8]) {
        self.spins.copy_from_slice(spins);
    }

    pub fn config(&self) -> SpinConfig {
        SpinConfig { spins: self.spins.clone() }
    }
}

/// Configuration after `n_sweeps` Metropolis sweeps from a uniformly random
/// start.
pub fn cbf_mcmc_sample(p: &IsingParams, lat: &Lattice, n_sweeps: usize, rng: &mut impl Rng) -> Result<SpinConfig> {
    p.validate()?;
    if n_sweeps == 0 {
        return Err(Error::Domain("at least one sweep is required".into()));
    }
    let geo = IsingGeometry::new(lat);
    let mut chain = CbfChain::new(&geo, *p, ChainStart::Uniform, rng);
    for _ in 0..n_sweeps {
        chain.sweep(rng);
    }
    Ok(chain.config())
}

/// Per-site noise tensor: a PTM action `out <- in` (Pauli indices) with
/// correlation bonds toward the up/down/left/right neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteFactor {
    /// Bond dimensions (up, down, left, right); 1 on the lattice edge.
    pub dims: [usize; 4],
    /// Row-major over `[out][in][up][down][left][right]`.
    pub data: Vec<C64>,
}

impl SiteFactor {
    pub fn bond_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn get(&self, out: usize, inp: usize, bond: usize) -> C64 {
        self.data[(out * 4 + inp) * self.bond_count() + bond]
    }

    /// Flattened bond index from per-direction indices.
    pub fn bond_index(&self, up: usize, down: usize, left: usize, right: usize) -> usize {
        let [_, d, l, r] = self.dims;
        ((up * d + down) * l + left) * r + right
    }
}

/// Two-dimensional tensor-network form of a noise channel on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseNetworkFactor {
    width: usize,
    height: usize,
    bond_dim: usize,
    sites: Vec<SiteFactor>,
}

impl NoiseNetworkFactor {
    pub fn new(width: usize, height: usize, bond_dim: usize, sites: Vec<SiteFactor>) -> Result<Self> {
        if sites.len() != width * height {
            return Err(Error::Structure(format!("{} site factors for {}x{}", sites.len(), width, height)));
        }
        for (k, s) in sites.iter().enumerate() {
            let (r, c) = (k / width, k % width);
            let want = [
                if r > 0 { bond_dim } else { 1 },
                if r + 1 < height { bond_dim } else { 1 },
                if c > 0 { bond_dim } else { 1 },
                if c + 1 < width { bond_dim } else { 1 },
            ];
            if s.dims != want || s.data.len() != 16 * s.bond_count() {
                return Err(Error::Structure(format!("site factor {k} has dims {:?}, expected {want:?}", s.dims)));
            }
        }
        Ok(NoiseNetworkFactor { width, height, bond_dim, sites })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn site(&self, k: usize) -> &SiteFactor {
        &self.sites[k]
    }

    pub fn matches(&self, lat: &Lattice) -> bool {
        self.width == lat.width() && self.height == lat.height()
    }

    /// True when every site maps each Pauli only onto itself.
    pub fn is_pauli_diagonal(&self) -> bool {
        self.sites.iter().all(|s| {
            let b = s.bond_count();
            (0..4).all(|o| (0..4).all(|i| o == i || (0..b).all(|k| s.get(o, i, k) == ZERO)))
        })
    }

    /// Global PTM entry `<out| N |inp>` (unnormalized for CBF factors), by
    /// exact contraction of the correlation bonds. Small lattices only.
    pub fn global_entry(&self, out: &[usize], inp: &[usize]) -> Result<C64> {
        use crate::boundary::{Cell, GridNetwork};
        let cells = (0..self.sites.len())
            .map(|k| {
                let s = &self.sites[k];
                let [u, d, l, r] = s.dims;
                let mut data = vec![ZERO; u * d * l * r];
                for iu in 0..u {
                    for id in 0..d {
                        for il in 0..l {
                            for ir in 0..r {
                                data[((il * u + iu) * d + id) * r + ir] = s.get(out[k], inp[k], s.bond_index(iu, id, il, ir));
                            }
                        }
                    }
                }
                Cell::new(l, u, d, r, data)
            })
            .collect();
        GridNetwork::from_cells(self.height, self.width, cells)?.contract_dense()
    }
}

/// Uncorrelated noise: every site carries the channel's PTM, bonds of dimension one.
pub fn iid_network_factors(k: &KrausChannel, lat: &Lattice) -> Result<NoiseNetworkFactor> {
    iid_from_ptm(&ptm_from_kraus(k)?.ptm, lat)
}

pub fn iid_from_ptm(ptm: &Ptm, lat: &Lattice) -> Result<NoiseNetworkFactor> {
    let data: Vec<C64> = ptm.iter().flatten().map(|&v| C64::new(v, 0.0)).collect();
    let sites = (0..lat.num_qubits()).map(|_| SiteFactor { dims: [1; 4], data: data.clone() }).collect();
    NoiseNetworkFactor::new(lat.width(), lat.height(), 1, sites)
}

/// Symmetric square root of the 2x2 bond weight `exp(βJ σσ')`; complex when
/// the coupling is antiferromagnetic.
fn bond_root(beta_j: f64) -> [[C64; 2]; 2] {
    let l1 = C64::new(2.0 * beta_j.cosh(), 0.0).sqrt();
    let l2 = C64::new(2.0 * beta_j.sinh(), 0.0).sqrt();
    // eigenvectors (1,1)/√2 and (1,-1)/√2
    let a = (l1 + l2) * 0.5;
    let b = (l1 - l2) * 0.5;
    [[a, b], [b, a]]
}

/// CBF noise as a bond-dimension-2 network. The J2 term is omitted and the
/// partition function is not divided out.
pub fn cbf_network_factors(p: &IsingParams, lat: &Lattice) -> Result<NoiseNetworkFactor> {
    p.validate()?;
    let s = bond_root(p.beta * p.j1);
    let (w, h) = (lat.width(), lat.height());
    let mut sites = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let dims = [
                if r > 0 { 2 } else { 1 },
                if r + 1 < h { 2 } else { 1 },
                if c > 0 { 2 } else { 1 },
                if c + 1 < w { 2 } else { 1 },
            ];
            let nb: usize = dims.iter().product();
            let mut data = vec![ZERO; 16 * nb];
            for (si, sigma) in [1.0f64, -1.0].into_iter().enumerate() {
                let field = (p.beta * p.h * sigma).exp();
                let mut bond = 0;
                for iu in 0..dims[0] {
                    for id in 0..dims[1] {
                        for il in 0..dims[2] {
                            for ir in 0..dims[3] {
                                let mut v = C64::new(field, 0.0);
                                for (dim, idx) in dims.iter().zip([iu, id, il, ir]) {
                                    if *dim == 2 {
                                        v *= s[si][idx];
                                    }
                                }
                                for q in 0..4 {
                                    // X^{(1-σ)/2} fixes I and X, negates Y and Z
                                    let sign = if sigma < 0.0 && q >= 2 { -1.0 } else { 1.0 };
                                    data[(q * 4 + q) * nb + bond] += v * sign;
                                }
                                bond += 1;
                            }
                        }
                    }
                }
            }
            sites.push(SiteFactor { dims, data });
        }
    }
    NoiseNetworkFactor::new(w, h, 2, sites)
}
