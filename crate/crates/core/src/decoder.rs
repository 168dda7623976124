//! The tensor-network decoder.
//!
//! For syndrome `s` with recovery `R`, the logical Choi entries are
//! `C_ij = tr[L_i R Π_s N(L_j Π_C) Π_s R] = ε_i tr[L_i Π_s N(L_j Π_C)]`
//! with `ε_i = ±1` the commutation sign of `R` and `L_i`. Expanding both
//! projectors as sums over stabilizer products gives one input bit `b_f` and
//! one output bit `c_f` per face; every qubit contributes
//! `tr[A_k N_k(P_k)] = 2 φ_A φ_P F_k[A_k, P_k]`, where `P_k` (phase `φ_P`) is
//! the local factor of `L_j T(b)` and `A_k` that of `L_i T(c)`.
//!
//! The network is a square grid with one cell per qubit. Each face bit is
//! created at the face's first site and routed along a spanning tree of the
//! face's sites. Lattice column 0 (the support of the logical Z) is placed
//! last in the sweep, so only the closing column depends on the Z-components
//! of the insertions.
//!
//! When every noise factor is Pauli-diagonal the double layer collapses:
//! `C_ij` vanishes off the diagonal and `c = b`, leaving one bit per face.
//! That fidelity-domain sum cancels heavily on large lattices, so by default
//! Pauli-diagonal noise is instead contracted in the probability domain:
//! `P(M) = Σ_S Pr(R M S)` over stabilizers `S` for each logical class `M`,
//! and `C_jj = 2 Σ_M (-1)^<M,L_j> P(M)`. Every term is nonnegative.

use std::time::Instant;

use crate::boundary::{contract_grid, BoundaryChain, Cell, GridNetwork, GridValue};
use crate::channels::{select_from_channel, LogicalChoi, QubitChannel, SelectionNorm};
use crate::error::{Error, Result};
use crate::lattice::{recovery_frame, syndrome_of, CheckKind, Lattice, PauliFrame, Syndrome};
use crate::noise::{NoiseNetworkFactor, SiteFactor};
use crate::pauli::{Pauli, PhasedPauli};
use crate::tensor::{C64, ZERO};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ContractionMode {
    /// Coset-probability network whenever the noise is Pauli-diagonal,
    /// double layer otherwise.
    #[default]
    Auto,
    /// Single-layer network in the Pauli-fidelity domain whenever the noise
    /// is Pauli-diagonal, double layer otherwise.
    Collapsed,
    /// Always the double-layer network.
    General,
}

/// Which network a [`CodeNetwork`] contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    /// Output and input face bits, PTM site factors.
    General,
    /// One bit per face, Pauli fidelities as site factors.
    Fidelity,
    /// One bit per face, Pauli error probabilities as site factors; the
    /// syndrome enters through the recovery frame only.
    Coset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub chi: usize,
    pub norm: SelectionNorm,
    pub tol: f64,
    #[serde(default)]
    pub mode: ContractionMode,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { chi: 8, norm: SelectionNorm::Diamond, tol: 1e-14, mode: ContractionMode::Auto }
    }
}

impl DecoderConfig {
    pub fn with_chi(chi: usize) -> Self {
        DecoderConfig { chi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi == 0 || !(self.tol >= 0.0) {
            return Err(Error::Config(format!("invalid decoder config {self:?}")));
        }
        Ok(())
    }
}

/// A bond dimension no boundary chain on `lat` can exceed, so contraction
/// with it is exact.
pub fn exact_chi(lat: &Lattice, noise: &NoiseNetworkFactor) -> usize {
    // every row bond carries at most two faces of four states each
    let per_row = 16 * noise.bond_dim();
    per_row.saturating_pow(lat.height() as u32).min(1 << 24)
}

/// Weight of one face's projector in the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceWeight {
    /// Measured with outcome +1 (`false`) or -1 (`true`).
    Measured(bool),
    /// Projector replaced by the identity.
    Unmeasured,
}

#[derive(Debug, Clone)]
struct CellPlan {
    /// Global face ids touching the cell and their check type.
    faces: Vec<(usize, CheckKind)>,
    /// Faces whose weight this cell applies (indices into `faces`).
    owned: Vec<usize>,
    /// For each grid direction (left, up, down, right): carried faces
    /// (indices into `faces`) and the noise bond's lattice direction.
    bonds: [Vec<usize>; 4],
    noise_dims: [usize; 4],
}

const G_LEFT: usize = 0;
const G_UP: usize = 1;
const G_DOWN: usize = 2;
const G_RIGHT: usize = 3;

/// The noisy code network of a lattice, before any syndrome is imposed.
#[derive(Debug, Clone)]
pub struct CodeNetwork {
    lat: Lattice,
    noise: NoiseNetworkFactor,
    kind: NetworkKind,
    /// Per-site error probabilities `[pauli][bond]` (coset networks only).
    probs: Vec<Vec<C64>>,
    plans: Vec<CellPlan>,
}

fn face_tree(lat: &Lattice, row: isize, col: isize) -> Vec<(usize, usize)> {
    let (w, h) = (lat.width() as isize, lat.height() as isize);
    let at = |r: isize, c: isize| ((0..h).contains(&r) && (0..w).contains(&c)).then(|| lat.site(r as usize, c as usize));
    let (ul, ur, ll, lr) = (at(row, col), at(row, col + 1), at(row + 1, col), at(row + 1, col + 1));
    let mut edges = Vec::new();
    for (a, b) in [(ul, ur), (ul, ll), (ll, lr)] {
        if let (Some(a), Some(b)) = (a, b) {
            edges.push((a, b));
        }
    }
    if ul.is_none() && ll.is_none() {
        // left boundary face
        if let (Some(a), Some(b)) = (ur, lr) {
            edges.push((a, b));
        }
    }
    edges
}

impl CodeNetwork {
    pub fn new(lat: &Lattice, noise: &NoiseNetworkFactor, mode: ContractionMode) -> Result<Self> {
        if !noise.matches(lat) {
            return Err(Error::Structure(format!(
                "noise factors are {}x{}, lattice is {}x{}",
                noise.width(),
                noise.height(),
                lat.width(),
                lat.height()
            )));
        }
        let kind = match mode {
            _ if !noise.is_pauli_diagonal() => NetworkKind::General,
            ContractionMode::General => NetworkKind::General,
            ContractionMode::Collapsed => NetworkKind::Fidelity,
            ContractionMode::Auto => NetworkKind::Coset,
        };
        let (w, h) = (lat.width(), lat.height());
        let n = lat.num_qubits();
        let nx = lat.x_faces().len();
        let mut plans: Vec<CellPlan> = (0..n)
            .map(|_| CellPlan { faces: Vec::new(), owned: Vec::new(), bonds: Default::default(), noise_dims: [1; 4] })
            .collect();
        let all_faces = lat.x_faces().iter().enumerate().chain(lat.z_faces().iter().enumerate().map(|(i, f)| (nx + i, f)));
        for (id, face) in all_faces {
            for &s in &face.sites {
                plans[s].faces.push((id, face.kind));
            }
            let owner = face.sites[0];
            let pos = plans[owner].faces.len() - 1;
            debug_assert_eq!(plans[owner].faces[pos].0, id);
            plans[owner].owned.push(pos);
            for (a, b) in face_tree(lat, face.row, face.col) {
                let (ra, ca) = lat.coords(a);
                let (rb, cb) = lat.coords(b);
                // grid columns run right to left over lattice columns
                let (da, db) = if ra == rb {
                    debug_assert_eq!(cb, ca + 1);
                    (G_LEFT, G_RIGHT)
                } else {
                    debug_assert_eq!((rb, cb), (ra + 1, ca));
                    (G_DOWN, G_UP)
                };
                let la = plans[a].faces.iter().position(|f| f.0 == id).unwrap();
                plans[a].bonds[da].push(la);
                let lb = plans[b].faces.iter().position(|f| f.0 == id).unwrap();
                plans[b].bonds[db].push(lb);
            }
        }
        // face_tree visits faces in id order, so carried faces on both sides
        // of a bond appear in the same order
        let d = noise.bond_dim();
        for r in 0..h {
            for c in 0..w {
                let p = &mut plans[r * w + c];
                p.noise_dims = [
                    if c + 1 < w { d } else { 1 },
                    if r > 0 { d } else { 1 },
                    if r + 1 < h { d } else { 1 },
                    if c > 0 { d } else { 1 },
                ];
            }
        }
        let probs = if kind == NetworkKind::Coset { (0..n).map(|k| error_probabilities(noise.site(k))).collect() } else { Vec::new() };
        Ok(CodeNetwork { lat: lat.clone(), noise: noise.clone(), kind, probs, plans })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    pub fn noise(&self) -> &NoiseNetworkFactor {
        &self.noise
    }

    pub fn is_collapsed(&self) -> bool {
        self.kind != NetworkKind::General
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    /// Imposes a syndrome with recovery frame `r`.
    pub fn impose_syndrome(&self, s: &Syndrome, r: &PauliFrame) -> Result<SyndromeNetwork<'_>> {
        s.validate(&self.lat)?;
        if syndrome_of(r, &self.lat)? != *s {
            return Err(Error::Precondition("recovery frame does not match the syndrome".into()));
        }
        let weights = s.x.iter().chain(&s.z).map(|&f| FaceWeight::Measured(f)).collect();
        let mut signs = [1.0; 4];
        for p in Pauli::ALL {
            let l = self.lat.logical_frame(p);
            let anti = (0..self.lat.num_qubits()).filter(|&k| (r.x[k] & l.z[k]) ^ (r.z[k] & l.x[k])).count();
            signs[p.index()] = if anti % 2 == 1 { -1.0 } else { 1.0 };
        }
        Ok(SyndromeNetwork { net: self, weights, signs, recovery: r.clone() })
    }

    /// Network with an arbitrary weight per face and no recovery; used for
    /// syndrome marginals. Not available on coset networks.
    pub fn with_weights(&self, weights: Vec<FaceWeight>) -> Result<SyndromeNetwork<'_>> {
        if weights.len() != self.lat.num_checks() {
            return Err(Error::Domain("one weight per check is required".into()));
        }
        if self.kind == NetworkKind::Coset {
            return Err(Error::Domain("face weights need a fidelity or general network".into()));
        }
        let recovery = PauliFrame::identity(self.lat.num_qubits());
        Ok(SyndromeNetwork { net: self, weights, signs: [1.0; 4], recovery })
    }
}

/// A code network with per-face projector weights and recovery signs.
#[derive(Debug, Clone)]
pub struct SyndromeNetwork<'a> {
    net: &'a CodeNetwork,
    weights: Vec<FaceWeight>,
    signs: [f64; 4],
    recovery: PauliFrame,
}

/// `p[P] = 1/4 Σ_Q (-1)^<P,Q> λ[Q]` per bond value, from the diagonal of a
/// Pauli-diagonal site factor.
fn error_probabilities(f: &SiteFactor) -> Vec<C64> {
    let nb = f.bond_count();
    let mut out = vec![ZERO; 4 * nb];
    for p in Pauli::ALL {
        for q in Pauli::ALL {
            let sign = if p.commutes_with(q) { 0.25 } else { -0.25 };
            for b in 0..nb {
                out[p.index() * nb + b] += f.get(q.index(), q.index(), b) * sign;
            }
        }
    }
    out
}

fn logical_site(lat: &Lattice, l: Pauli, site: usize) -> Pauli {
    let (lx, lz) = l.bits();
    let (r, c) = lat.coords(site);
    Pauli::from_bits(lx && r + 1 == lat.height(), lz && c == 0)
}

/// Diagnostics of one logical-Choi evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoiStats {
    /// Largest accumulated relative truncation error over the sweeps.
    pub truncation_error: f64,
    /// `ln` of the factor removed from every entry of the returned matrix.
    pub log_scale: f64,
    pub kind: NetworkKind,
    pub sweeps: usize,
}

impl SyndromeNetwork<'_> {
    pub fn network(&self) -> &CodeNetwork {
        self.net
    }

    fn owned_weight(&self, face: usize, b: usize, c: usize) -> f64 {
        match (self.net.kind != NetworkKind::General, self.weights[face]) {
            (false, FaceWeight::Measured(s)) => 0.25 * if s && c == 1 { -1.0 } else { 1.0 },
            (false, FaceWeight::Unmeasured) => 0.5 * if c == 0 { 1.0 } else { 0.0 },
            (true, FaceWeight::Measured(s)) => 0.25 * if s && b == 1 { -1.0 } else { 1.0 },
            (true, FaceWeight::Unmeasured) => 0.5 * if b == 0 { 1.0 } else { 0.0 },
        }
    }

    /// Cell of `site` with the local factors of the output-side logical
    /// `out_l` and input-side logical `in_l`.
    fn cell(&self, site: usize, out_l: Pauli, in_l: Pauli) -> Cell {
        let plan = &self.net.plans[site];
        let factor = self.net.noise.site(site);
        let collapsed = self.net.kind != NetworkKind::General;
        let coset = self.net.kind == NetworkKind::Coset;
        let (bits, base) = if collapsed { (1, 2usize) } else { (2, 4usize) };
        let nf = plan.faces.len();
        let dims: [usize; 4] = std::array::from_fn(|d| base.pow(plan.bonds[d].len() as u32) * plan.noise_dims[d]);
        let [gl, gu, gd, gr] = dims;
        let mut data = vec![ZERO; gl * gu * gd * gr];
        let nd = plan.noise_dims;
        let in_phased = PhasedPauli::new(in_l);
        let out_phased = PhasedPauli::new(out_l);
        for m in 0..1usize << (bits * nf) {
            let digit = |f: usize| (m >> (bits * f)) & (base - 1);
            let (mut u, mut v, mut u2, mut v2) = (false, false, false, false);
            for (f, &(_, kind)) in plan.faces.iter().enumerate() {
                let dg = digit(f);
                let (b, c) = if collapsed { (dg == 1, dg == 1) } else { (dg >> 1 == 1, dg & 1 == 1) };
                match kind {
                    CheckKind::X => {
                        u ^= b;
                        u2 ^= c;
                    }
                    CheckKind::Z => {
                        v ^= b;
                        v2 ^= c;
                    }
                }
            }
            let p = in_phased.mul(PhasedPauli::xz(u, v));
            let a = out_phased.mul(PhasedPauli::xz(u2, v2));
            if collapsed && a.pauli != p.pauli {
                continue;
            }
            let fd: [usize; 4] = std::array::from_fn(|d| plan.bonds[d].iter().fold(0, |acc, &f| acc * base + digit(f)));
            if coset {
                let e = p.pauli.product(self.recovery.pauli_at(site));
                let probs = &self.net.probs[site];
                let nb = factor.bond_count();
                self.scatter(&mut data, dims, fd, nd, |bond| probs[e.index() * nb + bond], factor);
                continue;
            }
            let mut w = a.coefficient() * p.coefficient() * 2.0;
            for &f in &plan.owned {
                let dg = digit(f);
                let (b, c) = if collapsed { (dg, dg) } else { (dg >> 1, dg & 1) };
                w *= self.owned_weight(plan.faces[f].0, b, c);
            }
            if w == ZERO {
                continue;
            }
            let (ai, pi) = (a.pauli.index(), p.pauli.index());
            self.scatter(&mut data, dims, fd, nd, |bond| w * factor.get(ai, pi, bond), factor);
        }
        Cell::new(gl, gu, gd, gr, data)
    }

    /// Adds `value(noise bond)` to every cell entry with face digits `fd`.
    fn scatter(
        &self,
        data: &mut [C64],
        dims: [usize; 4],
        fd: [usize; 4],
        nd: [usize; 4],
        value: impl Fn(usize) -> C64,
        factor: &SiteFactor,
    ) {
        let [_, gu, gd, gr] = dims;
        for nl in 0..nd[G_LEFT] {
            for nu in 0..nd[G_UP] {
                for ndn in 0..nd[G_DOWN] {
                    for nr in 0..nd[G_RIGHT] {
                        // grid left is the lattice right neighbour
                        let fv = value(factor.bond_index(nu, ndn, nr, nl));
                        if fv == ZERO {
                            continue;
                        }
                        let il = fd[G_LEFT] * nd[G_LEFT] + nl;
                        let iu = fd[G_UP] * nd[G_UP] + nu;
                        let id = fd[G_DOWN] * nd[G_DOWN] + ndn;
                        let ir = fd[G_RIGHT] * nd[G_RIGHT] + nr;
                        data[((il * gu + iu) * gd + id) * gr + ir] += fv;
                    }
                }
            }
        }
    }

    /// Cells of lattice column `col`, top to bottom.
    fn column(&self, col: usize, out_l: Pauli, in_l: Pauli) -> Vec<Cell> {
        let lat = &self.net.lat;
        (0..lat.height())
            .map(|r| {
                let s = lat.site(r, col);
                self.cell(s, logical_site(lat, out_l, s), logical_site(lat, in_l, s))
            })
            .collect()
    }

    fn pairs(&self) -> Vec<(Pauli, Pauli)> {
        if self.net.kind != NetworkKind::General {
            Pauli::ALL.iter().map(|&p| (p, p)).collect()
        } else {
            Pauli::ALL.iter().flat_map(|&i| Pauli::ALL.iter().map(move |&j| (i, j))).collect()
        }
    }

    /// Logical Choi matrix with boundary environments shared between
    /// insertions that agree away from the closing column.
    pub fn logical_choi(&self, cfg: &DecoderConfig) -> Result<(LogicalChoi, ChoiStats)> {
        cfg.validate()?;
        let lat = &self.net.lat;
        let w = lat.width();
        let mut values = Vec::new();
        let mut sweeps = 0;
        let mut trunc: f64 = 0.0;
        for (xi, xj) in [(false, false), (false, true), (true, false), (true, true)] {
            let group: Vec<(Pauli, Pauli)> = self.pairs().into_iter().filter(|(i, j)| (i.bits().0, j.bits().0) == (xi, xj)).collect();
            if group.is_empty() {
                continue;
            }
            let (oi, oj) = (Pauli::from_bits(xi, false), Pauli::from_bits(xj, false));
            let mut chain = BoundaryChain::trivial(lat.height(), cfg.chi, cfg.tol);
            for col in (1..w).rev() {
                chain.absorb(&self.column(col, oi, oj))?;
            }
            sweeps += 1;
            trunc = trunc.max(chain.truncation_error());
            for (i, j) in group {
                values.push((i, j, chain.close(&self.column(0, i, j))?));
            }
        }
        self.assemble(values, trunc, sweeps)
    }

    /// Same entries by contracting a fresh grid for every insertion.
    pub fn logical_choi_reference(&self, cfg: &DecoderConfig) -> Result<(LogicalChoi, ChoiStats)> {
        cfg.validate()?;
        let mut values = Vec::new();
        let mut trunc: f64 = 0.0;
        let pairs = self.pairs();
        for &(i, j) in &pairs {
            let v = contract_grid(&self.grid(i, j)?, cfg.chi, cfg.tol)?;
            trunc = trunc.max(v.truncation_error);
            values.push((i, j, v));
        }
        self.assemble(values, trunc, pairs.len())
    }

    /// Full grid for one insertion pair, in sweep orientation.
    pub fn grid(&self, out_l: Pauli, in_l: Pauli) -> Result<GridNetwork> {
        let lat = &self.net.lat;
        let (w, h) = (lat.width(), lat.height());
        let cols: Vec<Vec<Cell>> = (0..w).rev().map(|c| self.column(c, out_l, in_l)).collect();
        let mut cells = Vec::with_capacity(w * h);
        for r in 0..h {
            for col in &cols {
                cells.push(col[r].clone());
            }
        }
        GridNetwork::from_cells(h, w, cells)
    }

    /// `tr[Π N(Π_C)]` for the imposed face weights (twice the probability
    /// of the measured outcomes).
    pub fn trace_value(&self, cfg: &DecoderConfig) -> Result<GridValue> {
        let lat = &self.net.lat;
        let mut chain = BoundaryChain::trivial(lat.height(), cfg.chi, cfg.tol);
        for col in (1..lat.width()).rev() {
            chain.absorb(&self.column(col, Pauli::I, Pauli::I))?;
        }
        chain.close(&self.column(0, Pauli::I, Pauli::I))
    }

    fn assemble(&self, values: Vec<(Pauli, Pauli, GridValue)>, trunc: f64, sweeps: usize) -> Result<(LogicalChoi, ChoiStats)> {
        if self.net.kind == NetworkKind::Coset {
            return self.assemble_cosets(values, trunc, sweeps);
        }
        let ii = values.iter().find(|v| v.0 == Pauli::I && v.1 == Pauli::I).map(|v| v.2).expect("identity entry");
        if is_zero_probability(&ii) {
            return Err(Error::ZeroProbability);
        }
        let mut c = [[ZERO; 4]; 4];
        for (i, j, v) in values {
            let scale = if v.mantissa == ZERO { 0.0 } else { (v.log_scale - ii.log_scale).exp() };
            c[i.index()][j.index()] = v.mantissa * scale * self.signs[i.index()];
        }
        let stats = ChoiStats { truncation_error: trunc, log_scale: ii.log_scale, kind: self.net.kind, sweeps };
        Ok((LogicalChoi::new(c), stats))
    }

    /// Choi matrix from the four coset masses `P(M)`.
    fn assemble_cosets(&self, values: Vec<(Pauli, Pauli, GridValue)>, trunc: f64, sweeps: usize) -> Result<(LogicalChoi, ChoiStats)> {
        let live = values.iter().filter(|v| v.2.mantissa != ZERO && v.2.mantissa.is_finite());
        let Some(scale) = live.map(|v| v.2.log_scale).reduce(f64::max) else {
            return Err(Error::ZeroProbability);
        };
        let mut mass = [0.0; 4];
        for (m, _, v) in &values {
            if v.mantissa != ZERO {
                mass[m.index()] = v.mantissa.re * (v.log_scale - scale).exp();
            }
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ZeroProbability);
        }
        let mut c = [[ZERO; 4]; 4];
        for l in Pauli::ALL {
            let v: f64 = Pauli::ALL.iter().map(|m| if m.commutes_with(l) { mass[m.index()] } else { -mass[m.index()] }).sum();
            c[l.index()][l.index()] = C64::new(2.0 * v, 0.0);
        }
        let stats = ChoiStats { truncation_error: trunc, log_scale: scale, kind: self.net.kind, sweeps };
        Ok((LogicalChoi::new(c), stats))
    }

    /// Unnormalized probabilities of the four logical classes relative to the
    /// recovery frame (coset networks only).
    pub fn coset_masses(&self, cfg: &DecoderConfig) -> Result<[f64; 4]> {
        if self.net.kind != NetworkKind::Coset {
            return Err(Error::Domain("coset masses need a coset network".into()));
        }
        let (lc, stats) = self.logical_choi(cfg)?;
        let d: [f64; 4] = std::array::from_fn(|i| lc.c[i][i].re / 2.0);
        let s = stats.log_scale.exp();
        // invert C_jj = 2 Σ_M (-1)^<M,L_j> P(M)
        Ok(std::array::from_fn(|m| {
            let pm = Pauli::from_index(m);
            Pauli::ALL.iter().map(|l| if pm.commutes_with(*l) { d[l.index()] } else { -d[l.index()] }).sum::<f64>() / 4.0 * s
        }))
    }
}

/// Relative size below which a contraction counts as an exact zero.
pub const ZERO_PROBABILITY_RATIO: f64 = 1e-12;

fn is_zero_probability(v: &GridValue) -> bool {
    let m = v.mantissa;
    m == ZERO || !m.re.is_finite() || m.re <= 0.0 || (v.cancellation.is_finite() && v.cancellation < ZERO_PROBABILITY_RATIO)
}

/// Outcome of [`decode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeResult {
    pub correction: Pauli,
    pub choi: LogicalChoi,
    /// Normalized logical channel before correction.
    pub channel: QubitChannel,
    /// Distance of the corrected channel from the identity under the
    /// configured norm.
    pub distance: f64,
    pub stats: ChoiStats,
    pub wall_time_s: f64,
}

/// A code network prepared once and reused across syndromes.
#[derive(Debug, Clone)]
pub struct Decoder {
    net: CodeNetwork,
    cfg: DecoderConfig,
}

impl Decoder {
    pub fn new(lat: &Lattice, noise: &NoiseNetworkFactor, cfg: DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Decoder { net: CodeNetwork::new(lat, noise, cfg.mode)?, cfg })
    }

    pub fn network(&self) -> &CodeNetwork {
        &self.net
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn decode(&self, s: &Syndrome) -> Result<DecodeResult> {
        let start = Instant::now();
        let r = recovery_frame(s, &self.net.lat)?;
        let sn = self.net.impose_syndrome(s, &r)?;
        let (choi, stats) = sn.logical_choi(&self.cfg)?;
        let channel = choi.normalized()?;
        let (correction, distance) = select_from_channel(&channel, self.cfg.norm)?;
        Ok(DecodeResult { correction, choi, channel, distance, stats, wall_time_s: start.elapsed().as_secs_f64() })
    }
}

pub fn build_code_network(lat: &Lattice, noise: &NoiseNetworkFactor) -> Result<CodeNetwork> {
    CodeNetwork::new(lat, noise, ContractionMode::Auto)
}

pub fn decode(s: &Syndrome, noise: &NoiseNetworkFactor, lat: &Lattice, cfg: &DecoderConfig) -> Result<DecodeResult> {
    Decoder::new(lat, noise, *cfg)?.decode(s)
}
