//! Exact dense simulation of the logical channel for small lattices.
//!
//! Operators are `2^N x 2^N` matrices; site `k` is bit `k` of a basis index.
//! Pauli strings are `i^phase X^x Z^z` with `x`, `z` site bitmasks.

use crate::channels::{select_from_channel, KrausChannel, LogicalChoi, SelectionNorm};
use crate::error::{Error, Result};
use crate::lattice::{recovery_frame, Lattice, PauliFrame, Syndrome};
use crate::noise::{cbf_exact_distribution, IsingParams};
use crate::pauli::Pauli;
use crate::tensor::{C64, ONE, ZERO};

/// Largest lattice accepted by the dense simulator.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl PauliString {
    pub fn mul(self, o: PauliString) -> PauliString {
        // X^a Z^b X^c Z^d = (-1)^{|b∧c|} X^{a⊕c} Z^{b⊕d}
        let swap = ((self.z & o.x).count_ones() % 2) as u8 * 2;
        PauliString { x: self.x ^ o.x, z: self.z ^ o.z, phase: (self.phase + o.phase + swap) % 4 }
    }

    fn coefficient(self) -> C64 {
        [ONE, C64::new(0.0, 1.0), -ONE, C64::new(0.0, -1.0)][self.phase as usize]
    }

    /// `tr[self · A]` for a dense row-major `A`.
    pub fn trace_with(self, a: &[C64], dim: usize) -> C64 {
        let mut acc = ZERO;
        for zi in 0..dim {
            let v = a[zi * dim + (zi ^ self.x as usize)];
            if (self.z & zi as u64).count_ones() % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        acc * self.coefficient()
    }

    /// Adds `w · self` into a dense matrix.
    fn add_to(self, w: C64, a: &mut [C64], dim: usize) {
        let c = self.coefficient() * w;
        for zi in 0..dim {
            let sign = if (self.z & zi as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            a[(zi ^ self.x as usize) * dim + zi] += c * sign;
        }
    }
}

fn mask_of(sites: &[usize]) -> u64 {
    sites.iter().fold(0, |m, &s| m | 1 << s)
}

/// The canonical logical representative as a Pauli string (`Y = iXZ`).
pub fn logical_string(lat: &Lattice, p: Pauli) -> PauliString {
    let (lx, lz) = p.bits();
    let x = if lx { mask_of(lat.x_logical_support()) } else { 0 };
    let z = if lz { mask_of(lat.z_logical_support()) } else { 0 };
    PauliString { x, z, phase: if lx && lz { 1 } else { 0 } }
}

/// Noise for the dense path.
#[derive(Debug, Clone)]
pub enum DenseNoise {
    /// The same channel on every qubit.
    Iid(KrausChannel),
    /// Bit-flip configurations (masks) with their probabilities.
    Mixture(Vec<(f64, u64)>),
    /// Conjugation by one Pauli string.
    Pauli(PauliString),
}

impl DenseNoise {
    /// CBF noise with the exact Boltzmann weights (including the J2 term).
    pub fn cbf(p: &IsingParams, lat: &Lattice) -> Result<Self> {
        let d = cbf_exact_distribution(p, lat)?;
        Ok(DenseNoise::Mixture(d.probs.iter().enumerate().map(|(m, &q)| (q, m as u64)).collect()))
    }

    /// A fixed Pauli error on every shot.
    pub fn deterministic(frame: &PauliFrame) -> Self {
        let n = frame.len();
        let x = mask_of(&(0..n).filter(|&k| frame.x[k]).collect::<Vec<_>>());
        let z = mask_of(&(0..n).filter(|&k| frame.z[k]).collect::<Vec<_>>());
        DenseNoise::Pauli(PauliString { x, z, phase: 0 })
    }
}

fn apply_single_qubit(a: &[C64], dim: usize, k: usize, kraus: &KrausChannel) -> Vec<C64> {
    let bit = 1usize << k;
    let mut out = vec![ZERO; a.len()];
    for y in (0..dim).filter(|y| y & bit == 0) {
        for z in (0..dim).filter(|z| z & bit == 0) {
            let b = [[a[y * dim + z], a[y * dim + (z | bit)]], [a[(y | bit) * dim + z], a[(y | bit) * dim + (z | bit)]]];
            let mut n = [[ZERO; 2]; 2];
            for op in kraus.ops() {
                for r in 0..2 {
                    for c in 0..2 {
                        let mut acc = ZERO;
                        for p in 0..2 {
                            for q in 0..2 {
                                acc += op[r][p] * b[p][q] * op[c][q].conj();
                            }
                        }
                        n[r][c] += acc;
                    }
                }
            }
            out[y * dim + z] = n[0][0];
            out[y * dim + (z | bit)] = n[0][1];
            out[(y | bit) * dim + z] = n[1][0];
            out[(y | bit) * dim + (z | bit)] = n[1][1];
        }
    }
    out
}

fn apply_noise(a: Vec<C64>, dim: usize, n: usize, noise: &DenseNoise) -> Vec<C64> {
    match noise {
        DenseNoise::Iid(k) => (0..n).fold(a, |acc, q| apply_single_qubit(&acc, dim, q, k)),
        DenseNoise::Mixture(mix) => {
            let mut out = vec![ZERO; a.len()];
            for &(p, m) in mix {
                if p == 0.0 {
                    continue;
                }
                let m = m as usize;
                for y in 0..dim {
                    for z in 0..dim {
                        out[y * dim + z] += a[(y ^ m) * dim + (z ^ m)] * p;
                    }
                }
            }
            out
        }
        DenseNoise::Pauli(p) => {
            let (x, zm) = (p.x as usize, p.z);
            let mut out = vec![ZERO; a.len()];
            for y in 0..dim {
                for z in 0..dim {
                    let par = (zm & (y ^ x) as u64).count_ones() + (zm & (z ^ x) as u64).count_ones();
                    let v = a[(y ^ x) * dim + (z ^ x)];
                    out[y * dim + z] = if par % 2 == 1 { -v } else { v };
                }
            }
            out
        }
    }
}

fn left_mul(p: PauliString, a: &[C64], dim: usize) -> Vec<C64> {
    let c = p.coefficient();
    let mut out = vec![ZERO; a.len()];
    for y in 0..dim {
        let w = y ^ p.x as usize;
        let sign = if (p.z & w as u64).count_ones() % 2 == 1 { -c } else { c };
        for z in 0..dim {
            out[y * dim + z] = a[w * dim + z] * sign;
        }
    }
    out
}

fn right_mul(a: &[C64], p: PauliString, dim: usize) -> Vec<C64> {
    let c = p.coefficient();
    let mut out = vec![ZERO; a.len()];
    for z in 0..dim {
        let w = z ^ p.x as usize;
        let sign = if (p.z & z as u64).count_ones() % 2 == 1 { -c } else { c };
        for y in 0..dim {
            out[y * dim + z] = a[y * dim + w] * sign;
        }
    }
    out
}

/// Tabulates `tr[L_i T A_j]` for every stabilizer `T`, with
/// `A_j = N(L_j Π_C)` built densely.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    lat: Lattice,
    noise: DenseNoise,
    generators: Vec<PauliString>,
    /// `t[i][j][c]`, `c` a bitmask over checks (X checks first).
    t: Vec<Vec<Vec<C64>>>,
}

impl DenseOracle {
    pub fn new(lat: &Lattice, noise: DenseNoise) -> Result<Self> {
        let n = lat.num_qubits();
        if n > MAX_DENSE_SITES {
            return Err(Error::Capacity(format!("{n} qubits exceeds the dense bound {MAX_DENSE_SITES}")));
        }
        let dim = 1usize << n;
        let generators: Vec<PauliString> = lat
            .x_faces()
            .iter()
            .map(|f| PauliString { x: mask_of(&f.sites), z: 0, phase: 0 })
            .chain(lat.z_faces().iter().map(|f| PauliString { x: 0, z: mask_of(&f.sites), phase: 0 }))
            .collect();
        let m = generators.len();
        let mut stab = vec![PauliString { x: 0, z: 0, phase: 0 }; 1 << m];
        for c in 1..1usize << m {
            let low = c.trailing_zeros() as usize;
            stab[c] = stab[c & (c - 1)].mul(generators[low]);
        }
        let norm = C64::new(0.5f64.powi(m as i32), 0.0);
        let mut t = vec![vec![vec![ZERO; 1 << m]; 4]; 4];
        for j in Pauli::ALL {
            let lj = logical_string(lat, j);
            let mut a = vec![ZERO; dim * dim];
            for s in &stab {
                lj.mul(*s).add_to(norm, &mut a, dim);
            }
            let a = apply_noise(a, dim, n, &noise);
            for i in Pauli::ALL {
                let li = logical_string(lat, i);
                for (c, s) in stab.iter().enumerate() {
                    t[i.index()][j.index()][c] = li.mul(*s).trace_with(&a, dim);
                }
            }
        }
        Ok(DenseOracle { lat: lat.clone(), noise, generators, t })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    fn flipped_mask(&self, s: &Syndrome) -> usize {
        s.x.iter().chain(&s.z).enumerate().fold(0, |m, (f, &b)| if b { m | 1 << f } else { m })
    }

    /// Sign of the recovery frame's commutation with each logical.
    fn recovery_signs(&self, r: &PauliFrame) -> [f64; 4] {
        let n = self.lat.num_qubits();
        let rs = PauliString {
            x: mask_of(&(0..n).filter(|&k| r.x[k]).collect::<Vec<_>>()),
            z: mask_of(&(0..n).filter(|&k| r.z[k]).collect::<Vec<_>>()),
            phase: 0,
        };
        Pauli::ALL.map(|p| {
            let l = logical_string(&self.lat, p);
            if ((rs.x & l.z) ^ (rs.z & l.x)).count_ones() % 2 == 1 { -1.0 } else { 1.0 }
        })
    }

    /// Exact logical Choi matrix and probability of syndrome `s`.
    pub fn logical_channel(&self, s: &Syndrome) -> Result<(LogicalChoi, f64)> {
        s.validate(&self.lat)?;
        let smask = self.flipped_mask(s);
        let eps = self.recovery_signs(&recovery_frame(s, &self.lat)?);
        let m = self.generators.len();
        let scale = 0.5f64.powi(m as i32);
        let mut c = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for (cm, v) in self.t[i][j].iter().enumerate() {
                    if (cm & smask).count_ones() % 2 == 1 {
                        acc -= v;
                    } else {
                        acc += v;
                    }
                }
                c[i][j] = acc * scale * eps[i];
            }
        }
        let p = c[0][0].re / 2.0;
        Ok((LogicalChoi::new(c), p))
    }

    pub fn syndrome_probability(&self, s: &Syndrome) -> Result<f64> {
        Ok(self.logical_channel(s)?.1)
    }

    /// Probability of the outcomes of the measured checks (`Some(flipped)`),
    /// marginalizing the rest. Checks are ordered X first.
    pub fn marginal_probability(&self, outcomes: &[Option<bool>]) -> f64 {
        let mut measured = 0usize;
        let mut flipped = 0usize;
        for (f, o) in outcomes.iter().enumerate() {
            if let Some(b) = o {
                measured |= 1 << f;
                if *b {
                    flipped |= 1 << f;
                }
            }
        }
        let mut acc = ZERO;
        for (cm, v) in self.t[0][0].iter().enumerate() {
            if cm & !measured != 0 {
                continue;
            }
            if (cm & flipped).count_ones() % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        0.5 * acc.re * 0.5f64.powi(measured.count_ones() as i32)
    }

    /// Logical channel by literally projecting, recovering and tracing;
    /// slower, used to cross-check [`Self::logical_channel`].
    pub fn logical_channel_literal(&self, s: &Syndrome) -> Result<LogicalChoi> {
        let n = self.lat.num_qubits();
        let dim = 1usize << n;
        let r = recovery_frame(s, &self.lat)?;
        let rs = PauliString {
            x: mask_of(&(0..n).filter(|&k| r.x[k]).collect::<Vec<_>>()),
            z: mask_of(&(0..n).filter(|&k| r.z[k]).collect::<Vec<_>>()),
            phase: 0,
        };
        let outcomes: Vec<bool> = s.x.iter().chain(&s.z).copied().collect();
        let project = |mut a: Vec<C64>| {
            for (g, &flip) in self.generators.iter().zip(&outcomes) {
                let sg = if flip { -0.5 } else { 0.5 };
                let l = left_mul(*g, &a, dim);
                a = a.iter().zip(&l).map(|(x, y)| x * 0.5 + y * sg).collect();
                let rr = right_mul(&a, *g, dim);
                a = a.iter().zip(&rr).map(|(x, y)| x * 0.5 + y * sg).collect();
            }
            a
        };
        let mut proj = vec![ZERO; dim * dim];
        for k in 0..dim {
            proj[k * dim + k] = ONE;
        }
        let code = project_all(&self.generators, proj, dim);
        let mut c = [[ZERO; 4]; 4];
        for j in Pauli::ALL {
            let a = left_mul(logical_string(&self.lat, j), &code, dim);
            let a = apply_noise(a, dim, n, &self.noise);
            let a = project(a);
            let a = right_mul(&left_mul(rs, &a, dim), rs, dim);
            for i in Pauli::ALL {
                c[i.index()][j.index()] = logical_string(&self.lat, i).trace_with(&a, dim);
            }
        }
        Ok(LogicalChoi::new(c))
    }
}

/// `Π_C A Π_C` via one-sided projections onto the +1 eigenspaces.
fn project_all(generators: &[PauliString], mut a: Vec<C64>, dim: usize) -> Vec<C64> {
    for g in generators {
        let l = left_mul(*g, &a, dim);
        a = a.iter().zip(&l).map(|(x, y)| (x + y) * 0.5).collect();
    }
    a
}

/// Correction chosen from the exact logical channel.
pub fn optimal_decode_dense(oracle: &DenseOracle, s: &Syndrome, norm: SelectionNorm) -> Result<Pauli> {
    let (lc, p) = oracle.logical_channel(s)?;
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok(select_from_channel(&lc.normalized()?, norm)?.0)
}

pub fn dense_logical_channel(s: &Syndrome, noise: DenseNoise, lat: &Lattice) -> Result<(LogicalChoi, f64)> {
    DenseOracle::new(lat, noise)?.logical_channel(s)
}
