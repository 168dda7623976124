//! Baseline and reference decoders: minimum-weight perfect matching and the
//! exhaustive maximum-likelihood decoder for correlated bit-flip noise.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{homology_class, recovery_frame, CheckKind, Lattice, PauliFrame, Syndrome};
use crate::noise::{cbf_exact_distribution, IsingParams, MAX_ENUMERATION_SITES};
use crate::pauli::Pauli;

/// Largest number of same-type defects the matcher accepts.
pub const MAX_MWPM_DEFECTS: usize = 22;

const BOUNDARY: usize = usize::MAX;

/// Checks of one type as nodes; each qubit is an edge between the (one or
/// two) checks of that type containing it, or to the boundary.
#[derive(Debug, Clone)]
struct MatchingGraph {
    adjacency: Vec<Vec<(usize, usize)>>,
}

struct ShortestPaths {
    dist: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    boundary_dist: usize,
    /// Face and qubit of the boundary exit.
    boundary_exit: Option<(usize, usize)>,
}

impl MatchingGraph {
    fn new(lat: &Lattice, kind: CheckKind) -> Self {
        let nf = lat.faces(kind).len();
        let mut adjacency = vec![Vec::new(); nf];
        for q in 0..lat.num_qubits() {
            let faces = match kind {
                CheckKind::X => lat.x_faces_of(q),
                CheckKind::Z => lat.z_faces_of(q),
            };
            match *faces {
                [a] => adjacency[a].push((BOUNDARY, q)),
                [a, b] => {
                    adjacency[a].push((b, q));
                    adjacency[b].push((a, q));
                }
                _ => {}
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        MatchingGraph { adjacency }
    }

    fn bfs(&self, src: usize) -> ShortestPaths {
        let n = self.adjacency.len();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        let mut boundary_dist = usize::MAX;
        let mut boundary_exit = None;
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(f) = queue.pop_front() {
            for &(g, q) in &self.adjacency[f] {
                if g == BOUNDARY {
                    if dist[f] + 1 < boundary_dist {
                        boundary_dist = dist[f] + 1;
                        boundary_exit = Some((f, q));
                    }
                } else if dist[g] == usize::MAX {
                    dist[g] = dist[f] + 1;
                    parent[g] = Some((f, q));
                    queue.push_back(g);
                }
            }
        }
        ShortestPaths { dist, parent, boundary_dist, boundary_exit }
    }
}

impl ShortestPaths {
    fn path_to(&self, mut f: usize, out: &mut Vec<usize>) {
        while let Some((p, q)) = self.parent[f] {
            out.push(q);
            f = p;
        }
    }
}

/// Exact minimum-weight matching of `defects` by dynamic programming over
/// subsets. Returns pairs `(i, j)` of defect positions, `j = None` for a
/// boundary match, and the total weight.
fn match_defects(dist: &[Vec<usize>], boundary: &[usize]) -> (Vec<(usize, Option<usize>)>, usize) {
    let n = boundary.len();
    let full = (1usize << n) - 1;
    // best[m]: minimum cost to match the defects in m; choice[m]: partner of
    // the lowest defect (n for the boundary)
    let mut best = vec![u32::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    best[0] = 0;
    for m in 1..=full {
        let i = m.trailing_zeros() as usize;
        let rest = m & !(1 << i);
        let mut b = u32::MAX;
        let mut ch = n as u8;
        let mut js = rest;
        while js != 0 {
            let j = js.trailing_zeros() as usize;
            js &= js - 1;
            let sub = best[rest & !(1 << j)];
            if dist[i][j] != usize::MAX && sub != u32::MAX {
                let c = sub + dist[i][j] as u32;
                if c < b {
                    b = c;
                    ch = j as u8;
                }
            }
        }
        if boundary[i] != usize::MAX && best[rest] != u32::MAX {
            let c = best[rest] + boundary[i] as u32;
            if c < b {
                b = c;
                ch = n as u8;
            }
        }
        best[m] = b;
        choice[m] = ch;
    }
    let mut pairs = Vec::new();
    let mut m = full;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        let j = choice[m] as usize;
        if j == n {
            pairs.push((i, None));
            m &= !(1 << i);
        } else {
            pairs.push((i, Some(j)));
            m &= !(1 << i) & !(1 << j);
        }
    }
    (pairs, best[full] as usize)
}

/// Outcome of matching one syndrome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    pub correction: Pauli,
    /// Minimum-weight frame reproducing the syndrome.
    pub frame: PauliFrame,
    pub x_weight: usize,
    pub z_weight: usize,
}

/// Matching decoder with plain lattice distances.
#[derive(Debug, Clone)]
pub struct Mwpm {
    lat: Lattice,
    x_graph: MatchingGraph,
    z_graph: MatchingGraph,
}

impl Mwpm {
    pub fn new(lat: &Lattice) -> Self {
        Mwpm { lat: lat.clone(), x_graph: MatchingGraph::new(lat, CheckKind::X), z_graph: MatchingGraph::new(lat, CheckKind::Z) }
    }

    /// Qubits of a minimum-weight frame flipping exactly `flipped` checks.
    fn solve(graph: &MatchingGraph, flipped: &[bool]) -> Result<(Vec<usize>, usize)> {
        let defects: Vec<usize> = flipped.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        if defects.len() > MAX_MWPM_DEFECTS {
            return Err(Error::Capacity(format!("{} defects exceeds matching bound {MAX_MWPM_DEFECTS}", defects.len())));
        }
        if defects.is_empty() {
            return Ok((Vec::new(), 0));
        }
        let paths: Vec<ShortestPaths> = defects.iter().map(|&d| graph.bfs(d)).collect();
        let dist: Vec<Vec<usize>> = paths.iter().map(|p| defects.iter().map(|&d| p.dist[d]).collect()).collect();
        let boundary: Vec<usize> = paths.iter().map(|p| p.boundary_dist).collect();
        let (pairs, weight) = match_defects(&dist, &boundary);
        if weight == u32::MAX as usize {
            return Err(Error::Precondition("syndrome cannot be matched".into()));
        }
        let mut qubits = Vec::new();
        for (i, j) in pairs {
            match j {
                Some(j) => paths[i].path_to(defects[j], &mut qubits),
                None => {
                    let (f, q) = paths[i].boundary_exit.expect("boundary reachable");
                    qubits.push(q);
                    paths[i].path_to(f, &mut qubits);
                }
            }
        }
        Ok((qubits, weight))
    }

    pub fn decode_full(&self, s: &Syndrome) -> Result<MatchingResult> {
        s.validate(&self.lat)?;
        let n = self.lat.num_qubits();
        // flipped Z checks call for X flips and vice versa
        let (xq, xw) = Self::solve(&self.z_graph, &s.z)?;
        let (zq, zw) = Self::solve(&self.x_graph, &s.x)?;
        let frame = PauliFrame::from_sites(n, &xq, &zq)?;
        let rec = recovery_frame(s, &self.lat)?;
        let correction = homology_class(&frame.compose(&rec), &self.lat)?;
        Ok(MatchingResult { correction, frame, x_weight: xw, z_weight: zw })
    }

    pub fn decode(&self, s: &Syndrome) -> Result<Pauli> {
        Ok(self.decode_full(s)?.correction)
    }
}

pub fn mwpm_decode(s: &Syndrome, lat: &Lattice) -> Result<Pauli> {
    Mwpm::new(lat).decode(s)
}

/// Coset masses of every bit-flip syndrome, by exhaustive enumeration of
/// the Boltzmann distribution.
#[derive(Debug, Clone)]
pub struct CosetTable {
    /// Z-check outcomes (as a bitmask) to the probability of each logical
    /// class of `error ∘ recovery`, indexed by [`Pauli::index`].
    pub masses: HashMap<u64, [f64; 4]>,
}

/// Relative slack within which two coset masses count as tied.
pub const COSET_TIE_TOLERANCE: f64 = 1e-12;

fn z_syndrome_mask(lat: &Lattice, flips: u64) -> u64 {
    lat.z_faces().iter().enumerate().fold(0, |m, (i, f)| {
        let par = f.sites.iter().filter(|&&s| flips >> s & 1 == 1).count() % 2;
        m | (par as u64) << i
    })
}

impl CosetTable {
    pub fn new(p: &IsingParams, lat: &Lattice) -> Result<Self> {
        let n = lat.num_qubits();
        if n > MAX_ENUMERATION_SITES {
            return Err(Error::Capacity(format!("{n} sites exceeds enumeration bound {MAX_ENUMERATION_SITES}")));
        }
        let dist = cbf_exact_distribution(p, lat)?;
        let left_col: u64 = lat.z_logical_support().iter().fold(0, |m, &s| m | 1 << s);
        let mut masses: HashMap<u64, [f64; 4]> = HashMap::new();
        let mut rec_cache: HashMap<u64, bool> = HashMap::new();
        for (mask, &prob) in dist.probs.iter().enumerate() {
            let mask = mask as u64;
            let sz = z_syndrome_mask(lat, mask);
            // class parity of the recovery string on the left column
            let rec_par = *rec_cache.entry(sz).or_insert_with(|| {
                let s = Syndrome::from_masks(lat, 0, sz);
                let r = recovery_frame(&s, lat).expect("valid syndrome");
                lat.z_logical_support().iter().filter(|&&q| r.x[q]).count() % 2 == 1
            });
            let err_par = (mask & left_col).count_ones() % 2 == 1;
            let class = if err_par ^ rec_par { Pauli::X } else { Pauli::I };
            masses.entry(sz).or_insert([0.0; 4])[class.index()] += prob;
        }
        Ok(CosetTable { masses })
    }

    /// Coset masses for `s`; `None` when `s` cannot occur under bit flips.
    pub fn masses_of(&self, s: &Syndrome) -> Option<[f64; 4]> {
        if s.x.iter().any(|&b| b) {
            return None;
        }
        let key = s.z.iter().enumerate().fold(0u64, |m, (i, &b)| m | (b as u64) << i);
        self.masses.get(&key).copied()
    }

    pub fn decode(&self, s: &Syndrome) -> Result<Pauli> {
        let m = self.masses_of(s).ok_or(Error::ZeroProbability)?;
        if m.iter().all(|&v| v <= 0.0) {
            return Err(Error::ZeroProbability);
        }
        Ok(argmax_coset(&m))
    }
}

/// Most probable class; ties go to the earlier of I, X, Y, Z.
pub fn argmax_coset(m: &[f64; 4]) -> Pauli {
    let mut best = 0;
    for i in 1..4 {
        if m[i] > m[best] + COSET_TIE_TOLERANCE * m[best].abs() {
            best = i;
        }
    }
    Pauli::from_index(best)
}

pub fn ml_decode_cbf_exact(s: &Syndrome, p: &IsingParams, lat: &Lattice) -> Result<Pauli> {
    s.validate(lat)?;
    CosetTable::new(p, lat)?.decode(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::syndrome_of;

    #[test]
    fn trivial_and_adjacent_defects() {
        let lat = Lattice::new(3, 3).unwrap();
        let m = Mwpm::new(&lat);
        assert_eq!(m.decode(&Syndrome::trivial(&lat)).unwrap(), Pauli::I);
        let e = PauliFrame::from_sites(9, &[4], &[]).unwrap();
        let s = syndrome_of(&e, &lat).unwrap();
        let r = m.decode_full(&s).unwrap();
        assert_eq!(r.x_weight, 1);
        assert_eq!(r.frame, e);
    }

    #[test]
    fn matching_dp_prefers_boundary_when_cheaper() {
        let dist = vec![vec![0, 5], vec![5, 0]];
        let (pairs, w) = match_defects(&dist, &[1, 1]);
        assert_eq!(w, 2);
        assert_eq!(pairs, vec![(0, None), (1, None)]);
        let (pairs, w) = match_defects(&dist, &[3, 3]);
        assert_eq!(w, 5);
        assert_eq!(pairs, vec![(0, Some(1))]);
    }

    #[test]
    fn ml_low_temperature_trivial_is_identity() {
        let lat = Lattice::new(3, 3).unwrap();
        let t = CosetTable::new(&IsingParams::benchmark(2.0), &lat).unwrap();
        assert_eq!(t.decode(&Syndrome::trivial(&lat)).unwrap(), Pauli::I);
        let mut s = Syndrome::trivial(&lat);
        s.x[0] = true;
        assert!(t.decode(&s).is_err());
    }

    #[test]
    fn ml_infinite_temperature_ties_pick_identity() {
        let lat = Lattice::new(3, 3).unwrap();
        let t = CosetTable::new(&IsingParams { beta: 0.0, ..IsingParams::benchmark(0.0) }, &lat).unwrap();
        for m in t.masses.values() {
            assert!((m[0] - m[1]).abs() < 1e-15);
        }
        assert_eq!(t.decode(&Syndrome::trivial(&lat)).unwrap(), Pauli::I);
    }
}
