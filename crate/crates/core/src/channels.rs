//! Single-qubit channels: Kraus form, Pauli transfer matrix (PTM), Choi
//! matrix, and distances from the identity channel.
//!
//! PTM convention: `M[i][j] = tr[P_i E(P_j)] / 2` in the order I, X, Y, Z.
//! The Choi matrix is `(E ⊗ id)(|Ω⟩⟨Ω|)` with `|Ω⟩ = (|00⟩ + |11⟩)/√2`,
//! so the identity channel's Choi matrix has unit trace.

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::tensor::{C64, ONE, ZERO};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];
pub type Ptm = [[f64; 4]; 4];

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut o = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn dagger2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn trace2(a: &Mat2) -> C64 {
    a[0][0] + a[1][1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<Mat2>,
}

impl KrausChannel {
    pub fn new(ops: Vec<Mat2>) -> Result<Self> {
        let mut sum = [[ZERO; 2]; 2];
        for k in &ops {
            let p = mul2(&dagger2(k), k);
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += p[i][j];
                }
            }
        }
        let dev = (sum[0][0] - ONE).norm() + (sum[1][1] - ONE).norm() + sum[0][1].norm() + sum[1][0].norm();
        if ops.is_empty() || dev > 1e-10 {
            return Err(Error::Validation(format!("Kraus operators not trace preserving (deviation {dev:.3e})")));
        }
        Ok(KrausChannel { ops })
    }

    pub fn identity() -> Self {
        KrausChannel { ops: vec![Pauli::I.matrix()] }
    }

    pub fn unitary(u: Mat2) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Applies X with probability `p`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("flip probability {p} outside [0,1]")));
        }
        let scale = |m: Mat2, s: f64| m.map(|row| row.map(|v| v * s));
        Self::new(vec![scale(Pauli::I.matrix(), (1.0 - p).sqrt()), scale(Pauli::X.matrix(), p.sqrt())])
    }

    pub fn ops(&self) -> &[Mat2] {
        &self.ops
    }

    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for k in &self.ops {
            let t = mul2(&mul2(k, rho), &dagger2(k));
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += t[i][j];
                }
            }
        }
        out
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &KrausChannel) -> KrausChannel {
        let ops = self.ops.iter().flat_map(|a| first.ops.iter().map(move |b| mul2(a, b))).collect();
        KrausChannel { ops }
    }
}

/// A single-qubit linear map stored as its PTM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannel {
    pub ptm: Ptm,
}

impl QubitChannel {
    pub fn identity() -> Self {
        let mut ptm = [[0.0; 4]; 4];
        for (i, row) in ptm.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        QubitChannel { ptm }
    }

    pub fn from_ptm(ptm: Ptm) -> Self {
        QubitChannel { ptm }
    }

    /// Conjugation by a Pauli: diagonal PTM with -1 where `P_i` anticommutes.
    pub fn pauli_conjugation(p: Pauli) -> Self {
        let mut ptm = [[0.0; 4]; 4];
        for q in Pauli::ALL {
            ptm[q.index()][q.index()] = if q.commutes_with(p) { 1.0 } else { -1.0 };
        }
        QubitChannel { ptm }
    }

    /// Stochastic Pauli channel with probabilities for I, X, Y, Z.
    pub fn pauli_channel(probs: [f64; 4]) -> Self {
        let mut ptm = [[0.0; 4]; 4];
        for q in Pauli::ALL {
            ptm[q.index()][q.index()] = Pauli::ALL
                .iter()
                .map(|&p| if q.commutes_with(p) { probs[p.index()] } else { -probs[p.index()] })
                .sum();
        }
        QubitChannel { ptm }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &QubitChannel) -> QubitChannel {
        let mut ptm = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                ptm[i][j] = (0..4).map(|k| self.ptm[i][k] * first.ptm[k][j]).sum();
            }
        }
        QubitChannel { ptm }
    }

    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for j in Pauli::ALL {
            // rho = sum_j r_j P_j / 2 with r_j = tr[P_j rho]
            let rj = trace2(&mul2(&j.matrix(), rho));
            for i in Pauli::ALL {
                let c = rj * self.ptm[i.index()][j.index()] * 0.5;
                let m = i.matrix();
                for a in 0..2 {
                    for b in 0..2 {
                        out[a][b] += c * m[a][b];
                    }
                }
            }
        }
        out
    }

    pub fn choi(&self) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for i in Pauli::ALL {
            for j in Pauli::ALL {
                let w = self.ptm[i.index()][j.index()] * 0.25;
                if w == 0.0 {
                    continue;
                }
                let a = i.matrix();
                let b = j.matrix();
                for r in 0..4 {
                    for c in 0..4 {
                        // P_i ⊗ P_j^T
                        out[r][c] += a[r / 2][c / 2] * b[c % 2][r % 2] * w;
                    }
                }
            }
        }
        out
    }

    /// Largest deviation of `ptm[0]` from `(1,0,0,0)`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let r = self.ptm[0];
        (r[0] - 1.0).abs().max(r[1].abs()).max(r[2].abs()).max(r[3].abs())
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let ev = hermitian_eigenvalues(&self.choi())?;
        Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
    }
}

pub fn ptm_from_kraus(k: &KrausChannel) -> Result<QubitChannel> {
    KrausChannel::new(k.ops.clone())?;
    let mut ptm = [[0.0; 4]; 4];
    for j in Pauli::ALL {
        let out = k.apply(&j.matrix());
        for i in Pauli::ALL {
            ptm[i.index()][j.index()] = 0.5 * trace2(&mul2(&i.matrix(), &out)).re;
        }
    }
    Ok(QubitChannel { ptm })
}

fn hermitian_eigenvalues(m: &Mat4) -> Result<Vec<f64>> {
    // Hermitian part guards against round-off asymmetry
    let a = faer::Mat::<C64>::from_fn(4, 4, |i, j| (m[i][j] + m[j][i].conj()) * 0.5);
    a.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::Linalg(format!("eigen: {e:?}")))
}

fn trace_norm_hermitian(m: &Mat4) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.into_iter().map(f64::abs).sum())
}

fn choi_difference(e: &QubitChannel) -> Mat4 {
    let a = e.choi();
    let b = QubitChannel::identity().choi();
    let mut d = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            d[i][j] = a[i][j] - b[i][j];
        }
    }
    d
}

/// Half the trace norm of the difference of normalized Choi matrices.
pub fn trace_distance_from_identity(e: &QubitChannel) -> Result<f64> {
    Ok(0.5 * trace_norm_hermitian(&choi_difference(e))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionNorm {
    Trace,
    Diamond,
}

impl std::str::FromStr for SelectionNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace" => Ok(SelectionNorm::Trace),
            "diamond" => Ok(SelectionNorm::Diamond),
            other => Err(Error::Config(format!("unknown norm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondOptions {
    /// Random starting points in addition to the maximally entangled input.
    pub restarts: usize,
    /// Haar-random pure inputs the optimum must dominate.
    pub certify_samples: usize,
    /// Rounds of re-optimization from a dominating sample before giving up.
    pub max_rounds: usize,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        DiamondOptions { restarts: 4, certify_samples: 1000, max_rounds: 3 }
    }
}

/// Seed used when no generator is supplied.
pub const DIAMOND_SEED: u64 = 0x5eed_d1a0;

/// Objective over two-qubit inputs `Σ c_ab |a⟩|b⟩`, with the first factor
/// entering the channel.
struct DiamondObjective {
    delta_units: [[Mat2; 2]; 2],
}

impl DiamondObjective {
    fn new(e: &QubitChannel) -> Self {
        let mut diff = e.ptm;
        for (i, row) in diff.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
        let d = QubitChannel::from_ptm(diff);
        let unit = |a: usize, b: usize| {
            let mut m = [[ZERO; 2]; 2];
            m[a][b] = ONE;
            d.apply(&m)
        };
        DiamondObjective { delta_units: [[unit(0, 0), unit(0, 1)], [unit(1, 0), unit(1, 1)]] }
    }

    fn value(&self, c: &Mat2) -> f64 {
        let mut out = [[ZERO; 4]; 4];
        for a in 0..2 {
            for a2 in 0..2 {
                let du = &self.delta_units[a][a2];
                for b in 0..2 {
                    for b2 in 0..2 {
                        let w = c[a][b] * c[a2][b2].conj();
                        for x in 0..2 {
                            for y in 0..2 {
                                out[x * 2 + b][y * 2 + b2] += w * du[x][y];
                            }
                        }
                    }
                }
            }
        }
        trace_norm_hermitian(&out).unwrap_or(f64::NAN)
    }

    /// Input with system marginal given by a Bloch vector (clamped to the
    /// unit ball); the purification is `√ρ`, which suffices since the value is
    /// invariant under unitaries on the reference.
    fn value_bloch(&self, v: &[f64; 3]) -> f64 {
        self.value(&sqrt_state(&clamp_ball(v)))
    }
}

fn clamp_ball(v: &[f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n > 1.0 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        *v
    }
}

fn sqrt_state(r: &[f64; 3]) -> Mat2 {
    let rho = [
        [C64::new((1.0 + r[2]) / 2.0, 0.0), C64::new(r[0] / 2.0, -r[1] / 2.0)],
        [C64::new(r[0] / 2.0, r[1] / 2.0), C64::new((1.0 - r[2]) / 2.0, 0.0)],
    ];
    let det = ((1.0 - (r[0] * r[0] + r[1] * r[1] + r[2] * r[2])) / 4.0).max(0.0);
    let s = det.sqrt();
    let t = (1.0 + 2.0 * s).sqrt();
    [
        [(rho[0][0] + s) / t, rho[0][1] / t],
        [rho[1][0] / t, (rho[1][1] + s) / t],
    ]
}

fn bloch_of_marginal(c: &Mat2) -> [f64; 3] {
    let rho = mul2(c, &dagger2(c));
    [2.0 * rho[0][1].re, -2.0 * rho[0][1].im, (rho[0][0] - rho[1][1]).re]
}

/// Maximizes `f` with Nelder-Mead from `start`.
fn nelder_mead_max(f: impl Fn(&[f64; 3]) -> f64, start: [f64; 3], step: f64) -> ([f64; 3], f64) {
    let g = |x: &[f64; 3]| -f(x);
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, g(&start)));
    for k in 0..3 {
        let mut p = start;
        p[k] += step;
        simplex.push((p, g(&p)));
    }
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])];
    for _ in 0..600 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[3].1 - simplex[0].1).abs() < 1e-13 {
            break;
        }
        let mut cen = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                cen[k] += p[k] / 3.0;
            }
        }
        let worst = simplex[3].0;
        let refl = lerp(&cen, &worst, -1.0);
        let fr = g(&refl);
        if fr < simplex[0].1 {
            let exp = lerp(&cen, &worst, -2.0);
            let fe = g(&exp);
            simplex[3] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (refl, fr);
        } else {
            let con = lerp(&cen, &worst, 0.5);
            let fc = g(&con);
            if fc < simplex[3].1 {
                simplex[3] = (con, fc);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&best, &s.0, 0.5);
                    s.1 = g(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (clamp_ball(&simplex[0].0), -simplex[0].1)
}

fn haar_pure(rng: &mut impl Rng) -> Mat2 {
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let mut c = [[ZERO; 2]; 2];
    let mut norm = 0.0;
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v = C64::new(gauss(), gauss());
            norm += v.norm_sqr();
        }
    }
    let norm = norm.sqrt();
    c.map(|row| row.map(|v| v / norm))
}

/// Diamond distance from the identity with default options and the fixed
/// internal seed.
pub fn diamond_distance_from_identity(e: &QubitChannel) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(DIAMOND_SEED);
    diamond_distance_with(e, &DiamondOptions::default(), &mut rng)
}

/// `max_ψ ||((E - id) ⊗ id)(|ψ⟩⟨ψ|)||_1` by multi-start local search,
/// certified against Haar-random inputs and the maximally entangled input.
pub fn diamond_distance_with(e: &QubitChannel, opts: &DiamondOptions, rng: &mut impl Rng) -> Result<f64> {
    let obj = DiamondObjective::new(e);
    let f = |v: &[f64; 3]| obj.value_bloch(v);
    let entangled = f(&[0.0; 3]);
    let (_, mut best) = nelder_mead_max(f, [0.0; 3], 0.3);
    for _ in 0..opts.restarts {
        let start = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
        let (_, v) = nelder_mead_max(f, start, 0.2);
        best = best.max(v);
    }
    best = best.max(entangled);
    if !best.is_finite() {
        return Err(Error::Linalg("non-finite diamond objective".into()));
    }
    for _ in 0..=opts.max_rounds {
        let mut witness: Option<(Mat2, f64)> = None;
        for _ in 0..opts.certify_samples {
            let c = haar_pure(rng);
            let v = obj.value(&c);
            if v > best + 1e-9 && witness.as_ref().is_none_or(|w| v > w.1) {
                witness = Some((c, v));
            }
        }
        let Some((c, v)) = witness else { return Ok(best) };
        let (_, refined) = nelder_mead_max(f, bloch_of_marginal(&c), 0.05);
        best = best.max(v).max(refined);
    }
    Err(Error::NoConvergence { best_lower_bound: best })
}

/// Raw logical Choi entries `C_ij` and the `C_II` normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalChoi {
    pub c: Mat4,
    pub norm_factor: C64,
}

impl LogicalChoi {
    pub fn new(c: Mat4) -> Self {
        LogicalChoi { c, norm_factor: c[0][0] }
    }

    /// Logical channel with PTM `Re(C_ij / C_II)`.
    pub fn normalized(&self) -> Result<QubitChannel> {
        let n = self.norm_factor;
        if n == ZERO || !n.re.is_finite() || !n.im.is_finite() {
            return Err(Error::ZeroProbability);
        }
        let mut ptm = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                ptm[i][j] = (self.c[i][j] / n).re;
            }
        }
        Ok(QubitChannel { ptm })
    }

    pub fn scaled(&self, s: f64) -> LogicalChoi {
        LogicalChoi::new(self.c.map(|row| row.map(|v| v * s)))
    }
}

pub fn distance_from_identity(e: &QubitChannel, norm: SelectionNorm) -> Result<f64> {
    match norm {
        SelectionNorm::Trace => trace_distance_from_identity(e),
        SelectionNorm::Diamond => diamond_distance_from_identity(e),
    }
}

/// Relative slack within which two candidate distances count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// The logical Pauli `L` minimizing the distance of `L ∘ E` from the
/// identity; ties go to the earlier of I, X, Y, Z.
pub fn select_correction(lc: &LogicalChoi, norm: SelectionNorm) -> Result<Pauli> {
    Ok(select_from_channel(&lc.normalized()?, norm)?.0)
}

/// Selection on an already normalized channel; also returns the distance of
/// the corrected channel.
pub fn select_from_channel(e: &QubitChannel, norm: SelectionNorm) -> Result<(Pauli, f64)> {
    let mut best = (Pauli::I, distance_from_identity(e, norm)?);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let d = distance_from_identity(&QubitChannel::pauli_conjugation(p).compose(e), norm)?;
        if d < best.1 - TIE_TOLERANCE * best.1.abs().max(1.0) {
            best = (p, d);
        }
    }
    Ok(best)
}

/// A random CPTP map from a random isometry with `kraus_count` outputs.
pub fn random_kraus(kraus_count: usize, rng: &mut impl Rng) -> KrausChannel {
    let mut g: Vec<Mat2> = (0..kraus_count)
        .map(|_| {
            let mut m = [[ZERO; 2]; 2];
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            m
        })
        .collect();
    // normalize by (Σ G†G)^{-1/2}
    let mut a = [[ZERO; 2]; 2];
    for m in &g {
        let p = mul2(&dagger2(m), m);
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] += p[i][j];
            }
        }
    }
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).re;
    let s = det.sqrt();
    let t = (a[0][0].re + a[1][1].re + 2.0 * s).sqrt();
    let sq = [[(a[0][0] + s) / t, a[0][1] / t], [a[1][0] / t, (a[1][1] + s) / t]];
    let d = (sq[0][0] * sq[1][1] - sq[0][1] * sq[1][0]).re;
    let inv = [[sq[1][1] / d, -sq[0][1] / d], [-sq[1][0] / d, sq[0][0] / d]];
    for m in g.iter_mut() {
        *m = mul2(m, &inv);
    }
    KrausChannel::new(g).expect("normalized Kraus set")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_ptm(a: &Ptm, b: &Ptm, tol: f64) {
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[i][j] - b[i][j]).abs() < tol, "[{i}][{j}]: {} vs {}", a[i][j], b[i][j]);
            }
        }
    }

    #[test]
    fn identity_and_bit_flip_ptm() {
        assert_ptm(&ptm_from_kraus(&KrausChannel::identity()).unwrap().ptm, &QubitChannel::identity().ptm, 1e-14);
        let bf = ptm_from_kraus(&KrausChannel::bit_flip(0.1).unwrap()).unwrap();
        assert_ptm(&bf.ptm, &QubitChannel::pauli_channel([0.9, 0.1, 0.0, 0.0]).ptm, 1e-14);
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let half = Pauli::I.matrix().map(|r| r.map(|v| v * 0.5));
        assert!(KrausChannel::new(vec![half]).is_err());
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let j = QubitChannel::identity().choi();
        for r in 0..4 {
            for c in 0..4 {
                let want = if (r == 0 || r == 3) && (c == 0 || c == 3) { 0.5 } else { 0.0 };
                assert!((j[r][c] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn distances_of_simple_channels() {
        let id = QubitChannel::identity();
        assert!(trace_distance_from_identity(&id).unwrap().abs() < 1e-15);
        assert_eq!(diamond_distance_from_identity(&id).unwrap(), 0.0);
        let x = QubitChannel::pauli_conjugation(Pauli::X);
        assert!((trace_distance_from_identity(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!((diamond_distance_from_identity(&x).unwrap() - 2.0).abs() < 1e-6);
        let bf = QubitChannel::pauli_channel([0.9, 0.1, 0.0, 0.0]);
        assert!((trace_distance_from_identity(&bf).unwrap() - 0.1).abs() < 1e-12);
        assert!((diamond_distance_from_identity(&bf).unwrap() - 0.2).abs() < 1e-6);
    }

    #[test]
    fn kraus_composition_is_ptm_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_kraus(3, &mut rng);
            let b = random_kraus(2, &mut rng);
            let lhs = ptm_from_kraus(&a.compose(&b)).unwrap();
            let rhs = ptm_from_kraus(&a).unwrap().compose(&ptm_from_kraus(&b).unwrap());
            assert_ptm(&lhs.ptm, &rhs.ptm, 1e-10);
        }
    }

    #[test]
    fn random_channels_are_cptp() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let e = ptm_from_kraus(&random_kraus(4, &mut rng)).unwrap();
            assert!(e.trace_preservation_defect() < 1e-12);
            assert!(e.min_choi_eigenvalue().unwrap() > -1e-10);
        }
    }

    #[test]
    fn diamond_is_unitarily_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = ptm_from_kraus(&random_kraus(2, &mut rng)).unwrap();
        let u = ptm_from_kraus(&random_kraus(1, &mut rng)).unwrap();
        // U† as the transpose of the (orthogonal) unitary PTM
        let mut ut = u;
        for i in 0..4 {
            for j in 0..4 {
                ut.ptm[i][j] = u.ptm[j][i];
            }
        }
        let conj = u.compose(&e).compose(&ut);
        let a = diamond_distance_from_identity(&e).unwrap();
        let b = diamond_distance_from_identity(&conj).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn selection_basic_cases() {
        let lc = |e: QubitChannel| LogicalChoi::new(e.ptm.map(|r| r.map(|v| C64::new(v * 3.0, 0.0))));
        for norm in [SelectionNorm::Trace, SelectionNorm::Diamond] {
            assert_eq!(select_correction(&lc(QubitChannel::identity()), norm).unwrap(), Pauli::I);
            assert_eq!(select_correction(&lc(QubitChannel::pauli_conjugation(Pauli::X)), norm).unwrap(), Pauli::X);
            let bf = QubitChannel::pauli_channel([0.7, 0.3, 0.0, 0.0]);
            assert_eq!(select_correction(&lc(bf), norm).unwrap(), Pauli::I);
        }
        let zero = LogicalChoi::new([[ZERO; 4]; 4]);
        assert!(matches!(select_correction(&zero, SelectionNorm::Trace), Err(Error::ZeroProbability)));
    }

    #[test]
    fn pauli_diagonal_selection_is_most_likely_coset() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let mut p: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= s);
            let best = (0..4).fold(0, |b, i| if p[i] > p[b] { i } else { b });
            let lc = LogicalChoi::new(QubitChannel::pauli_channel(p).ptm.map(|r| r.map(|v| C64::new(v, 0.0))));
            assert_eq!(select_correction(&lc, SelectionNorm::Trace).unwrap(), Pauli::from_index(best));
        }
    }
}
