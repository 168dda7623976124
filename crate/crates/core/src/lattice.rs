//! Planar surface-code geometry: qubits on the vertices of a W x H grid,
//! checkerboard faces carrying X- and Z-checks, weight-2 faces on the edges.
//!
//! Sites are indexed row-major, `row * width + col`. A face is anchored at
//! the row/col of its upper-left corner, which may be -1 for boundary faces;
//! faces of each type are listed row-major by anchor.

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckKind {
    /// Product of X over the face; detects Z errors.
    X,
    /// Product of Z over the face; detects X errors.
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub kind: CheckKind,
    pub row: isize,
    pub col: isize,
    pub sites: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    width: usize,
    height: usize,
    x_faces: Vec<Face>,
    z_faces: Vec<Face>,
    /// Left column, top to bottom: support of the logical Z.
    z_logical: Vec<usize>,
    /// Bottom row, left to right: support of the logical X.
    x_logical: Vec<usize>,
    site_x_faces: Vec<Vec<usize>>,
    site_z_faces: Vec<Vec<usize>>,
}

fn face_kind(r: isize, c: isize, w: isize, h: isize) -> Option<CheckKind> {
    let bulk = |r: isize, c: isize| if (r + c).rem_euclid(2) == 0 { CheckKind::X } else { CheckKind::Z };
    let row_in = (0..h - 1).contains(&r);
    let col_in = (0..w - 1).contains(&c);
    if row_in && col_in {
        return Some(bulk(r, c));
    }
    if col_in && r == -1 {
        return (bulk(0, c) == CheckKind::X).then_some(CheckKind::Z);
    }
    if col_in && r == h - 1 {
        return (bulk(h - 2, c) == CheckKind::X).then_some(CheckKind::Z);
    }
    if row_in && c == -1 {
        return (bulk(r, 0) == CheckKind::Z).then_some(CheckKind::X);
    }
    if row_in && c == w - 1 {
        return (bulk(r, w - 2) == CheckKind::Z).then_some(CheckKind::X);
    }
    None
}

impl Lattice {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::Lattice(format!("lattice must be at least 2x2, got {width}x{height}")));
        }
        let (w, h) = (width as isize, height as isize);
        let mut x_faces = Vec::new();
        let mut z_faces = Vec::new();
        for r in -1..h {
            for c in -1..w {
                let Some(kind) = face_kind(r, c, w, h) else { continue };
                let mut sites = Vec::with_capacity(4);
                for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let (sr, sc) = (r + dr, c + dc);
                    if (0..h).contains(&sr) && (0..w).contains(&sc) {
                        sites.push((sr * w + sc) as usize);
                    }
                }
                let face = Face { kind, row: r, col: c, sites };
                match kind {
                    CheckKind::X => x_faces.push(face),
                    CheckKind::Z => z_faces.push(face),
                }
            }
        }
        let n = width * height;
        let mut site_x_faces = vec![Vec::new(); n];
        let mut site_z_faces = vec![Vec::new(); n];
        for (i, f) in x_faces.iter().enumerate() {
            for &s in &f.sites {
                site_x_faces[s].push(i);
            }
        }
        for (i, f) in z_faces.iter().enumerate() {
            for &s in &f.sites {
                site_z_faces[s].push(i);
            }
        }
        let lat = Lattice {
            width,
            height,
            x_faces,
            z_faces,
            z_logical: (0..height).map(|r| r * width).collect(),
            x_logical: (0..width).map(|c| (height - 1) * width + c).collect(),
            site_x_faces,
            site_z_faces,
        };
        lat.verify()?;
        Ok(lat)
    }

    /// Exhaustive structural checks, run at construction.
    fn verify(&self) -> Result<()> {
        let n = self.num_qubits();
        if self.x_faces.len() + self.z_faces.len() != n - 1 {
            return Err(Error::Lattice(format!("{} checks for {} qubits", self.num_checks(), n)));
        }
        let overlap = |a: &[usize], b: &[usize]| a.iter().filter(|s| b.contains(s)).count();
        for xf in &self.x_faces {
            for zf in &self.z_faces {
                if overlap(&xf.sites, &zf.sites) % 2 != 0 {
                    return Err(Error::Lattice(format!("faces at ({},{}) and ({},{}) anticommute", xf.row, xf.col, zf.row, zf.col)));
                }
            }
            if overlap(&xf.sites, &self.z_logical) % 2 != 0 {
                return Err(Error::Lattice("logical Z anticommutes with an X check".into()));
            }
        }
        for zf in &self.z_faces {
            if overlap(&zf.sites, &self.x_logical) % 2 != 0 {
                return Err(Error::Lattice("logical X anticommutes with a Z check".into()));
            }
        }
        if overlap(&self.x_logical, &self.z_logical) % 2 != 1 {
            return Err(Error::Lattice("logical operators commute".into()));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_qubits(&self) -> usize {
        self.width * self.height
    }

    pub fn num_checks(&self) -> usize {
        self.x_faces.len() + self.z_faces.len()
    }

    pub fn site(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site / self.width, site % self.width)
    }

    pub fn x_faces(&self) -> &[Face] {
        &self.x_faces
    }

    pub fn z_faces(&self) -> &[Face] {
        &self.z_faces
    }

    pub fn faces(&self, kind: CheckKind) -> &[Face] {
        match kind {
            CheckKind::X => &self.x_faces,
            CheckKind::Z => &self.z_faces,
        }
    }

    pub fn z_logical_support(&self) -> &[usize] {
        &self.z_logical
    }

    pub fn x_logical_support(&self) -> &[usize] {
        &self.x_logical
    }

    /// Indices of the X-type faces containing `site`.
    pub fn x_faces_of(&self, site: usize) -> &[usize] {
        &self.site_x_faces[site]
    }

    pub fn z_faces_of(&self, site: usize) -> &[usize] {
        &self.site_z_faces[site]
    }

    /// Nearest-neighbour site pairs (horizontal first, then vertical).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width - 1 {
                e.push((self.site(r, c), self.site(r, c + 1)));
            }
        }
        for r in 0..self.height - 1 {
            for c in 0..self.width {
                e.push((self.site(r, c), self.site(r + 1, c)));
            }
        }
        e
    }

    /// Frame of the logical operator `p` on the canonical supports.
    pub fn logical_frame(&self, p: Pauli) -> PauliFrame {
        let (x, z) = p.bits();
        let mut f = PauliFrame::identity(self.num_qubits());
        if x {
            for &s in &self.x_logical {
                f.x[s] = true;
            }
        }
        if z {
            for &s in &self.z_logical {
                f.z[s] = true;
            }
        }
        f
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sites: Vec<[usize; 2]> = (0..self.num_qubits())
            .map(|s| {
                let (r, c) = self.coords(s);
                [r, c]
            })
            .collect();
        serde_json::json!({
            "width": self.width,
            "height": self.height,
            "sites": sites,
            "x_faces": self.x_faces,
            "z_faces": self.z_faces,
            "z_logical_support": self.z_logical,
            "x_logical_support": self.x_logical,
        })
    }
}

/// Shorthand for [`Lattice::new`].
pub fn build_lattice(width: usize, height: usize) -> Result<Lattice> {
    Lattice::new(width, height)
}

/// X and Z flips per site; a site with both carries Y up to phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn identity(n: usize) -> Self {
        PauliFrame { x: vec![false; n], z: vec![false; n] }
    }

    pub fn from_sites(n: usize, x_sites: &[usize], z_sites: &[usize]) -> Result<Self> {
        let mut f = Self::identity(n);
        for &s in x_sites {
            *f.x.get_mut(s).ok_or_else(|| Error::Domain(format!("site {s} outside lattice")))? ^= true;
        }
        for &s in z_sites {
            *f.z.get_mut(s).ok_or_else(|| Error::Domain(format!("site {s} outside lattice")))? ^= true;
        }
        Ok(f)
    }

    /// X flips from a bitmask over the first 64 sites.
    pub fn from_x_mask(n: usize, mask: u64) -> Self {
        let mut f = Self::identity(n);
        for (i, v) in f.x.iter_mut().enumerate() {
            *v = mask >> i & 1 == 1;
        }
        f
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn pauli_at(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x[site], self.z[site])
    }

    pub fn compose(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Number of sites carrying a non-identity Pauli.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(a, b)| **a || **b).count()
    }
}

/// Check outcomes; `true` marks a -1 outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SyndromeRepr", into = "SyndromeRepr")]
pub struct Syndrome {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SyndromeRepr {
    x_outcomes: Vec<i8>,
    z_outcomes: Vec<i8>,
}

impl TryFrom<SyndromeRepr> for Syndrome {
    type Error = String;

    fn try_from(r: SyndromeRepr) -> std::result::Result<Self, String> {
        let conv = |v: Vec<i8>| {
            v.into_iter()
                .map(|o| match o {
                    1 => Ok(false),
                    -1 => Ok(true),
                    other => Err(format!("outcome {other} is not +1 or -1")),
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        Ok(Syndrome { x: conv(r.x_outcomes)?, z: conv(r.z_outcomes)? })
    }
}

impl From<Syndrome> for SyndromeRepr {
    fn from(s: Syndrome) -> Self {
        let conv = |v: Vec<bool>| v.into_iter().map(|f| if f { -1 } else { 1 }).collect();
        SyndromeRepr { x_outcomes: conv(s.x), z_outcomes: conv(s.z) }
    }
}

impl Syndrome {
    pub fn trivial(lat: &Lattice) -> Self {
        Syndrome { x: vec![false; lat.x_faces.len()], z: vec![false; lat.z_faces.len()] }
    }

    pub fn is_trivial(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&f| f)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().chain(&self.z).filter(|&&f| f).count()
    }

    /// Component-wise product of outcomes.
    pub fn combine(&self, other: &Syndrome) -> Syndrome {
        Syndrome {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Syndrome with X outcomes from the low bits of `x_mask` and Z
    /// outcomes from `z_mask`.
    pub fn from_masks(lat: &Lattice, x_mask: u64, z_mask: u64) -> Self {
        Syndrome {
            x: (0..lat.x_faces.len()).map(|i| x_mask >> i & 1 == 1).collect(),
            z: (0..lat.z_faces.len()).map(|i| z_mask >> i & 1 == 1).collect(),
        }
    }

    /// Every syndrome of a small lattice, X-outcome bits varying fastest.
    pub fn enumerate(lat: &Lattice) -> Vec<Syndrome> {
        let (nx, nz) = (lat.x_faces.len(), lat.z_faces.len());
        assert!(nx + nz < 32, "too many checks to enumerate");
        let mut out = Vec::with_capacity(1 << (nx + nz));
        for zm in 0..1u64 << nz {
            for xm in 0..1u64 << nx {
                out.push(Syndrome::from_masks(lat, xm, zm));
            }
        }
        out
    }

    pub fn validate(&self, lat: &Lattice) -> Result<()> {
        if self.x.len() != lat.x_faces.len() || self.z.len() != lat.z_faces.len() {
            return Err(Error::Domain(format!(
                "syndrome has {}+{} outcomes, lattice has {}+{} checks",
                self.x.len(),
                self.z.len(),
                lat.x_faces.len(),
                lat.z_faces.len()
            )));
        }
        Ok(())
    }
}

pub fn syndrome_of(frame: &PauliFrame, lat: &Lattice) -> Result<Syndrome> {
    if frame.x.len() != lat.num_qubits() || frame.z.len() != lat.num_qubits() {
        return Err(Error::Domain(format!("frame on {} sites, lattice has {}", frame.len(), lat.num_qubits())));
    }
    let parity = |face: &Face, flips: &[bool]| face.sites.iter().filter(|&&s| flips[s]).count() % 2 == 1;
    Ok(Syndrome {
        x: lat.x_faces.iter().map(|f| parity(f, &frame.z)).collect(),
        z: lat.z_faces.iter().map(|f| parity(f, &frame.x)).collect(),
    })
}

/// Canonical recovery: a Z string up the face's leftmost column for each
/// flipped X-check, an X string left along the face's top row for each
/// flipped Z-check.
pub fn recovery_frame(s: &Syndrome, lat: &Lattice) -> Result<PauliFrame> {
    s.validate(lat)?;
    let mut f = PauliFrame::identity(lat.num_qubits());
    for (face, _) in lat.x_faces.iter().zip(&s.x).filter(|(_, &b)| b) {
        let (r0, c0) = lat.coords(face.sites[0]);
        for r in 0..=r0 {
            f.z[lat.site(r, c0)] ^= true;
        }
    }
    for (face, _) in lat.z_faces.iter().zip(&s.z).filter(|(_, &b)| b) {
        let (r0, c0) = lat.coords(face.sites[0]);
        for c in 0..=c0 {
            f.x[lat.site(r0, c)] ^= true;
        }
    }
    Ok(f)
}

/// Logical class of a syndrome-free frame.
pub fn homology_class(frame: &PauliFrame, lat: &Lattice) -> Result<Pauli> {
    if !syndrome_of(frame, lat)?.is_trivial() {
        return Err(Error::Precondition("frame has a non-trivial syndrome".into()));
    }
    Ok(homology_unchecked(frame, lat))
}

pub(crate) fn homology_unchecked(frame: &PauliFrame, lat: &Lattice) -> Pauli {
    let xbar = lat.z_logical.iter().filter(|&&s| frame.x[s]).count() % 2 == 1;
    let zbar = lat.x_logical.iter().filter(|&&s| frame.z[s]).count() % 2 == 1;
    Pauli::from_bits(xbar, zbar)
}
