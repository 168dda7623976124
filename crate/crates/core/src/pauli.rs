//! Single-qubit Pauli algebra with explicit phases.
//!
//! Paulis are ordered `I, X, Y, Z` everywhere in the crate (PTM rows and
//! columns, logical labels, tensor indices). `Y = iXZ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    /// Symplectic bits `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product up to phase.
    pub fn product(self, other: Pauli) -> Pauli {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Pauli::from_bits(ax ^ bx, az ^ bz)
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        !((ax & bz) ^ (az & bx))
    }

    /// The 2x2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Pauli {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(format!("unknown Pauli label {other:?}")),
        }
    }
}

/// `i^phase * pauli`, phase taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: u8,
    pub pauli: Pauli,
}

impl PhasedPauli {
    pub const IDENTITY: PhasedPauli = PhasedPauli { phase: 0, pauli: Pauli::I };

    pub fn new(pauli: Pauli) -> Self {
        PhasedPauli { phase: 0, pauli }
    }

    /// `X^x Z^z` as a phased Pauli; `XZ = -iY`.
    pub fn xz(x: bool, z: bool) -> Self {
        let phase = if x && z { 3 } else { 0 };
        PhasedPauli { phase, pauli: Pauli::from_bits(x, z) }
    }

    pub fn mul(self, rhs: PhasedPauli) -> PhasedPauli {
        let (ax, az) = self.pauli.bits();
        let (bx, bz) = rhs.pauli.bits();
        let (x, z) = (ax ^ bx, az ^ bz);
        // P = i^{xz} X^x Z^z
        let mut e = (ax & az) as i32 + (bx & bz) as i32 + 2 * (az & bx) as i32 - (x & z) as i32;
        e += self.phase as i32 + rhs.phase as i32;
        PhasedPauli { phase: e.rem_euclid(4) as u8, pauli: Pauli::from_bits(x, z) }
    }

    pub fn coefficient(self) -> Complex64 {
        match self.phase & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}
