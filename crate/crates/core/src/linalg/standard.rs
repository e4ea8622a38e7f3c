//! Fixed operators: Pauli matrices and the maximally entangled projector.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::layout::SubsystemLayout;
use super::operator::{Operator, C64};
use crate::error::{Error, Result};

/// Default labels of the two legs of [`max_entangled_projector`].
pub const LEFT_LEG: &str = "L";
pub const RIGHT_LEG: &str = "R";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::UnknownPauli(other.to_string())),
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

impl Pauli {
    pub fn matrix(self) -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [one, o, o, one],
            Pauli::X => [o, one, one, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [one, o, o, -one],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// Standard 2×2 Pauli matrix on a single factor labelled `q`.
pub fn pauli(p: Pauli) -> Operator {
    Operator::on("q", p.matrix()).expect("2x2 matrix on a qubit layout")
}

/// Pauli by name (`I`, `X`, `Y`, `Z`).
pub fn pauli_named(name: &str) -> Result<Operator> {
    Ok(pauli(name.parse()?))
}

/// Tensor product of single-qubit Paulis placed on the named factors of `layout`;
/// unnamed factors carry identities.
pub fn pauli_string(layout: &SubsystemLayout, factors: &[(&str, Pauli)]) -> Result<Operator> {
    let mut acc: Option<Operator> = None;
    for &(label, p) in factors {
        let op = pauli(p).relabel(&[label])?;
        acc = Some(match acc {
            None => op,
            Some(a) => a.tensor(&op)?,
        });
    }
    match acc {
        None => Ok(Operator::identity(layout.clone())),
        Some(op) => op.embed(layout),
    }
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = d^{-1/2} Σ_i |i⟩⊗|i⟩`, on legs `L ⊗ R`.
pub fn max_entangled_projector(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let n = d * d;
    let v = C64::new(1.0 / d as f64, 0.0);
    let mat = DMatrix::from_fn(n, n, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::new(SubsystemLayout::uniform(&[LEFT_LEG, RIGHT_LEG], d)?, mat)
}

/// `Π` on the two given legs.
pub fn max_entangled_projector_on(first: &str, second: &str, d: usize) -> Result<Operator> {
    max_entangled_projector(d)?.relabel(&[first, second])
}
