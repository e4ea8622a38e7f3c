//! Bipartite process matrices: canonical constructors and validity checks.
//!
//! All processes live on the canonical layout `(A_I, A_O, B_I, B_O)` with a
//! common local dimension `d`. Validity means positivity, `Tr W = d²`, and the
//! three causality constraints written with trace-and-replace maps `R_Y`:
//!
//! * `(1 − R_AO)(1 − R_BO) W = 0`
//! * `(1 − R_AO) R_BI W = 0`
//! * `(1 − R_BO) R_AI W = 0`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_entangled_projector_on, pauli_string, Operator, Pauli, SubsystemLayout};
use crate::tolerance::{DEFAULT_TOL, HERMITIAN_TOL};

pub const A_I: &str = "A_I";
pub const A_O: &str = "A_O";
pub const B_I: &str = "B_I";
pub const B_O: &str = "B_O";

/// Canonical factor order of every process-level operator.
pub const CANONICAL: [&str; 4] = [A_I, A_O, B_I, B_O];

pub fn canonical_layout(d: usize) -> Result<SubsystemLayout> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    SubsystemLayout::uniform(&CANONICAL, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalOrder {
    #[serde(rename = "A<B")]
    AliceFirst,
    #[serde(rename = "B<A")]
    BobFirst,
}

impl CausalOrder {
    pub const BOTH: [CausalOrder; 2] = [CausalOrder::AliceFirst, CausalOrder::BobFirst];

    pub fn reversed(self) -> Self {
        match self {
            CausalOrder::AliceFirst => CausalOrder::BobFirst,
            CausalOrder::BobFirst => CausalOrder::AliceFirst,
        }
    }
}

impl fmt::Display for CausalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalOrder::AliceFirst => f.write_str("A<B"),
            CausalOrder::BobFirst => f.write_str("B<A"),
        }
    }
}

impl FromStr for CausalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A<B" | "ab" | "AB" => Ok(CausalOrder::AliceFirst),
            "B<A" | "ba" | "BA" => Ok(CausalOrder::BobFirst),
            other => Err(Error::InvalidProcess(format!(
                "unknown causal order `{other}`"
            ))),
        }
    }
}

/// A Hermitian operator on `(A_I, A_O, B_I, B_O)`, all legs of dimension `d`.
///
/// Construction only checks the layout and Hermiticity; use [`validate`] for
/// the process conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    op: Operator,
    d: usize,
}

impl ProcessMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let d = op.layout().dims().first().copied().unwrap_or(0);
        let expected = canonical_layout(d)?;
        if op.layout() != &expected {
            return Err(Error::LayoutMismatch(format!(
                "process must be on {expected}, got {}",
                op.layout()
            )));
        }
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { op, d })
    }

    /// Reorders `op` into the canonical layout first.
    pub fn from_any_order(op: &Operator) -> Result<Self> {
        Self::new(op.permute_subsystems(&CANONICAL)?)
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Convex (or any real linear) combination of processes with equal `d`.
    pub fn combine(terms: &[(f64, &ProcessMatrix)]) -> Result<Self> {
        let (first, rest) = terms
            .split_first()
            .ok_or_else(|| Error::InvalidProcess("empty combination".into()))?;
        let mut acc = first.1.op.scale(first.0);
        for (w, p) in rest {
            p.op.check_same_layout(&acc)?;
            acc += &p.op.scale(*w);
        }
        Self::new(acc)
    }
}

/// `I_{A_I} ⊗ Π_{A_O B_I} ⊗ I_{B_O}` for A≺B, and the mirror
/// `I_{A_O B_I} ⊗ Π_{B_O A_I}` for B≺A.
pub fn fixed_order(order: CausalOrder, d: usize) -> Result<ProcessMatrix> {
    let layout = canonical_layout(d)?;
    let wire = match order {
        CausalOrder::AliceFirst => max_entangled_projector_on(A_O, B_I, d)?,
        CausalOrder::BobFirst => max_entangled_projector_on(B_O, A_I, d)?,
    };
    ProcessMatrix::new(wire.embed(&layout)?)
}

/// The qubit OCB process `¼(I + (Z_AO Z_BI + Z_AI X_BI Z_BO)/√2)`.
pub fn ocb_process() -> ProcessMatrix {
    let layout = canonical_layout(2).expect("d = 2");
    let zz = pauli_string(&layout, &[(A_O, Pauli::Z), (B_I, Pauli::Z)]).expect("labels exist");
    let zxz = pauli_string(
        &layout,
        &[(A_I, Pauli::Z), (B_I, Pauli::X), (B_O, Pauli::Z)],
    )
    .expect("labels exist");
    let op = (Operator::identity(layout) + (zz + zxz).scale(std::f64::consts::FRAC_1_SQRT_2))
        .scale(0.25);
    ProcessMatrix::new(op).expect("Hermitian by construction")
}

/// Control-traced quantum switch: `½(W^{A≺B} + W^{B≺A})`.
pub fn qs_marginal(d: usize) -> Result<ProcessMatrix> {
    let ab = fixed_order(CausalOrder::AliceFirst, d)?;
    let ba = fixed_order(CausalOrder::BobFirst, d)?;
    ProcessMatrix::combine(&[(0.5, &ab), (0.5, &ba)])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityResiduals {
    pub min_eigenvalue: f64,
    /// `|Tr W − d²|`
    pub trace: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub psd: bool,
    pub trace_ok: bool,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub residuals: ValidityResiduals,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.psd && self.trace_ok && self.c1 && self.c2 && self.c3
    }
}

fn r(x: &Operator, label: &str) -> Operator {
    x.trace_and_replace(label)
        .expect("canonical labels are present")
}

/// Max-entry residuals of the three causality constraints.
pub fn constraint_residuals(w: &ProcessMatrix) -> [f64; 3] {
    let x = w.op();
    let ao = r(x, A_O);
    let bo = r(x, B_O);
    let c1 = (x - &ao - &bo + r(&ao, B_O)).max_abs();
    let bi = r(x, B_I);
    let c2 = (&bi - &r(&bi, A_O)).max_abs();
    let ai = r(x, A_I);
    let c3 = (&ai - &r(&ai, B_O)).max_abs();
    [c1, c2, c3]
}

pub fn validate(w: &ProcessMatrix, tol: f64) -> ValidityReport {
    let d2 = (w.d() * w.d()) as f64;
    let min_eigenvalue = w.op().hermitian_eigenvalues()[0];
    let trace = (w.op().trace() - crate::C64::new(d2, 0.0)).norm();
    let [c1, c2, c3] = constraint_residuals(w);
    ValidityReport {
        psd: min_eigenvalue >= -tol,
        trace_ok: trace <= tol * d2,
        c1: c1 <= tol,
        c2: c2 <= tol,
        c3: c3 <= tol,
        residuals: ValidityResiduals {
            min_eigenvalue,
            trace,
            c1,
            c2,
            c3,
        },
    }
}

pub fn validate_default(w: &ProcessMatrix) -> ValidityReport {
    validate(w, DEFAULT_TOL)
}

/// Residuals of the two definite-order conditions.
///
/// A≺B: `(1 − R_BO) W = 0` and `(1 − R_AO) R_BI W = 0`; B≺A mirrors the parties.
pub fn definite_order_residuals(w: &ProcessMatrix, order: CausalOrder) -> [f64; 2] {
    let (last_out, first_out, last_in) = match order {
        CausalOrder::AliceFirst => (B_O, A_O, B_I),
        CausalOrder::BobFirst => (A_O, B_O, A_I),
    };
    let x = w.op();
    let no_future = (x - &r(x, last_out)).max_abs();
    let replaced = r(x, last_in);
    let one_way = (&replaced - &r(&replaced, first_out)).max_abs();
    [no_future, one_way]
}

pub fn is_definite_order(w: &ProcessMatrix, order: CausalOrder, tol: f64) -> Result<bool> {
    let report = validate(w, tol);
    if !report.valid() {
        return Err(Error::InvalidProcess(format!(
            "definite-order test needs a valid process: {:?}",
            report.residuals
        )));
    }
    Ok(definite_order_residuals(w, order)
        .iter()
        .all(|&res| res <= tol))
}
