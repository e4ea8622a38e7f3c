//! The wire-covariant sector and its causal-separability polygon.
//!
//! A covariant process expands over four orthogonal projectors,
//!
//! ```text
//! W = δ Π₁⊗Π₂ + β Π₁⊗Π₂⊥ + γ Π₁⊥⊗Π₂ + α Π₁⊥⊗Π₂⊥,
//! ```
//!
//! with wire 1 = `(A_O, B_I)` and wire 2 = `(B_O, A_I)`. Validity reduces to
//! `α, β, γ, δ ≥ 0`, `α + δ = β + γ` and `δ + α(d² − 1) = 1`. In the free
//! coordinates `(α, β)` the feasible set is the quadrilateral with corners
//! `(0,1)`, `(0,0)`, `(m,0)`, `(m,m)`, `m = 1/(d² − 1)`, whose corners are the
//! four definite-order vertices `W₁..W₄`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_entangled_projector_on, Operator};
use crate::process::{canonical_layout, CausalOrder, ProcessMatrix, A_I, A_O, B_I, B_O};
use crate::tolerance::{COVARIANCE_TOL, DEFAULT_TOL};
use crate::twirl::{covariance_residual, WireAssignment};

pub const VERTEX_NAMES: [&str; 4] = ["W1", "W2", "W3", "W4"];

/// Causal order realized by each vertex.
pub const VERTEX_ORDERS: [CausalOrder; 4] = [
    CausalOrder::AliceFirst,
    CausalOrder::BobFirst,
    CausalOrder::AliceFirst,
    CausalOrder::BobFirst,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovariantCoefficients {
    /// weight of `Π₁⊥ ⊗ Π₂⊥`
    pub alpha: f64,
    /// weight of `Π₁ ⊗ Π₂⊥`
    pub beta: f64,
    /// weight of `Π₁⊥ ⊗ Π₂`
    pub gamma: f64,
    /// weight of `Π₁ ⊗ Π₂`
    pub delta: f64,
    pub d: usize,
}

impl CovariantCoefficients {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, d: usize) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
            d,
        }
    }

    /// Point of the feasible plane with free coordinates `(α, β)`.
    pub fn from_free(alpha: f64, beta: f64, d: usize) -> Self {
        let delta = 1.0 - alpha * (d * d - 1) as f64;
        let gamma = alpha + delta - beta;
        Self::new(alpha, beta, gamma, delta, d)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// `α + δ − (β + γ)` and `δ + α(d² − 1) − 1`.
    pub fn equality_defects(&self) -> (f64, f64) {
        let m = (self.d * self.d - 1) as f64;
        (
            self.alpha + self.delta - self.beta - self.gamma,
            self.delta + self.alpha * m - 1.0,
        )
    }
}

/// `1/(d² − 1)`, the largest feasible `α`.
pub fn alpha_max(d: usize) -> f64 {
    1.0 / (d * d - 1) as f64
}

/// The basis projectors in coefficient order `α, β, γ, δ`, on the canonical layout.
pub fn basis_projectors(d: usize) -> Result<[Operator; 4]> {
    let layout = canonical_layout(d)?;
    let p1 = max_entangled_projector_on(A_O, B_I, d)?.embed(&layout)?;
    let p2 = max_entangled_projector_on(B_O, A_I, d)?.embed(&layout)?;
    let id = Operator::identity(layout);
    let q1 = &id - &p1;
    let q2 = &id - &p2;
    Ok([&q1 * &q2, &p1 * &q2, &q1 * &p2, &p1 * &p2])
}

fn basis_traces(d: usize) -> [f64; 4] {
    let m = (d * d - 1) as f64;
    [m * m, m, m, 1.0]
}

/// Coefficients of a covariant process by orthogonal projection
/// `c_P = ⟨P, W⟩ / Tr P`.
///
/// Inputs whose covariance residual exceeds `1e-9` are refused.
pub fn extract_coefficients(w: &ProcessMatrix) -> Result<CovariantCoefficients> {
    let d = w.d();
    let residual = covariance_residual(w.op(), &WireAssignment::canonical(d))?;
    if residual > COVARIANCE_TOL {
        return Err(Error::NonCovariant(residual));
    }
    project_coefficients(w.op(), d)
}

/// Projection coefficients without the covariance check.
pub fn project_coefficients(op: &Operator, d: usize) -> Result<CovariantCoefficients> {
    let basis = basis_projectors(d)?;
    let traces = basis_traces(d);
    let mut c = [0.0; 4];
    for k in 0..4 {
        c[k] = basis[k].hs_inner(op)?.re / traces[k];
    }
    Ok(CovariantCoefficients::new(c[0], c[1], c[2], c[3], d))
}

/// Positivity and both linear equalities, each within `tol`.
pub fn check_constraints(c: &CovariantCoefficients, tol: f64) -> bool {
    let (lin, norm) = c.equality_defects();
    c.as_array().iter().all(|&x| x >= -tol) && lin.abs() <= tol && norm.abs() <= tol
}

pub fn reconstruct(c: &CovariantCoefficients) -> Result<ProcessMatrix> {
    let basis = basis_projectors(c.d)?;
    let mut acc = Operator::zeros(basis[0].layout().clone());
    for (coef, p) in c.as_array().iter().zip(&basis) {
        acc += &p.scale(*coef);
    }
    ProcessMatrix::new(acc)
}

pub fn vertex_coefficients(d: usize) -> [CovariantCoefficients; 4] {
    let m = alpha_max(d);
    [
        CovariantCoefficients::new(0.0, 1.0, 0.0, 1.0, d),
        CovariantCoefficients::new(0.0, 0.0, 1.0, 1.0, d),
        CovariantCoefficients::new(m, 0.0, m, 0.0, d),
        CovariantCoefficients::new(m, m, 0.0, 0.0, d),
    ]
}

/// `W₁ = Π₁⊗I`, `W₂ = I⊗Π₂`, `W₃ = Π₁⊥⊗I/(d²−1)`, `W₄ = I⊗Π₂⊥/(d²−1)`.
pub fn vertices(d: usize) -> Result<[ProcessMatrix; 4]> {
    let layout = canonical_layout(d)?;
    let p1 = max_entangled_projector_on(A_O, B_I, d)?.embed(&layout)?;
    let p2 = max_entangled_projector_on(B_O, A_I, d)?.embed(&layout)?;
    let id = Operator::identity(layout);
    let m = alpha_max(d);
    let w3 = (&id - &p1).scale(m);
    let w4 = (&id - &p2).scale(m);
    Ok([
        ProcessMatrix::new(p1)?,
        ProcessMatrix::new(p2)?,
        ProcessMatrix::new(w3)?,
        ProcessMatrix::new(w4)?,
    ])
}

/// Barycentric weights over `W₁..W₄` of a point in the feasible polygon.
///
/// The quadrilateral is cut along the diagonal `(0,0)–(m,m)`: points with
/// `β ≥ α` use the triangle `{W₁, W₂, W₄}`, the rest `{W₂, W₃, W₄}`.
pub fn barycentric_weights(c: &CovariantCoefficients, tol: f64) -> Result<[f64; 4]> {
    if !check_constraints(c, tol) {
        let (lin, norm) = c.equality_defects();
        return Err(Error::OutsidePolygon(format!(
            "(α,β,γ,δ) = {:?}, equality defects ({lin:.3e}, {norm:.3e})",
            c.as_array()
        )));
    }
    let m = alpha_max(c.d);
    let (a, b) = (c.alpha, c.beta);
    let weights = if b >= a {
        let w4 = a / m;
        let w1 = b - a;
        [w1, 1.0 - w1 - w4, 0.0, w4]
    } else {
        let w4 = b / m;
        let w3 = (a - b) / m;
        [0.0, 1.0 - w3 - w4, w3, w4]
    };
    if let Some(bad) = weights.iter().find(|&&w| w < -tol) {
        return Err(Error::OutsidePolygon(format!(
            "negative barycentric weight {bad:.3e} for (α,β) = ({a}, {b})"
        )));
    }
    Ok(weights)
}

#[derive(Clone, Debug)]
pub struct SeparableDecomposition {
    pub coefficients: CovariantCoefficients,
    pub weights: [f64; 4],
    pub vertices: [ProcessMatrix; 4],
    /// `‖Σ wᵢ Wᵢ − W‖_max`
    pub reconstruction_residual: f64,
}

impl SeparableDecomposition {
    pub fn recompose(&self) -> Result<ProcessMatrix> {
        recompose(&self.weights, &self.vertices)
    }

    /// Total weight on each causal order `(A≺B, B≺A)`.
    pub fn order_weights(&self) -> (f64, f64) {
        (
            self.weights[0] + self.weights[2],
            self.weights[1] + self.weights[3],
        )
    }
}

pub fn recompose(weights: &[f64; 4], vertices: &[ProcessMatrix; 4]) -> Result<ProcessMatrix> {
    let terms: Vec<(f64, &ProcessMatrix)> = weights.iter().copied().zip(vertices.iter()).collect();
    ProcessMatrix::combine(&terms)
}

/// Definite-order mixture of a covariant valid process.
pub fn decompose(w: &ProcessMatrix) -> Result<SeparableDecomposition> {
    let coefficients = extract_coefficients(w)?;
    let weights = barycentric_weights(&coefficients, DEFAULT_TOL)?;
    let vertices = vertices(w.d())?;
    let reconstruction_residual = recompose(&weights, &vertices)?.op().max_abs_diff(w.op())?;
    Ok(SeparableDecomposition {
        coefficients,
        weights,
        vertices,
        reconstruction_residual,
    })
}
