//! Linear score functionals `F(W) = s·Tr[M W]` split into a covariant
//! benchmark part and a symmetry-breaking resource part.
//!
//! `M_G = Τ_wire(M)` and `M_⊥ = M − M_G`. Because the twirl is self-adjoint,
//! `Tr[M_⊥ W] = 0` for every covariant `W`, so any score above the best
//! covariant value certifies `|Tr[M_⊥ W]| > 0`.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli_string, Operator, Pauli};
use crate::process::{canonical_layout, ProcessMatrix, A_I, A_O, B_I, B_O};
use crate::sector::vertices;
use crate::tolerance::HERMITIAN_TOL;
use crate::twirl::{wire_twirl, WireAssignment};

/// Hermitian observable on the canonical layout with a score prefactor.
///
/// `terms` optionally names additive pieces of `m` (they must sum to `m`);
/// [`score`] reports the contribution of each.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    m: Operator,
    scale: f64,
    terms: Vec<(String, Operator)>,
}

impl Witness {
    pub fn new(m: Operator, scale: f64) -> Result<Self> {
        let d = m.layout().dims().first().copied().unwrap_or(0);
        let layout = canonical_layout(d)?;
        if m.layout() != &layout {
            return Err(Error::LayoutMismatch(format!(
                "witness must be on {layout}, got {}",
                m.layout()
            )));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidProcess(format!(
                "witness scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            m,
            scale,
            terms: Vec::new(),
        })
    }

    pub fn with_terms(mut self, terms: Vec<(String, Operator)>) -> Result<Self> {
        let mut sum = Operator::zeros(self.m.layout().clone());
        for (_, t) in &terms {
            t.check_same_layout(&self.m)?;
            sum += t;
        }
        let gap = sum.max_abs_diff(&self.m)?;
        if gap > HERMITIAN_TOL {
            return Err(Error::LayoutMismatch(format!(
                "named terms do not sum to the witness (gap {gap:.3e})"
            )));
        }
        self.terms = terms;
        Ok(self)
    }

    pub fn m(&self) -> &Operator {
        &self.m
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn terms(&self) -> &[(String, Operator)] {
        &self.terms
    }

    pub fn d(&self) -> usize {
        self.m.layout().dims()[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSplit {
    pub m_g: Operator,
    pub m_perp: Operator,
    pub scale: f64,
}

impl WitnessSplit {
    pub fn d(&self) -> usize {
        self.m_g.layout().dims()[0]
    }
}

pub fn split_witness(m: &Witness) -> Result<WitnessSplit> {
    m.m.require_hermitian()?;
    let m_g = wire_twirl(&m.m, &WireAssignment::canonical(m.d()))?;
    let m_perp = &m.m - &m_g;
    Ok(WitnessSplit {
        m_g,
        m_perp,
        scale: m.scale,
    })
}

/// `|Tr(M_⊥ W)|` without the score prefactor.
pub fn noncovariance_raw(split: &WitnessSplit, w: &ProcessMatrix) -> Result<f64> {
    Ok(split.m_perp.trace_product(w.op())?.norm())
}

/// `s·|Tr(M_⊥ W)|`, in the same units as the score.
pub fn noncovariance(split: &WitnessSplit, w: &ProcessMatrix) -> Result<f64> {
    Ok(split.scale * noncovariance_raw(split, w)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub value: f64,
    /// index into `sector::VERTEX_NAMES` of a maximizing vertex
    pub vertex: usize,
    pub vertex_values: [f64; 4],
}

/// `max_W s·Tr[M_G W]` over causally separable `W`.
///
/// `M_G` is invariant, so the maximum over separable processes equals the
/// maximum over the covariant polygon, which a linear functional attains at
/// one of the four vertices.
pub fn covariant_benchmark(split: &WitnessSplit, d: usize) -> Result<Benchmark> {
    if split.d() != d {
        return Err(Error::LayoutMismatch(format!(
            "witness has d = {}, benchmark requested for d = {d}",
            split.d()
        )));
    }
    let vs = vertices(d)?;
    let mut vertex_values = [0.0; 4];
    for (v, slot) in vs.iter().zip(vertex_values.iter_mut()) {
        *slot = split.scale * split.m_g.trace_product(v.op())?.re;
    }
    let (vertex, value) =
        vertex_values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| {
                if v > best.1 {
                    (k, v)
                } else {
                    best
                }
            });
    Ok(Benchmark {
        value,
        vertex,
        vertex_values,
    })
}

/// `M₁ = Z_AO Z_BI` (on `I_AI`, `I_BO`).
pub fn ocb_m1() -> Operator {
    let layout = canonical_layout(2).expect("d = 2");
    pauli_string(&layout, &[(A_O, Pauli::Z), (B_I, Pauli::Z)]).expect("canonical labels")
}

/// `M₂ = Z_AI X_BI Z_BO`.
pub fn ocb_m2() -> Operator {
    let layout = canonical_layout(2).expect("d = 2");
    pauli_string(
        &layout,
        &[(A_I, Pauli::Z), (B_I, Pauli::X), (B_O, Pauli::Z)],
    )
    .expect("canonical labels")
}

/// OCB game functional: `M = M₁ + M₂` with prefactor `1/(4√2)`.
pub fn ocb_witness() -> Witness {
    let m1 = ocb_m1();
    let m2 = ocb_m2();
    Witness::new(&m1 + &m2, 1.0 / (4.0 * SQRT_2))
        .and_then(|w| w.with_terms(vec![("M1".into(), m1), ("M2".into(), m2)]))
        .expect("Pauli strings are Hermitian")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub total: f64,
    /// `s·Tr[M_G W]`
    pub benchmark_part: f64,
    /// `s·Tr[M_⊥ W]`
    pub resource_part: f64,
    /// `s·|Tr[M_⊥ W]|`
    pub noncovariance: f64,
    /// `|Tr[M_⊥ W]|`
    pub noncovariance_raw: f64,
    /// `s·Tr[T W]` for each named term `T` of the witness
    pub terms: BTreeMap<String, f64>,
}

pub fn score(m: &Witness, w: &ProcessMatrix) -> Result<ScoreReport> {
    m.m.check_same_layout(w.op())?;
    let split = split_witness(m)?;
    let s = m.scale;
    let total = s * m.m.trace_product(w.op())?.re;
    let benchmark_part = s * split.m_g.trace_product(w.op())?.re;
    let perp = split.m_perp.trace_product(w.op())?;
    let terms = m
        .terms
        .iter()
        .map(|(name, t)| Ok((name.clone(), s * t.trace_product(w.op())?.re)))
        .collect::<Result<_>>()?;
    Ok(ScoreReport {
        total,
        benchmark_part,
        resource_part: s * perp.re,
        noncovariance: s * perp.norm(),
        noncovariance_raw: perp.norm(),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_entangled_projector_on;
    use crate::process::{fixed_order, ocb_process, qs_marginal, CausalOrder};
    use crate::sector::{reconstruct, vertices, CovariantCoefficients};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn ocb_witness_shape() {
        let w = ocb_witness();
        assert!(w.m().is_hermitian(1e-15));
        assert!(w.m().trace().norm() < 1e-15);
        assert!((w.scale() - 1.0 / (4.0 * SQRT_2)).abs() < 1e-16);
    }

    #[test]
    fn ocb_split() {
        let split = split_witness(&ocb_witness()).unwrap();
        let twirled_m1 = wire_twirl(&ocb_m1(), &WireAssignment::canonical(2)).unwrap();
        assert!(split.m_g.max_abs_diff(&twirled_m1).unwrap() < 1e-14);
        assert!(split.m_g.hs_norm() > 0.1);
        // all of M₂ sits in the noncovariant part
        let rest = &split.m_perp - &ocb_m2();
        let twirled_rest = wire_twirl(&rest, &WireAssignment::canonical(2)).unwrap();
        assert!(twirled_rest.max_abs() < 1e-14);
        assert!(split.m_perp.hs_inner(&ocb_m2()).unwrap().re > 15.9);
    }

    #[test]
    fn identity_and_m2_splits() {
        let layout = canonical_layout(2).unwrap();
        let id = Witness::new(Operator::identity(layout), 1.0).unwrap();
        let split = split_witness(&id).unwrap();
        assert!(split.m_perp.max_abs() < 1e-14);

        let m2 = Witness::new(ocb_m2(), 1.0).unwrap();
        let split = split_witness(&m2).unwrap();
        assert!(split.m_g.max_abs() < 1e-14);
    }

    #[test]
    fn split_invariants() {
        let split = split_witness(&ocb_witness()).unwrap();
        let wires = WireAssignment::canonical(2);
        let sum = &split.m_g + &split.m_perp;
        assert!(sum.max_abs_diff(ocb_witness().m()).unwrap() < 1e-15);
        assert!(
            wire_twirl(&split.m_g, &wires)
                .unwrap()
                .max_abs_diff(&split.m_g)
                .unwrap()
                < 1e-10
        );
        assert!(wire_twirl(&split.m_perp, &wires).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn score_of_fixed_order() {
        let r = score(
            &ocb_witness(),
            &fixed_order(CausalOrder::AliceFirst, 2).unwrap(),
        )
        .unwrap();
        assert!((r.total - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(r.resource_part.abs() < 1e-12);
    }

    #[test]
    fn score_of_qs_marginal_has_no_resource() {
        let r = score(&ocb_witness(), &qs_marginal(2).unwrap()).unwrap();
        assert!(r.resource_part.abs() < 1e-12);
        assert!(r.noncovariance < 1e-12);
        assert!(r.total <= FRAC_1_SQRT_2 + 1e-9);
    }

    #[test]
    fn score_of_perp_vertex() {
        let w3 = &vertices(2).unwrap()[2];
        let r = score(&ocb_witness(), w3).unwrap();
        assert!((r.total + 1.0 / (3.0 * SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn ocb_score_and_term_breakdown() {
        let r = score(&ocb_witness(), &ocb_process()).unwrap();
        assert!((r.total - 1.0).abs() < 1e-12);
        assert!((r.benchmark_part + r.resource_part - r.total).abs() < 1e-12);
        assert!((r.terms["M1"] - 0.5).abs() < 1e-12);
        assert!((r.terms["M2"] - 0.5).abs() < 1e-12);
        // twirl projection: s·Tr[Τ(M₁) W_OCB] = 1/6
        assert!((r.benchmark_part - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn noncovariance_vanishes_on_covariant() {
        let split = split_witness(&ocb_witness()).unwrap();
        let w = reconstruct(&CovariantCoefficients::from_free(0.1, 0.2, 2)).unwrap();
        assert!(noncovariance(&split, &w).unwrap() < 1e-12);
        assert!(noncovariance(&split, &qs_marginal(2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn benchmarks() {
        let split = split_witness(&ocb_witness()).unwrap();
        let b = covariant_benchmark(&split, 2).unwrap();
        assert!((b.value - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(b.vertex, 0);

        for d in 2..=3 {
            let layout = canonical_layout(d).unwrap();
            let id = Witness::new(Operator::identity(layout), 1.0 / (d * d) as f64).unwrap();
            let b = covariant_benchmark(&split_witness(&id).unwrap(), d).unwrap();
            assert!((b.value - 1.0).abs() < 1e-12);
        }

        let layout = canonical_layout(2).unwrap();
        let p1 = max_entangled_projector_on(A_O, B_I, 2)
            .unwrap()
            .embed(&layout)
            .unwrap();
        let p2 = max_entangled_projector_on(B_O, A_I, 2)
            .unwrap()
            .embed(&layout)
            .unwrap();
        let pp = Witness::new(&p1 * &p2, 1.0).unwrap();
        let b = covariant_benchmark(&split_witness(&pp).unwrap(), 2).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        assert!(b.vertex == 0 || b.vertex == 1);
        assert!(
            (b.vertex_values[0] - 1.0).abs() < 1e-12 && (b.vertex_values[1] - 1.0).abs() < 1e-12
        );

        assert!(covariant_benchmark(&split, 3).is_err());
    }

    #[test]
    fn witness_rejects_bad_inputs() {
        let layout = canonical_layout(2).unwrap();
        assert!(Witness::new(Operator::identity(layout.clone()), 0.0).is_err());
        let mut m = nalgebra::DMatrix::<crate::C64>::zeros(16, 16);
        m[(0, 1)] = crate::C64::new(1.0, 0.0);
        assert!(matches!(
            Witness::new(Operator::new(layout, m).unwrap(), 1.0),
            Err(Error::NotHermitian(_))
        ));
    }
}
