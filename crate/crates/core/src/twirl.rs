//! Independent wire twirl.
//!
//! Each wire is a pair of equal-dimension legs on which `U(d)` acts as
//! `V ⊗ V*`. The commutant of that action is `span{I, Π}`, so the twirl of a
//! single wire is the orthogonal projection
//!
//! ```text
//! Τ(X) = a(X) I + b(X) Π,
//! a(X) = (Tr X − Tr ΠX) / (d² − 1),
//! b(X) = (d² Tr ΠX − Tr X) / (d² − 1),
//! ```
//!
//! taken as a partial map when other legs are present. The two-wire twirl is
//! the composition of the two single-wire maps, which commute.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, max_entangled_projector_on, Operator, RandomSource, C64};
use crate::process::{ProcessMatrix, A_I, A_O, B_I, B_O};

/// Which legs form the two wires. The first leg of each wire carries `V`,
/// the second `V*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireAssignment {
    pub wire1: (String, String),
    pub wire2: (String, String),
    pub d: usize,
}

impl WireAssignment {
    pub fn new(wire1: (&str, &str), wire2: (&str, &str), d: usize) -> Result<Self> {
        let labels = [wire1.0, wire1.1, wire2.0, wire2.1];
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::DuplicateLabel(a.to_string()));
            }
        }
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Self {
            wire1: (wire1.0.into(), wire1.1.into()),
            wire2: (wire2.0.into(), wire2.1.into()),
            d,
        })
    }

    /// Wire 1 = `(A_O, B_I)`, wire 2 = `(B_O, A_I)`.
    pub fn canonical(d: usize) -> Self {
        Self {
            wire1: (A_O.into(), B_I.into()),
            wire2: (B_O.into(), A_I.into()),
            d,
        }
    }

    pub fn labels(&self) -> [&str; 4] {
        [&self.wire1.0, &self.wire1.1, &self.wire2.0, &self.wire2.1]
    }

    fn check(&self, x: &Operator) -> Result<()> {
        for label in self.labels() {
            let dim = x.layout().dim_of(label).map_err(|_| {
                Error::LayoutMismatch(format!("wire leg `{label}` missing from {}", x.layout()))
            })?;
            if dim != self.d {
                return Err(Error::LayoutMismatch(format!(
                    "wire leg `{label}` has dimension {dim}, wires expect {}",
                    self.d
                )));
            }
        }
        Ok(())
    }
}

/// Twirl of one wire `(first, second)` inside a possibly larger operator.
pub fn twirl_wire(x: &Operator, first: &str, second: &str) -> Result<Operator> {
    let layout = x.layout();
    let d = layout.dim_of(first)?;
    let d2 = layout.dim_of(second)?;
    if d != d2 {
        return Err(Error::LayoutMismatch(format!(
            "wire legs `{first}`:{d} and `{second}`:{d2} differ in dimension"
        )));
    }
    if first == second {
        return Err(Error::DuplicateLabel(first.to_string()));
    }
    let mut order = vec![first.to_string(), second.to_string()];
    order.extend(
        layout
            .labels()
            .iter()
            .filter(|l| *l != first && *l != second)
            .cloned(),
    );
    let y = x.permute_subsystems(&order)?;
    let pi = max_entangled_projector_on(first, second, d)?;
    let pi_full = pi.embed(y.layout())?;
    let tr_x = y.partial_trace(&[first, second])?;
    let tr_pix = pi_full.compose(&y)?.partial_trace(&[first, second])?;
    let dd = (d * d) as f64;
    let norm = 1.0 / (dd - 1.0);
    let a = (&tr_x - &tr_pix).scale(norm);
    let b = (tr_pix.scale(dd) - &tr_x).scale(norm);
    let ident = Operator::identity(pi.layout().clone());
    let out = ident.tensor(&a)? + pi.tensor(&b)?;
    out.permute_subsystems(layout.labels())
}

/// Single-wire twirl of an operator on exactly two legs of equal dimension.
pub fn single_wire_twirl(x: &Operator) -> Result<Operator> {
    let labels = x.layout().labels();
    if labels.len() != 2 {
        return Err(Error::LayoutMismatch(format!(
            "single-wire twirl needs two legs, got {}",
            x.layout()
        )));
    }
    twirl_wire(x, &labels[0], &labels[1])
}

/// Closed-form coefficients `(a, b)` of `Τ(X) = a I + b Π` for a two-leg `X`.
pub fn single_wire_coefficients(x: &Operator) -> Result<(C64, C64)> {
    let labels = x.layout().labels();
    if labels.len() != 2 {
        return Err(Error::LayoutMismatch(format!(
            "single-wire twirl needs two legs, got {}",
            x.layout()
        )));
    }
    let d = x.layout().dims()[0];
    if x.layout().dims()[1] != d {
        return Err(Error::LayoutMismatch(
            "wire legs differ in dimension".into(),
        ));
    }
    let pi = max_entangled_projector_on(&labels[0], &labels[1], d)?;
    let tr = x.trace();
    let tr_pi = pi.trace_product(x)?;
    let dd = (d * d) as f64;
    Ok(((tr - tr_pi) / (dd - 1.0), (tr_pi * dd - tr) / (dd - 1.0)))
}

/// `Τ_wire = Τ_wire2 ∘ Τ_wire1`; legs outside the wires are left alone.
pub fn wire_twirl(w: &Operator, wires: &WireAssignment) -> Result<Operator> {
    wires.check(w)?;
    let once = twirl_wire(w, &wires.wire1.0, &wires.wire1.1)?;
    twirl_wire(&once, &wires.wire2.0, &wires.wire2.1)
}

fn sample_unitary(
    w: &Operator,
    wires: &WireAssignment,
    source: &RandomSource,
    index: u64,
) -> DMatrix<C64> {
    let mut rng = source.sample_rng(index);
    let v1 = haar_unitary(wires.d, &mut rng);
    let v2 = haar_unitary(wires.d, &mut rng);
    let mut u = DMatrix::<C64>::identity(1, 1);
    for (label, &dim) in w.layout().labels().iter().zip(w.layout().dims()) {
        let factor = if *label == wires.wire1.0 {
            v1.clone()
        } else if *label == wires.wire1.1 {
            v1.map(|z| z.conj())
        } else if *label == wires.wire2.0 {
            v2.clone()
        } else if *label == wires.wire2.1 {
            v2.map(|z| z.conj())
        } else {
            DMatrix::identity(dim, dim)
        };
        u = u.kronecker(&factor);
    }
    u
}

const ORACLE_CHUNK: u64 = 256;

/// Monte-Carlo estimate of the wire twirl: the mean of `U W U†` over
/// independent Haar pairs `(V₁, V₂)` with
/// `U = V₁ ⊗ V₁* ⊗ V₂ ⊗ V₂*` placed on the wire legs.
///
/// Sample `i` always uses `source.sample_rng(i)` and partial sums are combined
/// in a fixed order, so the result does not depend on the thread count.
pub fn mc_twirl_oracle(
    w: &Operator,
    wires: &WireAssignment,
    samples: usize,
    source: &RandomSource,
) -> Result<Operator> {
    wires.check(w)?;
    if samples == 0 {
        return Err(Error::InvalidProcess(
            "oracle needs at least one sample".into(),
        ));
    }
    let n = samples as u64;
    let chunks: Vec<u64> = (0..n.div_ceil(ORACLE_CHUNK)).collect();
    let partial: Vec<DMatrix<C64>> = chunks
        .par_iter()
        .map(|&c| {
            let dim = w.dim();
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for i in c * ORACLE_CHUNK..((c + 1) * ORACLE_CHUNK).min(n) {
                let u = sample_unitary(w, wires, source, i);
                acc += &u * w.matrix() * u.adjoint();
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<C64>::zeros(w.dim(), w.dim());
    for p in &partial {
        total += p;
    }
    total /= C64::new(samples as f64, 0.0);
    Operator::new(w.layout().clone(), total)
}

/// `‖Τ(w) − w‖_max`.
pub fn covariance_residual(w: &Operator, wires: &WireAssignment) -> Result<f64> {
    wire_twirl(w, wires)?.max_abs_diff(w)
}

pub fn is_covariant(w: &ProcessMatrix, tol: f64) -> bool {
    covariance_residual(w.op(), &WireAssignment::canonical(w.d()))
        .map(|r| r <= tol)
        .unwrap_or(false)
}

/// `‖Tr_R Τ(w_ext) − Τ(Tr_R w_ext)‖_max`, where `R` is every leg outside the wires.
pub fn reduction_residual(w_ext: &Operator, wires: &WireAssignment) -> Result<f64> {
    wires.check(w_ext)?;
    let wire_labels = wires.labels();
    let remainder: Vec<String> = w_ext
        .layout()
        .labels()
        .iter()
        .filter(|l| !wire_labels.contains(&l.as_str()))
        .cloned()
        .collect();
    let lhs = wire_twirl(w_ext, wires)?.partial_trace(&remainder)?;
    let rhs = wire_twirl(&w_ext.partial_trace(&remainder)?, wires)?;
    lhs.max_abs_diff(&rhs)
}

pub fn reduce_and_check(w_ext: &Operator, wires: &WireAssignment, tol: f64) -> Result<bool> {
    Ok(reduction_residual(w_ext, wires)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_entangled_projector, pauli, Pauli};

    fn two_leg(a: Pauli, b: Pauli) -> Operator {
        pauli(a)
            .relabel(&["x"])
            .unwrap()
            .tensor(&pauli(b).relabel(&["y"]).unwrap())
            .unwrap()
    }

    #[test]
    fn z_z_coefficients() {
        // Haar oracle value: −1/3 I + 4/3 Π (see mc_matches_closed_form_on_zz)
        let (a, b) = single_wire_coefficients(&two_leg(Pauli::Z, Pauli::Z)).unwrap();
        assert!((a.re + 1.0 / 3.0).abs() < 1e-15 && a.im.abs() < 1e-15);
        assert!((b.re - 4.0 / 3.0).abs() < 1e-15 && b.im.abs() < 1e-15);
    }

    #[test]
    fn identity_x_is_annihilated() {
        let t = single_wire_twirl(&two_leg(Pauli::I, Pauli::X)).unwrap();
        assert!(t.max_abs() < 1e-15);
    }

    #[test]
    fn projector_is_fixed_point() {
        for d in 2..=4 {
            let p = max_entangled_projector(d).unwrap();
            let t = single_wire_twirl(&p).unwrap();
            assert!(t.max_abs_diff(&p).unwrap() < 1e-14);
            let i = Operator::identity(p.layout().clone());
            assert!(single_wire_twirl(&i).unwrap().max_abs_diff(&i).unwrap() < 1e-14);
        }
    }

    #[test]
    fn leg_dimension_mismatch() {
        let x = Operator::identity(crate::SubsystemLayout::new(["a", "b"], [2, 3]).unwrap());
        assert!(matches!(
            single_wire_twirl(&x),
            Err(Error::LayoutMismatch(_))
        ));
    }

    #[test]
    fn mc_matches_closed_form_on_zz() {
        let zz = two_leg(Pauli::Z, Pauli::Z);
        let mut acc = DMatrix::<C64>::zeros(4, 4);
        let mut rng = RandomSource::new(99).rng();
        let n = 20_000;
        for _ in 0..n {
            let v = haar_unitary(2, &mut rng);
            let u = v.kronecker(&v.map(|z| z.conj()));
            acc += &u * zz.matrix() * u.adjoint();
        }
        acc /= C64::new(n as f64, 0.0);
        let closed = single_wire_twirl(&zz).unwrap();
        assert!((acc - closed.matrix()).camax() < 3e-2);
    }

    #[test]
    fn oracle_is_exact_on_invariant_input() {
        let wires = WireAssignment::canonical(2);
        let layout = crate::process::canonical_layout(2).unwrap();
        let p1 = max_entangled_projector_on(A_O, B_I, 2).unwrap();
        let p2 = max_entangled_projector_on(B_O, A_I, 2).unwrap();
        let w = p1.tensor(&p2).unwrap().embed(&layout).unwrap();
        let est = mc_twirl_oracle(&w, &wires, 7, &RandomSource::new(1)).unwrap();
        assert!(est.max_abs_diff(&w).unwrap() < 1e-13);
    }

    #[test]
    fn oracle_independent_of_thread_count() {
        let wires = WireAssignment::canonical(2);
        let w = crate::process::ocb_process().into_operator();
        let src = RandomSource::new(5);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_twirl_oracle(&w, &wires, 700, &src).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mc_twirl_oracle(&w, &wires, 700, &src).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn wire_assignment_checks() {
        assert!(WireAssignment::new(("a", "b"), ("b", "c"), 2).is_err());
        let wires = WireAssignment::canonical(3);
        let w = crate::process::ocb_process().into_operator();
        assert!(matches!(
            wire_twirl(&w, &wires),
            Err(Error::LayoutMismatch(_))
        ));
    }
}
