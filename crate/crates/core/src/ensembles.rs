//! Seeded random ensembles used by tests, the acceptance suite and the CLI.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::Result;
use crate::game::choi_from_kraus;
use crate::linalg::{ginibre, haar_unitary, random_hermitian, Operator, SubsystemLayout, C64};
use crate::process::{canonical_layout, fixed_order, ocb_process, CausalOrder, ProcessMatrix};
use crate::process::{A_I, A_O, B_I, B_O};
use crate::sector::{alpha_max, reconstruct, CovariantCoefficients};

/// Label of the remainder leg in tripartite extensions.
pub const REMAINDER: &str = "R";

/// Uniform point of the covariant polygon, by rejection from the box
/// `[0, m] × [0, 1]` in `(α, β)`.
pub fn random_covariant_coefficients<R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> CovariantCoefficients {
    let m = alpha_max(d);
    let dd = (d * d) as f64;
    loop {
        let alpha = rng.gen_range(0.0..=m);
        let beta = rng.gen_range(0.0..=1.0);
        if beta <= 1.0 - alpha * (dd - 2.0) {
            return CovariantCoefficients::from_free(alpha, beta, d);
        }
    }
}

pub fn random_covariant_process<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ProcessMatrix> {
    reconstruct(&random_covariant_coefficients(d, rng))
}

/// Ginibre density matrix of full rank.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Choi operator (on `in ⊗ out`) of a channel with `rank` Kraus operators
/// cut from a Haar isometry.
pub fn random_channel_choi<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    rank: usize,
    rng: &mut R,
) -> Result<Operator> {
    let u = haar_unitary(d_out * rank, rng);
    let kraus: Vec<DMatrix<C64>> = (0..rank)
        .map(|k| DMatrix::from_fn(d_out, d_in, |o, i| u[(o * rank + k, i)]))
        .collect();
    choi_from_kraus(&kraus)
}

/// `ρ_{first input} ⊗ C_{first output → second input} ⊗ I_{second output}`.
fn random_fixed_order<R: Rng + ?Sized>(
    order: CausalOrder,
    d: usize,
    rng: &mut R,
) -> Result<ProcessMatrix> {
    let (first_in, first_out, second_in, second_out) = match order {
        CausalOrder::AliceFirst => (A_I, A_O, B_I, B_O),
        CausalOrder::BobFirst => (B_I, B_O, A_I, A_O),
    };
    let rho = Operator::on(first_in, random_density(d, rng))?;
    let rank = rng.gen_range(1..=d);
    let channel = random_channel_choi(d, d, rank, rng)?.relabel(&[first_out, second_in])?;
    let id = Operator::identity(SubsystemLayout::single(second_out, d)?);
    ProcessMatrix::from_any_order(&rho.tensor(&channel)?.tensor(&id)?)
}

/// Valid, generally noncovariant process: a random mixture of one random
/// process of each fixed order, plus (at `d = 2`) a random admixture of OCB.
pub fn random_valid_process<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ProcessMatrix> {
    let ab = random_fixed_order(CausalOrder::AliceFirst, d, rng)?;
    let ba = random_fixed_order(CausalOrder::BobFirst, d, rng)?;
    let t: f64 = rng.gen();
    let sep = ProcessMatrix::combine(&[(t, &ab), (1.0 - t, &ba)])?;
    if d == 2 {
        let q: f64 = rng.gen();
        ProcessMatrix::combine(&[(1.0 - q, &sep), (q, &ocb_process())])
    } else {
        Ok(sep)
    }
}

/// Random Hermitian operator on the canonical legs plus a remainder `R`.
pub fn random_extension<R: Rng + ?Sized>(d: usize, r: usize, rng: &mut R) -> Result<Operator> {
    let layout = canonical_layout(d)?.concat(&SubsystemLayout::single(REMAINDER, r)?)?;
    Ok(random_hermitian(&layout, rng))
}

/// `½(|0⟩⟨0|_R ⊗ W^{A≺B} + |1⟩⟨1|_R ⊗ W^{B≺A})`, with `R` last.
pub fn switch_extension(d: usize) -> Result<Operator> {
    let mut acc: Option<Operator> = None;
    for (k, order) in CausalOrder::BOTH.into_iter().enumerate() {
        let mut proj = DMatrix::<C64>::zeros(2, 2);
        proj[(k, k)] = C64::new(0.5, 0.0);
        let term = fixed_order(order, d)?
            .op()
            .tensor(&Operator::on(REMAINDER, proj)?)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("two orders"))
}
