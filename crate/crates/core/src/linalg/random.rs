//! Seeded randomness and Haar-distributed unitaries.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::operator::{Operator, C64};

/// A 64-bit seed that hands out reproducible generators.
///
/// [`RandomSource::rng`] is the sequential stream; [`RandomSource::sample_rng`]
/// gives an independent stream per sample index so parallel Monte-Carlo sums
/// do not depend on scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }

    pub fn sample_rng(&self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index.wrapping_add(1));
        rng
    }

    /// Derived source for an independent sub-experiment.
    pub fn fork(&self, tag: u64) -> Self {
        // splitmix64 finalizer
        let mut z = self
            .seed
            .wrapping_add(tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self::new(z ^ (z >> 31))
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random `d×d` unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let norm = rkk.norm();
        let phase = if norm > 0.0 {
            rkk / norm
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// [`haar_unitary`] wrapped as an operator on a single factor `q`.
pub fn random_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Operator {
    Operator::on("q", haar_unitary(d, rng)).expect("square matrix")
}

/// Hermitian operator with Gaussian entries on the given layout.
pub fn random_hermitian<R: Rng + ?Sized>(
    layout: &super::layout::SubsystemLayout,
    rng: &mut R,
) -> Operator {
    let n = layout.total_dim();
    let g = ginibre(n, n, rng);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    Operator::new(layout.clone(), h).expect("layout-sized matrix")
}
