//! Instruments, the generalized Born rule and causal games.
//!
//! Choi convention: a CP map `E` with Kraus operators `{K}` is represented on
//! `in ⊗ out` by
//!
//! ```text
//! M = [ Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|) ]ᵀ
//! ```
//!
//! (unnormalized entangled vector, full transpose). Trace preservation reads
//! `Tr_out Σ_a M_a = I_in`, and `p(a,b) = Tr[W (M_a ⊗ M_b)]` is normalized for
//! every valid `W`. Under this convention, measuring `|e⟩` and preparing `|ψ⟩`
//! has Choi operator `|e⟩⟨e| ⊗ |ψ*⟩⟨ψ*|`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, Operator, SubsystemLayout, C64};
use crate::process::{validate, ProcessMatrix, A_I, A_O, B_I, B_O};
use crate::tolerance::DEFAULT_TOL;

pub const IN_LEG: &str = "in";
pub const OUT_LEG: &str = "out";

/// Below this magnitude a negative probability is treated as rounding.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Choi operator of the CP map with the given Kraus operators (`d_out × d_in`).
pub fn choi_from_kraus(kraus: &[DMatrix<C64>]) -> Result<Operator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidInstrument("no Kraus operators".into()))?;
    let (d_out, d_in) = first.shape();
    if d_out == 0 || d_in == 0 {
        return Err(Error::InvalidInstrument("empty Kraus operator".into()));
    }
    let n = d_in * d_out;
    let mut choi = DMatrix::<C64>::zeros(n, n);
    for k in kraus {
        if k.shape() != (d_out, d_in) {
            return Err(Error::InvalidInstrument(format!(
                "Kraus operators have shapes {:?} and {:?}",
                (d_out, d_in),
                k.shape()
            )));
        }
        // transpose of |K⟩⟩⟨⟨K| with |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
        let v = nalgebra::DVector::from_fn(n, |r, _| k[(r % d_out, r / d_out)].conj());
        choi += &v * v.adjoint();
    }
    Operator::new(
        SubsystemLayout::new([IN_LEG, OUT_LEG], [d_in, d_out])?,
        choi,
    )
}

/// Outcome-indexed Choi operators on `in ⊗ out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    choi_ops: Vec<Operator>,
    d_in: usize,
    d_out: usize,
}

impl Instrument {
    /// Checks only that every operator lives on the same `in ⊗ out` layout.
    pub fn new(choi_ops: Vec<Operator>) -> Result<Self> {
        let first = choi_ops
            .first()
            .ok_or_else(|| Error::InvalidInstrument("empty outcome list".into()))?;
        let dims = first.layout().dims().to_vec();
        if first.layout().labels() != [IN_LEG, OUT_LEG] {
            return Err(Error::InvalidInstrument(format!(
                "Choi operators must be on (in, out), got {}",
                first.layout()
            )));
        }
        for op in &choi_ops[1..] {
            if op.layout() != first.layout() {
                return Err(Error::InvalidInstrument(format!(
                    "outcomes disagree on layout: {} vs {}",
                    first.layout(),
                    op.layout()
                )));
            }
        }
        Ok(Self {
            choi_ops,
            d_in: dims[0],
            d_out: dims[1],
        })
    }

    /// One CP map per outcome, each given by its Kraus operators.
    pub fn from_kraus(outcomes: &[Vec<DMatrix<C64>>]) -> Result<Self> {
        Self::new(
            outcomes
                .iter()
                .map(|k| choi_from_kraus(k))
                .collect::<Result<_>>()?,
        )
    }

    pub fn choi_ops(&self) -> &[Operator] {
        &self.choi_ops
    }

    pub fn outcomes(&self) -> usize {
        self.choi_ops.len()
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Largest CP violation (negated minimum eigenvalue, floored at 0) and
    /// TP residual `‖Tr_out Σ M − I‖_max`.
    pub fn residuals(&self) -> Result<(f64, f64)> {
        let mut cp: f64 = 0.0;
        let mut sum = Operator::zeros(self.choi_ops[0].layout().clone());
        for op in &self.choi_ops {
            cp = cp.max(-op.min_eigenvalue()?);
            sum += op;
        }
        let reduced = sum.partial_trace(&[OUT_LEG])?;
        let tp = reduced.max_abs_diff(&Operator::identity(reduced.layout().clone()))?;
        Ok((cp.max(0.0), tp))
    }
}

pub fn validate_instrument(ins: &Instrument, tol: f64) -> bool {
    match ins.residuals() {
        Ok((cp, tp)) => cp <= tol && tp <= tol,
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    /// `probs[a][b]`
    pub probs: Vec<Vec<f64>>,
    /// some entries in `[−1e−12, 0)` were reported as 0
    pub clamped: bool,
}

impl ProbabilityTable {
    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        self.probs.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        let nb = self.probs.first().map_or(0, Vec::len);
        (0..nb)
            .map(|b| self.probs.iter().map(|row| row[b]).sum())
            .collect()
    }
}

fn check_party(ins: &Instrument, d: usize, who: &str) -> Result<()> {
    if ins.d_in != d || ins.d_out != d {
        return Err(Error::LayoutMismatch(format!(
            "{who}'s instrument is {}→{}, process has d = {d}",
            ins.d_in, ins.d_out
        )));
    }
    if !validate_instrument(ins, DEFAULT_TOL) {
        return Err(Error::InvalidInstrument(format!(
            "{who}'s instrument is not CPTP"
        )));
    }
    Ok(())
}

/// `p(a,b) = Tr[W (M_a ⊗ M_b)]` with Alice on `(A_I, A_O)` and Bob on `(B_I, B_O)`.
pub fn born(w: &ProcessMatrix, alice: &Instrument, bob: &Instrument) -> Result<ProbabilityTable> {
    check_party(alice, w.d(), "Alice")?;
    check_party(bob, w.d(), "Bob")?;
    Ok(born_unchecked(w, alice, bob))
}

fn born_unchecked(w: &ProcessMatrix, alice: &Instrument, bob: &Instrument) -> ProbabilityTable {
    let a_ops: Vec<Operator> = alice
        .choi_ops
        .iter()
        .map(|m| m.relabel(&[A_I, A_O]).expect("two legs"))
        .collect();
    let b_ops: Vec<Operator> = bob
        .choi_ops
        .iter()
        .map(|m| m.relabel(&[B_I, B_O]).expect("two legs"))
        .collect();
    let mut clamped = false;
    let probs = a_ops
        .iter()
        .map(|ma| {
            b_ops
                .iter()
                .map(|mb| {
                    let joint = ma.tensor(mb).expect("disjoint labels");
                    let p = w.op().trace_product(&joint).expect("canonical layout").re;
                    if (-NEGATIVE_CLAMP..0.0).contains(&p) {
                        clamped = true;
                        0.0
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();
    ProbabilityTable { probs, clamped }
}

/// Random valid instrument: a Haar isometry into `out ⊗ ancilla`, the ancilla
/// measured in the computational basis, then an independent Haar unitary on
/// the output for each outcome.
pub fn random_cptp_instrument<R: Rng + ?Sized>(
    d: usize,
    n_outcomes: usize,
    rng: &mut R,
) -> Result<Instrument> {
    if n_outcomes == 0 {
        return Err(Error::InvalidInstrument("need at least one outcome".into()));
    }
    let big = haar_unitary(d * n_outcomes, rng);
    // isometry V: row index = out * n + k
    let outcomes: Vec<Vec<DMatrix<C64>>> = (0..n_outcomes)
        .map(|k| {
            let kraus = DMatrix::from_fn(d, d, |o, i| big[(o * n_outcomes + k, i)]);
            let post = haar_unitary(d, rng);
            vec![post * kraus]
        })
        .collect();
    Instrument::from_kraus(&outcomes)
}

/// One instrument per setting for each party.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub alice: Vec<Instrument>,
    pub bob: Vec<Instrument>,
}

/// Setting distribution `settings[x][y]` and win table `win[x][y][a][b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub settings: Vec<Vec<f64>>,
    pub win: Vec<Vec<Vec<Vec<bool>>>>,
}

impl GameSpec {
    /// Uniform settings with a predicate `win(a, b, x, y)`.
    pub fn uniform(
        n_x: usize,
        n_y: usize,
        n_a: usize,
        n_b: usize,
        win: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Self {
        let p = 1.0 / (n_x * n_y) as f64;
        Self {
            settings: vec![vec![p; n_y]; n_x],
            win: (0..n_x)
                .map(|x| {
                    (0..n_y)
                        .map(|y| {
                            (0..n_a)
                                .map(|a| (0..n_b).map(|b| win(a, b, x, y)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGame(m));
        if self.settings.is_empty() || self.settings.len() != self.win.len() {
            return bad("settings and win tables disagree on the number of x".into());
        }
        let mut total = 0.0;
        for (x, row) in self.settings.iter().enumerate() {
            if row.len() != self.win[x].len() {
                return bad(format!("settings and win tables disagree on y for x = {x}"));
            }
            for &p in row {
                if !(p >= 0.0 && p.is_finite()) {
                    return bad(format!("negative or non-finite setting probability {p}"));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("setting probabilities sum to {total}"));
        }
        Ok(())
    }

    fn check_strategy(&self, s: &Strategy) -> Result<()> {
        if s.alice.len() != self.settings.len() || s.bob.len() != self.settings[0].len() {
            return Err(Error::InvalidGame(format!(
                "game has {}x{} settings, strategy {}x{}",
                self.settings.len(),
                self.settings[0].len(),
                s.alice.len(),
                s.bob.len()
            )));
        }
        for (x, per_x) in self.win.iter().enumerate() {
            for (y, table) in per_x.iter().enumerate() {
                let (na, nb) = (s.alice[x].outcomes(), s.bob[y].outcomes());
                if table.len() != na || table.iter().any(|r| r.len() != nb) {
                    return Err(Error::InvalidGame(format!(
                        "win table for (x={x}, y={y}) is not {na}x{nb}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingOutcome {
    pub x: usize,
    pub y: usize,
    pub table: ProbabilityTable,
    pub win_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub settings: Vec<SettingOutcome>,
    pub success: f64,
}

/// Full per-setting evaluation of a game.
pub fn play(w: &ProcessMatrix, strategy: &Strategy, game: &GameSpec) -> Result<GameResult> {
    game.validate()?;
    game.check_strategy(strategy)?;
    let report = validate(w, DEFAULT_TOL);
    if !report.valid() {
        return Err(Error::InvalidProcess(format!("{:?}", report.residuals)));
    }
    for (k, ins) in strategy.alice.iter().enumerate() {
        check_party(ins, w.d(), &format!("Alice (x={k})"))?;
    }
    for (k, ins) in strategy.bob.iter().enumerate() {
        check_party(ins, w.d(), &format!("Bob (y={k})"))?;
    }
    let mut settings = Vec::new();
    let mut success = 0.0;
    for (x, row) in game.settings.iter().enumerate() {
        for (y, &pxy) in row.iter().enumerate() {
            let table = born_unchecked(w, &strategy.alice[x], &strategy.bob[y]);
            let win_probability: f64 = table
                .probs
                .iter()
                .enumerate()
                .flat_map(|(a, r)| r.iter().enumerate().map(move |(b, &p)| (a, b, p)))
                .filter(|&(a, b, _)| game.win[x][y][a][b])
                .map(|(_, _, p)| p)
                .sum();
            success += pxy * win_probability;
            settings.push(SettingOutcome {
                x,
                y,
                table,
                win_probability,
            });
        }
    }
    Ok(GameResult { settings, success })
}

/// `Σ_{x,y} p(x,y) Σ_{(a,b) wins} p(a,b|x,y)`.
pub fn game_success(w: &ProcessMatrix, strategy: &Strategy, game: &GameSpec) -> Result<f64> {
    Ok(play(w, strategy, game)?.success)
}

/// Success probability predicted from an OCB score `F` by `p = (1 + F/√2)/2`.
pub fn ocb_success_from_score(f: f64) -> f64 {
    0.5 * (1.0 + f * FRAC_1_SQRT_2)
}

pub mod presets {
    //! The OCB guess-your-neighbour's-input game and its standard strategy.
    //!
    //! Alice's setting `x` is her bit; Bob's setting is `y = b + 2b'`. For
    //! `b' = 0` Bob must output Alice's bit, for `b' = 1` Alice must output
    //! `b`. Alice measures her input in `Z` and sends `x` in `Z`. Bob measures
    //! `Z` (and discards) when `b' = 0`, or measures `X` with outcome `y'` and
    //! sends `b ⊕ y'` in `Z` when `b' = 1`. These instruments are a labelled
    //! preset; their success value is computed, never assumed.

    use nalgebra::DMatrix;

    use super::{GameSpec, Instrument, Strategy};
    use crate::linalg::C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(v: [f64; 2]) -> DMatrix<C64> {
        DMatrix::from_column_slice(2, 1, &[C64::new(v[0], 0.0), C64::new(v[1], 0.0)])
    }

    fn z_ket(bit: usize) -> DMatrix<C64> {
        if bit == 0 {
            ket([1.0, 0.0])
        } else {
            ket([0.0, 1.0])
        }
    }

    fn x_ket(bit: usize) -> DMatrix<C64> {
        let s = if bit == 0 { 1.0 } else { -1.0 };
        ket([FRAC_1_SQRT_2, s * FRAC_1_SQRT_2])
    }

    /// `|ψ⟩⟨e|`: measure `e`, prepare `ψ`.
    fn measure_prepare(e: &DMatrix<C64>, psi: &DMatrix<C64>) -> DMatrix<C64> {
        psi * e.adjoint()
    }

    pub fn ocb_alice(x: usize) -> Instrument {
        let outcomes: Vec<_> = (0..2)
            .map(|a| vec![measure_prepare(&z_ket(a), &z_ket(x))])
            .collect();
        Instrument::from_kraus(&outcomes).expect("qubit Kraus operators")
    }

    pub fn ocb_bob(y: usize) -> Instrument {
        let (b, b_prime) = (y % 2, y / 2);
        let outcomes: Vec<_> = (0..2)
            .map(|out| {
                if b_prime == 0 {
                    // measure Z, re-prepare the maximally mixed state
                    (0..2)
                        .map(|k| {
                            measure_prepare(&z_ket(out), &z_ket(k)) * C64::new(FRAC_1_SQRT_2, 0.0)
                        })
                        .collect()
                } else {
                    vec![measure_prepare(&x_ket(out), &z_ket(b ^ out))]
                }
            })
            .collect();
        Instrument::from_kraus(&outcomes).expect("qubit Kraus operators")
    }

    pub fn ocb_strategy() -> Strategy {
        Strategy {
            alice: (0..2).map(ocb_alice).collect(),
            bob: (0..4).map(ocb_bob).collect(),
        }
    }

    pub fn ocb_game() -> GameSpec {
        GameSpec::uniform(2, 4, 2, 2, |a, b_out, x, y| {
            let (b, b_prime) = (y % 2, y / 2);
            if b_prime == 0 {
                b_out == x
            } else {
                a == b
            }
        })
    }
}
