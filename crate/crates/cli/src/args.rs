use clap::{Args, Parser, Subcommand, ValueEnum};

/// Process-matrix toolkit: build, validate, twirl, decompose, score and simulate.
///
/// Processes, witnesses, strategies and games are given either by builtin name
/// or by file path; `-` reads stdin. Reports are JSON on stdout with sorted keys
/// and 17 significant digits. Exit codes: 0 ok, 1 usage, 2 malformed input,
/// 3 negative verdict.
#[derive(Debug, Parser)]
#[command(name = "procmat", version)]
pub struct Cli {
    /// Numerical tolerance (flag > TOLERANCE env var > 1e-9).
    #[arg(long, global = true, env = "TOLERANCE", value_parser = parse_tol)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err("tolerance must be a positive finite number".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    FixedOrderAb,
    FixedOrderBa,
    Ocb,
    QsMarginal,
}

#[derive(Debug, Args)]
pub struct WireArgs {
    /// First wire as `OUT,IN` labels.
    #[arg(long, default_value = "A_O,B_I")]
    pub wire1: String,
    /// Second wire as `OUT,IN` labels.
    #[arg(long, default_value = "B_O,A_I")]
    pub wire2: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a builtin process as Operator JSON.
    Builtin {
        #[arg(value_enum)]
        name: Builtin,
        /// Local dimension (the OCB process exists only for d = 2).
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Check positivity, normalization and the causality constraints.
    Validate { process: String },
    /// Emit the wire twirl of an operator as Operator JSON.
    Twirl {
        input: String,
        #[command(flatten)]
        wires: WireArgs,
    },
    /// Report the distance to the wire-covariant sector.
    CovarianceCheck {
        process: String,
        #[command(flatten)]
        wires: WireArgs,
    },
    /// Decompose a covariant process into the four definite-order vertices.
    Decompose {
        process: String,
        /// Recompose from the emitted weights and require agreement within 1e-10.
        #[arg(long)]
        verify: bool,
    },
    /// Split a witness into its covariant part and remainder.
    WitnessSplit {
        #[arg(long)]
        witness: String,
    },
    /// Score a process against a witness.
    Score {
        #[arg(long)]
        witness: String,
        #[arg(long)]
        process: String,
    },
    /// Play a causal game through the Born rule.
    Simulate {
        #[arg(long)]
        process: String,
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        game: String,
    },
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Builtin { .. } => "builtin",
            Command::Validate { .. } => "validate",
            Command::Twirl { .. } => "twirl",
            Command::CovarianceCheck { .. } => "covariance-check",
            Command::Decompose { .. } => "decompose",
            Command::WitnessSplit { .. } => "witness-split",
            Command::Score { .. } => "score",
            Command::Simulate { .. } => "simulate",
        }
    }
}
