use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::io::parse_complex;

#[derive(Debug, Parser)]
#[command(name = "qradial", version, about = "Radial harmonic analysis on quantum complex hyperbolic spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Deformation parameter, 0 < q < 1.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,
    /// Number of negative signature directions, n ≥ 1.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Number of positive signature directions, m ≥ 2.
    #[arg(long, global = true, default_value_t = 2)]
    pub m: usize,
    /// Numerical tolerance for infinite products, series and quadrature.
    #[arg(long, global = true, env = "QRADIAL_TOL", default_value_t = 1e-14)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized batteries.
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// q-Pochhammer symbols, q-Gamma, q-Pascal entries, Jackson integrals, q-differences.
    Qs {
        #[command(subcommand)]
        cmd: QsCmd,
    },
    /// Radial eigenfunctions Φ_l.
    Phi {
        #[command(subcommand)]
        cmd: PhiCmd,
    },
    /// Al-Salam–Chihara polynomials.
    Asc {
        #[command(subcommand)]
        cmd: AscCmd,
    },
    /// The spectral measure.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Radial density and invariant integral.
    Radial {
        #[command(subcommand)]
        cmd: RadialCmd,
    },
    /// The radial Laplacian.
    #[command(name = "box")]
    Box {
        #[command(subcommand)]
        cmd: BoxCmd,
    },
    /// The spectral transform.
    Transform {
        #[command(subcommand)]
        cmd: TransformCmd,
    },
    /// The c-function.
    Cfun {
        #[command(subcommand)]
        cmd: CfunCmd,
    },
    /// The truncated representation.
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// The acceptance battery.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QsWhat {
    /// (a; base)_k
    Poch,
    /// (a; base)_∞
    PochInf,
    /// Γ_base(x)
    Gamma,
    /// Ψ(j, k), closed form and lattice sum
    Psi,
    /// ∫_1^∞ f d_{q^-2}x of --in
    Qintegral,
    /// (B_- f)(q^{-2k}) of --in
    Bminus,
    /// (B_+ f)(q^{-2k}) of --in
    Bplus,
}

#[derive(Debug, Subcommand)]
pub enum QsCmd {
    Eval {
        #[arg(long, value_enum)]
        what: QsWhat,
        /// Argument `a` (re[,im]).
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0")]
        a: Complex64,
        /// Argument `x` of Γ (re[,im]).
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "1")]
        x: Complex64,
        /// Base; defaults to q².
        #[arg(long)]
        base: Option<f64>,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhiRoute {
    /// Three-term recurrence through the Al-Salam–Chihara bridge.
    Bridged,
    /// Literal terminating ₃φ₂.
    Series,
}

#[derive(Debug, Subcommand)]
pub enum PhiCmd {
    /// Φ_l(q^{-2j}) for j = 0..=k.
    Eval {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        l: Complex64,
        #[arg(long, value_enum, default_value_t = PhiRoute::Bridged)]
        route: PhiRoute,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AscRoute {
    Recurrence,
    Hypergeometric,
}

#[derive(Debug, Subcommand)]
pub enum AscCmd {
    /// Q_j(z) and the orthonormal P_j(z) for j = 0..=k.
    Eval {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_enum, default_value_t = AscRoute::Recurrence)]
        route: AscRoute,
    },
}

#[derive(Debug, Subcommand)]
pub enum MeasureCmd {
    /// Masses, normalization and quadrature grid.
    Build {
        /// List the quadrature nodes instead of the masses.
        #[arg(long)]
        nodes: bool,
    },
    /// Adaptive quadrature of z^power, or of P_i P_j with --pair.
    Quadrature {
        #[arg(long, default_value_t = 0)]
        power: u32,
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RadialCmd {
    /// ρ, point masses, ‖f_j‖² and c_j for k = 0..=kmax.
    Rho {
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// ∫ f ρ d_{q^-2}x.
    Integrate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxRoute {
    Pointwise,
    Divergence,
}

#[derive(Debug, Subcommand)]
pub enum BoxCmd {
    /// □f.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BoxRoute::Pointwise)]
        route: BoxRoute,
    },
    /// The symmetric tridiagonal matrix in the orthonormal basis.
    Matrix {
        #[arg(long)]
        size: usize,
    },
    /// Eigenvalues of the truncated matrix, the band and the mass eigenvalues.
    Spectrum {
        #[arg(long)]
        size: usize,
    },
    /// λ(l) or λ(z).
    Lambda {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, conflicts_with = "z")]
        l: Option<Complex64>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<f64>,
    },
    /// ⟨□f, g⟩ and the Dirichlet form.
    Dirichlet {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "with")]
        other: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum TransformCmd {
    /// Uf on the quadrature nodes and masses.
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// f from spectral samples written by `transform forward`.
    Inverse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        jmax: usize,
    },
    /// ‖f‖² and ‖Uf‖².
    Plancherel {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// ‖U(□f) - λ·Uf‖.
    Multcheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CfunCmd {
    Eval {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        l: Complex64,
    },
    /// Φ_l(q^{-2k}) x^{-s} against c(s) for k = 0..=kmax.
    Asymptotics {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        l: Complex64,
        #[arg(long, default_value_t = 40)]
        kmax: usize,
    },
    /// Continuous weight against 1/(c(l)c(-l-N+1)(q^{2n};q²)²_∞).
    Wc {
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    /// Index set size and generator sparsity.
    Build {
        #[arg(long = "M", default_value_t = 10)]
        bound: usize,
    },
    /// Relative residuals of the defining relations on the interior.
    Relations {
        #[arg(long = "M", default_value_t = 20)]
        bound: usize,
    },
    /// Tr(T(f)Q) against the radial integral.
    Integral {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "M", default_value_t = 30)]
        bound: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Runs the full acceptance battery, or only the given configuration with --single.
    All {
        #[arg(long)]
        single: bool,
    },
}
