use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trichonet::{Bound, GammaConvention, MixtureIndexing, ModelParams};

#[derive(Parser, Debug)]
#[command(name = "trichonet", version, about = "Degree distributions of growing networks with bounded preferential attachment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grow an ensemble of networks and write the mean degree pmf.
    Simulate(SimulateArgs),
    /// Fit the three-regime model to a degree histogram or edge list.
    Fit(FitArgs),
    /// Evaluate a closed-form degree distribution.
    Eval(EvalArgs),
    /// Integrate the degree master equation and average over residence time.
    Integrate(IntegrateArgs),
    /// Tabulate one or more fit reports.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Lower bound L on the attachment weight.
    #[arg(long = "L", value_name = "INT")]
    pub lower_bound: u64,
    /// Lower threshold ℒ (defaults to L).
    #[arg(long = "LL", value_name = "INT")]
    pub lower_threshold: Option<u64>,
    /// Upper bound U; an integer or `inf`.
    #[arg(long = "U", value_name = "INT|inf")]
    pub upper_bound: Bound,
    /// Upper threshold 𝒰 (defaults to U).
    #[arg(long = "UU", value_name = "INT|inf")]
    pub upper_threshold: Option<Bound>,
    /// Arrival rate λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Initial-connection probabilities p_1⁰,p_2⁰,... (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub p0: Vec<f64>,
}

impl ModelArgs {
    pub fn params(&self, starting_degree: u64) -> trichonet::Result<ModelParams> {
        ModelParams::new(
            self.lower_bound,
            self.lower_threshold.unwrap_or(self.lower_bound),
            self.upper_threshold.unwrap_or(self.upper_bound),
            self.upper_bound,
        )?
        .with_arrival_rate(self.lambda)?
        .with_init_conn_probs(self.p0.clone())?
        .with_starting_degree(starting_degree)
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Final network size.
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `standard` or `poisson-fixed:<count>`.
    #[arg(long, default_value = "standard")]
    pub mode: String,
    /// Leave degree-0 nodes out of the pmf (standard mode only).
    #[arg(long)]
    pub exclude_isolated: bool,
    /// Also record the mean per-bin variance over the top decile of degrees.
    #[arg(long)]
    pub tail_variance: bool,
    #[arg(long, env = "TRICHONET_THREADS")]
    pub threads: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the node counts pooled over runs as `degree,count`.
    #[arg(long)]
    pub hist_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DelimiterArg {
    Auto,
    Whitespace,
    Comma,
    Tab,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DegreeModeArg {
    In,
    Out,
    Total,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConventionArg {
    Literal,
    Theorem,
}

impl From<ConventionArg> for GammaConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Literal => GammaConvention::Literal,
            ConventionArg::Theorem => GammaConvention::Theorem,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum IndexingArg {
    Exclusive,
    Inclusive,
}

impl From<IndexingArg> for MixtureIndexing {
    fn from(i: IndexingArg) -> Self {
        match i {
            IndexingArg::Exclusive => MixtureIndexing::Exclusive,
            IndexingArg::Inclusive => MixtureIndexing::Inclusive,
        }
    }
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["hist", "edges"]))]
pub struct FitArgs {
    /// `degree,count` CSV.
    #[arg(long)]
    pub hist: Option<PathBuf>,
    /// Edge list, one `source target` pair per line.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub delimiter: DelimiterArg,
    #[arg(long)]
    pub directed: bool,
    #[arg(long, value_enum, default_value = "total")]
    pub degree_mode: DegreeModeArg,
    #[arg(long, default_value_t = '#')]
    pub comment: char,
    #[arg(long)]
    pub drop_self_loops: bool,
    /// Count repeated edges once.
    #[arg(long)]
    pub dedup: bool,
    /// Initial lower boundary of the power-law segment.
    #[arg(long = "L0")]
    pub l0: Option<u64>,
    /// Initial upper boundary of the power-law segment.
    #[arg(long = "U0")]
    pub u0: Option<u64>,
    /// Keep the initial boundaries instead of searching.
    #[arg(long)]
    pub fixed_boundaries: bool,
    #[arg(long, default_value_t = 1)]
    pub max_head_params: usize,
    #[arg(long, value_enum, default_value = "literal")]
    pub gamma_convention: ConventionArg,
    #[arg(long, value_enum, default_value = "inclusive")]
    pub head_indexing: IndexingArg,
    /// Name written into the report; defaults to the input file stem.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Report JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fitted-curve CSV destination; defaults to `<out>.curve.csv`.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelKind {
    Poisson,
    Exp,
    Ba,
    Trichotomy,
    MixtureGeom,
    MixturePl,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Largest degree written (trichotomy defaults to the network size).
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Poisson mean.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Mixture weights p_1⁰,p_2⁰,...
    #[arg(long, value_delimiter = ',')]
    pub p0: Vec<f64>,
    #[arg(long, value_enum, default_value = "inclusive")]
    pub indexing: IndexingArg,
    #[arg(long = "L")]
    pub lower_bound: Option<u64>,
    #[arg(long = "LL")]
    pub lower_threshold: Option<u64>,
    #[arg(long = "U")]
    pub upper_bound: Option<Bound>,
    #[arg(long = "UU")]
    pub upper_threshold: Option<Bound>,
    /// Exponent γ; defaults to L + min(1, U/N).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Network size N.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Starting degree k⁰ of an arriving node (0 or 1).
    #[arg(long, default_value_t = 1)]
    pub k0: u64,
    /// Observation horizon.
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    /// Step size; defaults to the largest stable step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Truncation degree; defaults to 𝒰 + 50 (200 when 𝒰 is infinite).
    #[arg(long)]
    pub kmax: Option<u64>,
    /// `ba`, `large-u`, `small-u`, `gamma:<value>` or `self-consistent`.
    #[arg(long, default_value = "self-consistent")]
    pub residential_case: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Fit report JSON files.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
