//! Degree distributions of growing networks whose attachment weight is a
//! clamped ("modified") degree: closed forms, a master-equation integrator,
//! a stochastic growth simulator, and a three-regime histogram fitter.

pub mod closed_form;
pub mod master_equation;
pub mod error;
pub mod fitting;
pub mod histogram;
pub mod ingest;
pub mod params;
pub mod residential;
pub mod simulator;
pub mod stats;

pub use closed_form::{
    ba_power_law_pmf, default_gamma, exp_network_pmf, poisson_network_pmf, trichotomy_pmf,
    trunc_geom_mixture_pmf, trunc_power_law_mixture_pmf, ClosedFormPmf, MixtureIndexing, PmfSource,
};
pub use error::{Error, ErrorKind, Result};
pub use histogram::DegreeHistogram;
pub use params::{Bound, GammaExponent, ModelParams};
pub use residential::{residential_time_density, ResidentialCase, ResidentialTimeSpec};
pub use master_equation::{
    integrate_degree_dynamics, self_consistent_gamma, stationary_degree_pmf, stationary_with_leak,
    GridConfig, MasterEquationGrid, STABILITY_LIMIT,
};
pub use simulator::{
    grow_network, run_ensemble, sample_attachment_target, EnsemblePmf, GrowthState, SimConfig,
    SimMode,
};
pub use fitting::{
    fit_head, fit_power_law_segment, fit_pure_power_law, fit_tail, fit_trichotomy, fmt_g9, rmse,
    FitConfig, FitReport, GammaConvention,
};
pub use ingest::{
    emit_histogram, parse_edge_list, parse_histogram, write_histogram, DegreeMode, Delimiter,
    Directedness, EdgeListSpec, SelfLoopPolicy,
};
