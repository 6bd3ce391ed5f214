//! Generators, semigroups and resolvents: spectral on torus grids, direct
//! quadrature at points, and Monte Carlo over sampled paths.

pub mod grid;
pub mod harmonic;
pub mod montecarlo;
pub mod quadrature_generator;
pub mod spectral;

pub use grid::{GridFunction, TorusGrid};
pub use harmonic::{check_harmonic, choquet_deny_check, Candidate, ChoquetDenyReport, HarmonicityReport, ProbeResult};
pub use montecarlo::{mc_semigroup, sample_levy, sample_paths, LevySampler, MCConfig, MCEstimate, SamplePath};
pub use quadrature_generator::{apply_generator_quadrature, Callable, SmoothFunction};
pub use spectral::{
    apply_generator_spectral, grid_symbol, power_generator_apply, resolvent_apply, semigroup_apply_spectral,
};
