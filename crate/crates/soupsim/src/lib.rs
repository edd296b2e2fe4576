//! Simulation of random-walk loop soups, discrete Gaussian free fields and
//! their couplings on finite planar lattice domains.
//!
//! The crate is organised around a small set of building blocks:
//!
//! * [`grid`] — lattice domains, conductance Laplacians and exact Green functions;
//! * [`gff`] — zero-boundary Gaussian free field sampling, Wick squares;
//! * [`loopsoup`] — the discrete-time random-walk loop soup and its
//!   Gamma-augmented occupation field;
//! * [`cable`] — cable-system (metric-graph) cluster couplings, planar outer
//!   boundary tracing and subdomain exploration;
//! * [`excursions`] — Poisson processes of boundary-to-boundary excursions and
//!   the cluster decomposition experiments built on them;
//! * [`stats`] — reproducible random streams and the test battery experiments
//!   report through;
//! * [`experiments`] — the named statistical checks exposed by the CLI.
//!
//! All numeric kernels are generic over a [`scalar::Scalar`] type; the
//! aliases below pin the default `f64` instantiations used by the CLI and
//! the experiment suite.

pub mod cable;
pub mod config;
pub mod constants;
pub mod excursions;
pub mod experiments;
pub mod gff;
pub mod grid;
pub mod loopsoup;
pub mod scalar;
pub mod stats;

/// Default scalar type for experiments and the CLI.
pub type Real = f64;

pub type DomainGraph64 = grid::DomainGraph<Real>;
pub type GreenMatrix64 = grid::GreenMatrix<Real>;
pub type ScalarField64 = gff::ScalarField<Real>;
pub type LoopSoup64 = loopsoup::LoopSoup<Real>;
pub type OccupationField64 = loopsoup::OccupationField<Real>;
pub type ClusterSet64 = cable::ClusterSet;
pub type ExcursionProcess64 = excursions::ExcursionProcess<Real>;
