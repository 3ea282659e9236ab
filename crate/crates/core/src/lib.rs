//! Interlaced-particle growth on lozenge tilings and the Hamilton-Jacobi
//! toolkit used to check its large-scale behaviour.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! computation: file formats, configuration parsing, thread fan-out and the
//! command line live in the companion `akpz` crate.
//!
//! Module map:
//!
//! * [`lattice`]: particle sites, dual-lattice coordinates, interlaced
//!   configurations and the gap condition.
//! * [`height`]: the configuration/height-function bijection and the
//!   discretisation of macroscopic profiles.
//! * [`profile`]: the catalog of analytic initial profiles.
//! * [`sim`]: Poisson event streams, the sequential jump rule, the exact
//!   variational oracle, coupling and propagation checks.
//! * [`gibbs`]: torus Monte Carlo for the stationary tilings and their
//!   equilibrium statistics.
//! * [`pde`]: drift function, characteristics, Legendre-Fenchel transforms,
//!   Hopf and Riemann solutions, gradient-jump detection.
//! * [`instances`]: random small configurations and ring sets for property
//!   checks.
//! * [`harness`]: hydrodynamic-limit experiments and their aggregation.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod gibbs;
pub mod harness;
pub mod height;
pub mod instances;
pub mod lattice;
pub mod pde;
pub mod profile;
pub mod sim;

pub use height::{config_from_height, config_from_profile, height_from_config, HeightField};
pub use lattice::{
    neighbor_labels, star_coords, Half, Label, LocalizationBox, ParticleConfig, ParticleLine,
    SiteCoord, Slope, StarVertex, Window,
};
pub use profile::ProfileSpec;
