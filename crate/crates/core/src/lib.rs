//! Relativistic echo dynamics: fidelity decay of Dirac Landau electrons under
//! a weak static perturbation, with a one-dimensional Klein-Gordon companion.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

pub mod dirac;
pub mod dynamics;
pub mod error;
pub mod fidelity;
pub mod grid;
pub mod kg;
pub mod landau;
pub mod perturbation;
pub mod perturbative;
pub mod scalar;
pub mod special;

pub use dynamics::{assemble, echo_kernel, AssembleOptions, EchoKernel, EchoOperator, Evolution, HamiltonianModel};
pub use error::{Error, Result};
pub use fidelity::{
    basis_state, continuity_residual, current, evolving_pair, fidelity_current, fidelity_echo, fidelity_ensemble,
    fidelity_ode, fidelity_ode_with_threshold, fidelity_overlap, linear_response_rate, ContinuityResidual,
    CurrentField, FidelitySeries, Method, OdeSeries,
};
pub use grid::{SpinorField, Stencil, TransverseGrid};
pub use kg::{
    kg_echo_kernel, kg_evolve, kg_fidelity, kg_fidelity_series, kg_inner, KgEchoKernel, KgGrid, KgPropagator, KgState,
    KgSystem, ScalarProfile,
};
pub use landau::{
    degenerate_set, landau_energy, landau_orbital, landau_spinor, BasisTruncation, ParticleParams, QuantumNumbers,
    SampledBasis, Sector, Spin, SpinSelection,
};
pub use perturbation::{Frame, PerturbationField, Profile, TabulatedPotential};
pub use perturbative::{
    beam_c, boost_check, boost_velocity, c_coefficient, compton_guard, correlation_integral, correlation_terms,
    fit_quadratic_decay, predicted_series, BeamEnsemble, BoostReport, CorrelationCoefficient, QuadraticFit,
};
pub use scalar::{Complex, Real};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Model = HamiltonianModel<f64>;
pub type Basis = SampledBasis<f64>;
pub type Params = ParticleParams<f64>;
pub type Labels = QuantumNumbers<f64>;
pub type Grid = TransverseGrid<f64>;
pub type Field = SpinorField<f64>;
pub type Perturbation = PerturbationField<f64>;
pub type Series = FidelitySeries<f64>;
pub type Ensemble = BeamEnsemble<f64>;
pub type KgField = KgState<f64>;
pub type C64 = Complex<f64>;
