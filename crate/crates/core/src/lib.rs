//! Super-profit model of the oil price.
//!
//! Super profit is `S = (p - p0) q` against a win-win reference price `p0`
//! (29 USD/barrel unless overridden). World reserves follow
//! `dR/dt = -v + alpha R` with `v = a + w`, and the non-producer demand `a`
//! is chosen to minimize `∫ S^m dt`. [`pontryagin`] holds the optimality
//! conditions and the full solve, [`sweeps`] runs families of solves over
//! varied initial or terminal reserves, and [`winwin`] evolves a dynamic
//! reference price.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod plot;
pub mod pontryagin;
pub mod scalar;
pub mod sweeps;
pub mod winwin;

pub use dynamics::{
    integrate_costate, integrate_costate_numeric, integrate_reserves, integrate_reversed,
    GrowthRate, ReversalConvention,
};
pub use error::{Result, WadeError};
pub use model::{make_grid, super_profit, total_demand, ReferencePrice};
pub use pontryagin::{
    calibrate_c0, hamiltonian, optimal_demand, optimal_superprofit, solve_pmp,
    stationarity_residual, PriceGuard, SingularPolicy,
};
pub use scalar::Scalar;
pub use sweeps::{qk, run_initial_sweep, run_terminal_sweep, Indexing, SweepMode};
pub use winwin::{evolve_winwin_price, winwin_consistency, InvestmentResponse};

pub type ModelParams = model::ModelParams<f64>;
pub type TimeGrid = model::TimeGrid<f64>;
pub type Series = model::Series<f64>;
pub type DemandSplit = model::DemandSplit<f64>;
pub type Trajectory = pontryagin::Trajectory<f64>;
pub type PriceContext = pontryagin::PriceContext<f64>;
pub type SweepSpec = sweeps::SweepSpec<f64>;
pub type SweepResult = sweeps::SweepResult<f64>;
pub type WinWinParams = winwin::WinWinParams<f64>;

pub type ModelParams32 = model::ModelParams<f32>;
pub type TimeGrid32 = model::TimeGrid<f32>;
pub type Series32 = model::Series<f32>;
pub type Trajectory32 = pontryagin::Trajectory<f32>;
