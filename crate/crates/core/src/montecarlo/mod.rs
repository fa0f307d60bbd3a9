//! Monte Carlo simulation of the Markov state and no-arbitrage checks.
//!
//! `Y` is deterministic, so `X` is Gaussian and is stepped exactly between
//! grid points. Under a `T`-forward measure the drift of `X` carries the
//! extra term `-h_i h_k rho_ik eps^2(s) G0_k(s, s, T)`.

mod checks;
mod config;
mod dump;
mod engine;

pub use checks::{check_bond_martingale, check_forward_martingale, mc_swaption_price, run_checks, CheckSpec, MartingaleReport};
pub use config::{grid_through, uniform_grid, Measure, PathConfig, Scheme};
pub use dump::{read_terminal_states, write_terminal_states};
pub use engine::{exact_step_moments, simulate, Estimate, PathSet, StepMoments, BLOCK_SIZE};
