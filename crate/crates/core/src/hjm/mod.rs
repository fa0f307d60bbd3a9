//! Separable-volatility HJM machinery for the weighted Gaussian model.
//!
//! Volatility factorizes as `sigma_t(u; T, x) = h_t q(u; T, x) g(t, u)` with
//! `h_t = eps(t) h R^T`, `g_i(t, u) = exp(-lambda_i (u - t))` and
//! `q_i(T, x) = qhat(T, x) exp(-x eta_i)`. The model is then Markov in the
//! state `(X, Y)`, from which every curve is rebuilt in closed form.

mod kernel;
mod params;
mod state;

pub use kernel::{epsilon, kernel_g, kernel_g0, kernel_g_tenor, VolKernel};
pub use params::{ParamsFile, QScale, ShiftOverride, ShiftRule, WgParams};
pub use state::{
    bond_price, evolve_y, instantaneous_forward_at, reconstruct_forward_libor, reconstruct_ois_rate,
    shifted_libor, short_rate, HjmState,
};
