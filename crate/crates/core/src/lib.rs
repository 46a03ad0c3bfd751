//! Open-quantum-system simulator for dissipative state generation with
//! Lyapunov feedback control.
//!
//! * [`algebra`]: dense complex matrices, Kronecker products, Hermitian eigensolver.
//! * [`lindblad`]: master-equation models, right-hand side, RK4 propagation.
//! * [`lyapunov`]: Lyapunov function, evolution speed, feedback amplitudes,
//!   dark-state verification.
//! * [`models`]: the Λ-atom and two-atom cavity systems, Zeno reduction.
//! * [`experiment`]: configuration, simulations, sweeps and CSV output.
//!
//! Energies are in units of the reference Rabi frequency Ω₀ and times in 1/Ω₀.

pub mod algebra;
pub mod error;
pub mod experiment;
pub mod lindblad;
pub mod lyapunov;
pub mod models;

pub use algebra::{ComplexMatrix, KetVector};
pub use error::{Error, Result};
pub use lindblad::{propagate, DensityMatrix, OpenSystemModel, Schedule, TrajectoryRecord};
pub use lyapunov::LyapunovController;
