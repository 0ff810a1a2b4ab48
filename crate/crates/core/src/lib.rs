//! Tractor trajectory tracking with an interval type-2 fuzzy neural network
//! trained online by sliding-mode learning rules.
//!
//! The crate is organised bottom-up:
//!
//! - [`vehicle`]: kinematic and linear-tire yaw dynamics of the tractor, the
//!   steering actuator and the fixed-step plant integrator.
//! - [`fuzzy`]: type-2 triangular membership functions, rule firing and the
//!   q-weighted A2-C0 TSK inference.
//! - [`learning`]: sliding-mode adaptation of every network parameter.
//! - [`control`]: kinematic trajectory law, PID speed loop and the PD ∥ T2FNN
//!   yaw-rate loop.
//! - [`estimation`]: GPS model, Savitzky-Golay smoothing, position-velocity
//!   Kalman filter and pose EKF.
//! - [`sim`]: scenarios, the 20 Hz closed loop, telemetry and error metrics.
//!
//! ```
//! use tractor_t2fnn::fuzzy::{NetworkConfig, T2FnnState};
//!
//! let net = T2FnnState::new(&NetworkConfig::default()).unwrap();
//! let fs = net.fire(0.1, -0.3, 1e-3);
//! assert!((fs.wt_lower.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! assert_eq!(net.infer(&fs), 0.0);
//! ```

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod error;
pub mod estimation;
pub mod fuzzy;
pub mod learning;
pub mod math;
pub mod ode;
pub mod sim;
pub mod vehicle;

pub use error::{Error, Result};
