//! Transcendental functions from a pure-Rust libm.
//!
//! The platform libm may round `sincos` differently from separate `sin` and
//! `cos` calls, and the optimizer merges those calls only in some builds, so
//! debug and release runs of the same scenario would drift apart. It also
//! picks CPU-specific variants at load time. Every transcendental call of the
//! closed loop goes through here so traces are bit-identical across build
//! profiles and machines.

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn sin_cos(x: f64) -> (f64, f64) {
    (libm::sin(x), libm::cos(x))
}

pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}
