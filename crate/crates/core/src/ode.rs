//! Classical fixed-step Runge-Kutta integration over small state vectors.

use nalgebra::SVector;

/// One RK4 step of `dy/dt = f(y)` (autonomous; time-varying inputs are held
/// by the caller for the duration of the step).
pub fn rk4_step<const N: usize, E, F>(
    f: F,
    y: &SVector<f64, N>,
    h: f64,
) -> Result<SVector<f64, N>, E>
where
    F: Fn(&SVector<f64, N>) -> Result<SVector<f64, N>, E>,
{
    let k1 = f(y)?;
    let k2 = f(&(y + k1 * (h / 2.0)))?;
    let k3 = f(&(y + k2 * (h / 2.0)))?;
    let k4 = f(&(y + k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Integrates over `dt` with `substeps` equal RK4 steps.
pub fn rk4_integrate<const N: usize, E, F>(
    f: F,
    y0: &SVector<f64, N>,
    dt: f64,
    substeps: usize,
) -> Result<SVector<f64, N>, E>
where
    F: Fn(&SVector<f64, N>) -> Result<SVector<f64, N>, E>,
{
    let n = substeps.max(1);
    let h = dt / n as f64;
    let mut y = *y0;
    for _ in 0..n {
        y = rk4_step(&f, &y, h)?;
    }
    Ok(y)
}
