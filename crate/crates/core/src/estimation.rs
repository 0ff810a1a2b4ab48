//! Sensor models and filters: GPS at the rear-axle antenna, the quantized
//! steering potentiometer with Savitzky-Golay smoothing, a position-velocity
//! Kalman filter for speed, and a pose EKF over the discrete rear-axle
//! kinematics.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix2x3, Matrix3, Matrix4, Vector2, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::math;
use crate::vehicle::{quantize, RigidBodyState, TractorParams};
use crate::{Error, Result};

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

// ---------------------------------------------------------------------------
// Savitzky-Golay
// ---------------------------------------------------------------------------

/// Least-squares polynomial smoother over a fixed odd window.
///
/// The convolution weights are computed once from a QR factorization of the
/// Vandermonde matrix on the centred abscissa `-m..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SavgolFilter {
    window: usize,
    order: usize,
    /// `coeffs[k]` maps the window samples to the k-th polynomial coefficient.
    coeffs: DMatrix<f64>,
}

impl SavgolFilter {
    pub fn new(window: usize, order: usize) -> Result<Self> {
        if window.is_multiple_of(2) || order >= window {
            return Err(Error::BadWindow {
                window,
                order,
                samples: window,
            });
        }
        let half = (window / 2) as f64;
        let vander = DMatrix::from_fn(window, order + 1, |r, c| {
            // repeated products rather than powi, which rounds differently per build profile
            let x = r as f64 - half;
            (0..c).fold(1.0, |acc, _| acc * x)
        });
        let qr = vander.qr();
        let r_inv = qr.r().try_inverse().ok_or(Error::BadWindow {
            window,
            order,
            samples: window,
        })?;
        let coeffs = r_inv * qr.q().transpose();
        Ok(Self { window, order, coeffs })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Fitted polynomial evaluated at `pos` samples from the window centre.
    pub fn fit_at(&self, samples: &[f64], pos: f64) -> Result<f64> {
        if samples.len() != self.window {
            return Err(Error::BadWindow {
                window: self.window,
                order: self.order,
                samples: samples.len(),
            });
        }
        let poly = &self.coeffs * DVector::from_column_slice(samples);
        Ok(poly.iter().rev().fold(0.0, |acc, c| acc * pos + c))
    }

    /// First derivative (per sample) of the fitted polynomial at `pos`.
    pub fn derivative_at(&self, samples: &[f64], pos: f64) -> Result<f64> {
        if samples.len() != self.window {
            return Err(Error::BadWindow {
                window: self.window,
                order: self.order,
                samples: samples.len(),
            });
        }
        let poly = &self.coeffs * DVector::from_column_slice(samples);
        Ok(poly
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * pos + k as f64 * c))
    }

    /// Smoothed value at the window centre.
    pub fn smooth(&self, samples: &[f64]) -> Result<f64> {
        self.fit_at(samples, 0.0)
    }

    /// Smooths a whole series. Interior points use the centred window; the
    /// first and last half-window are read off the edge fits.
    pub fn filter_series(&self, series: &[f64]) -> Result<Vec<f64>> {
        let n = series.len();
        if n < self.window {
            return Err(Error::BadWindow {
                window: self.window,
                order: self.order,
                samples: n,
            });
        }
        let half = self.window / 2;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let start = i.saturating_sub(half).min(n - self.window);
            let pos = i as f64 - (start + half) as f64;
            out.push(self.fit_at(&series[start..start + self.window], pos)?);
        }
        Ok(out)
    }
}

/// Smoothed centre value of one window of samples.
pub fn savgol_smooth(window: usize, order: usize, samples: &[f64]) -> Result<f64> {
    if samples.len() != window {
        return Err(Error::BadWindow {
            window,
            order,
            samples: samples.len(),
        });
    }
    SavgolFilter::new(window, order)?.smooth(samples)
}

// ---------------------------------------------------------------------------
// Sensors
// ---------------------------------------------------------------------------

/// One GPS fix at the rear-axle antenna.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GpsSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpsConfig {
    /// Position noise standard deviation per axis [m].
    pub sigma_pos: f64,
    /// Velocity noise standard deviation per axis [m/s].
    pub sigma_vel: f64,
    /// Probability that a fix is unusable.
    pub dropout_rate: f64,
}

impl Default for GpsConfig {
    fn default() -> Self {
        Self {
            sigma_pos: 0.02,
            sigma_vel: 0.02,
            dropout_rate: 0.0,
        }
    }
}

/// Seeded GPS model. Velocity is the backward difference of the true antenna
/// position plus noise (the analytic antenna velocity on the first fix).
#[derive(Debug, Clone)]
pub struct GpsModel {
    cfg: GpsConfig,
    rng: ChaCha8Rng,
    prev: Option<(f64, f64, f64)>,
}

impl GpsModel {
    pub fn new(cfg: GpsConfig, seed: u64) -> Result<Self> {
        if !(cfg.sigma_pos >= 0.0 && cfg.sigma_vel >= 0.0 && (0.0..=1.0).contains(&cfg.dropout_rate)) {
            return Err(Error::InvalidScenario(format!("bad GPS configuration {cfg:?}")));
        }
        Ok(Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            prev: None,
        })
    }

    fn noise(&mut self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sigma)
            .expect("sigma validated non-negative")
            .sample(&mut self.rng)
    }

    pub fn sample(&mut self, t: f64, truth: &RigidBodyState, params: &TractorParams) -> GpsSample {
        let (ax, ay) = truth.rear_axle(params);
        let (vx, vy) = match self.prev {
            Some((pt, px, py)) if t > pt => ((ax - px) / (t - pt), (ay - py) / (t - pt)),
            _ => {
                let (s, c) = math::sin_cos(truth.psi);
                let cg_x = truth.u * c - truth.v * s;
                let cg_y = truth.u * s + truth.v * c;
                (cg_x + params.lr * truth.gamma * s, cg_y - params.lr * truth.gamma * c)
            }
        };
        self.prev = Some((t, ax, ay));
        // draw every random number each call so dropouts do not shift the stream
        let n = [
            self.noise(self.cfg.sigma_pos),
            self.noise(self.cfg.sigma_pos),
            self.noise(self.cfg.sigma_vel),
            self.noise(self.cfg.sigma_vel),
        ];
        let dropped = self.rng.random::<f64>() < self.cfg.dropout_rate;
        GpsSample {
            t,
            x: ax + n[0],
            y: ay + n[1],
            vx: vx + n[2],
            vy: vy + n[3],
            valid: !dropped,
        }
    }
}

/// Convenience wrapper: one fix from a fresh model.
pub fn gps_model(truth: &RigidBodyState, params: &TractorParams, cfg: GpsConfig, seed: u64) -> Result<GpsSample> {
    Ok(GpsModel::new(cfg, seed)?.sample(0.0, truth, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringSensorConfig {
    /// Raw potentiometer readings per control period.
    pub samples_per_period: usize,
    /// Potentiometer resolution [rad].
    pub resolution: f64,
    /// Electrical noise before quantization [rad].
    pub noise_sigma: f64,
    pub savgol_window: usize,
    pub savgol_order: usize,
}

impl Default for SteeringSensorConfig {
    fn default() -> Self {
        Self {
            samples_per_period: 100,
            resolution: 1f64.to_radians(),
            noise_sigma: 0.5f64.to_radians(),
            savgol_window: 11,
            savgol_order: 2,
        }
    }
}

/// Front-wheel angle potentiometer: many quantized readings per period,
/// Savitzky-Golay filtered, then averaged.
#[derive(Debug, Clone)]
pub struct SteeringSensor {
    cfg: SteeringSensorConfig,
    filter: SavgolFilter,
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
}

impl SteeringSensor {
    pub fn new(cfg: SteeringSensorConfig, seed: u64) -> Result<Self> {
        if cfg.samples_per_period < cfg.savgol_window || !(cfg.resolution > 0.0) || !(cfg.noise_sigma >= 0.0) {
            return Err(Error::InvalidScenario(format!("bad steering sensor configuration {cfg:?}")));
        }
        let filter = SavgolFilter::new(cfg.savgol_window, cfg.savgol_order)?;
        let noise = (cfg.noise_sigma > 0.0).then(|| Normal::new(0.0, cfg.noise_sigma).expect("checked"));
        Ok(Self {
            cfg,
            filter,
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise,
        })
    }

    /// Measures a steering angle that moved linearly from `from` to `to`
    /// during the last period.
    pub fn measure(&mut self, from: f64, to: f64) -> f64 {
        let n = self.cfg.samples_per_period;
        let raw: Vec<f64> = (0..n)
            .map(|k| {
                let frac = (k + 1) as f64 / n as f64;
                let jitter = self.noise.map_or(0.0, |d| d.sample(&mut self.rng));
                quantize(from + (to - from) * frac + jitter, self.cfg.resolution)
            })
            .collect();
        let smoothed = self.filter.filter_series(&raw).expect("length checked at construction");
        smoothed.iter().sum::<f64>() / n as f64
    }
}

// ---------------------------------------------------------------------------
// Position-velocity Kalman filter
// ---------------------------------------------------------------------------

/// Which measurement rows the speed filter uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KfRows {
    #[default]
    PositionVelocity,
    PositionOnly,
    VelocityOnly,
}

impl KfRows {
    fn indices(self) -> &'static [usize] {
        match self {
            KfRows::PositionVelocity => &[0, 1, 2, 3],
            KfRows::PositionOnly => &[0, 2],
            KfRows::VelocityOnly => &[1, 3],
        }
    }
}

/// Kalman filter on `(x, vx, y, vy)` with a random-walk velocity model.
#[derive(Debug, Clone, PartialEq)]
pub struct KfState {
    pub x: Vector4<f64>,
    pub p: Matrix4<f64>,
}

impl KfState {
    pub fn new(x: Vector4<f64>, p: Matrix4<f64>) -> Self {
        Self { x, p }
    }

    pub fn from_sample(z: &GpsSample, pos_var: f64, vel_var: f64) -> Self {
        Self {
            x: Vector4::new(z.x, z.vx, z.y, z.vy),
            p: Matrix4::from_diagonal(&Vector4::new(pos_var, vel_var, pos_var, vel_var)),
        }
    }

    pub fn speed(&self) -> f64 {
        math::hypot(self.x[1], self.x[3])
    }
}

/// State transition over one sample period.
pub fn kf_transition(ts: f64) -> Matrix4<f64> {
    Matrix4::new(
        1.0, ts, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, ts, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// Discrete process noise of the random-walk velocity model for a white
/// acceleration spectral density `psd` [m²/s³].
pub fn kf_process_noise(ts: f64, psd: f64) -> Matrix4<f64> {
    let (a, b, c) = (ts * ts * ts / 3.0, ts * ts / 2.0, ts);
    psd * Matrix4::new(
        a, b, 0.0, 0.0, //
        b, c, 0.0, 0.0, //
        0.0, 0.0, a, b, //
        0.0, 0.0, b, c,
    )
}

fn symmetrize<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> nalgebra::SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

/// Predict over `ts`, then update against the selected rows of `z` when the
/// fix is valid. `rk` is the full 4×4 measurement covariance in state order.
pub fn kf_predict_update(
    kf: &KfState,
    ts: f64,
    z: &GpsSample,
    qk: &Matrix4<f64>,
    rk: &Matrix4<f64>,
    rows: KfRows,
) -> KfState {
    let phi = kf_transition(ts);
    let x = phi * kf.x;
    let p = symmetrize(&(phi * kf.p * phi.transpose() + qk));
    if !z.valid {
        return KfState { x, p };
    }
    let idx = rows.indices();
    let m = idx.len();
    let meas = Vector4::new(z.x, z.vx, z.y, z.vy);
    let h = DMatrix::from_fn(m, 4, |r, c| if idx[r] == c { 1.0 } else { 0.0 });
    let r = DMatrix::from_fn(m, m, |a, b| rk[(idx[a], idx[b])]);
    let zv = DVector::from_iterator(m, idx.iter().map(|&i| meas[i]));

    let pd = DMatrix::from_column_slice(4, 4, p.as_slice());
    let xd = DVector::from_column_slice(x.as_slice());
    let s = &h * &pd * h.transpose() + &r;
    let Some(s_inv) = s.try_inverse() else {
        return KfState { x, p };
    };
    let k = &pd * h.transpose() * s_inv;
    let innovation = zv - &h * &xd;
    let x_new = xd + &k * innovation;
    let i_kh = DMatrix::identity(4, 4) - &k * &h;
    // Joseph form keeps the covariance positive semidefinite
    let p_new = &i_kh * &pd * i_kh.transpose() + &k * &r * k.transpose();
    KfState {
        x: Vector4::from_column_slice(x_new.as_slice()),
        p: symmetrize(&Matrix4::from_column_slice(p_new.as_slice())),
    }
}

// ---------------------------------------------------------------------------
// Pose EKF
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EkfConfig {
    /// Diagonal of the process noise on `(x, y, ψ)`.
    pub q_diag: [f64; 3],
    /// Diagonal of the position measurement noise.
    pub r_diag: [f64; 2],
    /// Diagonal of the initial covariance.
    pub p0_diag: [f64; 3],
}

impl Default for EkfConfig {
    fn default() -> Self {
        Self {
            q_diag: [1e-6, 1e-6, 1e-7],
            r_diag: [4e-4, 4e-4],
            p0_diag: [4e-4, 4e-4, 1e-3],
        }
    }
}

/// EKF over the rear-axle pose `(x, y, ψ)`. Only position is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct EkfState {
    pub x: Vector3<f64>,
    pub p: Matrix3<f64>,
    pub q: Matrix3<f64>,
    pub r: Matrix2<f64>,
}

impl EkfState {
    pub fn new(pose: Vector3<f64>, cfg: &EkfConfig) -> Self {
        Self {
            x: Vector3::new(pose[0], pose[1], wrap_angle(pose[2])),
            p: Matrix3::from_diagonal(&Vector3::from(cfg.p0_diag)),
            q: Matrix3::from_diagonal(&Vector3::from(cfg.q_diag)),
            r: Matrix2::from_diagonal(&Vector2::from(cfg.r_diag)),
        }
    }
}

/// Discrete rear-axle kinematics, Euler at `ts`.
pub fn ekf_transition(x: &Vector3<f64>, u: f64, delta: f64, ts: f64, wheelbase: f64) -> Vector3<f64> {
    Vector3::new(
        x[0] + ts * u * math::cos(x[2]),
        x[1] + ts * u * math::sin(x[2]),
        x[2] + ts * u * math::tan(delta) / wheelbase,
    )
}

/// Jacobian of [`ekf_transition`] with respect to the pose.
pub fn ekf_jacobian(x: &Vector3<f64>, u: f64, ts: f64) -> Matrix3<f64> {
    Matrix3::new(
        1.0, 0.0, -ts * u * math::sin(x[2]), //
        0.0, 1.0, ts * u * math::cos(x[2]), //
        0.0, 0.0, 1.0,
    )
}

/// Measurement matrix: GPS observes position only, never heading.
pub fn ekf_measurement_matrix() -> Matrix2x3<f64> {
    Matrix2x3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
}

/// Predict with the inputs of the last period, then update on position when
/// the fix is valid.
pub fn ekf_step(ekf: &EkfState, u: f64, delta: f64, ts: f64, wheelbase: f64, z: &GpsSample) -> EkfState {
    let f = ekf_jacobian(&ekf.x, u, ts);
    let mut x = ekf_transition(&ekf.x, u, delta, ts, wheelbase);
    let mut p = symmetrize(&(f * ekf.p * f.transpose() + ekf.q));
    if z.valid {
        let h = ekf_measurement_matrix();
        let s = h * p * h.transpose() + ekf.r;
        if let Some(s_inv) = s.try_inverse() {
            let k = p * h.transpose() * s_inv;
            x += k * (Vector2::new(z.x, z.y) - h * x);
            let i_kh = Matrix3::identity() - k * h;
            p = symmetrize(&(i_kh * p * i_kh.transpose() + k * ekf.r * k.transpose()));
        }
    }
    x[2] = wrap_angle(x[2]);
    EkfState {
        x,
        p,
        q: ekf.q,
        r: ekf.r,
    }
}
