//! Noisy GPS on a constant-curvature drive: the speed Kalman filter and the
//! pose EKF against truth, with the heading the EKF infers from position
//! alone.
//!
//! ```text
//! cargo run --example estimators
//! ```

use nalgebra::{Matrix4, Vector3, Vector4};
use tractor_t2fnn::estimation::{
    ekf_step, kf_predict_update, kf_process_noise, wrap_angle, EkfConfig, EkfState, GpsConfig, GpsModel, KfRows,
    KfState,
};
use tractor_t2fnn::vehicle::{plant_step, RigidBodyState, TractorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // no drag, so the speed holds without a speed loop
    let params = TractorParams {
        longitudinal_drag: 0.0,
        ..Default::default()
    };
    let ts = 0.05;
    let delta = 0.15;
    let mut truth = RigidBodyState {
        u: 1.5,
        delta,
        ..Default::default()
    };
    let mut gps = GpsModel::new(GpsConfig::default(), 42)?;
    let first = gps.sample(0.0, &truth, &params);
    let mut kf = KfState::from_sample(&first, 4e-4, 4e-4);
    let qk = kf_process_noise(ts, 0.05);
    let rk = Matrix4::from_diagonal(&Vector4::new(4e-4, 4e-4, 4e-4, 4e-4));
    let (ax, ay) = truth.rear_axle(&params);
    let mut ekf = EkfState::new(Vector3::new(ax, ay, 0.3), &EkfConfig::default());

    for k in 1..=1200 {
        truth = plant_step(&truth, delta, 0.0, &params, ts)?;
        let z = gps.sample(k as f64 * ts, &truth, &params);
        kf = kf_predict_update(&kf, ts, &z, &qk, &rk, KfRows::PositionVelocity);
        ekf = ekf_step(&ekf, kf.speed(), delta, ts, params.wheelbase, &z);
        if k % 200 == 0 {
            let (ax, ay) = truth.rear_axle(&params);
            // speed of the rear axle point, which the GPS antenna sees
            let rear_speed = (truth.v - params.lr * truth.gamma).hypot(truth.u);
            println!(
                "t {:5.1}  speed {:.4} (kf {:.4})  pos err {:.4} m  heading err {:+.4} rad",
                k as f64 * ts,
                rear_speed,
                kf.speed(),
                (ekf.x[0] - ax).hypot(ekf.x[1] - ay),
                wrap_angle(ekf.x[2] - truth.psi)
            );
        }
    }
    Ok(())
}
