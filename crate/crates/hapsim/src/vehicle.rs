//! Planar single-track vehicle model with linear tires.
//!
//! Lateral velocity, yaw rate and yaw angle evolve at constant forward
//! speed; the steering angle is part of the state and moves at a commanded
//! steering rate, which is the control input seen by the trajectory
//! optimizer. Rear tire vertical loads follow from a quasi-static lateral
//! load transfer around the roll axis.

use thiserror::Error;

/// Largest integration step the RK4 scheme accepts, in seconds.
pub const MAX_STEP: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum VehicleError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("vehicle parameter {0} must be positive")]
    NonPositiveParam(&'static str),
    #[error("integration step {0} outside (0, {MAX_STEP}]")]
    BadStep(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct VehicleParams {
    /// Total mass [kg].
    pub mass: f64,
    /// Yaw moment of inertia [kg m²].
    pub yaw_inertia: f64,
    /// Distance from center of gravity to front axle [m].
    pub dist_front: f64,
    /// Distance from center of gravity to rear axle [m].
    pub dist_rear: f64,
    /// Front axle cornering stiffness [N/rad].
    pub stiffness_front: f64,
    /// Rear axle cornering stiffness [N/rad].
    pub stiffness_rear: f64,
    /// Center of gravity height above ground [m].
    pub cg_height: f64,
    /// Track width [m].
    pub track_width: f64,
    /// Constant forward speed [m/s].
    pub forward_speed: f64,
    /// Gravitational acceleration [m/s²].
    pub gravity: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 3000.0,
            yaw_inertia: 4500.0,
            dist_front: 1.6,
            dist_rear: 1.8,
            stiffness_front: 60_000.0,
            stiffness_rear: 60_000.0,
            cg_height: 0.9,
            track_width: 1.8,
            forward_speed: 6.7056,
            gravity: 9.81,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), VehicleError> {
        let fields = [
            (self.mass, "mass"),
            (self.yaw_inertia, "yaw_inertia"),
            (self.dist_front, "dist_front"),
            (self.dist_rear, "dist_rear"),
            (self.stiffness_front, "stiffness_front"),
            (self.stiffness_rear, "stiffness_rear"),
            (self.cg_height, "cg_height"),
            (self.track_width, "track_width"),
            (self.forward_speed, "forward_speed"),
            (self.gravity, "gravity"),
        ];
        for (value, name) in fields {
            if !value.is_finite() {
                return Err(VehicleError::NonFinite(name));
            }
            if value <= 0.0 {
                return Err(VehicleError::NonPositiveParam(name));
            }
        }
        Ok(())
    }

    pub fn wheelbase(&self) -> f64 {
        self.dist_front + self.dist_rear
    }

    /// Static vertical load carried by the rear axle [N].
    pub fn static_rear_axle_load(&self) -> f64 {
        self.mass * self.gravity * self.dist_front / self.wheelbase()
    }
}

/// Vehicle state in a world frame: x east, y north, yaw counterclockwise
/// from the x axis. Lateral velocity and yaw rate are body-frame quantities;
/// positive steering angle turns left.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub lateral_velocity: f64,
    pub yaw_rate: f64,
    pub steering_angle: f64,
}

impl VehicleState {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.yaw.is_finite()
            && self.lateral_velocity.is_finite()
            && self.yaw_rate.is_finite()
            && self.steering_angle.is_finite()
    }
}

/// Time derivative of [`VehicleState`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VehicleDerivative {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub lateral_velocity: f64,
    pub yaw_rate: f64,
    pub steering_angle: f64,
}

/// Rear tire vertical loads [N].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TireLoads {
    pub rear_left: f64,
    pub rear_right: f64,
}

fn axle_lateral_forces(state: &VehicleState, params: &VehicleParams) -> (f64, f64) {
    let u = params.forward_speed;
    let slip_front =
        (state.lateral_velocity + params.dist_front * state.yaw_rate) / u - state.steering_angle;
    let slip_rear = (state.lateral_velocity - params.dist_rear * state.yaw_rate) / u;
    (
        -params.stiffness_front * slip_front,
        -params.stiffness_rear * slip_rear,
    )
}

fn derivatives_unchecked(
    state: &VehicleState,
    steer_rate: f64,
    params: &VehicleParams,
) -> VehicleDerivative {
    let u = params.forward_speed;
    let (force_front, force_rear) = axle_lateral_forces(state, params);
    let (sin_yaw, cos_yaw) = state.yaw.sin_cos();
    VehicleDerivative {
        x: u * cos_yaw - state.lateral_velocity * sin_yaw,
        y: u * sin_yaw + state.lateral_velocity * cos_yaw,
        yaw: state.yaw_rate,
        lateral_velocity: (force_front + force_rear) / params.mass - u * state.yaw_rate,
        yaw_rate: (params.dist_front * force_front - params.dist_rear * force_rear)
            / params.yaw_inertia,
        steering_angle: steer_rate,
    }
}

/// State derivative under a constant steering rate.
pub fn derivatives(
    state: &VehicleState,
    steer_rate: f64,
    params: &VehicleParams,
) -> Result<VehicleDerivative, VehicleError> {
    params.validate()?;
    if !state.is_finite() {
        return Err(VehicleError::NonFinite("state"));
    }
    if !steer_rate.is_finite() {
        return Err(VehicleError::NonFinite("steer_rate"));
    }
    Ok(derivatives_unchecked(state, steer_rate, params))
}

fn add_scaled(state: &VehicleState, deriv: &VehicleDerivative, scale: f64) -> VehicleState {
    VehicleState {
        x: state.x + scale * deriv.x,
        y: state.y + scale * deriv.y,
        yaw: state.yaw + scale * deriv.yaw,
        lateral_velocity: state.lateral_velocity + scale * deriv.lateral_velocity,
        yaw_rate: state.yaw_rate + scale * deriv.yaw_rate,
        steering_angle: state.steering_angle + scale * deriv.steering_angle,
    }
}

pub(crate) fn step_unchecked(
    state: &VehicleState,
    steer_rate: f64,
    dt: f64,
    params: &VehicleParams,
) -> VehicleState {
    let k1 = derivatives_unchecked(state, steer_rate, params);
    let k2 = derivatives_unchecked(&add_scaled(state, &k1, 0.5 * dt), steer_rate, params);
    let k3 = derivatives_unchecked(&add_scaled(state, &k2, 0.5 * dt), steer_rate, params);
    let k4 = derivatives_unchecked(&add_scaled(state, &k3, dt), steer_rate, params);
    let sixth = dt / 6.0;
    VehicleState {
        x: state.x + sixth * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        y: state.y + sixth * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        yaw: state.yaw + sixth * (k1.yaw + 2.0 * k2.yaw + 2.0 * k3.yaw + k4.yaw),
        lateral_velocity: state.lateral_velocity
            + sixth
                * (k1.lateral_velocity
                    + 2.0 * k2.lateral_velocity
                    + 2.0 * k3.lateral_velocity
                    + k4.lateral_velocity),
        yaw_rate: state.yaw_rate
            + sixth * (k1.yaw_rate + 2.0 * k2.yaw_rate + 2.0 * k3.yaw_rate + k4.yaw_rate),
        steering_angle: state.steering_angle + dt * steer_rate,
    }
}

/// Advance the state by one RK4 step of length `dt` under a constant
/// steering rate. `dt` must lie in (0, [`MAX_STEP`]].
pub fn step(
    state: &VehicleState,
    steer_rate: f64,
    dt: f64,
    params: &VehicleParams,
) -> Result<VehicleState, VehicleError> {
    params.validate()?;
    if !state.is_finite() {
        return Err(VehicleError::NonFinite("state"));
    }
    if !steer_rate.is_finite() {
        return Err(VehicleError::NonFinite("steer_rate"));
    }
    if !dt.is_finite() || dt <= 0.0 || dt > MAX_STEP {
        return Err(VehicleError::BadStep(dt));
    }
    Ok(step_unchecked(state, steer_rate, dt, params))
}

/// Body-frame lateral acceleration v̇_y + u·r, i.e. the sum of tire lateral
/// forces over the mass.
pub fn lateral_acceleration(state: &VehicleState, params: &VehicleParams) -> f64 {
    let (force_front, force_rear) = axle_lateral_forces(state, params);
    (force_front + force_rear) / params.mass
}

/// Rear tire vertical loads under quasi-static lateral load transfer.
/// In a left turn (positive lateral acceleration) the left wheel unloads.
pub fn tire_vertical_loads(state: &VehicleState, params: &VehicleParams) -> TireLoads {
    let half_static = 0.5 * params.static_rear_axle_load();
    let rear_share = params.dist_front / params.wheelbase();
    let accel = lateral_acceleration(state, params);
    let transfer = params.mass * accel * params.cg_height / params.track_width * rear_share;
    TireLoads {
        rear_left: half_static - transfer,
        rear_right: half_static + transfer,
    }
}
