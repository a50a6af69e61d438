#pragma once

// Planar 3-DOF bicycle model with a linear tire and forward-Euler stepping.

namespace avsup {

/// Chassis and tire parameters. Defaults are the mid-size sedan used by the
/// reference scenario.
struct VehicleParams {
    double mass = 1470.0;                       // kg
    double yaw_inertia = 1900.0;                // kg m^2
    double dist_front_axle = 1.04;              // m, CG to front axle
    double dist_rear_axle = 1.56;               // m, CG to rear axle
    double cornering_stiffness_front = 71000.0; // N/rad
    double cornering_stiffness_rear = 47000.0;  // N/rad

    bool valid() const;
};

struct VehicleState {
    double x_world = 0.0;  // m
    double y_world = 0.0;  // m
    double yaw = 0.0;      // rad
    double vx_body = 0.0;  // m/s, never negative
    double vy_body = 0.0;  // m/s
    double yaw_rate = 0.0; // rad/s

    bool finite() const;
    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlCommand {
    double road_wheel_angle = 0.0; // rad
    double accel_long = 0.0;       // m/s^2
};

struct StateDerivative {
    double x_world = 0.0;
    double y_world = 0.0;
    double yaw = 0.0;
    double vx_body = 0.0;
    double vy_body = 0.0;
    double yaw_rate = 0.0;

    friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

struct SlipAngles {
    double front = 0.0; // rad
    double rear = 0.0;  // rad
};

struct TireForces {
    double front = 0.0; // N, lateral
    double rear = 0.0;  // N, lateral
};

/// Denominator floor for the slip-angle arctangents near standstill.
inline constexpr double kSlipSpeedFloor = 0.1;

/// Longitudinal command envelope accepted by the vehicle.
inline constexpr double kMaxBrakeAccel = -8.0;
inline constexpr double kMaxDriveAccel = 2.0;

SlipAngles slip_angles(const VehicleState& state, double road_wheel_angle,
                       const VehicleParams& params);

TireForces tire_forces(const SlipAngles& slip, const VehicleParams& params);

StateDerivative derivatives(const VehicleState& state, const ControlCommand& cmd,
                            const VehicleParams& params);

/// One explicit Euler step of length `dt`. Longitudinal speed is clamped at
/// zero so braking never reverses the vehicle.
VehicleState step_euler(const VehicleState& state, const ControlCommand& cmd, double dt,
                        const VehicleParams& params);

} // namespace avsup
