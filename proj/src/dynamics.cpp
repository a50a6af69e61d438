#include "avsup/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace avsup {

bool VehicleParams::valid() const
{
    return mass > 0.0 && yaw_inertia > 0.0 && dist_front_axle > 0.0 && dist_rear_axle > 0.0 &&
           cornering_stiffness_front > 0.0 && cornering_stiffness_rear > 0.0;
}

bool VehicleState::finite() const
{
    return std::isfinite(x_world) && std::isfinite(y_world) && std::isfinite(yaw) &&
           std::isfinite(vx_body) && std::isfinite(vy_body) && std::isfinite(yaw_rate);
}

SlipAngles slip_angles(const VehicleState& state, double road_wheel_angle,
                       const VehicleParams& params)
{
    const double vx = std::max(state.vx_body, kSlipSpeedFloor);
    SlipAngles slip;
    slip.front = road_wheel_angle -
                 std::atan((state.vy_body + state.yaw_rate * params.dist_front_axle) / vx);
    slip.rear = -std::atan((state.vy_body - state.yaw_rate * params.dist_rear_axle) / vx);
    return slip;
}

TireForces tire_forces(const SlipAngles& slip, const VehicleParams& params)
{
    return {params.cornering_stiffness_front * slip.front,
            params.cornering_stiffness_rear * slip.rear};
}

StateDerivative derivatives(const VehicleState& state, const ControlCommand& cmd,
                            const VehicleParams& params)
{
    const double delta = cmd.road_wheel_angle;
    const TireForces force = tire_forces(slip_angles(state, delta, params), params);

    const double cos_yaw = std::cos(state.yaw);
    const double sin_yaw = std::sin(state.yaw);

    StateDerivative d;
    d.x_world = state.vx_body * cos_yaw - state.vy_body * sin_yaw;
    d.y_world = state.vx_body * sin_yaw + state.vy_body * cos_yaw;
    d.yaw = state.yaw_rate;
    d.vx_body = cmd.accel_long;
    d.vy_body = (force.front * std::cos(delta) + force.rear) / params.mass -
                state.yaw_rate * state.vx_body;
    d.yaw_rate = (params.dist_front_axle * force.front - params.dist_rear_axle * force.rear) /
                 params.yaw_inertia;
    return d;
}

VehicleState step_euler(const VehicleState& state, const ControlCommand& cmd, double dt,
                        const VehicleParams& params)
{
    const StateDerivative d = derivatives(state, cmd, params);
    VehicleState next;
    next.x_world = state.x_world + dt * d.x_world;
    next.y_world = state.y_world + dt * d.y_world;
    next.yaw = state.yaw + dt * d.yaw;
    next.vx_body = std::max(0.0, state.vx_body + dt * d.vx_body);
    next.vy_body = state.vy_body + dt * d.vy_body;
    next.yaw_rate = state.yaw_rate + dt * d.yaw_rate;
    return next;
}

} // namespace avsup
