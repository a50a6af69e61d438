#include "avsup/lateral_control.hpp"

#include <algorithm>
#include <cmath>

namespace avsup {

LqrWeights LqrWeights::lateral_tracking()
{
    LqrWeights w;
    w.state_cost.diagonal() << 0.5, 0.3, 0.0, 0.3;
    w.input_cost = 5.0;
    return w;
}

bool LqrWeights::valid() const
{
    if (!(input_cost > 0.0) || !state_cost.allFinite()) {
        return false;
    }
    if ((state_cost - state_cost.transpose()).norm() > 1e-12) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(state_cost, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-12;
}

LinearLateralModel build_linear_model(double speed, const VehicleParams& params)
{
    if (!(speed >= kMinModelSpeed)) {
        throw ModelSpeedError("lateral model requested below minimum speed");
    }
    const double m = params.mass;
    const double iz = params.yaw_inertia;
    const double lf = params.dist_front_axle;
    const double lr = params.dist_rear_axle;
    const double cf = params.cornering_stiffness_front;
    const double cr = params.cornering_stiffness_rear;

    LinearLateralModel model;
    model.built_at_speed = speed;
    // clang-format off
    model.state_matrix <<
        0.0, 1.0,                                 speed, 0.0,
        0.0, -(cf + cr) / (m * speed),            0.0,   -(cf * lf - cr * lr) / (m * speed) - speed,
        0.0, 0.0,                                 0.0,   1.0,
        0.0, -(cf * lf - cr * lr) / (iz * speed), 0.0,   -(cf * lf * lf + cr * lr * lr) / (iz * speed);
    // clang-format on
    model.input_matrix << 0.0, cf / m, 0.0, lf * cf / iz;
    return model;
}

RiccatiSolution solve_care(const LinearLateralModel& model, const LqrWeights& weights)
{
    const Eigen::MatrixXd r = Eigen::MatrixXd::Constant(1, 1, weights.input_cost);
    const CareResult care =
        solve_care(model.state_matrix, model.input_matrix, weights.state_cost, r);
    RiccatiSolution sol;
    sol.cost_matrix = care.solution;
    sol.residual_norm = care.residual_norm;
    return sol;
}

GainMatrix compute_gain(const RiccatiSolution& solution, const LinearLateralModel& model,
                        const LqrWeights& weights)
{
    GainMatrix gain;
    gain.gains = model.input_matrix.transpose() * solution.cost_matrix / weights.input_cost;
    gain.valid_at_speed = model.built_at_speed;
    const Eigen::Matrix4d closed = model.state_matrix - model.input_matrix * gain.gains;
    gain.closed_loop_abscissa = spectral_abscissa(closed);
    if (!(gain.closed_loop_abscissa < 0.0)) {
        throw ClosedLoopError("LQR closed loop is not Hurwitz");
    }
    return gain;
}

GainMatrix synthesize_gain(double speed, const VehicleParams& params, const LqrWeights& weights)
{
    const LinearLateralModel model = build_linear_model(speed, params);
    return compute_gain(solve_care(model, weights), model, weights);
}

GainMatrix maybe_update_gain(double current_speed, const GainMatrix& gain, double threshold,
                             const VehicleParams& params, const LqrWeights& weights)
{
    if (std::abs(current_speed - gain.valid_at_speed) > threshold &&
        current_speed >= kMinModelSpeed) {
        return synthesize_gain(current_speed, params, weights);
    }
    return gain;
}

double steering_command(const GainMatrix& gain, const VehicleState& state, double lateral_ref)
{
    if (state.vx_body < kStandstillSpeed) {
        return 0.0;
    }
    const Eigen::Vector4d error(state.y_world - lateral_ref, state.vy_body, state.yaw,
                                state.yaw_rate);
    const double delta = -gain.gains.dot(error);
    return std::clamp(delta, -kSteerLimit, kSteerLimit);
}

LateralController::LateralController(const VehicleParams& params, const LqrWeights& weights,
                                     double initial_speed, double update_threshold)
    : params_(params),
      weights_(weights),
      threshold_(update_threshold),
      gain_(synthesize_gain(std::max(initial_speed, kMinModelSpeed), params, weights))
{
}

double LateralController::command(const VehicleState& state, double lateral_ref)
{
    GainMatrix next = maybe_update_gain(state.vx_body, gain_, threshold_, params_, weights_);
    if (next.valid_at_speed != gain_.valid_at_speed) {
        ++synthesis_count_;
        gain_ = next;
    }
    return steering_command(gain_, state, lateral_ref);
}

} // namespace avsup
