#pragma once

#include "avsup/dynamics.hpp"
#include "avsup/riccati.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace avsup {

/// Lowest speed at which the linearized lateral model is built.
inline constexpr double kMinModelSpeed = 0.5;
/// Below this speed the controller commands a straight wheel.
inline constexpr double kStandstillSpeed = 0.05;
/// Road-wheel angle saturation, rad.
inline constexpr double kSteerLimit = 0.5;
/// Default speed change that triggers a gain recomputation, m/s.
inline constexpr double kGainUpdateThreshold = 0.5;

/// Linearized lateral dynamics about straight driving at `built_at_speed`.
/// State ordering is [Y, vy, yaw, yaw_rate].
struct LinearLateralModel {
    Eigen::Matrix4d state_matrix = Eigen::Matrix4d::Zero();
    Eigen::Vector4d input_matrix = Eigen::Vector4d::Zero();
    double built_at_speed = 0.0;
};

struct LqrWeights {
    Eigen::Matrix4d state_cost = Eigen::Matrix4d::Zero();
    double input_cost = 1.0;

    /// Lateral tracking weights: Q = diag(0.5, 0.3, 0, 0.3), R = 5.
    static LqrWeights lateral_tracking();
    bool valid() const;
};

struct RiccatiSolution {
    Eigen::Matrix4d cost_matrix = Eigen::Matrix4d::Zero();
    double residual_norm = 0.0;
};

struct GainMatrix {
    Eigen::RowVector4d gains = Eigen::RowVector4d::Zero();
    double valid_at_speed = 0.0;
    /// Largest real part of eig(A - BK) at synthesis time.
    double closed_loop_abscissa = 0.0;

    friend bool operator==(const GainMatrix&, const GainMatrix&) = default;
};

class ModelSpeedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ClosedLoopError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Throws ModelSpeedError when `speed` < kMinModelSpeed.
LinearLateralModel build_linear_model(double speed, const VehicleParams& params);

/// Throws RiccatiError on failure.
RiccatiSolution solve_care(const LinearLateralModel& model, const LqrWeights& weights);

/// Throws ClosedLoopError if A - BK is not Hurwitz.
GainMatrix compute_gain(const RiccatiSolution& solution, const LinearLateralModel& model,
                        const LqrWeights& weights);

/// Builds the model, solves the Riccati equation and forms the gain in one go.
GainMatrix synthesize_gain(double speed, const VehicleParams& params, const LqrWeights& weights);

/// Re-synthesizes only when the speed moved by more than `threshold` since the
/// gain was built and the new speed is at least kMinModelSpeed.
GainMatrix maybe_update_gain(double current_speed, const GainMatrix& gain, double threshold,
                             const VehicleParams& params, const LqrWeights& weights);

/// Full-state feedback against [lateral_ref, 0, 0, 0], saturated to kSteerLimit.
double steering_command(const GainMatrix& gain, const VehicleState& state, double lateral_ref);

/// Speed-scheduled LQR steering loop. Owns the current gain.
class LateralController {
public:
    LateralController(const VehicleParams& params, const LqrWeights& weights,
                      double initial_speed, double update_threshold = kGainUpdateThreshold);

    double command(const VehicleState& state, double lateral_ref);

    const GainMatrix& gain() const { return gain_; }
    int synthesis_count() const { return synthesis_count_; }

private:
    VehicleParams params_;
    LqrWeights weights_;
    double threshold_;
    GainMatrix gain_;
    int synthesis_count_ = 1;
};

} // namespace avsup
