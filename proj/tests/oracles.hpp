#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they are used to check.

#include <Eigen/Dense>

#include <cmath>

namespace avsup::testing {

/// Integrates the Riccati differential equation backward in time from a zero
/// terminal cost (forward in reversed time tau):
///   dP/dtau = A'P + PA - P B R^-1 B' P + Q,   P(0) = 0
/// with classic RK4 until dP/dtau is negligible. Returns the steady state.
inline Eigen::MatrixXd riccati_ode_steady_state(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                                double step = 1e-3, double max_time = 2000.0,
                                                double rate_tol = 1e-12)
{
    const Eigen::MatrixXd g = b * r.inverse() * b.transpose();
    auto rhs = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
        return a.transpose() * p + p * a - p * g * p + q;
    };
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (double tau = 0.0; tau < max_time; tau += step) {
        const Eigen::MatrixXd k1 = rhs(p);
        if (k1.norm() < rate_tol) {
            break;
        }
        const Eigen::MatrixXd k2 = rhs(p + 0.5 * step * k1);
        const Eigen::MatrixXd k3 = rhs(p + 0.5 * step * k2);
        const Eigen::MatrixXd k4 = rhs(p + step * k3);
        p += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        p = 0.5 * (p + p.transpose()).eval();
    }
    return p;
}

/// Steps the EGO (constant speed) and the pedestrian (constant crossing speed)
/// forward in small increments until the EGO reaches the crossing line, then
/// reports the fraction of the road the pedestrian has covered by then.
/// Linear interpolation inside the final step.
inline double brute_force_crossed_fraction(double ego_x, double ego_speed, double ped_x,
                                           double ped_y, double ped_speed, double road_min,
                                           double road_max, double step = 1e-3)
{
    double x = ego_x;
    double y = ped_y;
    const double v = ego_speed < 0.1 ? 0.1 : ego_speed;
    while (true) {
        const double next_x = x + v * step;
        if (next_x >= ped_x) {
            const double s = (ped_x - x) / (next_x - x);
            y += s * ped_speed * step;
            break;
        }
        x = next_x;
        y += ped_speed * step;
    }
    return (y - road_min) / (road_max - road_min);
}

} // namespace avsup::testing
