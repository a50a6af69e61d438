#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace avsup {

/**
 * Continuous algebraic Riccati equation
 *
 *     A'P + PA - P B R^-1 B' P + Q = 0
 *
 * The stabilizing solution is obtained with the matrix sign function of the
 * Hamiltonian and then polished with Newton-Kleinman iterations, each of which
 * is a Lyapunov solve. Lyapunov equations are solved through the Kronecker
 * form, which is fine for the small state dimensions used here (n <= 8).
 */
struct CareOptions {
    /// Accept when ||residual||_F <= tolerance * max(1, ||Q||_F).
    double tolerance = 1e-9;
    int max_sign_iterations = 100;
    int max_newton_iterations = 30;
};

struct CareResult {
    Eigen::MatrixXd solution;
    double residual_norm = 0.0;
    int sign_iterations = 0;
    int newton_iterations = 0;
};

class RiccatiError : public std::runtime_error {
public:
    RiccatiError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

Eigen::MatrixXd care_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                              const Eigen::MatrixXd& p);

/// Throws RiccatiError when no stabilizing solution meeting the tolerance is found.
CareResult solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                      const CareOptions& options = {});

/// Solves A'X + XA + C = 0. Throws std::runtime_error if the operator is singular.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

/// K = R^-1 B' P
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& p, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& r);

/// Largest real part over the eigenvalues of `m`.
double spectral_abscissa(const Eigen::MatrixXd& m);

} // namespace avsup
