#include "avsup/riccati.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace avsup {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Matrix sign function by scaled Newton iteration. Returns the number of
// iterations, or -1 if the iterate became singular or failed to converge.
int matrix_sign(Eigen::MatrixXd& z, int max_iterations)
{
    const auto n = static_cast<double>(z.rows());
    bool scale = true;
    for (int it = 1; it <= max_iterations; ++it) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(z);
        const double det = lu.determinant();
        if (!std::isfinite(det) || det == 0.0) {
            return -1;
        }
        const double c = scale ? std::pow(std::abs(det), -1.0 / n) : 1.0;
        Eigen::MatrixXd next = 0.5 * (c * z + lu.inverse() / c);
        const double change = (next - z).lpNorm<1>();
        const double size = next.lpNorm<1>();
        z = std::move(next);
        if (!z.allFinite()) {
            return -1;
        }
        if (change <= 1e-2 * size) {
            scale = false; // quadratic phase, scaling only slows it down
        }
        if (change <= 1e-13 * size) {
            return it;
        }
    }
    return -1;
}

} // namespace

Eigen::MatrixXd care_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                              const Eigen::MatrixXd& p)
{
    const Eigen::MatrixXd g = b * r.ldlt().solve(b.transpose());
    return a.transpose() * p + p * a - p * g * p + q;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c)
{
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd at = a.transpose();
    // vec(A'X + XA) = (I (x) A' + A' (x) I) vec(X), column-major vec.
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            op.block(i * n, j * n, n, n) += eye(i, j) * at;
            op.block(i * n, j * n, n, n) += at(i, j) * eye;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
    if (!lu.isInvertible()) {
        throw std::runtime_error("Lyapunov operator is singular");
    }
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(c.data(), n * n);
    Eigen::VectorXd x = lu.solve(rhs);
    return Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& p, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& r)
{
    return r.ldlt().solve(b.transpose() * p);
}

double spectral_abscissa(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

CareResult solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                      const CareOptions& options)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
        r.rows() != b.cols() || r.cols() != b.cols()) {
        throw std::invalid_argument("solve_care: inconsistent matrix dimensions");
    }
    const double threshold = options.tolerance * std::max(1.0, q.norm());
    const Eigen::MatrixXd g = b * r.ldlt().solve(b.transpose());
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd hamiltonian(2 * n, 2 * n);
    hamiltonian << a, -g, -q, -a.transpose();

    CareResult result;
    Eigen::MatrixXd w = hamiltonian;
    result.sign_iterations = matrix_sign(w, options.max_sign_iterations);
    if (result.sign_iterations < 0) {
        throw RiccatiError("Hamiltonian sign iteration did not converge",
                           std::numeric_limits<double>::infinity());
    }

    // The stable invariant subspace [I; P] satisfies W [I; P] = -[I; P].
    Eigen::MatrixXd lhs(2 * n, n);
    lhs << w.topRightCorner(n, n), w.bottomRightCorner(n, n) + eye;
    Eigen::MatrixXd rhs(2 * n, n);
    rhs << -(w.topLeftCorner(n, n) + eye), -w.bottomLeftCorner(n, n);
    Eigen::MatrixXd p = symmetrized(lhs.colPivHouseholderQr().solve(rhs));

    double residual = care_residual(a, b, q, r, p).norm();
    for (int it = 0; it < options.max_newton_iterations; ++it) {
        if (residual <= 1e-3 * threshold) {
            break;
        }
        const Eigen::MatrixXd k = lqr_gain(p, b, r);
        const Eigen::MatrixXd closed = a - b * k;
        if (spectral_abscissa(closed) >= 0.0) {
            break;
        }
        Eigen::MatrixXd candidate;
        try {
            candidate = symmetrized(solve_lyapunov(closed, q + k.transpose() * r * k));
        } catch (const std::runtime_error&) {
            break;
        }
        const double candidate_residual = care_residual(a, b, q, r, candidate).norm();
        if (!(candidate_residual < residual)) {
            break;
        }
        p = std::move(candidate);
        residual = candidate_residual;
        ++result.newton_iterations;
    }

    if (!(residual <= threshold)) {
        throw RiccatiError("Riccati residual " + std::to_string(residual) +
                               " above tolerance " + std::to_string(threshold),
                           residual);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, p.norm())) {
        throw RiccatiError("Riccati solution is not positive semidefinite", residual);
    }

    result.solution = std::move(p);
    result.residual_norm = residual;
    return result;
}

} // namespace avsup
