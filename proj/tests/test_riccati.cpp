#include "avsup/riccati.hpp"

#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace avsup;
using Eigen::MatrixXd;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

} // namespace

TEST_CASE("scalar CARE closed forms")
{
    SUBCASE("integrator, unit weights")
    {
        const CareResult r = solve_care(scalar(0.0), scalar(1.0), scalar(1.0), scalar(1.0));
        CHECK(r.solution(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("integrator, Q = 3")
    {
        const CareResult r = solve_care(scalar(0.0), scalar(1.0), scalar(3.0), scalar(1.0));
        CHECK(r.solution(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(lqr_gain(r.solution, scalar(1.0), scalar(1.0))(0, 0) ==
              doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("unstable pole")
    {
        // p^2 - 2p - 2 = 0
        const CareResult r = solve_care(scalar(1.0), scalar(1.0), scalar(2.0), scalar(1.0));
        CHECK(r.solution(0, 0) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("stable pole with scaled input")
    {
        // a=-1, b=2, q=3, r=4: p^2 + 2p - 3 = 0 -> p = 1
        const CareResult r = solve_care(scalar(-1.0), scalar(2.0), scalar(3.0), scalar(4.0));
        CHECK(r.solution(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("double integrator closed form")
{
    MatrixXd a(2, 2);
    a << 0, 1, 0, 0;
    MatrixXd b(2, 1);
    b << 0, 1;
    const MatrixXd q = MatrixXd::Identity(2, 2);
    const CareResult r = solve_care(a, b, q, scalar(1.0));
    MatrixXd expected(2, 2);
    const double s3 = std::sqrt(3.0);
    expected << s3, 1.0, 1.0, s3;
    CHECK((r.solution - expected).norm() < 1e-10);
}

TEST_CASE("lyapunov solve")
{
    MatrixXd a(2, 2);
    a << -1.0, 2.0, 0.0, -3.0;
    MatrixXd c(2, 2);
    c << 2.0, 0.5, 0.5, 1.0;
    const MatrixXd x = solve_lyapunov(a, c);
    CHECK((a.transpose() * x + x * a + c).norm() < 1e-12);
    CHECK((x - x.transpose()).norm() < 1e-12);
}

TEST_CASE("random stabilizable systems agree with the Riccati ODE")
{
    std::mt19937 rng(11);
    std::normal_distribution<double> n01(0.0, 1.0);
    int tested = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 3;
        MatrixXd a(n, n);
        MatrixXd b(n, 1);
        for (int i = 0; i < n; ++i) {
            b(i, 0) = n01(rng);
            for (int j = 0; j < n; ++j) {
                a(i, j) = 0.5 * n01(rng);
            }
        }
        MatrixXd l(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                l(i, j) = n01(rng);
            }
        }
        const MatrixXd q = l * l.transpose() + 0.1 * MatrixXd::Identity(n, n);
        const MatrixXd rr = scalar(0.5 + std::abs(n01(rng)));

        // Skip near-uncontrollable draws.
        MatrixXd ctrb(n, n);
        MatrixXd col = b;
        for (int i = 0; i < n; ++i) {
            ctrb.col(i) = col;
            col = a * col;
        }
        Eigen::JacobiSVD<MatrixXd> svd(ctrb);
        if (svd.singularValues()(n - 1) / svd.singularValues()(0) < 1e-3) {
            continue;
        }

        const CareResult r = solve_care(a, b, q, rr);
        const MatrixXd& p = r.solution;
        CHECK(care_residual(a, b, q, rr, p).norm() <= 1e-9 * std::max(1.0, q.norm()));
        CHECK((p - p.transpose()).norm() <= 1e-10);
        const MatrixXd k = lqr_gain(p, b, rr);
        CHECK(spectral_abscissa(a - b * k) < 0.0);

        const MatrixXd ode = testing::riccati_ode_steady_state(a, b, q, rr, 1e-2);
        CHECK((p - ode).cwiseAbs().maxCoeff() < 1e-6);
        ++tested;
    }
    CHECK(tested >= 8);
}

TEST_CASE("uncontrollable unstable system is rejected")
{
    MatrixXd a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    MatrixXd b(2, 1);
    b << 0.0, 1.0;
    CHECK_THROWS_AS(solve_care(a, b, MatrixXd::Identity(2, 2), scalar(1.0)), RiccatiError);
}

TEST_CASE("non-finite input is rejected")
{
    CHECK_THROWS(solve_care(scalar(std::nan("")), scalar(1.0), scalar(1.0), scalar(1.0)));
}
