#include <doctest.h>

#include "mmse/lp.hpp"

using namespace mmse;

TEST_CASE("small LP optimum")
{
    // minimize -x - 2y  s.t.  x + y + s1 = 4,  x + 3y + s2 = 6
    Eigen::MatrixXd a(2, 4);
    a << 1, 1, 1, 0,
         1, 3, 0, 1;
    Eigen::VectorXd b(2), c(4);
    b << 4, 6;
    c << -1, -2, 0, 0;
    const lp::Result r = lp::solve(a, b, c);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.objective == doctest::Approx(-5.0));
    CHECK(r.x[0] == doctest::Approx(3.0));
    CHECK(r.x[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded programs")
{
    Eigen::MatrixXd a(2, 1);
    a << 1, 1;
    Eigen::VectorXd b(2), c(1);
    b << 1, 2;
    c << 0;
    CHECK(lp::solve(a, b, c).status == lp::Status::infeasible);

    Eigen::MatrixXd u(1, 2);
    u << 1, -1;
    Eigen::VectorXd ub(1), uc(2);
    ub << 0;
    uc << -1, 0;
    CHECK(lp::solve(u, ub, uc).status == lp::Status::unbounded);
}

TEST_CASE("negative right-hand sides are handled")
{
    Eigen::MatrixXd a(1, 2);
    a << -1, -1;
    Eigen::VectorXd b(1), c(2);
    b << -3;
    c << 1, 2;
    const lp::Result r = lp::solve(a, b, c);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.objective == doctest::Approx(3.0));
}

TEST_CASE("degenerate cycling example terminates")
{
    // Beale's classic cycling instance; Bland's rule must terminate.
    Eigen::MatrixXd a(3, 7);
    a << 0.25, -8, -1, 9, 1, 0, 0,
         0.5, -12, -0.5, 3, 0, 1, 0,
         0, 0, 1, 0, 0, 0, 1;
    Eigen::VectorXd b(3), c(7);
    b << 0, 0, 1;
    c << -0.75, 20, -0.5, 6, 0, 0, 0;
    const lp::Result r = lp::solve(a, b, c);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(r.objective == doctest::Approx(-1.25));
}

TEST_CASE("convex hull membership")
{
    const std::vector<std::vector<double>> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    const std::vector<double> inside{0.3, 0.6}, edge{1.0, 0.5}, outside{1.2, 0.5};
    const auto in = lp::convex_hull_membership(square, inside);
    CHECK(in.member);
    double sx = 0.0, sw = 0.0;
    for (std::size_t k = 0; k < square.size(); ++k) {
        sx += in.weights[k] * square[k][0];
        sw += in.weights[k];
    }
    CHECK(sx == doctest::Approx(0.3));
    CHECK(sw == doctest::Approx(1.0));
    CHECK(lp::convex_hull_membership(square, edge).member);
    const auto out = lp::convex_hull_membership(square, outside);
    CHECK_FALSE(out.member);
    CHECK(out.residual == doctest::Approx(0.2));
}

TEST_CASE("hull of a single point")
{
    const std::vector<std::vector<double>> pt{{2.0, -1.0}};
    const std::vector<double> same{2.0, -1.0}, other{2.0, -1.0 + 1e-6};
    CHECK(lp::convex_hull_membership(pt, same).member);
    CHECK_FALSE(lp::convex_hull_membership(pt, other).member);
}
