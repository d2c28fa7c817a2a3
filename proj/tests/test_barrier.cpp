#include "pasim/barrier.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pasim::convex;

namespace
{

AffineForm affine(std::vector<int> idx, std::vector<double> coef, double offset)
{
    return {std::move(idx), std::move(coef), offset};
}

ConvexProgram empty_program(int n)
{
    ConvexProgram prog;
    prog.n = n;
    prog.linear = Eigen::VectorXd::Zero(n);
    prog.eq_matrix.resize(0, n);
    prog.eq_rhs.resize(0);
    return prog;
}

} // namespace

TEST(Barrier, LinearProgramReachesVertex)
{
    // max x1 + x2 s.t. x >= 0, x1 + 2 x2 <= 4, 3 x1 + x2 <= 6: optimum (8/5, 6/5)
    auto prog = empty_program(2);
    prog.linear << -1.0, -1.0;
    prog.inequalities = {affine({0}, {1.0}, 0.0), affine({1}, {1.0}, 0.0), affine({0, 1}, {-1.0, -2.0}, 4.0),
                         affine({0, 1}, {-3.0, -1.0}, 6.0)};
    Eigen::VectorXd x0(2);
    x0 << 0.5, 0.5;
    const auto r = solve(prog, x0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.6, 1e-6);
    EXPECT_NEAR(r.x[1], 1.2, 1e-6);
    EXPECT_NEAR(r.objective, -2.8, 1e-7);
    EXPECT_LE(r.kkt_residual, 1e-6);
}

TEST(Barrier, AnalyticCenterOfUnitBox)
{
    auto prog = empty_program(2);
    prog.objective_logs = {affine({0}, {1.0}, 0.0), affine({0}, {-1.0}, 1.0), affine({1}, {1.0}, 0.0),
                           affine({1}, {-1.0}, 1.0)};
    Eigen::VectorXd x0(2);
    x0 << 0.1, 0.8;
    const auto r = solve(prog, x0);
    EXPECT_NEAR(r.x[0], 0.5, 1e-8);
    EXPECT_NEAR(r.x[1], 0.5, 1e-8);
    EXPECT_NEAR(r.objective, -4.0 * std::log(0.5), 1e-12);
}

TEST(Barrier, QuadraticCapObjective)
{
    // x - log(1 - x^2) is stationary where x^2 - 2x - 1 = 0
    auto prog = empty_program(1);
    prog.linear << 1.0;
    prog.objective_caps = {QuadraticCap{{0}, {{1.0}}, 1.0}};
    Eigen::VectorXd x0(1);
    x0 << 0.3;
    const auto r = solve(prog, x0);
    EXPECT_NEAR(r.x[0], 1.0 - std::sqrt(2.0), 1e-8);
}

TEST(Barrier, QuadraticCapConstraint)
{
    // min x1 + x2 on the unit disk: (-1/sqrt2, -1/sqrt2)
    auto prog = empty_program(2);
    prog.linear << 1.0, 1.0;
    prog.cap_constraints = {QuadraticCap{{0, 1}, {{1.0, 0.0}, {0.0, 1.0}}, 1.0}};
    const auto r = solve(prog, Eigen::VectorXd::Zero(2));
    EXPECT_NEAR(r.x[0], -std::sqrt(0.5), 1e-6);
    EXPECT_NEAR(r.x[1], -std::sqrt(0.5), 1e-6);
    EXPECT_NEAR(r.objective, -std::sqrt(2.0), 1e-8);
}

TEST(Barrier, EqualityConstrainedSimplex)
{
    auto prog = empty_program(3);
    prog.linear << 1.0, 2.0, 3.0;
    prog.inequalities = {affine({0}, {1.0}, 0.0), affine({1}, {1.0}, 0.0), affine({2}, {1.0}, 0.0)};
    prog.eq_matrix = Eigen::MatrixXd::Ones(1, 3);
    prog.eq_rhs = Eigen::VectorXd::Ones(1);
    const auto r = solve(prog, Eigen::VectorXd::Constant(3, 1.0 / 3.0));
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
    EXPECT_NEAR(r.x.sum(), 1.0, 1e-12);
    EXPECT_LE(r.kkt_residual, 1e-6);
    EXPECT_NEAR(r.objective, 1.0, 1e-7);
}

TEST(Barrier, InfeasibleStartThrows)
{
    auto prog = empty_program(1);
    prog.inequalities = {affine({0}, {1.0}, 0.0)};
    Eigen::VectorXd x0(1);
    x0 << -0.5;
    EXPECT_THROW(solve(prog, x0), std::invalid_argument);
    x0 << 0.0;
    EXPECT_THROW(solve(prog, x0), std::invalid_argument);
    EXPECT_THROW(solve(prog, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST(Barrier, ResidualCertifiesSuboptimality)
{
    // same LP, compare objective gap against the reported certificate
    auto prog = empty_program(2);
    prog.linear << -1.0, -1.0;
    prog.inequalities = {affine({0}, {1.0}, 0.0), affine({1}, {1.0}, 0.0), affine({0, 1}, {-1.0, -2.0}, 4.0),
                         affine({0, 1}, {-3.0, -1.0}, 6.0)};
    Eigen::VectorXd x0(2);
    x0 << 0.2, 0.3;
    BarrierOptions loose;
    loose.gap_target = 1e-3;
    const auto r = solve(prog, x0, loose);
    EXPECT_LE(r.objective - (-2.8), r.kkt_residual + 1e-12);
    EXPECT_LE(r.kkt_residual, 1e-2);
}
