#include "omloc/conic_solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omloc;

namespace {

Eigen::VectorXd random_vector(std::mt19937& rng, int n) {
    std::normal_distribution<double> N(0.0, 2.0);
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = N(rng);
    return v;
}

// Packed lower triangle, column-major, with off-diagonals scaled by sqrt(2).
Eigen::MatrixXd unpack(const Eigen::VectorXd& v, int m) {
    Eigen::MatrixXd S(m, m);
    int k = 0;
    for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i, ++k) S(i, j) = S(j, i) = i == j ? v[k] : v[k] / std::sqrt(2.0);
    return S;
}

bool in_cone(const Eigen::VectorXd& v, const Cone& c, double tol) {
    switch (c.type) {
    case Cone::Type::Zero: return v.norm() <= tol;
    case Cone::Type::Nonneg: return v.minCoeff() >= -tol;
    case Cone::Type::SOC: return v.tail(v.size() - 1).norm() <= v[0] + tol;
    case Cone::Type::PSD: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(unpack(v, c.size));
        return es.eigenvalues().minCoeff() >= -tol;
    }
    }
    return false;
}

}  // namespace

TEST(Projection, MoreauDecompositionAllCones) {
    std::mt19937 rng(9);
    const std::vector<Cone> cones = {{Cone::Type::Zero, 4}, {Cone::Type::Nonneg, 5}, {Cone::Type::SOC, 4},
                                     {Cone::Type::SOC, 1}, {Cone::Type::PSD, 3},     {Cone::Type::PSD, 1}};
    for (const Cone& c : cones)
        for (int t = 0; t < 200; ++t) {
            const Eigen::VectorXd v = random_vector(rng, c.dim());
            const Eigen::VectorXd pk = project_cone(v, c);
            const Eigen::VectorXd polar = -project_dual_cone(-v, c);
            EXPECT_LE((pk + polar - v).norm(), 1e-10 * (1 + v.norm()));
            EXPECT_LE(std::abs(pk.dot(polar)), 1e-10 * (1 + v.squaredNorm()));
            EXPECT_TRUE(in_cone(pk, c, 1e-10));
            EXPECT_LE((project_cone(pk, c) - pk).norm(), 1e-10 * (1 + v.norm()));
        }
}

TEST(Solve, SmallLinearProgram) {
    ConicProgram p;
    auto x = p.add_var("x", "", 0.0);
    auto y = p.add_var("y", "", 0.0);
    p.add_row({{x.index, 1.0}, {y.index, 2.0}}, Sense::Ge, 4.0, "c1");
    p.add_row({{x.index, 3.0}, {y.index, 1.0}}, Sense::Ge, 6.0, "c2");
    p.set_objective(AffExpr::var(x.index).add(y.index, 1.0));
    const Solution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, 2.8, 1e-6);
    EXPECT_NEAR(s.x[x.index], 1.6, 1e-5);
    EXPECT_LE(p.max_violation(s.x), 1e-6);
    const Residuals r = certify(s, to_standard_form(p));
    EXPECT_LE(r.primal, 1e-6);
    EXPECT_LE(r.dual, 1e-6);
    EXPECT_LE(r.gap, 1e-6);
}

TEST(Solve, SecondOrderCone) {
    ConicProgram p;
    auto x = p.add_var("x");
    auto y = p.add_var("y");
    auto t = p.add_var("t");
    ConeBlock c;
    c.kind = ConeKind::SOC;
    c.entries = {AffExpr::var(t.index), AffExpr::var(x.index) - AffExpr(3.0), AffExpr::var(y.index) - AffExpr(4.0)};
    p.add_cone(c);
    p.add_row({{x.index, 1.0}, {y.index, 1.0}}, Sense::Le, 0.0, "half");
    p.set_objective(AffExpr::var(t.index));
    const Solution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, 7.0 / std::sqrt(2.0), 1e-6);
}

TEST(Solve, SemidefiniteMinimumEigenvalue) {
    Eigen::Matrix3d A;
    A << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    ConicProgram p;
    auto t = p.add_var("t");
    ConeBlock c;
    c.kind = ConeKind::PSD;
    c.psd_side = 3;
    for (int j = 0; j < 3; ++j)
        for (int i = j; i < 3; ++i) {
            AffExpr e(A(i, j));
            if (i == j) e.add(t.index, -1.0);
            c.entries.push_back(e);
        }
    p.add_cone(c);
    p.set_objective(AffExpr::var(t.index, -1.0));
    const Solution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(-s.objective, 2.0 - std::sqrt(2.0), 1e-6);
}

TEST(Solve, DetectsInfeasibleAndUnbounded) {
    {
        ConicProgram p;
        auto x = p.add_var("x");
        p.add_row({{x.index, 1.0}}, Sense::Ge, 1.0, "a");
        p.add_row({{x.index, 1.0}}, Sense::Le, 0.0, "b");
        p.set_objective(AffExpr::var(x.index));
        EXPECT_EQ(solve(p).status, SolveStatus::PrimalInfeasible);
    }
    {
        ConicProgram p;
        auto x = p.add_var("x");
        p.add_row({{x.index, 1.0}}, Sense::Le, 1.0, "a");
        p.set_objective(AffExpr::var(x.index));
        EXPECT_EQ(solve(p).status, SolveStatus::DualInfeasible);
    }
}

TEST(Solve, BinariesAreRelaxed) {
    ConicProgram p;
    auto b = p.add_var("b", "", 0.0, 1.0);
    p.mark_binary(b.index);
    p.add_row({{b.index, 1.0}}, Sense::Ge, 0.3, "a");
    p.set_objective(AffExpr::var(b.index));
    const Solution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, 0.3, 1e-6);
}
