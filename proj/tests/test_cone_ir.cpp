#include "omloc/cone_ir.hpp"
#include "omloc/conic_solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omloc;

TEST(AffExpr, ArithmeticAndEvaluation) {
    AffExpr a = AffExpr::var(0, 2.0);
    a.constant = 1.0;
    AffExpr b = AffExpr::var(1, -1.0);
    AffExpr c = 3.0 * (a - b) + AffExpr(0.5);
    Eigen::VectorXd x(2);
    x << 2.0, 5.0;
    EXPECT_DOUBLE_EQ(a.eval(x), 5.0);
    EXPECT_DOUBLE_EQ(c.eval(x), 3.0 * (5.0 + 5.0) + 0.5);
}

TEST(ConicProgram, NamesBoundsAndValidation) {
    ConicProgram p;
    auto x = p.add_var("x", "loc", -1.0, 1.0);
    EXPECT_EQ(p.find("x"), x.index);
    EXPECT_EQ(p.find("nope"), -1);
    EXPECT_THROW(p.add_var("x"), std::invalid_argument);
    ConeBlock bad;
    bad.kind = ConeKind::PSD;
    bad.psd_side = 2;
    bad.entries = {AffExpr(1.0), AffExpr(0.0)};
    EXPECT_THROW(p.add_cone(bad), std::invalid_argument);
    Eigen::VectorXd v(1);
    v << 2.0;
    EXPECT_DOUBLE_EQ(p.max_violation(v), 1.0);
}

TEST(AbsValue, TwoRowsBoundAbsoluteValue) {
    ConicProgram p;
    auto x = p.add_var("x");
    auto y = add_abs_value(p, AffExpr::var(x.index), 2.0, "y");
    EXPECT_EQ(p.rows().size(), 2u);
    Eigen::VectorXd v(2);
    v << -1.0, 3.0;
    EXPECT_LE(p.max_violation(v), 0.0);
    v[y.index] = 2.5;
    EXPECT_NEAR(p.max_violation(v), 0.5, 1e-15);
}

TEST(PowerTower, BlockCounts) {
    for (auto [r, s] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 2}, {7, 5}, {5, 3}, {3, 1}, {8, 3}}) {
        auto t = support::make_tower(r, s);
        int l = 0;
        while ((1 << l) < r) ++l;
        EXPECT_EQ(t.tower.raw_blocks, (1 << l) - 1);
        EXPECT_LE(t.tower.cone_blocks, t.tower.raw_blocks);
        EXPECT_EQ(static_cast<int>(t.tower.aux_vars.size()) + (r == s ? 0 : 1), t.tower.cone_blocks);
    }
    EXPECT_THROW(support::make_tower(1, 2), std::invalid_argument);
}

TEST(PowerTower, AgreesWithScalarInequality) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(0.0, 4.0);
    for (auto [r, s] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 2}, {7, 5}, {5, 3}}) {
        auto t = support::make_tower(r, s);
        int disagreements = 0;
        for (int k = 0; k < 2000; ++k) {
            const double y = U(rng), z = U(rng), u = U(rng);
            const bool scalar = oracle::power_margin(y, z, u, r, s) >= -1e-9;
            const bool tower = support::tower_violation(t, y, z, u) <= 1e-9;
            if (scalar != tower) ++disagreements;
        }
        EXPECT_EQ(disagreements, 0) << r << "/" << s;
    }
}

TEST(PowerTower, TightAtTheBoundary) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.1, 4.0);
    for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {7, 5}, {5, 3}}) {
        auto t = support::make_tower(r, s);
        for (int k = 0; k < 200; ++k) {
            const double z = U(rng), u = U(rng);
            const double ystar = oracle::power_margin(0.0, z, u, r, s);
            EXPECT_LE(support::tower_violation(t, ystar * (1 - 1e-6), z, u), 1e-12);
            EXPECT_GT(support::tower_violation(t, ystar * (1 + 1e-6), z, u), 1e-12);
        }
    }
}

TEST(PowerTower, ConicSolveReachesGeometricMean) {
    for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {7, 5}, {5, 3}}) {
        auto t = support::make_tower(r, s);
        t.prog.add_row({{t.zeta.index, 1.0}}, Sense::Eq, 2.0, "fix");
        t.prog.add_row({{t.u.index, 1.0}}, Sense::Eq, 3.0, "fix");
        t.prog.set_objective(AffExpr::var(t.y.index, -1.0));
        const Solution sol = solve(t.prog);
        ASSERT_EQ(sol.status, SolveStatus::Optimal);
        EXPECT_NEAR(-sol.objective, oracle::power_margin(0.0, 2.0, 3.0, r, s), 1e-5);
    }
}

TEST(NormEpigraph, MinimalEpigraphIsTheNorm) {
    for (auto [r, s] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {2, 1}, {7, 5}, {3, 1}}) {
        ConicProgram p;
        Eigen::Vector3d v(1.5, -2.0, 0.5);
        std::vector<AffExpr> e;
        for (int k = 0; k < 3; ++k) e.push_back(AffExpr(v[k]));
        auto ne = add_norm_epigraph(p, e, 2.0, r, s, "n");
        p.set_objective(AffExpr::var(ne.u.index));
        const Solution sol = solve(p);
        ASSERT_EQ(sol.status, SolveStatus::Optimal);
        EXPECT_NEAR(sol.objective, 2.0 * oracle::lp_norm(v, static_cast<double>(r) / s), 1e-5);
    }
}

TEST(StandardForm, DimensionsMatchTheProgram) {
    ConicProgram p;
    auto x = p.add_var("x", "", 0.0, 1.0);
    auto y = p.add_var("y");
    p.add_row({{x.index, 1.0}, {y.index, 1.0}}, Sense::Eq, 1.0, "eq");
    p.add_row({{y.index, 1.0}}, Sense::Le, 4.0, "le");
    ConeBlock soc;
    soc.kind = ConeKind::SOC;
    soc.entries = {AffExpr(2.0), AffExpr::var(x.index), AffExpr::var(y.index)};
    p.add_cone(soc);
    ConeBlock psd;
    psd.kind = ConeKind::PSD;
    psd.psd_side = 2;
    psd.entries = {AffExpr::var(x.index), AffExpr(0.0), AffExpr::var(y.index)};
    p.add_cone(psd);
    const StandardForm sf = to_standard_form(p);
    EXPECT_EQ(sf.A.rows(), sf.b.size());
    EXPECT_EQ(sf.A.cols(), 2);
    EXPECT_EQ(sf.cones.total(), sf.A.rows());
    EXPECT_EQ(sf.cones.zero, 1);
    EXPECT_EQ(psd_packed_size(2), 3);
    EXPECT_EQ(psd_packed_size(5), 15);
}
