#include "omloc/moment_hierarchy.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

using namespace omloc;

namespace {

std::vector<int> iota(int v) {
    std::vector<int> out(v);
    for (int k = 0; k < v; ++k) out[k] = k;
    return out;
}

Instance toy(int n) {
    std::vector<Point> a = {Point::Constant(1, 0.2)};
    if (n == 2) a.push_back(Point::Constant(1, 0.8));
    return make_sa_instance(a, NormExponent(1, 1), 1, Eigen::VectorXd::Ones(n));
}

Instance planar(int n, int p, int d) {
    std::mt19937 rng(n * 100 + p * 10 + d);
    std::uniform_real_distribution<double> U(0, 10);
    std::vector<Point> a;
    for (int i = 0; i < n; ++i) {
        Point q(d);
        for (int k = 0; k < d; ++k) q[k] = U(rng);
        a.push_back(q);
    }
    return make_sa_instance(a, NormExponent(2, 1), p, Eigen::VectorXd::Ones(n));
}

double min_eig(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
}

}  // namespace

TEST(MomentMatrix, SideIsBinomialAndEntriesAreSums) {
    for (int v = 1; v <= 5; ++v)
        for (int r = 0; r <= 3; ++r) {
            MomentTable t;
            const MomentMatrixBlock b = moment_matrix(t, iota(v), r);
            EXPECT_EQ(b.side(), oracle::count_monomials(v, r));
            for (int i = 0; i < b.side(); ++i)
                for (int j = 0; j <= i; ++j) {
                    auto e = b.entry(i, j);
                    ASSERT_EQ(e.size(), 1u);
                    EXPECT_EQ(t.monomial(e[0].first), b.basis[i] * b.basis[j]);
                }
        }
    MomentTable t;
    EXPECT_EQ(moment_matrix(t, iota(40), 2).side(), 861);
}

TEST(LocalizingMatrix, SmallExamples) {
    MomentTable t;
    Polynomial g = Polynomial(1.0) - Polynomial::var(0).pow(2);
    const MomentMatrixBlock b = localizing_matrix(t, g, {0}, 1);
    ASSERT_EQ(b.side(), 1);
    std::set<std::pair<Monomial, double>> got;
    for (auto [id, c] : b.entry(0, 0)) got.insert({t.monomial(id), c});
    EXPECT_EQ(got, (std::set<std::pair<Monomial, double>>{{Monomial(), 1.0}, {Monomial::var(0, 2), -1.0}}));
    EXPECT_EQ(localizing_matrix(t, Polynomial::var(0), {0}, 1).side(), 1);
    EXPECT_EQ(localizing_matrix(t, Polynomial(1.0), {0, 1}, 2).side(), 6);
    EXPECT_THROW(localizing_matrix(t, Polynomial::var(0).pow(3), {0}, 1), std::invalid_argument);
}

TEST(DiracMoments, BlocksAreRankOneAndWeighted) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    MomentTable t;
    const MomentMatrixBlock m = moment_matrix(t, iota(3), 2);
    Polynomial g = Polynomial(2.0) - Polynomial::var(0) * Polynomial::var(1) + Polynomial::var(2, 0.5);
    const MomentMatrixBlock l = localizing_matrix(t, g, iota(3), 2);
    for (int s = 0; s < 20; ++s) {
        Eigen::Vector3d x(U(rng), U(rng), U(rng));
        const Eigen::VectorXd y = dirac_moments(t, x);
        Eigen::VectorXd v(m.side());
        for (int i = 0; i < m.side(); ++i) v[i] = m.basis[i].eval(x);
        EXPECT_LE((m.evaluate(y) - v * v.transpose()).norm(), 1e-12);
        Eigen::VectorXd w(l.side());
        for (int i = 0; i < l.side(); ++i) w[i] = l.basis[i].eval(x);
        EXPECT_LE((l.evaluate(y) - g.eval(x) * w * w.transpose()).norm(), 1e-12);
        const FlatnessReport f = check_rank_condition(t, y, iota(3), 2, 1);
        EXPECT_TRUE(f.flat);
        EXPECT_EQ(f.phi, 1);
    }
}

TEST(RankCondition, MixtureOfTwoPointsHasRankTwo) {
    MomentTable t;
    moment_matrix(t, iota(2), 2);
    const Eigen::VectorXd y = 0.5 * (dirac_moments(t, Eigen::Vector2d(0.3, -0.4)) +
                                     dirac_moments(t, Eigen::Vector2d(-0.7, 0.1)));
    const FlatnessReport f = check_rank_condition(t, y, iota(2), 2, 1);
    EXPECT_TRUE(f.flat);
    EXPECT_EQ(f.phi, 2);
}

TEST(Rip, ExamplesAndSparseFamilies) {
    EXPECT_FALSE(verify_rip({{1, 2}, {2, 3}, {1, 3}}, {2}).holds);
    EXPECT_EQ(verify_rip({{1, 2}, {2, 3}, {1, 3}}, {2}).first_violation, 3);
    EXPECT_TRUE(verify_rip({{1, 2, 3}}, {}).holds);
    for (int n = 1; n <= 10; ++n)
        for (int p = 1; p <= 4; ++p) {
            const auto sets = sparse_index_sets(SaLayout(n, p, 2));
            ASSERT_EQ(static_cast<int>(sets.size()), p + n + 1);
            EXPECT_TRUE(verify_rip(sets, sets[0]).holds);
            EXPECT_TRUE(oracle::running_intersection(sets));
            std::set<int> all;
            for (const auto& s : sets) all.insert(s.begin(), s.end());
            EXPECT_EQ(static_cast<int>(all.size()), SaLayout(n, p, 2).count());
        }
}

TEST(Builders, BlockStructure) {
    const Instance inst = planar(3, 2, 2);
    const SaLayout L(3, 2, 2);
    const MomentRelaxation dense = build_dense(inst, 2);
    const MomentRelaxation sparse = build_sparse(inst, 2);
    EXPECT_EQ(dense.num_moment_blocks(), 1);
    EXPECT_EQ(dense.largest_side(), oracle::count_monomials(L.count(), 2));
    EXPECT_EQ(sparse.num_moment_blocks(), 2 + 3 + 1);
    EXPECT_LT(sparse.largest_side(), dense.largest_side());
    EXPECT_TRUE(dense.orphan_ids().empty());
    EXPECT_TRUE(sparse.orphan_ids().empty());
    EXPECT_THROW(build_dense(inst, 0), std::invalid_argument);
    EXPECT_EQ(relaxation_r0(sa_polynomial_program(inst)), dense.r0);
}

TEST(Builders, PolynomialProgramIsSatisfiedByAnOptimalPoint) {
    // n=1, p=1: the facility at the demand point with every auxiliary at its natural value is feasible.
    const Instance inst = toy(1);
    const SaPolynomialProgram pp = sa_polynomial_program(inst);
    const MomentRelaxation rel = build_dense(inst, 2);
    const RelaxationSolve s = solve_relaxation(rel);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    Eigen::VectorXd x(pp.layout.count());
    for (int v = 0; v < x.size(); ++v) x[v] = s.y[rel.table.find(Monomial::var(v))];
    for (const auto* fam : {&pp.K, &pp.h, &pp.binary, &pp.domain})
        for (const PolyConstraint& c : *fam) {
            const double g = c.g.eval(x);
            if (c.equality)
                EXPECT_NEAR(g, 0.0, 1e-4) << c.family;
            else
                EXPECT_GE(g, -1e-4) << c.family;
        }
    EXPECT_NEAR(pp.objective.eval(x), 0.0, 1e-4);
}

TEST(ToySolve, MonotoneBoundedAndFlat) {
    const Instance inst = toy(1);
    const RelaxationSolve r1 = solve_relaxation(build_dense(inst, 1));
    const MomentRelaxation rel2 = build_dense(inst, 2);
    const RelaxationSolve r2 = solve_relaxation(rel2);
    ASSERT_EQ(r1.status, SolveStatus::Optimal);
    ASSERT_EQ(r2.status, SolveStatus::Optimal);
    EXPECT_LE(r1.value, r2.value + 1e-6);
    EXPECT_LE(r2.value, 1e-6);
    EXPECT_GE(r2.value, -1e-6);
    for (const auto& b : rel2.blocks) EXPECT_GE(min_eig(b.evaluate(r2.y)), -1e-5) << b.name;
    const FlatnessReport f = check_rank_condition(rel2.table, r2.y, iota(static_cast<int>(rel2.var_names.size())), 2, 1);
    EXPECT_TRUE(f.flat);
    EXPECT_EQ(f.phi, 1);
    const RelaxationSolve sp = solve_relaxation(build_sparse(inst, 2));
    ASSERT_EQ(sp.status, SolveStatus::Optimal);
    EXPECT_LE(sp.value, r2.value + 1e-6);
}

TEST(Sdpa, HeaderMatchesRelaxation) {
    const MomentRelaxation rel = build_dense(toy(1), 1);
    std::ostringstream os;
    write_sdpa(rel, os);
    std::istringstream in(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '*' && line[0] != '"') lines.push_back(line);
    ASSERT_GE(lines.size(), 4u);
    const int m = std::stoi(lines[0]), nb = std::stoi(lines[1]);
    EXPECT_EQ(m, rel.table.size() - 1);
    EXPECT_EQ(nb, static_cast<int>(rel.blocks.size()) + (rel.equalities.size() > 1 ? 1 : 0));
    std::istringstream obj(lines[3]);
    int count = 0;
    double c;
    while (obj >> c) ++count;
    EXPECT_EQ(count, m);
    for (size_t k = 4; k < lines.size(); ++k) {
        std::istringstream e(lines[k]);
        int mat, blk, i, j;
        double val;
        ASSERT_TRUE(e >> mat >> blk >> i >> j >> val) << lines[k];
        EXPECT_GE(mat, 0);
        EXPECT_LE(mat, m);
        EXPECT_GE(blk, 1);
        EXPECT_LE(blk, nb);
        EXPECT_LE(i, j);
    }
}
