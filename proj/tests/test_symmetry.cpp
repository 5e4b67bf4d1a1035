#include "omloc/symmetry.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace omloc;

namespace {

Partition P(std::vector<int> parts) { return Partition{std::move(parts)}; }

Polynomial Y(int v, int e = 1) { return Polynomial::monomial(Monomial::var(v, e)); }

std::vector<Monomial> monomials_upto(const std::vector<int>& vars, int deg) { return monomial_basis(vars, deg); }

Instance toy_p(int p) {
    std::vector<Point> a = {Point::Constant(1, 0.5)};
    return make_sa_instance(a, NormExponent(1, 1), p, Eigen::VectorXd::Ones(1));
}

}  // namespace

TEST(Partitions, EnumerationAndDominance) {
    EXPECT_EQ(partitions(2), (std::vector<Partition>{P({2}), P({1, 1})}));
    EXPECT_EQ(partitions(1), (std::vector<Partition>{P({1})}));
    const auto p4 = partitions(4);
    ASSERT_EQ(p4.size(), 5u);
    EXPECT_TRUE(dominates(P({4}), P({2, 2})));
    EXPECT_TRUE(dominates(P({2, 2}), P({1, 1, 1, 1})));
    EXPECT_TRUE(dominates(P({3, 1}), P({2, 2})));
    EXPECT_TRUE(dominates(P({2, 2}), P({2, 1, 1})));
    EXPECT_FALSE(dominates(P({2, 1, 1}), P({2, 2})));
    for (int p = 1; p <= 7; ++p) {
        EXPECT_EQ(static_cast<long long>(partitions(p).size()), static_cast<long long>(oracle::integer_partitions(p).size()));
        long long sum_sq = 0;
        for (const auto& l : partitions(p)) {
            EXPECT_EQ(standard_tableaux_count(l), oracle::dimension(l.parts));
            sum_sq += standard_tableaux_count(l) * standard_tableaux_count(l);
        }
        long long fact = 1;
        for (int k = 2; k <= p; ++k) fact *= k;
        EXPECT_EQ(sum_sq, fact);
    }
}

TEST(Content, OrderedByMultiplicity) {
    const Content c = content_of({4, 2, 2, 4, 7, 4});
    EXPECT_EQ(c.values, (std::vector<int>{4, 2, 7}));
    EXPECT_EQ(c.mu, P({3, 2, 1}));
    EXPECT_EQ(content_of({0, 0}).mu, P({2}));
    EXPECT_EQ(content_of({0, 0}).values, std::vector<int>{0});
    EXPECT_EQ(content_of({1, 0}).mu, P({1, 1}));
}

TEST(Tableaux, SmallListings) {
    auto a = semistandard_tableaux(P({2}), P({2}));
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].rows, (std::vector<std::vector<int>>{{1, 1}}));
    auto b = semistandard_tableaux(P({2}), P({1, 1}));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].rows, (std::vector<std::vector<int>>{{1, 2}}));
    EXPECT_TRUE(semistandard_tableaux(P({1, 1}), P({2})).empty());
    EXPECT_EQ(semistandard_tableaux(P({2, 1}), P({1, 1, 1})).size(), 2u);
    EXPECT_EQ(semistandard_tableaux(P({2, 1}), P({1, 1, 1}), TableauConvention::LiteralOrder).size(), 1u);
    for (int p = 1; p <= 5; ++p)
        for (const auto& l : partitions(p))
            EXPECT_EQ(static_cast<long long>(semistandard_tableaux(l, P(std::vector<int>(p, 1))).size()),
                      standard_tableaux_count(l));
}

TEST(Specht, TwoVariableExamples) {
    const Tableau triv{P({2}), {{1, 2}}};
    const SpechtPolynomial s = specht_polynomial(P({2}), triv, {1, 0});
    EXPECT_EQ(s.poly, Y(0) + Y(1));
    const Tableau sign{P({1, 1}), {{1}, {2}}};
    const SpechtPolynomial v = specht_polynomial(P({1, 1}), sign, {1, 0});
    EXPECT_TRUE(v.poly == Y(0) - Y(1) || v.poly == Y(1) - Y(0));
    const Tableau one{P({2}), {{1, 1}}};
    EXPECT_EQ(specht_polynomial(P({2}), one, {0, 0}).poly, Polynomial(1.0));
}

TEST(OneBlockBasis, P2K2AndCompleteness) {
    const auto b = sym_adapted_basis_1block(2, 2);
    std::vector<Polynomial> trivial;
    for (const auto& s : b)
        if (s.shape == P({2})) trivial.push_back(s.poly);
    ASSERT_EQ(trivial.size(), 4u);
    const std::set<std::string> want = {Polynomial(1.0).str(), (Y(0) + Y(1)).str(), (Y(0, 2) + Y(1, 2)).str(),
                                        (Y(0) * Y(1)).str()};
    std::set<std::string> got;
    for (const auto& q : trivial) got.insert(q.str());
    EXPECT_EQ(got, want);
    for (int p = 1; p <= 4; ++p)
        for (int k = 0; k <= 3; ++k) {
            long long total = 0;
            for (const auto& s : sym_adapted_basis_1block(p, k)) {
                const long long f = standard_tableaux_count(s.shape);
                total += f;
                EXPECT_EQ(orbit_span_dimension(s.poly, p), f);
            }
            EXPECT_EQ(total, oracle::count_monomials(p, k)) << p << " " << k;
        }
    const auto p1 = sym_adapted_basis_1block(1, 3);
    EXPECT_EQ(p1.size(), 4u);
}

TEST(OneBlockBasis, MultiplicitiesMatchCharacterOracle) {
    for (int p = 2; p <= 4; ++p)
        for (int k = 0; k <= 3; ++k) {
            std::map<std::vector<int>, long long> got;
            for (const auto& s : sym_adapted_basis_1block(p, k)) ++got[s.shape.parts];
            auto want = oracle::isotypic_multiplicities(p, 1, 0, k);
            for (auto it = want.begin(); it != want.end();)
                it = it->second == 0 ? want.erase(it) : std::next(it);
            EXPECT_EQ(got, want) << p << " " << k;
        }
}

TEST(LSym, OrbitConstancyAndExamples) {
    for (int p = 2; p <= 3; ++p) {
        const SaLayout L(1, p, 1);
        MomentTable table;
        std::vector<int> vars(L.count());
        for (int v = 0; v < L.count(); ++v) vars[v] = v;
        for (const Monomial& m : monomials_upto(vars, 3)) {
            const int id = L_sym(table, m, L);
            EXPECT_EQ(L_sym(table, table.monomial(id), L), id);
            for (const auto& perm : all_permutations(p))
                EXPECT_EQ(L_sym(table, m.relabel(L.facility_action(perm)), L), id);
        }
    }
    const SaLayout L(1, 2, 1);
    MomentTable table;
    const Polynomial s = Polynomial::var(L.x(0, 0)) + Polynomial::var(L.x(1, 0));
    auto e = L_sym(table, s * s, L);
    std::map<Monomial, double> got;
    for (auto [id, c] : e) got[table.monomial(id)] += c;
    const Monomial sq = Monomial::var(L.x(0, 0), 2), cross = Monomial::var(L.x(0, 0)) * Monomial::var(L.x(1, 0));
    EXPECT_EQ(got, (std::map<Monomial, double>{{sq, 2.0}, {cross, 2.0}}));
    const Monomial free = Monomial::var(L.w(0, 0)) * Monomial::var(L.theta(0));
    EXPECT_EQ(table.monomial(L_sym(table, free, L)), free);
    const SaLayout L2(1, 2, 2);
    MomentTable t2;
    EXPECT_EQ(L_sym(t2, Monomial::var(L2.x(0, 0)) * Monomial::var(L2.x(1, 1)), L2),
              L_sym(t2, Monomial::var(L2.x(1, 0)) * Monomial::var(L2.x(0, 1)), L2));
}

TEST(PolynomialProgram, FamiliesAreInvariantUnderRelabeling) {
    for (int p = 2; p <= 3; ++p) {
        std::vector<Point> a = {Point{{1.0, 2.0}}, Point{{3.0, 0.5}}};
        const Instance inst = make_sa_instance(a, NormExponent(2, 1), p, Eigen::VectorXd::Ones(2));
        const SaPolynomialProgram pp = sa_polynomial_program(inst);
        std::map<std::string, std::set<std::string>> rows;
        std::vector<const PolyConstraint*> all;
        for (const auto* fam : {&pp.K, &pp.h, &pp.binary, &pp.domain})
            for (const auto& c : *fam) {
                rows[c.family].insert(c.g.str());
                all.push_back(&c);
            }
        for (const auto& perm : all_permutations(p)) {
            const auto act = pp.layout.facility_action(perm);
            EXPECT_EQ(pp.objective.relabel(act), pp.objective);
            for (const auto* c : all) EXPECT_TRUE(rows[c->family].count(c->g.relabel(act).str())) << c->family;
        }
    }
}

TEST(FullBasis, ReportCounts) {
    const SymBasisReport r = sym_adapted_basis_full(3, 2, 2, 2, false).report;
    EXPECT_EQ(r.standard_all, 1596);
    EXPECT_EQ(r.standard_symmetric, 861);
    EXPECT_EQ(r.symmetric_blocks, 2 + 2 * 3 + 4 * 3);
    EXPECT_EQ(r.free_vars, 9 + 6);
    EXPECT_EQ(r.product_total, r.standard_all);
    EXPECT_EQ(r.product_trivial, oracle::trivial_product_count(2, r.symmetric_blocks, r.free_vars, 2));
    long long dim = 0;
    for (size_t k = 0; k < r.isotypic_copies.size(); ++k) dim += r.isotypic_copies[k].second * r.isotypic_dims[k].second;
    EXPECT_EQ(dim, r.standard_all);

    const SymBasisFull small = sym_adapted_basis_full(2, 2, 1, 1);
    EXPECT_EQ(static_cast<long long>(small.elements.size()), 1 + SaLayout(2, 2, 1).count());
    for (const auto& e : small.elements) EXPECT_LE(e.degree, 1);

    for (int n = 1; n <= 3; ++n) {
        const SymBasisReport one = sym_adapted_basis_full(n, 1, 2, 2, false).report;
        EXPECT_EQ(one.product_trivial, one.standard_all);
    }
}

TEST(FullBasis, IsotypicCopiesMatchCharacterOracle) {
    for (int n = 1; n <= 4; ++n) {
        const SymBasisReport r = sym_adapted_basis_full(n, 2, 2, 2, false).report;
        const auto want = oracle::isotypic_multiplicities(2, r.symmetric_blocks, r.free_vars, 2);
        for (const auto& [shape, copies] : r.isotypic_copies) EXPECT_EQ(copies, want.at(shape.parts)) << n;
        EXPECT_EQ(r.product_trivial, oracle::trivial_product_count(2, r.symmetric_blocks, r.free_vars, 2));
    }
}

TEST(CountFormulas, PrintedValuesAndInconsistency) {
    const CountFormulas big = count_formulas(1000, false);
    EXPECT_EQ(big.difference, 6068043007LL);
    EXPECT_FALSE(big.consistent_as_polynomials);
    const CountFormulas zero = count_formulas(0, false);
    EXPECT_EQ(zero.sym_numerator, 68);
    EXPECT_EQ(zero.std_numerator, 30);
    EXPECT_DOUBLE_EQ(zero.sym_value, 34.0);
    EXPECT_DOUBLE_EQ(zero.std_value, 15.0);
    EXPECT_FALSE(zero.meaningful);
    const CountFormulas three = count_formulas(3);
    EXPECT_EQ(three.enumerated_std, 1596);
    EXPECT_EQ(three.enumerated_sym, sym_adapted_basis_full(3, 2, 2, 2, false).report.product_trivial);
    EXPECT_FALSE(three.note.empty());
}

TEST(SymRelaxation, SingleFacilityMatchesDense) {
    for (int r = 1; r <= 2; ++r) {
        const Instance inst = toy_p(1);
        const MomentRelaxation d = build_dense(inst, r), s = build_sym_relaxation(inst, r);
        std::ostringstream a, b;
        write_sdpa(d, a);
        write_sdpa(s, b);
        std::vector<int> sd, ss;
        for (const auto& blk : d.blocks) sd.push_back(blk.side());
        for (const auto& blk : s.blocks) ss.push_back(blk.side());
        std::sort(sd.begin(), sd.end());
        std::sort(ss.begin(), ss.end());
        EXPECT_EQ(sd, ss);
        EXPECT_EQ(d.table.size(), s.table.size());
        if (r == 1) EXPECT_EQ(a.str(), b.str());
    }
}

TEST(SymRelaxation, BlocksSplitTheDenseMomentMatrix) {
    const Instance inst = toy_p(2);
    const MomentRelaxation d = build_dense(inst, 1), s = build_sym_relaxation(inst, 1);
    int sym_moment = 0;
    for (const auto& b : s.blocks)
        if (b.is_moment()) sym_moment += b.side();
    EXPECT_EQ(sym_moment, d.largest_side());
    EXPECT_LT(s.table.size(), d.table.size());
    EXPECT_LT(s.largest_side(), d.largest_side());
}
