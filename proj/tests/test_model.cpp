#include "omloc/model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omloc;

TEST(NormExponent, ReducesToLowestTerms) {
    NormExponent e(14, 10);
    EXPECT_EQ(e.r(), 7);
    EXPECT_EQ(e.s(), 5);
    EXPECT_EQ(e.str(), "7/5");
}

TEST(NormExponent, ParsesFractionsAndDecimals) {
    EXPECT_EQ(NormExponent::parse("3/2"), NormExponent(3, 2));
    EXPECT_EQ(NormExponent::parse("1.5"), NormExponent(3, 2));
    EXPECT_EQ(NormExponent::parse("1.4"), NormExponent(7, 5));
    EXPECT_EQ(NormExponent::parse("2"), NormExponent(2, 1));
}

TEST(NormExponent, RejectsBadInput) {
    EXPECT_THROW(NormExponent::parse("abc"), std::invalid_argument);
    EXPECT_THROW(NormExponent::parse("1/2"), std::invalid_argument);
    EXPECT_THROW(NormExponent::parse("0.5"), std::invalid_argument);
    EXPECT_THROW(NormExponent::parse("1.23456789123"), std::invalid_argument);
    EXPECT_THROW(NormExponent(0, 1), std::invalid_argument);
}

TEST(NormTau, MatchesDirectFormula) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-5, 5);
    for (auto e : {NormExponent(1, 1), NormExponent(3, 2), NormExponent(2, 1), NormExponent(7, 5), NormExponent(3, 1)}) {
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXd v(3);
            for (int k = 0; k < 3; ++k) v[k] = U(rng);
            EXPECT_NEAR(norm_tau(v, e), oracle::lp_norm(v, e.tau()), 1e-12 * (1 + v.norm()));
        }
    }
    EXPECT_EQ(norm_tau(Eigen::Vector2d(0, 0), NormExponent(7, 5)), 0.0);
    EXPECT_NEAR(norm_tau(Eigen::Vector2d(3, 4), NormExponent(2, 1)), 5.0, 1e-15);
}

TEST(Instance, BoundsAndUpperBounds) {
    std::vector<Point> pts = {Point{{1.0, 0.0}}, Point{{0.0, 3.0}}};
    Instance inst = make_sa_instance(pts, NormExponent(2, 1), 1, Eigen::VectorXd::Ones(2));
    EXPECT_DOUBLE_EQ(inst.M, 6.0);
    ASSERT_EQ(inst.UB.size(), 2u);
    EXPECT_DOUBLE_EQ(inst.UB[0], 7.0);
    EXPECT_DOUBLE_EQ(inst.UB[1], 9.0);
    EXPECT_TRUE(validate(inst).empty());
}

TEST(Instance, ValidationCatchesErrors) {
    std::vector<Point> pts = {Point{{1.0, 0.0}}, Point{{0.0, 3.0}}};
    Instance inst = make_sa_instance(pts, NormExponent(2, 1), 1, Eigen::VectorXd::Ones(2));
    inst.sa.lambda[1] = -1;
    EXPECT_FALSE(validate(inst).empty());
    inst.sa.lambda[1] = 1;
    inst.UB[0] = 0.5;
    EXPECT_FALSE(validate(inst).empty());
    EXPECT_THROW(make_sa_instance({}, NormExponent(2, 1), 1, Eigen::VectorXd()), std::invalid_argument);
    EXPECT_THROW(make_sa_instance(pts, NormExponent(2, 1), 1, Eigen::VectorXd::Ones(3)), std::invalid_argument);

    NIWeights w;
    w.omega = Eigen::VectorXd::Ones(2);
    w.lambda = Eigen::MatrixXd(2, 1);
    w.lambda << 1, 2;
    EXPECT_THROW(make_ni_instance(pts, NormExponent(2, 1), 1, w), std::invalid_argument);
    w.lambda << 2, 1;
    EXPECT_NO_THROW(make_ni_instance(pts, NormExponent(2, 1), 1, w));
}

TEST(Instance, LambdaPresets) {
    EXPECT_EQ(lambda_preset(LambdaKind::Median, 4).lambda, Eigen::VectorXd::Ones(4));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[0] = 1;
    EXPECT_EQ(lambda_preset(LambdaKind::Center, 4).lambda, c);
    Eigen::VectorXd k(4);
    k << 1, 1, 0, 0;
    EXPECT_EQ(lambda_preset(LambdaKind::KCentrum, 4, 2).lambda, k);
    EXPECT_THROW(lambda_preset(LambdaKind::KCentrum, 4, 5), std::invalid_argument);
}

TEST(VariableCounts, FamilySumAndStatedForms) {
    for (int n = 1; n <= 6; ++n)
        for (int p = 1; p <= 4; ++p)
            for (int d = 1; d <= 3; ++d) {
                const auto c = sa_variable_counts(n, p, d);
                EXPECT_EQ(c.actual, c.formula_np_plus_m);
                EXPECT_EQ(c.actual - c.symmetric, static_cast<long long>(n) * (n + 2));
            }
}
