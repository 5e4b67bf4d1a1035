#include "omloc/cli_io.hpp"
#include "omloc/moment_hierarchy.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace omloc;

namespace {

const std::string kData = OMLOC_TEST_DATA;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count(const std::string& s, const std::string& needle) {
    int c = 0;
    for (size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++c;
    return c;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

ProblemFile random_problem(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0, 10);
    std::uniform_int_distribution<int> I(0, 1000);
    ProblemFile pf;
    const int n = 2 + I(rng) % 6, d = 1 + I(rng) % 3;
    pf.p = 1 + I(rng) % 3;
    for (int i = 0; i < n; ++i) {
        Point q(d);
        for (int k = 0; k < d; ++k) q[k] = round2(U(rng));
        pf.points.push_back(q);
    }
    pf.tau = std::vector<std::string>{"1", "3/2", "2", "7/5", "1.5", "3"}[I(rng) % 6];
    pf.settings.tol = std::vector<double>{1e-6, 1e-7, 1e-8}[I(rng) % 3];
    pf.settings.gap = std::vector<double>{1e-4, 1e-3}[I(rng) % 2];
    pf.settings.time_limit = 10 + I(rng) % 600;
    pf.settings.workers = 1 + I(rng) % 4;
    pf.settings.seed = I(rng);
    pf.settings.ala_starts = 1 + I(rng) % 8;
    if (I(rng) % 2) {
        pf.variant = Variant::SingleAllocation;
        if (I(rng) % 2) {
            pf.lambda_preset = std::vector<std::string>{"median", "center"}[I(rng) % 2];
            pf.lambda = parse_lambda_preset(pf.lambda_preset, n).lambda;
        } else {
            pf.lambda = Eigen::VectorXd(n);
            for (int i = 0; i < n; ++i) pf.lambda[i] = I(rng) / 100.0;
        }
    } else {
        pf.variant = Variant::NonInterchangeable;
        pf.lambda_ni = Eigen::MatrixXd(n, pf.p);
        for (int j = 0; j < pf.p; ++j) {
            std::vector<double> col(n);
            for (auto& v : col) v = I(rng) / 100.0;
            std::sort(col.begin(), col.end(), std::greater<double>());
            for (int i = 0; i < n; ++i) pf.lambda_ni(i, j) = col[i];
        }
        pf.omega = Eigen::VectorXd(n);
        for (int i = 0; i < n; ++i) pf.omega[i] = I(rng) / 100.0;
        pf.mu = Eigen::MatrixXd::Zero(pf.p, pf.p);
        for (int j = 0; j < pf.p; ++j)
            for (int q = j + 1; q < pf.p; ++q) pf.mu(j, q) = I(rng) / 100.0;
    }
    return pf;
}

}  // namespace

TEST(ProblemFile, RoundTripsRandomProblems) {
    std::mt19937 rng(1);
    for (int t = 0; t < 100; ++t) {
        const ProblemFile pf = random_problem(rng);
        const std::string text = print_problem(pf);
        const ProblemFile back = parse_problem(text);
        EXPECT_TRUE(back == pf) << text;
        EXPECT_EQ(print_problem(back), text);
        EXPECT_NO_THROW(to_instance(back));
    }
}

TEST(ProblemFile, LoadsExampleFiles) {
    const ProblemFile ni = load_problem(kData + "/ni_example.json");
    EXPECT_EQ(ni.variant, Variant::NonInterchangeable);
    EXPECT_EQ(ni.points.size(), 4u);
    const ProblemFile sa = load_problem(kData + "/sa_example.json");
    EXPECT_EQ(sa.p, 3);
    EXPECT_EQ(sa.points.size(), 10u);
    EXPECT_EQ(to_instance(sa).norm, NormExponent(7, 5));
}

TEST(ProblemFile, ReportsErrorsWithField) {
    EXPECT_THROW(parse_problem("{"), ParseError);
    try {
        parse_problem(R"({"variant":"sa","points":[[0,0]],"tau":"1/2","p":1,"lambda":[1]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "tau");
    }
    try {
        parse_problem(R"({"variant":"sa","points":[[0,0],[1,1]],"tau":"2","p":1,"lambda":[1]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "lambda");
    }
}

TEST(PointsCsv, ParseAndErrors) {
    const auto pts = parse_points_csv("x1,x2\n1.5,2\n3,4.25\n");
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_DOUBLE_EQ(pts[1][1], 4.25);
    EXPECT_EQ(parse_points_csv(print_points_csv(pts)), pts);
    EXPECT_THROW(parse_points_csv(""), ParseError);
    EXPECT_THROW(parse_points_csv("x1,x2\n"), ParseError);
    try {
        parse_points_csv("x1,x2\n1,2\n3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_THROW(parse_points_csv("x1\nabc\n"), ParseError);
}

TEST(Tau, FractionsAndDecimals) {
    EXPECT_EQ(parse_tau("3/2"), NormExponent(3, 2));
    EXPECT_EQ(parse_tau("1.5"), NormExponent(3, 2));
    EXPECT_EQ(parse_tau("1.4"), NormExponent(7, 5));
    EXPECT_THROW(parse_tau("0.5"), ParseError);
    EXPECT_THROW(parse_tau("1.23456789123"), ParseError);
    EXPECT_THROW(parse_tau("x"), ParseError);
}

TEST(Dataset, FiftyPointsAndChecksum) {
    const auto& pts = benchmark_points();
    ASSERT_EQ(pts.size(), 50u);
    EXPECT_EQ(pts.front(), Point(Eigen::Vector2d(9.46, 9.36)));
    EXPECT_EQ(pts.back(), Point(Eigen::Vector2d(0.75, 4.98)));
    EXPECT_EQ(points_checksum(pts), kBenchmarkChecksum);
    auto moved = pts;
    moved[7][0] += 0.01;
    EXPECT_NE(points_checksum(moved), kBenchmarkChecksum);
}

TEST(Svg, ElementCounts) {
    SolveReport r;
    const ProblemFile sa = load_problem(kData + "/sa_example.json");
    r.points = sa.points;
    r.facilities = {Point(Eigen::Vector2d(8, 8)), Point(Eigen::Vector2d(6, 3)), Point(Eigen::Vector2d(2, 7))};
    r.assignment = {0, 1, 1, 0, 2, 1, 2, 2, 2, 2};
    const std::string svg = render_svg(r.points, r.facilities, r.assignment);
    EXPECT_EQ(count(svg, "<circle"), 10);
    EXPECT_EQ(count(svg, "class=\"facility\""), 3);
    EXPECT_EQ(count(svg, "class=\"edge\""), 10);
    EXPECT_EQ(svg, render_svg(r.points, r.facilities, r.assignment));

    const Point a(Eigen::Vector2d(3, 3));
    const std::string one = render_svg({a}, {a}, {0});
    EXPECT_EQ(count(one, "<circle"), 1);
    EXPECT_EQ(count(one, "class=\"facility\""), 1);
    EXPECT_EQ(count(one, "class=\"edge\""), 0);

    const std::string ni = render_svg(r.points, r.facilities, {});
    EXPECT_EQ(count(ni, "class=\"edge\""), 0);
}

TEST(Report, JsonRoundTrip) {
    SolveReport r;
    r.variant = Variant::SingleAllocation;
    r.objective = 12.5;
    r.bound = 12.25;
    r.gap = 0.02;
    r.nodes = 17;
    r.seconds = 1.5;
    r.points = {Point(Eigen::Vector2d(1, 2)), Point(Eigen::Vector2d(3, 4))};
    r.facilities = {Point(Eigen::Vector2d(2, 3))};
    r.assignment = {0, 0};
    const SolveReport back = parse_report(report_json(r));
    EXPECT_DOUBLE_EQ(back.objective, r.objective);
    EXPECT_EQ(back.assignment, r.assignment);
    EXPECT_EQ(back.facilities, r.facilities);
    EXPECT_EQ(back.points, r.points);
    EXPECT_EQ(report_json(r, false).find("seconds"), std::string::npos);
}

TEST(Solve, ExampleNiRuns) {
    const SolveReport r = solve_problem(load_problem(kData + "/ni_example.json"));
    EXPECT_EQ(r.status, "optimal");
    EXPECT_EQ(r.facilities.size(), 2u);
    EXPECT_TRUE(r.assignment.empty());
    EXPECT_FALSE(report_text(r).empty());
}

TEST(EmitSdp, GoldenToyFile) {
    const Instance inst = to_instance(load_problem(kData + "/toy.json"));
    std::ostringstream os;
    const EmitSummary s = emit_sdp(inst, 1, RelaxationMode::Dense, os);
    EXPECT_EQ(os.str(), slurp(kData + "/toy_r1_dense.dat-s"));
    EXPECT_EQ(s.moment_blocks, 1);
    EXPECT_EQ(s.r0, 1);
    std::ostringstream again;
    emit_sdp(inst, 1, RelaxationMode::Dense, again);
    EXPECT_EQ(again.str(), os.str());
}

TEST(EmitSdp, ModesAndErrors) {
    const Instance inst = to_instance(load_problem(kData + "/toy.json"));
    std::ostringstream a, b, c;
    const EmitSummary dense = emit_sdp(inst, 2, RelaxationMode::Dense, a);
    const EmitSummary sym = emit_sdp(inst, 2, RelaxationMode::Sym, b);
    auto sd = dense.block_sides, ss = sym.block_sides;
    std::sort(sd.begin(), sd.end());
    std::sort(ss.begin(), ss.end());
    EXPECT_EQ(sd, ss);
    const EmitSummary sparse = emit_sdp(inst, 2, RelaxationMode::Sparse, c);
    EXPECT_EQ(sparse.moment_blocks, 1 + 1 + 1);
    std::vector<Point> pts = {Point(Eigen::Vector2d(0, 0)), Point(Eigen::Vector2d(1, 2)), Point(Eigen::Vector2d(3, 1))};
    const Instance planar = make_sa_instance(pts, NormExponent(2, 1), 2, Eigen::VectorXd::Ones(3));
    std::ostringstream d;
    EXPECT_EQ(emit_sdp(planar, 1, RelaxationMode::Sparse, d).moment_blocks, 2 + 3 + 1);
    std::ostringstream e;
    try {
        emit_sdp(inst, 0, RelaxationMode::Dense, e);
        FAIL();
    } catch (const std::invalid_argument& ex) {
        EXPECT_NE(std::string(ex.what()).find("r0=1"), std::string::npos);
    }
    EXPECT_EQ(parse_relaxation_mode("sym"), RelaxationMode::Sym);
    EXPECT_THROW(parse_relaxation_mode("full"), ParseError);
}

TEST(CountBasis, ReferenceSizes) {
    const CountBasisReport r = count_basis(3, 2, 2, 2);
    EXPECT_EQ(r.standard_symmetric, 861);
    EXPECT_EQ(r.standard, 1596);
    EXPECT_EQ(r.sparse_sides.size(), 2u + 3u + 1u);
    EXPECT_TRUE(r.enumerated);
    EXPECT_FALSE(r.formulas_consistent);
    EXPECT_NE(r.text().find("392"), std::string::npos);
    const CountBasisReport one = count_basis(1, 1, 1, 1);
    EXPECT_EQ(one.standard, one.product_total);
    EXPECT_EQ(one.standard, one.product_trivial);
    EXPECT_EQ(one.standard, one.invariant_dimension);
    const CountBasisReport tiny = count_basis(4, 2, 2, 2, 10);
    EXPECT_FALSE(tiny.enumerated);
    EXPECT_NE(tiny.text().find("formula"), std::string::npos);
}

TEST(Bench, DeterministicTable) {
    BenchOptions o;
    o.subset = 8;
    o.p_list = {2};
    o.tau_list = {"2"};
    o.kinds = {"median", "center"};
    const std::string a = bench_table(run_bench(o), false), b = bench_table(run_bench(o), false);
    EXPECT_EQ(a, b);
    EXPECT_EQ(count(a, "\n"), 3);
    EXPECT_EQ(table3_cells().size(), 45u);
}
