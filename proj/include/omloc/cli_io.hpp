#pragma once

#include "omloc/branch_and_bound.hpp"
#include "omloc/model.hpp"
#include "omloc/moment_hierarchy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace omloc {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, int line, const std::string& message);
    const std::string& field() const { return field_; }
    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::string field_;
    std::string message_;
    int line_ = 0;
};

struct ProblemSettings {
    double tol = 1e-7;
    double gap = 1e-4;
    double time_limit = 600.0;
    int workers = 1;
    unsigned seed = 1;
    int ala_starts = 4;

    bool operator==(const ProblemSettings&) const = default;
};

struct ProblemFile {
    std::string points_path;    // CSV file; empty when the points are inline
    std::string dataset;        // "eilon-watson" selects the embedded set
    std::vector<int> subset;    // 0-based indices into the dataset, empty for all
    std::vector<Point> points;  // resolved coordinates
    Variant variant = Variant::SingleAllocation;
    std::string tau = "2";      // as written, "r/s" or decimal
    int p = 1;
    std::string lambda_preset;  // median | center | kcentrum:k, empty when explicit
    Eigen::VectorXd lambda;     // SA weights
    Eigen::MatrixXd lambda_ni;  // NI weights, n x p
    Eigen::VectorXd omega;
    Eigen::MatrixXd mu;
    ProblemSettings settings;

    bool operator==(const ProblemFile& o) const;
};

// Points CSV: header "x1,...,xd", one point per line.
std::vector<Point> parse_points_csv(const std::string& text);
std::string print_points_csv(const std::vector<Point>& points);

NormExponent parse_tau(const std::string& text);

// base_dir resolves relative points paths.
ProblemFile parse_problem(const std::string& text, const std::string& base_dir = "");
ProblemFile load_problem(const std::string& path);
std::string print_problem(const ProblemFile& problem);
Instance to_instance(const ProblemFile& problem);

// The 50 planar demand points of the benchmark set.
const std::vector<Point>& benchmark_points();
std::uint64_t points_checksum(const std::vector<Point>& points);
extern const std::uint64_t kBenchmarkChecksum;

struct SolveReport {
    Variant variant = Variant::SingleAllocation;
    std::string status = "optimal";
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    long long nodes = 0;
    double seconds = 0.0;
    std::vector<Point> facilities;
    std::vector<int> assignment;  // SA only
    std::vector<Point> points;
};

SolveReport solve_problem(const ProblemFile& problem, std::ostream* log = nullptr);
std::string report_json(const SolveReport& report, bool include_time = true);
SolveReport parse_report(const std::string& text);
std::string report_text(const SolveReport& report);

// Demand points as circles, facilities as triangles, assignments as dashed segments, viewport [0,10]^2 plus 5%.
std::string render_svg(const std::vector<Point>& points, const std::vector<Point>& facilities,
                       const std::vector<int>& assignment);

enum class RelaxationMode { Dense, Sparse, Sym };
RelaxationMode parse_relaxation_mode(const std::string& text);

struct EmitSummary {
    std::vector<int> block_sides;
    int moment_blocks = 0;
    int variables = 0;  // SDPA m
    int r0 = 0;
    std::string line() const;
};
// Throws std::invalid_argument naming r0 when r < r0.
EmitSummary emit_sdp(const Instance& inst, int r, RelaxationMode mode, std::ostream& out,
                     const HierarchyOptions& opt = {});

struct CountBasisReport {
    int n = 0, p = 0, d = 0, k = 0;
    long long variables = 0;
    long long standard = 0;                 // C(nv + k, k)
    long long standard_symmetric = 0;       // C(N p + k, k)
    std::vector<long long> sparse_sides;    // C(|I~(q)| + k, k) per index set
    bool enumerated = false;
    long long product_total = 0;
    long long product_trivial = 0;
    long long invariant_dimension = 0;      // number of orbits
    long long reference_claim = 392;
    double formula_sym = 0.0, formula_std = 0.0;
    long long formula_difference = 0;
    bool formulas_consistent = false;
    std::string note;
    std::string text() const;
};
CountBasisReport count_basis(int n, int p, int d, int k, long long budget = 2000000);

struct BenchCell {
    std::string kind;  // median | center | kcentrum:k
    int p = 2;
    std::string tau;
    double reference_value = 0.0;  // 0 when no reference value exists
    std::vector<Point> reference_facilities;
    std::string label() const;
};

// Reference cells of the 50-point results table.
std::vector<BenchCell> table3_cells();

struct BenchRow {
    BenchCell cell;
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    bool closed = false;
    bool time_limit = false;
    double rel_diff = 0.0;
    bool within = true;
    double seconds = 0.0;
    std::vector<Point> facilities;
};

struct BenchOptions {
    std::string preset = "table3";
    int subset = 50;
    std::vector<int> p_list;
    std::vector<std::string> tau_list;
    std::vector<std::string> kinds;
    double rel_tol = 0.01;
    bool deterministic = true;
    ProblemSettings settings;
    std::ostream* log = nullptr;
};

std::vector<BenchRow> run_bench(const BenchOptions& options);
std::string bench_table(const std::vector<BenchRow>& rows, bool include_time);

SAWeights parse_lambda_preset(const std::string& preset, int n);

}  // namespace omloc
