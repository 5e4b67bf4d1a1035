#pragma once

#include "omloc/cone_ir.hpp"
#include "omloc/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace omloc {

struct FormulationReport {
    int num_linear_rows = 0;
    int num_cone_blocks = 0;
    int num_binaries = 0;
    int num_vars = 0;
    std::map<std::string, std::vector<int>> family_rows;  // row indices per constraint family
    std::map<std::string, int> family_cones;
    // NI: (np + p^2)(2d + 1) + p^2 and the measured count of the families it covers.
    long long formula_linear_count = 0;
    long long measured_linear_count = 0;
    // SA: nc1 = n^2 + 4n + np(3d + 2) - 1 and the measured number of non-K constraints.
    long long declared_nc1 = 0;
    long long measured_nc1 = 0;

    std::string audit() const;
};

struct NiProgram {
    ConicProgram prog;
    FormulationReport report;
    std::vector<std::vector<int>> x;  // [j][k]
    std::vector<std::vector<int>> u;  // [i][j]
};

NiProgram build_ni(const Instance& inst);

enum class OrderingMode {
    Permutation,  // w binaries with theta (the MFOMP rows)
    SortingDual   // LP dual of the sorting assignment, lambda must be non-increasing
};

struct SaOptions {
    OrderingMode ordering = OrderingMode::Permutation;
    bool symmetry_breaking = true;
    bool aggregate_zero_lambda = true;  // drop w columns of trailing zero weights
};

// Node data imposed by branch and bound.  Empty vectors mean "no restriction".
struct SaRestriction {
    std::vector<Eigen::VectorXd> box_lo, box_hi;  // per facility
    std::vector<std::vector<signed char>> z_fixed;  // [i][j] in {-1, 0, 1}
    std::vector<std::vector<signed char>> w_fixed;  // [i][l]
    std::vector<double> t_lower;                    // valid lower bounds on t_i
    bool drop_inactive = true;  // omit the distance system of (i,j) when z_ij is fixed to 0
};

struct SaProgram {
    ConicProgram prog;
    FormulationReport report;
    OrderingMode ordering = OrderingMode::Permutation;
    int w_cols = 0;                   // positions kept in Permutation mode
    std::vector<std::vector<int>> x;  // [j][k]
    std::vector<std::vector<int>> z;  // [i][j], -1 when dropped
    std::vector<std::vector<int>> u;  // [i][j], -1 when dropped
    std::vector<std::vector<int>> w;  // [i][l]
    std::vector<int> t, theta;
    std::vector<int> dual_v, dual_w;  // SortingDual mode
    std::vector<int> group_of_position;
};

SaProgram build_sa(const Instance& inst, const SaOptions& opt = {}, const SaRestriction* node = nullptr);

// Groups of equal consecutive lambda values: start index of each group.
std::vector<int> lambda_groups(const Eigen::VectorXd& lambda);
// Index of the last positive weight (-1 if none).
int last_positive(const Eigen::VectorXd& lambda);

struct SlaterCheck {
    Eigen::VectorXd point;
    double min_slack = 0.0;  // over inequality rows, cones and finite bounds of non-binary variables
    double max_equality_residual = 0.0;
    std::string worst_family;
};

// literal = true uses the printed NI construction unchanged (v = 1), which is not always interior.
SlaterCheck slater_witness(const Instance& inst, bool literal = false);
SlaterCheck slater_witness_sa(const Instance& inst, const SaProgram& sp);
SlaterCheck slater_check(const ConicProgram& prog, const Eigen::VectorXd& point);

}  // namespace omloc
