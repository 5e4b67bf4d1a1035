#pragma once

#include "omloc/conic_solver.hpp"
#include "omloc/model.hpp"
#include "omloc/polynomial.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace omloc {

// Indeterminates of the single-allocation polynomial program, laid out as
// x (p*d), z (n*p), u (n*p), v (n*p*d), zeta (n*p*d), w (n*n), t (n), theta (n).
struct SaLayout {
    int n = 0, p = 0, d = 0;

    SaLayout() = default;
    SaLayout(int n_, int p_, int d_) : n(n_), p(p_), d(d_) {}

    int x(int j, int k) const { return j * d + k; }
    int z(int i, int j) const { return p * d + i * p + j; }
    int u(int i, int j) const { return p * d + n * p + i * p + j; }
    int v(int i, int j, int k) const { return p * d + 2 * n * p + (i * p + j) * d + k; }
    int zeta(int i, int j, int k) const { return p * d + 2 * n * p + n * p * d + (i * p + j) * d + k; }
    int w(int i, int l) const { return p * d + 2 * n * p + 2 * n * p * d + i * n + l; }
    int t(int i) const { return p * d + 2 * n * p + 2 * n * p * d + n * n + i; }
    int theta(int l) const { return p * d + 2 * n * p + 2 * n * p * d + n * n + n + l; }
    int count() const { return p * d + 2 * n * p + 2 * n * p * d + n * n + 2 * n; }

    std::vector<std::string> names() const;
    // Image of every variable under the facility relabeling j -> perm[j].
    std::vector<int> facility_action(const std::vector<int>& perm) const;
    // Facility index of a variable, -1 for w, t, theta.
    int facility_of(int var) const;
};

struct PolyConstraint {
    Polynomial g;       // g >= 0, or g = 0 when equality
    bool equality = false;
    std::string family;
    int group = 0;      // sparse group: 0 for F(0), j for F(j), p+l for F(p+l)
};

struct SaPolynomialProgram {
    SaLayout layout;
    Polynomial objective;                 // sum_l lambda_l theta_l
    std::vector<PolyConstraint> K;        // x_j in K
    std::vector<PolyConstraint> h;        // h^1..h^10
    std::vector<PolyConstraint> binary;   // w^2 - w = 0, z^2 - z = 0
    std::vector<PolyConstraint> domain;   // var (B - var) >= 0 for the nonnegative continuous families
    double M_K = 0.0;
    int nc1() const;
};

// K is the Euclidean ball of radius M_K = M d^max(0, 1/2 - 1/tau), which contains the tau-ball of radius M.
SaPolynomialProgram sa_polynomial_program(const Instance& inst);

class MomentTable {
public:
    MomentTable();
    int intern(const Monomial& m);
    int find(const Monomial& m) const;  // -1 if absent
    const Monomial& monomial(int id) const { return by_id_[id]; }
    int size() const { return static_cast<int>(by_id_.size()); }
    // Renumber ids in graded order; returns old -> new.
    std::vector<int> canonicalize();

private:
    std::unordered_map<Monomial, int, MonomialHash> ids_;
    std::vector<Monomial> by_id_;
};

struct MomentMatrixBlock {
    std::string name;
    std::vector<Monomial> basis;
    std::vector<Polynomial> poly_basis;  // used instead of basis by symmetry-adapted blocks
    Polynomial generator;  // 1 for moment blocks
    int group = 0;
    // Lower triangle, column-major; entry e spans [offsets[e], offsets[e+1]) of ids/coefs.
    std::vector<int> offsets;
    std::vector<int> ids;
    std::vector<double> coefs;

    int side() const { return static_cast<int>(poly_basis.empty() ? basis.size() : poly_basis.size()); }
    bool is_moment() const;
    int entry_index(int row, int col) const;
    std::vector<std::pair<int, double>> entry(int row, int col) const;
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

MomentMatrixBlock moment_matrix(MomentTable& table, const std::vector<int>& vars, int r);
// Basis degree r - ceil(deg g / 2); throws std::invalid_argument when deg g > 2r.
MomentMatrixBlock localizing_matrix(MomentTable& table, const Polynomial& g, const std::vector<int>& vars, int r);

struct LinearEquality {
    std::vector<std::pair<int, double>> terms;  // sum coef * y_id = rhs
    double rhs = 0.0;
    std::string family;
};

enum class EqualityMode {
    Scalar,  // L_y(h) = 0 only
    Ideal    // L_y(h m) = 0 for every multiplier monomial m of a block containing h
};

struct HierarchyOptions {
    EqualityMode equalities = EqualityMode::Ideal;
    bool domain_blocks = true;
    int workers = 1;
};

struct MomentRelaxation {
    MomentTable table;
    std::vector<MomentMatrixBlock> blocks;
    std::vector<LinearEquality> equalities;  // includes y_0 = 1
    std::vector<std::pair<int, double>> objective;
    int order = 0;
    int r0 = 0;
    std::vector<std::vector<int>> groups;  // variable sets of the moment blocks
    std::vector<std::string> var_names;

    int num_moment_blocks() const;
    int largest_side() const;
    // Ids not referenced by any block or equality.
    std::vector<int> orphan_ids() const;
};

int relaxation_r0(const SaPolynomialProgram& prog);

MomentRelaxation build_dense(const Instance& inst, int r, const HierarchyOptions& opt = {});
MomentRelaxation build_sparse(const Instance& inst, int r, const HierarchyOptions& opt = {});

// Index sets I~(0), I~(1..p), I~(p+1..p+n); I^t is added to every I~(p+l).
std::vector<std::vector<int>> sparse_index_sets(const SaLayout& layout);

struct RipReport {
    bool holds = true;
    int first_violation = -1;  // 1-based position in the block list
    std::vector<int> offending;
};
RipReport verify_rip(const std::vector<std::vector<int>>& blocks, const std::vector<int>& core);

struct FlatnessReport {
    int rank_r = 0;
    int rank_low = 0;
    bool flat = false;
    int phi = 0;
    Eigen::VectorXd singular_values;
};
// Compares rank M_r(y) with rank M_{r-r0}(y) over vars; y is indexed by table ids.
FlatnessReport check_rank_condition(const MomentTable& table, const Eigen::VectorXd& y, const std::vector<int>& vars,
                                    int r, int r0, double rank_tol = 1e-6);
// y_alpha = x^alpha for every id of the table.
Eigen::VectorXd dirac_moments(const MomentTable& table, const Eigen::VectorXd& point);

struct RelaxationSolve {
    SolveStatus status = SolveStatus::NumericalFailure;
    double value = 0.0;
    Eigen::VectorXd y;
    int iterations = 0;
    double seconds = 0.0;
};
ConicProgram to_conic_program(const MomentRelaxation& rel);
RelaxationSolve solve_relaxation(const MomentRelaxation& rel, const SolverSettings& settings = {});

// SDPA sparse format with y_0 substituted by 1; equalities become paired inequalities in one diagonal block.
void write_sdpa(const MomentRelaxation& rel, std::ostream& os);

}  // namespace omloc
