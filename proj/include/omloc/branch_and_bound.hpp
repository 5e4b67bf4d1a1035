#pragma once

#include "omloc/conic_solver.hpp"
#include "omloc/formulations.hpp"
#include "omloc/model.hpp"
#include "omloc/oracle.hpp"

#include <iosfwd>
#include <vector>

namespace omloc {

struct Incumbent {
    std::vector<Point> x;
    std::vector<int> assignment;
    std::vector<int> permutation;
    double objective = kInf;
    Evaluation certificate;

    bool valid() const { return !x.empty(); }
};

enum class BranchMode {
    Spatial,  // facility boxes with allocation fixing by dominance and convex node bounds
    Binary    // conic relaxation of build_sa, branching on w then z
};

struct NodeRecord {
    long long id = 0;
    long long parent = -1;
    int depth = 0;
    double bound = 0.0;
};

struct BnbSettings {
    BranchMode mode = BranchMode::Spatial;
    double gap_tol = 1e-4;
    double time_limit = 600.0;  // seconds, soft
    long long max_nodes = 100000000;
    int threads = 1;            // 1 is the deterministic mode
    int plunge_every = 10;
    int ala_starts = 8;
    unsigned seed = 1;
    bool symmetry_breaking = true;
    bool record_paths = false;
    std::ostream* log = nullptr;
    double log_interval = 5.0;  // seconds between progress lines
    SaRestriction root;         // optional root fixings (z_fixed, w_fixed)
    SolverSettings conic;       // used by Binary mode and the location step of the heuristic
};

struct BnbStats {
    long long nodes = 0;
    long long pruned = 0;
    long long conic_solves = 0;
    int max_depth = 0;
    double root_bound = 0.0;
    double seconds = 0.0;
    bool time_limit_hit = false;
    bool node_limit_hit = false;
    std::vector<NodeRecord> records;
};

struct BnbResult {
    Incumbent incumbent;
    double best_bound = 0.0;
    double gap = 0.0;  // (incumbent - bound) / max(1, |incumbent|)
    BnbStats stats;
};

BnbResult solve_misocp(const Instance& inst, const BnbSettings& settings = {});

// Nearest-facility allocation, sorting and exact evaluation of any finite x.
Incumbent repair_heuristic(const std::vector<Point>& x, const Instance& inst);

// Multistart alternation between a conic location step for fixed allocation and exact re-allocation.
Incumbent alternate_location_allocation(const Instance& inst, int starts, unsigned seed = 1,
                                        const SolverSettings& conic = {}, int* conic_solves = nullptr);

// Bounds on ||y - a||_tau over the box [lo, hi].
double box_min_dist(const Point& a, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const NormExponent& e);
double box_max_dist(const Point& a, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const NormExponent& e);

// Lower bound of the ordered objective given per-point distance lower bounds (any lambda >= 0).
double ordered_lower_bound(std::vector<double> lb, const Eigen::VectorXd& lambda);

// True when every root-to-node path in the log has non-decreasing bounds up to tol.
bool bounds_monotone(const std::vector<NodeRecord>& records, double tol = 1e-6);

}  // namespace omloc
