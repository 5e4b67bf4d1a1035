#pragma once

#include "omloc/model.hpp"

#include <vector>

namespace omloc {

struct Evaluation {
    double objective = 0.0;
    // SA: theta, the min-distances sorted non-increasingly.
    // NI: facility 1's sorted weighted distances, then facility 2's, and so on (n entries each).
    std::vector<double> sorted_values;
    std::vector<int> assignment;   // SA only, 0-based facility per demand point
    std::vector<int> permutation;  // point index placed at each sorted position (per facility for NI)
};

// Stable sort of indices by value, largest first, ties by lowest index.
std::vector<int> sort_desc(const std::vector<double>& v);

Evaluation eval_ni(const std::vector<Point>& x, const Instance& inst);
Evaluation eval_sa(const std::vector<Point>& x, const Instance& inst);

// NI objective by exhaustive permutation enumeration per facility (n <= 8).
double eval_ni_by_permutations(const std::vector<Point>& x, const Instance& inst);

// Objective of a fixed assignment: t_i = ||x_{a(i)} - a_i||, sorted, weighted by lambda.
double eval_fixed_assignment(const std::vector<Point>& x, const std::vector<int>& assign, const Instance& inst);

struct BruteForceSettings {
    int grid_divisions = 50;   // initial step M / grid_divisions
    int refinements = 2;       // each divides the step by 5
    bool ellipsoid_polish = true;  // used when lambda is non-increasing (the restricted problem is convex)
    int ellipsoid_iterations_per_dim2 = 400;
};

struct BruteForceResult {
    Evaluation eval;
    std::vector<Point> x;
    long long assignments_tried = 0;
};

BruteForceResult brute_force_sa(const Instance& inst, const BruteForceSettings& settings = {});

struct DualCheck {
    double sorted_value = 0.0;
    double lp_value = 0.0;
};

DualCheck ordered_sum_dual_check(const std::vector<double>& u, const std::vector<double>& lambda);

}  // namespace omloc
