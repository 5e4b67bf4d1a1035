#pragma once

#include "omloc/cone_ir.hpp"
#include "omloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace support {

inline std::vector<omloc::Point> random_points(std::mt19937& rng, int n, int d, double lo = 0, double hi = 10) {
    std::uniform_real_distribution<double> U(lo, hi);
    std::vector<omloc::Point> out;
    for (int i = 0; i < n; ++i) {
        omloc::Point a(d);
        for (int k = 0; k < d; ++k) a[k] = U(rng);
        out.push_back(a);
    }
    return out;
}

inline Eigen::VectorXd random_sorted_weights(std::mt19937& rng, int n, double hi = 3) {
    std::uniform_real_distribution<double> U(0, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    std::sort(v.begin(), v.end(), std::greater<double>());
    return Eigen::Map<Eigen::VectorXd>(v.data(), n);
}

struct TowerProbe {
    omloc::ConicProgram prog;
    omloc::VarHandle y, zeta, u;
    omloc::PowerTower tower;
};

inline TowerProbe make_tower(int r, int s) {
    TowerProbe t;
    t.y = t.prog.add_var("y", "", 0.0);
    t.zeta = t.prog.add_var("zeta", "", 0.0);
    t.u = t.prog.add_var("u", "", 0.0);
    t.tower = omloc::add_rational_power(t.prog, t.y, t.zeta, t.u, r, s, "pw");
    return t;
}

// Feasibility of the tower at (y, zeta, u): every auxiliary takes its largest admissible value, the geometric
// mean of its two inputs, which can only help the cones above it.  Returns the largest violation.
inline double tower_violation(const TowerProbe& t, double y, double zeta, double u) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(t.prog.num_vars());
    x[t.y.index] = y;
    x[t.zeta.index] = zeta;
    x[t.u.index] = u;
    const std::set<int> aux(t.tower.aux_vars.begin(), t.tower.aux_vars.end());
    for (int ci : t.tower.cone_indices) {
        const auto& cb = t.prog.cones()[ci];
        const double a = 2.0 * cb.entries[0].eval(x), b = cb.entries[1].eval(x);
        const int w = cb.entries[2].terms.front().var;
        if (aux.count(w)) x[w] = std::sqrt(std::max(0.0, a * b));
    }
    return t.prog.max_violation(x);
}

}  // namespace support
