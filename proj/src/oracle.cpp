#include "omloc/oracle.hpp"

#include "omloc/cone_ir.hpp"
#include "omloc/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace omloc {

namespace {

void check_facilities(const std::vector<Point>& x, const Instance& inst) {
    if (static_cast<int>(x.size()) != inst.p) throw std::invalid_argument("expected p facility locations");
    for (const auto& xj : x)
        if (xj.size() != inst.d()) throw std::invalid_argument("facility dimension mismatch");
}

double dist(const Point& x, const Point& a, const NormExponent& e) { return norm_tau(x - a, e); }

// Subgradient of ||v||_tau.
Eigen::VectorXd norm_subgradient(const Eigen::VectorXd& v, const NormExponent& e) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
    double nv = norm_tau(v, e);
    if (nv == 0.0) return g;
    double tau = e.tau();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double a = std::abs(v[k]);
        if (a == 0.0) continue;
        double sgn = v[k] > 0 ? 1.0 : -1.0;
        g[k] = tau == 1.0 ? sgn : sgn * std::pow(a / nv, tau - 1.0);
    }
    return g;
}

}  // namespace

std::vector<int> sort_desc(const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

Evaluation eval_ni(const std::vector<Point>& x, const Instance& inst) {
    if (inst.variant != Variant::NonInterchangeable) throw std::invalid_argument("eval_ni needs an NI instance");
    check_facilities(x, inst);
    const int n = inst.n(), p = inst.p;
    Evaluation ev;
    for (int j = 0; j < p; ++j) {
        std::vector<double> L(n);
        for (int i = 0; i < n; ++i) L[i] = inst.ni.omega[i] * dist(x[j], inst.demand.points[i], inst.norm);
        auto order = sort_desc(L);
        for (int pos = 0; pos < n; ++pos) {
            ev.sorted_values.push_back(L[order[pos]]);
            ev.permutation.push_back(order[pos]);
            ev.objective += inst.ni.lambda(pos, j) * L[order[pos]];
        }
    }
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) ev.objective += inst.ni.mu(j, k) * dist(x[j], x[k], inst.norm);
    return ev;
}

double eval_ni_by_permutations(const std::vector<Point>& x, const Instance& inst) {
    check_facilities(x, inst);
    const int n = inst.n(), p = inst.p;
    if (n > 8) throw std::invalid_argument("permutation enumeration limited to n <= 8");
    double total = 0.0;
    for (int j = 0; j < p; ++j) {
        std::vector<double> L(n);
        for (int i = 0; i < n; ++i) L[i] = inst.ni.omega[i] * dist(x[j], inst.demand.points[i], inst.norm);
        std::vector<int> sigma(n);
        std::iota(sigma.begin(), sigma.end(), 0);
        double best = -kInf;
        do {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += inst.ni.lambda(i, j) * L[sigma[i]];
            best = std::max(best, s);
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        total += best;
    }
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) total += inst.ni.mu(j, k) * dist(x[j], x[k], inst.norm);
    return total;
}

Evaluation eval_sa(const std::vector<Point>& x, const Instance& inst) {
    if (inst.variant != Variant::SingleAllocation) throw std::invalid_argument("eval_sa needs an SA instance");
    check_facilities(x, inst);
    const int n = inst.n();
    Evaluation ev;
    std::vector<double> t(n);
    ev.assignment.resize(n);
    for (int i = 0; i < n; ++i) {
        double best = kInf;
        int arg = 0;
        for (int j = 0; j < inst.p; ++j) {
            double dj = dist(x[j], inst.demand.points[i], inst.norm);
            if (dj < best) best = dj, arg = j;
        }
        t[i] = best;
        ev.assignment[i] = arg;
    }
    ev.permutation = sort_desc(t);
    for (int pos = 0; pos < n; ++pos) {
        ev.sorted_values.push_back(t[ev.permutation[pos]]);
        ev.objective += inst.sa.lambda[pos] * t[ev.permutation[pos]];
    }
    return ev;
}

double eval_fixed_assignment(const std::vector<Point>& x, const std::vector<int>& assign, const Instance& inst) {
    const int n = inst.n();
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = dist(x[assign[i]], inst.demand.points[i], inst.norm);
    std::sort(t.begin(), t.end(), std::greater<double>());
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += inst.sa.lambda[i] * t[i];
    return v;
}

namespace {

struct Box {
    Eigen::VectorXd lo, hi;
};

std::vector<Point> unpack(const Eigen::VectorXd& z, int p, int d) {
    std::vector<Point> x(p);
    for (int j = 0; j < p; ++j) x[j] = z.segment(j * d, d);
    return x;
}

// Subgradient of the fixed-assignment objective (valid when lambda is non-increasing).
Eigen::VectorXd fixed_subgradient(const Eigen::VectorXd& z, const std::vector<int>& assign, const Instance& inst) {
    const int n = inst.n(), d = inst.d();
    std::vector<double> t(n);
    std::vector<Eigen::VectorXd> diff(n);
    for (int i = 0; i < n; ++i) {
        diff[i] = z.segment(assign[i] * d, d) - inst.demand.points[i];
        t[i] = norm_tau(diff[i], inst.norm);
    }
    auto order = sort_desc(t);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
    for (int pos = 0; pos < n; ++pos) {
        int i = order[pos];
        g.segment(assign[i] * d, d) += inst.sa.lambda[pos] * norm_subgradient(diff[i], inst.norm);
    }
    return g;
}

void grid_descent(Eigen::VectorXd& z, double& fz, const std::vector<int>& assign, const Instance& inst, double h,
                  const Box& box) {
    const int p = inst.p, d = inst.d();
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 100000) {
        improved = false;
        for (int k = 0; k < p * d; ++k) {
            for (double dir : {1.0, -1.0}) {
                while (true) {
                    Eigen::VectorXd c = z;
                    c[k] = std::clamp(c[k] + dir * h, box.lo[k], box.hi[k]);
                    if (c[k] == z[k]) break;
                    double fc = eval_fixed_assignment(unpack(c, p, d), assign, inst);
                    if (fc < fz - 1e-15) {
                        z = c;
                        fz = fc;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
    }
}

void ellipsoid_polish(Eigen::VectorXd& best, double& fbest, const std::vector<int>& assign, const Instance& inst,
                      const Box& box, int iters) {
    const int D = static_cast<int>(best.size());
    const int p = inst.p, d = inst.d();
    auto f = [&](const Eigen::VectorXd& z) { return eval_fixed_assignment(unpack(z, p, d), assign, inst); };
    if (D == 1) {
        double lo = box.lo[0], hi = box.hi[0];
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            Eigen::VectorXd c(1);
            c[0] = 0.5 * (lo + hi);
            double fc = f(c);
            if (fc < fbest) fbest = fc, best = c;
            double g = fixed_subgradient(c, assign, inst)[0];
            if (g > 0) hi = c[0];
            else if (g < 0) lo = c[0];
            else break;
        }
        return;
    }
    Eigen::VectorXd c = 0.5 * (box.lo + box.hi);
    double R2 = 0.25 * (box.hi - box.lo).squaredNorm() + 1e-12;
    Eigen::MatrixXd P = R2 * Eigen::MatrixXd::Identity(D, D);
    const double Dd = D;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd g;
        int viol = -1;
        for (int k = 0; k < D; ++k)
            if (c[k] < box.lo[k] || c[k] > box.hi[k]) {
                viol = k;
                break;
            }
        if (viol >= 0) {
            g = Eigen::VectorXd::Zero(D);
            g[viol] = c[viol] > box.hi[viol] ? 1.0 : -1.0;
        } else {
            double fc = f(c);
            if (fc < fbest) fbest = fc, best = c;
            g = fixed_subgradient(c, assign, inst);
        }
        double gPg = g.dot(P * g);
        if (!(gPg > 1e-300)) break;
        Eigen::VectorXd Pg = P * g / std::sqrt(gPg);
        c -= Pg / (Dd + 1.0);
        P = (Dd * Dd / (Dd * Dd - 1.0)) * (P - (2.0 / (Dd + 1.0)) * Pg * Pg.transpose());
        P = 0.5 * (P + P.transpose());
        if (P.trace() < 1e-26) break;
    }
}

}  // namespace

BruteForceResult brute_force_sa(const Instance& inst, const BruteForceSettings& settings) {
    if (inst.variant != Variant::SingleAllocation) throw std::invalid_argument("brute_force_sa needs an SA instance");
    require_valid(inst);
    const int n = inst.n(), p = inst.p, d = inst.d();
    double total = std::pow(static_cast<double>(p), n);
    if (total > 65536.0) throw std::invalid_argument("brute_force_sa: p^n exceeds 2^16");

    // For absolute norms, clamping a facility coordinate into the demand range never increases a distance.
    Box box{Eigen::VectorXd(p * d), Eigen::VectorXd(p * d)};
    for (int k = 0; k < d; ++k) {
        double lo = kInf, hi = -kInf;
        for (const auto& a : inst.demand.points) lo = std::min(lo, a[k]), hi = std::max(hi, a[k]);
        for (int j = 0; j < p; ++j) box.lo[j * d + k] = lo, box.hi[j * d + k] = hi;
    }
    const bool convex = is_non_increasing(inst.sa.lambda);
    const int iters = settings.ellipsoid_iterations_per_dim2 * std::max(1, p * d) * std::max(1, p * d);

    BruteForceResult res;
    res.eval.objective = kInf;
    std::vector<int> assign(n, 0);
    while (true) {
        // Canonical labelling: facility labels appear in increasing order of first use.
        bool canonical = true;
        int next = 0;
        for (int i = 0; i < n && canonical; ++i) {
            if (assign[i] > next) canonical = false;
            else if (assign[i] == next) ++next;
        }
        bool all_used = next == p || n < p;
        if (canonical && all_used) {
            ++res.assignments_tried;
            Eigen::VectorXd z(p * d);
            for (int j = 0; j < p; ++j) {
                Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
                int cnt = 0;
                for (int i = 0; i < n; ++i)
                    if (assign[i] == j) s += inst.demand.points[i], ++cnt;
                z.segment(j * d, d) = cnt ? Eigen::VectorXd(s / cnt) : Eigen::VectorXd(0.5 * (box.lo.segment(j * d, d) + box.hi.segment(j * d, d)));
            }
            double fz = eval_fixed_assignment(unpack(z, p, d), assign, inst);
            double h = (inst.M > 0 ? inst.M : 1.0) / settings.grid_divisions;
            for (int round = 0; round <= settings.refinements; ++round, h /= 5.0) grid_descent(z, fz, assign, inst, h, box);
            if (convex && settings.ellipsoid_polish) ellipsoid_polish(z, fz, assign, inst, box, iters);
            auto x = unpack(z, p, d);
            Evaluation ev = eval_sa(x, inst);
            if (ev.objective < res.eval.objective) {
                res.eval = ev;
                res.x = x;
            }
        }
        int k = n - 1;
        while (k >= 0 && assign[k] == p - 1) assign[k--] = 0;
        if (k < 0) break;
        ++assign[k];
    }
    return res;
}

DualCheck ordered_sum_dual_check(const std::vector<double>& u, const std::vector<double>& lambda) {
    const int n = static_cast<int>(u.size());
    if (static_cast<int>(lambda.size()) != n) throw std::invalid_argument("u and lambda differ in length");
    DualCheck out;
    std::vector<double> us = u;
    std::sort(us.begin(), us.end(), std::greater<double>());
    for (int l = 0; l < n; ++l) out.sorted_value += lambda[l] * us[l];

    ConicProgram prog;
    std::vector<int> v(n), w(n);
    AffExpr obj;
    for (int i = 0; i < n; ++i) v[i] = prog.add_var("v" + std::to_string(i + 1)).index, obj.add(v[i], 1.0);
    for (int l = 0; l < n; ++l) w[l] = prog.add_var("w" + std::to_string(l + 1)).index, obj.add(w[l], 1.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) prog.add_row({{v[i], 1.0}, {w[l], 1.0}}, Sense::Ge, lambda[l] * u[i], "dual");
    prog.set_objective(obj);
    SolverSettings st;
    st.tol = 1e-10;
    Solution sol = solve(prog, st);
    out.lp_value = sol.objective;
    return out;
}

}  // namespace omloc
