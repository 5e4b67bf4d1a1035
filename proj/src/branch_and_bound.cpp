#include "omloc/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace omloc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double scaled_gap(double ub, double lb) { return (ub - lb) / std::max(1.0, std::abs(ub)); }

double cutoff_of(double ub, double gap_tol) { return ub - gap_tol * std::max(1.0, std::abs(ub)); }

// d/dv ||v||_tau.
void add_norm_gradient(const Eigen::VectorXd& v, double nv, const NormExponent& e, double w, double* g) {
    if (nv <= 0.0 || w == 0.0) return;
    const double tau = e.tau();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double a = std::abs(v[k]);
        if (a == 0.0) continue;
        double sgn = v[k] > 0 ? 1.0 : -1.0;
        g[k] += w * (tau == 1.0 ? sgn : sgn * std::pow(a / nv, tau - 1.0));
    }
}

std::vector<Point> unpack(const Eigen::VectorXd& z, int p, int d) {
    std::vector<Point> x(p);
    for (int j = 0; j < p; ++j) x[j] = z.segment(j * d, d);
    return x;
}

struct Problem {
    const Instance& inst;
    int n, p, d, D;
    bool monotone;
    bool sym;
    std::vector<std::vector<signed char>> zroot;  // [i][j], -1 free
    bool z_forbidden(int i, int j) const {
        if (zroot.empty()) return false;
        if (zroot[i][j] == 0) return true;
        for (int k = 0; k < p; ++k)
            if (k != j && zroot[i][k] == 1) return true;
        return false;
    }
};

// Ordered objective where point i uses facility owner[i] (or the constant fixed[i] when owner[i] < 0).
struct RestrictedObjective {
    const Problem& pb;
    const std::vector<int>& owner;
    const std::vector<double>& fixed;

    double operator()(const Eigen::VectorXd& z, Eigen::VectorXd& g) const {
        const auto& inst = pb.inst;
        std::vector<double> t(pb.n);
        for (int i = 0; i < pb.n; ++i) {
            int j = owner[i];
            t[i] = j < 0 ? fixed[i] : norm_tau(z.segment(j * pb.d, pb.d) - inst.demand.points[i], inst.norm);
        }
        std::vector<int> ord(pb.n);
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return t[a] > t[b]; });
        g.setZero(pb.D);
        double f = 0.0;
        for (int l = 0; l < pb.n; ++l) {
            int i = ord[l];
            double lam = inst.sa.lambda[l];
            f += lam * t[i];
            int j = owner[i];
            if (j >= 0 && lam != 0.0) {
                Eigen::VectorXd v = z.segment(j * pb.d, pb.d) - inst.demand.points[i];
                add_norm_gradient(v, t[i], inst.norm, lam, g.data() + j * pb.d);
            }
        }
        return f;
    }
};

struct CutResult {
    double lb = -kInf;
    double ub = kInf;
    Eigen::VectorXd xbest;
};

// Central-cut ellipsoid method on a convex function over a box with ordering cuts x_{j,1} <= x_{j+1,1}.
CutResult ellipsoid_bound(const Problem& pb, const RestrictedObjective& F, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, double cutoff, double tol, int max_iter) {
    const int D = pb.D;
    CutResult out;
    Eigen::VectorXd c = 0.5 * (lo + hi), g(D);
    auto box_lb = [&](double f, const Eigen::VectorXd& x) {
        double s = f;
        for (int k = 0; k < D; ++k) s += std::min(g[k] * (lo[k] - x[k]), g[k] * (hi[k] - x[k]));
        return s;
    };
    auto feasible_cut = [&](const Eigen::VectorXd& x) -> bool {
        g.setZero(D);
        for (int k = 0; k < D; ++k) {
            if (x[k] < lo[k]) {
                g[k] = -1.0;
                return true;
            }
            if (x[k] > hi[k]) {
                g[k] = 1.0;
                return true;
            }
        }
        if (pb.sym && pb.d > 0)
            for (int j = 0; j + 1 < pb.p; ++j)
                if (x[j * pb.d] > x[(j + 1) * pb.d]) {
                    g[j * pb.d] = 1.0;
                    g[(j + 1) * pb.d] = -1.0;
                    return true;
                }
        return false;
    };
    auto done = [&] { return out.lb >= cutoff || out.ub - out.lb <= tol; };

    if (D == 1) {
        double a = lo[0], b = hi[0];
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd x(1);
            x[0] = 0.5 * (a + b);
            double f = F(x, g);
            if (f < out.ub) {
                out.ub = f;
                out.xbest = x;
            }
            out.lb = std::max(out.lb, f + std::min(g[0] * (a - x[0]), g[0] * (b - x[0])));
            if (g[0] == 0.0) out.lb = std::max(out.lb, f);
            if (done() || g[0] == 0.0) break;
            (g[0] > 0 ? b : a) = x[0];
        }
        return out;
    }

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(D, D);
    for (int k = 0; k < D; ++k) {
        double h = std::max(0.5 * (hi[k] - lo[k]), 1e-9);
        P(k, k) = D * h * h;
    }
    const double dd = static_cast<double>(D);
    for (int it = 0; it < max_iter; ++it) {
        if (!feasible_cut(c)) {
            double f = F(c, g);
            if (f < out.ub) {
                out.ub = f;
                out.xbest = c;
            }
            double gPg = g.dot(P * g);
            out.lb = std::max({out.lb, box_lb(f, c), f - std::sqrt(std::max(0.0, gPg))});
            if (g.squaredNorm() == 0.0) out.lb = std::max(out.lb, f);
            if (done() || g.squaredNorm() == 0.0) break;
        }
        Eigen::VectorXd Pg = P * g;
        double gPg = g.dot(Pg);
        if (!(gPg > 1e-300)) break;
        Eigen::VectorXd b = Pg / std::sqrt(gPg);
        c -= b / (dd + 1.0);
        P = (dd * dd / (dd * dd - 1.0)) * (P - (2.0 / (dd + 1.0)) * b * b.transpose());
        P = 0.5 * (P + P.transpose());
    }
    if (out.xbest.size() == 0) {
        // No feasible center met: bound by the box corner closest in the ordering sense.
        Eigen::VectorXd x = 0.5 * (lo + hi);
        out.ub = F(x, g);
        out.xbest = x;
        out.lb = std::max(out.lb, box_lb(out.ub, x));
    }
    return out;
}

struct SpatialNode {
    long long id = 0, parent = -1;
    int depth = 0;
    double bound = -kInf;
    Eigen::VectorXd lo, hi;
    Eigen::VectorXd hint;  // promising point from the parent
};

struct SpatialEval {
    double bound = -kInf;
    bool closed = false;
    Incumbent cand;
    int split = -1;  // coordinate to bisect
    Eigen::VectorXd hint;
};

SpatialEval evaluate_spatial(const Problem& pb, SpatialNode& node, double ub, double gap_tol) {
    const auto& inst = pb.inst;
    SpatialEval ev;
    auto& lo = node.lo;
    auto& hi = node.hi;
    if (pb.sym)
        for (int j = 0; j + 1 < pb.p; ++j) {
            int a = j * pb.d, b = (j + 1) * pb.d;
            hi[a] = std::min(hi[a], hi[b]);
            lo[b] = std::max(lo[b], lo[a]);
        }
    for (int k = 0; k < pb.D; ++k)
        if (lo[k] > hi[k]) {
            ev.bound = kInf;
            ev.closed = true;
            return ev;
        }
    std::vector<Eigen::VectorXd> blo(pb.p), bhi(pb.p);
    for (int j = 0; j < pb.p; ++j) {
        blo[j] = lo.segment(j * pb.d, pb.d);
        bhi[j] = hi.segment(j * pb.d, pb.d);
    }
    std::vector<std::vector<double>> L(pb.n, std::vector<double>(pb.p, kInf)), U = L;
    std::vector<double> lb(pb.n, kInf);
    std::vector<int> owner(pb.n, -1);
    std::vector<std::vector<char>> allowed(pb.n, std::vector<char>(pb.p, 0));
    for (int i = 0; i < pb.n; ++i) {
        double umin = kInf;
        for (int j = 0; j < pb.p; ++j) {
            if (pb.z_forbidden(i, j)) continue;
            L[i][j] = box_min_dist(inst.demand.points[i], blo[j], bhi[j], inst.norm);
            U[i][j] = box_max_dist(inst.demand.points[i], blo[j], bhi[j], inst.norm);
            umin = std::min(umin, U[i][j]);
        }
        int cnt = 0, last = -1;
        for (int j = 0; j < pb.p; ++j)
            if (L[i][j] <= umin) {
                allowed[i][j] = 1;
                lb[i] = std::min(lb[i], L[i][j]);
                ++cnt;
                last = j;
            }
        if (cnt == 1) owner[i] = last;
    }
    ev.bound = ordered_lower_bound(lb, inst.sa.lambda);

    Eigen::VectorXd center = 0.5 * (lo + hi);
    ev.cand = repair_heuristic(unpack(center, pb.p, pb.d), inst);
    ev.hint = center;
    double best_ub = std::min(ub, ev.cand.objective);
    double cutoff = cutoff_of(best_ub, gap_tol);
    if (ev.bound >= cutoff) {
        ev.closed = true;
        return ev;
    }

    bool determined = std::all_of(owner.begin(), owner.end(), [](int j) { return j >= 0; });
    if (pb.monotone) {
        RestrictedObjective F{pb, owner, lb};
        const int D = pb.D;
        int iters = determined ? 60 * D * (D + 1) + 200 : 6 * D * (D + 1) + 30;
        double tol = 0.25 * gap_tol * std::max(1.0, std::abs(best_ub));
        CutResult cr = ellipsoid_bound(pb, F, lo, hi, cutoff, tol, iters);
        ev.bound = std::max(ev.bound, cr.lb);
        if (cr.xbest.size()) {
            ev.hint = cr.xbest;
            Incumbent c = repair_heuristic(unpack(cr.xbest, pb.p, pb.d), inst);
            if (c.objective < ev.cand.objective) ev.cand = c;
        }
        best_ub = std::min(best_ub, ev.cand.objective);
        cutoff = cutoff_of(best_ub, gap_tol);
        if (ev.bound >= cutoff) {
            ev.closed = true;
            return ev;
        }
        if (determined && cr.ub - cr.lb <= tol) {
            ev.closed = true;
            return ev;
        }
    }

    // Split the facility box that leaves the most allocation ambiguity, along its longest edge.
    std::vector<double> score(pb.p, 0.0);
    for (int i = 0; i < pb.n; ++i)
        if (owner[i] < 0)
            for (int j = 0; j < pb.p; ++j)
                if (allowed[i][j]) score[j] += U[i][j] - L[i][j];
    int jstar = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
    if (score[jstar] <= 0.0) {
        // Allocation settled: shrink the widest box of a facility that carries points.
        std::vector<char> used(pb.p, 0);
        for (int i = 0; i < pb.n; ++i)
            for (int j = 0; j < pb.p; ++j)
                if (allowed[i][j]) used[j] = 1;
        double wbest = -1.0;
        for (int j = 0; j < pb.p; ++j) {
            if (!used[j]) continue;
            double w = (bhi[j] - blo[j]).maxCoeff();
            if (w > wbest) {
                wbest = w;
                jstar = j;
            }
        }
    }
    int kstar = 0;
    (bhi[jstar] - blo[jstar]).maxCoeff(&kstar);
    ev.split = jstar * pb.d + kstar;
    if (hi[ev.split] - lo[ev.split] <= 1e-12) {
        int k = 0;
        (hi - lo).maxCoeff(&k);
        ev.split = k;
        if (hi[k] - lo[k] <= 1e-12) ev.closed = true;  // degenerate point box: the bound is exact
    }
    return ev;
}

struct OpenKey {
    double bound;
    long long id;
    bool operator<(const OpenKey& o) const { return bound != o.bound ? bound < o.bound : id < o.id; }
};

void log_line(std::ostream* os, long long nodes, std::size_t open, double bound, double inc, double gap, double t) {
    if (!os) return;
    char buf[256];
    std::snprintf(buf, sizeof buf, "nodes %lld open %zu bound %.6f incumbent %.6f gap %.3e time %.2f\n", nodes, open,
                  bound, inc, gap, t);
    *os << buf << std::flush;
}

template <class Eval, class Node, class Result>
void run_batch(std::vector<Node>& batch, std::vector<Result>& out, int threads, Eval eval) {
    out.assign(batch.size(), Result{});
    if (threads <= 1 || batch.size() <= 1) {
        for (std::size_t k = 0; k < batch.size(); ++k) out[k] = eval(batch[k]);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < batch.size(); ++k) pool.emplace_back([&, k] { out[k] = eval(batch[k]); });
    for (auto& t : pool) t.join();
}

BnbResult solve_spatial(const Instance& inst, const BnbSettings& st, Incumbent inc, Clock::time_point t0) {
    Problem pb{inst, inst.n(), inst.p, inst.d(), inst.p * inst.d(), is_non_increasing(inst.sa.lambda),
               st.symmetry_breaking, st.root.z_fixed};
    if (!pb.zroot.empty()) pb.sym = false;
    BnbResult res;
    Eigen::VectorXd lo0(pb.D), hi0(pb.D);
    for (int k = 0; k < pb.d; ++k) {
        double a = kInf, b = -kInf;
        for (const auto& pt : inst.demand.points) {
            a = std::min(a, pt[k]);
            b = std::max(b, pt[k]);
        }
        for (int j = 0; j < pb.p; ++j) {
            lo0[j * pb.d + k] = a;
            hi0[j * pb.d + k] = b;
        }
    }
    std::map<long long, SpatialNode> nodes;
    std::set<OpenKey> open;
    long long next_id = 0;
    SpatialNode root;
    root.id = next_id++;
    root.lo = lo0;
    root.hi = hi0;
    nodes[root.id] = root;
    open.insert({root.bound, root.id});
    double closed_min = kInf;
    long long dive = -1;
    double last_log = -1e9;
    bool root_done = false;

    while (!open.empty()) {
        double t = seconds_since(t0);
        if (st.time_limit > 0 && t > st.time_limit) {
            res.stats.time_limit_hit = true;
            break;
        }
        if (res.stats.nodes >= st.max_nodes) {
            res.stats.node_limit_hit = true;
            break;
        }
        double cutoff = cutoff_of(inc.objective, st.gap_tol);
        // Drop everything already dominated by the incumbent.
        while (!open.empty() && std::prev(open.end())->bound >= cutoff) {
            auto last = std::prev(open.end());
            closed_min = std::min(closed_min, last->bound);
            nodes.erase(last->id);
            open.erase(last);
            ++res.stats.pruned;
        }
        if (open.empty()) break;
        if (scaled_gap(inc.objective, std::min(open.begin()->bound, closed_min)) <= st.gap_tol && root_done) break;

        std::vector<SpatialNode> batch;
        const int want = std::max(1, st.threads);
        bool plunge = st.plunge_every > 0 && res.stats.nodes % st.plunge_every == 0 && dive >= 0 && nodes.count(dive);
        if (plunge) {
            auto& nd = nodes[dive];
            open.erase({nd.bound, nd.id});
            batch.push_back(nd);
            nodes.erase(dive);
        }
        dive = -1;
        while (static_cast<int>(batch.size()) < want && !open.empty()) {
            auto first = open.begin();
            batch.push_back(nodes[first->id]);
            nodes.erase(first->id);
            open.erase(first);
        }
        std::vector<SpatialEval> evals;
        const double ub = inc.objective;
        run_batch(batch, evals, st.threads, [&](SpatialNode& nd) { return evaluate_spatial(pb, nd, ub, st.gap_tol); });

        for (std::size_t k = 0; k < batch.size(); ++k) {
            auto& nd = batch[k];
            auto& ev = evals[k];
            ++res.stats.nodes;
            res.stats.max_depth = std::max(res.stats.max_depth, nd.depth);
            double bound = std::max(ev.bound, nd.bound);
            if (st.record_paths) res.stats.records.push_back({nd.id, nd.parent, nd.depth, bound});
            if (nd.id == 0) {
                res.stats.root_bound = bound;
                root_done = true;
            }
            if (ev.cand.valid() && ev.cand.objective < inc.objective) inc = ev.cand;
            double cut = cutoff_of(inc.objective, st.gap_tol);
            if (ev.closed || bound >= cut) {
                closed_min = std::min(closed_min, std::min(bound, inc.objective));
                ++res.stats.pruned;
                continue;
            }
            double mid = 0.5 * (nd.lo[ev.split] + nd.hi[ev.split]);
            SpatialNode a = nd, b = nd;
            a.id = next_id++;
            b.id = next_id++;
            a.parent = b.parent = nd.id;
            a.depth = b.depth = nd.depth + 1;
            a.bound = b.bound = bound;
            a.hi[ev.split] = mid;
            b.lo[ev.split] = mid;
            nodes[a.id] = a;
            nodes[b.id] = b;
            open.insert({bound, a.id});
            open.insert({bound, b.id});
            dive = ev.hint.size() && ev.hint[ev.split] > mid ? b.id : a.id;
        }
        double lbnow = std::min(open.empty() ? kInf : open.begin()->bound, closed_min);
        t = seconds_since(t0);
        if (st.log && t - last_log >= st.log_interval) {
            log_line(st.log, res.stats.nodes, open.size(), std::min(lbnow, inc.objective), inc.objective,
                     scaled_gap(inc.objective, std::min(lbnow, inc.objective)), t);
            last_log = t;
        }
    }
    double lb = closed_min;
    if (!open.empty()) lb = std::min(lb, open.begin()->bound);
    res.best_bound = std::min(lb, inc.objective);
    res.incumbent = inc;
    return res;
}

struct BinaryNode {
    long long id = 0, parent = -1;
    int depth = 0;
    double bound = -kInf;
    SaRestriction fix;
};

struct BinaryEval {
    double bound = -kInf;
    bool closed = false;
    Incumbent cand;
    bool branch_w = false;
    int bi = -1, bj = -1;
    int conic = 0;
};

BinaryEval evaluate_binary(const Instance& inst, const BnbSettings& st, const SaOptions& opt, const BinaryNode& nd,
                           double ub) {
    BinaryEval ev;
    SaProgram sp;
    try {
        sp = build_sa(inst, opt, &nd.fix);
    } catch (const std::exception&) {
        ev.bound = kInf;
        ev.closed = true;
        return ev;
    }
    for (int i = 0; i < inst.n(); ++i) {
        bool any = false;
        for (int j = 0; j < inst.p; ++j) any = any || sp.z[i][j] >= 0;
        if (!any) {
            ev.bound = kInf;
            ev.closed = true;
            return ev;
        }
    }
    Solution sol = solve(sp.prog, st.conic);
    ev.conic = 1;
    if (sol.status == SolveStatus::PrimalInfeasible) {
        ev.bound = kInf;
        ev.closed = true;
        return ev;
    }
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIter) {
        ev.bound = -kInf;
    } else {
        double lo = std::min(sol.objective, sol.dual_objective);
        ev.bound = lo - 1e-6 * (1.0 + std::abs(lo));
    }
    std::vector<Point> x(inst.p, Point(inst.d()));
    for (int j = 0; j < inst.p; ++j)
        for (int k = 0; k < inst.d(); ++k) x[j][k] = sol.x.size() ? sol.x[sp.x[j][k]] : 0.0;
    ev.cand = repair_heuristic(x, inst);
    double cutoff = cutoff_of(std::min(ub, ev.cand.objective), st.gap_tol);
    if (ev.bound >= cutoff) {
        ev.closed = true;
        return ev;
    }
    auto frac = [&](int var) {
        double v = std::clamp(sol.x[var], 0.0, 1.0);
        return std::min(v, 1.0 - v);
    };
    double best = 1e-6;
    for (int i = 0; i < inst.n(); ++i)
        for (int l = 0; l < sp.w_cols; ++l) {
            const auto& fx = nd.fix.w_fixed;
            if (!fx.empty() && fx[i][l] >= 0) continue;
            double f = frac(sp.w[i][l]);
            if (f > best) {
                best = f;
                ev.branch_w = true;
                ev.bi = i;
                ev.bj = l;
            }
        }
    if (ev.bi < 0)
        for (int i = 0; i < inst.n(); ++i)
            for (int j = 0; j < inst.p; ++j) {
                if (sp.z[i][j] < 0) continue;
                const auto& fx = nd.fix.z_fixed;
                if (!fx.empty() && fx[i][j] >= 0) continue;
                double f = frac(sp.z[i][j]);
                if (f > best) {
                    best = f;
                    ev.bi = i;
                    ev.bj = j;
                }
            }
    if (ev.bi < 0) {
        // Integral relaxation: its value is attained.
        ev.closed = true;
        if (sol.status == SolveStatus::Optimal) ev.bound = std::max(ev.bound, std::min(sol.objective, ev.cand.objective));
    }
    return ev;
}

void fix_w(SaRestriction& f, int i, int l, int val, int n, int cols) {
    if (f.w_fixed.empty()) f.w_fixed.assign(n, std::vector<signed char>(cols, -1));
    f.w_fixed[i][l] = static_cast<signed char>(val);
    if (val == 1) {
        for (int k = 0; k < cols; ++k)
            if (k != l) f.w_fixed[i][k] = 0;
        for (int r = 0; r < n; ++r)
            if (r != i) f.w_fixed[r][l] = 0;
    }
}

void fix_z(SaRestriction& f, int i, int j, int val, int n, int p) {
    if (f.z_fixed.empty()) f.z_fixed.assign(n, std::vector<signed char>(p, -1));
    f.z_fixed[i][j] = static_cast<signed char>(val);
    if (val == 1)
        for (int k = 0; k < p; ++k)
            if (k != j) f.z_fixed[i][k] = 0;
}

BnbResult solve_binary(const Instance& inst, const BnbSettings& st, Incumbent inc, Clock::time_point t0) {
    BnbResult res;
    SaOptions opt;
    opt.ordering = OrderingMode::Permutation;
    opt.symmetry_breaking = st.symmetry_breaking;
    const int n = inst.n(), p = inst.p;
    int cols = last_positive(inst.sa.lambda) + 1;
    std::map<long long, BinaryNode> nodes;
    std::set<OpenKey> open;
    long long next_id = 0;
    BinaryNode root;
    root.id = next_id++;
    root.fix.z_fixed = st.root.z_fixed;
    root.fix.w_fixed = st.root.w_fixed;
    nodes[root.id] = root;
    open.insert({root.bound, root.id});
    double closed_min = kInf;
    long long dive = -1;
    double last_log = -1e9;

    while (!open.empty()) {
        double t = seconds_since(t0);
        if (st.time_limit > 0 && t > st.time_limit) {
            res.stats.time_limit_hit = true;
            break;
        }
        if (res.stats.nodes >= st.max_nodes) {
            res.stats.node_limit_hit = true;
            break;
        }
        double cutoff = cutoff_of(inc.objective, st.gap_tol);
        while (!open.empty() && std::prev(open.end())->bound >= cutoff) {
            auto last = std::prev(open.end());
            closed_min = std::min(closed_min, last->bound);
            nodes.erase(last->id);
            open.erase(last);
            ++res.stats.pruned;
        }
        if (open.empty()) break;
        std::vector<BinaryNode> batch;
        bool plunge = st.plunge_every > 0 && res.stats.nodes % st.plunge_every == 0 && dive >= 0 && nodes.count(dive);
        if (plunge) {
            auto& nd = nodes[dive];
            open.erase({nd.bound, nd.id});
            batch.push_back(nd);
            nodes.erase(dive);
        }
        dive = -1;
        while (static_cast<int>(batch.size()) < std::max(1, st.threads) && !open.empty()) {
            auto first = open.begin();
            batch.push_back(nodes[first->id]);
            nodes.erase(first->id);
            open.erase(first);
        }
        std::vector<BinaryEval> evals;
        const double ub = inc.objective;
        run_batch(batch, evals, st.threads,
                  [&](BinaryNode& nd) { return evaluate_binary(inst, st, opt, nd, ub); });
        for (std::size_t k = 0; k < batch.size(); ++k) {
            auto& nd = batch[k];
            auto& ev = evals[k];
            ++res.stats.nodes;
            res.stats.conic_solves += ev.conic;
            res.stats.max_depth = std::max(res.stats.max_depth, nd.depth);
            double bound = std::max(ev.bound, nd.bound);
            if (st.record_paths) res.stats.records.push_back({nd.id, nd.parent, nd.depth, bound});
            if (nd.id == 0) res.stats.root_bound = bound;
            if (ev.cand.valid() && ev.cand.objective < inc.objective) inc = ev.cand;
            if (ev.closed || bound >= cutoff_of(inc.objective, st.gap_tol)) {
                closed_min = std::min(closed_min, std::min(bound, inc.objective));
                ++res.stats.pruned;
                continue;
            }
            BinaryNode one = nd, zero = nd;
            one.id = next_id++;
            zero.id = next_id++;
            one.parent = zero.parent = nd.id;
            one.depth = zero.depth = nd.depth + 1;
            one.bound = zero.bound = bound;
            if (ev.branch_w) {
                fix_w(one.fix, ev.bi, ev.bj, 1, n, cols);
                fix_w(zero.fix, ev.bi, ev.bj, 0, n, cols);
            } else {
                fix_z(one.fix, ev.bi, ev.bj, 1, n, p);
                fix_z(zero.fix, ev.bi, ev.bj, 0, n, p);
            }
            nodes[one.id] = one;
            nodes[zero.id] = zero;
            open.insert({bound, one.id});
            open.insert({bound, zero.id});
            dive = one.id;
        }
        double lbnow = std::min(open.empty() ? kInf : open.begin()->bound, closed_min);
        t = seconds_since(t0);
        if (st.log && t - last_log >= st.log_interval) {
            log_line(st.log, res.stats.nodes, open.size(), std::min(lbnow, inc.objective), inc.objective,
                     scaled_gap(inc.objective, std::min(lbnow, inc.objective)), t);
            last_log = t;
        }
    }
    double lb = closed_min;
    if (!open.empty()) lb = std::min(lb, open.begin()->bound);
    res.best_bound = std::min(lb, inc.objective);
    res.incumbent = inc;
    return res;
}

// Facility locations minimizing the ordered objective for a fixed allocation (and ordering when needed).
bool location_step(const Instance& inst, const Evaluation& ev, const SolverSettings& conic, std::vector<Point>& x) {
    const int n = inst.n(), p = inst.p, d = inst.d();
    SaOptions opt;
    opt.symmetry_breaking = false;
    SaRestriction fix;
    fix.z_fixed.assign(n, std::vector<signed char>(p, 0));
    for (int i = 0; i < n; ++i) fix.z_fixed[i][ev.assignment[i]] = 1;
    if (is_non_increasing(inst.sa.lambda)) {
        opt.ordering = OrderingMode::SortingDual;
    } else {
        opt.ordering = OrderingMode::Permutation;
        int cols = last_positive(inst.sa.lambda) + 1;
        fix.w_fixed.assign(n, std::vector<signed char>(cols, 0));
        for (int l = 0; l < cols; ++l) fix.w_fixed[ev.permutation[l]][l] = 1;
    }
    SaProgram sp = build_sa(inst, opt, &fix);
    Solution sol = solve(sp.prog, conic);
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIter) return false;
    x.assign(p, Point(d));
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < d; ++k) x[j][k] = sol.x[sp.x[j][k]];
    return true;
}

}  // namespace

double box_min_dist(const Point& a, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const NormExponent& e) {
    Eigen::VectorXd v(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) v[k] = a[k] < lo[k] ? lo[k] - a[k] : a[k] > hi[k] ? a[k] - hi[k] : 0.0;
    return norm_tau(v, e);
}

double box_max_dist(const Point& a, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const NormExponent& e) {
    Eigen::VectorXd v(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) v[k] = std::max(std::abs(a[k] - lo[k]), std::abs(a[k] - hi[k]));
    return norm_tau(v, e);
}

double ordered_lower_bound(std::vector<double> lb, const Eigen::VectorXd& lambda) {
    std::sort(lb.begin(), lb.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t l = 0; l < lb.size(); ++l) s += lambda[l] * lb[l];
    return s;
}

bool bounds_monotone(const std::vector<NodeRecord>& records, double tol) {
    std::map<long long, double> bound;
    for (const auto& r : records) bound[r.id] = r.bound;
    for (const auto& r : records) {
        if (r.parent < 0) continue;
        auto it = bound.find(r.parent);
        if (it != bound.end() && r.bound < it->second - tol) return false;
    }
    return true;
}

Incumbent repair_heuristic(const std::vector<Point>& x, const Instance& inst) {
    Incumbent inc;
    for (const auto& xj : x)
        if (!xj.allFinite()) throw std::invalid_argument("repair needs finite facilities");
    inc.x = x;
    inc.certificate = eval_sa(x, inst);
    inc.objective = inc.certificate.objective;
    inc.assignment = inc.certificate.assignment;
    inc.permutation = inc.certificate.permutation;
    return inc;
}

Incumbent alternate_location_allocation(const Instance& inst, int starts, unsigned seed, const SolverSettings& conic,
                                        int* conic_solves) {
    require_valid(inst);
    if (starts < 1) throw std::invalid_argument("need at least one start");
    const int n = inst.n(), p = inst.p;
    const auto& A = inst.demand.points;
    std::mt19937 rng(seed);
    Incumbent best;
    int solves = 0;
    for (int s = 0; s < starts; ++s) {
        std::vector<Point> x;
        if (s == 0) {
            // Greedy: add the demand point that lowers the objective most.
            std::vector<int> chosen;
            for (int j = 0; j < p; ++j) {
                double bv = kInf;
                int bi = 0;
                for (int i = 0; i < n; ++i) {
                    std::vector<Point> trial;
                    for (int c : chosen) trial.push_back(A[c]);
                    trial.push_back(A[i]);
                    while (static_cast<int>(trial.size()) < p) trial.push_back(A[i]);
                    double v = eval_sa(trial, inst).objective;
                    if (v < bv) {
                        bv = v;
                        bi = i;
                    }
                }
                chosen.push_back(bi);
            }
            for (int c : chosen) x.push_back(A[c]);
        } else {
            // k-means++ style seeding on the demand points.
            std::uniform_int_distribution<int> pick(0, n - 1);
            x.push_back(A[pick(rng)]);
            while (static_cast<int>(x.size()) < p) {
                std::vector<double> w(n);
                for (int i = 0; i < n; ++i) {
                    double m = kInf;
                    for (const auto& xj : x) m = std::min(m, norm_tau(xj - A[i], inst.norm));
                    w[i] = m * m;
                }
                double tot = std::accumulate(w.begin(), w.end(), 0.0);
                if (tot <= 0) {
                    x.push_back(A[pick(rng)]);
                    continue;
                }
                std::discrete_distribution<int> dist(w.begin(), w.end());
                x.push_back(A[dist(rng)]);
            }
        }
        Incumbent cur = repair_heuristic(x, inst);
        for (int round = 0; round < 50; ++round) {
            std::vector<Point> nx;
            ++solves;
            if (!location_step(inst, cur.certificate, conic, nx)) break;
            Incumbent next = repair_heuristic(nx, inst);
            if (next.objective < cur.objective - 1e-9 * (1.0 + std::abs(cur.objective))) cur = next;
            else {
                if (next.objective < cur.objective) cur = next;
                break;
            }
        }
        if (cur.objective < best.objective) best = cur;
    }
    if (conic_solves) *conic_solves = solves;
    return best;
}

BnbResult solve_misocp(const Instance& inst, const BnbSettings& st) {
    require_valid(inst);
    if (inst.variant != Variant::SingleAllocation) throw std::invalid_argument("solve_misocp needs an SA instance");
    auto t0 = Clock::now();
    Incumbent inc;
    int ala_solves = 0;
    bool fixed_root = !st.root.z_fixed.empty() || !st.root.w_fixed.empty();
    if (st.ala_starts > 0 && !fixed_root) inc = alternate_location_allocation(inst, st.ala_starts, st.seed, st.conic, &ala_solves);
    if (!inc.valid()) {
        Point c = Point::Zero(inst.d());
        for (const auto& a : inst.demand.points) c += a;
        c /= std::max(1, inst.n());
        inc = repair_heuristic(std::vector<Point>(inst.p, c), inst);
        if (fixed_root) inc.objective = kInf;
    }
    BnbResult res = st.mode == BranchMode::Spatial ? solve_spatial(inst, st, inc, t0) : solve_binary(inst, st, inc, t0);
    res.stats.conic_solves += ala_solves;
    res.stats.seconds = seconds_since(t0);
    if (!res.incumbent.valid() || !std::isfinite(res.incumbent.objective))
        throw std::runtime_error("branch and bound found no feasible point (check UB and M)");
    double check = eval_sa(res.incumbent.x, inst).objective;
    if (std::abs(check - res.incumbent.objective) > 1e-6)
        throw std::runtime_error("incumbent failed re-certification by the evaluator");
    res.gap = std::max(0.0, scaled_gap(res.incumbent.objective, res.best_bound));
    log_line(st.log, res.stats.nodes, 0, res.best_bound, res.incumbent.objective, res.gap, res.stats.seconds);
    return res;
}

}  // namespace omloc
