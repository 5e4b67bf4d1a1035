#include "omloc/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace omloc {

namespace {

std::string idx(const std::string& base, std::initializer_list<int> ids) {
    std::string s = base + "[";
    bool first = true;
    for (int v : ids) {
        if (!first) s += ",";
        s += std::to_string(v + 1);
        first = false;
    }
    return s + "]";
}

struct Families {
    std::string minus, plus, power, sum;
};

struct DistanceSystem {
    int u = -1;
    std::vector<int> y, zeta;
    int towers = 0;
};

// weight * ||diff||_tau <= u with the abs rows, one tower per coordinate and the aggregated sum row.
DistanceSystem distance_system(ConicProgram& prog, const std::vector<AffExpr>& diff, double weight,
                               const NormExponent& e, int u_index, const std::string& prefix, const Families& fam) {
    DistanceSystem ds;
    ds.u = u_index;
    VarHandle u{u_index, prog.vars()[u_index].name, prog.vars()[u_index].role};
    AffExpr sum;
    for (std::size_t k = 0; k < diff.size(); ++k) {
        std::string tag = prefix + "," + std::to_string(k + 1);
        VarHandle y = prog.add_var("y[" + tag + "]", "abs", 0.0, kInf);
        prog.add_row(AffExpr::var(y.index) - diff[k], Sense::Ge, AffExpr(0.0), fam.minus);
        prog.add_row(AffExpr::var(y.index) + diff[k], Sense::Ge, AffExpr(0.0), fam.plus);
        VarHandle z = prog.add_var("zeta[" + tag + "]", "zeta", 0.0, kInf);
        add_rational_power(prog, y, z, u, e.r(), e.s(), "g[" + tag + "]", fam.power);
        ++ds.towers;
        ds.y.push_back(y.index);
        ds.zeta.push_back(z.index);
        sum.add(z.index, std::pow(weight, e.tau()));
    }
    prog.add_row(sum, Sense::Le, AffExpr::var(u_index), fam.sum);
    return ds;
}

void fill_report(const ConicProgram& prog, FormulationReport& rep) {
    rep.num_linear_rows = static_cast<int>(prog.rows().size());
    rep.num_cone_blocks = static_cast<int>(prog.cones().size());
    rep.num_binaries = static_cast<int>(prog.binaries().size());
    rep.num_vars = prog.num_vars();
    rep.family_rows.clear();
    rep.family_cones.clear();
    for (int i = 0; i < rep.num_linear_rows; ++i) rep.family_rows[prog.rows()[i].family].push_back(i);
    for (const auto& c : prog.cones()) ++rep.family_cones[c.family];
}

long long family_size(const FormulationReport& rep, const std::string& f) {
    auto it = rep.family_rows.find(f);
    return it == rep.family_rows.end() ? 0 : static_cast<long long>(it->second.size());
}

}  // namespace

std::string FormulationReport::audit() const {
    std::ostringstream os;
    os << "rows " << num_linear_rows << " cones " << num_cone_blocks << " binaries " << num_binaries << " vars "
       << num_vars << "\n";
    for (const auto& [fam, rows] : family_rows) {
        os << fam << " rows=" << rows.size() << " ranges=";
        std::size_t k = 0;
        bool first = true;
        while (k < rows.size()) {
            std::size_t e = k;
            while (e + 1 < rows.size() && rows[e + 1] == rows[e] + 1) ++e;
            if (!first) os << ",";
            os << rows[k];
            if (e > k) os << "-" << rows[e];
            first = false;
            k = e + 1;
        }
        auto c = family_cones.find(fam);
        if (c != family_cones.end()) os << " cones=" << c->second;
        os << "\n";
    }
    for (const auto& [fam, n] : family_cones)
        if (!family_rows.count(fam)) os << fam << " rows=0 cones=" << n << "\n";
    if (formula_linear_count) os << "linear inequality count " << measured_linear_count << " formula " << formula_linear_count << "\n";
    if (declared_nc1) os << "nc1 " << measured_nc1 << " declared " << declared_nc1 << "\n";
    return os.str();
}

std::vector<int> lambda_groups(const Eigen::VectorXd& lambda) {
    std::vector<int> starts;
    for (int l = 0; l < lambda.size(); ++l)
        if (l == 0 || lambda[l] != lambda[l - 1]) starts.push_back(l);
    return starts;
}

int last_positive(const Eigen::VectorXd& lambda) {
    for (int l = static_cast<int>(lambda.size()) - 1; l >= 0; --l)
        if (lambda[l] > 0.0) return l;
    return -1;
}

NiProgram build_ni(const Instance& inst) {
    require_valid(inst);
    if (inst.variant != Variant::NonInterchangeable) throw std::invalid_argument("build_ni needs an NI instance");
    const int n = inst.n(), p = inst.p, d = inst.d();
    const auto& e = inst.norm;
    NiProgram out;
    auto& prog = out.prog;
    out.x.assign(p, std::vector<int>(d));
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < d; ++k) out.x[j][k] = prog.add_var(idx("x", {j, k}), "x").index;

    std::vector<std::vector<int>> v(n, std::vector<int>(p)), w(n, std::vector<int>(p));
    out.u.assign(n, std::vector<int>(p));
    AffExpr obj;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            v[i][j] = prog.add_var(idx("v", {i, j}), "v").index;
            obj.add(v[i][j], 1.0);
        }
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < p; ++j) {
            w[l][j] = prog.add_var(idx("w", {l, j}), "w").index;
            obj.add(w[l][j], 1.0);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) out.u[i][j] = prog.add_var(idx("u", {i, j}), "u", 0.0, kInf).index;

    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            for (int j = 0; j < p; ++j) {
                AffExpr lhs = AffExpr::var(v[i][j]) + AffExpr::var(w[l][j]);
                prog.add_row(lhs, Sense::Ge, AffExpr::var(out.u[i][j], inst.ni.lambda(l, j)), "eq:n1-1");
            }

    const Families point_fam{"eq:n1-2", "eq:n1-3", "eq:n1-4", "eq:n1-5"};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            std::vector<AffExpr> diff(d);
            for (int k = 0; k < d; ++k) {
                diff[k] = AffExpr::var(out.x[j][k]);
                diff[k].constant = -inst.demand.points[i][k];
            }
            distance_system(prog, diff, inst.ni.omega[i], e, out.u[i][j],
                            std::to_string(i + 1) + "," + std::to_string(j + 1), point_fam);
        }

    // Pair systems over all ordered pairs; only j < j' carries a weight and enters the objective.
    const Families pair_fam{"eq:n1-6", "eq:n1-7", "eq:n1-8", "eq:n1-9"};
    for (int j = 0; j < p; ++j)
        for (int jp = 0; jp < p; ++jp) {
            int t = prog.add_var(idx("t", {j, jp}), "t", 0.0, kInf).index;
            prog.add_row({{t, 1.0}}, Sense::Ge, 0.0, "t-nonneg");
            double mu = j < jp ? inst.ni.mu(j, jp) : 0.0;
            std::vector<AffExpr> diff(d);
            for (int k = 0; k < d; ++k) diff[k] = AffExpr::var(out.x[j][k]) - AffExpr::var(out.x[jp][k]);
            distance_system(prog, diff, mu, e, t, "p" + std::to_string(j + 1) + "," + std::to_string(jp + 1), pair_fam);
            if (j < jp) obj.add(t, 1.0);
        }
    prog.set_objective(obj);

    fill_report(prog, out.report);
    const long long np = 1LL * n * p, pp = 1LL * p * p;
    out.report.formula_linear_count = (np + pp) * (2LL * d + 1) + pp;
    for (const char* f : {"eq:n1-2", "eq:n1-3", "eq:n1-5", "eq:n1-6", "eq:n1-7", "eq:n1-9", "t-nonneg"})
        out.report.measured_linear_count += family_size(out.report, f);
    return out;
}

SaProgram build_sa(const Instance& inst, const SaOptions& opt, const SaRestriction* node) {
    require_valid(inst);
    if (inst.variant != Variant::SingleAllocation) throw std::invalid_argument("build_sa needs an SA instance");
    const int n = inst.n(), p = inst.p, d = inst.d();
    const auto& e = inst.norm;
    const Eigen::VectorXd& lam = inst.sa.lambda;
    if (opt.ordering == OrderingMode::SortingDual && !is_non_increasing(lam))
        throw std::invalid_argument("sorting dual ordering needs non-increasing lambda");

    auto zfix = [&](int i, int j) -> int {
        if (!node || node->z_fixed.empty()) return -1;
        return node->z_fixed[i][j];
    };
    auto wfix = [&](int i, int l) -> int {
        if (!node || node->w_fixed.empty()) return -1;
        return node->w_fixed[i][l];
    };

    SaProgram out;
    out.ordering = opt.ordering;
    auto& prog = out.prog;

    out.x.assign(p, std::vector<int>(d));
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < d; ++k) {
            double lo = -kInf, hi = kInf;
            if (node && !node->box_lo.empty()) {
                lo = node->box_lo[j][k];
                hi = node->box_hi[j][k];
            }
            out.x[j][k] = prog.add_var(idx("x", {j, k}), "x", lo, hi).index;
        }

    out.z.assign(n, std::vector<int>(p, -1));
    out.u.assign(n, std::vector<int>(p, -1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            int f = zfix(i, j);
            if (f == 0 && node && node->drop_inactive) continue;
            int z = prog.add_var(idx("z", {i, j}), "z", 0.0, 1.0).index;
            prog.mark_binary(z);
            if (f >= 0) prog.vars()[z].lb = prog.vars()[z].ub = f;
            out.z[i][j] = z;
            out.u[i][j] = prog.add_var(idx("u", {i, j}), "u", 0.0, kInf).index;
        }

    out.t.resize(n);
    for (int i = 0; i < n; ++i) {
        double lb = 0.0;
        if (node && !node->t_lower.empty()) lb = std::max(0.0, node->t_lower[i]);
        out.t[i] = prog.add_var(idx("t", {i}), "t", lb, kInf).index;
    }

    AffExpr obj;
    long long units_ordering = 0;
    if (opt.ordering == OrderingMode::Permutation) {
        int k = n;
        if (opt.aggregate_zero_lambda) k = last_positive(lam) + 1;
        out.w_cols = k;
        out.theta.resize(k);
        for (int l = 0; l < k; ++l) {
            out.theta[l] = prog.add_var(idx("theta", {l}), "theta", 0.0, kInf).index;
            obj.add(out.theta[l], lam[l]);
        }
        out.w.assign(n, std::vector<int>(k));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < k; ++l) {
                int w = prog.add_var(idx("w", {i, l}), "w", 0.0, 1.0).index;
                prog.mark_binary(w);
                int f = wfix(i, l);
                if (f >= 0) prog.vars()[w].lb = prog.vars()[w].ub = f;
                out.w[i][l] = w;
            }
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < k; ++l) {
                // t_i - theta_l + UB_i w_il <= UB_i
                prog.add_row({{out.t[i], 1.0}, {out.theta[l], -1.0}, {out.w[i][l], inst.UB[i]}}, Sense::Le, inst.UB[i],
                             "c:ti2");
            }
        for (int l = 0; l + 1 < k; ++l)
            prog.add_row({{out.theta[l], 1.0}, {out.theta[l + 1], -1.0}}, Sense::Ge, 0.0, "c:theta1");
        for (int l = 0; l < k; ++l) {
            std::vector<Term> row;
            for (int i = 0; i < n; ++i) row.push_back({out.w[i][l], 1.0});
            prog.add_row(row, Sense::Eq, 1.0, "c:n1-6");
        }
        for (int i = 0; i < n; ++i) {
            std::vector<Term> row;
            for (int l = 0; l < k; ++l) row.push_back({out.w[i][l], 1.0});
            prog.add_row(row, k == n ? Sense::Eq : Sense::Le, 1.0, "c:n1-7");
        }
        if (k < n && k > 0) {
            // Points left out of the kept positions are bounded by the last kept theta.
            for (int i = 0; i < n; ++i) {
                std::vector<Term> row{{out.t[i], 1.0}, {out.theta[k - 1], -1.0}};
                for (int l = 0; l < k; ++l) row.push_back({out.w[i][l], -inst.UB[i]});
                prog.add_row(row, Sense::Le, 0.0, "agg-tail");
            }
        }
        units_ordering = 1LL * n * k + std::max(0, k - 1) + 2LL * n;
    } else {
        auto starts = lambda_groups(lam);
        const int G = static_cast<int>(starts.size());
        out.group_of_position.assign(n, 0);
        out.dual_v.resize(n);
        out.dual_w.resize(G);
        for (int g = 0; g < G; ++g) {
            int end = g + 1 < G ? starts[g + 1] : n;
            for (int l = starts[g]; l < end; ++l) out.group_of_position[l] = g;
        }
        for (int i = 0; i < n; ++i) {
            out.dual_v[i] = prog.add_var(idx("sv", {i}), "sortdual").index;
            obj.add(out.dual_v[i], 1.0);
        }
        for (int g = 0; g < G; ++g) {
            int end = g + 1 < G ? starts[g + 1] : n;
            out.dual_w[g] = prog.add_var(idx("sw", {g}), "sortdual").index;
            obj.add(out.dual_w[g], end - starts[g]);
        }
        for (int i = 0; i < n; ++i)
            for (int g = 0; g < G; ++g)
                prog.add_row({{out.dual_v[i], 1.0}, {out.dual_w[g], 1.0}, {out.t[i], -lam[starts[g]]}}, Sense::Ge, 0.0,
                             "sort-dual");
    }

    long long towers = 0;
    const Families fam{"c:n1-1", "c:n1-2", "c:n1-3", "c:n1-4"};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            if (out.u[i][j] < 0) continue;
            prog.add_row({{out.u[i][j], 1.0}, {out.t[i], -1.0}, {out.z[i][j], inst.UB[i]}}, Sense::Le, inst.UB[i],
                         "c:ti1");
            std::vector<AffExpr> diff(d);
            for (int k = 0; k < d; ++k) {
                diff[k] = AffExpr::var(out.x[j][k]);
                diff[k].constant = -inst.demand.points[i][k];
            }
            towers += distance_system(prog, diff, 1.0, e, out.u[i][j],
                                      std::to_string(i + 1) + "," + std::to_string(j + 1), fam)
                          .towers;
        }
    for (int i = 0; i < n; ++i) {
        std::vector<Term> row;
        for (int j = 0; j < p; ++j)
            if (out.z[i][j] >= 0) row.push_back({out.z[i][j], 1.0});
        prog.add_row(row, Sense::Eq, 1.0, "c:n1-5");
    }

    const Families kfam{"c:domain-x", "c:domain-x", "c:domain-x", "c:domain-x"};
    for (int j = 0; j < p; ++j) {
        int uk = prog.add_var(idx("uK", {j}), "uK", 0.0, inst.M).index;
        std::vector<AffExpr> diff(d);
        for (int k = 0; k < d; ++k) diff[k] = AffExpr::var(out.x[j][k]);
        distance_system(prog, diff, 1.0, e, uk, "K" + std::to_string(j + 1), kfam);
    }
    if (opt.symmetry_breaking && d > 0)
        for (int j = 0; j + 1 < p; ++j)
            prog.add_row({{out.x[j][0], 1.0}, {out.x[j + 1][0], -1.0}}, Sense::Le, 0.0, "sym-break");

    prog.set_objective(obj);
    fill_report(prog, out.report);
    out.report.declared_nc1 = 1LL * n * n + 4LL * n + 1LL * n * p * (3LL * d + 2) - 1;
    long long m = units_ordering + towers;
    for (const char* f : {"c:ti1", "c:n1-1", "c:n1-2", "c:n1-4", "c:n1-5"}) m += family_size(out.report, f);
    out.report.measured_nc1 = m;
    return out;
}

namespace {

// Slack of a cone block: distance-like margin, positive iff strictly interior.
double cone_slack(const ConeBlock& c, const Eigen::VectorXd& x) {
    std::vector<double> v(c.entries.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = c.entries[k].eval(x);
    switch (c.kind) {
    case ConeKind::Nonneg: return *std::min_element(v.begin(), v.end());
    case ConeKind::SOC: {
        double r = 0;
        for (std::size_t k = 1; k < v.size(); ++k) r += v[k] * v[k];
        return v[0] - std::sqrt(r);
    }
    case ConeKind::RotatedSOC: {
        double r = 0;
        for (std::size_t k = 2; k < v.size(); ++k) r += v[k] * v[k];
        double a = v[0], b = v[1];
        if (a <= 0 || b <= 0) return std::min(a, b);
        return std::min({a, b, std::sqrt(2 * a * b) - std::sqrt(r)});
    }
    case ConeKind::PSD: {
        int m = c.psd_side;
        Eigen::MatrixXd S(m, m);
        int pos = 0;
        for (int col = 0; col < m; ++col)
            for (int row = col; row < m; ++row) S(row, col) = S(col, row) = v[pos++];
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()[0];
    }
    }
    return 0.0;
}

// Fill auxiliary tower nodes with a shrunken geometric mean of their children (children precede parents).
void complete_towers(const ConicProgram& prog, Eigen::VectorXd& x) {
    for (const auto& c : prog.cones()) {
        if (c.kind != ConeKind::RotatedSOC || c.entries.size() != 3) continue;
        const auto& top = c.entries[2];
        if (top.terms.size() != 1) continue;
        int w = top.terms[0].var;
        if (prog.vars()[w].role != "tower") continue;
        double a = 2.0 * c.entries[0].eval(x), b = c.entries[1].eval(x);
        x[w] = std::sqrt(std::max(0.0, a * b)) * (1.0 - 1e-3);
    }
}

void set_distance_aux(const ConicProgram& prog, Eigen::VectorXd& x, const std::string& tag, int d, const NormExponent& e,
                      const std::vector<double>& diff, double u) {
    for (int k = 0; k < d; ++k) {
        std::string t = tag + "," + std::to_string(k + 1);
        double y = std::abs(diff[k]) + 1.0;
        x[prog.find("y[" + t + "]")] = y;
        x[prog.find("zeta[" + t + "]")] = std::pow(2.0 * std::pow(y, e.r()) / std::pow(u, e.r() - e.s()), 1.0 / e.s());
    }
}

}  // namespace

SlaterCheck slater_check(const ConicProgram& prog, const Eigen::VectorXd& point) {
    SlaterCheck out;
    out.point = point;
    out.min_slack = kInf;
    auto take = [&](double s, const std::string& fam) {
        if (s < out.min_slack) {
            out.min_slack = s;
            out.worst_family = fam;
        }
    };
    for (const auto& r : prog.rows()) {
        double lhs = 0;
        for (const auto& t : r.terms) lhs += t.coef * point[t.var];
        if (r.sense == Sense::Eq) out.max_equality_residual = std::max(out.max_equality_residual, std::abs(lhs - r.rhs));
        else take(r.sense == Sense::Le ? r.rhs - lhs : lhs - r.rhs, r.family);
    }
    for (const auto& c : prog.cones()) take(cone_slack(c, point), c.family);
    for (int i = 0; i < prog.num_vars(); ++i) {
        const auto& v = prog.vars()[i];
        if (v.binary) continue;
        if (v.lb != -kInf) take(point[i] - v.lb, "bound:" + v.name);
        if (v.ub != kInf) take(v.ub - point[i], "bound:" + v.name);
    }
    return out;
}

SlaterCheck slater_witness(const Instance& inst, bool literal) {
    if (inst.variant == Variant::SingleAllocation) return slater_witness_sa(inst, build_sa(inst));
    NiProgram ni = build_ni(inst);
    const auto& prog = ni.prog;
    const int n = inst.n(), p = inst.p, d = inst.d();
    const double Mw = std::max({inst.M, 4.0 * d, 1.0});
    const double wmax = inst.ni.omega.size() ? inst.ni.omega.maxCoeff() : 0.0;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.num_vars());
    for (int j = 0; j < p; ++j) {
        double lmax = inst.ni.lambda.col(j).maxCoeff();
        for (int i = 0; i < n; ++i) {
            x[prog.find(idx("v", {i, j}))] = literal ? 1.0 : 1.0 + 2.0 * lmax;
            x[prog.find(idx("w", {i, j}))] = 1.5 * Mw * inst.ni.lambda(i, j) * wmax;
            double u = 1.5 * Mw * inst.ni.omega[i] + 2.0;
            x[ni.u[i][j]] = u;
            std::vector<double> diff(d);
            for (int k = 0; k < d; ++k) diff[k] = -inst.demand.points[i][k];
            set_distance_aux(prog, x, std::to_string(i + 1) + "," + std::to_string(j + 1), d, inst.norm, diff, u);
        }
    }
    for (int j = 0; j < p; ++j)
        for (int jp = 0; jp < p; ++jp) {
            double mu = j < jp ? inst.ni.mu(j, jp) : 0.0;
            double t = 2.0 * Mw * mu + 1.0;
            x[prog.find(idx("t", {j, jp}))] = t;
            set_distance_aux(prog, x, "p" + std::to_string(j + 1) + "," + std::to_string(jp + 1), d, inst.norm,
                             std::vector<double>(d, 0.0), t);
        }
    complete_towers(prog, x);
    return slater_check(prog, x);
}

SlaterCheck slater_witness_sa(const Instance& inst, const SaProgram& sp) {
    const auto& prog = sp.prog;
    const int n = inst.n(), p = inst.p, d = inst.d();
    const double Mw = 2.0 * std::max(inst.M, 1.0) + 4.0 * d;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.num_vars());
    std::vector<Point> fac(p, Point::Zero(d));
    for (int j = 0; j < p; ++j) {
        if (d > 0) fac[j][0] = (j - (p - 1) / 2.0) * inst.M / (4.0 * p);
        for (int k = 0; k < d; ++k) x[sp.x[j][k]] = fac[j][k];
    }
    for (int i = 0; i < n; ++i) {
        x[sp.t[i]] = 3.0 * Mw;
        for (int j = 0; j < p; ++j) {
            if (sp.u[i][j] < 0) continue;
            x[sp.z[i][j]] = 1.0 / p;
            x[sp.u[i][j]] = 2.0 * Mw;
            std::vector<double> diff(d);
            for (int k = 0; k < d; ++k) diff[k] = fac[j][k] - inst.demand.points[i][k];
            set_distance_aux(prog, x, std::to_string(i + 1) + "," + std::to_string(j + 1), d, inst.norm, diff, 2.0 * Mw);
        }
    }
    for (std::size_t l = 0; l < sp.theta.size(); ++l) x[sp.theta[l]] = 4.0 * Mw + 1.0 / (l + 1.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < sp.w_cols; ++l) x[sp.w[i][l]] = 1.0 / n;
    if (sp.ordering == OrderingMode::SortingDual) {
        double lmax = inst.sa.lambda.size() ? inst.sa.lambda.maxCoeff() : 0.0;
        for (int i = 0; i < n; ++i) x[sp.dual_v[i]] = lmax * 3.0 * Mw + 1.0;
    }
    for (int j = 0; j < p; ++j) {
        double uk = 0.75 * inst.M;
        x[prog.find(idx("uK", {j}))] = uk;
        std::string tag = "K" + std::to_string(j + 1);
        for (int k = 0; k < d; ++k) {
            std::string t = tag + "," + std::to_string(k + 1);
            double y = std::abs(fac[j][k]) + inst.M / (8.0 * d);
            x[prog.find("y[" + t + "]")] = y;
            x[prog.find("zeta[" + t + "]")] =
                std::pow(2.0 * std::pow(y, inst.norm.r()) / std::pow(uk, inst.norm.r() - inst.norm.s()),
                         1.0 / inst.norm.s());
        }
    }
    complete_towers(prog, x);
    return slater_check(prog, x);
}

}  // namespace omloc
