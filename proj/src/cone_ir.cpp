#include "omloc/cone_ir.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace omloc {

AffExpr& AffExpr::operator+=(const AffExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

AffExpr& AffExpr::operator*=(double s) {
    for (auto& t : terms) t.coef *= s;
    constant *= s;
    return *this;
}

double AffExpr::eval(const Eigen::VectorXd& x) const {
    double v = constant;
    for (const auto& t : terms) v += t.coef * x[t.var];
    return v;
}

AffExpr operator+(AffExpr a, const AffExpr& b) { return a += b; }
AffExpr operator-(AffExpr a, const AffExpr& b) {
    AffExpr nb = b;
    nb *= -1.0;
    return a += nb;
}
AffExpr operator*(double s, AffExpr a) { return a *= s; }

VarHandle ConicProgram::add_var(const std::string& name, const std::string& role, double lb, double ub) {
    if (by_name_.count(name)) throw std::invalid_argument("duplicate variable name " + name);
    int idx = num_vars();
    vars_.push_back({name, role, lb, ub, false});
    by_name_[name] = idx;
    return {idx, name, role};
}

int ConicProgram::add_row(std::vector<Term> terms, Sense sense, double rhs, const std::string& family) {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("row references unknown variable");
    rows_.push_back({std::move(terms), sense, rhs, family});
    return static_cast<int>(rows_.size()) - 1;
}

int ConicProgram::add_row(const AffExpr& lhs, Sense sense, const AffExpr& rhs, const std::string& family) {
    AffExpr diff = lhs - rhs;
    return add_row(diff.terms, sense, -diff.constant, family);
}

int ConicProgram::add_cone(ConeBlock block) {
    for (const auto& e : block.entries)
        for (const auto& t : e.terms)
            if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("cone references unknown variable");
    int need = 0;
    switch (block.kind) {
    case ConeKind::Nonneg: need = 1; break;
    case ConeKind::SOC: need = 1; break;
    case ConeKind::RotatedSOC: need = 2; break;
    case ConeKind::PSD:
        if (static_cast<int>(block.entries.size()) != psd_packed_size(block.psd_side))
            throw std::invalid_argument("PSD block entry count does not match its side");
        break;
    }
    if (static_cast<int>(block.entries.size()) < need) throw std::invalid_argument("cone block too short");
    cones_.push_back(std::move(block));
    return static_cast<int>(cones_.size()) - 1;
}

void ConicProgram::mark_binary(int var) {
    auto& v = vars_.at(var);
    v.binary = true;
    v.lb = std::max(v.lb, 0.0);
    v.ub = std::min(v.ub, 1.0);
}

std::vector<int> ConicProgram::binaries() const {
    std::vector<int> out;
    for (int i = 0; i < num_vars(); ++i)
        if (vars_[i].binary) out.push_back(i);
    return out;
}

int ConicProgram::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

double ConicProgram::max_violation(const Eigen::VectorXd& x) const {
    double worst = 0.0;
    for (int i = 0; i < num_vars(); ++i) {
        worst = std::max(worst, vars_[i].lb - x[i]);
        worst = std::max(worst, x[i] - vars_[i].ub);
    }
    for (const auto& r : rows_) {
        double lhs = 0.0;
        for (const auto& t : r.terms) lhs += t.coef * x[t.var];
        double g = lhs - r.rhs;
        if (r.sense == Sense::Le) worst = std::max(worst, g);
        else if (r.sense == Sense::Ge) worst = std::max(worst, -g);
        else worst = std::max(worst, std::abs(g));
    }
    for (const auto& c : cones_) {
        std::vector<double> e(c.entries.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = c.entries[k].eval(x);
        switch (c.kind) {
        case ConeKind::Nonneg:
            for (double v : e) worst = std::max(worst, -v);
            break;
        case ConeKind::SOC: {
            double nrm = 0.0;
            for (std::size_t k = 1; k < e.size(); ++k) nrm += e[k] * e[k];
            worst = std::max(worst, std::sqrt(nrm) - e[0]);
            break;
        }
        case ConeKind::RotatedSOC: {
            double a = (e[0] + e[1]) / std::sqrt(2.0), b = (e[0] - e[1]) / std::sqrt(2.0);
            double nrm = b * b;
            for (std::size_t k = 2; k < e.size(); ++k) nrm += e[k] * e[k];
            worst = std::max(worst, std::sqrt(nrm) - a);
            break;
        }
        case ConeKind::PSD: {
            int m = c.psd_side;
            Eigen::MatrixXd S(m, m);
            int k = 0;
            for (int j = 0; j < m; ++j)
                for (int i = j; i < m; ++i, ++k) S(i, j) = S(j, i) = e[k];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
            worst = std::max(worst, -es.eigenvalues()[0]);
            break;
        }
        }
    }
    return worst;
}

namespace {
std::string term_list(const std::vector<Term>& terms, const std::vector<VarInfo>& vars, double constant = 0.0) {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms) {
        if (!first) os << (t.coef < 0 ? " - " : " + ");
        else if (t.coef < 0) os << "-";
        double a = std::abs(t.coef);
        if (a != 1.0) os << a << "*";
        os << vars[t.var].name;
        first = false;
    }
    if (constant != 0.0 || first) {
        if (!first) os << (constant < 0 ? " - " : " + ") << std::abs(constant);
        else os << constant;
    }
    return os.str();
}
const char* kind_name(ConeKind k) {
    switch (k) {
    case ConeKind::Nonneg: return "nonneg";
    case ConeKind::SOC: return "soc";
    case ConeKind::RotatedSOC: return "rsoc";
    case ConeKind::PSD: return "psd";
    }
    return "?";
}
}  // namespace

std::string ConicProgram::dump() const {
    std::ostringstream os;
    os << "vars " << num_vars() << " rows " << rows_.size() << " cones " << cones_.size() << "\n";
    os << "min " << term_list(objective_.terms, vars_, objective_.constant) << "\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        const char* s = r.sense == Sense::Le ? "<=" : r.sense == Sense::Eq ? "==" : ">=";
        os << "[" << r.family << "] " << term_list(r.terms, vars_) << " " << s << " " << r.rhs << "\n";
    }
    for (const auto& c : cones_) {
        os << "[" << c.family << "] " << kind_name(c.kind) << "(";
        for (std::size_t k = 0; k < c.entries.size(); ++k) {
            if (k) os << ", ";
            os << term_list(c.entries[k].terms, vars_, c.entries[k].constant);
        }
        os << ")\n";
    }
    for (const auto& v : vars_) {
        if (v.binary) os << "binary " << v.name << "\n";
        else if (v.lb != -kInf || v.ub != kInf) os << "bounds " << v.lb << " <= " << v.name << " <= " << v.ub << "\n";
    }
    return os.str();
}

VarHandle add_abs_value(ConicProgram& prog, const AffExpr& x, double a, const std::string& name,
                        const std::string& family) {
    VarHandle y = prog.add_var(name, "abs", 0.0, kInf);
    AffExpr diff = x;
    diff.constant -= a;
    prog.add_row(AffExpr::var(y.index) - diff, Sense::Ge, AffExpr(0.0), family);
    prog.add_row(AffExpr::var(y.index) + diff, Sense::Ge, AffExpr(0.0), family);
    return y;
}

PowerTower add_rational_power(ConicProgram& prog, const VarHandle& y, const VarHandle& zeta, const VarHandle& u,
                              int r, int s, const std::string& prefix, const std::string& family) {
    if (r < s || s < 1) throw std::invalid_argument("rational power needs r >= s >= 1");
    if (y.index < 0 || zeta.index < 0 || u.index < 0) throw std::invalid_argument("rational power on unset handle");
    PowerTower out;
    int l = 0;
    while ((1 << l) < r) ++l;
    out.raw_blocks = (1 << l) - 1;
    if (r == s) {
        // y^r <= zeta^r is y <= zeta on the orthant.
        prog.add_row(AffExpr::var(y.index), Sense::Le, AffExpr::var(zeta.index), family);
        out.linear_rows = 1;
        return out;
    }
    std::vector<int> level;
    level.reserve(1 << l);
    for (int k = 0; k < s; ++k) level.push_back(zeta.index);
    for (int k = 0; k < r - s; ++k) level.push_back(u.index);
    for (int k = 0; k < (1 << l) - r; ++k) level.push_back(y.index);

    auto emit = [&](int a, int b, int w) {
        ConeBlock cb;
        cb.kind = ConeKind::RotatedSOC;
        cb.family = family;
        cb.entries = {AffExpr::var(a, 0.5), AffExpr::var(b), AffExpr::var(w)};
        out.cone_indices.push_back(prog.add_cone(std::move(cb)));
        ++out.cone_blocks;
    };
    int depth = 0;
    while (level.size() > 2) {
        std::vector<int> next;
        for (std::size_t k = 0; k < level.size(); k += 2) {
            int a = level[k], b = level[k + 1];
            if (a == b) {
                next.push_back(a);  // sqrt(a*a) = a
                continue;
            }
            VarHandle w = prog.add_var(prefix + "_g" + std::to_string(depth) + "_" + std::to_string(k / 2), "tower",
                                       0.0, kInf);
            out.aux_vars.push_back(w.index);
            emit(a, b, w.index);
            next.push_back(w.index);
        }
        level.swap(next);
        ++depth;
    }
    if (level[0] == level[1]) {
        prog.add_row(AffExpr::var(y.index), Sense::Le, AffExpr::var(level[0]), family);
        out.linear_rows = 1;
    } else {
        emit(level[0], level[1], y.index);
    }
    return out;
}

NormEpigraph add_norm_epigraph(ConicProgram& prog, const std::vector<AffExpr>& expr, double omega, int r, int s,
                               const std::string& prefix, const std::string& abs_family,
                               const std::string& power_family, const std::string& sum_family) {
    if (!(omega >= 0.0)) throw std::invalid_argument("norm weight must be nonnegative");
    NormEpigraph ne;
    ne.u = prog.add_var(prefix + "_u", "u", 0.0, kInf);
    AffExpr sum;
    for (std::size_t k = 0; k < expr.size(); ++k) {
        VarHandle y = add_abs_value(prog, expr[k], 0.0, prefix + "_y" + std::to_string(k + 1), abs_family);
        ne.linear_rows += 2;
        VarHandle z = prog.add_var(prefix + "_zeta" + std::to_string(k + 1), "zeta", 0.0, kInf);
        auto tower = add_rational_power(prog, y, z, ne.u, r, s, prefix + "_t" + std::to_string(k + 1), power_family);
        ne.cone_blocks += tower.cone_blocks;
        ne.linear_rows += tower.linear_rows;
        ne.y.push_back(y);
        ne.zeta.push_back(z);
        sum.add(z.index, std::pow(omega, static_cast<double>(r) / s));
    }
    prog.add_row(sum, Sense::Le, AffExpr::var(ne.u.index), sum_family);
    ne.linear_rows += 1;
    return ne;
}

int ConeSpec::total() const {
    int t = zero + nonneg;
    for (int q : soc) t += q;
    for (int m : psd) t += psd_packed_size(m);
    return t;
}

int psd_packed_size(int side) { return side * (side + 1) / 2; }

StandardForm to_standard_form(const ConicProgram& prog) {
    StandardForm sf;
    const int n = prog.num_vars();
    sf.c = Eigen::VectorXd::Zero(n);
    for (const auto& t : prog.objective().terms) sf.c[t.var] += t.coef;
    sf.c0 = prog.objective().constant;
    sf.binaries = prog.binaries();
    sf.source_rows = static_cast<int>(prog.rows().size());
    sf.source_cones = static_cast<int>(prog.cones().size());

    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> b;
    int row = 0;
    // Every block below emits rows of the form  a'x + s = beta.
    auto push_row = [&](const std::vector<Term>& terms, double scale, double beta) {
        for (const auto& t : terms)
            if (t.coef != 0.0) trip.emplace_back(row, t.var, scale * t.coef);
        b.push_back(beta);
        ++row;
    };
    // Slack equals the affine expression e: -a'x + s = const.
    auto push_expr = [&](const AffExpr& e, double scale) { push_row(e.terms, -scale, scale * e.constant); };

    for (const auto& r : prog.rows())
        if (r.sense == Sense::Eq) push_row(r.terms, 1.0, r.rhs), ++sf.cones.zero;
    for (int i = 0; i < n; ++i) {
        const auto& v = prog.vars()[i];
        if (v.lb == v.ub && std::isfinite(v.lb)) push_row({{i, 1.0}}, 1.0, v.lb), ++sf.cones.zero;
    }
    for (const auto& r : prog.rows()) {
        if (r.sense == Sense::Le) push_row(r.terms, 1.0, r.rhs), ++sf.cones.nonneg;
        else if (r.sense == Sense::Ge) push_row(r.terms, -1.0, -r.rhs), ++sf.cones.nonneg;
    }
    for (int i = 0; i < n; ++i) {
        const auto& v = prog.vars()[i];
        if (v.lb == v.ub && std::isfinite(v.lb)) continue;
        if (std::isfinite(v.lb)) push_row({{i, -1.0}}, 1.0, -v.lb), ++sf.cones.nonneg;
        if (std::isfinite(v.ub)) push_row({{i, 1.0}}, 1.0, v.ub), ++sf.cones.nonneg;
    }
    for (const auto& c : prog.cones())
        if (c.kind == ConeKind::Nonneg)
            for (const auto& e : c.entries) push_expr(e, 1.0), ++sf.cones.nonneg;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (const auto& c : prog.cones()) {
        if (c.kind == ConeKind::SOC) {
            for (const auto& e : c.entries) push_expr(e, 1.0);
            sf.cones.soc.push_back(static_cast<int>(c.entries.size()));
        } else if (c.kind == ConeKind::RotatedSOC) {
            push_expr(r2 * (c.entries[0] + c.entries[1]), 1.0);
            push_expr(r2 * (c.entries[0] - c.entries[1]), 1.0);
            for (std::size_t k = 2; k < c.entries.size(); ++k) push_expr(c.entries[k], 1.0);
            sf.cones.soc.push_back(static_cast<int>(c.entries.size()));
        }
    }
    const double sq2 = std::sqrt(2.0);
    for (const auto& c : prog.cones()) {
        if (c.kind != ConeKind::PSD) continue;
        int m = c.psd_side, k = 0;
        for (int j = 0; j < m; ++j)
            for (int i = j; i < m; ++i, ++k) push_expr(c.entries[k], i == j ? 1.0 : sq2);
        sf.cones.psd.push_back(m);
    }
    sf.A.resize(row, n);
    sf.A.setFromTriplets(trip.begin(), trip.end());
    sf.A.makeCompressed();
    sf.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    return sf;
}

}  // namespace omloc
