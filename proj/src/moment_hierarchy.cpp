#include "omloc/moment_hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace omloc {

std::vector<std::string> SaLayout::names() const {
    std::vector<std::string> out(count());
    auto idx = [](std::initializer_list<int> v) {
        std::string s = "[";
        bool first = true;
        for (int a : v) {
            if (!first) s += ",";
            s += std::to_string(a + 1);
            first = false;
        }
        return s + "]";
    };
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < d; ++k) out[x(j, k)] = "x" + idx({j, k});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            out[z(i, j)] = "z" + idx({i, j});
            out[u(i, j)] = "u" + idx({i, j});
            for (int k = 0; k < d; ++k) {
                out[v(i, j, k)] = "v" + idx({i, j, k});
                out[zeta(i, j, k)] = "zeta" + idx({i, j, k});
            }
        }
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) out[w(i, l)] = "w" + idx({i, l});
        out[t(i)] = "t" + idx({i});
        out[theta(i)] = "theta" + idx({i});
    }
    return out;
}

std::vector<int> SaLayout::facility_action(const std::vector<int>& perm) const {
    std::vector<int> img(count());
    for (int q = 0; q < count(); ++q) img[q] = q;
    for (int j = 0; j < p; ++j) {
        const int pj = perm[j];
        for (int k = 0; k < d; ++k) img[x(j, k)] = x(pj, k);
        for (int i = 0; i < n; ++i) {
            img[z(i, j)] = z(i, pj);
            img[u(i, j)] = u(i, pj);
            for (int k = 0; k < d; ++k) {
                img[v(i, j, k)] = v(i, pj, k);
                img[zeta(i, j, k)] = zeta(i, pj, k);
            }
        }
    }
    return img;
}

int SaLayout::facility_of(int var) const {
    if (var < p * d) return var / d;
    int q = var - p * d;
    if (q < 2 * n * p) return (q % (n * p)) % p;
    q -= 2 * n * p;
    if (q < 2 * n * p * d) return ((q % (n * p * d)) / d) % p;
    return -1;
}

int SaPolynomialProgram::nc1() const { return static_cast<int>(h.size()); }

SaPolynomialProgram sa_polynomial_program(const Instance& inst) {
    if (inst.variant != Variant::SingleAllocation) throw std::invalid_argument("hierarchy needs a single-allocation instance");
    const int n = inst.n(), p = inst.p, d = inst.d();
    const int r = inst.norm.r(), s = inst.norm.s();
    SaPolynomialProgram prog;
    prog.layout = SaLayout(n, p, d);
    const SaLayout& L = prog.layout;
    const double M = inst.M > 0.0 ? inst.M : bound_M(inst.demand, inst.norm);
    std::vector<double> UB = inst.UB;
    if (static_cast<int>(UB.size()) != n) {
        Instance tmp = inst;
        tmp.M = M;
        UB = compute_UB(tmp);
    }
    const double ub_max = *std::max_element(UB.begin(), UB.end());
    prog.M_K = M * std::pow(static_cast<double>(d), std::max(0.0, 0.5 - 1.0 / inst.norm.tau()));
    auto V = [](int q) { return Polynomial::var(q); };
    auto add = [](std::vector<PolyConstraint>& list, Polynomial g, bool eq, const std::string& fam, int group) {
        list.push_back({std::move(g), eq, fam, group});
    };

    for (int l = 0; l < n; ++l) prog.objective += inst.sa.lambda[l] * V(L.theta(l));

    for (int j = 0; j < p; ++j) {
        Polynomial g(prog.M_K * prog.M_K);
        for (int k = 0; k < d; ++k) g -= V(L.x(j, k)) * V(L.x(j, k));
        add(prog.K, g, false, "K", 0);
    }

    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            add(prog.h, V(L.theta(l)) + Polynomial(UB[i]) - UB[i] * V(L.w(i, l)) - V(L.t(i)), false, "h1", p + l + 1);
    for (int l = 0; l + 1 < n; ++l) add(prog.h, V(L.theta(l)) - V(L.theta(l + 1)), false, "h2", p + l + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            add(prog.h, V(L.t(i)) + Polynomial(UB[i]) - UB[i] * V(L.z(i, j)) - V(L.u(i, j)), false, "h3", j + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < d; ++k) {
                const double a = inst.demand.points[i][k];
                add(prog.h, V(L.v(i, j, k)) - V(L.x(j, k)) + Polynomial(a), false, "h4", j + 1);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < d; ++k) {
                const double a = inst.demand.points[i][k];
                add(prog.h, V(L.v(i, j, k)) + V(L.x(j, k)) - Polynomial(a), false, "h5", j + 1);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < d; ++k) {
                Polynomial g = V(L.zeta(i, j, k)).pow(s) * V(L.u(i, j)).pow(r - s) - V(L.v(i, j, k)).pow(r);
                add(prog.h, g, false, "h6", j + 1);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            Polynomial g = V(L.u(i, j));
            for (int k = 0; k < d; ++k) g -= V(L.zeta(i, j, k));
            add(prog.h, g, false, "h7", j + 1);
        }
    for (int i = 0; i < n; ++i) {
        Polynomial g(-1.0);
        for (int j = 0; j < p; ++j) g += V(L.z(i, j));
        add(prog.h, g, true, "h8", -1);
    }
    for (int l = 0; l < n; ++l) {
        Polynomial g(-1.0);
        for (int i = 0; i < n; ++i) g += V(L.w(i, l));
        add(prog.h, g, true, "h9", p + l + 1);
    }
    for (int i = 0; i < n; ++i) {
        Polynomial g(-1.0);
        for (int l = 0; l < n; ++l) g += V(L.w(i, l));
        add(prog.h, g, true, "h10", -1);
    }

    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) add(prog.binary, V(L.w(i, l)).pow(2) - V(L.w(i, l)), true, "bin-w", p + l + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) add(prog.binary, V(L.z(i, j)).pow(2) - V(L.z(i, j)), true, "bin-z", j + 1);

    auto box = [&](int q, double B, int group) { add(prog.domain, V(q) * (Polynomial(B) - V(q)), false, "domain", group); };
    for (int l = 0; l < n; ++l) box(L.theta(l), ub_max, 0);
    for (int i = 0; i < n; ++i) box(L.t(i), UB[i], 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            box(L.u(i, j), UB[i], j + 1);
            for (int k = 0; k < d; ++k) {
                box(L.v(i, j, k), UB[i], j + 1);
                box(L.zeta(i, j, k), UB[i], j + 1);
            }
        }
    return prog;
}

MomentTable::MomentTable() { intern(Monomial()); }

int MomentTable::intern(const Monomial& m) {
    auto it = ids_.find(m);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(by_id_.size());
    ids_.emplace(m, id);
    by_id_.push_back(m);
    return id;
}

int MomentTable::find(const Monomial& m) const {
    auto it = ids_.find(m);
    return it == ids_.end() ? -1 : it->second;
}

std::vector<int> MomentTable::canonicalize() {
    std::vector<int> order(by_id_.size());
    for (std::size_t q = 0; q < order.size(); ++q) order[q] = static_cast<int>(q);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return by_id_[a] < by_id_[b]; });
    std::vector<int> remap(by_id_.size());
    std::vector<Monomial> sorted(by_id_.size());
    for (std::size_t q = 0; q < order.size(); ++q) {
        remap[order[q]] = static_cast<int>(q);
        sorted[q] = by_id_[order[q]];
    }
    by_id_ = std::move(sorted);
    ids_.clear();
    for (std::size_t q = 0; q < by_id_.size(); ++q) ids_.emplace(by_id_[q], static_cast<int>(q));
    return remap;
}

bool MomentMatrixBlock::is_moment() const {
    const auto& t = generator.terms();
    return t.size() == 1 && t.begin()->first.is_constant() && t.begin()->second == 1.0;
}

int MomentMatrixBlock::entry_index(int row, int col) const {
    if (row < col) std::swap(row, col);
    const int n = side();
    return col * n - col * (col - 1) / 2 + (row - col);
}

std::vector<std::pair<int, double>> MomentMatrixBlock::entry(int row, int col) const {
    const int e = entry_index(row, col);
    std::vector<std::pair<int, double>> out;
    for (int q = offsets[e]; q < offsets[e + 1]; ++q) out.push_back({ids[q], coefs[q]});
    return out;
}

Eigen::MatrixXd MomentMatrixBlock::evaluate(const Eigen::VectorXd& y) const {
    const int n = side();
    Eigen::MatrixXd M(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = c; r < n; ++r) {
            const int e = entry_index(r, c);
            double s = 0.0;
            for (int q = offsets[e]; q < offsets[e + 1]; ++q) s += coefs[q] * y[ids[q]];
            M(r, c) = M(c, r) = s;
        }
    return M;
}

namespace {

int ceil_half(int deg) { return (deg + 1) / 2; }

// Entries as monomial/coef lists, lower triangle column-major; no table access so it can run on any thread.
using RawEntries = std::vector<std::vector<std::pair<Monomial, double>>>;

RawEntries raw_entries(const std::vector<Monomial>& basis, const Polynomial& g) {
    const int n = static_cast<int>(basis.size());
    RawEntries out;
    out.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int c = 0; c < n; ++c)
        for (int r = c; r < n; ++r) {
            const Monomial ab = basis[r] * basis[c];
            std::vector<std::pair<Monomial, double>> e;
            for (const auto& [m, coef] : g.terms()) e.push_back({m * ab, coef});
            out.push_back(std::move(e));
        }
    return out;
}

void intern_entries(MomentTable& table, const RawEntries& raw, MomentMatrixBlock& b) {
    b.offsets.assign(1, 0);
    for (const auto& e : raw) {
        for (const auto& [m, c] : e) {
            b.ids.push_back(table.intern(m));
            b.coefs.push_back(c);
        }
        b.offsets.push_back(static_cast<int>(b.ids.size()));
    }
}

MomentMatrixBlock make_block(MomentTable& table, const Polynomial& g, const std::vector<int>& vars, int basis_deg,
                             const std::string& name, int group) {
    MomentMatrixBlock b;
    b.name = name;
    b.group = group;
    b.generator = g;
    b.basis = monomial_basis(vars, basis_deg);
    intern_entries(table, raw_entries(b.basis, g), b);
    return b;
}

}  // namespace

MomentMatrixBlock moment_matrix(MomentTable& table, const std::vector<int>& vars, int r) {
    if (r < 0) throw std::invalid_argument("moment_matrix needs r >= 0");
    return make_block(table, Polynomial(1.0), vars, r, "moment", 0);
}

MomentMatrixBlock localizing_matrix(MomentTable& table, const Polynomial& g, const std::vector<int>& vars, int r) {
    if (g.degree() > 2 * r) throw std::invalid_argument("localizing_matrix: deg g exceeds 2r");
    return make_block(table, g, vars, r - ceil_half(g.degree()), "localizing", 0);
}

int MomentRelaxation::num_moment_blocks() const {
    int c = 0;
    for (const auto& b : blocks) c += b.is_moment() ? 1 : 0;
    return c;
}

int MomentRelaxation::largest_side() const {
    int s = 0;
    for (const auto& b : blocks) s = std::max(s, b.side());
    return s;
}

std::vector<int> MomentRelaxation::orphan_ids() const {
    std::vector<char> seen(table.size(), 0);
    for (const auto& b : blocks)
        for (int id : b.ids) seen[id] = 1;
    for (const auto& e : equalities)
        for (const auto& [id, c] : e.terms) seen[id] = 1;
    std::vector<int> out;
    for (int q = 0; q < table.size(); ++q)
        if (!seen[q]) out.push_back(q);
    return out;
}

int relaxation_r0(const SaPolynomialProgram& prog) {
    int r0 = ceil_half(prog.objective.degree());
    for (const auto* list : {&prog.K, &prog.h, &prog.binary, &prog.domain})
        for (const auto& c : *list) r0 = std::max(r0, ceil_half(c.g.degree()));
    return r0;
}

std::vector<std::vector<int>> sparse_index_sets(const SaLayout& L) {
    const int n = L.n, p = L.p, d = L.d;
    std::vector<std::vector<int>> sets(1 + p + n);
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < d; ++k) sets[0].push_back(L.x(j, k));
    for (int l = 0; l < n; ++l) sets[0].push_back(L.theta(l));
    for (int i = 0; i < n; ++i) sets[0].push_back(L.t(i));
    for (int j = 0; j < p; ++j) {
        auto& s = sets[1 + j];
        for (int k = 0; k < d; ++k) s.push_back(L.x(j, k));
        for (int i = 0; i < n; ++i) {
            s.push_back(L.z(i, j));
            s.push_back(L.u(i, j));
            for (int k = 0; k < d; ++k) {
                s.push_back(L.v(i, j, k));
                s.push_back(L.zeta(i, j, k));
            }
        }
        for (int i = 0; i < n; ++i) s.push_back(L.t(i));
    }
    for (int l = 0; l < n; ++l) {
        auto& s = sets[1 + p + l];
        for (int i = 0; i < n; ++i) s.push_back(L.w(i, l));
        s.push_back(L.theta(l));
        if (l + 1 < n) s.push_back(L.theta(l + 1));
        for (int i = 0; i < n; ++i) s.push_back(L.t(i));
    }
    for (auto& s : sets) std::sort(s.begin(), s.end());
    return sets;
}

RipReport verify_rip(const std::vector<std::vector<int>>& blocks, const std::vector<int>& core) {
    RipReport rep;
    std::set<int> core_set(core.begin(), core.end());
    std::set<int> seen;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (j > 0) {
            for (int v : blocks[j])
                if (seen.count(v) && !core_set.count(v)) rep.offending.push_back(v);
            if (!rep.offending.empty()) {
                rep.holds = false;
                rep.first_violation = static_cast<int>(j) + 1;
                return rep;
            }
        }
        seen.insert(blocks[j].begin(), blocks[j].end());
    }
    return rep;
}

namespace {

struct BlockJob {
    const Polynomial* g;
    int group;
    int basis_deg;
    std::string name;
};

MomentRelaxation build_relaxation(const Instance& inst, int r, const HierarchyOptions& opt, bool sparse) {
    SaPolynomialProgram prog = sa_polynomial_program(inst);
    const SaLayout& L = prog.layout;
    MomentRelaxation rel;
    rel.order = r;
    rel.r0 = relaxation_r0(prog);
    if (opt.domain_blocks == false) {
        int r0 = ceil_half(prog.objective.degree());
        for (const auto* list : {&prog.K, &prog.h, &prog.binary})
            for (const auto& c : *list) r0 = std::max(r0, ceil_half(c.g.degree()));
        rel.r0 = r0;
    }
    if (r < rel.r0) throw std::invalid_argument("relaxation order below r0 = " + std::to_string(rel.r0));
    rel.var_names = L.names();

    std::vector<int> all(L.count());
    for (int q = 0; q < L.count(); ++q) all[q] = q;
    if (sparse) rel.groups = sparse_index_sets(L);
    else rel.groups = {all};

    auto group_of = [&](const PolyConstraint& c) -> int {
        if (!sparse) return 0;
        if (c.group < 0) return -1;
        std::vector<char> mask(L.count(), 0);
        for (int v : rel.groups[c.group]) mask[v] = 1;
        if (!c.g.supported_in(mask)) throw std::logic_error("constraint " + c.family + " not supported in its group");
        return c.group;
    };

    Polynomial one(1.0);
    std::vector<BlockJob> jobs;
    for (std::size_t gi = 0; gi < rel.groups.size(); ++gi)
        jobs.push_back({&one, static_cast<int>(gi), r, "moment[" + std::to_string(gi) + "]"});
    auto add_loc = [&](const std::vector<PolyConstraint>& list) {
        std::map<std::string, int> counter;
        for (const auto& c : list) {
            if (c.equality) continue;
            const int grp = group_of(c);
            if (grp < 0) throw std::logic_error("inequality without a group");
            jobs.push_back({&c.g, grp, r - ceil_half(c.g.degree()),
                            c.family + "[" + std::to_string(++counter[c.family]) + "]"});
        }
    };
    add_loc(prog.K);
    add_loc(prog.h);
    if (opt.domain_blocks) add_loc(prog.domain);

    std::vector<std::vector<Monomial>> bases(jobs.size());
    std::vector<RawEntries> raws(jobs.size());
    auto work = [&](std::size_t a) {
        bases[a] = monomial_basis(rel.groups[jobs[a].group], jobs[a].basis_deg);
        raws[a] = raw_entries(bases[a], *jobs[a].g);
    };
    const int workers = std::max(1, opt.workers);
    if (workers == 1) {
        for (std::size_t a = 0; a < jobs.size(); ++a) work(a);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t a = w; a < jobs.size(); a += workers) work(a);
            });
        for (auto& th : pool) th.join();
    }
    for (std::size_t a = 0; a < jobs.size(); ++a) {
        MomentMatrixBlock b;
        b.name = jobs[a].name;
        b.group = jobs[a].group;
        b.generator = *jobs[a].g;
        b.basis = std::move(bases[a]);
        intern_entries(rel.table, raws[a], b);
        raws[a].clear();
        rel.blocks.push_back(std::move(b));
    }

    rel.equalities.push_back({{{0, 1.0}}, 1.0, "normalization"});
    std::set<std::vector<std::pair<int, double>>> rows_seen;
    auto add_equalities = [&](const std::vector<PolyConstraint>& list) {
        for (const auto& c : list) {
            if (!c.equality) continue;
            int grp = -1;
            if (!sparse) grp = 0;
            else if (c.group >= 0) grp = group_of(c);
            else
                for (std::size_t gi = 0; gi < rel.groups.size() && grp < 0; ++gi) {
                    std::vector<char> mask(L.count(), 0);
                    for (int v : rel.groups[gi]) mask[v] = 1;
                    if (c.g.supported_in(mask)) grp = static_cast<int>(gi);
                }
            std::vector<Monomial> mult{Monomial()};
            if (opt.equalities == EqualityMode::Ideal && grp >= 0)
                mult = monomial_basis(rel.groups[grp], 2 * r - c.g.degree());
            for (const auto& m : mult) {
                LinearEquality eq;
                eq.family = c.family;
                std::map<int, double> acc;
                for (const auto& [mono, coef] : c.g.terms()) {
                    const Monomial prod = mono * m;
                    int id = rel.table.find(prod);
                    if (id < 0) id = rel.table.intern(prod);
                    acc[id] += coef;
                }
                for (const auto& [id, coef] : acc)
                    if (id == 0) eq.rhs -= coef;
                    else if (coef != 0.0) eq.terms.push_back({id, coef});
                if (eq.terms.empty()) continue;
                std::vector<std::pair<int, double>> key = eq.terms;
                key.push_back({-1, eq.rhs});
                if (rows_seen.insert(key).second) rel.equalities.push_back(std::move(eq));
            }
        }
    };
    add_equalities(prog.h);
    add_equalities(prog.binary);

    for (const auto& [mono, coef] : prog.objective.terms()) rel.objective.push_back({rel.table.intern(mono), coef});

    const std::vector<int> remap = rel.table.canonicalize();
    for (auto& b : rel.blocks)
        for (int& id : b.ids) id = remap[id];
    for (auto& e : rel.equalities) {
        for (auto& [id, c] : e.terms) id = remap[id];
        std::sort(e.terms.begin(), e.terms.end());
    }
    for (auto& [id, c] : rel.objective) id = remap[id];
    std::sort(rel.objective.begin(), rel.objective.end());
    return rel;
}

}  // namespace

MomentRelaxation build_dense(const Instance& inst, int r, const HierarchyOptions& opt) {
    return build_relaxation(inst, r, opt, false);
}

MomentRelaxation build_sparse(const Instance& inst, int r, const HierarchyOptions& opt) {
    return build_relaxation(inst, r, opt, true);
}

FlatnessReport check_rank_condition(const MomentTable& table, const Eigen::VectorXd& y, const std::vector<int>& vars,
                                    int r, int r0, double rank_tol) {
    auto numeric = [&](int order) {
        const std::vector<Monomial> basis = monomial_basis(vars, order);
        const int n = static_cast<int>(basis.size());
        Eigen::MatrixXd M(n, n);
        for (int c = 0; c < n; ++c)
            for (int rr = c; rr < n; ++rr) {
                const int id = table.find(basis[rr] * basis[c]);
                if (id < 0) throw std::invalid_argument("moment missing from table: " + (basis[rr] * basis[c]).str());
                M(rr, c) = M(c, rr) = y[id];
            }
        return M;
    };
    auto rank_of = [&](const Eigen::MatrixXd& M, Eigen::VectorXd* sv) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        Eigen::VectorXd s = es.eigenvalues().cwiseAbs();
        std::sort(s.data(), s.data() + s.size(), std::greater<double>());
        if (sv) *sv = s;
        if (s.size() == 0 || s[0] <= 0.0) return 0;
        int k = 0;
        for (int q = 0; q < s.size(); ++q)
            if (s[q] >= rank_tol * s[0]) ++k;
        return k;
    };
    FlatnessReport rep;
    rep.rank_r = rank_of(numeric(r), &rep.singular_values);
    rep.rank_low = rank_of(numeric(std::max(0, r - r0)), nullptr);
    rep.flat = rep.rank_r == rep.rank_low;
    rep.phi = rep.flat ? rep.rank_r : 0;
    return rep;
}

Eigen::VectorXd dirac_moments(const MomentTable& table, const Eigen::VectorXd& point) {
    Eigen::VectorXd y(table.size());
    for (int q = 0; q < table.size(); ++q) y[q] = table.monomial(q).eval(point);
    return y;
}

ConicProgram to_conic_program(const MomentRelaxation& rel) {
    ConicProgram out;
    for (int q = 0; q < rel.table.size(); ++q) out.add_var("y" + std::to_string(q), "moment");
    for (const auto& e : rel.equalities) {
        std::vector<Term> terms;
        for (const auto& [id, c] : e.terms) terms.push_back({id, c});
        out.add_row(std::move(terms), Sense::Eq, e.rhs, e.family);
    }
    for (const auto& b : rel.blocks) {
        ConeBlock cb;
        cb.kind = ConeKind::PSD;
        cb.psd_side = b.side();
        cb.family = b.name;
        const int entries = static_cast<int>(b.offsets.size()) - 1;
        cb.entries.resize(entries);
        for (int e = 0; e < entries; ++e)
            for (int q = b.offsets[e]; q < b.offsets[e + 1]; ++q) cb.entries[e].add(b.ids[q], b.coefs[q]);
        out.add_cone(std::move(cb));
    }
    AffExpr obj;
    for (const auto& [id, c] : rel.objective) obj.add(id, c);
    out.set_objective(obj);
    return out;
}

RelaxationSolve solve_relaxation(const MomentRelaxation& rel, const SolverSettings& settings) {
    SolverSettings s = settings;
    s.max_psd_side = std::max(s.max_psd_side, rel.largest_side());
    const Solution sol = solve(to_conic_program(rel), s);
    RelaxationSolve out;
    out.status = sol.status;
    out.value = sol.objective;
    out.y = sol.x;
    out.iterations = sol.iterations;
    out.seconds = sol.solve_seconds;
    return out;
}

void write_sdpa(const MomentRelaxation& rel, std::ostream& os) {
    struct Key {
        int mat, block, i, j;
        bool operator<(const Key& o) const {
            return std::tie(mat, block, i, j) < std::tie(o.mat, o.block, o.i, o.j);
        }
    };
    std::map<Key, double> entries;
    const int m = rel.table.size() - 1;
    // F_0 is subtracted in SDPA, so constant terms enter with a flipped sign.
    auto put = [&](int id, int block, int i, int j, double c) {
        if (c == 0.0) return;
        entries[{id, block, i, j}] += id == 0 ? -c : c;
    };
    for (std::size_t b = 0; b < rel.blocks.size(); ++b) {
        const auto& blk = rel.blocks[b];
        const int n = blk.side();
        for (int c = 0; c < n; ++c)
            for (int r = c; r < n; ++r) {
                const int e = blk.entry_index(r, c);
                for (int q = blk.offsets[e]; q < blk.offsets[e + 1]; ++q)
                    put(blk.ids[q], static_cast<int>(b) + 1, c + 1, r + 1, blk.coefs[q]);
            }
    }
    int diag = 0;
    const int diag_block = static_cast<int>(rel.blocks.size()) + 1;
    for (const auto& e : rel.equalities) {
        if (e.family == "normalization") continue;
        for (int sign : {1, -1}) {
            ++diag;
            for (const auto& [id, c] : e.terms) put(id, diag_block, diag, diag, sign * c);
            put(0, diag_block, diag, diag, -sign * e.rhs);
        }
    }
    std::vector<double> cvec(m + 1, 0.0);
    for (const auto& [id, c] : rel.objective) cvec[id] += c;

    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
        return std::string(buf);
    };
    os << "\"moment relaxation order " << rel.order << ", y_0 = 1 substituted\n";
    os << m << "\n";
    os << rel.blocks.size() + (diag > 0 ? 1 : 0) << "\n";
    for (std::size_t b = 0; b < rel.blocks.size(); ++b) os << (b ? " " : "") << rel.blocks[b].side();
    if (diag > 0) os << " " << -diag;
    os << "\n";
    for (int q = 1; q <= m; ++q) os << (q > 1 ? " " : "") << num(cvec[q]);
    os << "\n";
    for (const auto& [k, v] : entries) {
        if (v == 0.0) continue;
        os << k.mat << " " << k.block << " " << k.i << " " << k.j << " " << num(v) << "\n";
    }
}

}  // namespace omloc
