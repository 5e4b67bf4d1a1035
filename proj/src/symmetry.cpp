#include "omloc/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace omloc {

int Partition::total() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::string Partition::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t q = 0; q < parts.size(); ++q) os << (q ? "," : "") << parts[q];
    os << ")";
    return os.str();
}

std::vector<Partition> partitions(int p) {
    std::vector<Partition> out;
    if (p < 0) return out;
    if (p == 0) {
        out.push_back(Partition{});
        return out;
    }
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxpart) {
        if (left == 0) {
            out.push_back(Partition{cur});
            return;
        }
        for (int a = std::min(left, maxpart); a >= 1; --a) {
            cur.push_back(a);
            rec(left - a, a);
            cur.pop_back();
        }
    };
    rec(p, p);
    return out;
}

bool dominates(const Partition& a, const Partition& b) {
    if (a.total() != b.total()) return false;
    const int len = std::max(a.length(), b.length());
    int sa = 0, sb = 0;
    for (int i = 0; i < len; ++i) {
        sa += i < a.length() ? a.parts[i] : 0;
        sb += i < b.length() ? b.parts[i] : 0;
        if (sa < sb) return false;
    }
    return true;
}

long long standard_tableaux_count(const Partition& shape) {
    const int n = shape.total();
    std::vector<int> conj(shape.length() ? shape.parts[0] : 0, 0);
    for (int r = 0; r < shape.length(); ++r)
        for (int c = 0; c < shape.parts[r]; ++c) ++conj[c];
    // n! / prod hooks, accumulated as a ratio of exact integers.
    long double num = 1.0L;
    for (int q = 2; q <= n; ++q) num *= q;
    for (int r = 0; r < shape.length(); ++r)
        for (int c = 0; c < shape.parts[r]; ++c) num /= (shape.parts[r] - c - 1) + (conj[c] - r - 1) + 1;
    return static_cast<long long>(std::llround(num));
}

Content content_of(const std::vector<int>& beta) {
    std::vector<int> order;
    std::map<int, int> count;
    for (int b : beta) {
        if (!count.count(b)) order.push_back(b);
        ++count[b];
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return count[a] > count[b]; });
    Content c;
    c.values = order;
    for (int v : order) c.mu.parts.push_back(count[v]);
    return c;
}

bool Tableau::semistandard(TableauConvention conv) const {
    if (static_cast<int>(rows.size()) != shape.length()) return false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != shape.parts[r]) return false;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) {
                const bool ok = conv == TableauConvention::Classical ? rows[r][c - 1] <= rows[r][c]
                                                                     : rows[r][c - 1] >= rows[r][c];
                if (!ok) return false;
            }
            if (r > 0 && rows[r - 1][c] >= rows[r][c]) return false;
        }
    }
    return true;
}

std::string Tableau::str() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << (r ? " / " : "") << "[";
        for (std::size_t c = 0; c < rows[r].size(); ++c) os << (c ? " " : "") << rows[r][c];
        os << "]";
    }
    return os.str();
}

std::vector<Tableau> semistandard_tableaux(const Partition& shape, const Partition& content, TableauConvention conv) {
    std::vector<Tableau> out;
    if (shape.total() != content.total()) return out;
    Tableau T;
    T.shape = shape;
    for (int len : shape.parts) T.rows.push_back(std::vector<int>(len, 0));
    std::vector<int> left = content.parts;
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < shape.length(); ++r)
        for (int c = 0; c < shape.parts[r]; ++c) cells.push_back({r, c});
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
        if (idx == cells.size()) {
            out.push_back(T);
            return;
        }
        const auto [r, c] = cells[idx];
        for (int v = 1; v <= static_cast<int>(left.size()); ++v) {
            if (left[v - 1] == 0) continue;
            if (c > 0) {
                const int l = T.rows[r][c - 1];
                if (conv == TableauConvention::Classical ? v < l : v > l) continue;
            }
            if (r > 0 && T.rows[r - 1][c] >= v) continue;
            T.rows[r][c] = v;
            --left[v - 1];
            rec(idx + 1);
            ++left[v - 1];
            T.rows[r][c] = 0;
        }
    };
    rec(0);
    std::sort(out.begin(), out.end(), [](const Tableau& a, const Tableau& b) { return a.rows < b.rows; });
    return out;
}

Tableau canonical_tableau(const Partition& shape) {
    Tableau t;
    t.shape = shape;
    int next = 1;
    for (int len : shape.parts) {
        std::vector<int> row;
        for (int c = 0; c < len; ++c) row.push_back(next++);
        t.rows.push_back(row);
    }
    return t;
}

namespace {

int parity(const std::vector<int>& perm) {
    int inv = 0;
    for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
            if (perm[a] > perm[b]) ++inv;
    return inv % 2 ? -1 : 1;
}

// All tableaux obtained by rearranging entries inside each row.
std::vector<Tableau> row_class(const Tableau& T) {
    std::vector<std::vector<std::vector<int>>> per_row;
    for (const auto& row : T.rows) {
        std::vector<int> r = row;
        std::sort(r.begin(), r.end());
        std::vector<std::vector<int>> perms;
        do perms.push_back(r);
        while (std::next_permutation(r.begin(), r.end()));
        per_row.push_back(std::move(perms));
    }
    std::vector<Tableau> out;
    Tableau S = T;
    std::function<void(std::size_t)> rec = [&](std::size_t r) {
        if (r == per_row.size()) {
            out.push_back(S);
            return;
        }
        for (const auto& row : per_row[r]) {
            S.rows[r] = row;
            rec(r + 1);
        }
    };
    rec(0);
    return out;
}

}  // namespace

Polynomial specht_polynomial(const Partition& shape, const Tableau& T, int p, const ValueMonomial& f) {
    if (shape.total() != p) throw std::invalid_argument("specht_polynomial: shape must partition p");
    const Tableau t = canonical_tableau(shape);
    Polynomial total;
    const int ncols = shape.length() ? shape.parts[0] : 0;
    for (const Tableau& S : row_class(T)) {
        Polynomial prod(1.0);
        for (int c = 0; c < ncols; ++c) {
            std::vector<int> fac, val;
            for (int r = 0; r < shape.length() && shape.parts[r] > c; ++r) {
                fac.push_back(t.rows[r][c] - 1);
                val.push_back(S.rows[r][c] - 1);
            }
            const int q = static_cast<int>(fac.size());
            std::vector<int> pi(q);
            std::iota(pi.begin(), pi.end(), 0);
            Polynomial det;
            do {
                Monomial m;
                for (int r = 0; r < q; ++r) m = m * f(fac[r], val[pi[r]]);
                det.add_term(m, parity(pi));
            } while (std::next_permutation(pi.begin(), pi.end()));
            prod = prod * det;
        }
        total += prod;
    }
    return total;
}

SpechtPolynomial specht_polynomial(const Partition& shape, const Tableau& T, const std::vector<int>& beta) {
    const Content c = content_of(beta);
    SpechtPolynomial out;
    out.shape = shape;
    out.T = T;
    out.beta = beta;
    out.poly = specht_polynomial(shape, T, static_cast<int>(beta.size()),
                                 [&](int j, int v) { return Monomial::var(j, c.values[v]); });
    return out;
}

std::vector<SpechtPolynomial> sym_adapted_basis_1block(int p, int k, TableauConvention conv) {
    std::vector<SpechtPolynomial> out;
    const std::vector<Partition> shapes = partitions(p);
    for (int s = 0; s <= k; ++s) {
        for (const Partition& part : partitions(s)) {
            if (part.length() > p) continue;
            std::vector<int> beta = part.parts;
            beta.resize(p, 0);
            const Content c = content_of(beta);
            for (const Partition& lambda : shapes) {
                if (!dominates(lambda, c.mu)) continue;
                for (const Tableau& T : semistandard_tableaux(lambda, c.mu, conv)) {
                    SpechtPolynomial sp = specht_polynomial(lambda, T, beta);
                    if (!sp.poly.is_zero()) out.push_back(std::move(sp));
                }
            }
        }
    }
    return out;
}

std::vector<std::vector<int>> all_permutations(int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    do out.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

int orbit_span_dimension(const Polynomial& q, int p, double tol) {
    std::vector<Polynomial> images;
    std::map<Monomial, int> index;
    for (const auto& perm : all_permutations(p)) {
        images.push_back(q.relabel(perm));
        for (const auto& [m, c] : images.back().terms()) index.emplace(m, 0);
    }
    int pos = 0;
    for (auto& [m, idx] : index) idx = pos++;
    std::vector<Eigen::VectorXd> basis;
    for (const auto& img : images) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(pos);
        for (const auto& [m, c] : img.terms()) v[index[m]] = c;
        const double scale = std::max(1.0, v.norm());
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) v -= u.dot(v) * u;
        if (v.norm() > tol * scale) basis.push_back(v / v.norm());
    }
    return static_cast<int>(basis.size());
}

namespace {

class OrbitCanon {
public:
    explicit OrbitCanon(const SaLayout& L) : L_(L) {
        for (const auto& perm : all_permutations(L.p)) actions_.push_back(L.facility_action(perm));
        swaps_.resize(L.p);
        for (int j = 0; j < L.p; ++j) {
            std::vector<int> perm(L.p);
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[0], perm[j]);
            swaps_[j] = L.facility_action(perm);
        }
    }

    const Monomial& rep(const Monomial& m) {
        auto it = cache_.find(m);
        if (it != cache_.end()) return it->second;
        Monomial best = m;
        for (const auto& act : actions_) {
            Monomial img = m.relabel(act);
            if (img.factors() < best.factors()) best = std::move(img);
        }
        return cache_.emplace(m, std::move(best)).first->second;
    }

    const std::vector<std::vector<int>>& actions() const { return actions_; }
    const std::vector<int>& swap_to(int j) const { return swaps_[j]; }

    // Per-facility exponent profiles moved to facility 0, and the facility-free part.
    void profiles(const Monomial& m, std::vector<Monomial>& prof, Monomial& free_part) const {
        prof.assign(L_.p, Monomial());
        free_part = Monomial();
        for (const auto& [v, e] : m.factors()) {
            const int j = L_.facility_of(v);
            if (j < 0) free_part = free_part * Monomial::var(v, e);
            else prof[j] = prof[j] * Monomial::var(swaps_[j][v], e);
        }
    }

private:
    SaLayout L_;
    std::vector<std::vector<int>> actions_;
    std::vector<std::vector<int>> swaps_;
    std::unordered_map<Monomial, Monomial, MonomialHash> cache_;
};

struct OrbitData {
    std::vector<Monomial> values;
    Partition mu;
    Monomial free_part;
};

OrbitData orbit_data(const OrbitCanon& canon, const Monomial& m, int p) {
    std::vector<Monomial> prof;
    OrbitData od;
    canon.profiles(m, prof, od.free_part);
    std::vector<int> count;
    for (int j = 0; j < p; ++j) {
        auto it = std::find(od.values.begin(), od.values.end(), prof[j]);
        if (it == od.values.end()) {
            od.values.push_back(prof[j]);
            count.push_back(1);
        } else ++count[it - od.values.begin()];
    }
    std::vector<int> order(od.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return count[a] > count[b]; });
    std::vector<Monomial> vals;
    for (int q : order) {
        vals.push_back(od.values[q]);
        od.mu.parts.push_back(count[q]);
    }
    od.values = std::move(vals);
    return od;
}

std::vector<Monomial> all_monomials(int nv, int deg) {
    std::vector<int> vars(nv);
    std::iota(vars.begin(), vars.end(), 0);
    return monomial_basis(vars, deg);
}

}  // namespace

Monomial orbit_representative(const Monomial& m, const SaLayout& layout) {
    OrbitCanon canon(layout);
    return canon.rep(m);
}

int L_sym(MomentTable& table, const Monomial& m, const SaLayout& layout) {
    return table.intern(orbit_representative(m, layout));
}

std::vector<std::pair<int, double>> L_sym(MomentTable& table, const Polynomial& f, const SaLayout& layout) {
    OrbitCanon canon(layout);
    std::map<int, double> acc;
    for (const auto& [m, c] : f.terms()) acc[table.intern(canon.rep(m))] += c;
    std::vector<std::pair<int, double>> out;
    for (const auto& [id, c] : acc)
        if (c != 0.0) out.push_back({id, c});
    return out;
}

std::vector<IsotypicBasis> isotypic_basis(const SaLayout& L, int deg, TableauConvention conv) {
    OrbitCanon canon(L);
    std::set<Monomial> reps;
    for (const Monomial& m : all_monomials(L.count(), deg)) reps.insert(canon.rep(m));
    const std::vector<Partition> shapes = partitions(L.p);
    std::vector<IsotypicBasis> out(shapes.size());
    for (std::size_t s = 0; s < shapes.size(); ++s) out[s].shape = shapes[s];
    for (const Monomial& m : reps) {
        const OrbitData od = orbit_data(canon, m, L.p);
        auto f = [&](int j, int v) { return od.values[v].relabel(canon.swap_to(j)); };
        for (std::size_t s = 0; s < shapes.size(); ++s) {
            if (!dominates(shapes[s], od.mu)) continue;
            for (const Tableau& T : semistandard_tableaux(shapes[s], od.mu, conv)) {
                Polynomial sp = specht_polynomial(shapes[s], T, L.p, f);
                if (sp.is_zero()) continue;
                out[s].basis.push_back(sp * Polynomial::monomial(od.free_part));
            }
        }
    }
    std::vector<IsotypicBasis> nonempty;
    for (auto& b : out)
        if (!b.basis.empty()) nonempty.push_back(std::move(b));
    return nonempty;
}

SymBasisFull sym_adapted_basis_full(int n, int p, int d, int k, bool materialize, bool trivial_only) {
    const SaLayout L(n, p, d);
    SymBasisFull out;
    SymBasisReport& rep = out.report;
    rep.n = n;
    rep.p = p;
    rep.d = d;
    rep.k = k;

    std::vector<std::vector<int>> blocks;
    for (int kk = 0; kk < d; ++kk) {
        std::vector<int> b;
        for (int j = 0; j < p; ++j) b.push_back(L.x(j, kk));
        blocks.push_back(b);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> b;
        for (int j = 0; j < p; ++j) b.push_back(L.z(i, j));
        blocks.push_back(b);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> b;
        for (int j = 0; j < p; ++j) b.push_back(L.u(i, j));
        blocks.push_back(b);
    }
    for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < d; ++kk) {
            std::vector<int> b;
            for (int j = 0; j < p; ++j) b.push_back(L.v(i, j, kk));
            blocks.push_back(b);
        }
    for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < d; ++kk) {
            std::vector<int> b;
            for (int j = 0; j < p; ++j) b.push_back(L.zeta(i, j, kk));
            blocks.push_back(b);
        }
    std::vector<int> free_vars;
    for (int q = 0; q < L.count(); ++q)
        if (L.facility_of(q) < 0) free_vars.push_back(q);
    rep.symmetric_blocks = static_cast<int>(blocks.size());
    rep.free_vars = static_cast<int>(free_vars.size());
    rep.standard_all = binomial(L.count() + k, k);
    rep.standard_symmetric = binomial(L.count() - rep.free_vars + k, k);

    const std::vector<SpechtPolynomial> one = sym_adapted_basis_1block(p, k);
    const Partition trivial{{p}};
    std::vector<long long> c_all(k + 1, 0), c_triv(k + 1, 0);
    for (const auto& e : one) {
        const int deg = e.poly.degree();
        ++c_all[deg];
        if (e.shape == trivial) ++c_triv[deg];
    }
    auto product_count = [&](const std::vector<long long>& per_block) {
        std::vector<long long> dp(k + 1, 0);
        dp[0] = 1;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            std::vector<long long> nd(k + 1, 0);
            for (int a = 0; a <= k; ++a)
                for (int s = 0; a + s <= k; ++s) nd[a + s] += dp[a] * (s == 0 ? 1 : per_block[s]);
            dp = nd;
        }
        long long total = 0;
        for (int a = 0; a <= k; ++a) total += dp[a] * binomial(rep.free_vars + (k - a), k - a);
        return total;
    };
    rep.product_total = product_count(c_all);
    rep.product_trivial = product_count(c_triv);

    if (materialize) {
        std::vector<int> picks;
        for (std::size_t q = 0; q < one.size(); ++q)
            if (one[q].poly.degree() > 0 && (!trivial_only || one[q].shape == trivial)) picks.push_back(static_cast<int>(q));
        SymBasisElement cur;
        std::function<void(std::size_t, int)> rec = [&](std::size_t b, int rem) {
            if (b == blocks.size()) {
                for (const Monomial& fm : monomial_basis(free_vars, rem)) {
                    SymBasisElement e = cur;
                    e.free_part = fm;
                    e.degree = k - rem + fm.degree();
                    Polynomial poly = Polynomial::monomial(fm);
                    for (std::size_t f = 0; f < e.factors.size(); ++f) {
                        const auto& [blk, idx] = e.factors[f];
                        poly = poly * one[idx].poly.relabel(blocks[blk]);
                    }
                    e.poly = std::move(poly);
                    out.elements.push_back(std::move(e));
                }
                return;
            }
            rec(b + 1, rem);
            for (int q : picks) {
                const int deg = one[q].poly.degree();
                if (deg > rem) continue;
                cur.factors.push_back({static_cast<int>(b), q});
                cur.shapes.push_back(one[q].shape);
                rec(b + 1, rem - deg);
                cur.factors.pop_back();
                cur.shapes.pop_back();
            }
        };
        rec(0, k);
    }

    if (rep.standard_all <= 2000000) {
        OrbitCanon canon(L);
        std::set<Monomial> reps;
        for (const Monomial& m : all_monomials(L.count(), k)) reps.insert(canon.rep(m));
        rep.orbit_count = static_cast<long long>(reps.size());
        std::map<Partition, long long> copies;
        std::map<std::pair<Partition, Partition>, long long> kostka;
        for (const Monomial& m : reps) {
            const OrbitData od = orbit_data(canon, m, p);
            for (const Partition& lambda : partitions(p)) {
                if (!dominates(lambda, od.mu)) continue;
                auto key = std::make_pair(lambda, od.mu);
                auto it = kostka.find(key);
                if (it == kostka.end())
                    it = kostka.emplace(key, static_cast<long long>(semistandard_tableaux(lambda, od.mu).size())).first;
                copies[lambda] += it->second;
            }
        }
        for (const Partition& lambda : partitions(p)) {
            rep.isotypic_copies.push_back({lambda, copies[lambda]});
            rep.isotypic_dims.push_back({lambda, standard_tableaux_count(lambda)});
        }
    }
    return out;
}

SymBasisFull sym_adapted_basis_full(const Instance& inst, int k, bool materialize) {
    return sym_adapted_basis_full(inst.n(), inst.p, inst.d(), k, materialize);
}

CountFormulas count_formulas(long long n, bool enumerate) {
    CountFormulas cf;
    cf.n = n;
    const long long n2 = n * n, n3 = n2 * n, n4 = n3 * n;
    const long long sym_c[5] = {68, 43, 71, 16, 1};
    const long long std_c[5] = {30, 154, 207, 28, 1};
    const long long diff_c[5] = {7, 43, 68, 6, 0};
    cf.sym_numerator = n4 + 16 * n3 + 71 * n2 + 43 * n + 68;
    cf.std_numerator = n4 + 28 * n3 + 207 * n2 + 154 * n + 30;
    cf.difference = 6 * n3 + 68 * n2 + 43 * n + 7;
    cf.sym_value = cf.sym_numerator / 2.0;
    cf.std_value = cf.std_numerator / 2.0;
    cf.consistent_at_n = cf.std_numerator - cf.sym_numerator == 2 * cf.difference;
    cf.consistent_as_polynomials = true;
    for (int q = 0; q < 5; ++q)
        if (std_c[q] - sym_c[q] != 2 * diff_c[q]) cf.consistent_as_polynomials = false;
    cf.meaningful = n >= 1;
    std::ostringstream note;
    if (!cf.meaningful) note << "n < 1: formulas evaluated but not meaningful; ";
    if (!cf.consistent_as_polynomials)
        note << "printed quartics differ by (12n^3+136n^2+111n-38)/2, not by the printed 6n^3+68n^2+43n+7";
    if (enumerate && n >= 1 && n <= 6) {
        const SymBasisFull full = sym_adapted_basis_full(static_cast<int>(n), 2, 2, 2, false);
        cf.enumerated_sym = full.report.product_trivial;
        cf.enumerated_std = full.report.standard_all;
        note << "; enumerated sym " << cf.enumerated_sym << (2 * cf.enumerated_sym == cf.sym_numerator ? " matches" : " differs from")
             << " the printed sym formula, enumerated std " << cf.enumerated_std
             << (2 * cf.enumerated_std == cf.std_numerator ? " matches" : " differs from") << " the printed std formula";
    }
    cf.note = note.str();
    return cf;
}

namespace {

bool is_invariant(const Polynomial& g, const OrbitCanon& canon) {
    for (const auto& act : canon.actions())
        if (!(g.relabel(act) == g)) return false;
    return true;
}

std::map<Monomial, double> orbit_key(const Polynomial& g, const OrbitCanon& canon) {
    std::map<Monomial, double> best = g.terms();
    for (const auto& act : canon.actions()) {
        const Polynomial img = g.relabel(act);
        if (img.terms() < best) best = img.terms();
    }
    return best;
}

}  // namespace

MomentRelaxation build_sym_relaxation(const Instance& inst, int r, const HierarchyOptions& opt, TableauConvention conv) {
    const SaPolynomialProgram prog = sa_polynomial_program(inst);
    const SaLayout& L = prog.layout;
    OrbitCanon canon(L);
    MomentRelaxation rel;
    rel.order = r;
    auto ceil_half = [](int deg) { return (deg + 1) / 2; };
    int r0 = ceil_half(prog.objective.degree());
    for (const auto* list : {&prog.K, &prog.h, &prog.binary})
        for (const auto& c : *list) r0 = std::max(r0, ceil_half(c.g.degree()));
    if (opt.domain_blocks)
        for (const auto& c : prog.domain) r0 = std::max(r0, ceil_half(c.g.degree()));
    rel.r0 = r0;
    if (r < r0) throw std::invalid_argument("relaxation order below r0 = " + std::to_string(r0));
    rel.var_names = L.names();
    std::vector<int> all(L.count());
    std::iota(all.begin(), all.end(), 0);
    rel.groups = {all};

    std::map<int, std::vector<IsotypicBasis>> iso_cache;
    auto iso = [&](int deg) -> const std::vector<IsotypicBasis>& {
        auto it = iso_cache.find(deg);
        if (it == iso_cache.end()) it = iso_cache.emplace(deg, isotypic_basis(L, deg, conv)).first;
        return it->second;
    };

    struct Job {
        std::string name;
        Polynomial g;
        std::vector<Polynomial> poly_basis;
        std::vector<Monomial> basis;
    };
    std::vector<Job> jobs;
    for (const auto& b : iso(r)) jobs.push_back({"sym-moment" + b.shape.str(), Polynomial(1.0), b.basis, {}});

    std::set<std::map<Monomial, double>> seen;
    auto add_loc = [&](const std::vector<PolyConstraint>& list) {
        std::map<std::string, int> counter;
        for (const auto& c : list) {
            if (c.equality) continue;
            const std::string tag = c.family + "[" + std::to_string(++counter[c.family]) + "]";
            const int deg = r - ceil_half(c.g.degree());
            if (is_invariant(c.g, canon)) {
                for (const auto& b : iso(deg)) jobs.push_back({tag + b.shape.str(), c.g, b.basis, {}});
            } else {
                if (!seen.insert(orbit_key(c.g, canon)).second) continue;
                jobs.push_back({tag, c.g, {}, monomial_basis(all, deg)});
            }
        }
    };
    add_loc(prog.K);
    add_loc(prog.h);
    if (opt.domain_blocks) add_loc(prog.domain);

    // Raw entries are polynomials; canonicalization through the orbit cache stays on this thread.
    std::vector<std::vector<Polynomial>> raws(jobs.size());
    auto work = [&](std::size_t a) {
        const Job& jb = jobs[a];
        std::vector<Polynomial> basis = jb.poly_basis;
        if (basis.empty())
            for (const auto& m : jb.basis) basis.push_back(Polynomial::monomial(m));
        const int n = static_cast<int>(basis.size());
        for (int c = 0; c < n; ++c) {
            const Polynomial gc = basis[c] * jb.g;
            for (int rr = c; rr < n; ++rr) raws[a].push_back(basis[rr] * gc);
        }
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
        b.generator = jobs[a].g;
        b.basis = jobs[a].basis;
        b.poly_basis = jobs[a].poly_basis;
        b.offsets.assign(1, 0);
        for (const Polynomial& e : raws[a]) {
            std::map<int, double> acc;
            for (const auto& [m, c] : e.terms()) acc[rel.table.intern(canon.rep(m))] += c;
            for (const auto& [id, c] : acc)
                if (c != 0.0) {
                    b.ids.push_back(id);
                    b.coefs.push_back(c);
                }
            b.offsets.push_back(static_cast<int>(b.ids.size()));
        }
        raws[a].clear();
        rel.blocks.push_back(std::move(b));
    }

    rel.equalities.push_back({{{0, 1.0}}, 1.0, "normalization"});
    std::set<std::vector<std::pair<int, double>>> rows_seen;
    auto add_equalities = [&](const std::vector<PolyConstraint>& list) {
        for (const auto& c : list) {
            if (!c.equality) continue;
            if (!seen.insert(orbit_key(c.g, canon)).second) continue;
            std::vector<Monomial> mult{Monomial()};
            if (opt.equalities == EqualityMode::Ideal) mult = monomial_basis(all, 2 * r - c.g.degree());
            for (const auto& m : mult) {
                std::map<int, double> acc;
                for (const auto& [mono, coef] : c.g.terms()) acc[rel.table.intern(canon.rep(mono * m))] += coef;
                LinearEquality eq;
                eq.family = c.family;
                for (const auto& [id, coef] : acc)
                    if (id == 0) eq.rhs -= coef;
                    else if (coef != 0.0) eq.terms.push_back({id, coef});
                if (eq.terms.empty()) continue;
                std::vector<std::pair<int, double>> key = eq.terms;
                key.push_back({-1, eq.rhs});
                if (!rows_seen.insert(key).second) continue;
                rel.equalities.push_back(std::move(eq));
            }
        }
    };
    add_equalities(prog.h);
    add_equalities(prog.binary);

    {
        std::map<int, double> acc;
        for (const auto& [m, c] : prog.objective.terms()) acc[rel.table.intern(canon.rep(m))] += c;
        for (const auto& [id, c] : acc) rel.objective.push_back({id, c});
    }

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

}  // namespace omloc
