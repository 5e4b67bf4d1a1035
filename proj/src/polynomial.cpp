#include "omloc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace omloc {

Monomial Monomial::var(int v, int e) {
    Monomial m;
    if (e > 0) m.f_.push_back({v, e});
    return m;
}

Monomial Monomial::from_dense(const std::vector<int>& exps) {
    Monomial m;
    for (std::size_t v = 0; v < exps.size(); ++v)
        if (exps[v] > 0) m.f_.push_back({static_cast<int>(v), exps[v]});
    return m;
}

int Monomial::degree() const {
    int d = 0;
    for (const auto& [v, e] : f_) d += e;
    return d;
}

int Monomial::exponent(int v) const {
    for (const auto& [w, e] : f_)
        if (w == v) return e;
    return 0;
}

std::vector<int> Monomial::variables() const {
    std::vector<int> out;
    for (const auto& [v, e] : f_) out.push_back(v);
    return out;
}

bool Monomial::supported_in(const std::vector<char>& mask) const {
    for (const auto& [v, e] : f_)
        if (v >= static_cast<int>(mask.size()) || !mask[v]) return false;
    return true;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial m;
    std::size_t a = 0, b = 0;
    while (a < f_.size() || b < o.f_.size()) {
        if (b == o.f_.size() || (a < f_.size() && f_[a].first < o.f_[b].first)) m.f_.push_back(f_[a++]);
        else if (a == f_.size() || o.f_[b].first < f_[a].first) m.f_.push_back(o.f_[b++]);
        else {
            m.f_.push_back({f_[a].first, f_[a].second + o.f_[b].second});
            ++a;
            ++b;
        }
    }
    return m;
}

Monomial Monomial::relabel(const std::vector<int>& perm) const {
    Monomial m;
    for (const auto& [v, e] : f_) m.f_.push_back({perm[v], e});
    std::sort(m.f_.begin(), m.f_.end());
    return m;
}

double Monomial::eval(const Eigen::VectorXd& x) const {
    double s = 1.0;
    for (const auto& [v, e] : f_) s *= std::pow(x[v], e);
    return s;
}

std::string Monomial::str(const std::vector<std::string>& names) const {
    if (f_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, e] : f_) {
        if (!first) os << "*";
        if (v < static_cast<int>(names.size())) os << names[v];
        else os << "X" << v;
        if (e > 1) os << "^" << e;
        first = false;
    }
    return os.str();
}

bool Monomial::operator<(const Monomial& o) const {
    int da = degree(), db = o.degree();
    if (da != db) return da < db;
    return f_ < o.f_;
}

std::size_t Monomial::hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& [v, e] : f_) {
        h ^= static_cast<std::size_t>(v) * 1000003u + static_cast<std::size_t>(e);
        h *= 1099511628211ULL;
    }
    return h;
}

Polynomial::Polynomial(double c) {
    if (c != 0.0) t_[Monomial()] = c;
}

Polynomial Polynomial::var(int v, double coef) { return monomial(Monomial::var(v), coef); }

Polynomial Polynomial::monomial(const Monomial& m, double coef) {
    Polynomial p;
    p.add_term(m, coef);
    return p;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, m.degree());
    return d;
}

void Polynomial::add_term(const Monomial& m, double c) {
    if (c == 0.0) return;
    auto it = t_.find(m);
    if (it == t_.end()) t_.emplace(m, c);
    else {
        it->second += c;
        if (it->second == 0.0) t_.erase(it);
    }
}

std::vector<int> Polynomial::variables() const {
    std::vector<int> out;
    for (const auto& [m, c] : t_)
        for (int v : m.variables()) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Polynomial::supported_in(const std::vector<char>& mask) const {
    for (const auto& [m, c] : t_)
        if (!m.supported_in(mask)) return false;
    return true;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        t_.clear();
        return *this;
    }
    for (auto& [m, c] : t_) c *= s;
    return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial p;
    for (const auto& [a, ca] : t_)
        for (const auto& [b, cb] : o.t_) p.add_term(a * b, ca * cb);
    return p;
}

Polynomial Polynomial::pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative polynomial power");
    Polynomial out(1.0), base = *this;
    while (e) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

Polynomial Polynomial::relabel(const std::vector<int>& perm) const {
    Polynomial p;
    for (const auto& [m, c] : t_) p.add_term(m.relabel(perm), c);
    return p;
}

double Polynomial::eval(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& [m, c] : t_) s += c * m.eval(x);
    return s;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        double a = std::abs(c);
        if (m.is_constant()) os << a;
        else {
            if (a != 1.0) os << a << "*";
            os << m.str(names);
        }
        first = false;
    }
    return os.str();
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator*(double s, Polynomial a) { return a *= s; }

std::vector<Monomial> monomial_basis(const std::vector<int>& vars, int r) {
    std::vector<Monomial> out;
    std::vector<int> sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const int v = static_cast<int>(sorted.size());
    std::vector<int> e(v, 0);
    for (int deg = 0; deg <= r; ++deg) {
        std::vector<Monomial> level;
        // Compositions of deg into v parts.
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == v - 1 || v == 0) {
                if (v == 0) {
                    if (left == 0) level.push_back(Monomial());
                    return;
                }
                e[pos] = left;
                Monomial m;
                for (int k = 0; k < v; ++k)
                    if (e[k] > 0) m = m * Monomial::var(sorted[k], e[k]);
                level.push_back(m);
                return;
            }
            for (int a = left; a >= 0; --a) {
                e[pos] = a;
                rec(pos + 1, left - a);
            }
        };
        rec(0, deg);
        std::sort(level.begin(), level.end());
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace omloc
