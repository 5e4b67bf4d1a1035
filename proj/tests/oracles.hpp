#pragma once

// Independent reference computations used by the unit tests and the acceptance binary.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

inline double sorted_weighted_sum(std::vector<double> u, const std::vector<double>& lambda) {
    std::sort(u.begin(), u.end(), std::greater<double>());
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += lambda[i] * u[i];
    return s;
}

inline double lp_norm(const Eigen::VectorXd& v, double tau) {
    double s = 0.0;
    for (int k = 0; k < v.size(); ++k) s += std::pow(std::abs(v[k]), tau);
    return std::pow(s, 1.0 / tau);
}

// Single-allocation objective written directly from the definition.
inline double sa_objective(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& a,
                           const std::vector<double>& lambda, double tau) {
    std::vector<double> dist;
    for (const auto& ai : a) {
        double best = INFINITY;
        for (const auto& xj : x) best = std::min(best, lp_norm(xj - ai, tau));
        dist.push_back(best);
    }
    return sorted_weighted_sum(dist, lambda);
}

// Non-interchangeable objective: facility j sorts its own weighted distances and applies lambda column j.
inline double ni_objective(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& a,
                           const Eigen::VectorXd& omega, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& mu,
                           double tau) {
    double f = 0.0;
    const int p = static_cast<int>(x.size());
    for (int j = 0; j < p; ++j) {
        std::vector<double> d;
        for (std::size_t i = 0; i < a.size(); ++i) d.push_back(omega[i] * lp_norm(x[j] - a[i], tau));
        std::vector<double> col(lambda.rows());
        for (int i = 0; i < lambda.rows(); ++i) col[i] = lambda(i, j);
        f += sorted_weighted_sum(d, col);
    }
    for (int j = 0; j < p; ++j)
        for (int q = j + 1; q < p; ++q) f += mu(j, q) * lp_norm(x[j] - x[q], tau);
    return f;
}

// Nelder-Mead with restarts on a flattened vector.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                   double step, int iters = 4000, int restarts = 6) {
    const int n = static_cast<int>(x0.size());
    Eigen::VectorXd best = x0;
    for (int rs = 0; rs < restarts; ++rs) {
        std::vector<Eigen::VectorXd> s(n + 1, best);
        for (int k = 0; k < n; ++k) s[k + 1][k] += step;
        std::vector<double> fv(n + 1);
        for (int k = 0; k <= n; ++k) fv[k] = f(s[k]);
        for (int it = 0; it < iters; ++it) {
            std::vector<int> idx(n + 1);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
            const int hi = idx[n], lo = idx[0], nh = idx[n - 1];
            Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
            for (int k = 0; k <= n; ++k)
                if (k != hi) c += s[k];
            c /= n;
            Eigen::VectorXd xr = c + (c - s[hi]);
            const double fr = f(xr);
            if (fr < fv[lo]) {
                Eigen::VectorXd xe = c + 2.0 * (c - s[hi]);
                const double fe = f(xe);
                if (fe < fr) s[hi] = xe, fv[hi] = fe;
                else s[hi] = xr, fv[hi] = fr;
            } else if (fr < fv[nh]) {
                s[hi] = xr, fv[hi] = fr;
            } else {
                Eigen::VectorXd xc = c + 0.5 * (s[hi] - c);
                const double fc = f(xc);
                if (fc < fv[hi]) s[hi] = xc, fv[hi] = fc;
                else
                    for (int k = 0; k <= n; ++k)
                        if (k != lo) s[k] = s[lo] + 0.5 * (s[k] - s[lo]), fv[k] = f(s[k]);
            }
        }
        int arg = 0;
        for (int k = 1; k <= n; ++k)
            if (fv[k] < fv[arg]) arg = k;
        best = s[arg];
        step *= 0.3;
    }
    return best;
}

inline long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int q = 1; q <= k; ++q) r = r * (n - k + q) / q;
    return r;
}

// Number of exponent vectors in v variables of total degree <= r, by direct recursion.
inline long long count_monomials(int v, int r) {
    if (v == 0) return 1;
    long long total = 0;
    for (int e = 0; e <= r; ++e) total += count_monomials(v - 1, r - e);
    return total;
}

// Running intersection in its general form: every block meets the union of its predecessors inside one of them.
inline bool running_intersection(const std::vector<std::vector<int>>& blocks) {
    std::set<int> seen;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (j > 0) {
            std::vector<int> inter;
            for (int v : blocks[j])
                if (seen.count(v)) inter.push_back(v);
            bool found = false;
            for (std::size_t k = 0; k < j && !found; ++k) {
                std::set<int> bk(blocks[k].begin(), blocks[k].end());
                found = std::all_of(inter.begin(), inter.end(), [&](int v) { return bk.count(v) > 0; });
            }
            if (!found) return false;
        }
        seen.insert(blocks[j].begin(), blocks[j].end());
    }
    return true;
}

// Partitions of m, largest part first.
inline std::vector<std::vector<int>> integer_partitions(int m, int maxpart = -1) {
    if (maxpart < 0) maxpart = m;
    if (m == 0) return {{}};
    std::vector<std::vector<int>> out;
    for (int a = std::min(m, maxpart); a >= 1; --a)
        for (auto rest : integer_partitions(m - a, a)) {
            rest.insert(rest.begin(), a);
            out.push_back(rest);
        }
    return out;
}

// Character chi^lambda at a permutation of cycle type mu, by the Murnaghan-Nakayama rule on beta-sets.
inline long long mn_character(std::vector<int> lambda, std::vector<int> mu) {
    if (mu.empty()) return 1;
    const int len = mu.back();
    mu.pop_back();
    const int L = static_cast<int>(lambda.size());
    std::vector<int> beta(L);
    for (int i = 0; i < L; ++i) beta[i] = lambda[i] + (L - 1 - i);
    std::set<int> bs(beta.begin(), beta.end());
    long long total = 0;
    for (int i = 0; i < L; ++i) {
        const int b = beta[i] - len;
        if (b < 0 || bs.count(b)) continue;
        int between = 0;
        for (int c : beta)
            if (c > b && c < beta[i]) ++between;
        std::vector<int> nb = beta;
        nb[i] = b;
        std::sort(nb.begin(), nb.end(), std::greater<int>());
        std::vector<int> nl;
        for (int q = 0; q < L; ++q) {
            const int part = nb[q] - (L - 1 - q);
            if (part > 0) nl.push_back(part);
        }
        total += (between % 2 ? -1 : 1) * mn_character(nl, mu);
    }
    return total;
}

// Number of permutations of S_p with the given cycle type.
inline long long class_size(const std::vector<int>& mu, int p) {
    long long denom = 1;
    std::map<int, int> mult;
    for (int c : mu) {
        denom *= c;
        ++mult[c];
    }
    for (auto [c, m] : mult)
        for (int q = 2; q <= m; ++q) denom *= q;
    long long fact = 1;
    for (int q = 2; q <= p; ++q) fact *= q;
    return fact / denom;
}

// Monomials of degree <= k over blocks x p permuted variables and free fixed variables that a permutation of
// cycle type mu fixes.
inline long long fixed_monomials(const std::vector<int>& mu, int blocks, int free_vars, int k) {
    std::vector<long long> poly(k + 1, 0);
    poly[0] = 1;
    auto multiply_geometric = [&](int step) {
        for (int deg = step; deg <= k; ++deg) poly[deg] += poly[deg - step];
    };
    for (int b = 0; b < blocks; ++b)
        for (int c : mu) multiply_geometric(c);
    for (int f = 0; f < free_vars; ++f) multiply_geometric(1);
    long long total = 0;
    for (long long c : poly) total += c;
    return total;
}

// Multiplicity of each irreducible lambda of S_p in the monomials of degree <= k.
inline std::map<std::vector<int>, long long> isotypic_multiplicities(int p, int blocks, int free_vars, int k) {
    long long fact = 1;
    for (int q = 2; q <= p; ++q) fact *= q;
    std::map<std::vector<int>, long long> out;
    for (const auto& lambda : integer_partitions(p)) {
        long long s = 0;
        for (const auto& mu : integer_partitions(p))
            s += class_size(mu, p) * mn_character(lambda, mu) * fixed_monomials(mu, blocks, free_vars, k);
        out[lambda] = s / fact;
    }
    return out;
}

inline long long dimension(const std::vector<int>& lambda) {
    const int p = std::accumulate(lambda.begin(), lambda.end(), 0);
    return mn_character(lambda, std::vector<int>(p, 1));
}

// Products of one-block invariants (partitions of s into at most p parts) with free monomials, degree <= k.
inline long long trivial_product_count(int p, int blocks, int free_vars, int k) {
    std::vector<long long> dp(k + 1, 0);
    dp[0] = 1;
    for (int b = 0; b < blocks; ++b) {
        std::vector<long long> nd(k + 1, 0);
        for (int a = 0; a <= k; ++a)
            for (int s = 0; a + s <= k; ++s) {
                long long inv = 0;
                for (const auto& part : integer_partitions(s))
                    if (static_cast<int>(part.size()) <= p) ++inv;
                nd[a + s] += dp[a] * inv;
            }
        dp = nd;
    }
    long long total = 0;
    for (int a = 0; a <= k; ++a) total += dp[a] * binom(free_vars + k - a, k - a);
    return total;
}

// Margins of the scalar inequality y^r <= zeta^s u^(r-s) in geometric-mean form.
inline double power_margin(double y, double zeta, double u, int r, int s) {
    return std::pow(zeta, static_cast<double>(s) / r) * std::pow(u, static_cast<double>(r - s) / r) - y;
}

}  // namespace oracle
