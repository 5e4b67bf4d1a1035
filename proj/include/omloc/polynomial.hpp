#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace omloc {

// Sparse exponent vector: (variable, exponent) pairs sorted by variable, exponents positive.
class Monomial {
public:
    Monomial() = default;
    static Monomial var(int v, int e = 1);
    static Monomial from_dense(const std::vector<int>& exps);

    int degree() const;
    int exponent(int v) const;
    const std::vector<std::pair<int, int>>& factors() const { return f_; }
    bool is_constant() const { return f_.empty(); }
    std::vector<int> variables() const;
    bool supported_in(const std::vector<char>& mask) const;

    Monomial operator*(const Monomial& o) const;
    // Rename variables by perm (old index -> new index).
    Monomial relabel(const std::vector<int>& perm) const;
    double eval(const Eigen::VectorXd& x) const;
    std::string str(const std::vector<std::string>& names = {}) const;

    bool operator==(const Monomial& o) const { return f_ == o.f_; }
    bool operator!=(const Monomial& o) const { return f_ != o.f_; }
    // Graded order: degree first, then lexicographic on the sorted factor list.
    bool operator<(const Monomial& o) const;

    std::size_t hash() const;

private:
    std::vector<std::pair<int, int>> f_;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(double c);
    static Polynomial var(int v, double coef = 1.0);
    static Polynomial monomial(const Monomial& m, double coef = 1.0);

    int degree() const;
    const std::map<Monomial, double>& terms() const { return t_; }
    void add_term(const Monomial& m, double c);
    bool is_zero() const { return t_.empty(); }
    std::vector<int> variables() const;
    bool supported_in(const std::vector<char>& mask) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    Polynomial operator*(const Polynomial& o) const;
    Polynomial pow(int e) const;
    Polynomial relabel(const std::vector<int>& perm) const;
    double eval(const Eigen::VectorXd& x) const;
    std::string str(const std::vector<std::string>& names = {}) const;
    bool operator==(const Polynomial& o) const { return t_ == o.t_; }

private:
    std::map<Monomial, double> t_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(double s, Polynomial a);

// All monomials of degree <= r in the listed variables, graded order.
std::vector<Monomial> monomial_basis(const std::vector<int>& vars, int r);
// C(v + r, r) without overflow for the sizes used here.
long long binomial(int n, int k);

}  // namespace omloc
