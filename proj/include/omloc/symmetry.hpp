#pragma once

#include "omloc/moment_hierarchy.hpp"
#include "omloc/polynomial.hpp"

#include <compare>
#include <functional>
#include <string>
#include <vector>

namespace omloc {

struct Partition {
    std::vector<int> parts;  // non-increasing, positive

    int total() const;
    int length() const { return static_cast<int>(parts.size()); }
    std::string str() const;
    auto operator<=>(const Partition&) const = default;
};

// Reverse lexicographic order, (p) first.
std::vector<Partition> partitions(int p);
// a dominates b: every prefix sum of a is >= the matching prefix sum of b.
bool dominates(const Partition& a, const Partition& b);
// Number of standard Young tableaux (hook length formula).
long long standard_tableaux_count(const Partition& shape);

struct Content {
    std::vector<int> values;  // distinct entries, most frequent first, ties by first occurrence
    Partition mu;             // their multiplicities
};
Content content_of(const std::vector<int>& beta);

enum class TableauConvention {
    Classical,    // rows weakly increasing, columns strictly increasing
    LiteralOrder  // rows non-increasing, columns strictly increasing
};

struct Tableau {
    Partition shape;
    std::vector<std::vector<int>> rows;  // 1-based entries

    bool semistandard(TableauConvention conv = TableauConvention::Classical) const;
    std::string str() const;
    auto operator<=>(const Tableau&) const = default;
};

// Shape-lambda fillings with content mu, sorted lexicographically by rows.
std::vector<Tableau> semistandard_tableaux(const Partition& shape, const Partition& content,
                                           TableauConvention conv = TableauConvention::Classical);
// The tableau filled with 1..p row by row.
Tableau canonical_tableau(const Partition& shape);

// Monomial playing the role of Y_facility^(b_value); facility and value are 0-based.
using ValueMonomial = std::function<Monomial(int facility, int value)>;
// Product of column Vandermonde determinants of (t_lambda, S), summed over the row class [T].
Polynomial specht_polynomial(const Partition& shape, const Tableau& T, int p, const ValueMonomial& f);

struct SpechtPolynomial {
    Partition shape;
    Tableau T;
    std::vector<int> beta;
    Polynomial poly;  // over Y_0..Y_{p-1} (variable ids 0..p-1)
};
SpechtPolynomial specht_polynomial(const Partition& shape, const Tableau& T, const std::vector<int>& beta);

// One Specht polynomial per irreducible copy inside R[Y_1..Y_p] of degree <= k, all shapes.
std::vector<SpechtPolynomial> sym_adapted_basis_1block(int p, int k,
                                                      TableauConvention conv = TableauConvention::Classical);

std::vector<std::vector<int>> all_permutations(int p);
// Dimension of span{q o sigma : sigma in S_p} for q over Y_0..Y_{p-1}, by modified Gram-Schmidt.
int orbit_span_dimension(const Polynomial& q, int p, double tol = 1e-10);

// Lexicographically least monomial in the orbit under simultaneous facility relabeling.
Monomial orbit_representative(const Monomial& m, const SaLayout& layout);
int L_sym(MomentTable& table, const Monomial& m, const SaLayout& layout);
std::vector<std::pair<int, double>> L_sym(MomentTable& table, const Polynomial& f, const SaLayout& layout);

struct SymBasisElement {
    std::vector<std::pair<int, int>> factors;  // (symmetric block, index into the one-block basis)
    std::vector<Partition> shapes;             // shape of each factor
    Monomial free_part;                        // over w, t, theta
    int degree = 0;
    Polynomial poly;
};

struct SymBasisReport {
    int n = 0, p = 0, d = 0, k = 0;
    int symmetric_blocks = 0;   // x(.,k), z(i,.), u(i,.), v(i,.,k), zeta(i,.,k)
    int free_vars = 0;          // w, t, theta
    long long standard_all = 0;        // C(nv + k, k)
    long long standard_symmetric = 0;  // C(N p + k, k) over the facility-indexed variables
    long long product_total = 0;       // products of one-block elements, all shapes
    long long product_trivial = 0;     // products restricted to the trivial shape (p)
    long long reference_claim = 392;
    // Exact decomposition of R[all variables]_{<=k} under the diagonal action: copies and dimension per shape.
    std::vector<std::pair<Partition, long long>> isotypic_copies;
    std::vector<std::pair<Partition, long long>> isotypic_dims;
    long long orbit_count = 0;
};

struct SymBasisFull {
    std::vector<SymBasisElement> elements;
    SymBasisReport report;
};

// materialize = false skips building the element list and polynomials.
SymBasisFull sym_adapted_basis_full(int n, int p, int d, int k, bool materialize = true, bool trivial_only = false);
SymBasisFull sym_adapted_basis_full(const Instance& inst, int k, bool materialize = true);

struct IsotypicBasis {
    Partition shape;
    std::vector<Polynomial> basis;  // one Specht polynomial per copy
};
// Exact isotypic decomposition of R[all variables]_{<=deg} under the facility action.
std::vector<IsotypicBasis> isotypic_basis(const SaLayout& layout, int deg,
                                          TableauConvention conv = TableauConvention::Classical);

struct CountFormulas {
    long long n = 0;
    // Numerators of the printed halves and the printed cubic.
    long long sym_numerator = 0, std_numerator = 0, difference = 0;
    double sym_value = 0.0, std_value = 0.0;
    bool consistent_at_n = false;          // std - sym == difference at this n
    bool consistent_as_polynomials = false;
    bool meaningful = true;                // false for n < 1
    long long enumerated_sym = -1;         // trivial-shape product count, p = 2, d = 2, k = 2
    long long enumerated_std = -1;
    std::string note;
};
CountFormulas count_formulas(long long n, bool enumerate = true);

// Symmetry-adapted relaxation: moment block and invariant localizing blocks split per shape,
// facility-indexed constraints kept once per orbit with orbit-class moment ids.
MomentRelaxation build_sym_relaxation(const Instance& inst, int r, const HierarchyOptions& opt = {},
                                      TableauConvention conv = TableauConvention::Classical);

}  // namespace omloc
