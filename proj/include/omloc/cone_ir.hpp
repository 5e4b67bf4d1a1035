#pragma once

#include <Eigen/Sparse>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace omloc {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
    int var;
    double coef;
};

struct AffExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    AffExpr() = default;
    explicit AffExpr(double c) : constant(c) {}
    static AffExpr var(int v, double c = 1.0) {
        AffExpr e;
        e.terms.push_back({v, c});
        return e;
    }
    AffExpr& add(int v, double c) {
        terms.push_back({v, c});
        return *this;
    }
    AffExpr& operator+=(const AffExpr& o);
    AffExpr& operator*=(double s);
    double eval(const Eigen::VectorXd& x) const;
};

AffExpr operator+(AffExpr a, const AffExpr& b);
AffExpr operator-(AffExpr a, const AffExpr& b);
AffExpr operator*(double s, AffExpr a);

enum class Sense { Le, Eq, Ge };

struct Row {
    std::vector<Term> terms;
    Sense sense;
    double rhs;
    std::string family;
};

// SOC: e0 >= ||e1..||_2.  RotatedSOC: 2 e0 e1 >= ||e2..||^2, e0, e1 >= 0.
// PSD: entries are the lower triangle of a side x side symmetric matrix, column-major.
enum class ConeKind { Nonneg, SOC, RotatedSOC, PSD };

struct ConeBlock {
    ConeKind kind;
    std::vector<AffExpr> entries;
    int psd_side = 0;
    std::string family;
};

struct VarInfo {
    std::string name;
    std::string role;
    double lb = -kInf;
    double ub = kInf;
    bool binary = false;
};

struct VarHandle {
    int index = -1;
    std::string name;
    std::string role;
};

class ConicProgram {
public:
    VarHandle add_var(const std::string& name, const std::string& role = "", double lb = -kInf, double ub = kInf);
    int add_row(std::vector<Term> terms, Sense sense, double rhs, const std::string& family);
    int add_row(const AffExpr& lhs, Sense sense, const AffExpr& rhs, const std::string& family);
    int add_cone(ConeBlock block);
    void mark_binary(int var);
    void set_objective(const AffExpr& obj) { objective_ = obj; }

    int num_vars() const { return static_cast<int>(vars_.size()); }
    const std::vector<VarInfo>& vars() const { return vars_; }
    std::vector<VarInfo>& vars() { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<ConeBlock>& cones() const { return cones_; }
    const AffExpr& objective() const { return objective_; }
    std::vector<int> binaries() const;
    int find(const std::string& name) const;  // -1 if absent

    // Largest violation over rows, bounds and cones at x (cones measured by distance to the boundary).
    double max_violation(const Eigen::VectorXd& x) const;
    std::string dump() const;

private:
    std::vector<VarInfo> vars_;
    std::unordered_map<std::string, int> by_name_;
    std::vector<Row> rows_;
    std::vector<ConeBlock> cones_;
    AffExpr objective_;
};

VarHandle add_abs_value(ConicProgram& prog, const AffExpr& x, double a, const std::string& name,
                        const std::string& family = "abs");

struct PowerTower {
    int raw_blocks = 0;        // 2^l - 1 internal nodes of the full tree
    int cone_blocks = 0;       // rotated cones actually emitted
    int linear_rows = 0;
    std::vector<int> cone_indices;
    std::vector<int> aux_vars;
};

// y^r <= zeta^s u^(r-s) on the nonnegative orthant.
PowerTower add_rational_power(ConicProgram& prog, const VarHandle& y, const VarHandle& zeta, const VarHandle& u,
                              int r, int s, const std::string& prefix, const std::string& family = "power");

struct NormEpigraph {
    VarHandle u;
    std::vector<VarHandle> y;
    std::vector<VarHandle> zeta;
    int cone_blocks = 0;
    int linear_rows = 0;
};

// omega * ||expr||_{r/s} <= u.
NormEpigraph add_norm_epigraph(ConicProgram& prog, const std::vector<AffExpr>& expr, double omega, int r, int s,
                               const std::string& prefix, const std::string& abs_family = "abs",
                               const std::string& power_family = "power", const std::string& sum_family = "sum");

struct ConeSpec {
    int zero = 0;
    int nonneg = 0;
    std::vector<int> soc;
    std::vector<int> psd;  // sides
    int total() const;
};

struct StandardForm {
    Eigen::SparseMatrix<double> A;  // min c'x + c0  s.t.  Ax + s = b, s in K
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    double c0 = 0.0;
    ConeSpec cones;
    std::vector<int> binaries;
    int source_rows = 0;
    int source_cones = 0;
};

StandardForm to_standard_form(const ConicProgram& prog);

int psd_packed_size(int side);

}  // namespace omloc
