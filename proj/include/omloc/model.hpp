#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace omloc {

using Point = Eigen::VectorXd;

// tau = r/s, kept in lowest terms.
class NormExponent {
public:
    NormExponent() = default;
    NormExponent(int r, int s);

    static NormExponent from_decimal(double tau);
    // Accepts "r/s" or a decimal literal.
    static NormExponent parse(const std::string& text);

    int r() const { return r_; }
    int s() const { return s_; }
    double tau() const { return static_cast<double>(r_) / s_; }
    std::string str() const;

    bool operator==(const NormExponent&) const = default;

private:
    int r_ = 2;
    int s_ = 1;
};

double norm_tau(const Eigen::Ref<const Eigen::VectorXd>& v, const NormExponent& e);

struct DemandSet {
    std::vector<Point> points;

    int n() const { return static_cast<int>(points.size()); }
    int d() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

struct NIWeights {
    Eigen::VectorXd omega;   // n
    Eigen::MatrixXd lambda;  // n x p, column j used by facility j
    Eigen::MatrixXd mu;      // p x p, only the strict upper triangle is read
};

struct SAWeights {
    Eigen::VectorXd lambda;  // n, position 1 is the largest distance
};

enum class Variant { NonInterchangeable, SingleAllocation };

struct Instance {
    DemandSet demand;
    NormExponent norm;
    int p = 1;
    Variant variant = Variant::SingleAllocation;
    NIWeights ni;
    SAWeights sa;
    double M = 0.0;
    std::vector<double> UB;

    int n() const { return demand.n(); }
    int d() const { return demand.d(); }
};

struct Violation {
    std::string what;
    int index = -1;
};

std::vector<Violation> validate(const Instance& inst);
void require_valid(const Instance& inst);

double bound_M(const DemandSet& demand, const NormExponent& norm);
std::vector<double> compute_UB(const Instance& inst);

enum class LambdaKind { Median, Center, KCentrum };
SAWeights lambda_preset(LambdaKind kind, int n, int k = 0);

Instance make_sa_instance(std::vector<Point> points, NormExponent norm, int p, Eigen::VectorXd lambda);
Instance make_ni_instance(std::vector<Point> points, NormExponent norm, int p, NIWeights weights);

bool is_non_increasing(const Eigen::Ref<const Eigen::VectorXd>& v, double tol = 0.0);

// Variable counts of the single-allocation program.
struct VariableCounts {
    long long actual = 0;            // sum over the variable families x,z,u,v,zeta,w,t,theta
    long long formula_section4 = 0;  // d + np(d+2) + n^2 + 2n + npd
    long long formula_np_plus_m = 0; // N p + M with N = d+2n+2nd, M = n(n+2)
    long long symmetric = 0;         // N p, the facility-indexed variables
};
VariableCounts sa_variable_counts(int n, int p, int d);

}  // namespace omloc
