#include "omloc/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace omloc {

NormExponent::NormExponent(int r, int s) {
    if (r <= 0 || s <= 0) throw std::invalid_argument("norm exponent needs positive r and s");
    int g = std::gcd(r, s);
    r /= g;
    s /= g;
    if (r < s) throw std::invalid_argument("norm exponent r/s must be >= 1");
    r_ = r;
    s_ = s;
}

NormExponent NormExponent::from_decimal(double tau) {
    if (!std::isfinite(tau) || tau < 1.0) throw std::invalid_argument("tau must be a finite value >= 1");
    // Continued-fraction convergents, denominator capped at 64.
    long long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    double x = tau;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(x);
        long long h2 = static_cast<long long>(a) * h0 + h1;
        long long k2 = static_cast<long long>(a) * k0 + k1;
        if (k2 > 64) break;
        h1 = h0; h0 = h2;
        k1 = k0; k0 = k2;
        if (std::abs(static_cast<double>(h0) / k0 - tau) <= 1e-12) {
            return NormExponent(static_cast<int>(h0), static_cast<int>(k0));
        }
        double frac = x - a;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    std::ostringstream os;
    os.precision(17);
    os << "tau " << tau << " has no rational form r/s with s <= 64 within 1e-12";
    throw std::invalid_argument(os.str());
}

NormExponent NormExponent::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse tau '" + text + "'");
        }
        if (used != text.size()) throw std::invalid_argument("cannot parse tau '" + text + "'");
        return from_decimal(v);
    }
    try {
        std::size_t u1 = 0, u2 = 0;
        std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        int r = std::stoi(a, &u1);
        int s = std::stoi(b, &u2);
        if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("");
        return NormExponent(r, s);
    } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).rfind("norm exponent", 0) == 0) throw;
        throw std::invalid_argument("cannot parse tau '" + text + "'");
    }
}

std::string NormExponent::str() const {
    return std::to_string(r_) + "/" + std::to_string(s_);
}

double norm_tau(const Eigen::Ref<const Eigen::VectorXd>& v, const NormExponent& e) {
    if (e.r() == 1 && e.s() == 1) return v.lpNorm<1>();
    if (e.r() == 2 && e.s() == 1) return v.norm();
    double m = v.lpNorm<Eigen::Infinity>();
    if (m == 0.0) return 0.0;
    double tau = e.tau(), acc = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::pow(std::abs(v[k]) / m, tau);
    return m * std::pow(acc, 1.0 / tau);
}

bool is_non_increasing(const Eigen::Ref<const Eigen::VectorXd>& v, double tol) {
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol) return false;
    return true;
}

std::vector<Violation> validate(const Instance& inst) {
    std::vector<Violation> out;
    const int n = inst.n();
    if (n < 1) out.push_back({"no demand points", -1});
    const int d = inst.d();
    if (n >= 1 && d < 1) out.push_back({"dimension must be >= 1", -1});
    for (int i = 0; i < n; ++i) {
        if (inst.demand.points[i].size() != d) out.push_back({"point " + std::to_string(i + 1) + " has wrong dimension", i});
        else if (!inst.demand.points[i].allFinite()) out.push_back({"point " + std::to_string(i + 1) + " not finite", i});
    }
    if (inst.p < 1) out.push_back({"p must be >= 1", -1});
    if (!(inst.M >= 0.0) || !std::isfinite(inst.M)) out.push_back({"M must be finite and >= 0", -1});

    if (inst.variant == Variant::NonInterchangeable) {
        const auto& w = inst.ni;
        if (w.omega.size() != n) out.push_back({"omega length differs from n", -1});
        for (Eigen::Index i = 0; i < w.omega.size(); ++i)
            if (!(w.omega[i] >= 0.0)) out.push_back({"omega[" + std::to_string(i + 1) + "] negative", static_cast<int>(i)});
        if (w.lambda.rows() != n || w.lambda.cols() != inst.p) {
            out.push_back({"lambda must be n x p", -1});
        } else {
            for (int j = 0; j < inst.p; ++j) {
                if (!is_non_increasing(w.lambda.col(j)))
                    out.push_back({"column " + std::to_string(j + 1) + " not non-increasing", j});
                for (int i = 0; i < n; ++i)
                    if (!(w.lambda(i, j) >= 0.0))
                        out.push_back({"lambda[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "] negative", i});
            }
        }
        if (inst.p > 1) {
            if (w.mu.rows() != inst.p || w.mu.cols() != inst.p) {
                out.push_back({"mu must be p x p", -1});
            } else {
                for (int j = 0; j < inst.p; ++j)
                    for (int k = j + 1; k < inst.p; ++k)
                        if (!(w.mu(j, k) >= 0.0))
                            out.push_back({"mu[" + std::to_string(j + 1) + "," + std::to_string(k + 1) + "] negative", j});
            }
        }
    } else {
        const auto& lam = inst.sa.lambda;
        if (lam.size() != n) out.push_back({"lambda length differs from n", -1});
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            if (!(lam[i] >= 0.0)) out.push_back({"lambda[" + std::to_string(i + 1) + "] negative", static_cast<int>(i)});
        if (static_cast<int>(inst.UB.size()) != n) {
            out.push_back({"UB length differs from n", -1});
        } else {
            for (int i = 0; i < n && i < static_cast<int>(inst.demand.points.size()); ++i) {
                if (inst.demand.points[i].size() != d) continue;
                double need = norm_tau(inst.demand.points[i], inst.norm) + inst.M;
                if (!(inst.UB[i] >= need * (1 - 1e-12)))
                    out.push_back({"UB[" + std::to_string(i + 1) + "] below the ball bound", i});
            }
        }
    }
    return out;
}

void require_valid(const Instance& inst) {
    auto v = validate(inst);
    if (v.empty()) return;
    std::string msg = "invalid instance:";
    for (const auto& e : v) msg += " " + e.what + ";";
    throw std::invalid_argument(msg);
}

double bound_M(const DemandSet& demand, const NormExponent& norm) {
    if (demand.n() < 1) throw std::invalid_argument("bound_M needs at least one point");
    double m = 0.0;
    for (const auto& a : demand.points) m = std::max(m, norm_tau(a, norm));
    return 2.0 * m;
}

std::vector<double> compute_UB(const Instance& inst) {
    std::vector<double> ub(inst.n());
    for (int i = 0; i < inst.n(); ++i) ub[i] = norm_tau(inst.demand.points[i], inst.norm) + inst.M;
    return ub;
}

SAWeights lambda_preset(LambdaKind kind, int n, int k) {
    if (n < 1) throw std::invalid_argument("lambda preset needs n >= 1");
    SAWeights w;
    w.lambda = Eigen::VectorXd::Zero(n);
    switch (kind) {
    case LambdaKind::Median: w.lambda.setOnes(); break;
    case LambdaKind::Center: w.lambda[0] = 1.0; break;
    case LambdaKind::KCentrum:
        if (k < 1 || k > n) throw std::invalid_argument("k-centrum needs 1 <= k <= n");
        w.lambda.head(k).setOnes();
        break;
    }
    return w;
}

Instance make_sa_instance(std::vector<Point> points, NormExponent norm, int p, Eigen::VectorXd lambda) {
    Instance inst;
    inst.demand.points = std::move(points);
    inst.norm = norm;
    inst.p = p;
    inst.variant = Variant::SingleAllocation;
    inst.sa.lambda = std::move(lambda);
    if (inst.n() >= 1) {
        inst.M = bound_M(inst.demand, norm);
        inst.UB = compute_UB(inst);
    }
    require_valid(inst);
    return inst;
}

Instance make_ni_instance(std::vector<Point> points, NormExponent norm, int p, NIWeights weights) {
    Instance inst;
    inst.demand.points = std::move(points);
    inst.norm = norm;
    inst.p = p;
    inst.variant = Variant::NonInterchangeable;
    inst.ni = std::move(weights);
    if (inst.ni.mu.size() == 0) inst.ni.mu = Eigen::MatrixXd::Zero(p, p);
    if (inst.n() >= 1) inst.M = bound_M(inst.demand, norm);
    require_valid(inst);
    return inst;
}

VariableCounts sa_variable_counts(int n, int p, int d) {
    VariableCounts c;
    long long N = n, P = p, D = d;
    c.actual = P * D + 2 * N * P + 2 * N * P * D + N * N + 2 * N;
    c.formula_section4 = D + N * P * (D + 2) + N * N + 2 * N + N * P * D;
    c.formula_np_plus_m = (D + 2 * N + 2 * N * D) * P + N * (N + 2);
    c.symmetric = (D + 2 * N + 2 * N * D) * P;
    return c;
}

}  // namespace omloc
