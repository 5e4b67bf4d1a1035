#include "omloc/conic_solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace omloc {

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

void project_soc_inplace(double* v, int k) {
    double t = v[0], nx = 0.0;
    for (int i = 1; i < k; ++i) nx += v[i] * v[i];
    nx = std::sqrt(nx);
    if (nx <= t) return;
    if (nx <= -t) {
        std::fill(v, v + k, 0.0);
        return;
    }
    double a = 0.5 * (t + nx);
    v[0] = a;
    double f = a / nx;
    for (int i = 1; i < k; ++i) v[i] *= f;
}

struct PsdScratch {
    Eigen::MatrixXd S;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
};

void project_psd_inplace(double* v, int m, PsdScratch& w) {
    w.S.resize(m, m);
    int k = 0;
    for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i, ++k) {
            double val = (i == j) ? v[k] : v[k] / kSqrt2;
            w.S(i, j) = val;
            w.S(j, i) = val;
        }
    w.es.compute(w.S, Eigen::ComputeEigenvectors);
    const auto& ev = w.es.eigenvalues();
    if (ev[0] >= 0.0) return;
    const auto& Q = w.es.eigenvectors();
    int first = 0;
    while (first < m && ev[first] < 0.0) ++first;
    Eigen::MatrixXd Qp = Q.rightCols(m - first);
    Eigen::VectorXd lp = ev.tail(m - first);
    w.S.noalias() = Qp * lp.asDiagonal() * Qp.transpose();
    k = 0;
    for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i, ++k) v[k] = (i == j) ? w.S(i, j) : w.S(i, j) * kSqrt2;
}

void project_dual_inplace(double* v, const Cone& c, PsdScratch& w) {
    switch (c.type) {
    case Cone::Type::Zero: break;
    case Cone::Type::Nonneg:
        for (int i = 0; i < c.size; ++i) v[i] = std::max(v[i], 0.0);
        break;
    case Cone::Type::SOC: project_soc_inplace(v, c.size); break;
    case Cone::Type::PSD: project_psd_inplace(v, c.size, w); break;
    }
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Residuals of an unscaled candidate, accumulated in long double.
Residuals residuals_of(const StandardForm& sf, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& s) {
    const auto& A = sf.A;
    std::vector<long double> ax(A.rows(), 0.0L), aty(A.cols(), 0.0L);
    for (int j = 0; j < A.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
            ax[it.row()] += static_cast<long double>(it.value()) * x[j];
            aty[j] += static_cast<long double>(it.value()) * y[it.row()];
        }
    long double pr = 0, dr = 0, cx = 0, by = 0;
    for (int i = 0; i < A.rows(); ++i) {
        pr = std::max(pr, std::abs(ax[i] + s[i] - sf.b[i]));
        by += static_cast<long double>(sf.b[i]) * y[i];
    }
    for (int j = 0; j < A.cols(); ++j) {
        dr = std::max(dr, std::abs(aty[j] + sf.c[j]));
        cx += static_cast<long double>(sf.c[j]) * x[j];
    }
    Residuals r;
    r.primal = static_cast<double>(pr) / (1.0 + inf_norm(sf.b));
    r.dual = static_cast<double>(dr) / (1.0 + inf_norm(sf.c));
    r.gap = static_cast<double>(std::abs(cx + by) / (1.0L + std::abs(cx) + std::abs(by)));
    return r;
}

class Engine {
public:
    Engine(const StandardForm& sf, const SolverSettings& st) : sf_(sf), st_(st) {
        n_ = static_cast<int>(sf.A.cols());
        m_ = static_cast<int>(sf.A.rows());
        cones_ = cone_list(sf.cones);
        if (sf.cones.total() != m_) throw std::invalid_argument("cone sizes do not match the row count");
        for (int side : sf.cones.psd)
            if (side > st.max_psd_side)
                throw std::invalid_argument("PSD block of side " + std::to_string(side) + " exceeds the internal cap of " +
                                            std::to_string(st.max_psd_side) + "; export to SDPA and use an external solver");
        equilibrate();
        scale_ = st.scale;
        set_r();
        factor();
    }

    Solution run();

private:
    void equilibrate();
    void set_r();
    void factor();
    void solve_mhat(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, Eigen::VectorXd& out);
    void apply_T(const Eigen::VectorXd& w, Eigen::VectorXd& ut, Eigen::VectorXd& u);
    void unscale(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& x, Eigen::VectorXd& y,
                 Eigen::VectorXd& s) const;

    const StandardForm& sf_;
    const SolverSettings& st_;
    int n_ = 0, m_ = 0;
    std::vector<Cone> cones_;
    std::vector<int> block_of_row_;
    Eigen::SparseMatrix<double> A_;  // scaled
    Eigen::VectorXd b_, c_, D_, E_;
    double sb_ = 1.0, sc_ = 1.0;
    double scale_ = 0.1;
    Eigen::VectorXd rdiag_;  // length n+m+1
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
    Eigen::VectorXd g_;
    double hg_ = 0.0;
    int refactor_ = 0;
    PsdScratch psd_;
};

std::vector<int> row_blocks(const std::vector<Cone>& cones) {
    std::vector<int> out;
    for (std::size_t k = 0; k < cones.size(); ++k)
        for (int i = 0; i < cones[k].dim(); ++i) out.push_back(static_cast<int>(k));
    return out;
}

void Engine::equilibrate() {
    A_ = sf_.A;
    D_ = Eigen::VectorXd::Ones(m_);
    E_ = Eigen::VectorXd::Ones(n_);
    block_of_row_ = row_blocks(cones_);
    std::vector<int> offset(cones_.size() + 1, 0);
    for (std::size_t k = 0; k < cones_.size(); ++k) offset[k + 1] = offset[k] + cones_[k].dim();
    for (int pass = 0; pass < st_.ruiz_passes; ++pass) {
        Eigen::VectorXd rn = Eigen::VectorXd::Zero(m_), cn = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < A_.outerSize(); ++j)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A_, j); it; ++it) {
                double a = std::abs(it.value());
                rn[it.row()] = std::max(rn[it.row()], a);
                cn[j] = std::max(cn[j], a);
            }
        Eigen::VectorXd d(m_), e(n_);
        for (int i = 0; i < m_; ++i) d[i] = rn[i] > 1e-12 ? 1.0 / std::sqrt(rn[i]) : 1.0;
        for (int j = 0; j < n_; ++j) e[j] = cn[j] > 1e-12 ? 1.0 / std::sqrt(cn[j]) : 1.0;
        // Cones other than the orthant need one factor per block.
        for (std::size_t k = 0; k < cones_.size(); ++k) {
            if (cones_[k].type == Cone::Type::Zero || cones_[k].type == Cone::Type::Nonneg) continue;
            double lo = 0.0;
            int cnt = 0;
            for (int i = offset[k]; i < offset[k + 1]; ++i) lo += std::log(d[i]), ++cnt;
            double f = cnt ? std::exp(lo / cnt) : 1.0;
            for (int i = offset[k]; i < offset[k + 1]; ++i) d[i] = f;
        }
        for (int i = 0; i < m_; ++i) {
            double nd = std::clamp(D_[i] * d[i], 1e-4, 1e4);
            d[i] = nd / D_[i];
            D_[i] = nd;
        }
        for (int j = 0; j < n_; ++j) {
            double ne = std::clamp(E_[j] * e[j], 1e-4, 1e4);
            e[j] = ne / E_[j];
            E_[j] = ne;
        }
        A_ = d.asDiagonal() * A_ * e.asDiagonal();
    }
    A_.makeCompressed();
    b_ = D_.cwiseProduct(sf_.b);
    c_ = E_.cwiseProduct(sf_.c);
    sb_ = 1.0 / std::max(1.0, inf_norm(b_));
    sc_ = 1.0 / std::max(1.0, inf_norm(c_));
    b_ *= sb_;
    c_ *= sc_;
}

void Engine::set_r() {
    rdiag_.resize(n_ + m_ + 1);
    rdiag_.head(n_).setConstant(st_.rho_x);
    for (int i = 0; i < m_; ++i)
        rdiag_[n_ + i] = cones_[block_of_row_[i]].type == Cone::Type::Zero ? 1.0 / (1000.0 * scale_) : 1.0 / scale_;
    rdiag_[n_ + m_] = st_.rho_tau;
}

void Engine::factor() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n_ + m_ + A_.nonZeros());
    for (int j = 0; j < n_; ++j) trip.emplace_back(j, j, rdiag_[j]);
    for (int i = 0; i < m_; ++i) trip.emplace_back(n_ + i, n_ + i, -rdiag_[n_ + i]);
    for (int j = 0; j < A_.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_, j); it; ++it)
            trip.emplace_back(n_ + static_cast<int>(it.row()), j, it.value());
    Eigen::SparseMatrix<double> K(n_ + m_, n_ + m_);
    K.setFromTriplets(trip.begin(), trip.end());
    if (refactor_ == 0) ldlt_.analyzePattern(K);
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("KKT factorization failed");
    ++refactor_;
    Eigen::VectorXd h(n_ + m_);
    h.head(n_) = c_;
    h.tail(m_) = b_;
    solve_mhat(c_, b_, g_);
    hg_ = h.dot(g_);
}

// Solves [[rho_x I, A'], [-A, R_y]] z = (rx, ry).
void Engine::solve_mhat(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, Eigen::VectorXd& out) {
    Eigen::VectorXd rhs(n_ + m_);
    rhs.head(n_) = rx;
    rhs.tail(m_) = -ry;
    out = ldlt_.solve(rhs);
}

void Engine::apply_T(const Eigen::VectorXd& w, Eigen::VectorXd& ut, Eigen::VectorXd& u) {
    const int N = n_ + m_;
    Eigen::VectorXd rx = rdiag_.head(n_).cwiseProduct(w.head(n_));
    Eigen::VectorXd ry = rdiag_.segment(n_, m_).cwiseProduct(w.segment(n_, m_));
    double rt = rdiag_[N] * w[N];
    Eigen::VectorXd p;
    solve_mhat(rx, ry, p);
    double hp = c_.dot(p.head(n_)) + b_.dot(p.tail(m_));
    double tau = (rt + hp) / (rdiag_[N] + hg_);
    ut.resize(N + 1);
    ut.head(N) = p - g_ * tau;
    ut[N] = tau;
    u = 2.0 * ut - w;
    int off = n_;
    for (const auto& c : cones_) {
        project_dual_inplace(u.data() + off, c, psd_);
        off += c.dim();
    }
    u[N] = std::max(u[N], 0.0);
}

void Engine::unscale(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& x, Eigen::VectorXd& y,
                     Eigen::VectorXd& s) const {
    x = E_.cwiseProduct(u.head(n_)) / sb_;
    y = D_.cwiseProduct(u.segment(n_, m_)) / sc_;
    s = v.segment(n_, m_).cwiseQuotient(D_) / sb_;
}

Solution Engine::run() {
    auto t0 = std::chrono::steady_clock::now();
    const int N = n_ + m_;
    Solution sol;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N + 1);
    w[N] = 1.0 + 1.0 / rdiag_[N];

    // The embedding is homogeneous: w = 0 is a fixed point, so keep the history
    // small relative to the dimension and never let the accelerated iterate collapse.
    const int mem = std::clamp(st_.anderson_memory, 0, std::max(0, (N + 1) / 2 - 1));
    const double w0norm = w.norm();
    Eigen::MatrixXd S(N + 1, std::max(mem, 1)), Y(N + 1, std::max(mem, 1));
    int hist = 0, head = 0;
    Eigen::VectorXd w_old, g_old, F_plain, ut, u, F, g;
    bool have_old = false, last_aa = false, aa_on = mem > 0;
    int stalls = 0, hk = 0;
    bool halpern = false;
    Eigen::VectorXd anchor;
    double g_anchor = 0.0;
    double gnorm_plain = 0.0;
    double best_merit = kInf;
    int best_iter = 0, last_scale_iter = 0, scale_interval = 100, rescales = 0;
    Eigen::VectorXd x, y, s, v;

    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int it = 0;
    for (; it < st_.max_iter; ++it) {
        apply_T(w, ut, u);
        F = w + st_.alpha * (u - ut);
        g = w - F;
        double gn = g.norm();
        if (!std::isfinite(gn)) {
            sol.status = SolveStatus::NumericalFailure;
            break;
        }
        if (last_aa && (gn > 1.5 * gnorm_plain || w.norm() < 1e-6 * w0norm)) {
            w = F_plain;
            hist = 0;
            head = 0;
            have_old = false;
            last_aa = false;
            continue;
        }

        if (it % st_.check_every == 0 || it + 1 == st_.max_iter) {
            v = rdiag_.cwiseProduct(w + u - 2.0 * ut);
            double tau = u[N], kap = v[N];
            if (tau > 1e-12 * std::max(1.0, kap)) {
                Eigen::VectorXd uu = u / tau, vv = v / tau;
                unscale(uu, vv, x, y, s);
                Residuals r = residuals_of(sf_, x, y, s);
                double merit = std::max({r.primal, r.dual, r.gap});
                if (st_.verbosity > 1 && it % 100 == 0)
                    std::fprintf(stderr, "it %6d pr %.2e dr %.2e gap %.2e scale %.2e\n", it, r.primal, r.dual, r.gap,
                                 scale_);
                if (merit <= st_.tol) {
                    sol.status = SolveStatus::Optimal;
                    sol.residuals = r;
                    break;
                }
                if (merit < 0.7 * best_merit) {
                    best_merit = merit;
                    best_iter = it;
                    stalls = 0;
                } else if (it - best_iter > st_.restart_window) {
                    if (++stalls >= 2) {
                        aa_on = false;
                        halpern = true;
                        hk = 0;
                    }
                    hist = 0;
                    head = 0;
                    have_old = false;
                    best_iter = it;
                    best_merit = merit;
                }
                if (st_.adaptive_scale && rescales < 12 && it - last_scale_iter >= scale_interval && r.primal > 0 && r.dual > 0) {
                    double ratio = std::sqrt(r.primal / r.dual);
                    if (ratio > 3.0 || ratio < 1.0 / 3.0) {
                        double ns = std::clamp(scale_ * (rescales < 3 ? ratio : std::sqrt(ratio)), 1e-6, 1e6);
                        if (ns != scale_) {
                            scale_ = ns;
                            ++rescales;
                            aa_on = mem > 0;
                            halpern = false;
                            stalls = 0;
                            set_r();
                            factor();
                            w = u + v.cwiseQuotient(rdiag_);
                            hist = 0;
                            head = 0;
                            have_old = false;
                            last_aa = false;
                            last_scale_iter = it;
                            scale_interval = std::min(2 * scale_interval, 3200);
                            continue;
                        }
                    }
                }
            }
            // Infeasibility certificates from the unnormalized iterate.
            {
                Eigen::VectorXd xc, yc, sc;
                unscale(u, v, xc, yc, sc);
                double by = sf_.b.dot(yc);
                if (by < 0) {
                    double aty = inf_norm(sf_.A.transpose() * yc);
                    if (aty / -by <= st_.infeas_tol) {
                        sol.status = SolveStatus::PrimalInfeasible;
                        sol.y = yc / -by;
                        sol.x = Eigen::VectorXd::Zero(n_);
                        sol.s = Eigen::VectorXd::Zero(m_);
                        break;
                    }
                }
                double cx = sf_.c.dot(xc);
                if (cx < 0) {
                    double res = inf_norm(sf_.A * xc + sc);
                    if (res / -cx <= st_.infeas_tol) {
                        sol.status = SolveStatus::DualInfeasible;
                        sol.x = xc / -cx;
                        sol.s = sc / -cx;
                        sol.y = Eigen::VectorXd::Zero(m_);
                        break;
                    }
                }
            }
            if (st_.time_limit > 0 && elapsed() > st_.time_limit) {
                sol.status = SolveStatus::MaxIter;
                break;
            }
        }

        if (aa_on && have_old) {
            S.col(head) = w - w_old;
            Y.col(head) = g - g_old;
            head = (head + 1) % mem;
            hist = std::min(hist + 1, mem);
        }
        w_old = w;
        g_old = g;
        have_old = true;
        F_plain = F;
        gnorm_plain = gn;
        if (aa_on && hist > 0) {
            auto Yh = Y.leftCols(hist);
            Eigen::MatrixXd G = Yh.transpose() * Yh;
            double reg = 1e-10 * (G.trace() + 1e-30);
            G.diagonal().array() += reg;
            Eigen::VectorXd gamma = G.ldlt().solve(Yh.transpose() * g);
            if (gamma.allFinite()) {
                w = F - (S.leftCols(hist) - Yh) * gamma;
                last_aa = true;
            } else {
                w = F;
                hist = 0;
                head = 0;
                last_aa = false;
            }
        } else if (halpern) {
            if (hk == 0 || gn < 0.2 * g_anchor) {
                anchor = w;
                g_anchor = gn;
                hk = 0;
            }
            const double beta = (hk + 1.0) / (hk + 2.0);
            w = beta * F + (1.0 - beta) * anchor;
            ++hk;
            last_aa = false;
        } else {
            w = F;
            last_aa = false;
        }
    }
    sol.iterations = it;
    sol.refactorizations = refactor_;
    if (it >= st_.max_iter) sol.status = SolveStatus::MaxIter;
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::MaxIter ||
        sol.status == SolveStatus::NumericalFailure) {
        if (x.size() == 0) {
            x = Eigen::VectorXd::Zero(n_);
            y = Eigen::VectorXd::Zero(m_);
            s = Eigen::VectorXd::Zero(m_);
        }
        sol.x = x;
        sol.y = y;
        sol.s = s;
        sol.residuals = residuals_of(sf_, x, y, s);
        sol.objective = sf_.c.dot(x) + sf_.c0;
        sol.dual_objective = -sf_.b.dot(y) + sf_.c0;
    } else if (sol.status == SolveStatus::PrimalInfeasible) {
        sol.objective = kInf;
        sol.dual_objective = kInf;
    } else {
        sol.objective = -kInf;
        sol.dual_objective = -kInf;
    }
    sol.solve_seconds = elapsed();
    return sol;
}

}  // namespace

std::vector<Cone> cone_list(const ConeSpec& spec) {
    std::vector<Cone> out;
    if (spec.zero) out.push_back({Cone::Type::Zero, spec.zero});
    if (spec.nonneg) out.push_back({Cone::Type::Nonneg, spec.nonneg});
    for (int q : spec.soc) out.push_back({Cone::Type::SOC, q});
    for (int m : spec.psd) out.push_back({Cone::Type::PSD, m});
    return out;
}

Eigen::VectorXd project_cone(const Eigen::VectorXd& v, const Cone& cone) {
    if (v.size() != cone.dim()) throw std::invalid_argument("projection: dimension mismatch");
    Eigen::VectorXd out = v;
    if (cone.type == Cone::Type::Zero) {
        out.setZero();
        return out;
    }
    PsdScratch w;
    project_dual_inplace(out.data(), cone, w);
    return out;
}

Eigen::VectorXd project_dual_cone(const Eigen::VectorXd& v, const Cone& cone) {
    if (v.size() != cone.dim()) throw std::invalid_argument("projection: dimension mismatch");
    Eigen::VectorXd out = v;
    PsdScratch w;
    project_dual_inplace(out.data(), cone, w);
    return out;
}

Solution solve(const StandardForm& sf, const SolverSettings& settings) {
    if (sf.A.cols() == 0) {
        Solution sol;
        sol.x.resize(0);
        sol.y = Eigen::VectorXd::Zero(sf.A.rows());
        sol.s = sf.b;
        bool feasible = true;
        Eigen::VectorXd sp = sf.b;
        int off = 0;
        for (const auto& c : cone_list(sf.cones)) {
            Eigen::VectorXd seg = sp.segment(off, c.dim());
            if ((project_cone(seg, c) - seg).lpNorm<Eigen::Infinity>() > settings.tol) feasible = false;
            off += c.dim();
        }
        sol.status = feasible ? SolveStatus::Optimal : SolveStatus::PrimalInfeasible;
        sol.objective = sol.dual_objective = feasible ? sf.c0 : kInf;
        return sol;
    }
    Engine eng(sf, settings);
    return eng.run();
}

Solution solve(const ConicProgram& prog, const SolverSettings& settings) {
    return solve(to_standard_form(prog), settings);
}

Residuals certify(const Solution& sol, const StandardForm& sf) {
    if (sol.x.size() != sf.A.cols() || sol.y.size() != sf.A.rows() || sol.s.size() != sf.A.rows())
        throw std::invalid_argument("certify: solution dimensions do not match the program");
    return residuals_of(sf, sol.x, sol.y, sol.s);
}

}  // namespace omloc
