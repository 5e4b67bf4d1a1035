#pragma once

#include "omloc/cone_ir.hpp"

#include <Eigen/Dense>
#include <string>

namespace omloc {

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, NumericalFailure };
const char* to_string(SolveStatus s);

struct SolverSettings {
    double tol = 1e-7;
    double infeas_tol = 1e-8;
    int max_iter = 200000;
    int verbosity = 0;
    double alpha = 1.5;             // over-relaxation
    double scale = 0.1;             // initial dual scale
    bool adaptive_scale = true;
    double rho_x = 1e-6;
    double rho_tau = 1.0;
    int ruiz_passes = 10;
    int anderson_memory = 5;
    int restart_window = 1000;      // iterations without progress before the history is dropped
    int check_every = 10;
    int max_psd_side = 256;
    double time_limit = 0.0;        // seconds, 0 = none
};

struct Residuals {
    double primal = 0.0;  // ||Ax + s - b||_inf / (1 + ||b||_inf)
    double dual = 0.0;    // ||A'y + c||_inf / (1 + ||c||_inf)
    double gap = 0.0;     // |c'x + b'y| / (1 + |c'x| + |b'y|)
};

struct Solution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x, y, s;
    double objective = 0.0;       // c'x + c0
    double dual_objective = 0.0;  // -b'y + c0
    Residuals residuals;
    int iterations = 0;
    int refactorizations = 0;
    double solve_seconds = 0.0;
};

// A single cone factor of K (or K*, all cones used here are self-dual except the zero cone).
struct Cone {
    enum class Type { Zero, Nonneg, SOC, PSD } type;
    int size;  // entries; for PSD the side
    int dim() const { return type == Type::PSD ? size * (size + 1) / 2 : size; }
};

Eigen::VectorXd project_cone(const Eigen::VectorXd& v, const Cone& cone);
// Projection onto the dual cone (the zero cone's dual is the whole space).
Eigen::VectorXd project_dual_cone(const Eigen::VectorXd& v, const Cone& cone);
std::vector<Cone> cone_list(const ConeSpec& spec);

Solution solve(const StandardForm& sf, const SolverSettings& settings = {});
// Relaxes binaries to [0,1].
Solution solve(const ConicProgram& prog, const SolverSettings& settings = {});

Residuals certify(const Solution& sol, const StandardForm& sf);

}  // namespace omloc
