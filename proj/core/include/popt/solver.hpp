#pragma once

#include <optional>
#include <vector>

#include "popt/linalg.hpp"

namespace popt {

enum class SolveStatus { optimal, max_iters, infeasible };
enum class SolveMethod { splitting, linear_inversion_shortcut };

const char* to_string(SolveStatus s);
const char* to_string(SolveMethod m);

struct SolverOptions {
    int max_iters = 20000;
    double eps_primal = 1e-9;
    double eps_dual = 1e-9;
    double step = 1.0;               // initial splitting penalty, adapted by residual balancing
    bool shortcut_allowed = true;    // exact linear inversion when constraints span everything
    double eps_feasibility = 1e-6;   // relative distance of rhs from the consistent subspace
};

struct Constraint {
    HermitianOperator op;
    double rhs = 0.0;
};

// min Tr X^- over X = X^+ - X^- with X^+/- PSD and Tr(X A_k) = r_k.
struct DetectionProblem {
    int dim = 0;
    std::vector<Constraint> constraints;
    SolverOptions options;
};

// When the constraint rows do not span the full Hermitian space the
// minimizer is not unique; c is the result, the X blocks are one
// representative decomposition.
struct SDPSolution {
    double c = 0.0;
    HermitianOperator x_plus;
    HermitianOperator x_minus;
    double residual_primal = 0.0;
    double residual_dual = 0.0;
    double data_residual = 0.0;  // || P_range(rhs) - rhs ||, nonzero for noisy tables
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
    SolveMethod method = SolveMethod::linear_inversion_shortcut;
};

SDPSolution solve_detection(const DetectionProblem& p);

struct PoptDecomposition {
    HermitianOperator rho1;
    HermitianOperator rho2;
    double residual = 0.0;
    int iterations = 0;
};

// Feasibility problem H = Gamma_A(rho1) + rho2 with rho1, rho2 PSD on a
// 2x2 system. Feasible exactly when H is an (unnormalized) POPT operator.
// A stalled iteration returns nullopt; definitive non-POPT verdicts come
// from a negative product_minimum certificate, not from this solver.
std::optional<PoptDecomposition> solve_popt_decomposition(const HermitianOperator& h, int d_a,
                                                          int d_b,
                                                          const SolverOptions& opts = {});

}  // namespace popt
