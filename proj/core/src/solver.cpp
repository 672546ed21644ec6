#include "popt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace popt {

namespace {

struct VecSystem {
    RealMatrix c;        // m x n^2 constraint rows
    RealVector rhs;      // m
    RealMatrix v_range;  // n^2 x rank, orthonormal basis of the row space
    RealVector x0;       // min-norm least-squares solution
    double data_residual = 0.0;
    int rank = 0;
};

VecSystem vectorize(const DetectionProblem& p) {
    const int n = p.dim;
    const int m = static_cast<int>(p.constraints.size());
    if (m == 0) throw std::invalid_argument("solve_detection: no constraints");
    VecSystem sys;
    sys.c.resize(m, n * n);
    sys.rhs.resize(m);
    for (int k = 0; k < m; ++k) {
        const Constraint& ct = p.constraints[static_cast<std::size_t>(k)];
        if (ct.op.dim() != n)
            throw std::invalid_argument("solve_detection: constraint dimension mismatch");
        sys.c.row(k) = hermitian_to_real_vec(ct.op.matrix()).transpose();
        sys.rhs(k) = ct.rhs;
    }
    Eigen::JacobiSVD<RealMatrix> svd(sys.c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankCutoff * top) ++rank;
    sys.rank = rank;
    sys.v_range = svd.matrixV().leftCols(rank);
    RealVector coeff = svd.matrixU().leftCols(rank).transpose() * sys.rhs;
    for (int i = 0; i < rank; ++i) coeff(i) /= sv(i);
    sys.x0 = sys.v_range * coeff;
    sys.data_residual = (sys.c * sys.x0 - sys.rhs).norm();
    return sys;
}

// Projection onto the (consistent) affine slice {x : C x = P_range(rhs)}.
RealVector project_affine(const VecSystem& sys, const RealVector& x) {
    return x - sys.v_range * (sys.v_range.transpose() * (x - sys.x0));
}

// prox of (1/sigma) Tr(M)_- : negative eigenvalues move up by 1/sigma, capped at 0.
ComplexMatrix prox_negative_trace(const ComplexMatrix& t, double inv_sigma) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (t + t.adjoint().eval()));
    RealVector w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) < 0.0) w(i) = std::min(0.0, w(i) + inv_sigma);
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix psd_clip(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint().eval()));
    RealVector w = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double min_eig(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint().eval()));
    return es.eigenvalues()(0);
}

SDPSolution finish_from(const RealVector& x, int n, const VecSystem& sys) {
    SDPSolution sol;
    const NegativePart parts = negative_part(HermitianOperator(real_vec_to_hermitian(x, n)));
    sol.c = parts.c;
    sol.x_plus = parts.positive;
    sol.x_minus = parts.negative;
    sol.data_residual = sys.data_residual;
    return sol;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iters: return "max_iters";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "optimal";
}

const char* to_string(SolveMethod m) {
    return m == SolveMethod::splitting ? "splitting" : "linear_inversion_shortcut";
}

SDPSolution solve_detection(const DetectionProblem& p) {
    const int n = p.dim;
    if (n <= 0) throw std::invalid_argument("solve_detection: dim must be positive");
    const SolverOptions& opts = p.options;
    const VecSystem sys = vectorize(p);

    if (sys.data_residual > opts.eps_feasibility * (1.0 + sys.rhs.norm())) {
        SDPSolution sol = finish_from(sys.x0, n, sys);
        sol.status = SolveStatus::infeasible;
        sol.method = SolveMethod::linear_inversion_shortcut;
        sol.residual_primal = sys.data_residual;
        return sol;
    }

    if (opts.shortcut_allowed && sys.rank == n * n) {
        // Constraints determine X uniquely; linear inversion is exact.
        SDPSolution sol = finish_from(sys.x0, n, sys);
        sol.status = SolveStatus::optimal;
        sol.method = SolveMethod::linear_inversion_shortcut;
        sol.residual_primal = sys.data_residual;
        sol.iterations = 0;
        return sol;
    }

    // Operator splitting: consensus between the spectral objective and the
    // affine constraint slice, PSD structure handled by the eigenvalue prox.
    double sigma = opts.step > 0 ? opts.step : 1.0;
    RealVector w = sys.x0;            // affine-feasible iterate
    RealVector v = w;                 // objective iterate
    RealVector u = RealVector::Zero(w.size());  // scaled dual
    double r_primal = 0.0, r_dual = 0.0;
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iters; ++it) {
        const ComplexMatrix t = real_vec_to_hermitian(w - u, n);
        v = hermitian_to_real_vec(prox_negative_trace(t, 1.0 / sigma));
        const RealVector w_prev = w;
        w = project_affine(sys, v + u);
        u += v - w;
        r_primal = (v - w).norm();
        r_dual = sigma * (w - w_prev).norm();
        const double scale_p = 1.0 + std::max(v.norm(), w.norm());
        const double scale_d = 1.0 + sigma * u.norm();
        if (r_primal <= opts.eps_primal * scale_p && r_dual <= opts.eps_dual * scale_d) {
            converged = true;
            ++it;
            break;
        }
        if ((it + 1) % 32 == 0) {
            if (r_primal > 10.0 * r_dual && sigma < 1e8) {
                sigma *= 2.0;
                u *= 0.5;
            } else if (r_dual > 10.0 * r_primal && sigma > 1e-6) {
                sigma *= 0.5;
                u *= 2.0;
            }
        }
    }

    SDPSolution sol = finish_from(w, n, sys);
    sol.status = converged ? SolveStatus::optimal : SolveStatus::max_iters;
    sol.method = SolveMethod::splitting;
    sol.residual_primal = r_primal;
    sol.residual_dual = r_dual;
    sol.iterations = it;
    return sol;
}

std::optional<PoptDecomposition> solve_popt_decomposition(const HermitianOperator& h, int d_a,
                                                          int d_b, const SolverOptions& opts) {
    if (d_a != 2 || d_b != 2)
        throw std::invalid_argument("solve_popt_decomposition: requires d_a = d_b = 2");
    if (h.dim() != 4) throw std::invalid_argument("solve_popt_decomposition: dimension mismatch");

    const ComplexMatrix& m = h.matrix();
    const double scale = std::max(1.0, m.norm());
    const auto gamma = [](const ComplexMatrix& x) { return partial_transpose(x, 2, 2); };

    const auto finish = [&](const ComplexMatrix& rho1) {
        const ComplexMatrix rest = m - gamma(rho1);
        const ComplexMatrix rho2 = psd_clip(rest);
        PoptDecomposition out;
        out.rho1 = HermitianOperator(rho1);
        out.rho2 = HermitianOperator(rho2);
        out.residual = (gamma(rho1) + rho2 - m).norm();
        return out;
    };

    // H already PSD: trivial decomposition.
    if (min_eig(m) >= -1e-12 * scale) {
        PoptDecomposition out = finish(ComplexMatrix::Zero(4, 4));
        return out;
    }
    // Gamma(H) PSD: H is the partial transpose of a quantum state, exactly.
    const ComplexMatrix k = gamma(m);
    if (min_eig(k) >= -1e-12 * scale) {
        PoptDecomposition out = finish(psd_clip(k));
        return out;
    }

    // Douglas-Rachford between the PSD pair cone and the affine slice
    // Gamma(rho1) + rho2 = H.
    const double target = 1e-10 * scale;
    ComplexMatrix z1 = psd_clip(k);
    ComplexMatrix z2 = psd_clip(m);
    for (int it = 0; it < opts.max_iters; ++it) {
        const ComplexMatrix x1 = psd_clip(z1);
        const ComplexMatrix x2 = psd_clip(z2);

        // Candidate from the rho1 side: rho2 forced by the affine identity.
        if (min_eig(m - gamma(x1)) >= -target) {
            PoptDecomposition out = finish(x1);
            out.iterations = it;
            return out;
        }
        // Candidate from the rho2 side.
        const ComplexMatrix r1 = gamma(m - x2);
        if (min_eig(r1) >= -target) {
            PoptDecomposition out = finish(psd_clip(r1));
            out.iterations = it;
            return out;
        }

        // z <- z + P_aff(2x - z) - x, written out per block.
        const ComplexMatrix rx1 = 2.0 * x1 - z1;
        const ComplexMatrix rx2 = 2.0 * x2 - z2;
        const ComplexMatrix lambda = 0.5 * (m - gamma(rx1) - rx2);
        z1 = x1 + gamma(lambda);
        z2 = x2 + lambda;
    }
    return std::nullopt;
}

}  // namespace popt
