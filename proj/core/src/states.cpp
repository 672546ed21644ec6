#include "popt/states.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "popt/solver.hpp"

namespace popt {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

// Conditioned operator on A for fixed |v> on B: (I x <v|) H (I x |v>).
ComplexMatrix condition_on_b(const ComplexMatrix& h, int d_a, int d_b, const ComplexVector& v) {
    ComplexMatrix m(d_a, d_a);
    for (int i = 0; i < d_a; ++i)
        for (int k = 0; k < d_a; ++k) {
            cplx s(0.0, 0.0);
            for (int j = 0; j < d_b; ++j)
                for (int l = 0; l < d_b; ++l)
                    s += std::conj(v(j)) * h(i * d_b + j, k * d_b + l) * v(l);
            m(i, k) = s;
        }
    return m;
}

ComplexMatrix condition_on_a(const ComplexMatrix& h, int d_a, int d_b, const ComplexVector& u) {
    ComplexMatrix m(d_b, d_b);
    for (int j = 0; j < d_b; ++j)
        for (int l = 0; l < d_b; ++l) {
            cplx s(0.0, 0.0);
            for (int i = 0; i < d_a; ++i)
                for (int k = 0; k < d_a; ++k)
                    s += std::conj(u(i)) * h(i * d_b + j, k * d_b + l) * u(k);
            m(j, l) = s;
        }
    return m;
}

struct MinEig {
    double value;
    ComplexVector vector;
};

MinEig min_eig_pair(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint().eval()));
    return MinEig{solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

}  // namespace

const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::quantum: return "quantum";
        case StateKind::beyond_quantum: return "beyond-quantum";
        case StateKind::non_popt: return "non-popt";
        case StateKind::undetermined: return "undetermined";
    }
    return "undetermined";
}

BipartiteState::BipartiteState(HermitianOperator op_in, int da, int db, bool norm,
                               std::string label_in)
    : op(std::move(op_in)), d_a(da), d_b(db), normalized(norm), label(std::move(label_in)) {
    require(op.dim() == d_a * d_b, "BipartiteState: operator dimension must equal d_a*d_b");
    if (normalized) {
        require(std::abs(op.matrix().trace().real() - 1.0) <= kHermTol,
                "BipartiteState: normalized state must have unit trace");
    }
}

double schmidt_cap(int d) { return std::sqrt(3.0 / (2.0 * d)); }

ComplexMatrix weyl_x(int d) {
    ComplexMatrix x = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
    return x;
}

ComplexMatrix weyl_z(int d) {
    ComplexMatrix z = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j)
        z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
    return z;
}

PureStateVector bell_vector(int d, int j, int k) {
    require(d >= 2, "bell_vector: d must be >= 2");
    require(j >= 0 && j < d && k >= 0 && k < d, "bell_vector: index out of range");
    ComplexVector v = ComplexVector::Zero(d * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (int m = 0; m < d; ++m) {
        // (X^j Z^k)|m> = omega^{km} |m+j>
        const cplx phase = std::polar(amp, 2.0 * std::numbers::pi * k * m / d);
        v(((m + j) % d) * d + m) = phase;
    }
    return PureStateVector(v);
}

BipartiteState bell_projector(int d, int j, int k) {
    const PureStateVector v = bell_vector(d, j, k);
    BipartiteState s(HermitianOperator(projector(v.amplitudes())), d, d, true,
                     "bell(" + std::to_string(j) + "," + std::to_string(k) + ")");
    s.classification.kind = StateKind::quantum;
    s.classification.min_eigenvalue = 0.0;
    return s;
}

BipartiteState gamma_state(const BipartiteState& rho) {
    const double in_min = min_eigenvalue(rho.op);
    require(in_min >= -1e-8, "gamma_state: input must be a quantum state");
    BipartiteState out(partial_transpose(rho.op, rho.d_a, rho.d_b), rho.d_a, rho.d_b,
                       rho.normalized, "gamma(" + rho.label + ")");
    const double w = min_eigenvalue(out.op);
    out.classification.min_eigenvalue = w;
    out.classification.kind = w < -1e-9 ? StateKind::beyond_quantum : StateKind::quantum;
    // Gamma_A(rho1) + 0 with rho1 quantum is a decomposition by construction.
    out.classification.decomposition_found = true;
    return out;
}

double pi_t_max(int d) { return 2.0 * d / 3.0 - 1.0; }

BipartiteState pi_t_state(const PureStateVector& psi, int d, double t) {
    require(d >= 2, "pi_t_state: d must be >= 2");
    require(psi.dim() == d * d, "pi_t_state: dimension mismatch");
    const double sc = schmidt(psi, d, d).max_coefficient;
    if (sc > schmidt_cap(d) + 1e-12)
        throw std::invalid_argument("pi_t_state: max Schmidt coefficient exceeds sqrt(3/(2d))");
    if (!(t > 0.0 && t < pi_t_max(d)))
        throw std::invalid_argument("pi_t_state: t out of range (0, 2d/3 - 1)");
    const double n = static_cast<double>(d) * d;
    ComplexMatrix m = (identity(d * d) - (1.0 + t) * projector(psi.amplitudes())) / n;
    BipartiteState out(HermitianOperator(m), d, d, false, "pi_t(d=" + std::to_string(d) + ")");
    out.classification.kind = StateKind::beyond_quantum;
    out.classification.min_eigenvalue = -t / n;
    return out;
}

PureStateVector haar_random_pure(int dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(gauss(rng), gauss(rng));
    v /= v.norm();
    return PureStateVector(v);
}

ComplexMatrix haar_random_unitary(int dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i) {
        const cplx d = r(i, i);
        q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0, 0.0);
    }
    return q;
}

PureStateVector sample_P_state(int d, Rng& rng) {
    require(d >= 2, "sample_P_state: d must be >= 2");
    const PureStateVector psi = haar_random_pure(d * d, rng);
    SchmidtDecomposition sd = schmidt(psi, d, d);
    const double cap = schmidt_cap(d);
    RealVector a = sd.coefficients;
    std::vector<bool> clipped(static_cast<std::size_t>(a.size()), false);
    // Clip at the cap and rescale the free coefficients until stable.
    for (int pass = 0; pass < a.size(); ++pass) {
        bool any = false;
        for (Eigen::Index i = 0; i < a.size(); ++i)
            if (!clipped[static_cast<std::size_t>(i)] && a(i) > cap) {
                a(i) = cap;
                clipped[static_cast<std::size_t>(i)] = true;
                any = true;
            }
        if (!any) break;
        double fixed = 0.0, free = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i)
            (clipped[static_cast<std::size_t>(i)] ? fixed : free) += a(i) * a(i);
        if (free <= 0.0) break;
        const double s = std::sqrt(std::max(0.0, 1.0 - fixed) / free);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            if (!clipped[static_cast<std::size_t>(i)]) a(i) *= s;
    }
    ComplexVector v = ComplexVector::Zero(d * d);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        v += a(i) * tensor_product(ComplexVector(sd.left.col(i)), ComplexVector(sd.right.col(i)));
    v /= v.norm();
    return PureStateVector(v);
}

std::vector<PureStateVector> span_family(int d) {
    require(d >= 2, "span_family: d must be >= 2");
    std::vector<PureStateVector> basis;
    basis.reserve(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) basis.push_back(bell_vector(d, j, k));

    std::vector<PureStateVector> out = basis;
    out.reserve(static_cast<std::size_t>(d) * d * d * d);
    const double c = kSpanFamilyWeight;
    const double w1 = std::sqrt(1.0 - c);
    const double w2 = std::sqrt(c);
    const cplx im(0.0, 1.0);
    const int n = d * d;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            const ComplexVector& v1 = basis[static_cast<std::size_t>(p)].amplitudes();
            const ComplexVector& v2 = basis[static_cast<std::size_t>(q)].amplitudes();
            out.emplace_back(ComplexVector(w1 * v1 + w2 * v2));
            out.emplace_back(ComplexVector(w1 * v1 + im * w2 * v2));
        }
    return out;
}

BipartiteState random_quantum_state(int d_a, int d_b, Rng& rng) {
    const int n = d_a * d_b;
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    BipartiteState s(HermitianOperator(rho), d_a, d_b, true, "random_quantum");
    s.classification.kind = StateKind::quantum;
    s.classification.min_eigenvalue = min_eigenvalue(s.op);
    return s;
}

BipartiteState near_boundary_quantum_state(double target_min, Rng& rng) {
    require(target_min >= 0.0 && target_min < 0.25,
            "near_boundary_quantum_state: target_min out of range");
    std::uniform_real_distribution<double> uni(1.0, 2.0);
    RealVector w(4);
    w(0) = target_min;
    double rest = 0.0;
    for (int i = 1; i < 4; ++i) {
        w(i) = uni(rng);
        rest += w(i);
    }
    for (int i = 1; i < 4; ++i) w(i) *= (1.0 - target_min) / rest;
    const ComplexMatrix u = haar_random_unitary(4, rng);
    ComplexMatrix rho = u * w.cast<cplx>().asDiagonal() * u.adjoint();
    BipartiteState s(HermitianOperator(rho), 2, 2, true, "near_boundary_quantum");
    s.classification.kind = StateKind::quantum;
    s.classification.min_eigenvalue = target_min;
    return s;
}

BipartiteState random_beyond_quantum_state(Rng& rng) {
    for (;;) {
        const PureStateVector psi = haar_random_pure(4, rng);
        BipartiteState pure(HermitianOperator(projector(psi.amplitudes())), 2, 2, true,
                            "haar_pure");
        pure.classification.kind = StateKind::quantum;
        BipartiteState out = gamma_state(pure);
        if (out.classification.min_eigenvalue <= -0.05) {
            out.label = "random_beyond_quantum";
            return out;
        }
    }
}

double product_minimum(const HermitianOperator& h, int d_a, int d_b,
                       const ProductMinimumOptions& opts, Rng& rng) {
    require(h.dim() == d_a * d_b, "product_minimum: dimension mismatch");
    const ComplexMatrix& m = h.matrix();
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        ComplexVector v = haar_random_pure(d_b, rng).amplitudes();
        double value = std::numeric_limits<double>::infinity();
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            const MinEig ua = min_eig_pair(condition_on_b(m, d_a, d_b, v));
            const MinEig vb = min_eig_pair(condition_on_a(m, d_a, d_b, ua.vector));
            v = vb.vector;
            if (std::abs(value - vb.value) < opts.tol * (1.0 + std::abs(vb.value))) {
                value = vb.value;
                break;
            }
            value = vb.value;
        }
        best = std::min(best, value);
    }
    return best;
}

double product_minimum(const BipartiteState& h, int restarts, Rng& rng) {
    ProductMinimumOptions opts;
    opts.restarts = restarts;
    return product_minimum(h.op, h.d_a, h.d_b, opts, rng);
}

double product_minimum_grid(const HermitianOperator& h, int angles_per_axis) {
    require(h.dim() == 4, "product_minimum_grid: requires d_a = d_b = 2");
    require(angles_per_axis >= 2, "product_minimum_grid: need at least 2 angles per axis");
    const ComplexMatrix& m = h.matrix();
    double best = std::numeric_limits<double>::infinity();
    const int n = angles_per_axis;
    for (int it = 0; it < n; ++it) {
        const double theta = 0.5 * std::numbers::pi * it / (n - 1);
        for (int ip = 0; ip < n; ++ip) {
            const double phi = 2.0 * std::numbers::pi * ip / n;
            ComplexVector u(2);
            u(0) = std::cos(theta);
            u(1) = std::polar(std::sin(theta), phi);
            const ComplexMatrix mb = condition_on_a(m, 2, 2, u);
            const double a = mb(0, 0).real();
            const double c = mb(1, 1).real();
            const double off = std::abs(mb(0, 1));
            const double lam = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + off * off);
            best = std::min(best, lam);
        }
    }
    return best;
}

Classification classify_state(const BipartiteState& s, Rng& rng) {
    Classification out;
    out.min_eigenvalue = min_eigenvalue(s.op);
    if (out.min_eigenvalue >= -1e-9) {
        out.kind = StateKind::quantum;
        return out;
    }
    out.product_minimum = product_minimum(s, 32, rng);
    if (*out.product_minimum < -1e-9) {
        out.kind = StateKind::non_popt;
        return out;
    }
    if (s.d_a == 2 && s.d_b == 2) {
        const auto decomp = solve_popt_decomposition(s.op, 2, 2);
        out.decomposition_found = decomp.has_value();
        out.kind = out.decomposition_found ? StateKind::beyond_quantum : StateKind::undetermined;
        return out;
    }
    out.kind = StateKind::beyond_quantum;
    return out;
}

}  // namespace popt
