#include "popt/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace popt {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
    require(m.rows() == m.cols(), "HermitianOperator: matrix must be square");
    require(m.allFinite(), "HermitianOperator: entries must be finite");
    const double scale = std::max(1.0, m.norm());
    require((m - m.adjoint()).norm() <= kHermTol * scale,
            "HermitianOperator: matrix is not Hermitian within tolerance");
    mat_ = 0.5 * (m + m.adjoint().eval());
}

PureStateVector::PureStateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
    require(amps_.size() > 0, "PureStateVector: empty amplitude vector");
    require(amps_.allFinite(), "PureStateVector: entries must be finite");
    require(std::abs(amps_.norm() - 1.0) <= kHermTol,
            "PureStateVector: norm must be 1 within tolerance");
}

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

const ComplexMatrix& pauli(int i) {
    static const std::array<ComplexMatrix, 4> sigma = [] {
        std::array<ComplexMatrix, 4> s;
        const cplx im(0.0, 1.0);
        s[0] = ComplexMatrix::Identity(2, 2);
        s[1] = ComplexMatrix{{cplx(0), cplx(1)}, {cplx(1), cplx(0)}};
        s[2] = ComplexMatrix{{cplx(0), -im}, {im, cplx(0)}};
        s[3] = ComplexMatrix{{cplx(1), cplx(0)}, {cplx(0), cplx(-1)}};
        return s;
    }();
    if (i < 0 || i > 3) throw std::invalid_argument("pauli: index must be in 0..3");
    return sigma[static_cast<std::size_t>(i)];
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols() == b.rows() && a.rows() == b.cols(), "trace_of_product: shape mismatch");
    return (a.array() * b.transpose().array()).sum();
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
    const int n_factors = static_cast<int>(dims.size());
    int total = 1;
    for (int d : dims) {
        require(d >= 1, "partial_trace: factor dimensions must be positive");
        total *= d;
    }
    require(m.rows() == total && m.cols() == total, "partial_trace: dimension mismatch");
    std::vector<int> traced;
    for (int f = 0; f < n_factors; ++f)
        if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);
    for (int f : keep) require(f >= 0 && f < n_factors, "partial_trace: keep index out of range");

    int kept_dim = 1;
    for (int f : keep) kept_dim *= dims[static_cast<std::size_t>(f)];
    int traced_dim = 1;
    for (int f : traced) traced_dim *= dims[static_cast<std::size_t>(f)];

    // Strides of each factor in the full row-major multi-index.
    std::vector<int> stride(dims.size());
    int acc = 1;
    for (int f = n_factors - 1; f >= 0; --f) {
        stride[static_cast<std::size_t>(f)] = acc;
        acc *= dims[static_cast<std::size_t>(f)];
    }

    auto expand = [&](int flat, const std::vector<int>& factors) {
        // Offset contributed by a flat index running over the given factors.
        int offset = 0;
        for (int fi = static_cast<int>(factors.size()) - 1; fi >= 0; --fi) {
            const int f = factors[static_cast<std::size_t>(fi)];
            const int d = dims[static_cast<std::size_t>(f)];
            offset += (flat % d) * stride[static_cast<std::size_t>(f)];
            flat /= d;
        }
        return offset;
    };

    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (int r = 0; r < kept_dim; ++r) {
        const int row_off = expand(r, keep);
        for (int c = 0; c < kept_dim; ++c) {
            const int col_off = expand(c, keep);
            cplx sum(0.0, 0.0);
            for (int t = 0; t < traced_dim; ++t) {
                const int t_off = expand(t, traced);
                sum += m(row_off + t_off, col_off + t_off);
            }
            out(r, c) = sum;
        }
    }
    return out;
}

HermitianOperator partial_trace(const HermitianOperator& m, std::pair<int, int> dims, int keep) {
    require(keep == 0 || keep == 1, "partial_trace: keep must be 0 or 1");
    require(m.dim() == dims.first * dims.second, "partial_trace: dimension mismatch");
    return HermitianOperator(
        partial_trace(m.matrix(), {dims.first, dims.second}, {keep}));
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, int d_a, int d_b) {
    require(m.rows() == m.cols() && m.rows() == d_a * d_b,
            "partial_transpose: dimension mismatch");
    ComplexMatrix out(m.rows(), m.cols());
    for (int i = 0; i < d_a; ++i)
        for (int j = 0; j < d_a; ++j)
            out.block(j * d_b, i * d_b, d_b, d_b) = m.block(i * d_b, j * d_b, d_b, d_b);
    return out;
}

HermitianOperator partial_transpose(const HermitianOperator& m, int d_a, int d_b) {
    return HermitianOperator(partial_transpose(m.matrix(), d_a, d_b));
}

Eigh eigh(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigendecomposition failed to converge");
    return Eigh{solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const HermitianOperator& h) {
    return eigh(h).eigenvalues(0);
}

NegativePart negative_part(const HermitianOperator& h) {
    const Eigh e = eigh(h);
    const int n = h.dim();
    ComplexMatrix pos = ComplexMatrix::Zero(n, n);
    ComplexMatrix neg = ComplexMatrix::Zero(n, n);
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = e.eigenvalues(i);
        const ComplexVector v = e.eigenvectors.col(i);
        if (w >= 0.0) {
            pos.noalias() += w * v * v.adjoint();
        } else {
            neg.noalias() += (-w) * v * v.adjoint();
            c += -w;
        }
    }
    return NegativePart{HermitianOperator(pos), HermitianOperator(neg), c};
}

SchmidtDecomposition schmidt(const PureStateVector& psi, int d_a, int d_b) {
    require(psi.dim() == d_a * d_b, "schmidt: dimension mismatch");
    ComplexMatrix coeff(d_a, d_b);
    for (int i = 0; i < d_a; ++i)
        for (int j = 0; j < d_b; ++j) coeff(i, j) = psi.amplitudes()(i * d_b + j);
    Eigen::JacobiSVD<ComplexMatrix> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    out.coefficients = svd.singularValues();
    out.left = svd.matrixU();
    out.right = svd.matrixV().conjugate();
    out.max_coefficient = out.coefficients.size() > 0 ? out.coefficients(0) : 0.0;
    return out;
}

int span_rank(const std::vector<HermitianOperator>& ops) {
    if (ops.empty()) throw std::invalid_argument("span_rank: empty operator list");
    const int d = ops.front().dim();
    const int n = static_cast<int>(ops.size());
    RealMatrix gram(n, n);
    for (int i = 0; i < n; ++i) {
        require(ops[static_cast<std::size_t>(i)].dim() == d,
                "span_rank: operators must share one dimension");
        for (int j = i; j < n; ++j) {
            const double g = trace_of_product(ops[static_cast<std::size_t>(i)].matrix(),
                                              ops[static_cast<std::size_t>(j)].matrix())
                                 .real();
            gram(i, j) = g;
            gram(j, i) = g;
        }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(gram);
    const RealVector w = solver.eigenvalues();
    const double top = w.size() > 0 ? std::abs(w(w.size() - 1)) : 0.0;
    if (top <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > kRankCutoff * top) ++rank;
    return rank;
}

RealVector hermitian_to_real_vec(const ComplexMatrix& h) {
    const int n = static_cast<int>(h.rows());
    RealVector v(n * n);
    int k = 0;
    for (int i = 0; i < n; ++i) v(k++) = h(i, i).real();
    const double s = std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            v(k++) = s * h(i, j).real();
            v(k++) = s * h(i, j).imag();
        }
    return v;
}

ComplexMatrix real_vec_to_hermitian(const RealVector& v, int n) {
    require(v.size() == static_cast<Eigen::Index>(n) * n, "real_vec_to_hermitian: size mismatch");
    ComplexMatrix h(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) h(i, i) = cplx(v(k++), 0.0);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double re = v(k++) * s;
            const double im = v(k++) * s;
            h(i, j) = cplx(re, im);
            h(j, i) = cplx(re, -im);
        }
    return h;
}

}  // namespace popt
