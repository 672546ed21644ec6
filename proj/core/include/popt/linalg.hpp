#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace popt {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Hermiticity / unit-norm / unit-trace tolerance (Frobenius).
inline constexpr double kHermTol = 1e-12;
// Relative singular-value cutoff shared by span ranks and least squares.
inline constexpr double kRankCutoff = 1e-9;

// Dense Hermitian operator. The constructor checks squareness and
// ||M - M^dagger||_F <= kHermTol * max(1, ||M||_F), then stores the
// symmetrized matrix so downstream arithmetic cannot drift.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const ComplexMatrix& m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

// Unit vector in C^dim; constructor enforces ||psi|| = 1 within kHermTol.
class PureStateVector {
public:
    PureStateVector() = default;
    explicit PureStateVector(ComplexVector amplitudes);

    int dim() const { return static_cast<int>(amps_.size()); }
    const ComplexVector& amplitudes() const { return amps_; }

private:
    ComplexVector amps_;
};

ComplexMatrix identity(int d);

// Pauli matrices; index 0..3 = I, sigma_x, sigma_y, sigma_z.
const ComplexMatrix& pauli(int i);

// Kronecker product, first argument on the slow (row-major) index.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

// Tr(ab) computed without forming the product matrix.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

// N-factor partial trace; dims lists each factor dimension in slow-to-fast
// order, keep the (sorted) factor indices to retain.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

// Two-party version: keep = 0 retains the first factor, 1 the second.
HermitianOperator partial_trace(const HermitianOperator& m, std::pair<int, int> dims, int keep);

// Transposition of the first tensor factor.
HermitianOperator partial_transpose(const HermitianOperator& m, int d_a, int d_b);
ComplexMatrix partial_transpose(const ComplexMatrix& m, int d_a, int d_b);

struct Eigh {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors;  // orthonormal columns, H = V diag(w) V^dagger
};
Eigh eigh(const HermitianOperator& h);

double min_eigenvalue(const HermitianOperator& h);

struct NegativePart {
    HermitianOperator positive;  // H^+
    HermitianOperator negative;  // H^-
    double c = 0.0;              // Tr H^-
};
// Jordan decomposition H = H^+ - H^- with H^+ H^- = 0.
NegativePart negative_part(const HermitianOperator& h);

struct SchmidtDecomposition {
    RealVector coefficients;  // descending, sum of squares 1
    ComplexMatrix left;       // columns |u_i>
    ComplexMatrix right;      // columns |v_i>
    double max_coefficient = 0.0;
};
// psi = sum_i a_i |u_i>|v_i| for psi on C^{d_a} x C^{d_b}.
SchmidtDecomposition schmidt(const PureStateVector& psi, int d_a, int d_b);

// Rank of the real span of Hermitian operators, from the Gram matrix of
// trace inner products with relative cutoff kRankCutoff.
int span_rank(const std::vector<HermitianOperator>& ops);

// Isometric real vectorization of Hermitian matrices: diagonal entries,
// then sqrt(2)*Re / sqrt(2)*Im of the upper triangle. Preserves Tr(HK).
RealVector hermitian_to_real_vec(const ComplexMatrix& h);
ComplexMatrix real_vec_to_hermitian(const RealVector& v, int n);

}  // namespace popt
