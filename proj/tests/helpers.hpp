#pragma once

#include <popt/linalg.hpp>
#include <popt/rng.hpp>

namespace test_helpers {

inline popt::ComplexMatrix random_complex(int rows, int cols, popt::Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    popt::ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = popt::cplx(gauss(rng), gauss(rng));
    return m;
}

inline popt::HermitianOperator random_hermitian(int dim, popt::Rng& rng) {
    const popt::ComplexMatrix g = random_complex(dim, dim, rng);
    return popt::HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

inline double matrix_dist(const popt::ComplexMatrix& a, const popt::ComplexMatrix& b) {
    return (a - b).norm();
}

}  // namespace test_helpers
