#include <doctest.h>

#include <popt/linalg.hpp>
#include <popt/rng.hpp>

#include "helpers.hpp"

using namespace popt;
using test_helpers::matrix_dist;
using test_helpers::random_complex;
using test_helpers::random_hermitian;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("tensor product identity and diagonal cases") {
    CHECK(matrix_dist(tensor_product(identity(2), identity(2)), identity(4)) == 0.0);
    ComplexMatrix zz = tensor_product(pauli(3), pauli(3));
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = 1;
    expected(1, 1) = -1;
    expected(2, 2) = -1;
    expected(3, 3) = 1;
    CHECK(matrix_dist(zz, expected) == 0.0);
}

TEST_CASE("tensor product mixed-product identity against direct multiplication") {
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_complex(2, 2, rng);
        const ComplexMatrix b = random_complex(2, 2, rng);
        const ComplexMatrix c = random_complex(2, 2, rng);
        const ComplexMatrix d = random_complex(2, 2, rng);
        const ComplexMatrix lhs = tensor_product(a, b) * tensor_product(c, d);
        const ComplexMatrix rhs = tensor_product((a * c).eval(), (b * d).eval());
        CHECK(matrix_dist(lhs, rhs) < 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("tensor product associativity is exact entrywise") {
    Rng rng = make_rng(12);
    const ComplexMatrix a = random_complex(2, 3, rng);
    const ComplexMatrix b = random_complex(3, 2, rng);
    const ComplexMatrix c = random_complex(2, 2, rng);
    const ComplexMatrix lhs = tensor_product(tensor_product(a, b), c);
    const ComplexMatrix rhs = tensor_product(a, tensor_product(b, c));
    // Entries are the same triple products, associated differently.
    CHECK(matrix_dist(lhs, rhs) < 1e-14 * rhs.norm());
}

TEST_CASE("partial trace of a product factorizes") {
    Rng rng = make_rng(13);
    const HermitianOperator rho = random_hermitian(3, rng);
    const HermitianOperator sig = random_hermitian(2, rng);
    const HermitianOperator joint(tensor_product(rho.matrix(), sig.matrix()));
    const HermitianOperator reduced = partial_trace(joint, {3, 2}, 0);
    CHECK(matrix_dist(reduced.matrix(), sig.matrix().trace() * rho.matrix()) < 1e-12);
    const HermitianOperator reduced_b = partial_trace(joint, {3, 2}, 1);
    CHECK(matrix_dist(reduced_b.matrix(), rho.matrix().trace() * sig.matrix()) < 1e-12);
}

TEST_CASE("partial trace of the maximally entangled projector") {
    // Oracle: explicit sum over the computational basis.
    const int d = 2;
    ComplexVector phi = ComplexVector::Zero(d * d);
    for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(2.0);
    const HermitianOperator proj(ComplexMatrix(phi * phi.adjoint()));
    ComplexMatrix oracle = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        ComplexVector bra = ComplexVector::Zero(d);
        bra(j) = 1.0;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                oracle(i, k) += phi(i * d + j) * std::conj(phi(k * d + j));
    }
    CHECK(matrix_dist(oracle, 0.5 * identity(2)) < 1e-15);
    const HermitianOperator reduced = partial_trace(proj, {d, d}, 1);
    CHECK(matrix_dist(reduced.matrix(), 0.5 * identity(2)) < 1e-12);
}

TEST_CASE("partial trace preserves the full trace") {
    Rng rng = make_rng(14);
    for (int keep = 0; keep < 2; ++keep) {
        const HermitianOperator m = random_hermitian(6, rng);
        const HermitianOperator reduced = partial_trace(m, {2, 3}, keep);
        CHECK(std::abs(reduced.matrix().trace().real() - m.matrix().trace().real()) < 1e-12);
    }
}

TEST_CASE("partial trace rejects mismatched dimensions") {
    Rng rng = make_rng(15);
    const HermitianOperator m = random_hermitian(6, rng);
    CHECK_THROWS_AS(partial_trace(m, {2, 2}, 0), std::invalid_argument);
}

TEST_CASE("partial transpose product case and involution") {
    Rng rng = make_rng(16);
    const HermitianOperator rho = random_hermitian(2, rng);
    const HermitianOperator sig = random_hermitian(3, rng);
    const HermitianOperator joint(tensor_product(rho.matrix(), sig.matrix()));
    const HermitianOperator pt = partial_transpose(joint, 2, 3);
    CHECK(matrix_dist(pt.matrix(),
                      tensor_product(rho.matrix().transpose().eval(), sig.matrix())) < 1e-12);

    const HermitianOperator m = random_hermitian(6, rng);
    const HermitianOperator twice = partial_transpose(partial_transpose(m, 2, 3), 2, 3);
    CHECK(matrix_dist(twice.matrix(), m.matrix()) < 1e-13);
    CHECK(std::abs(partial_transpose(m, 2, 3).matrix().trace().real() -
                   m.matrix().trace().real()) < 1e-12);
}

TEST_CASE("partial transpose of the Phi+ projector has eigenvalues {-1/2, 1/2 x3}") {
    ComplexVector phi = ComplexVector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const HermitianOperator proj(ComplexMatrix(phi * phi.adjoint()));
    const HermitianOperator pt = partial_transpose(proj, 2, 2);
    // Oracle: Gamma_A(|Phi+><Phi+|) is SWAP/2, written out explicitly.
    ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    CHECK(matrix_dist(pt.matrix(), 0.5 * swap) < 1e-15);
    const Eigh e = eigh(pt);
    CHECK(e.eigenvalues(0) == doctest::Approx(-0.5).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(e.eigenvalues(i) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eigh basics") {
    const Eigh ez = eigh(HermitianOperator(pauli(3)));
    CHECK(ez.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(ez.eigenvalues(1) == doctest::Approx(1.0));

    Rng rng = make_rng(17);
    const HermitianOperator h = random_hermitian(9, rng);
    const Eigh e = eigh(h);
    const ComplexMatrix rebuilt =
        e.eigenvectors * e.eigenvalues.cast<cplx>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK(matrix_dist(rebuilt, h.matrix()) < 1e-10);
    CHECK(matrix_dist(e.eigenvectors.adjoint() * e.eigenvectors, identity(9)) < 1e-10);
}

TEST_CASE("eigh eigenvectors stay unitary up to dim 16") {
    Rng rng = make_rng(18);
    for (int dim : {2, 5, 16}) {
        const Eigh e = eigh(random_hermitian(dim, rng));
        CHECK(matrix_dist(e.eigenvectors.adjoint() * e.eigenvectors, identity(dim)) < 1e-10);
    }
}

TEST_CASE("eigh matches the 2x2 quadratic formula") {
    Rng rng = make_rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const HermitianOperator h = random_hermitian(2, rng);
        const double tr = h.matrix().trace().real();
        const double det = (h.matrix()(0, 0) * h.matrix()(1, 1) -
                            h.matrix()(0, 1) * h.matrix()(1, 0))
                               .real();
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        const Eigh e = eigh(h);
        CHECK(e.eigenvalues(0) == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-12));
        CHECK(e.eigenvalues(1) == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-12));
    }
}

TEST_CASE("eigh rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << cplx(0, 0), cplx(1, 0), cplx(0, 0), cplx(0, 0);
    CHECK_THROWS_AS(HermitianOperator{m}, std::invalid_argument);
}

TEST_CASE("negative part on fixed spectra") {
    Rng rng = make_rng(20);
    const ComplexMatrix g = random_complex(3, 3, rng);
    const HermitianOperator psd(ComplexMatrix(g * g.adjoint()));
    CHECK(negative_part(psd).c == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(negative_part(HermitianOperator(pauli(3))).c == doctest::Approx(1.0));

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = -3.0;
    CHECK(negative_part(HermitianOperator(d)).c == doctest::Approx(3.0));
}

TEST_CASE("negative part is a PSD Jordan decomposition") {
    Rng rng = make_rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const HermitianOperator h = random_hermitian(5, rng);
        const NegativePart parts = negative_part(h);
        CHECK(min_eigenvalue(parts.positive) >= -1e-10);
        CHECK(min_eigenvalue(parts.negative) >= -1e-10);
        CHECK(matrix_dist(parts.positive.matrix() - parts.negative.matrix(), h.matrix()) <
              1e-10);
        CHECK(std::abs(trace_of_product(parts.positive.matrix(), parts.negative.matrix())) <
              1e-10);
        CHECK(parts.c ==
              doctest::Approx(parts.negative.matrix().trace().real()).epsilon(1e-10));
    }
}

TEST_CASE("schmidt decomposition on product and maximally entangled states") {
    ComplexVector prod = ComplexVector::Zero(4);
    prod(0) = 1.0;
    const SchmidtDecomposition sp = schmidt(PureStateVector(prod), 2, 2);
    CHECK(sp.coefficients(0) == doctest::Approx(1.0));
    CHECK(sp.coefficients(1) == doctest::Approx(0.0));

    ComplexVector phi = ComplexVector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const SchmidtDecomposition se = schmidt(PureStateVector(phi), 2, 2);
    CHECK(se.coefficients(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(se.coefficients(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("schmidt reconstruction of random states") {
    Rng rng = make_rng(22);
    for (auto [da, db] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{2, 3}}) {
        ComplexVector v = random_complex(da * db, 1, rng).col(0);
        v /= v.norm();
        const PureStateVector psi{ComplexVector(v)};
        const SchmidtDecomposition sd = schmidt(psi, da, db);
        ComplexVector rebuilt = ComplexVector::Zero(da * db);
        for (Eigen::Index i = 0; i < sd.coefficients.size(); ++i)
            rebuilt += sd.coefficients(i) * tensor_product(ComplexVector(sd.left.col(i)),
                                                           ComplexVector(sd.right.col(i)));
        CHECK((rebuilt - v).norm() < 1e-10);
        double sum_sq = sd.coefficients.squaredNorm();
        CHECK(sum_sq == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("schmidt coefficients are invariant under local unitaries") {
    Rng rng = make_rng(23);
    // Local unitaries from QR of Gaussian matrices.
    auto unitary = [&rng](int d) {
        Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(d, d, rng));
        return ComplexMatrix(qr.householderQ() * ComplexMatrix::Identity(d, d));
    };
    for (int trial = 0; trial < 10; ++trial) {
        ComplexVector v = random_complex(9, 1, rng).col(0);
        v /= v.norm();
        const double sc = schmidt(PureStateVector(ComplexVector(v)), 3, 3).max_coefficient;
        const ComplexMatrix u = tensor_product(unitary(3), unitary(3));
        ComplexVector w = u * v;
        w /= w.norm();
        const double sc_rot = schmidt(PureStateVector(w), 3, 3).max_coefficient;
        CHECK(sc_rot == doctest::Approx(sc).epsilon(1e-10));
    }
}

TEST_CASE("span rank of standard families") {
    std::vector<HermitianOperator> paulis;
    for (int i = 0; i < 4; ++i) paulis.emplace_back(pauli(i));
    CHECK(span_rank(paulis) == 4);

    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    CHECK(span_rank({HermitianOperator(p0), HermitianOperator(p1)}) == 2);

    std::vector<HermitianOperator> two_qubit;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            two_qubit.emplace_back(tensor_product(pauli(i), pauli(j)));
    CHECK(span_rank(two_qubit) == 16);

    CHECK_THROWS_AS(span_rank({}), std::invalid_argument);
}

TEST_CASE("hermitian real vectorization is an isometry") {
    Rng rng = make_rng(24);
    const HermitianOperator a = random_hermitian(4, rng);
    const HermitianOperator b = random_hermitian(4, rng);
    const RealVector va = hermitian_to_real_vec(a.matrix());
    const RealVector vb = hermitian_to_real_vec(b.matrix());
    CHECK(va.dot(vb) ==
          doctest::Approx(trace_of_product(a.matrix(), b.matrix()).real()).epsilon(1e-12));
    CHECK(matrix_dist(real_vec_to_hermitian(va, 4), a.matrix()) < 1e-13);
}

TEST_SUITE_END();
