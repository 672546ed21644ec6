#include <doctest.h>

#include <popt/detection.hpp>
#include <popt/serialize.hpp>

#include "helpers.hpp"

using namespace popt;
using test_helpers::matrix_dist;

namespace {

Scenario gbm_scenario(const BipartiteState& state) {
    return Scenario(state, pauli_inputs(Party::A), pauli_inputs(Party::B), gbm_povm(2),
                    gbm_povm(2));
}

}  // namespace

TEST_SUITE_BEGIN("detection");

TEST_CASE("random quantum states are never detected") {
    Rng rng = make_rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        const Scenario s(random_quantum_state(2, 2, rng), pauli_inputs(Party::A),
                         pauli_inputs(Party::B), random_povm(4, 3, rng),
                         random_povm(4, 2, rng));
        const DetectionReport r = detect(simulate(s), s.inputs_a, s.inputs_b);
        CHECK_FALSE(r.beyond_quantum);
        CHECK(r.max_c < 1e-6);
    }
}

TEST_CASE("gamma(Phi+) with Bell effects is detected at c = 1/8") {
    const Scenario s = gbm_scenario(gamma_state(bell_projector(2, 0, 0)));
    const DetectionReport r = detect(simulate(s), s.inputs_a, s.inputs_b);
    CHECK(r.beyond_quantum);
    CHECK(r.max_c == doctest::Approx(0.125).epsilon(1e-6));
    for (const CellResult& cell : r.cells)
        CHECK(cell.c == doctest::Approx(0.125).epsilon(1e-6));
}

TEST_CASE("gamma(singlet) is detected from the same device settings") {
    const Scenario s = gbm_scenario(gamma_state(bell_projector(2, 1, 1)));
    const DetectionReport r = detect(simulate(s), s.inputs_a, s.inputs_b);
    CHECK(r.beyond_quantum);
    CHECK(r.max_c == doctest::Approx(0.125).epsilon(1e-6));
}

TEST_CASE("the detector is a pure function of table and inputs") {
    Rng rng = make_rng(82);
    const BipartiteState state = random_beyond_quantum_state(rng);
    const Scenario s = gbm_scenario(state);
    const CorrelationTable table = simulate(s);

    // A physically different scenario (entrywise conjugated state and
    // effects) produces the identical table.
    auto conj_state = BipartiteState(HermitianOperator(state.op.matrix().conjugate()),
                                     2, 2, true, "conjugate");
    auto conj_povm = [](const POVM& p) {
        std::vector<LabeledOperator> effects;
        for (const auto& e : p.effects)
            effects.push_back(
                LabeledOperator{e.label, HermitianOperator(e.op.matrix().conjugate())});
        return POVM(p.dim, std::move(effects));
    };
    auto conj_inputs = [](const InputSet& in) {
        std::vector<LabeledOperator> states;
        for (const auto& t : in.states)
            states.push_back(
                LabeledOperator{t.label, HermitianOperator(t.op.matrix().conjugate())});
        return InputSet(in.party, in.dim, std::move(states));
    };
    const InputSet in_a_conj = conj_inputs(s.inputs_a);
    const InputSet in_b_conj = conj_inputs(s.inputs_b);
    const Scenario s2(conj_state, in_a_conj, in_b_conj, conj_povm(s.povm_a),
                      conj_povm(s.povm_b));
    const CorrelationTable table2 = simulate(s2);
    REQUIRE(table.values().size() == table2.values().size());
    for (std::size_t i = 0; i < table.values().size(); ++i)
        CHECK(table.values()[i] == doctest::Approx(table2.values()[i]).epsilon(1e-14));

    // Identical tables and inputs give byte-identical reports.
    const std::string r1 = report_to_json(detect(table, s.inputs_a, s.inputs_b));
    const std::string r2 = report_to_json(detect(table, s.inputs_a, s.inputs_b));
    CHECK(r1 == r2);
}

TEST_CASE("reconstruction matches the effective state on noiseless tables") {
    Rng rng = make_rng(83);
    const Scenario s(random_beyond_quantum_state(rng), pauli_inputs(Party::A),
                     pauli_inputs(Party::B), random_povm(4, 3, rng), gbm_povm(2));
    const CorrelationTable t = simulate(s);
    for (int a = 0; a < t.na(); ++a)
        for (int b = 0; b < t.nb(); ++b) {
            const HermitianOperator x = reconstruct(t, s.inputs_a, s.inputs_b, a, b);
            CHECK(matrix_dist(x.matrix(), effective_state(s, a, b).matrix()) < 1e-9);
        }
}

TEST_CASE("reconstruction of quantum states stays PSD") {
    Rng rng = make_rng(84);
    const Scenario s(random_quantum_state(2, 2, rng), pauli_inputs(Party::A),
                     pauli_inputs(Party::B), random_povm(4, 2, rng), random_povm(4, 2, rng));
    const CorrelationTable t = simulate(s);
    CHECK(min_eigenvalue(reconstruct(t, s.inputs_a, s.inputs_b, 0, 0)) >= -1e-9);
}

TEST_CASE("reconstruction from a million-shot table lands near the effective state") {
    Rng rng = make_rng(85);
    const Scenario s = gbm_scenario(gamma_state(bell_projector(2, 0, 0)));
    const CorrelationTable t = sample(s, 1000000, rng);
    const HermitianOperator x = reconstruct(t, s.inputs_a, s.inputs_b, 0, 0);
    CHECK(matrix_dist(x.matrix(), effective_state(s, 0, 0).matrix()) < 0.02);
}

TEST_CASE("reconstruction requires tomographically complete inputs") {
    Rng rng = make_rng(86);
    const Scenario s(random_quantum_state(2, 2, rng), planar_inputs(Party::A),
                     pauli_inputs(Party::B), random_povm(4, 2, rng), random_povm(4, 2, rng));
    const CorrelationTable t = simulate(s);
    CHECK_THROWS_AS(reconstruct(t, s.inputs_a, s.inputs_b, 0, 0), std::invalid_argument);
}

TEST_CASE("bq witness of the canonical states") {
    const BipartiteState rho0 = gamma_state(bell_projector(2, 0, 0));
    const HermitianOperator y0 = bq_witness(rho0);
    CHECK(matrix_dist(y0.matrix(), bell_projector(2, 1, 1).op.matrix()) < 1e-12);
    CHECK(trace_of_product(y0.matrix(), rho0.op.matrix()).real() ==
          doctest::Approx(-0.5).epsilon(1e-12));

    const BipartiteState rho1 = gamma_state(bell_projector(2, 1, 1));
    const HermitianOperator y1 = bq_witness(rho1);
    CHECK(matrix_dist(y1.matrix(), bell_projector(2, 0, 0).op.matrix()) < 1e-12);

    Rng rng = make_rng(87);
    CHECK_THROWS_AS(bq_witness(random_quantum_state(2, 2, rng)), std::invalid_argument);
}

TEST_CASE("witness expansion over complete and deficient spans") {
    const HermitianOperator y0 = bq_witness(gamma_state(bell_projector(2, 0, 0)));
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const WitnessCoefficients full = witness_expand(y0, pa, pb);
    CHECK(full.residual < 1e-10);

    const InputSet qa = planar_inputs(Party::A);
    const InputSet qb = planar_inputs(Party::B);
    CHECK_THROWS_AS(witness_expand(y0, qa, qb), NotExpandableError);
    const WitnessCoefficients best = project_witness(y0, qa, qb);
    CHECK(best.residual > 0.2);  // the sigma_y x sigma_y component is out of reach

    const HermitianOperator eye(identity(4));
    const WitnessCoefficients id_fit = witness_expand(eye, pa, pb);
    CHECK(id_fit.residual < 1e-10);
}

TEST_CASE("expanded witnesses rebuild the operator from transposed inputs") {
    Rng rng = make_rng(88);
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const HermitianOperator y = test_helpers::random_hermitian(4, rng);
    const WitnessCoefficients coeffs = witness_expand(y, pa, pb);
    ComplexMatrix rebuilt = ComplexMatrix::Zero(4, 4);
    for (int x = 0; x < 6; ++x)
        for (int yy = 0; yy < 6; ++yy) {
            const ComplexMatrix ta = pa.states[static_cast<std::size_t>(x)].op.matrix().transpose();
            const ComplexMatrix tb = pb.states[static_cast<std::size_t>(yy)].op.matrix().transpose();
            rebuilt += coeffs.alpha(x, yy) * tensor_product(ta, tb);
        }
    CHECK(matrix_dist(rebuilt, y.matrix()) < 1e-9);
}

TEST_CASE("MDI witness values on the canonical pair") {
    const BipartiteState rho0 = gamma_state(bell_projector(2, 0, 0));
    const BipartiteState rho1 = gamma_state(bell_projector(2, 1, 1));
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const POVM gbm = gbm_povm(2);
    const MDIWitnessSpec spec =
        make_mdi_witness(witness_expand(bq_witness(rho0), pa, pb), pa, pb, "0", "0");

    const double w0 = mdi_witness_value(simulate(Scenario(rho0, pa, pb, gbm, gbm)), spec);
    CHECK(w0 == doctest::Approx(-0.125).epsilon(1e-9));

    const double w1 = mdi_witness_value(simulate(Scenario(rho1, pa, pb, gbm, gbm)), spec);
    CHECK(w1 >= -1e-9);
    CHECK(w1 == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("the MDI witness identity W(P) = Tr(Y rho)/4 holds for random witnesses") {
    Rng rng = make_rng(89);
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const POVM gbm = gbm_povm(2);
    for (int trial = 0; trial < 8; ++trial) {
        const HermitianOperator y = test_helpers::random_hermitian(4, rng);
        const BipartiteState rho = (trial % 2 == 0) ? random_quantum_state(2, 2, rng)
                                                    : random_beyond_quantum_state(rng);
        const MDIWitnessSpec spec =
            make_mdi_witness(witness_expand(y, pa, pb), pa, pb, "0", "0");
        const double w = mdi_witness_value(simulate(Scenario(rho, pa, pb, gbm, gbm)), spec);
        const double direct =
            trace_of_product(y.matrix(), rho.op.matrix()).real() / 4.0;
        CHECK(w == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("entanglement-witness specs are nonnegative on separable states") {
    Rng rng = make_rng(90);
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const POVM gbm = gbm_povm(2);
    // Standard witness W = I/2 - |Phi+><Phi+|.
    const HermitianOperator w(
        ComplexMatrix(0.5 * identity(4) - bell_projector(2, 0, 0).op.matrix()));
    const MDIWitnessSpec spec = make_mdi_witness(witness_expand(w, pa, pb), pa, pb, "0", "0");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        // Random separable mixture.
        ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            ComplexMatrix ga = test_helpers::random_complex(2, 2, rng);
            ComplexMatrix gb = test_helpers::random_complex(2, 2, rng);
            ComplexMatrix ra = ga * ga.adjoint();
            ComplexMatrix rb = gb * gb.adjoint();
            ra /= ra.trace().real();
            rb /= rb.trace().real();
            const double weight = uni(rng);
            rho += weight * tensor_product(ra, rb);
            total += weight;
        }
        rho /= total;
        const BipartiteState sep(HermitianOperator(rho), 2, 2, true, "separable");
        const double value = mdi_witness_value(simulate(Scenario(sep, pa, pb, gbm, gbm)), spec);
        CHECK(value >= -1e-9);
    }
}

TEST_CASE("whenever a witness spec fires, the detector fires too") {
    Rng rng = make_rng(91);
    const InputSet pa = pauli_inputs(Party::A);
    const InputSet pb = pauli_inputs(Party::B);
    const POVM gbm = gbm_povm(2);
    int fired = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const BipartiteState rho = random_beyond_quantum_state(rng);
        const CorrelationTable table = simulate(Scenario(rho, pa, pb, gbm, gbm));
        const MDIWitnessSpec spec =
            make_mdi_witness(witness_expand(bq_witness(rho), pa, pb), pa, pb, "0", "0");
        const double w = mdi_witness_value(table, spec);
        if (w < -1e-6) {
            ++fired;
            CHECK(detect(table, pa, pb).beyond_quantum);
        }
    }
    CHECK(fired > 0);
}

TEST_CASE("label mismatches are rejected") {
    Rng rng = make_rng(92);
    const Scenario s = gbm_scenario(random_quantum_state(2, 2, rng));
    const CorrelationTable t = simulate(s);
    CHECK_THROWS_AS(detect(t, mub_inputs(3, Party::A), s.inputs_b), std::invalid_argument);
    MDIWitnessSpec spec;
    spec.beta = RealMatrix::Zero(6, 6);
    spec.a0 = "missing";
    spec.b0 = "0";
    CHECK_THROWS_AS(mdi_witness_value(t, spec), std::invalid_argument);
}

TEST_SUITE_END();
