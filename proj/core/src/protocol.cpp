#include "popt/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace popt {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

LabeledOperator labeled_projector(std::string label, const ComplexVector& v) {
    return LabeledOperator{std::move(label), HermitianOperator(projector(v))};
}

bool is_prime(int d) {
    if (d < 2) return false;
    for (int k = 2; k * k <= d; ++k)
        if (d % k == 0) return false;
    return true;
}

ComplexMatrix inv_sqrt_psd(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint().eval()));
    RealVector w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = w(i) > 1e-14 ? 1.0 / std::sqrt(w(i)) : 0.0;
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

InputSet::InputSet(Party party_in, int dim_in, std::vector<LabeledOperator> states_in)
    : party(party_in), dim(dim_in), states(std::move(states_in)) {
    require(dim >= 2, "InputSet: dim must be >= 2");
    require(!states.empty(), "InputSet: empty state list");
    for (const auto& s : states) {
        require(s.op.dim() == dim, "InputSet: member dimension mismatch");
        require(min_eigenvalue(s.op) >= -kHermTol, "InputSet: member not PSD");
        require(std::abs(s.op.matrix().trace().real() - 1.0) <= kHermTol,
                "InputSet: member trace must be 1");
    }
}

POVM::POVM(int dim_in, std::vector<LabeledOperator> effects_in)
    : dim(dim_in), effects(std::move(effects_in)) {
    require(dim >= 2, "POVM: dim must be >= 2");
    require(!effects.empty(), "POVM: empty effect list");
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& e : effects) {
        require(e.op.dim() == dim, "POVM: effect dimension mismatch");
        require(min_eigenvalue(e.op) >= -kPovmTol, "POVM: effect not PSD");
        sum += e.op.matrix();
    }
    require((sum - identity(dim)).norm() <= kPovmTol, "POVM: effects must sum to identity");
}

Scenario::Scenario(BipartiteState state_in, InputSet in_a, InputSet in_b, POVM pa, POVM pb)
    : state(std::move(state_in)),
      inputs_a(std::move(in_a)),
      inputs_b(std::move(in_b)),
      povm_a(std::move(pa)),
      povm_b(std::move(pb)) {
    require(inputs_a.dim == state.d_a, "Scenario: d_A' must equal d_A");
    require(inputs_b.dim == state.d_b, "Scenario: d_B' must equal d_B");
    require(povm_a.dim == inputs_a.dim * state.d_a, "Scenario: povm_a must act on A'A");
    require(povm_b.dim == state.d_b * inputs_b.dim, "Scenario: povm_b must act on BB'");
}

CorrelationTable::CorrelationTable(std::vector<std::string> a_labels,
                                   std::vector<std::string> b_labels,
                                   std::vector<std::string> x_labels,
                                   std::vector<std::string> y_labels, std::vector<double> values,
                                   std::optional<std::uint64_t> shots)
    : a_labels_(std::move(a_labels)),
      b_labels_(std::move(b_labels)),
      x_labels_(std::move(x_labels)),
      y_labels_(std::move(y_labels)),
      values_(std::move(values)),
      shots_(shots) {
    require(!a_labels_.empty() && !b_labels_.empty() && !x_labels_.empty() && !y_labels_.empty(),
            "CorrelationTable: empty label axis");
    require(values_.size() == a_labels_.size() * b_labels_.size() * x_labels_.size() *
                                  y_labels_.size(),
            "CorrelationTable: value count mismatch");
    for (double p : values_)
        require(p >= -kTableValueEps && p <= 1.0 + kTableValueEps,
                "CorrelationTable: value outside [0, 1]");
    for (int x = 0; x < nx(); ++x)
        for (int y = 0; y < ny(); ++y) {
            double s = 0.0;
            for (int a = 0; a < na(); ++a)
                for (int b = 0; b < nb(); ++b) s += at(a, b, x, y);
            require(std::abs(s - 1.0) <= kTableSumTol,
                    "CorrelationTable: probabilities must sum to 1 per (x, y)");
        }
}

double CorrelationTable::at(int a, int b, int x, int y) const {
    return values_[static_cast<std::size_t>(((a * nb() + b) * nx() + x) * ny() + y)];
}

InputSet pauli_inputs(Party party) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx im(0.0, 1.0);
    ComplexVector z0(2), z1(2), xp(2), xm(2), yp(2), ym(2);
    z0 << 1, 0;
    z1 << 0, 1;
    xp << s, s;
    xm << s, -s;
    yp << s, im * s;
    ym << s, -im * s;
    std::vector<LabeledOperator> states;
    states.push_back(labeled_projector("z+", z0));
    states.push_back(labeled_projector("z-", z1));
    states.push_back(labeled_projector("x+", xp));
    states.push_back(labeled_projector("x-", xm));
    states.push_back(labeled_projector("y+", yp));
    states.push_back(labeled_projector("y-", ym));
    return InputSet(party, 2, std::move(states));
}

InputSet planar_inputs(Party party) {
    InputSet full = pauli_inputs(party);
    full.states.resize(4);  // z+, z-, x+, x-
    return InputSet(party, 2, std::move(full.states));
}

InputSet mub_inputs(int d, Party party) {
    require(is_prime(d), "mub_inputs: d must be prime");
    if (d == 2) {
        InputSet p = pauli_inputs(party);
        return p;
    }
    std::vector<LabeledOperator> states;
    // Basis 0: computational.
    for (int m = 0; m < d; ++m) {
        ComplexVector v = ComplexVector::Zero(d);
        v(m) = 1.0;
        states.push_back(labeled_projector("b0v" + std::to_string(m), v));
    }
    // Bases a = 1..d: (1/sqrt d) sum_j omega^{(a-1) j^2 + m j} |j>.
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 1; a <= d; ++a)
        for (int m = 0; m < d; ++m) {
            ComplexVector v(d);
            for (int j = 0; j < d; ++j) {
                const int phase = ((a - 1) * j * j + m * j) % d;
                v(j) = std::polar(amp, 2.0 * std::numbers::pi * phase / d);
            }
            states.push_back(
                labeled_projector("b" + std::to_string(a) + "v" + std::to_string(m), v));
        }
    return InputSet(party, d, std::move(states));
}

POVM gbm_povm(int d) {
    require(d >= 2, "gbm_povm: d must be >= 2");
    std::vector<LabeledOperator> effects;
    effects.reserve(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            effects.push_back(labeled_projector(std::to_string(j * d + k),
                                                bell_vector(d, j, k).amplitudes()));
    return POVM(d * d, std::move(effects));
}

SchmidtRankPovm schmidt_rank_povm(const PureStateVector& psi, int d) {
    require(psi.dim() == d * d, "schmidt_rank_povm: dimension mismatch");
    const SchmidtDecomposition sd = schmidt(psi, d, d);
    require(sd.coefficients.size() >= d && sd.coefficients(d - 1) > 1e-8,
            "schmidt_rank_povm: state must have full Schmidt rank");
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    ComplexVector lambda = ComplexVector::Zero(d * d);
    ComplexMatrix x = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        lambda += amp * tensor_product(ComplexVector(sd.left.col(i)),
                                       ComplexVector(sd.right.col(i)));
        const ComplexVector u = sd.left.col(i);
        x += std::sqrt(static_cast<double>(d)) * sd.coefficients(i) * u * u.adjoint();
    }
    const ComplexMatrix p = projector(psi.amplitudes());
    std::vector<LabeledOperator> effects;
    effects.push_back(LabeledOperator{"psi", HermitianOperator(p)});
    effects.push_back(LabeledOperator{"rest", HermitianOperator(identity(d * d) - p)});
    SchmidtRankPovm out;
    out.povm = POVM(d * d, std::move(effects));
    out.x_factor = x;
    out.bell_like = PureStateVector(lambda);
    return out;
}

CorrelationTable simulate(const Scenario& s) {
    const int na = static_cast<int>(s.povm_a.effects.size());
    const int nb = static_cast<int>(s.povm_b.effects.size());
    const int nx = static_cast<int>(s.inputs_a.states.size());
    const int ny = static_cast<int>(s.inputs_b.states.size());
    std::vector<ComplexMatrix> effect(static_cast<std::size_t>(na) * nb);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            effect[static_cast<std::size_t>(a) * nb + b] =
                tensor_product(s.povm_a.effects[static_cast<std::size_t>(a)].op.matrix(),
                               s.povm_b.effects[static_cast<std::size_t>(b)].op.matrix());
    std::vector<double> values(static_cast<std::size_t>(na) * nb * nx * ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const ComplexMatrix full = tensor_product(
                tensor_product(s.inputs_a.states[static_cast<std::size_t>(x)].op.matrix(),
                               s.state.op.matrix()),
                s.inputs_b.states[static_cast<std::size_t>(y)].op.matrix());
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    const double p =
                        trace_of_product(full, effect[static_cast<std::size_t>(a) * nb + b])
                            .real();
                    values[static_cast<std::size_t>(((a * nb + b) * nx + x) * ny + y)] = p;
                }
        }
    std::vector<std::string> al, bl, xl, yl;
    for (const auto& e : s.povm_a.effects) al.push_back(e.label);
    for (const auto& e : s.povm_b.effects) bl.push_back(e.label);
    for (const auto& t : s.inputs_a.states) xl.push_back(t.label);
    for (const auto& t : s.inputs_b.states) yl.push_back(t.label);
    return CorrelationTable(al, bl, xl, yl, std::move(values));
}

HermitianOperator effective_state(const Scenario& s, int a, int b) {
    require(a >= 0 && a < static_cast<int>(s.povm_a.effects.size()), "effective_state: bad a");
    require(b >= 0 && b < static_cast<int>(s.povm_b.effects.size()), "effective_state: bad b");
    const int dap = s.inputs_a.dim;
    const int da = s.state.d_a;
    const int db = s.state.d_b;
    const int dbp = s.inputs_b.dim;
    const ComplexMatrix op =
        tensor_product(tensor_product(identity(dap), s.state.op.matrix()), identity(dbp));
    const ComplexMatrix meas =
        tensor_product(s.povm_a.effects[static_cast<std::size_t>(a)].op.matrix(),
                       s.povm_b.effects[static_cast<std::size_t>(b)].op.matrix());
    const ComplexMatrix pi = partial_trace(op * meas, {dap, da, db, dbp}, {0, 3});
    return HermitianOperator(pi);
}

CorrelationTable sample(const Scenario& s, std::uint64_t shots, Rng& rng) {
    require(shots >= 1, "sample: shots must be >= 1");
    const CorrelationTable exact = simulate(s);
    const int na = exact.na(), nb = exact.nb(), nx = exact.nx(), ny = exact.ny();
    std::vector<double> values(static_cast<std::size_t>(na) * nb * nx * ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            std::vector<double> cell(static_cast<std::size_t>(na) * nb);
            double total = 0.0;
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    const double p = std::max(0.0, exact.at(a, b, x, y));
                    cell[static_cast<std::size_t>(a) * nb + b] = p;
                    total += p;
                }
            std::uint64_t remaining = shots;
            double mass = total;
            for (int i = 0; i < na * nb && remaining > 0; ++i) {
                const double p = cell[static_cast<std::size_t>(i)];
                std::uint64_t draw;
                if (i == na * nb - 1 || mass <= p) {
                    draw = remaining;
                } else {
                    std::binomial_distribution<std::uint64_t> bin(remaining,
                                                                  std::min(1.0, p / mass));
                    draw = bin(rng);
                }
                const int a = i / nb, b = i % nb;
                values[static_cast<std::size_t>(((a * nb + b) * nx + x) * ny + y)] =
                    static_cast<double>(draw) / static_cast<double>(shots);
                remaining -= draw;
                mass -= p;
            }
        }
    return CorrelationTable(exact.a_labels(), exact.b_labels(), exact.x_labels(),
                            exact.y_labels(), std::move(values), shots);
}

bool is_tomo_complete(const InputSet& in_a, const InputSet& in_b) {
    auto local_rank = [](const InputSet& in) {
        std::vector<HermitianOperator> ops;
        ops.reserve(in.states.size());
        for (const auto& s : in.states) ops.push_back(s.op);
        return span_rank(ops);
    };
    return local_rank(in_a) == in_a.dim * in_a.dim && local_rank(in_b) == in_b.dim * in_b.dim;
}

std::optional<HermitianOperator> bloch_obstruction(const InputSet& in) {
    require(in.dim == 2, "bloch_obstruction: qubit input sets only");
    const int m = static_cast<int>(in.states.size());
    RealMatrix bloch(3, m);
    for (int x = 0; x < m; ++x)
        for (int i = 0; i < 3; ++i)
            bloch(i, x) =
                trace_of_product(in.states[static_cast<std::size_t>(x)].op.matrix(), pauli(i + 1))
                    .real();
    Eigen::JacobiSVD<RealMatrix> svd(bloch, Eigen::ComputeFullU);
    const RealVector& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankCutoff * top) ++rank;
    if (rank >= 3) return std::nullopt;
    RealVector normal = svd.matrixU().col(2);
    // Fix the overall sign so the output is deterministic.
    int lead = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(normal(i)) > std::abs(normal(lead))) lead = i;
    if (normal(lead) < 0.0) normal = -normal;
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 3; ++i) z += normal(i) * pauli(i + 1);
    return HermitianOperator(z);
}

ComplexMatrix CpMap::apply(const ComplexMatrix& m) const {
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (const auto& k : kraus) out += k * m * k.adjoint();
    return out;
}

ComplexMatrix CpMap::apply_adjoint(const ComplexMatrix& m) const {
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (const auto& k : kraus) out += k.adjoint() * m * k;
    return out;
}

ComplexMatrix CpMap::kraus_sum() const {
    if (kraus.empty()) return ComplexMatrix();
    ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().cols());
    for (const auto& k : kraus) out += k.adjoint() * k;
    return out;
}

OneWayInstrument identity_instrument(int dim_alice, int dim_bob) {
    OneWayInstrument inst;
    inst.alice.push_back(CpMap{{identity(dim_alice)}});
    inst.bob.push_back(CpMap{{identity(dim_bob)}});
    return inst;
}

OneWayInstrument random_instrument(int dim_alice, int dim_bob, int messages, int kraus_per_map,
                                   Rng& rng) {
    require(messages >= 1 && kraus_per_map >= 1, "random_instrument: bad sizes");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int total = messages * kraus_per_map;
    std::vector<ComplexMatrix> g(static_cast<std::size_t>(total));
    ComplexMatrix s = ComplexMatrix::Zero(dim_alice, dim_alice);
    for (auto& gi : g) {
        gi.resize(dim_alice, dim_alice);
        for (int r = 0; r < dim_alice; ++r)
            for (int c = 0; c < dim_alice; ++c) gi(r, c) = cplx(gauss(rng), gauss(rng));
        s += gi.adjoint() * gi;
    }
    const ComplexMatrix norm = inv_sqrt_psd(s);
    OneWayInstrument inst;
    for (int i = 0; i < messages; ++i) {
        CpMap map;
        for (int k = 0; k < kraus_per_map; ++k)
            map.kraus.push_back(g[static_cast<std::size_t>(i * kraus_per_map + k)] * norm);
        inst.alice.push_back(std::move(map));
        inst.bob.push_back(CpMap{{haar_random_unitary(dim_bob, rng)}});
    }
    return inst;
}

CorrelationTable locc_postprocess(const Scenario& s, const OneWayInstrument& instrument) {
    require(!instrument.alice.empty() && instrument.alice.size() == instrument.bob.size(),
            "locc_postprocess: instrument must pair Alice maps with Bob channels");
    const int dim_a = s.povm_a.dim;
    const int dim_b = s.povm_b.dim;
    ComplexMatrix tp = ComplexMatrix::Zero(dim_a, dim_a);
    for (const auto& map : instrument.alice) {
        require(!map.kraus.empty() && map.kraus.front().rows() == dim_a,
                "locc_postprocess: Alice map dimension mismatch");
        tp += map.kraus_sum();
    }
    require((tp - identity(dim_a)).norm() <= 1e-9,
            "locc_postprocess: Alice maps must sum to a trace-preserving map");
    for (const auto& ch : instrument.bob) {
        require(!ch.kraus.empty() && ch.kraus.front().rows() == dim_b,
                "locc_postprocess: Bob channel dimension mismatch");
        require((ch.kraus_sum() - identity(dim_b)).norm() <= 1e-9,
                "locc_postprocess: Bob channels must be trace-preserving");
    }

    const int msgs = static_cast<int>(instrument.alice.size());
    const int na = static_cast<int>(s.povm_a.effects.size());
    const int nb = static_cast<int>(s.povm_b.effects.size());
    const int nx = static_cast<int>(s.inputs_a.states.size());
    const int ny = static_cast<int>(s.inputs_b.states.size());

    // Adjoint-map images of the effects; outcome (a, i) on Alice's side.
    std::vector<ComplexMatrix> eff_a(static_cast<std::size_t>(na) * msgs);
    std::vector<ComplexMatrix> eff_b(static_cast<std::size_t>(nb) * msgs);
    for (int i = 0; i < msgs; ++i) {
        for (int a = 0; a < na; ++a)
            eff_a[static_cast<std::size_t>(a) * msgs + i] =
                instrument.alice[static_cast<std::size_t>(i)].apply_adjoint(
                    s.povm_a.effects[static_cast<std::size_t>(a)].op.matrix());
        for (int b = 0; b < nb; ++b)
            eff_b[static_cast<std::size_t>(b) * msgs + i] =
                instrument.bob[static_cast<std::size_t>(i)].apply_adjoint(
                    s.povm_b.effects[static_cast<std::size_t>(b)].op.matrix());
    }

    std::vector<std::string> al;
    for (int a = 0; a < na; ++a)
        for (int i = 0; i < msgs; ++i)
            al.push_back(s.povm_a.effects[static_cast<std::size_t>(a)].label + ":" +
                         std::to_string(i));
    std::vector<std::string> bl, xl, yl;
    for (const auto& e : s.povm_b.effects) bl.push_back(e.label);
    for (const auto& t : s.inputs_a.states) xl.push_back(t.label);
    for (const auto& t : s.inputs_b.states) yl.push_back(t.label);

    const int nai = na * msgs;
    std::vector<double> values(static_cast<std::size_t>(nai) * nb * nx * ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const ComplexMatrix full = tensor_product(
                tensor_product(s.inputs_a.states[static_cast<std::size_t>(x)].op.matrix(),
                               s.state.op.matrix()),
                s.inputs_b.states[static_cast<std::size_t>(y)].op.matrix());
            for (int ai = 0; ai < nai; ++ai) {
                const int i = ai % msgs;
                for (int b = 0; b < nb; ++b) {
                    const ComplexMatrix meas =
                        tensor_product(eff_a[static_cast<std::size_t>(ai)],
                                       eff_b[static_cast<std::size_t>(b) * msgs + i]);
                    values[static_cast<std::size_t>(((ai * nb + b) * nx + x) * ny + y)] =
                        trace_of_product(full, meas).real();
                }
            }
        }
    return CorrelationTable(al, bl, xl, yl, std::move(values));
}

POVM random_povm(int dim, int outcomes, Rng& rng) {
    require(outcomes >= 2, "random_povm: need at least 2 outcomes");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ComplexMatrix> w(static_cast<std::size_t>(outcomes));
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (auto& wi : w) {
        ComplexMatrix g(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) g(r, c) = cplx(gauss(rng), gauss(rng));
        wi = g * g.adjoint();
        s += wi;
    }
    const ComplexMatrix norm = inv_sqrt_psd(s);
    std::vector<LabeledOperator> effects;
    for (int i = 0; i < outcomes; ++i)
        effects.push_back(LabeledOperator{
            std::to_string(i),
            HermitianOperator(norm * w[static_cast<std::size_t>(i)] * norm)});
    return POVM(dim, std::move(effects));
}

PureStateVector random_full_rank_vector(int d, double min_coeff, Rng& rng) {
    for (;;) {
        PureStateVector psi = haar_random_pure(d * d, rng);
        const SchmidtDecomposition sd = schmidt(psi, d, d);
        if (sd.coefficients(d - 1) > min_coeff) return psi;
    }
}

}  // namespace popt
