#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "popt/linalg.hpp"
#include "popt/rng.hpp"
#include "popt/states.hpp"

namespace popt {

// PSD within this tolerance and completeness within this tolerance are
// enforced on POVMs; input states use the tighter kHermTol.
inline constexpr double kPovmTol = 1e-10;
inline constexpr double kTableSumTol = 1e-9;
inline constexpr double kTableValueEps = 1e-10;

enum class Party { A, B };

struct LabeledOperator {
    std::string label;
    HermitianOperator op;
};

// Trusted quantum input states handed to one party; each PSD with unit trace.
struct InputSet {
    Party party = Party::A;
    int dim = 0;
    std::vector<LabeledOperator> states;

    InputSet() = default;
    InputSet(Party party, int dim, std::vector<LabeledOperator> states);
};

struct POVM {
    int dim = 0;
    std::vector<LabeledOperator> effects;  // PSD, summing to the identity

    POVM() = default;
    POVM(int dim, std::vector<LabeledOperator> effects);
};

// Full experiment description: tested state, per-party input sets, and the
// measurements across input and target systems.
struct Scenario {
    BipartiteState state;
    InputSet inputs_a;
    InputSet inputs_b;
    POVM povm_a;  // on A'A
    POVM povm_b;  // on BB'

    Scenario() = default;
    Scenario(BipartiteState state, InputSet inputs_a, InputSet inputs_b, POVM povm_a,
             POVM povm_b);
};

// p(a,b|x,y) table; the only data the MDI detector consumes besides the
// input-set descriptions. Values are validated to be probabilities summing
// to 1 per (x,y).
class CorrelationTable {
public:
    CorrelationTable() = default;
    CorrelationTable(std::vector<std::string> a_labels, std::vector<std::string> b_labels,
                     std::vector<std::string> x_labels, std::vector<std::string> y_labels,
                     std::vector<double> values, std::optional<std::uint64_t> shots = {});

    int na() const { return static_cast<int>(a_labels_.size()); }
    int nb() const { return static_cast<int>(b_labels_.size()); }
    int nx() const { return static_cast<int>(x_labels_.size()); }
    int ny() const { return static_cast<int>(y_labels_.size()); }

    double at(int a, int b, int x, int y) const;
    const std::vector<std::string>& a_labels() const { return a_labels_; }
    const std::vector<std::string>& b_labels() const { return b_labels_; }
    const std::vector<std::string>& x_labels() const { return x_labels_; }
    const std::vector<std::string>& y_labels() const { return y_labels_; }
    const std::vector<double>& values() const { return values_; }
    std::optional<std::uint64_t> shots() const { return shots_; }

private:
    std::vector<std::string> a_labels_, b_labels_, x_labels_, y_labels_;
    std::vector<double> values_;  // indexed ((a*nb + b)*nx + x)*ny + y
    std::optional<std::uint64_t> shots_;
};

// Six eigenstate projectors of sigma_x, sigma_y, sigma_z; tomographically
// complete on a qubit.
InputSet pauli_inputs(Party party = Party::A);

// {|0>,|1>,|+>,|->} projectors; real states, all orthogonal to sigma_y.
InputSet planar_inputs(Party party = Party::A);

// d(d+1) mutually-unbiased-basis projectors for prime d.
InputSet mub_inputs(int d, Party party = Party::A);

// d^2 rank-1 generalized Bell projectors |Lambda_jk><Lambda_jk|.
POVM gbm_povm(int d);

struct SchmidtRankPovm {
    POVM povm;                 // {|psi><psi|, I - |psi><psi|}
    ComplexMatrix x_factor;    // invertible PSD X with psi = (X x I)|Lambda>
    PureStateVector bell_like; // |Lambda> built on psi's Schmidt bases
};
// Two-effect POVM from a full-Schmidt-rank pure state, exposing the
// factorization through a generalized Bell state.
SchmidtRankPovm schmidt_rank_povm(const PureStateVector& psi, int d);

// Exact correlations p(a,b|x,y) = Tr[(tau_x x rho x tau_y)(M^a x M^b)],
// tensor order A'-A-B-B'.
CorrelationTable simulate(const Scenario& s);

// Pi_ab = Tr_AB[(I x rho x I)(M^a x M^b)] on A'B'.
HermitianOperator effective_state(const Scenario& s, int a, int b);

// Multinomial empirical frequencies per (x,y); deterministic given the rng.
CorrelationTable sample(const Scenario& s, std::uint64_t shots, Rng& rng);

bool is_tomo_complete(const InputSet& in_a, const InputSet& in_b);

// For qubit input sets whose Bloch vectors span at most a plane, returns the
// traceless unit obstruction Z (eigenvalues +-1) with Tr(Z tau_x) = 0 for
// every member; otherwise nullopt.
std::optional<HermitianOperator> bloch_obstruction(const InputSet& in);

// Completely positive map in Kraus form. apply: sum K M K^dagger.
struct CpMap {
    std::vector<ComplexMatrix> kraus;

    ComplexMatrix apply(const ComplexMatrix& m) const;
    ComplexMatrix apply_adjoint(const ComplexMatrix& m) const;  // sum K^dagger M K
    ComplexMatrix kraus_sum() const;                            // sum K^dagger K
};

// One-way LOCC instrument: Alice's CP maps (summing to trace-preserving) on
// A'A plus Bob's CPTP channels on BB' indexed by Alice's message.
struct OneWayInstrument {
    std::vector<CpMap> alice;
    std::vector<CpMap> bob;
};

OneWayInstrument identity_instrument(int dim_alice, int dim_bob);
OneWayInstrument random_instrument(int dim_alice, int dim_bob, int messages, int kraus_per_map,
                                   Rng& rng);

// Effects replaced by their adjoint-map images, Alice outcomes relabeled
// "a:i". Throws if the instrument is not trace-preserving in sum.
CorrelationTable locc_postprocess(const Scenario& s, const OneWayInstrument& instrument);

// Random POVM from normalized Wishart blocks.
POVM random_povm(int dim, int outcomes, Rng& rng);

// Haar pure state on C^d x C^d resampled until every Schmidt coefficient
// clears min_coeff; feeds schmidt_rank_povm.
PureStateVector random_full_rank_vector(int d, double min_coeff, Rng& rng);

}  // namespace popt
