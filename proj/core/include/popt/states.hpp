#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popt/linalg.hpp"
#include "popt/rng.hpp"

namespace popt {

enum class StateKind { quantum, beyond_quantum, non_popt, undetermined };

const char* to_string(StateKind k);

// Diagnostic record backing a state classification.
struct Classification {
    StateKind kind = StateKind::undetermined;
    double min_eigenvalue = 0.0;
    std::optional<double> product_minimum;  // see-saw estimate, when computed
    bool decomposition_found = false;       // 2x2 POPT decomposition evidence
};

// Hermitian operator tagged with local dimensions. Normalized states carry
// unit trace within kHermTol; unnormalized ones (the Pi^t family) do not.
struct BipartiteState {
    HermitianOperator op;
    int d_a = 0;
    int d_b = 0;
    bool normalized = true;
    std::string label;
    Classification classification;

    BipartiteState() = default;
    BipartiteState(HermitianOperator op, int d_a, int d_b, bool normalized, std::string label);
};

// Schmidt-coefficient cap sqrt(3/(2d)) defining the family P of pure states
// whose projectors span the full Hermitian space.
double schmidt_cap(int d);

// Superposition weight c solving sqrt(c) + sqrt(1-c) = sqrt(3/2).
inline constexpr double kSpanFamilyWeight = 0.0669872981077806766;  // (2 - sqrt(3)) / 4

// |Phi_{j,k}> = (X^j Z^k x I)|Phi>, the generalized Bell vector.
PureStateVector bell_vector(int d, int j, int k);
BipartiteState bell_projector(int d, int j, int k);

// Weyl shift and clock matrices on C^d.
ComplexMatrix weyl_x(int d);
ComplexMatrix weyl_z(int d);

// Partial transpose on A of a quantum state; beyond-quantum iff the result
// has a negative eigenvalue.
BipartiteState gamma_state(const BipartiteState& rho);

// Pi^t(psi) = I/d^2 - (1+t)/d^2 |psi><psi| for psi with sc^2 <= 3/(2d) and
// 0 < t < 2d/3 - 1. Unnormalized; exactly one negative eigenvalue -t/d^2.
BipartiteState pi_t_state(const PureStateVector& psi, int d, double t);

double pi_t_max(int d);  // 2d/3 - 1

// Haar sample with Schmidt coefficients clipped to the cap and renormalized;
// lands in the interior of P.
PureStateVector sample_P_state(int d, Rng& rng);

// d^2 generalized Bell vectors plus, per unordered pair, the real and
// imaginary superpositions with weight kSpanFamilyWeight; d^4 members total,
// all inside P, projectors spanning the full Hermitian space. The extremal
// members sit exactly at the Schmidt cap, but the family's Gram spectrum
// stays far from the rank cutoff (smallest eigenvalue ~8e-3 at d=3 against
// the 1e-9 relative cutoff), so the span computation is well conditioned.
std::vector<PureStateVector> span_family(int d);

PureStateVector haar_random_pure(int dim, Rng& rng);
ComplexMatrix haar_random_unitary(int dim, Rng& rng);

// G G^dagger / Tr from a complex Gaussian G.
BipartiteState random_quantum_state(int d_a, int d_b, Rng& rng);

// Quantum 2x2 state with smallest eigenvalue target_min (spectrum sampled,
// basis Haar); exercises near-boundary soundness.
BipartiteState near_boundary_quantum_state(double target_min, Rng& rng);

// Gamma_A of a Haar-random entangled two-qubit pure state, resampled until
// the negative eigenvalue clears -0.05.
BipartiteState random_beyond_quantum_state(Rng& rng);

struct ProductMinimumOptions {
    int restarts = 32;
    int max_sweeps = 200;
    double tol = 1e-12;
};

// Best value found of min_{u,v} <u x v|H|u x v> by alternating eigenvector
// descent (see-saw) with multi-restart. Upper bound on the true minimum.
double product_minimum(const BipartiteState& h, int restarts, Rng& rng);
double product_minimum(const HermitianOperator& h, int d_a, int d_b,
                       const ProductMinimumOptions& opts, Rng& rng);

// Independent cross-check for d_a = d_b = 2: grid over Alice's Bloch sphere
// with the Bob minimization solved exactly per grid point.
double product_minimum_grid(const HermitianOperator& h, int angles_per_axis = 64);

// Populates the evidence record: spectrum, see-saw estimate and (at 2x2)
// decomposition feasibility.
Classification classify_state(const BipartiteState& s, Rng& rng);

}  // namespace popt
