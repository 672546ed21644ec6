#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "popt/protocol.hpp"
#include "popt/solver.hpp"

namespace popt {

inline constexpr double kDefaultThreshold = 1e-6;
inline constexpr double kWitnessExpandTol = 1e-8;

struct CellResult {
    std::string a;
    std::string b;
    double c = 0.0;
    SolveStatus status = SolveStatus::optimal;
    SolveMethod method = SolveMethod::linear_inversion_shortcut;
    int iterations = 0;
    double residual_primal = 0.0;
    double residual_dual = 0.0;
    double data_residual = 0.0;
};

struct DetectionReport {
    std::vector<CellResult> cells;
    double threshold = kDefaultThreshold;
    bool beyond_quantum = false;  // verdict: max c > threshold
    std::string worst_a;
    std::string worst_b;
    double max_c = 0.0;
    std::string table_hash;  // provenance over (inputs, table)
    std::uint64_t seed = 0;  // filled by callers that sampled the table
};

// The MDI detector. Consumes only the correlation table and the input-set
// descriptions; one SDP per outcome pair. Sampled tables get a feasibility
// allowance matched to their shot noise.
DetectionReport detect(const CorrelationTable& table, const InputSet& in_a,
                       const InputSet& in_b, double threshold = kDefaultThreshold,
                       const SolverOptions& options = {});

// Least-squares solution of the trace constraints for one outcome pair;
// equals the effective state on noiseless tables from tomographically
// complete inputs.
HermitianOperator reconstruct(const CorrelationTable& table, const InputSet& in_a,
                              const InputSet& in_b, int a, int b);

// Threshold for sampled tables: 3 sqrt(ln((d_a d_b)^2) / shots).
double scaled_threshold(int d_a, int d_b, std::uint64_t shots);

// Projector onto the negative eigenspace of a beyond-quantum state; PSD
// with Tr(rho Y) < 0 and Tr(sigma Y) >= 0 for every quantum sigma.
HermitianOperator bq_witness(const BipartiteState& rho);

struct WitnessCoefficients {
    RealMatrix alpha;       // (x, y) -> coefficient
    double residual = 0.0;  // || Y - sum alpha tau_x^T x tau_y^T ||_F
};

class NotExpandableError : public std::runtime_error {
public:
    NotExpandableError(double residual, const std::string& what)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Least-squares expansion Y = sum_{x,y} alpha_{x,y} tau_x^T x tau_y^T over
// the transposed inputs; never throws for span misses.
WitnessCoefficients project_witness(const HermitianOperator& y, const InputSet& in_a,
                                    const InputSet& in_b);

// Frobenius distance of op from span{tau_x x tau_y} (untransposed); the
// membership predicate behind the demanding-family analysis.
double product_span_residual(const HermitianOperator& op, const InputSet& in_a,
                             const InputSet& in_b);

// As project_witness but throws NotExpandableError when the residual
// exceeds kWitnessExpandTol.
WitnessCoefficients witness_expand(const HermitianOperator& y, const InputSet& in_a,
                                   const InputSet& in_b);

struct MDIWitnessSpec {
    RealMatrix beta;  // (x, y) coefficients applied at the selected outcomes
    std::string a0;
    std::string b0;
};

MDIWitnessSpec make_mdi_witness(const WitnessCoefficients& coeffs, const InputSet& in_a,
                                const InputSet& in_b, std::string a0, std::string b0);

// W_beta(P) = sum beta_{x,y} p(a0, b0 | x, y). With maximally entangled
// effects at (a0, b0) this equals Tr(Y rho) / (d_a d_b).
double mdi_witness_value(const CorrelationTable& table, const MDIWitnessSpec& spec);

}  // namespace popt
