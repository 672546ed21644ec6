#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "popt/detection.hpp"

namespace popt {

struct TrialFailure {
    std::uint64_t seed = 0;
    std::string diagnostics;
};

struct ExperimentResult {
    std::string name;
    int trials = 0;
    int passes = 0;
    std::vector<TrialFailure> failures;
    std::map<std::string, double> summary;
    double runtime_seconds = 0.0;
    std::vector<std::string> trial_log;  // "trial,seed,pass,note" rows
};

struct SuiteConfig {
    int trials = 200;
    std::uint64_t seed = 1;
    double threshold = kDefaultThreshold;
    SolverOptions solver;
    int threads = 0;  // 0: POPT_THREADS env var, then hardware concurrency
};

// Experiment suites for the protocol-level guarantees. Each is reproducible from (seed, config):
// per-trial rng streams are split deterministically from the master seed and
// trials may run on any number of worker threads.

// Random quantum states x random devices x rotating input families; every
// fourth trial adds random one-way LOCC post-processing and every tenth uses
// a near-boundary spectrum. Pass = no detection.
ExperimentResult soundness_suite(const SuiteConfig& config);

// Random beyond-quantum 2x2 states, complete inputs, Bell-type or random
// full-Schmidt-rank effects. Pass = detection; Bell-type cells must match
// the spectrum value |negative part of rho| / 4.
ExperimentResult completeness_suite(const SuiteConfig& config);

// Same generators as completeness but sigma_y-obstructed inputs on Alice.
// Pass = no detection plus a verified PSD completion matching every
// constraint. Optionally appends control trials with complete inputs, which
// must detect again.
ExperimentResult obstruction_suite(const SuiteConfig& config, bool include_control = true);

// For Pi^t over sampled (and optionally supplied probe) members of P:
// detection verdict must equal span membership of the sampled state, and the
// witness direction must align with it.
ExperimentResult demanding_suite(const SuiteConfig& config, int d, double t,
                                 const InputSet& in_a, const InputSet& in_b,
                                 const std::vector<PureStateVector>& probes = {});

// Membership and full-rank span of the d^4-member family.
ExperimentResult span_suite(int d);

// The fixed-witness dependence story: one tailored MDI witness detects its
// target state but not a second one; the SDP detects both from the same
// tables.
ExperimentResult witness_comparison_suite(const SuiteConfig& config);

// Thread-count resolution honoring the POPT_THREADS environment variable.
int resolve_threads(int requested);

}  // namespace popt
