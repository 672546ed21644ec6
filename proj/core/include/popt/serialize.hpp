#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "popt/analysis.hpp"
#include "popt/detection.hpp"
#include "popt/protocol.hpp"

namespace popt {

// JSON formats store complex matrices as row-major nested arrays of
// [re, im] pairs. All emitters are deterministic: fixed key order and
// shortest round-trip float formatting.

std::string matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const std::string& text);

std::string state_to_json(const BipartiteState& s);
BipartiteState state_from_json(const std::string& text);

std::string input_set_to_json(const InputSet& in);
InputSet input_set_from_json(const std::string& text);

std::string povm_to_json(const POVM& p);
POVM povm_from_json(const std::string& text);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

std::string table_to_json(const CorrelationTable& t);
CorrelationTable table_from_json(const std::string& text);

// CSV with header "a,b,x,y,p"; probabilities round-trip bit-exactly.
std::string table_to_csv(const CorrelationTable& t);
CorrelationTable table_from_csv(const std::string& csv,
                                std::optional<std::uint64_t> shots = {});

// timestamp, when nonempty, lands in a "generated_at" field that equality
// checks and hashes must ignore.
std::string report_to_json(const DetectionReport& r, const std::string& timestamp = "");
std::string report_to_csv(const DetectionReport& r);  // "a,b,c,status"

std::string experiment_to_json(const ExperimentResult& r, const std::string& timestamp = "");
std::string experiment_to_csv(const ExperimentResult& r);  // per-trial log

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

}  // namespace popt
