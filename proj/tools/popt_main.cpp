// Command line front end: builds scenarios from JSON configs, runs the
// MDI detector or one of the analysis suites, and emits tables/reports.
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 solver
// non-convergence.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <popt/analysis.hpp>
#include <popt/serialize.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return std::string(buf);
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

popt::SolverOptions solver_from_config(const json& cfg) {
    popt::SolverOptions opts;
    if (!cfg.contains("solver")) return opts;
    const json& s = cfg.at("solver");
    if (s.contains("max_iters")) opts.max_iters = s.at("max_iters").get<int>();
    if (s.contains("eps_primal")) opts.eps_primal = s.at("eps_primal").get<double>();
    if (s.contains("eps_dual")) opts.eps_dual = s.at("eps_dual").get<double>();
    if (s.contains("step")) opts.step = s.at("step").get<double>();
    if (s.contains("shortcut_allowed")) opts.shortcut_allowed = s.at("shortcut_allowed").get<bool>();
    if (s.contains("eps_feasibility")) opts.eps_feasibility = s.at("eps_feasibility").get<double>();
    return opts;
}

popt::InputSet inputs_from_config(const json& node, popt::Party party) {
    const std::string name = node.contains("name") ? node.at("name").get<std::string>()
                                                   : node.get<std::string>();
    if (name == "pauli") return popt::pauli_inputs(party);
    if (name == "planar") return popt::planar_inputs(party);
    if (name == "mub") {
        const int d = node.contains("d") ? node.at("d").get<int>() : 2;
        return popt::mub_inputs(d, party);
    }
    throw ConfigError("unknown input set: " + name + " (expected pauli|planar|mub)");
}

popt::BipartiteState state_from_config(const json& node, popt::Rng& rng) {
    const std::string family = node.contains("family") ? node.at("family").get<std::string>()
                                                       : node.get<std::string>();
    if (family == "gamma_phi_plus") return popt::gamma_state(popt::bell_projector(2, 0, 0));
    if (family == "gamma_psi_minus") return popt::gamma_state(popt::bell_projector(2, 1, 1));
    if (family == "random_quantum") {
        const int da = node.contains("d_a") ? node.at("d_a").get<int>() : 2;
        const int db = node.contains("d_b") ? node.at("d_b").get<int>() : 2;
        return popt::random_quantum_state(da, db, rng);
    }
    if (family == "random_beyond_quantum") return popt::random_beyond_quantum_state(rng);
    if (family == "pi_t") {
        const int d = node.contains("d") ? node.at("d").get<int>() : 3;
        const double t = node.contains("t") ? node.at("t").get<double>() : 0.1;
        popt::BipartiteState raw =
            popt::pi_t_state(popt::sample_P_state(d, rng), d, t);
        // Rescaled to unit trace so it can serve as a tested state.
        popt::ComplexMatrix m = raw.op.matrix() / raw.op.matrix().trace().real();
        popt::BipartiteState out(popt::HermitianOperator(m), d, d, true, "pi_t_normalized");
        out.classification = raw.classification;
        return out;
    }
    if (family == "matrix") {
        return popt::state_from_json(node.dump());
    }
    throw ConfigError("unknown state family: " + family);
}

popt::POVM povm_from_config(const json& node, int local_dim, popt::Rng& rng) {
    const std::string name = node.contains("name") ? node.at("name").get<std::string>()
                                                   : node.get<std::string>();
    if (name == "gbm") return popt::gbm_povm(local_dim);
    if (name == "random") {
        const int outcomes = node.contains("outcomes") ? node.at("outcomes").get<int>() : 4;
        return popt::random_povm(local_dim * local_dim, outcomes, rng);
    }
    if (name == "schmidt_rank") {
        const double min_coeff =
            node.contains("min_coeff") ? node.at("min_coeff").get<double>() : 0.1;
        return popt::schmidt_rank_povm(popt::random_full_rank_vector(local_dim, min_coeff, rng),
                                       local_dim)
            .povm;
    }
    throw ConfigError("unknown povm: " + name + " (expected gbm|random|schmidt_rank)");
}

struct RunSettings {
    json config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;  // nullopt = exact
    bool shots_set = false;
    std::optional<double> threshold;
    std::optional<int> trials;
    std::string out_dir = "out";
};

std::uint64_t require_seed(const RunSettings& rs) {
    if (rs.seed) return *rs.seed;
    if (rs.config.contains("seed")) return rs.config.at("seed").get<std::uint64_t>();
    throw ConfigError("a seed is required (--seed or config \"seed\")");
}

std::optional<std::uint64_t> resolve_shots(const RunSettings& rs) {
    if (rs.shots_set) return rs.shots;
    if (rs.config.contains("shots") && !rs.config.at("shots").is_null()) {
        const json& s = rs.config.at("shots");
        if (s.is_string()) {
            if (s.get<std::string>() == "exact") return std::nullopt;
            throw ConfigError("shots must be an integer or \"exact\"");
        }
        return s.get<std::uint64_t>();
    }
    return std::nullopt;
}

popt::Scenario scenario_from_config(const RunSettings& rs, std::uint64_t seed) {
    if (!rs.config.contains("scenario"))
        throw ConfigError("config must contain a \"scenario\" object");
    const json& sc = rs.config.at("scenario");
    for (const char* key : {"state", "inputs_a", "inputs_b", "povm_a", "povm_b"})
        if (!sc.contains(key))
            throw ConfigError(std::string("scenario is missing \"") + key + "\"");
    popt::Rng state_rng = popt::make_rng(popt::split_seed(seed, 0));
    popt::Rng povm_a_rng = popt::make_rng(popt::split_seed(seed, 1));
    popt::Rng povm_b_rng = popt::make_rng(popt::split_seed(seed, 2));
    const popt::BipartiteState state = state_from_config(sc.at("state"), state_rng);
    popt::InputSet in_a = inputs_from_config(sc.at("inputs_a"), popt::Party::A);
    popt::InputSet in_b = inputs_from_config(sc.at("inputs_b"), popt::Party::B);
    popt::POVM pa = povm_from_config(sc.at("povm_a"), state.d_a, povm_a_rng);
    popt::POVM pb = povm_from_config(sc.at("povm_b"), state.d_b, povm_b_rng);
    try {
        return popt::Scenario(state, std::move(in_a), std::move(in_b), std::move(pa),
                              std::move(pb));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("inconsistent scenario: ") + e.what());
    }
}

struct ExportedArtifacts {
    fs::path inputs_a;
    fs::path inputs_b;
    fs::path table_csv;
};

ExportedArtifacts export_artifacts(const popt::Scenario& s, const popt::CorrelationTable& table,
                                   const fs::path& out) {
    fs::create_directories(out);
    ExportedArtifacts paths{out / "inputs_a.json", out / "inputs_b.json", out / "table.csv"};
    write_file(out / "scenario.json", popt::scenario_to_json(s));
    write_file(paths.inputs_a, popt::input_set_to_json(s.inputs_a));
    write_file(paths.inputs_b, popt::input_set_to_json(s.inputs_b));
    write_file(paths.table_csv, popt::table_to_csv(table));
    write_file(out / "table.json", popt::table_to_json(table));
    return paths;
}

int cmd_detect(const RunSettings& rs) {
    const std::uint64_t seed = require_seed(rs);
    const popt::Scenario scenario = scenario_from_config(rs, seed);
    const std::optional<std::uint64_t> shots = resolve_shots(rs);
    popt::Rng table_rng = popt::make_rng(popt::split_seed(seed, 3));
    const popt::CorrelationTable table =
        shots ? popt::sample(scenario, *shots, table_rng) : popt::simulate(scenario);

    const fs::path out(rs.out_dir);
    const ExportedArtifacts paths = export_artifacts(scenario, table, out);

    // The detector view is rebuilt from the exported artifacts: it never
    // touches the state or the measurement operators.
    const popt::InputSet in_a = popt::input_set_from_json(read_file(paths.inputs_a));
    const popt::InputSet in_b = popt::input_set_from_json(read_file(paths.inputs_b));
    const popt::CorrelationTable view = popt::table_from_csv(read_file(paths.table_csv), shots);

    double threshold = popt::kDefaultThreshold;
    if (shots) threshold = popt::scaled_threshold(in_a.dim, in_b.dim, *shots);
    if (rs.config.contains("threshold")) threshold = rs.config.at("threshold").get<double>();
    if (rs.threshold) threshold = *rs.threshold;

    popt::DetectionReport report =
        popt::detect(view, in_a, in_b, threshold, solver_from_config(rs.config));
    report.seed = seed;
    write_file(out / "report.json", popt::report_to_json(report, now_utc()));
    write_file(out / "report.csv", popt::report_to_csv(report));

    std::cout << "verdict=" << (report.beyond_quantum ? "beyond-quantum" : "not-detected")
              << " max_c=" << report.max_c << " threshold=" << threshold << " cells="
              << report.cells.size() << " out=" << out.string() << "\n";
    for (const popt::CellResult& cell : report.cells)
        if (cell.status == popt::SolveStatus::max_iters) return kExitSolver;
    return kExitOk;
}

int cmd_export(const RunSettings& rs) {
    const std::uint64_t seed = require_seed(rs);
    const popt::Scenario scenario = scenario_from_config(rs, seed);
    const std::optional<std::uint64_t> shots = resolve_shots(rs);
    popt::Rng table_rng = popt::make_rng(popt::split_seed(seed, 3));
    const popt::CorrelationTable table =
        shots ? popt::sample(scenario, *shots, table_rng) : popt::simulate(scenario);
    export_artifacts(scenario, table, fs::path(rs.out_dir));
    std::cout << "exported scenario and " << table.values().size() << " table cells to "
              << rs.out_dir << "\n";
    return kExitOk;
}

int cmd_suite(const std::string& name, const RunSettings& rs, int d_arg, double t_arg) {
    popt::SuiteConfig cfg;
    cfg.seed = require_seed(rs);
    cfg.solver = solver_from_config(rs.config);
    if (rs.config.contains("threshold")) cfg.threshold = rs.config.at("threshold").get<double>();
    if (rs.threshold) cfg.threshold = *rs.threshold;
    if (rs.config.contains("trials")) cfg.trials = rs.config.at("trials").get<int>();
    if (rs.trials) cfg.trials = *rs.trials;

    popt::ExperimentResult result;
    if (name == "soundness") {
        result = popt::soundness_suite(cfg);
    } else if (name == "completeness") {
        result = popt::completeness_suite(cfg);
    } else if (name == "obstruction") {
        result = popt::obstruction_suite(cfg);
    } else if (name == "span") {
        result = popt::span_suite(d_arg);
    } else if (name == "demanding") {
        const double t = t_arg > 0 ? t_arg : 0.05 * popt::pi_t_max(d_arg);
        result = popt::demanding_suite(cfg, d_arg, t, popt::mub_inputs(d_arg, popt::Party::A),
                                       popt::mub_inputs(d_arg, popt::Party::B));
    } else if (name == "witness-comparison") {
        result = popt::witness_comparison_suite(cfg);
    } else {
        throw ConfigError("unknown suite: " + name +
                          " (expected soundness|completeness|obstruction|demanding|span|"
                          "witness-comparison)");
    }

    const fs::path out(rs.out_dir);
    fs::create_directories(out);
    write_file(out / ("suite_" + name + ".json"), popt::experiment_to_json(result, now_utc()));
    write_file(out / ("suite_" + name + ".csv"), popt::experiment_to_csv(result));
    std::cout << "suite=" << result.name << " trials=" << result.trials
              << " passes=" << result.passes << " failures=" << result.failures.size()
              << " out=" << out.string() << "\n";
    return result.failures.empty() ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDI beyond-quantum state detection laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    RunSettings rs;
    std::string shots_text;
    std::uint64_t seed_arg = 0;
    double threshold_arg = 0.0;
    int trials_arg = 0;
    int d_arg = 3;
    double t_arg = 0.0;
    std::string suite_name;

    std::vector<CLI::Option*> seed_opts, threshold_opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        seed_opts.push_back(
            cmd->add_option("--seed", seed_arg, "master seed (required for randomized runs)"));
        cmd->add_option("--shots", shots_text, "shot count or 'exact'");
        threshold_opts.push_back(
            cmd->add_option("--threshold", threshold_arg, "detection threshold on max c"));
        cmd->add_option("--out", rs.out_dir, "output directory");
    };

    CLI::App* detect_cmd = app.add_subcommand("detect", "simulate (or sample) and run the detector");
    add_common(detect_cmd);
    CLI::App* suite_cmd = app.add_subcommand("suite", "run a named experiment suite");
    suite_cmd->add_option("name", suite_name, "suite name")->required();
    add_common(suite_cmd);
    CLI::Option* trials_opt = suite_cmd->add_option("--trials", trials_arg, "number of trials");
    suite_cmd->add_option("--d", d_arg, "local dimension for span/demanding");
    suite_cmd->add_option("--t", t_arg, "t parameter for the demanding suite");
    CLI::App* export_cmd = app.add_subcommand("export", "write the scenario and raw table");
    add_common(export_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (CLI::Option* opt : seed_opts)
        if (opt->count() > 0) rs.seed = seed_arg;
    for (CLI::Option* opt : threshold_opts)
        if (opt->count() > 0) rs.threshold = threshold_arg;
    if (trials_opt->count() > 0) rs.trials = trials_arg;

    try {
        rs.config = load_config(config_path);
        if (!shots_text.empty()) {
            rs.shots_set = true;
            if (shots_text == "exact") {
                rs.shots = std::nullopt;
            } else {
                try {
                    rs.shots = std::stoull(shots_text);
                } catch (const std::exception&) {
                    throw ConfigError("--shots must be an integer or 'exact'");
                }
            }
        }
        if (detect_cmd->parsed()) return cmd_detect(rs);
        if (export_cmd->parsed()) return cmd_export(rs);
        if (suite_cmd->parsed()) return cmd_suite(suite_name, rs, d_arg, t_arg);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
