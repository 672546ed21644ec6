#include "popt/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace popt {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_node(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_node(const json& node) {
    if (!node.is_array() || node.empty())
        throw std::invalid_argument("matrix: expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(node.size());
    const auto cols = static_cast<Eigen::Index>(node.at(0).size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = node.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("matrix: ragged rows");
        for (Eigen::Index j = 0; j < cols; ++j) {
            const json& entry = row.at(static_cast<std::size_t>(j));
            if (!entry.is_array() || entry.size() != 2)
                throw std::invalid_argument("matrix: entries must be [re, im] pairs");
            m(i, j) = cplx(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return m;
}

json state_to_node(const BipartiteState& s) {
    json node;
    node["label"] = s.label;
    node["d_a"] = s.d_a;
    node["d_b"] = s.d_b;
    node["normalized"] = s.normalized;
    node["matrix"] = matrix_to_node(s.op.matrix());
    return node;
}

BipartiteState state_from_node(const json& node) {
    return BipartiteState(HermitianOperator(matrix_from_node(node.at("matrix"))),
                          node.at("d_a").get<int>(), node.at("d_b").get<int>(),
                          node.at("normalized").get<bool>(),
                          node.at("label").get<std::string>());
}

json labeled_list_to_node(const std::vector<LabeledOperator>& ops) {
    json list = json::array();
    for (const auto& o : ops) {
        json node;
        node["label"] = o.label;
        node["matrix"] = matrix_to_node(o.op.matrix());
        list.push_back(std::move(node));
    }
    return list;
}

std::vector<LabeledOperator> labeled_list_from_node(const json& node) {
    std::vector<LabeledOperator> out;
    for (const json& entry : node)
        out.push_back(LabeledOperator{entry.at("label").get<std::string>(),
                                      HermitianOperator(matrix_from_node(entry.at("matrix")))});
    return out;
}

json input_set_to_node(const InputSet& in) {
    json node;
    node["party"] = in.party == Party::A ? "A" : "B";
    node["dim"] = in.dim;
    node["states"] = labeled_list_to_node(in.states);
    return node;
}

InputSet input_set_from_node(const json& node) {
    const std::string party = node.at("party").get<std::string>();
    if (party != "A" && party != "B")
        throw std::invalid_argument("input set: party must be A or B");
    return InputSet(party == "A" ? Party::A : Party::B, node.at("dim").get<int>(),
                    labeled_list_from_node(node.at("states")));
}

json povm_to_node(const POVM& p) {
    json node;
    node["dim"] = p.dim;
    node["effects"] = labeled_list_to_node(p.effects);
    return node;
}

POVM povm_from_node(const json& node) {
    return POVM(node.at("dim").get<int>(), labeled_list_from_node(node.at("effects")));
}

json table_to_node(const CorrelationTable& t) {
    json node;
    node["a_labels"] = t.a_labels();
    node["b_labels"] = t.b_labels();
    node["x_labels"] = t.x_labels();
    node["y_labels"] = t.y_labels();
    if (t.shots())
        node["shots"] = *t.shots();
    else
        node["shots"] = nullptr;
    node["values"] = t.values();
    return node;
}

CorrelationTable table_from_node(const json& node) {
    std::optional<std::uint64_t> shots;
    if (!node.at("shots").is_null()) shots = node.at("shots").get<std::uint64_t>();
    return CorrelationTable(node.at("a_labels").get<std::vector<std::string>>(),
                            node.at("b_labels").get<std::vector<std::string>>(),
                            node.at("x_labels").get<std::vector<std::string>>(),
                            node.at("y_labels").get<std::vector<std::string>>(),
                            node.at("values").get<std::vector<double>>(), shots);
}

std::string shortest_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json parse(const std::string& text) {
    return json::parse(text);  // throws nlohmann parse_error on bad input
}

}  // namespace

std::string matrix_to_json(const ComplexMatrix& m) { return matrix_to_node(m).dump(); }
ComplexMatrix matrix_from_json(const std::string& text) { return matrix_from_node(parse(text)); }

std::string state_to_json(const BipartiteState& s) { return state_to_node(s).dump(); }
BipartiteState state_from_json(const std::string& text) { return state_from_node(parse(text)); }

std::string input_set_to_json(const InputSet& in) { return input_set_to_node(in).dump(); }
InputSet input_set_from_json(const std::string& text) {
    return input_set_from_node(parse(text));
}

std::string povm_to_json(const POVM& p) { return povm_to_node(p).dump(); }
POVM povm_from_json(const std::string& text) { return povm_from_node(parse(text)); }

std::string scenario_to_json(const Scenario& s) {
    json node;
    node["state"] = state_to_node(s.state);
    node["inputs_a"] = input_set_to_node(s.inputs_a);
    node["inputs_b"] = input_set_to_node(s.inputs_b);
    node["povm_a"] = povm_to_node(s.povm_a);
    node["povm_b"] = povm_to_node(s.povm_b);
    return node.dump();
}

Scenario scenario_from_json(const std::string& text) {
    const json node = parse(text);
    return Scenario(state_from_node(node.at("state")), input_set_from_node(node.at("inputs_a")),
                    input_set_from_node(node.at("inputs_b")), povm_from_node(node.at("povm_a")),
                    povm_from_node(node.at("povm_b")));
}

std::string table_to_json(const CorrelationTable& t) { return table_to_node(t).dump(); }
CorrelationTable table_from_json(const std::string& text) {
    return table_from_node(parse(text));
}

std::string table_to_csv(const CorrelationTable& t) {
    std::string out = "a,b,x,y,p\n";
    for (int a = 0; a < t.na(); ++a)
        for (int b = 0; b < t.nb(); ++b)
            for (int x = 0; x < t.nx(); ++x)
                for (int y = 0; y < t.ny(); ++y) {
                    out += t.a_labels()[static_cast<std::size_t>(a)] + ",";
                    out += t.b_labels()[static_cast<std::size_t>(b)] + ",";
                    out += t.x_labels()[static_cast<std::size_t>(x)] + ",";
                    out += t.y_labels()[static_cast<std::size_t>(y)] + ",";
                    out += shortest_double(t.at(a, b, x, y));
                    out += "\n";
                }
    return out;
}

CorrelationTable table_from_csv(const std::string& csv, std::optional<std::uint64_t> shots) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "a,b,x,y,p")
        throw std::invalid_argument("table csv: missing 'a,b,x,y,p' header");
    struct Row {
        std::string a, b, x, y;
        double p;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row row;
        std::size_t pos = 0;
        auto next = [&](std::string& field) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos)
                throw std::invalid_argument("table csv: malformed row");
            field = line.substr(pos, comma - pos);
            pos = comma + 1;
        };
        next(row.a);
        next(row.b);
        next(row.x);
        next(row.y);
        const std::string p_text = line.substr(pos);
        const auto res =
            std::from_chars(p_text.data(), p_text.data() + p_text.size(), row.p);
        if (res.ec != std::errc())
            throw std::invalid_argument("table csv: bad probability value");
        rows.push_back(std::move(row));
    }
    auto index_of = [](std::vector<std::string>& labels, const std::string& l) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == l) return static_cast<int>(i);
        labels.push_back(l);
        return static_cast<int>(labels.size() - 1);
    };
    std::vector<std::string> al, bl, xl, yl;
    for (const Row& r : rows) {
        index_of(al, r.a);
        index_of(bl, r.b);
        index_of(xl, r.x);
        index_of(yl, r.y);
    }
    const int na = static_cast<int>(al.size()), nb = static_cast<int>(bl.size());
    const int nx = static_cast<int>(xl.size()), ny = static_cast<int>(yl.size());
    if (rows.size() != static_cast<std::size_t>(na) * nb * nx * ny)
        throw std::invalid_argument("table csv: incomplete outcome/input grid");
    std::vector<double> values(rows.size(), 0.0);
    for (const Row& r : rows) {
        const int a = index_of(al, r.a), b = index_of(bl, r.b);
        const int x = index_of(xl, r.x), y = index_of(yl, r.y);
        values[static_cast<std::size_t>(((a * nb + b) * nx + x) * ny + y)] = r.p;
    }
    return CorrelationTable(al, bl, xl, yl, std::move(values), shots);
}

std::string report_to_json(const DetectionReport& r, const std::string& timestamp) {
    json node;
    if (!timestamp.empty()) node["generated_at"] = timestamp;
    node["threshold"] = r.threshold;
    node["beyond_quantum"] = r.beyond_quantum;
    node["max_c"] = r.max_c;
    node["worst_cell"] = json{{"a", r.worst_a}, {"b", r.worst_b}};
    node["provenance"] = json{{"table_hash", r.table_hash}, {"seed", r.seed}};
    json cells = json::array();
    for (const CellResult& c : r.cells) {
        json cell;
        cell["a"] = c.a;
        cell["b"] = c.b;
        cell["c"] = c.c;
        cell["status"] = to_string(c.status);
        cell["method"] = to_string(c.method);
        cell["iterations"] = c.iterations;
        cell["residual_primal"] = c.residual_primal;
        cell["residual_dual"] = c.residual_dual;
        cell["data_residual"] = c.data_residual;
        cells.push_back(std::move(cell));
    }
    node["cells"] = std::move(cells);
    return node.dump();
}

std::string report_to_csv(const DetectionReport& r) {
    std::string out = "a,b,c,status\n";
    for (const CellResult& c : r.cells)
        out += c.a + "," + c.b + "," + shortest_double(c.c) + "," + to_string(c.status) + "\n";
    return out;
}

std::string experiment_to_json(const ExperimentResult& r, const std::string& timestamp) {
    json node;
    if (!timestamp.empty()) node["generated_at"] = timestamp;
    node["name"] = r.name;
    node["trials"] = r.trials;
    node["passes"] = r.passes;
    json failures = json::array();
    for (const TrialFailure& f : r.failures)
        failures.push_back(json{{"seed", f.seed}, {"diagnostics", f.diagnostics}});
    node["failures"] = std::move(failures);
    node["summary"] = r.summary;
    node["runtime_seconds"] = r.runtime_seconds;
    return node.dump();
}

std::string experiment_to_csv(const ExperimentResult& r) {
    std::string out = "trial,seed,pass,note\n";
    for (const std::string& line : r.trial_log) out += line + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

}  // namespace popt
