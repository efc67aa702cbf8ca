#include "ionbench/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ionbench/error.hpp"

namespace ionbench {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out << text;
}

std::string circuit_to_json(const Circuit& circuit) {
    json gates = json::array();
    for (const auto& g : circuit.gates) {
        json jg;
        jg["kind"] = std::string(to_string(g.kind));
        json targets = json::array();
        for (int i = 0; i < g.num_targets(); ++i) {
            targets.push_back(g.targets[i]);
        }
        jg["targets"] = targets;
        json params = json::array();
        for (int i = 0; i < param_count(g.kind); ++i) {
            params.push_back(g.params[i]);
        }
        jg["params"] = params;
        gates.push_back(std::move(jg));
    }
    json j;
    j["num_qubits"] = circuit.num_qubits;
    j["gates"] = std::move(gates);
    j["label"] = circuit.label;
    return j.dump(2) + "\n";
}

Circuit circuit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("circuit JSON parse error: ") + e.what());
    }
    try {
        Circuit c(j.at("num_qubits").get<int>(), j.value("label", std::string{}));
        for (const auto& jg : j.at("gates")) {
            const GateKind kind = gate_kind_from_string(jg.at("kind").get<std::string>());
            const auto& jt = jg.at("targets");
            if (static_cast<int>(jt.size()) != target_count(kind)) {
                throw SchemaError("wrong target count for gate " + jg.at("kind").get<std::string>());
            }
            std::array<int, 2> targets{0, 0};
            for (std::size_t i = 0; i < jt.size(); ++i) {
                targets[i] = jt[i].get<int>();
            }
            std::array<double, 2> params{0.0, 0.0};
            const auto jp = jg.value("params", json::array());
            if (static_cast<int>(jp.size()) != param_count(kind)) {
                throw SchemaError("wrong parameter count for gate " + jg.at("kind").get<std::string>());
            }
            for (std::size_t i = 0; i < jp.size(); ++i) {
                params[i] = jp[i].get<double>();
            }
            c.append(Gate::make(kind, targets, params));
        }
        return c;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("circuit JSON schema error: ") + e.what());
    }
}

Circuit load_circuit(const std::filesystem::path& path) {
    return circuit_from_json(read_text_file(path));
}

void save_circuit(const Circuit& circuit, const std::filesystem::path& path) {
    write_text_file(path, circuit_to_json(circuit));
}

std::string record_to_json(const MeasurementRecord& record) {
    json j;
    j["num_qubits"] = record.num_qubits;
    j["shots"] = record.shots;
    j["counts"] = json::object();
    for (const auto& [bits, n] : record.counts) {
        j["counts"][bits] = n;
    }
    return j.dump(2) + "\n";
}

MeasurementRecord record_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        MeasurementRecord rec;
        rec.num_qubits = j.at("num_qubits").get<int>();
        rec.shots = j.at("shots").get<std::uint64_t>();
        for (const auto& [bits, n] : j.at("counts").items()) {
            rec.counts[bits] = n.get<std::uint64_t>();
        }
        return rec;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("record JSON error: ") + e.what());
    }
}

} // namespace ionbench
