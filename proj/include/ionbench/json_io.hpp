#pragma once

#include <filesystem>
#include <string>

#include "ionbench/circuit.hpp"
#include "ionbench/statevector.hpp"

namespace ionbench {

// Circuit JSON: {"num_qubits": n, "gates": [{"kind": "R", "targets": [q],
// "params": [theta, phi]}, ...], "label": "..."}; angles in radians.

std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const std::string& text);
Circuit load_circuit(const std::filesystem::path& path);
void save_circuit(const Circuit& circuit, const std::filesystem::path& path);

std::string record_to_json(const MeasurementRecord& record);
MeasurementRecord record_from_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace ionbench
