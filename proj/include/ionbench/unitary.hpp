#pragma once

#include <span>
#include <vector>

#include "ionbench/circuit.hpp"

namespace ionbench {

/// Full circuit unitary, column-major (column j = circuit applied to |j>).
/// Built by running the simulator on every basis state; intended for small
/// circuits (num_qubits <= 6).
std::vector<cdouble> circuit_unitary(const Circuit& circuit);

/// True when b = e^{i phase} a entrywise within tol.
bool equal_up_to_global_phase(std::span<const cdouble> a, std::span<const cdouble> b, double tol);

} // namespace ionbench
