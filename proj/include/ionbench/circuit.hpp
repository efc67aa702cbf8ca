#pragma once

#include <string>
#include <vector>

#include "ionbench/gate.hpp"

namespace ionbench {

/// Ordered gate list over indexed qubits. Qubit 0 is the most significant
/// bit of every serialized bitstring.
struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;
    std::string label;

    Circuit() = default;
    explicit Circuit(int nq, std::string lbl = {});

    /// Appends after checking targets against num_qubits.
    Circuit& append(const Gate& gate);

    bool native_only() const;
};

/// Concatenation (same width required).
Circuit concat(const Circuit& a, const Circuit& b);

} // namespace ionbench
