#pragma once

#include <map>
#include <string>
#include <utility>

#include "ionbench/circuit.hpp"

namespace ionbench {

/// Gate tallies of a native circuit. n_1q counts physical single-qubit
/// rotations: R gates, plus RZ gates when frame virtualization is off.
struct GateCounts {
    int n_1q = 0;
    int n_2q = 0;
    int n_rz = 0;

    bool operator==(const GateCounts&) const = default;
};

struct CompilerOptions {
    bool enable_merge = true;
    bool enable_rz_virtualization = true;
    bool equivalence_check = false;
    /// Entangling-phase sign per unordered qubit pair; +1 (chi = +pi/4)
    /// unless calibration says otherwise.
    std::map<std::pair<int, int>, int> xx_signs;

    int xx_sign(int a, int b) const;
};

struct CompiledCircuit {
    Circuit circuit; // R/RZ/XX only
    GateCounts counts;
    std::string provenance;
    bool rz_virtual = true;
};

/// Lowers standard gates to {R, RZ, XX}; each CNOT/CZ costs exactly one XX.
CompiledCircuit decompose(const Circuit& circuit, const CompilerOptions& options = {});

/// Peephole pass: merges adjacent single-qubit runs into canonical
/// RZ * R(theta,0) * RZ (theta in [0, pi]), elides identities, and fuses
/// adjacent XX gates on the same pair. Never increases gate counts.
CompiledCircuit optimize(const CompiledCircuit& compiled, const CompilerOptions& options = {});

GateCounts gate_counts(const CompiledCircuit& compiled);

/// decompose followed by optimize.
CompiledCircuit compile_circuit(const Circuit& circuit, const CompilerOptions& options = {});

} // namespace ionbench
