#include "ionbench/circuit.hpp"

#include "ionbench/error.hpp"

namespace ionbench {

Circuit::Circuit(int nq, std::string lbl) : num_qubits(nq), label(std::move(lbl)) {
    if (nq <= 0) {
        throw ValidationError("circuit must have at least one qubit");
    }
}

Circuit& Circuit::append(const Gate& gate) {
    for (int i = 0; i < gate.num_targets(); ++i) {
        if (gate.targets[i] < 0 || gate.targets[i] >= num_qubits) {
            throw ValidationError("gate target out of range for circuit");
        }
    }
    gates.push_back(gate);
    return *this;
}

bool Circuit::native_only() const {
    for (const auto& g : gates) {
        if (!g.is_native()) {
            return false;
        }
    }
    return true;
}

Circuit concat(const Circuit& a, const Circuit& b) {
    if (a.num_qubits != b.num_qubits) {
        throw ValidationError("cannot concatenate circuits of different widths");
    }
    Circuit out = a;
    out.gates.insert(out.gates.end(), b.gates.begin(), b.gates.end());
    return out;
}

} // namespace ionbench
