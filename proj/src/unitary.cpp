#include "ionbench/unitary.hpp"

#include <cmath>

#include "ionbench/error.hpp"
#include "ionbench/statevector.hpp"

namespace ionbench {

std::vector<cdouble> circuit_unitary(const Circuit& circuit) {
    if (circuit.num_qubits > 6) {
        throw ValidationError("dense unitary limited to 6 qubits");
    }
    const std::size_t dim = std::size_t{1} << circuit.num_qubits;
    std::vector<cdouble> u(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector st = run_circuit(circuit, StateVector::basis_state(circuit.num_qubits, col));
        for (std::size_t row = 0; row < dim; ++row) {
            u[col * dim + row] = st.amplitude(row);
        }
    }
    return u;
}

bool equal_up_to_global_phase(std::span<const cdouble> a, std::span<const cdouble> b, double tol) {
    if (a.size() != b.size()) {
        return false;
    }
    // anchor the phase at the largest entry of a
    std::size_t k = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i]) > best) {
            best = std::abs(a[i]);
            k = i;
        }
    }
    if (best < tol) {
        return false;
    }
    const cdouble phase = b[k] / a[k];
    if (std::abs(std::abs(phase) - 1.0) > tol) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] * phase - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

} // namespace ionbench
