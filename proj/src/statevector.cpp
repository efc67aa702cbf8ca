#include "ionbench/statevector.hpp"

#include <algorithm>
#include <cmath>

#include "ionbench/error.hpp"

namespace ionbench {

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 16) {
        throw ValidationError("statevector supports 1..16 qubits");
    }
    amps_.assign(std::size_t{1} << num_qubits, cdouble{});
    amps_[0] = 1.0;
}

StateVector StateVector::basis_state(int num_qubits, std::size_t index) {
    StateVector st(num_qubits);
    if (index >= st.dim()) {
        throw ValidationError("basis index out of range");
    }
    st.amps_[0] = 0.0;
    st.amps_[index] = 1.0;
    return st;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        p[i] = std::norm(amps_[i]);
    }
    return p;
}

void StateVector::apply_1q(const Unitary& u, int qubit) {
    const std::size_t stride = std::size_t{1} << (num_qubits_ - 1 - qubit);
    const cdouble u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cdouble a0 = amps_[i];
            const cdouble a1 = amps_[i + stride];
            amps_[i] = u00 * a0 + u01 * a1;
            amps_[i + stride] = u10 * a0 + u11 * a1;
        }
    }
}

void StateVector::apply_2q(const Unitary& u, int a, int b) {
    const std::size_t ma = std::size_t{1} << (num_qubits_ - 1 - a);
    const std::size_t mb = std::size_t{1} << (num_qubits_ - 1 - b);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & ma) || (i & mb)) {
            continue;
        }
        const std::size_t i00 = i;
        const std::size_t i01 = i | mb;
        const std::size_t i10 = i | ma;
        const std::size_t i11 = i | ma | mb;
        const cdouble a00 = amps_[i00], a01 = amps_[i01], a10 = amps_[i10], a11 = amps_[i11];
        amps_[i00] = u(0, 0) * a00 + u(0, 1) * a01 + u(0, 2) * a10 + u(0, 3) * a11;
        amps_[i01] = u(1, 0) * a00 + u(1, 1) * a01 + u(1, 2) * a10 + u(1, 3) * a11;
        amps_[i10] = u(2, 0) * a00 + u(2, 1) * a01 + u(2, 2) * a10 + u(2, 3) * a11;
        amps_[i11] = u(3, 0) * a00 + u(3, 1) * a01 + u(3, 2) * a10 + u(3, 3) * a11;
    }
}

void StateVector::apply(const Gate& gate) {
    for (int i = 0; i < gate.num_targets(); ++i) {
        if (gate.targets[i] < 0 || gate.targets[i] >= num_qubits_) {
            throw ValidationError("gate target out of range for state");
        }
    }
    const Unitary u = gate_unitary(gate);
    if (u.dim == 2) {
        apply_1q(u, gate.targets[0]);
    } else {
        apply_2q(u, gate.targets[0], gate.targets[1]);
    }
}

void StateVector::apply_pauli(int qubit, int pauli) {
    switch (pauli) {
    case 0: apply(Gate::x(qubit)); return;
    case 1: apply(Gate::y(qubit)); return;
    case 2: apply(Gate::z(qubit)); return;
    default: throw ValidationError("pauli index must be 0..2");
    }
}

void apply_gate(StateVector& state, const Gate& gate) {
    state.apply(gate);
}

StateVector run_circuit(const Circuit& circuit, StateVector initial) {
    if (initial.num_qubits() != circuit.num_qubits) {
        throw ValidationError("initial state width does not match circuit");
    }
    for (const auto& g : circuit.gates) {
        initial.apply(g);
    }
    return initial;
}

std::vector<double> cumulative_probabilities(const StateVector& state) {
    std::vector<double> cum(state.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        acc += state.probability(i);
        cum[i] = acc;
    }
    return cum;
}

std::size_t sample_index(std::span<const double> cumulative, RandomStream& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
        return cumulative.size() - 1;
    }
    return static_cast<std::size_t>(it - cumulative.begin());
}

MeasurementRecord sample(const StateVector& state, std::uint64_t shots, std::uint64_t rng_seed) {
    if (shots == 0) {
        throw ValidationError("sampling requires at least one shot");
    }
    RandomStream rng(rng_seed);
    const auto cum = cumulative_probabilities(state);
    MeasurementRecord rec;
    rec.num_qubits = state.num_qubits();
    rec.shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const std::size_t idx = sample_index(cum, rng);
        ++rec.counts[basis_to_bitstring(idx, state.num_qubits())];
    }
    return rec;
}

int bit_of(std::size_t basis, int qubit, int num_qubits) {
    return static_cast<int>((basis >> (num_qubits - 1 - qubit)) & 1U);
}

std::string basis_to_bitstring(std::size_t basis, int num_qubits) {
    std::string s(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if (bit_of(basis, q, num_qubits)) {
            s[static_cast<std::size_t>(q)] = '1';
        }
    }
    return s;
}

std::size_t bitstring_to_basis(std::string_view bits) {
    std::size_t v = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ValidationError("bitstring must contain only 0/1");
        }
        v = (v << 1) | static_cast<std::size_t>(c == '1');
    }
    return v;
}

double overlap(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw ValidationError("overlap requires equal widths");
    }
    cdouble acc{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc += std::conj(a.amplitude(i)) * b.amplitude(i);
    }
    return std::abs(acc);
}

} // namespace ionbench
