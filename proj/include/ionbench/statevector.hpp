#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ionbench/circuit.hpp"
#include "ionbench/gate.hpp"
#include "ionbench/rng.hpp"

namespace ionbench {

/// Shot tally keyed by output bitstring (most significant qubit first).
struct MeasurementRecord {
    int num_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::string, std::uint64_t> counts;
};

/// Dense 2^n complex amplitudes, unit norm. Basis index bit layout matches
/// the bitstring convention: qubit q lives at bit (n-1-q) of the index.
class StateVector {
public:
    explicit StateVector(int num_qubits);
    static StateVector basis_state(int num_qubits, std::size_t index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cdouble> amplitudes() const { return amps_; }
    cdouble amplitude(std::size_t index) const { return amps_[index]; }

    double norm() const;
    double probability(std::size_t index) const { return std::norm(amps_[index]); }
    std::vector<double> probabilities() const;

    void apply(const Gate& gate);
    /// Applies a bare Pauli operator (0=X, 1=Y, 2=Z) to one qubit.
    void apply_pauli(int qubit, int pauli);

private:
    int num_qubits_;
    std::vector<cdouble> amps_;

    void apply_1q(const Unitary& u, int qubit);
    void apply_2q(const Unitary& u, int a, int b);
};

void apply_gate(StateVector& state, const Gate& gate);
StateVector run_circuit(const Circuit& circuit, StateVector initial);

/// i.i.d. Born-rule samples; deterministic for a given seed.
MeasurementRecord sample(const StateVector& state, std::uint64_t shots, std::uint64_t rng_seed);

/// One Born-rule draw from a precomputed inclusive cumulative distribution.
std::size_t sample_index(std::span<const double> cumulative, RandomStream& rng);
std::vector<double> cumulative_probabilities(const StateVector& state);

int bit_of(std::size_t basis, int qubit, int num_qubits);
std::string basis_to_bitstring(std::size_t basis, int num_qubits);
std::size_t bitstring_to_basis(std::string_view bits);

/// Overlap |<a|b>|; global-phase-insensitive state comparison.
double overlap(const StateVector& a, const StateVector& b);

} // namespace ionbench
