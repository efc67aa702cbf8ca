#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ionbench/circuit.hpp"
#include "ionbench/compiler.hpp"
#include "ionbench/error.hpp"
#include "ionbench/noise.hpp"
#include "ionbench/statevector.hpp"

namespace ionbench {

constexpr int kRegisterQubits = 10;
constexpr int kOracleCount = 1 << kRegisterQubits;

enum class Algorithm { BV, HS };

std::string_view to_string(Algorithm a);

/// Hidden bit string of a Bernstein-Vazirani oracle (10 bits, MSB = qubit 0).
struct BVOracle {
    std::uint32_t c = 0;
    explicit BVOracle(std::uint32_t value);
    std::string bits() const;
};

/// Hidden shift of a Hidden-Shift oracle (10 bits, MSB = qubit 0).
struct HSOracle {
    std::uint32_t s = 0;
    explicit HSOracle(std::uint32_t value);
    std::string bits() const;
};

/// Register + ancilla circuit; ancilla is the last qubit. One CNOT from
/// register qubit i to the ancilla per set bit of c.
Circuit build_bv_circuit(const BVOracle& oracle);
Circuit build_bv_circuit(std::uint64_t c, int register_size);

/// Three Hadamard layers sandwiching the shifted and plain inner-product
/// phase oracles; exactly register_size CZ gates, register_size even.
Circuit build_hs_circuit(const HSOracle& oracle);
Circuit build_hs_circuit(std::uint64_t s, int register_size);

/// Thrown when ancilla conditioning leaves no shots.
struct ConditioningError : Error {
    using Error::Error;
};

/// Keeps shots whose ancilla (last qubit) matches its ideal noiseless value,
/// strips the ancilla bit, and reports the surviving fraction.
std::pair<MeasurementRecord, double> condition_on_ancilla(const MeasurementRecord& record,
                                                          int ideal_ancilla);

/// Ideal noiseless ancilla bit of a compiled BV circuit.
int ideal_ancilla_value(const CompiledCircuit& compiled);

/// Empirical P(output bitstring | oracle) over all 1024 oracles.
struct SweepResult {
    Algorithm algorithm = Algorithm::BV;
    std::uint64_t shots_per_oracle = 0;
    bool conditioned = false;
    std::vector<double> process_matrix;     // kOracleCount x kOracleCount, row-major
    std::vector<double> retained_fraction;  // per oracle (1.0 when not conditioned)
    std::vector<std::uint8_t> row_valid;
    std::vector<int> n_1q; // compiled counts per oracle
    std::vector<int> n_2q;

    double at(int oracle, int output) const {
        return process_matrix[static_cast<std::size_t>(oracle) * kOracleCount + output];
    }
};

struct SweepOptions {
    NoiseConfig noise;
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    CompilerOptions compiler;
};

SweepResult run_sweep(Algorithm algorithm, const SweepOptions& options);

struct SuccessMetrics {
    std::vector<double> per_oracle_success;
    double average_success = 0.0;
    double bqp_fraction = 0.0;   // strict > 2/3
    int argmax_correct_count = 0; // ties count as failure
    std::vector<int> invalid_rows;
};

SuccessMetrics success_metrics(const SweepResult& sweep);

/// Success envelope from shared fidelities:
///   BV: F2^n * F1^(2(n+1)) * Fspam^10, n = two-qubit gate count
///   HS: F2^10 * F1^m * Fspam^10,       m = single-qubit gate count
double expected_envelope(Algorithm algorithm, int n_or_m, double f_2q, double f_1q, double f_spam);

} // namespace ionbench
