#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ionbench/compiler.hpp"
#include "ionbench/rng.hpp"
#include "ionbench/statevector.hpp"

namespace ionbench {

constexpr int kDeviceQubits = 11;

/// Per-qubit and per-pair fidelities of the modeled device.
struct DeviceModel {
    std::array<double, kDeviceQubits> f_1q{};
    std::array<double, kDeviceQubits> f_spam{};
    std::map<std::pair<int, int>, double> f_2q; // keyed by (min, max), 55 entries
    double f_detect = 1.0;

    double f_2q_for(int a, int b) const;
    double mean_f_1q() const;
    double mean_f_spam() const;
    double mean_f_2q() const;
    double min_f_2q() const;
    double max_f_2q() const;

    void validate() const;

    /// Uniform device: every gate shares the same fidelity triple.
    static DeviceModel uniform(double f2q, double f1q, double fspam, double fdetect = 1.0);
};

DeviceModel load_device_model(const std::filesystem::path& path);
DeviceModel device_model_from_json(const std::string& text);
std::string device_model_to_json(const DeviceModel& model);

enum class CrosstalkMode { ToZero, Either };

/// Rare single-qubit corruption of the measured bitstring: with probability
/// p_event per application point, one qubit drawn uniformly from applies_to
/// is forced to 0 (ToZero) or flipped (Either). With per_qubit_rate set,
/// p_event is instead an independent per-qubit probability at each
/// application point (the alternative reading of "one qubit").
struct CrosstalkModel {
    double p_event = 0.0;
    CrosstalkMode mode = CrosstalkMode::ToZero;
    int num_applications = 0;
    std::vector<int> applies_to;
    bool per_qubit_rate = false;
};

struct NoiseConfig {
    std::optional<CrosstalkModel> crosstalk;
    double detection_misid = 0.0;        // independent flip probability per qubit
    bool pauli_from_device = false;      // per-gate Pauli noise from the device model
    bool spam_from_device = true;        // per-qubit readout flips from f_spam (with pauli_from_device)
    std::optional<DeviceModel> device;

    bool any_noise() const;
};

/// Probability of one uniformly random non-identity Pauli on the gate
/// support (3 choices for 1 qubit, 15 for 2): p = 1 - F.
double pauli_rate_from_fidelity(double fidelity, int support_qubits);

std::size_t apply_crosstalk_event(std::size_t bits, int num_qubits, const CrosstalkModel& model,
                                  RandomStream& rng);
std::string apply_crosstalk_event(const std::string& bits, const CrosstalkModel& model,
                                  RandomStream& rng);

std::size_t apply_detection_error(std::size_t bits, int num_qubits, double p, RandomStream& rng);
std::string apply_detection_error(const std::string& bits, double p, RandomStream& rng);

/// Per-gate Pauli insertion rates for a native circuit under a device model.
std::vector<double> gate_pauli_rates(const Circuit& circuit, const DeviceModel& device);

/// Monte-Carlo trajectory execution: per shot, Pauli insertions after noisy
/// gates, then readout SPAM flips, then crosstalk events, then detection
/// errors. Deterministic given the seed; per-shot streams are derived by
/// hashing so shots may be evaluated in any order.
MeasurementRecord noisy_run(const CompiledCircuit& compiled, const NoiseConfig& config,
                            std::uint64_t shots, std::uint64_t rng_seed);

} // namespace ionbench
