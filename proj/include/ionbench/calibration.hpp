#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ionbench/circuit.hpp"
#include "ionbench/noise.hpp"
#include "ionbench/rng.hpp"

namespace ionbench {

/// One randomized-benchmarking sequence: L randomized pi/2 segments (each
/// optionally followed by a pi frame rotation) plus a closing gate that puts
/// the noiseless state into the computational basis.
struct RBSequence {
    int length = 0;
    Circuit circuit; // single-qubit, native gates
    int expected_outcome = 0;
    std::vector<std::size_t> noisy_slots; // gate indices carrying per-segment noise
};

RBSequence generate_rb_sequence(int length, RandomStream& rng);

/// Parameters of survival = B * p^L + 1/2 with their standard errors.
struct PowerLawFit {
    double p = 1.0;
    double B = 0.5;
    double p_err = 0.0;
    double B_err = 0.0;
    double residual = 0.0;
};

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

struct RBPoint {
    int qubit = 0;
    int length = 0;
    int sequence_id = 0;
    double survival = 0.0;
};

struct RBCampaignResult {
    std::vector<RBPoint> points;
    PowerLawFit fit;
};

inline constexpr std::array<int, 6> kStandardRBLengths{2, 4, 6, 8, 10, 12};

/// Runs RB sequences for one qubit with per-segment Pauli noise derived from
/// the device's gate fidelity and readout flips from its SPAM fidelity. The
/// fitted base estimates the injected gate fidelity.
RBCampaignResult run_rb_campaign(int qubit, const DeviceModel& device, std::span<const int> lengths,
                                 int seqs_per_length, std::uint64_t shots, std::uint64_t seed);

/// Joint populations of a qubit pair versus the analysis pulse phase.
struct ParityScan {
    std::vector<double> phases;
    std::vector<std::array<double, 4>> populations; // (P00, P01, P10, P11) per phase
    std::uint64_t shots_per_phase = 0;
};

std::vector<double> default_parity_phases(int count = 12);

/// Bell-state preparation (XX at chi = sign * pi/4) followed by R(pi/2, phi)
/// analysis pulses on both qubits; xx_pauli_rate is the per-shot probability
/// of one uniformly random two-qubit Pauli after the entangler.
ParityScan parity_scan_with_rate(int chi_sign, double xx_pauli_rate,
                                 std::span<const double> phases, std::uint64_t shots,
                                 std::uint64_t seed, double detection_misid = 0.0);

/// Device-driven scan for a qubit pair. The pair fidelity is converted to a
/// Pauli rate that reproduces it as the prepared Bell-state overlap.
ParityScan parity_scan(std::pair<int, int> pair, int chi_sign, const NoiseConfig& noise,
                       std::span<const double> phases, std::uint64_t shots, std::uint64_t seed);

/// Uniform-Pauli rate whose depolarized Bell state has overlap fidelity f.
double bell_pauli_rate(double fidelity);

/// Joint populations of the bare Bell state (no analysis pulse).
std::array<double, 4> bell_population_measurement(std::pair<int, int> pair, int chi_sign,
                                                  const NoiseConfig& noise, std::uint64_t shots,
                                                  std::uint64_t seed);
std::array<double, 4> bell_population_measurement_with_rate(int chi_sign, double xx_pauli_rate,
                                                            std::uint64_t shots, std::uint64_t seed,
                                                            double detection_misid = 0.0);

struct TomographyEstimate {
    double p00 = 0.0;
    double p11 = 0.0;
    double phi = 0.0;       // parity oscillation amplitude
    double delta = 0.0;     // parity phase offset
    double fidelity = 0.0;  // (p00 + p11 + phi) / 2
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Multinomial MLE over (P00, P11, Phi, delta) with parity model
/// Phi*cos(2 phase + delta); the confidence interval comes from the profile
/// likelihood of F at ci_sigma standard deviations.
TomographyEstimate mle_fidelity(const ParityScan& scan,
                                const std::array<double, 4>& population_fractions,
                                std::uint64_t population_shots, double ci_sigma = 2.0);

/// Log-likelihood of the scan + population data at given parameters; exposed
/// so fits can be compared against naive moment estimates.
double tomography_log_likelihood(const ParityScan& scan,
                                 const std::array<double, 4>& population_fractions,
                                 std::uint64_t population_shots, double p00, double p11, double phi,
                                 double delta);

/// Moment-based starting estimates (P00, P11, Phi, delta).
std::array<double, 4> naive_tomography_estimate(const ParityScan& scan,
                                                const std::array<double, 4>& population_fractions);

} // namespace ionbench
