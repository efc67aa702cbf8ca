#include "ionbench/oracles.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "ionbench/error.hpp"

namespace ionbench {

std::string_view to_string(Algorithm a) {
    return a == Algorithm::BV ? "bv" : "hs";
}

namespace {

void check_oracle_value(std::uint32_t v, const char* name) {
    if (v >= kOracleCount) {
        throw ValidationError(std::string(name) + " must fit in 10 bits");
    }
}

int bit_at(std::uint64_t value, int index, int width) {
    return static_cast<int>((value >> (width - 1 - index)) & 1U);
}

} // namespace

BVOracle::BVOracle(std::uint32_t value) : c(value) {
    check_oracle_value(value, "hidden bit string");
}

std::string BVOracle::bits() const {
    return basis_to_bitstring(c, kRegisterQubits);
}

HSOracle::HSOracle(std::uint32_t value) : s(value) {
    check_oracle_value(value, "hidden shift");
}

std::string HSOracle::bits() const {
    return basis_to_bitstring(s, kRegisterQubits);
}

Circuit build_bv_circuit(std::uint64_t c, int register_size) {
    if (register_size < 1) {
        throw ValidationError("register must have at least one qubit");
    }
    const int ancilla = register_size;
    Circuit circuit(register_size + 1, basis_to_bitstring(c, register_size));
    // ancilla into |->
    circuit.append(Gate::x(ancilla));
    circuit.append(Gate::h(ancilla));
    for (int q = 0; q < register_size; ++q) {
        circuit.append(Gate::h(q));
    }
    for (int q = 0; q < register_size; ++q) {
        if (bit_at(c, q, register_size)) {
            circuit.append(Gate::cnot(q, ancilla));
        }
    }
    for (int q = 0; q < register_size; ++q) {
        circuit.append(Gate::h(q));
    }
    // returns the ancilla to |1>, making its ideal value deterministic
    circuit.append(Gate::h(ancilla));
    return circuit;
}

Circuit build_bv_circuit(const BVOracle& oracle) {
    return build_bv_circuit(oracle.c, kRegisterQubits);
}

Circuit build_hs_circuit(std::uint64_t s, int register_size) {
    if (register_size < 2 || register_size % 2 != 0) {
        throw ValidationError("hidden-shift register size must be even");
    }
    Circuit circuit(register_size, basis_to_bitstring(s, register_size));
    const auto h_layer = [&] {
        for (int q = 0; q < register_size; ++q) {
            circuit.append(Gate::h(q));
        }
    };
    h_layer();
    // shifted oracle g(x) = f(x+s): the cross terms of the expansion become
    // Z gates on the partner qubit; the constant term is a global phase
    for (int p = 0; p < register_size; p += 2) {
        circuit.append(Gate::cz(p, p + 1));
        if (bit_at(s, p + 1, register_size)) {
            circuit.append(Gate::z(p));
        }
        if (bit_at(s, p, register_size)) {
            circuit.append(Gate::z(p + 1));
        }
    }
    h_layer();
    // the inner-product bent function is self-dual
    for (int p = 0; p < register_size; p += 2) {
        circuit.append(Gate::cz(p, p + 1));
    }
    h_layer();
    return circuit;
}

Circuit build_hs_circuit(const HSOracle& oracle) {
    return build_hs_circuit(oracle.s, kRegisterQubits);
}

std::pair<MeasurementRecord, double> condition_on_ancilla(const MeasurementRecord& record,
                                                          int ideal_ancilla) {
    if (record.num_qubits < 2) {
        throw ValidationError("conditioning needs a register plus an ancilla");
    }
    if (ideal_ancilla != 0 && ideal_ancilla != 1) {
        throw ValidationError("ancilla value must be 0 or 1");
    }
    const char keep = ideal_ancilla ? '1' : '0';
    MeasurementRecord out;
    out.num_qubits = record.num_qubits - 1;
    std::uint64_t kept = 0;
    for (const auto& [bits, n] : record.counts) {
        if (bits.back() == keep) {
            out.counts[bits.substr(0, bits.size() - 1)] += n;
            kept += n;
        }
    }
    out.shots = kept;
    const double retained = record.shots ? static_cast<double>(kept) / static_cast<double>(record.shots) : 0.0;
    if (kept == 0) {
        throw ConditioningError("no shots survived ancilla conditioning");
    }
    return {std::move(out), retained};
}

int ideal_ancilla_value(const CompiledCircuit& compiled) {
    const Circuit& circuit = compiled.circuit;
    const StateVector final_state = run_circuit(circuit, StateVector(circuit.num_qubits));
    const int ancilla = circuit.num_qubits - 1;
    double p1 = 0.0;
    for (std::size_t i = 0; i < final_state.dim(); ++i) {
        if (bit_of(i, ancilla, circuit.num_qubits)) {
            p1 += final_state.probability(i);
        }
    }
    if (p1 > 1e-9 && p1 < 1.0 - 1e-9) {
        throw ValidationError("ancilla has no deterministic noiseless value");
    }
    return p1 > 0.5 ? 1 : 0;
}

namespace {

void run_one_oracle(Algorithm algorithm, int oracle, const SweepOptions& options, SweepResult& result) {
    const Circuit circuit = algorithm == Algorithm::BV
                                ? build_bv_circuit(BVOracle(static_cast<std::uint32_t>(oracle)))
                                : build_hs_circuit(HSOracle(static_cast<std::uint32_t>(oracle)));
    const CompiledCircuit compiled = compile_circuit(circuit, options.compiler);
    result.n_1q[static_cast<std::size_t>(oracle)] = compiled.counts.n_1q;
    result.n_2q[static_cast<std::size_t>(oracle)] = compiled.counts.n_2q;

    MeasurementRecord record =
        noisy_run(compiled, options.noise, options.shots, derive_seed(options.seed, static_cast<std::uint64_t>(oracle)));
    double retained = 1.0;
    if (algorithm == Algorithm::BV) {
        auto [conditioned, frac] = condition_on_ancilla(record, ideal_ancilla_value(compiled));
        record = std::move(conditioned);
        retained = frac;
    }
    result.retained_fraction[static_cast<std::size_t>(oracle)] = retained;

    double* row = result.process_matrix.data() + static_cast<std::size_t>(oracle) * kOracleCount;
    const double total = static_cast<double>(record.shots);
    for (const auto& [bits, n] : record.counts) {
        row[bitstring_to_basis(bits)] += static_cast<double>(n) / total;
    }
    result.row_valid[static_cast<std::size_t>(oracle)] = 1;
}

} // namespace

SweepResult run_sweep(Algorithm algorithm, const SweepOptions& options) {
    if (options.shots == 0) {
        throw ValidationError("sweep requires at least one shot per oracle");
    }
    SweepResult result;
    result.algorithm = algorithm;
    result.shots_per_oracle = options.shots;
    result.conditioned = algorithm == Algorithm::BV;
    result.process_matrix.assign(static_cast<std::size_t>(kOracleCount) * kOracleCount, 0.0);
    result.retained_fraction.assign(kOracleCount, 0.0);
    result.row_valid.assign(kOracleCount, 0);
    result.n_1q.assign(kOracleCount, 0);
    result.n_2q.assign(kOracleCount, 0);

    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        for (int oracle = 0; oracle < kOracleCount; ++oracle) {
            try {
                run_one_oracle(algorithm, oracle, options, result);
            } catch (const ConditioningError&) {
                result.row_valid[static_cast<std::size_t>(oracle)] = 0;
            }
        }
        return result;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int oracle = next.fetch_add(1);
            if (oracle >= kOracleCount || failed.load()) {
                return;
            }
            try {
                run_one_oracle(algorithm, oracle, options, result);
            } catch (const ConditioningError&) {
                result.row_valid[static_cast<std::size_t>(oracle)] = 0;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return result;
}

SuccessMetrics success_metrics(const SweepResult& sweep) {
    SuccessMetrics metrics;
    metrics.per_oracle_success.assign(kOracleCount, 0.0);
    int valid = 0;
    double sum = 0.0;
    int above_bqp = 0;
    int argmax_hits = 0;
    for (int oracle = 0; oracle < kOracleCount; ++oracle) {
        if (!sweep.row_valid[static_cast<std::size_t>(oracle)]) {
            metrics.invalid_rows.push_back(oracle);
            continue;
        }
        ++valid;
        const double p = sweep.at(oracle, oracle);
        metrics.per_oracle_success[static_cast<std::size_t>(oracle)] = p;
        sum += p;
        if (p > 2.0 / 3.0) {
            ++above_bqp;
        }
        double best = -1.0;
        int best_count = 0;
        int best_index = -1;
        for (int out = 0; out < kOracleCount; ++out) {
            const double v = sweep.at(oracle, out);
            if (v > best) {
                best = v;
                best_count = 1;
                best_index = out;
            } else if (v == best) {
                ++best_count;
            }
        }
        if (best_count == 1 && best_index == oracle) {
            ++argmax_hits;
        }
    }
    if (valid == 0) {
        throw ValidationError("sweep has no valid rows");
    }
    metrics.average_success = sum / valid;
    metrics.bqp_fraction = static_cast<double>(above_bqp) / valid;
    metrics.argmax_correct_count = argmax_hits;
    return metrics;
}

double expected_envelope(Algorithm algorithm, int n_or_m, double f_2q, double f_1q, double f_spam) {
    if (n_or_m < 0) {
        throw ValidationError("gate count must be nonnegative");
    }
    for (double f : {f_2q, f_1q, f_spam}) {
        if (!(f > 0.0) || f > 1.0) {
            throw ValidationError("fidelities must lie in (0,1]");
        }
    }
    if (algorithm == Algorithm::BV) {
        return std::pow(f_2q, n_or_m) * std::pow(f_1q, 2.0 * (n_or_m + 1)) * std::pow(f_spam, 10.0);
    }
    return std::pow(f_2q, 10.0) * std::pow(f_1q, n_or_m) * std::pow(f_spam, 10.0);
}

} // namespace ionbench
