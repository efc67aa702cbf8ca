#include "ionbench/noise.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ionbench/error.hpp"
#include "ionbench/json_io.hpp"

namespace ionbench {

using nlohmann::json;

namespace {

void check_fidelity(double f, const std::string& what) {
    if (!(f > 0.0) || f > 1.0) {
        throw ValidationError("fidelity outside (0,1] for " + what);
    }
}

} // namespace

double DeviceModel::f_2q_for(int a, int b) const {
    if (a == b) {
        throw ValidationError("pair fidelity needs two distinct qubits");
    }
    const auto key = std::minmax(a, b);
    const auto it = f_2q.find({key.first, key.second});
    if (it == f_2q.end()) {
        throw SchemaError("device model has no entry for pair " + std::to_string(key.first) + "-" +
                          std::to_string(key.second));
    }
    return it->second;
}

double DeviceModel::mean_f_1q() const {
    double s = 0.0;
    for (double f : f_1q) s += f;
    return s / kDeviceQubits;
}

double DeviceModel::mean_f_spam() const {
    double s = 0.0;
    for (double f : f_spam) s += f;
    return s / kDeviceQubits;
}

double DeviceModel::mean_f_2q() const {
    double s = 0.0;
    for (const auto& [k, f] : f_2q) s += f;
    return s / static_cast<double>(f_2q.size());
}

double DeviceModel::min_f_2q() const {
    double m = 1.0;
    for (const auto& [k, f] : f_2q) m = std::min(m, f);
    return m;
}

double DeviceModel::max_f_2q() const {
    double m = 0.0;
    for (const auto& [k, f] : f_2q) m = std::max(m, f);
    return m;
}

void DeviceModel::validate() const {
    for (int q = 0; q < kDeviceQubits; ++q) {
        check_fidelity(f_1q[static_cast<std::size_t>(q)], "f_1q[" + std::to_string(q) + "]");
        check_fidelity(f_spam[static_cast<std::size_t>(q)], "f_spam[" + std::to_string(q) + "]");
    }
    const std::size_t expected = kDeviceQubits * (kDeviceQubits - 1) / 2;
    if (f_2q.size() != expected) {
        throw SchemaError("device model must list all " + std::to_string(expected) + " qubit pairs");
    }
    for (const auto& [key, f] : f_2q) {
        if (key.first < 0 || key.second >= kDeviceQubits || key.first >= key.second) {
            throw SchemaError("bad pair key in device model");
        }
        check_fidelity(f, "f_2q[" + std::to_string(key.first) + "-" + std::to_string(key.second) + "]");
    }
    check_fidelity(f_detect, "f_detect");
}

DeviceModel DeviceModel::uniform(double f2q, double f1q, double fspam, double fdetect) {
    DeviceModel m;
    m.f_1q.fill(f1q);
    m.f_spam.fill(fspam);
    for (int a = 0; a < kDeviceQubits; ++a) {
        for (int b = a + 1; b < kDeviceQubits; ++b) {
            m.f_2q[{a, b}] = f2q;
        }
    }
    m.f_detect = fdetect;
    m.validate();
    return m;
}

DeviceModel device_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("device model parse error: ") + e.what());
    }
    DeviceModel m;
    try {
        const auto& j1 = j.at("f_1q");
        const auto& js = j.at("f_spam");
        if (j1.size() != kDeviceQubits || js.size() != kDeviceQubits) {
            throw SchemaError("device model needs 11 per-qubit fidelities");
        }
        for (int q = 0; q < kDeviceQubits; ++q) {
            m.f_1q[static_cast<std::size_t>(q)] = j1[static_cast<std::size_t>(q)].get<double>();
            m.f_spam[static_cast<std::size_t>(q)] = js[static_cast<std::size_t>(q)].get<double>();
        }
        for (const auto& [key, val] : j.at("f_2q").items()) {
            const auto dash = key.find('-');
            if (dash == std::string::npos) {
                throw SchemaError("pair keys must look like \"i-j\"");
            }
            const int a = std::stoi(key.substr(0, dash));
            const int b = std::stoi(key.substr(dash + 1));
            m.f_2q[std::minmax(a, b)] = val.get<double>();
        }
        m.f_detect = j.at("f_detect").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("device model schema error: ") + e.what());
    }
    m.validate();
    return m;
}

DeviceModel load_device_model(const std::filesystem::path& path) {
    return device_model_from_json(read_text_file(path));
}

std::string device_model_to_json(const DeviceModel& model) {
    json j;
    j["f_1q"] = model.f_1q;
    j["f_spam"] = model.f_spam;
    j["f_2q"] = json::object();
    for (const auto& [key, f] : model.f_2q) {
        j["f_2q"][std::to_string(key.first) + "-" + std::to_string(key.second)] = f;
    }
    j["f_detect"] = model.f_detect;
    return j.dump(2) + "\n";
}

bool NoiseConfig::any_noise() const {
    return (crosstalk && crosstalk->p_event > 0.0 && crosstalk->num_applications > 0) ||
           detection_misid > 0.0 || pauli_from_device;
}

double pauli_rate_from_fidelity(double fidelity, int support_qubits) {
    if (!(fidelity > 0.0) || fidelity > 1.0) {
        throw ValidationError("fidelity must lie in (0,1]");
    }
    if (support_qubits != 1 && support_qubits != 2) {
        throw ValidationError("gate support must be 1 or 2 qubits");
    }
    return 1.0 - fidelity;
}

std::size_t apply_crosstalk_event(std::size_t bits, int num_qubits, const CrosstalkModel& model,
                                  RandomStream& rng) {
    if (model.p_event < 0.0 || model.p_event > 1.0) {
        throw ValidationError("crosstalk probability must lie in [0,1]");
    }
    if (model.applies_to.empty()) {
        if (model.p_event > 0.0) {
            throw ConfigError("crosstalk with nonzero probability needs target qubits");
        }
        return bits;
    }
    const auto corrupt = [&](std::size_t value, int qubit) {
        if (qubit < 0 || qubit >= num_qubits) {
            throw ConfigError("crosstalk target outside register");
        }
        const std::size_t mask = std::size_t{1} << (num_qubits - 1 - qubit);
        return model.mode == CrosstalkMode::ToZero ? value & ~mask : value ^ mask;
    };
    if (model.per_qubit_rate) {
        for (int q : model.applies_to) {
            if (rng.bernoulli(model.p_event)) {
                bits = corrupt(bits, q);
            }
        }
        return bits;
    }
    if (!rng.bernoulli(model.p_event)) {
        return bits;
    }
    return corrupt(bits, model.applies_to[rng.uniform_int(model.applies_to.size())]);
}

std::string apply_crosstalk_event(const std::string& bits, const CrosstalkModel& model,
                                  RandomStream& rng) {
    const int n = static_cast<int>(bits.size());
    const std::size_t out = apply_crosstalk_event(bitstring_to_basis(bits), n, model, rng);
    return basis_to_bitstring(out, n);
}

std::size_t apply_detection_error(std::size_t bits, int num_qubits, double p, RandomStream& rng) {
    if (p < 0.0 || p > 1.0) {
        throw ValidationError("detection probability must lie in [0,1]");
    }
    for (int q = 0; q < num_qubits; ++q) {
        if (rng.bernoulli(p)) {
            bits ^= std::size_t{1} << (num_qubits - 1 - q);
        }
    }
    return bits;
}

std::string apply_detection_error(const std::string& bits, double p, RandomStream& rng) {
    const int n = static_cast<int>(bits.size());
    return basis_to_bitstring(apply_detection_error(bitstring_to_basis(bits), n, p, rng), n);
}

std::vector<double> gate_pauli_rates(const Circuit& circuit, const DeviceModel& device) {
    std::vector<double> rates;
    rates.reserve(circuit.gates.size());
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
        case GateKind::R:
            rates.push_back(pauli_rate_from_fidelity(device.f_1q[static_cast<std::size_t>(g.targets[0])], 1));
            break;
        case GateKind::RZ:
            rates.push_back(0.0); // frame rotation, no pulse
            break;
        case GateKind::XX:
            rates.push_back(pauli_rate_from_fidelity(device.f_2q_for(g.targets[0], g.targets[1]), 2));
            break;
        default:
            throw ConfigError("device noise model requires a native-only circuit");
        }
    }
    return rates;
}

namespace {

void insert_pauli(StateVector& state, const Gate& gate, int pauli_index) {
    if (!gate.is_two_qubit()) {
        state.apply_pauli(gate.targets[0], pauli_index % 3);
        return;
    }
    // 15 non-identity two-qubit Paulis: index -> (p0, p1) in {I,X,Y,Z}^2 \ {II}
    const int code = pauli_index % 15 + 1;
    const int p0 = code / 4;
    const int p1 = code % 4;
    if (p0 != 0) {
        state.apply_pauli(gate.targets[0], p0 - 1);
    }
    if (p1 != 0) {
        state.apply_pauli(gate.targets[1], p1 - 1);
    }
}

} // namespace

MeasurementRecord noisy_run(const CompiledCircuit& compiled, const NoiseConfig& config,
                            std::uint64_t shots, std::uint64_t rng_seed) {
    if (shots == 0) {
        throw ValidationError("noisy_run requires at least one shot");
    }
    const Circuit& circuit = compiled.circuit;
    if (config.pauli_from_device) {
        if (!config.device) {
            throw ConfigError("pauli_from_device set but no device model given");
        }
        if (!circuit.native_only()) {
            throw ConfigError("device noise model requires a native-only circuit");
        }
    }
    if (config.crosstalk) {
        for (int q : config.crosstalk->applies_to) {
            if (q < 0 || q >= circuit.num_qubits) {
                throw ConfigError("crosstalk target outside register");
            }
        }
    }

    const int n = circuit.num_qubits;
    std::vector<double> rates(circuit.gates.size(), 0.0);
    std::vector<double> spam_flip(static_cast<std::size_t>(n), 0.0);
    if (config.pauli_from_device) {
        rates = gate_pauli_rates(circuit, *config.device);
        if (config.spam_from_device) {
            for (int q = 0; q < n && q < kDeviceQubits; ++q) {
                spam_flip[static_cast<std::size_t>(q)] =
                    1.0 - config.device->f_spam[static_cast<std::size_t>(q)];
            }
        }
    }
    bool gate_noise = false;
    for (double r : rates) {
        gate_noise = gate_noise || r > 0.0;
    }

    // noiseless prefix states; trajectories restart at their first insertion
    std::vector<StateVector> prefix;
    prefix.reserve(circuit.gates.size() + 1);
    prefix.emplace_back(n);
    for (const auto& g : circuit.gates) {
        StateVector next = prefix.back();
        next.apply(g);
        prefix.push_back(std::move(next));
    }
    const std::vector<double> clean_cdf = cumulative_probabilities(prefix.back());

    MeasurementRecord rec;
    rec.num_qubits = n;
    rec.shots = shots;
    std::map<std::size_t, std::uint64_t> counts;

    std::vector<std::pair<std::size_t, int>> insertions; // (gate index, pauli choice)
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        RandomStream rng(derive_seed(rng_seed, shot));
        insertions.clear();
        if (gate_noise) {
            for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
                if (rates[gi] > 0.0 && rng.bernoulli(rates[gi])) {
                    const int choices = circuit.gates[gi].is_two_qubit() ? 15 : 3;
                    insertions.emplace_back(gi, static_cast<int>(rng.uniform_int(choices)));
                }
            }
        }

        std::size_t outcome;
        if (insertions.empty()) {
            outcome = sample_index(clean_cdf, rng);
        } else {
            StateVector state = prefix[insertions.front().first];
            std::size_t next_insert = 0;
            for (std::size_t gi = insertions.front().first; gi < circuit.gates.size(); ++gi) {
                state.apply(circuit.gates[gi]);
                if (next_insert < insertions.size() && insertions[next_insert].first == gi) {
                    insert_pauli(state, circuit.gates[gi], insertions[next_insert].second);
                    ++next_insert;
                }
            }
            const auto cdf = cumulative_probabilities(state);
            outcome = sample_index(cdf, rng);
        }

        for (int q = 0; q < n; ++q) {
            if (spam_flip[static_cast<std::size_t>(q)] > 0.0 &&
                rng.bernoulli(spam_flip[static_cast<std::size_t>(q)])) {
                outcome ^= std::size_t{1} << (n - 1 - q);
            }
        }
        if (config.crosstalk) {
            for (int k = 0; k < config.crosstalk->num_applications; ++k) {
                outcome = apply_crosstalk_event(outcome, n, *config.crosstalk, rng);
            }
        }
        if (config.detection_misid > 0.0) {
            outcome = apply_detection_error(outcome, n, config.detection_misid, rng);
        }
        ++counts[outcome];
    }

    for (const auto& [basis, c] : counts) {
        rec.counts[basis_to_bitstring(basis, n)] = c;
    }
    return rec;
}

} // namespace ionbench
