#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionbench/calibration.hpp"
#include "ionbench/compiler.hpp"
#include "ionbench/error.hpp"
#include "ionbench/json_io.hpp"
#include "ionbench/noise.hpp"
#include "ionbench/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ionbench;

namespace {

int default_threads() {
    if (const char* env = std::getenv("IONBENCH_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1U, 8U));
}

NoiseConfig make_noise(const std::string& preset, const std::optional<DeviceModel>& device,
                       int num_qubits, bool exclude_last_qubit) {
    NoiseConfig config;
    if (preset == "none") {
        return config;
    }
    if (preset == "methods-bv" || preset == "methods-hs") {
        CrosstalkModel ct;
        ct.p_event = preset == "methods-bv" ? 0.03 : 0.01;
        ct.mode = preset == "methods-bv" ? CrosstalkMode::ToZero : CrosstalkMode::Either;
        ct.num_applications = preset == "methods-bv" ? 2 : 5;
        const int register_qubits = exclude_last_qubit ? num_qubits - 1 : num_qubits;
        for (int q = 0; q < register_qubits; ++q) {
            ct.applies_to.push_back(q);
        }
        config.crosstalk = ct;
        config.detection_misid = 0.002;
        return config;
    }
    if (preset == "device-pauli") {
        if (!device) {
            throw ConfigError("the device-pauli preset needs --device");
        }
        config.pauli_from_device = true;
        config.device = device;
        return config;
    }
    throw ConfigError("unknown noise preset: " + preset);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_sweep_outputs(const SweepResult& sweep, const SuccessMetrics& metrics,
                         const std::string& preset, std::uint64_t seed, const fs::path& outdir) {
    fs::create_directories(outdir);

    std::ofstream sparse(outdir / "matrix.csv");
    sparse << "oracle_index,output_integer,probability\n";
    std::ofstream dense(outdir / "matrix_dense.csv");
    for (int oracle = 0; oracle < kOracleCount; ++oracle) {
        for (int out = 0; out < kOracleCount; ++out) {
            const double v = sweep.at(oracle, out);
            if (v > 0.0) {
                sparse << oracle << ',' << out << ',' << format_double(v) << '\n';
            }
            dense << (out ? "," : "") << format_double(v);
        }
        dense << '\n';
    }

    json j;
    j["algorithm"] = std::string(to_string(sweep.algorithm));
    j["shots_per_oracle"] = sweep.shots_per_oracle;
    j["seed"] = seed;
    j["noise"] = preset;
    j["conditioned"] = sweep.conditioned;
    j["bit_order"] = "msb_first"; // row/column index = bitstring value, qubit 0 highest bit
    j["average_success"] = metrics.average_success;
    j["bqp_fraction"] = metrics.bqp_fraction;
    j["argmax_correct_count"] = metrics.argmax_correct_count;
    j["invalid_rows"] = metrics.invalid_rows;
    double retained = 0.0;
    for (double r : sweep.retained_fraction) {
        retained += r;
    }
    j["mean_retained_fraction"] = retained / kOracleCount;
    json per = json::array();
    for (int oracle = 0; oracle < kOracleCount; ++oracle) {
        json row;
        row["oracle"] = oracle;
        row["success"] = metrics.per_oracle_success[static_cast<std::size_t>(oracle)];
        row["n_1q"] = sweep.n_1q[static_cast<std::size_t>(oracle)];
        row["n_2q"] = sweep.n_2q[static_cast<std::size_t>(oracle)];
        row["retained_fraction"] = sweep.retained_fraction[static_cast<std::size_t>(oracle)];
        per.push_back(std::move(row));
    }
    j["per_oracle"] = std::move(per);
    write_text_file(outdir / "metrics.json", j.dump(2) + "\n");
}

struct BoxStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    int count = 0;
};

BoxStats box_stats(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
        const double pos = q * (static_cast<double>(values.size()) - 1.0);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    BoxStats b;
    b.min = values.front();
    b.q1 = quantile(0.25);
    b.median = quantile(0.5);
    b.q3 = quantile(0.75);
    b.max = values.back();
    b.count = static_cast<int>(values.size());
    return b;
}

int cmd_compile(const fs::path& input, fs::path output, fs::path counts_path,
                const CompilerOptions& options) {
    const Circuit circuit = load_circuit(input);
    const CompiledCircuit compiled = compile_circuit(circuit, options);
    if (output.empty()) {
        output = input;
        output.replace_extension(".native.json");
    }
    if (counts_path.empty()) {
        counts_path = output;
        counts_path.replace_extension(".counts.json");
    }
    save_circuit(compiled.circuit, output);
    json sidecar;
    sidecar["label"] = compiled.provenance;
    sidecar["n_1q"] = compiled.counts.n_1q;
    sidecar["n_2q"] = compiled.counts.n_2q;
    write_text_file(counts_path, sidecar.dump(2) + "\n");
    std::cout << "compiled " << input.string() << " -> " << output.string() << " (n_1q="
              << compiled.counts.n_1q << ", n_2q=" << compiled.counts.n_2q << ")\n";
    return 0;
}

int cmd_run(const fs::path& input, const std::string& preset, const std::optional<DeviceModel>& device,
            std::uint64_t shots, std::uint64_t seed, const fs::path& output) {
    const Circuit circuit = load_circuit(input);
    const CompiledCircuit compiled = compile_circuit(circuit);
    const NoiseConfig noise = make_noise(preset, device, circuit.num_qubits, preset == "methods-bv");
    const MeasurementRecord record = noisy_run(compiled, noise, shots, seed);
    const std::string text = record_to_json(record);
    if (output.empty()) {
        std::cout << text;
    } else {
        write_text_file(output, text);
    }
    return 0;
}

int cmd_sweep(const std::string& algorithm_name, const std::string& preset,
              const std::optional<DeviceModel>& device, std::uint64_t shots, std::uint64_t seed,
              int threads, const fs::path& outdir) {
    const Algorithm algorithm = algorithm_name == "bv" ? Algorithm::BV : Algorithm::HS;
    SweepOptions options;
    options.shots = shots;
    options.seed = seed;
    options.threads = threads;
    const int total_qubits = algorithm == Algorithm::BV ? kRegisterQubits + 1 : kRegisterQubits;
    options.noise = make_noise(preset, device, total_qubits, algorithm == Algorithm::BV);
    const SweepResult sweep = run_sweep(algorithm, options);
    const SuccessMetrics metrics = success_metrics(sweep);
    write_sweep_outputs(sweep, metrics, preset, seed, outdir);
    std::cout << "sweep " << algorithm_name << ": average_success=" << format_double(metrics.average_success)
              << " bqp_fraction=" << format_double(metrics.bqp_fraction)
              << " argmax_correct=" << metrics.argmax_correct_count << "\n";
    return 0;
}

int cmd_rb(int qubit, bool all_qubits, const DeviceModel& device, std::uint64_t shots,
           int sequences, std::uint64_t seed, const fs::path& outdir) {
    fs::create_directories(outdir);
    std::vector<int> qubits;
    if (all_qubits) {
        for (int q = 0; q < kDeviceQubits; ++q) {
            qubits.push_back(q);
        }
    } else {
        qubits.push_back(qubit);
    }
    std::ofstream csv(outdir / "rb_points.csv");
    csv << "qubit,L,sequence_id,survival\n";
    json summary = json::array();
    double mean_p = 0.0;
    for (int q : qubits) {
        const auto campaign = run_rb_campaign(q, device, kStandardRBLengths, sequences, shots,
                                              derive_seed(seed, static_cast<std::uint64_t>(q)));
        for (const auto& pt : campaign.points) {
            csv << pt.qubit << ',' << pt.length << ',' << pt.sequence_id << ','
                << format_double(pt.survival) << '\n';
        }
        json fit;
        fit["qubit"] = q;
        fit["p"] = campaign.fit.p;
        fit["B"] = campaign.fit.B;
        fit["p_err"] = campaign.fit.p_err;
        fit["B_err"] = campaign.fit.B_err;
        fit["residual"] = campaign.fit.residual;
        write_text_file(outdir / ("rb_q" + std::to_string(q) + ".json"), fit.dump(2) + "\n");
        summary.push_back(fit);
        mean_p += campaign.fit.p;
        std::cout << "rb qubit " << q << ": p=" << format_double(campaign.fit.p)
                  << " spam=" << format_double(campaign.fit.B + 0.5) << "\n";
    }
    mean_p /= static_cast<double>(qubits.size());
    json top;
    top["fits"] = std::move(summary);
    top["mean_p"] = mean_p;
    write_text_file(outdir / "rb_summary.json", top.dump(2) + "\n");
    std::cout << "rb mean p=" << format_double(mean_p) << "\n";
    return 0;
}

int cmd_tomo(const std::string& pair_arg, bool all_pairs, const DeviceModel& device,
             std::uint64_t shots, int phase_count, int chi_sign, std::uint64_t seed,
             const fs::path& outdir) {
    fs::create_directories(outdir);
    std::vector<std::pair<int, int>> pairs;
    if (all_pairs) {
        for (int a = 0; a < kDeviceQubits; ++a) {
            for (int b = a + 1; b < kDeviceQubits; ++b) {
                pairs.emplace_back(a, b);
            }
        }
    } else {
        const auto dash = pair_arg.find('-');
        if (dash == std::string::npos) {
            throw ConfigError("--pair expects i-j");
        }
        pairs.emplace_back(std::stoi(pair_arg.substr(0, dash)), std::stoi(pair_arg.substr(dash + 1)));
    }
    NoiseConfig noise;
    noise.pauli_from_device = true;
    noise.device = device;
    const auto phases = default_parity_phases(phase_count);
    json out;
    out["pairs"] = json::array();
    double mean_f = 0.0;
    for (const auto& pair : pairs) {
        const std::uint64_t pair_seed =
            derive_seed(seed, static_cast<std::uint64_t>(pair.first), static_cast<std::uint64_t>(pair.second));
        const ParityScan scan = parity_scan(pair, chi_sign, noise, phases, shots, pair_seed);
        const auto populations =
            bell_population_measurement(pair, chi_sign, noise, shots, derive_seed(pair_seed, 1));
        const TomographyEstimate est = mle_fidelity(scan, populations, shots);
        json jp;
        jp["pair"] = std::to_string(pair.first) + "-" + std::to_string(pair.second);
        jp["F"] = est.fidelity;
        jp["ci_low"] = est.ci_low;
        jp["ci_high"] = est.ci_high;
        jp["p00"] = est.p00;
        jp["p11"] = est.p11;
        jp["phi"] = est.phi;
        out["pairs"].push_back(std::move(jp));
        mean_f += est.fidelity;
        std::cout << "tomo " << pair.first << "-" << pair.second << ": F="
                  << format_double(est.fidelity) << " [" << format_double(est.ci_low) << ", "
                  << format_double(est.ci_high) << "]\n";
    }
    mean_f /= static_cast<double>(pairs.size());
    out["mean_fidelity"] = mean_f;
    write_text_file(outdir / "tomo.json", out.dump(2) + "\n");
    std::cout << "tomo mean F=" << format_double(mean_f) << "\n";
    return 0;
}

int cmd_report(const fs::path& indir, const std::optional<DeviceModel>& device, const fs::path& outdir) {
    fs::create_directories(outdir);
    const json metrics = json::parse(read_text_file(indir / "metrics.json"));
    const bool is_bv = metrics.at("algorithm").get<std::string>() == "bv";

    std::map<int, std::vector<double>> groups; // n (BV) or m (HS) -> successes
    for (const auto& row : metrics.at("per_oracle")) {
        const int key = is_bv ? row.at("n_2q").get<int>() : row.at("n_1q").get<int>();
        groups[key].push_back(row.at("success").get<double>());
    }
    std::ofstream box(outdir / "boxplots.csv");
    box << (is_bv ? "n" : "m") << ",min,q1,median,q3,max,count\n";
    for (const auto& [key, values] : groups) {
        const BoxStats b = box_stats(values);
        box << key << ',' << format_double(b.min) << ',' << format_double(b.q1) << ','
            << format_double(b.median) << ',' << format_double(b.q3) << ',' << format_double(b.max)
            << ',' << b.count << '\n';
    }

    if (device) {
        double f1_min = 1.0, f1_max = 0.0, fs_min = 1.0, fs_max = 0.0;
        for (int q = 0; q < kDeviceQubits; ++q) {
            f1_min = std::min(f1_min, device->f_1q[static_cast<std::size_t>(q)]);
            f1_max = std::max(f1_max, device->f_1q[static_cast<std::size_t>(q)]);
            fs_min = std::min(fs_min, device->f_spam[static_cast<std::size_t>(q)]);
            fs_max = std::max(fs_max, device->f_spam[static_cast<std::size_t>(q)]);
        }
        const Algorithm algorithm = is_bv ? Algorithm::BV : Algorithm::HS;
        std::ofstream env(outdir / "envelope.csv");
        env << (is_bv ? "n" : "m") << ",envelope_worst,envelope_avg,envelope_best\n";
        std::vector<int> keys;
        if (is_bv) {
            for (int n = 0; n <= 10; ++n) keys.push_back(n);
        } else {
            for (const auto& [key, values] : groups) keys.push_back(key);
        }
        for (int key : keys) {
            const double worst = expected_envelope(algorithm, key, device->min_f_2q(), f1_min, fs_min);
            const double avg = expected_envelope(algorithm, key, device->mean_f_2q(),
                                                 device->mean_f_1q(), device->mean_f_spam());
            const double best = expected_envelope(algorithm, key, device->max_f_2q(), f1_max, fs_max);
            env << key << ',' << format_double(worst) << ',' << format_double(avg) << ','
                << format_double(best) << '\n';
        }
    }

    // heatmap passthrough for plotting tools
    if (fs::exists(indir / "matrix_dense.csv")) {
        fs::copy_file(indir / "matrix_dense.csv", outdir / "heatmap.csv",
                      fs::copy_options::overwrite_existing);
    }
    std::cout << "report written to " << outdir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trapped-ion benchmark harness: native-gate compilation, oracle sweeps, "
                 "noise models, and calibration analyses"};
    app.require_subcommand(1);

    std::string input, output, counts_file, preset = "none", device_path, algorithm, pair_arg;
    std::uint64_t shots = 500;
    std::uint64_t seed = 0;
    int threads = default_threads();
    int qubit = 0;
    bool all_qubits = false, all_pairs = false;
    int sequences = 24;
    int phase_count = 12;
    int chi_sign = +1;
    std::string outdir = "out";
    CompilerOptions copts;
    bool no_merge = false, physical_rz = false, check = false;

    auto* compile_cmd = app.add_subcommand("compile", "lower a circuit JSON to the native gate set");
    compile_cmd->add_option("--in", input, "input circuit JSON")->required();
    compile_cmd->add_option("--out", output, "output circuit JSON");
    compile_cmd->add_option("--counts", counts_file, "counts sidecar path");
    compile_cmd->add_flag("--no-merge", no_merge, "disable peephole merging");
    compile_cmd->add_flag("--physical-rz", physical_rz, "count RZ as physical gates");
    compile_cmd->add_flag("--check", check, "verify unitary equivalence of every rewrite");

    auto* run_cmd = app.add_subcommand("run", "compile and execute one circuit");
    run_cmd->add_option("--in", input, "input circuit JSON")->required();
    run_cmd->add_option("--shots", shots, "shots")->required();
    run_cmd->add_option("--seed", seed, "rng seed")->required();
    run_cmd->add_option("--noise", preset, "none | methods-bv | methods-hs | device-pauli");
    run_cmd->add_option("--device", device_path, "device model JSON");
    run_cmd->add_option("--out", output, "output record JSON (stdout if omitted)");

    auto* sweep_cmd = app.add_subcommand("sweep", "run all 1024 oracles of bv or hs");
    sweep_cmd->add_option("algorithm", algorithm, "bv | hs")->required()
        ->check(CLI::IsMember({"bv", "hs"}));
    sweep_cmd->add_option("--noise", preset, "none | methods-bv | methods-hs | device-pauli");
    sweep_cmd->add_option("--shots", shots, "shots per oracle")->required();
    sweep_cmd->add_option("--seed", seed, "rng seed")->required();
    sweep_cmd->add_option("--device", device_path, "device model JSON");
    sweep_cmd->add_option("--threads", threads, "worker threads (env IONBENCH_THREADS)");
    sweep_cmd->add_option("--out", outdir, "output directory");

    auto* rb_cmd = app.add_subcommand("rb", "randomized benchmarking campaign");
    auto* rb_qubit = rb_cmd->add_option("--qubit", qubit, "qubit index");
    rb_cmd->add_flag("--all", all_qubits, "run every qubit")->excludes(rb_qubit);
    rb_cmd->add_option("--device", device_path, "device model JSON")->required();
    rb_cmd->add_option("--shots", shots, "shots per sequence");
    rb_cmd->add_option("--sequences", sequences, "sequences per length");
    rb_cmd->add_option("--seed", seed, "rng seed")->required();
    rb_cmd->add_option("--out", outdir, "output directory");

    auto* tomo_cmd = app.add_subcommand("tomo", "Bell-state partial tomography");
    auto* tomo_pair = tomo_cmd->add_option("--pair", pair_arg, "qubit pair i-j");
    tomo_cmd->add_flag("--all-pairs", all_pairs, "run every pair")->excludes(tomo_pair);
    tomo_cmd->add_option("--device", device_path, "device model JSON")->required();
    tomo_cmd->add_option("--shots", shots, "shots per phase point");
    tomo_cmd->add_option("--phases", phase_count, "phase points per scan");
    tomo_cmd->add_option("--chi-sign", chi_sign, "entangling phase sign (+1/-1)");
    tomo_cmd->add_option("--seed", seed, "rng seed")->required();
    tomo_cmd->add_option("--out", outdir, "output directory");

    auto* report_cmd = app.add_subcommand("report", "plot-ready tables from sweep outputs");
    report_cmd->add_option("--in", input, "sweep output directory")->required();
    report_cmd->add_option("--device", device_path, "device model JSON (for envelopes)");
    report_cmd->add_option("--out", outdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::optional<DeviceModel> device;
        if (!device_path.empty()) {
            device = load_device_model(device_path);
        }
        copts.enable_merge = !no_merge;
        copts.enable_rz_virtualization = !physical_rz;
        copts.equivalence_check = check;

        if (compile_cmd->parsed()) {
            return cmd_compile(input, output, counts_file, copts);
        }
        if (run_cmd->parsed()) {
            return cmd_run(input, preset, device, shots, seed, output);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(algorithm, preset, device, shots, seed, threads, outdir);
        }
        if (rb_cmd->parsed()) {
            if (!all_qubits && rb_qubit->count() == 0) {
                throw ConfigError("rb needs --qubit or --all");
            }
            return cmd_rb(qubit, all_qubits, *device, shots, sequences, seed, outdir);
        }
        if (tomo_cmd->parsed()) {
            if (!all_pairs && tomo_pair->count() == 0) {
                throw ConfigError("tomo needs --pair or --all-pairs");
            }
            return cmd_tomo(pair_arg, all_pairs, *device, shots, phase_count, chi_sign, seed, outdir);
        }
        if (report_cmd->parsed()) {
            return cmd_report(input, device, outdir);
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
