#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "ionbench/json_io.hpp"
#include "ionbench/noise.hpp"
#include "ionbench/oracles.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IONBENCH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (WIFEXITED(status)) {
        return WEXITSTATUS(status);
    }
    return -1;
}

std::string slurp(const fs::path& path) {
    return ionbench::read_text_file(path);
}

const fs::path kWork = fs::temp_directory_path() / "ionbench_cli_test";
const std::string kDevice = std::string(IONBENCH_DATA_DIR) + "/device11.json";

struct WorkDir {
    WorkDir() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
};

const WorkDir kSetup{};

} // namespace

TEST_CASE("compile subcommand") {
    const fs::path circuit = kWork / "bell.json";
    ionbench::write_text_file(circuit, R"({
      "num_qubits": 2,
      "gates": [
        {"kind": "H", "targets": [0], "params": []},
        {"kind": "CNOT", "targets": [0, 1], "params": []}
      ],
      "label": "bell"
    })");
    const fs::path out = kWork / "bell.native.json";
    const fs::path counts = kWork / "bell.counts.json";
    REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + out.string() +
                    " --counts " + counts.string() + " --check") == 0);
    const auto compiled = ionbench::load_circuit(out);
    CHECK(compiled.native_only());
    const std::string sidecar = slurp(counts);
    CHECK(sidecar.find("\"n_2q\": 1") != std::string::npos);
    CHECK(sidecar.find("\"label\": \"bell\"") != std::string::npos);

    SUBCASE("malformed JSON exits with code 2") {
        const fs::path bad = kWork / "bad.json";
        ionbench::write_text_file(bad, "{\"num_qubits\": 2, \"gates\": [");
        CHECK(run_cli("compile --in " + bad.string()) == 2);
    }
    SUBCASE("missing file exits with code 2") {
        CHECK(run_cli("compile --in " + (kWork / "nope.json").string()) == 2);
    }
    SUBCASE("usage errors exit with code 2") {
        CHECK(run_cli("compile") == 2);
        CHECK(run_cli("frobnicate") == 2);
    }
}

TEST_CASE("run subcommand is seeded and deterministic") {
    const fs::path circuit = kWork / "ghz.json";
    ionbench::write_text_file(circuit, R"({
      "num_qubits": 3,
      "gates": [
        {"kind": "H", "targets": [0], "params": []},
        {"kind": "CNOT", "targets": [0, 1], "params": []},
        {"kind": "CNOT", "targets": [1, 2], "params": []}
      ],
      "label": "ghz"
    })");
    const fs::path rec1 = kWork / "rec1.json";
    const fs::path rec2 = kWork / "rec2.json";
    REQUIRE(run_cli("run --in " + circuit.string() + " --shots 400 --seed 5 --out " + rec1.string()) == 0);
    REQUIRE(run_cli("run --in " + circuit.string() + " --shots 400 --seed 5 --out " + rec2.string()) == 0);
    CHECK(slurp(rec1) == slurp(rec2));
    const auto record = ionbench::record_from_json(slurp(rec1));
    CHECK(record.shots == 400);
    CHECK(record.counts.at("000") + record.counts.at("111") == 400);

    SUBCASE("seed is required") {
        CHECK(run_cli("run --in " + circuit.string() + " --shots 10") == 2);
    }
    SUBCASE("device-pauli without a device exits with 2") {
        CHECK(run_cli("run --in " + circuit.string() +
                      " --shots 10 --seed 1 --noise device-pauli") == 2);
    }
    SUBCASE("unknown preset exits with 2") {
        CHECK(run_cli("run --in " + circuit.string() + " --shots 10 --seed 1 --noise banana") == 2);
    }
}

TEST_CASE("sweep + report pipeline") {
    const fs::path outdir = kWork / "sweep_hs";
    REQUIRE(run_cli("sweep hs --noise methods-hs --shots 12 --seed 3 --threads 4 --out " +
                    outdir.string()) == 0);
    REQUIRE(fs::exists(outdir / "metrics.json"));
    REQUIRE(fs::exists(outdir / "matrix.csv"));
    REQUIRE(fs::exists(outdir / "matrix_dense.csv"));

    SUBCASE("metrics are byte-identical across reruns with the same seed") {
        const std::string first = slurp(outdir / "metrics.json");
        const fs::path outdir2 = kWork / "sweep_hs_again";
        REQUIRE(run_cli("sweep hs --noise methods-hs --shots 12 --seed 3 --threads 2 --out " +
                        outdir2.string()) == 0);
        CHECK(first == slurp(outdir2 / "metrics.json"));
    }
    SUBCASE("report produces boxplots and envelopes") {
        const fs::path report = kWork / "report_hs";
        REQUIRE(run_cli("report --in " + outdir.string() + " --device " + kDevice + " --out " +
                        report.string()) == 0);
        const std::string box = slurp(report / "boxplots.csv");
        CHECK(box.find("m,min,q1,median,q3,max,count") == 0);
        CHECK(fs::exists(report / "envelope.csv"));
        CHECK(fs::exists(report / "heatmap.csv"));
    }
}

TEST_CASE("rb subcommand") {
    const fs::path outdir = kWork / "rb";
    REQUIRE(run_cli("rb --qubit 3 --device " + kDevice + " --shots 120 --sequences 6 --seed 17 --out " +
                    outdir.string()) == 0);
    REQUIRE(fs::exists(outdir / "rb_q3.json"));
    REQUIRE(fs::exists(outdir / "rb_points.csv"));
    const std::string fit = slurp(outdir / "rb_q3.json");
    CHECK(fit.find("\"qubit\": 3") != std::string::npos);
    std::ifstream csv(outdir / "rb_points.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "qubit,L,sequence_id,survival");

    SUBCASE("missing device file exits with 2") {
        CHECK(run_cli("rb --qubit 0 --device /nonexistent.json --seed 1 --out " +
                      (kWork / "rb2").string()) == 2);
    }
    SUBCASE("needs --qubit or --all") {
        CHECK(run_cli("rb --device " + kDevice + " --seed 1 --out " + (kWork / "rb3").string()) == 2);
    }
}

TEST_CASE("tomo subcommand") {
    const fs::path outdir = kWork / "tomo";
    REQUIRE(run_cli("tomo --pair 0-1 --device " + kDevice + " --shots 300 --seed 23 --out " +
                    outdir.string()) == 0);
    const std::string text = slurp(outdir / "tomo.json");
    CHECK(text.find("\"pair\": \"0-1\"") != std::string::npos);
    CHECK(text.find("ci_low") != std::string::npos);
    CHECK(text.find("ci_high") != std::string::npos);
}

TEST_CASE("compile sidecar reproduces the oracle gate counts") {
    // all-ones hidden string: 10 two-qubit gates
    ionbench::Circuit bv(11, "1111111111");
    bv.append(ionbench::Gate::x(10)).append(ionbench::Gate::h(10));
    for (int q = 0; q < 10; ++q) bv.append(ionbench::Gate::h(q));
    for (int q = 0; q < 10; ++q) bv.append(ionbench::Gate::cnot(q, 10));
    for (int q = 0; q < 10; ++q) bv.append(ionbench::Gate::h(q));
    bv.append(ionbench::Gate::h(10));
    const fs::path circuit = kWork / "bv_all_ones.json";
    ionbench::save_circuit(bv, circuit);
    const fs::path counts = kWork / "bv_all_ones.counts.json";
    REQUIRE(run_cli("compile --in " + circuit.string() + " --out " +
                    (kWork / "bv_all_ones.native.json").string() + " --counts " + counts.string()) == 0);
    CHECK(slurp(counts).find("\"n_2q\": 10") != std::string::npos);

    SUBCASE("empty circuit compiles to zero counts") {
        const fs::path empty = kWork / "empty.json";
        ionbench::write_text_file(empty, R"({"num_qubits": 4, "gates": [], "label": "empty"})");
        const fs::path empty_counts = kWork / "empty.counts.json";
        REQUIRE(run_cli("compile --in " + empty.string() + " --out " +
                        (kWork / "empty.native.json").string() + " --counts " +
                        empty_counts.string()) == 0);
        const std::string sidecar = slurp(empty_counts);
        CHECK(sidecar.find("\"n_1q\": 0") != std::string::npos);
        CHECK(sidecar.find("\"n_2q\": 0") != std::string::npos);
    }
}

TEST_CASE("report on a noiseless sweep: unit boxes and matching envelopes") {
    const fs::path outdir = kWork / "sweep_bv_ideal";
    REQUIRE(run_cli("sweep bv --noise none --shots 1 --seed 1 --threads 4 --out " +
                    outdir.string()) == 0);
    const fs::path report = kWork / "report_bv_ideal";
    REQUIRE(run_cli("report --in " + outdir.string() + " --device " + kDevice + " --out " +
                    report.string()) == 0);

    std::ifstream box(report / "boxplots.csv");
    std::string line;
    std::getline(box, line);
    CHECK(line == "n,min,q1,median,q3,max,count");
    int rows = 0;
    while (std::getline(box, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        REQUIRE(fields.size() == 7);
        const int n = std::stoi(fields[0]);
        for (int i = 1; i <= 5; ++i) {
            CHECK(std::stod(fields[i]) == 1.0); // every quantile of an identity sweep
        }
        const int count = std::stoi(fields[6]);
        if (n == 0 || n == 10) {
            CHECK(count == 1); // single oracle implementation at the extremes
        }
        ++rows;
    }
    CHECK(rows == 11);

    // envelope rows reproduce the closed-form product for the device averages
    const auto device = ionbench::load_device_model(kDevice);
    std::ifstream env(report / "envelope.csv");
    std::getline(env, line);
    CHECK(line == "n,envelope_worst,envelope_avg,envelope_best");
    while (std::getline(env, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        REQUIRE(fields.size() == 4);
        const int n = std::stoi(fields[0]);
        const double expected = ionbench::expected_envelope(
            ionbench::Algorithm::BV, n, device.mean_f_2q(), device.mean_f_1q(), device.mean_f_spam());
        CHECK(std::stod(fields[2]) == doctest::Approx(expected).epsilon(1e-9));
    }
}
