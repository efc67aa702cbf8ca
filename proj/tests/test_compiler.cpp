#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "ionbench/compiler.hpp"
#include "ionbench/error.hpp"
#include "ionbench/oracles.hpp"
#include "support/reference.hpp"

using namespace ionbench;

namespace {

constexpr double kPi = std::numbers::pi;

bool equivalent(const Circuit& a, const Circuit& b, double tol = 1e-9) {
    return refsim::equal_up_to_phase(refsim::circuit_matrix(a), refsim::circuit_matrix(b), tol);
}

Circuit single_gate(const Gate& g, int nq) {
    Circuit c(nq);
    c.append(g);
    return c;
}

} // namespace

TEST_CASE("decompose emits native gates only and preserves unitaries") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Circuit c = refsim::random_standard_circuit(rng, 3, 10);
        const CompiledCircuit compiled = decompose(c);
        CHECK(compiled.circuit.native_only());
        CHECK(equivalent(c, compiled.circuit));
    }
}

TEST_CASE("decompose unit identities") {
    SUBCASE("empty circuit") {
        const CompiledCircuit compiled = compile_circuit(Circuit(2));
        CHECK(compiled.circuit.gates.empty());
        CHECK(compiled.counts.n_1q == 0);
        CHECK(compiled.counts.n_2q == 0);
    }
    SUBCASE("single CNOT costs exactly one XX") {
        const Circuit c = single_gate(Gate::cnot(0, 1), 2);
        const CompiledCircuit compiled = compile_circuit(c);
        CHECK(compiled.counts.n_2q == 1);
        CHECK(equivalent(c, compiled.circuit));
    }
    SUBCASE("single CZ costs exactly one XX") {
        const Circuit c = single_gate(Gate::cz(1, 0), 2);
        const CompiledCircuit compiled = compile_circuit(c);
        CHECK(compiled.counts.n_2q == 1);
        CHECK(equivalent(c, compiled.circuit));
    }
    SUBCASE("H lowers to R/RZ") {
        const Circuit c = single_gate(Gate::h(0), 1);
        const CompiledCircuit compiled = decompose(c);
        CHECK(compiled.circuit.native_only());
        CHECK(equivalent(c, compiled.circuit));
    }
    SUBCASE("negative entangling sign still yields CNOT") {
        CompilerOptions options;
        options.xx_signs[{0, 1}] = -1;
        const Circuit c = single_gate(Gate::cnot(0, 1), 2);
        const CompiledCircuit compiled = compile_circuit(c, options);
        CHECK(equivalent(c, compiled.circuit));
        bool saw_negative_chi = false;
        for (const auto& g : compiled.circuit.gates) {
            if (g.kind == GateKind::XX) {
                saw_negative_chi = g.chi() < 0.0;
            }
        }
        CHECK(saw_negative_chi);
    }
}

TEST_CASE("optimize merges and elides single-qubit runs") {
    SUBCASE("two quarter turns fuse into a half turn") {
        Circuit c(1);
        c.append(Gate::r(0, kPi / 2.0, 0.0)).append(Gate::r(0, kPi / 2.0, 0.0));
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.counts.n_1q == 1);
        REQUIRE(out.circuit.gates.size() >= 1);
        bool found_half_turn = false;
        for (const auto& g : out.circuit.gates) {
            if (g.kind == GateKind::R) {
                found_half_turn = std::abs(g.theta() - kPi) < 1e-9;
            }
        }
        CHECK(found_half_turn);
        CHECK(equivalent(c, out.circuit));
    }
    SUBCASE("a rotation and its inverse vanish") {
        Circuit c(1);
        c.append(Gate::r(0, 1.234, 0.7)).append(Gate::r(0, -1.234, 0.7));
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.circuit.gates.empty());
    }
    SUBCASE("merged runs collapse to at most RZ R RZ") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> angle(-3.0, 3.0);
        Circuit c(1);
        for (int i = 0; i < 9; ++i) {
            c.append(Gate::r(0, angle(rng), angle(rng)));
            c.append(Gate::rz(0, angle(rng)));
        }
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.circuit.gates.size() <= 3);
        CHECK(out.counts.n_1q <= 1);
        CHECK(equivalent(c, out.circuit));
        // canonical form: RZ(beta), R(theta, 0), RZ(alpha) with theta in [0, pi]
        for (const auto& g : out.circuit.gates) {
            if (g.kind == GateKind::R) {
                CHECK(g.phi() == 0.0);
                CHECK(g.theta() >= 0.0);
                CHECK(g.theta() <= kPi + 1e-12);
            }
        }
    }
    SUBCASE("back-to-back XX on the same pair fuse") {
        Circuit c(2);
        c.append(Gate::xx(0, 1, kPi / 8.0)).append(Gate::xx(1, 0, kPi / 8.0));
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.counts.n_2q == 1);
        CHECK(equivalent(c, out.circuit));
    }
    SUBCASE("XX followed by its inverse vanishes") {
        Circuit c(2);
        c.append(Gate::xx(0, 1, 0.4)).append(Gate::xx(0, 1, -0.4));
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.counts.n_2q == 0);
    }
    SUBCASE("merging stops at two-qubit gates") {
        Circuit c(2);
        c.append(Gate::r(0, 0.5, 0.0)).append(Gate::xx(0, 1, 0.3)).append(Gate::r(0, 0.5, 0.0));
        const CompiledCircuit out = optimize(decompose(c));
        CHECK(out.counts.n_1q == 2);
        CHECK(out.counts.n_2q == 1);
    }
}

TEST_CASE("optimize never increases counts and is idempotent on counts") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        const Circuit c = refsim::random_standard_circuit(rng, 3, 16);
        const CompiledCircuit lowered = decompose(c);
        const CompiledCircuit once = optimize(lowered);
        CHECK(once.counts.n_1q <= lowered.counts.n_1q);
        CHECK(once.counts.n_2q <= lowered.counts.n_2q);
        const CompiledCircuit twice = optimize(once);
        CHECK(twice.counts == once.counts);
    }
}

TEST_CASE("physical-RZ counting keeps the no-increase guarantee") {
    CompilerOptions options;
    options.enable_rz_virtualization = false;
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const Circuit c = refsim::random_standard_circuit(rng, 2, 12);
        const CompiledCircuit lowered = decompose(c, options);
        const CompiledCircuit once = optimize(lowered, options);
        CHECK(once.counts.n_1q <= lowered.counts.n_1q);
        CHECK(equivalent(c, once.circuit));
        const CompiledCircuit twice = optimize(once, options);
        CHECK(twice.counts == once.counts);
    }
}

TEST_CASE("equivalence property: 500 random circuits survive decompose+optimize") {
    std::mt19937_64 rng(31);
    CompilerOptions options;
    options.equivalence_check = true; // the compiler's own check runs too
    for (int trial = 0; trial < 500; ++trial) {
        const int nq = 1 + static_cast<int>(rng() % 3);
        const int len = 1 + static_cast<int>(rng() % 20);
        const Circuit c = refsim::random_standard_circuit(rng, nq, len);
        const CompiledCircuit out = compile_circuit(c, options);
        CHECK(out.circuit.native_only());
        REQUIRE(equivalent(c, out.circuit));
    }
}

TEST_CASE("compile errors") {
    CompiledCircuit fake;
    fake.circuit = Circuit(1);
    fake.circuit.append(Gate::h(0));
    CHECK_THROWS_AS(optimize(fake), CompileError);
    CHECK_THROWS_AS(gate_counts(fake), CompileError);
}

TEST_CASE("gate count laws over all 1024 oracles") {
    SUBCASE("BV: two-qubit count equals popcount(c), before and after optimization") {
        for (std::uint32_t c = 0; c < kOracleCount; ++c) {
            const Circuit circuit = build_bv_circuit(BVOracle(c));
            const CompiledCircuit lowered = decompose(circuit);
            const CompiledCircuit optimized = optimize(lowered);
            const int expected = std::popcount(c);
            CHECK(lowered.counts.n_2q == expected);
            CHECK(optimized.counts.n_2q == expected);
        }
    }
    SUBCASE("HS: two-qubit count is exactly 10 for every shift") {
        for (std::uint32_t s = 0; s < kOracleCount; ++s) {
            const CompiledCircuit compiled = compile_circuit(build_hs_circuit(HSOracle(s)));
            CHECK(compiled.counts.n_2q == 10);
        }
    }
}

TEST_CASE("no SWAPs: every XX acts on the requested logical pair") {
    const Circuit circuit = build_bv_circuit(BVOracle(0b1010110011));
    const CompiledCircuit compiled = compile_circuit(circuit);
    for (const auto& g : compiled.circuit.gates) {
        if (g.kind == GateKind::XX) {
            // one side is the ancilla, the other a register qubit with a set bit
            const int reg = g.targets[0] == 10 ? g.targets[1] : g.targets[0];
            CHECK((g.targets[0] == 10 || g.targets[1] == 10));
            CHECK(((0b1010110011 >> (9 - reg)) & 1) == 1);
        }
    }
}

TEST_CASE("counts sidecar semantics") {
    Circuit c(2);
    c.append(Gate::h(0)).append(Gate::cnot(0, 1)).append(Gate::rz(1, 0.3));
    const CompiledCircuit compiled = compile_circuit(c);
    const GateCounts counts = gate_counts(compiled);
    CHECK(counts == compiled.counts);
    int r_gates = 0;
    int xx_gates = 0;
    for (const auto& g : compiled.circuit.gates) {
        r_gates += g.kind == GateKind::R;
        xx_gates += g.kind == GateKind::XX;
    }
    CHECK(counts.n_1q == r_gates);
    CHECK(counts.n_2q == xx_gates);
}
