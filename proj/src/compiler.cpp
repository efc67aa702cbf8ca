#include "ionbench/compiler.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ionbench/error.hpp"
#include "ionbench/unitary.hpp"

namespace ionbench {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleEps = 1e-12;

double wrap_angle(double a) {
    // into (-pi, pi]
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi + 0.0) {
        a += 2.0 * kPi;
    }
    return a;
}

struct Mat2 {
    cdouble u00{1.0}, u01{0.0}, u10{0.0}, u11{1.0};

    static Mat2 from_gate(const Gate& g) {
        const Unitary u = gate_unitary(g);
        return {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
    }

    Mat2 then(const Mat2& next) const {
        // matrix product next * this (this applied first)
        return {next.u00 * u00 + next.u01 * u10, next.u00 * u01 + next.u01 * u11,
                next.u10 * u00 + next.u11 * u10, next.u10 * u01 + next.u11 * u11};
    }
};

bool mat2_equal_up_to_phase(const Mat2& a, const Mat2& b, double tol) {
    const cdouble av[4] = {a.u00, a.u01, a.u10, a.u11};
    const cdouble bv[4] = {b.u00, b.u01, b.u10, b.u11};
    return equal_up_to_global_phase(std::span<const cdouble>(av, 4), std::span<const cdouble>(bv, 4), tol);
}

/// ZXZ Euler angles of a 2x2 unitary up to global phase:
/// U ~ RZ(alpha) * R(theta, 0) * RZ(beta), theta in [0, pi].
struct Zxz {
    double alpha = 0.0, theta = 0.0, beta = 0.0;
};

Zxz zxz_decompose(const Mat2& m) {
    // normalize to SU(2)
    const cdouble det = m.u00 * m.u11 - m.u01 * m.u10;
    const cdouble scale = 1.0 / std::sqrt(det);
    const cdouble u00 = m.u00 * scale;
    const cdouble u10 = m.u10 * scale;
    const cdouble u11 = m.u11 * scale;

    Zxz out;
    out.theta = 2.0 * std::atan2(std::abs(u10), std::abs(u00));
    const cdouble i{0.0, 1.0};
    if (std::abs(u10) < 1e-9) {
        out.alpha = wrap_angle(2.0 * std::arg(u11));
        out.beta = 0.0;
        out.theta = 0.0;
    } else if (std::abs(u00) < 1e-9) {
        out.theta = kPi;
        out.alpha = wrap_angle(2.0 * std::arg(i * u10));
        out.beta = 0.0;
    } else {
        const double sum = -2.0 * std::arg(u00);       // alpha + beta
        const double dif = 2.0 * std::arg(i * u10);    // alpha - beta
        out.alpha = wrap_angle((sum + dif) / 2.0);
        out.beta = wrap_angle((sum - dif) / 2.0);
    }
    return out;
}

std::vector<Gate> canonical_1q(const Mat2& m, int qubit) {
    const Zxz e = zxz_decompose(m);
    std::vector<Gate> out;
    if (e.theta < kAngleEps) {
        const double a = wrap_angle(e.alpha + e.beta);
        if (std::abs(a) > kAngleEps) {
            out.push_back(Gate::rz(qubit, a));
        }
        return out;
    }
    if (std::abs(e.beta) > kAngleEps) {
        out.push_back(Gate::rz(qubit, e.beta));
    }
    out.push_back(Gate::r(qubit, e.theta, 0.0));
    if (std::abs(e.alpha) > kAngleEps) {
        out.push_back(Gate::rz(qubit, e.alpha));
    }
    return out;
}

int physical_cost(const std::vector<Gate>& gates, bool rz_virtual) {
    int c = 0;
    for (const auto& g : gates) {
        if (g.kind == GateKind::R) {
            ++c;
        } else if (g.kind == GateKind::RZ && !rz_virtual) {
            ++c;
        }
    }
    return c;
}

GateCounts count_gates(const Circuit& circuit, bool rz_virtual) {
    GateCounts counts;
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
        case GateKind::R: ++counts.n_1q; break;
        case GateKind::RZ: ++counts.n_rz; break;
        case GateKind::XX: ++counts.n_2q; break;
        default:
            throw CompileError("gate counts require a native-only circuit");
        }
    }
    if (!rz_virtual) {
        counts.n_1q += counts.n_rz;
    }
    return counts;
}

void check_rewrite(const Gate& original, const std::vector<Gate>& replacement) {
    // the replacement acts on the same 1-2 qubits; compare dense unitaries
    const int nq = original.num_targets();
    Circuit local(nq);
    for (const auto& g : replacement) {
        Gate lg = g;
        for (int i = 0; i < lg.num_targets(); ++i) {
            lg.targets[i] = (g.targets[i] == original.targets[0]) ? 0 : 1;
        }
        local.append(lg);
    }
    Circuit single(nq);
    Gate lg = original;
    lg.targets = {0, 1};
    single.append(lg);
    if (!equal_up_to_global_phase(circuit_unitary(single), circuit_unitary(local), 1e-9)) {
        throw CompileError("native rewrite failed the equivalence check");
    }
}

std::vector<Gate> lower(const Gate& g, const CompilerOptions& options) {
    const double half = kPi / 2.0;
    switch (g.kind) {
    case GateKind::R:
    case GateKind::RZ:
    case GateKind::XX:
        return {g};
    case GateKind::H:
        return {Gate::rz(g.targets[0], kPi), Gate::r(g.targets[0], half, half)};
    case GateKind::X:
        return {Gate::r(g.targets[0], kPi, 0.0)};
    case GateKind::Y:
        return {Gate::r(g.targets[0], kPi, half)};
    case GateKind::Z:
        return {Gate::rz(g.targets[0], kPi)};
    case GateKind::CNOT: {
        const int c = g.targets[0];
        const int t = g.targets[1];
        const int sign = options.xx_sign(c, t);
        // the inverse X rotations flip direction with the entangling sign
        const double back = sign > 0 ? kPi : 0.0;
        return {Gate::r(c, half, half),
                Gate::xx(c, t, sign * kPi / 4.0),
                Gate::r(c, half, back),
                Gate::r(t, half, back),
                Gate::r(c, half, -half)};
    }
    case GateKind::CZ: {
        const int a = g.targets[0];
        const int b = g.targets[1];
        const int sign = options.xx_sign(a, b);
        return {Gate::r(a, half, half),
                Gate::r(b, half, half),
                Gate::xx(a, b, sign * kPi / 4.0),
                Gate::r(a, half, -half),
                Gate::r(b, half, -half),
                Gate::rz(a, -sign * half),
                Gate::rz(b, -sign * half)};
    }
    }
    throw CompileError("unsupported gate kind");
}

/// Streaming peephole rewriter. Single-qubit gates accumulate per qubit and
/// flush (canonicalized) when an XX arrives or the stream ends.
class Peephole {
public:
    Peephole(int num_qubits, const CompilerOptions& options)
        : options_(options), pending_(static_cast<std::size_t>(num_qubits)),
          last_emitted_(static_cast<std::size_t>(num_qubits), -1), out_(num_qubits) {}

    void feed(const Gate& g) {
        if (!g.is_two_qubit()) {
            auto& run = pending_[static_cast<std::size_t>(g.targets[0])];
            run.gates.push_back(g);
            run.accum = run.accum.then(Mat2::from_gate(g));
            return;
        }
        flush(g.targets[0]);
        flush(g.targets[1]);
        emit_xx(g);
    }

    Circuit finish(const std::string& label) {
        for (int q = 0; q < out_.num_qubits; ++q) {
            flush(q);
        }
        out_.label = label;
        return std::move(out_);
    }

private:
    struct Run {
        std::vector<Gate> gates;
        Mat2 accum;
    };

    const CompilerOptions& options_;
    std::vector<Run> pending_;
    std::vector<long> last_emitted_;
    Circuit out_;

    void emit(const Gate& g) {
        out_.append(g);
        for (int i = 0; i < g.num_targets(); ++i) {
            last_emitted_[static_cast<std::size_t>(g.targets[i])] = static_cast<long>(out_.gates.size()) - 1;
        }
    }

    void flush(int q) {
        auto& run = pending_[static_cast<std::size_t>(q)];
        if (run.gates.empty()) {
            return;
        }
        auto canonical = canonical_1q(run.accum, q);
        if (options_.equivalence_check) {
            Mat2 check;
            for (const auto& g : canonical) {
                check = check.then(Mat2::from_gate(g));
            }
            if (!mat2_equal_up_to_phase(run.accum, check, 1e-9)) {
                throw CompileError("single-qubit merge failed the equivalence check");
            }
        }
        const bool rzv = options_.enable_rz_virtualization;
        const int cost_new = physical_cost(canonical, rzv);
        const int cost_old = physical_cost(run.gates, rzv);
        const bool take_canonical =
            cost_new < cost_old || (cost_new == cost_old && canonical.size() <= run.gates.size());
        const auto& chosen = take_canonical ? canonical : run.gates;
        for (const auto& g : chosen) {
            emit(g);
        }
        run = Run{};
    }

    void emit_xx(const Gate& g) {
        const int a = g.targets[0];
        const int b = g.targets[1];
        const long la = last_emitted_[static_cast<std::size_t>(a)];
        if (la >= 0 && la == last_emitted_[static_cast<std::size_t>(b)]) {
            Gate& prev = out_.gates[static_cast<std::size_t>(la)];
            if (prev.kind == GateKind::XX) {
                // same unordered pair by construction of last_emitted
                const double chi = prev.chi() + g.chi();
                if (std::abs(std::remainder(chi, kPi)) < kAngleEps) {
                    drop_last_xx(la, a, b);
                } else {
                    prev.params[0] = chi;
                }
                return;
            }
        }
        emit(g);
    }

    void drop_last_xx(long index, int a, int b) {
        out_.gates.erase(out_.gates.begin() + index);
        for (auto& l : last_emitted_) {
            if (l > index) {
                --l;
            }
        }
        for (int q : {a, b}) {
            long found = -1;
            for (long i = static_cast<long>(out_.gates.size()) - 1; i >= 0; --i) {
                const Gate& g = out_.gates[static_cast<std::size_t>(i)];
                for (int t = 0; t < g.num_targets(); ++t) {
                    if (g.targets[t] == q) {
                        found = i;
                        break;
                    }
                }
                if (found >= 0) {
                    break;
                }
            }
            last_emitted_[static_cast<std::size_t>(q)] = found;
        }
    }
};

void check_full_equivalence(const Circuit& before, const Circuit& after) {
    if (before.num_qubits > 4) {
        return; // dense check only at oracle-checkable sizes
    }
    if (!equal_up_to_global_phase(circuit_unitary(before), circuit_unitary(after), 1e-9)) {
        throw CompileError("compiled circuit is not unitary-equivalent to its source");
    }
}

} // namespace

int CompilerOptions::xx_sign(int a, int b) const {
    const auto key = std::minmax(a, b);
    const auto it = xx_signs.find({key.first, key.second});
    if (it == xx_signs.end()) {
        return +1;
    }
    return it->second >= 0 ? +1 : -1;
}

CompiledCircuit decompose(const Circuit& circuit, const CompilerOptions& options) {
    Circuit lowered(circuit.num_qubits);
    for (const auto& g : circuit.gates) {
        const auto replacement = lower(g, options);
        if (options.equivalence_check && !g.is_native()) {
            check_rewrite(g, replacement);
        }
        for (const auto& r : replacement) {
            lowered.append(r);
        }
    }
    lowered.label = circuit.label;
    if (options.equivalence_check) {
        check_full_equivalence(circuit, lowered);
    }
    CompiledCircuit out;
    out.rz_virtual = options.enable_rz_virtualization;
    out.counts = count_gates(lowered, out.rz_virtual);
    out.circuit = std::move(lowered);
    out.provenance = circuit.label;
    return out;
}

CompiledCircuit optimize(const CompiledCircuit& compiled, const CompilerOptions& options) {
    if (!compiled.circuit.native_only()) {
        throw CompileError("optimize requires a native-only circuit");
    }
    CompiledCircuit out;
    out.provenance = compiled.provenance;
    out.rz_virtual = options.enable_rz_virtualization;
    if (!options.enable_merge) {
        out.circuit = compiled.circuit;
        out.counts = count_gates(out.circuit, out.rz_virtual);
        return out;
    }
    Peephole peephole(compiled.circuit.num_qubits, options);
    for (const auto& g : compiled.circuit.gates) {
        peephole.feed(g);
    }
    out.circuit = peephole.finish(compiled.circuit.label);
    if (options.equivalence_check) {
        check_full_equivalence(compiled.circuit, out.circuit);
    }
    out.counts = count_gates(out.circuit, out.rz_virtual);
    return out;
}

GateCounts gate_counts(const CompiledCircuit& compiled) {
    return count_gates(compiled.circuit, compiled.rz_virtual);
}

CompiledCircuit compile_circuit(const Circuit& circuit, const CompilerOptions& options) {
    return optimize(decompose(circuit, options), options);
}

} // namespace ionbench
