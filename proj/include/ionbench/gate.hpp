#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>

namespace ionbench {

using cdouble = std::complex<double>;

enum class GateKind {
    R,    // R(theta, phi) = exp(-i theta/2 (cos phi X + sin phi Y))
    RZ,   // RZ(theta)     = exp(-i theta/2 Z)
    XX,   // XX(chi)       = exp(-i chi X (x) X), maximally entangling at |chi| = pi/4
    H,
    X,
    Y,
    Z,
    CNOT,
    CZ,
};

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);
bool is_native_kind(GateKind kind);
int target_count(GateKind kind);
int param_count(GateKind kind);

/// A single gate instance: kind, target qubit indices, rotation parameters.
struct Gate {
    GateKind kind = GateKind::X;
    std::array<int, 2> targets{0, 0};
    std::array<double, 2> params{0.0, 0.0};

    static Gate r(int qubit, double theta, double phi);
    static Gate rz(int qubit, double theta);
    static Gate xx(int a, int b, double chi);
    static Gate h(int qubit);
    static Gate x(int qubit);
    static Gate y(int qubit);
    static Gate z(int qubit);
    static Gate cnot(int control, int target);
    static Gate cz(int a, int b);

    /// Validated construction from parsed data; throws ValidationError.
    static Gate make(GateKind kind, std::array<int, 2> targets, std::array<double, 2> params);

    int num_targets() const { return target_count(kind); }
    bool is_two_qubit() const { return num_targets() == 2; }
    bool is_native() const { return is_native_kind(kind); }

    double theta() const { return params[0]; }
    double phi() const { return params[1]; }
    double chi() const { return params[0]; }
};

/// Dense unitary of a single gate, row-major; dim is 2 or 4.
/// Two-qubit basis order is (first target, second target), first = high bit.
struct Unitary {
    int dim = 2;
    std::array<cdouble, 16> elems{};

    cdouble operator()(int row, int col) const { return elems[static_cast<std::size_t>(row) * dim + col]; }
    cdouble& at(int row, int col) { return elems[static_cast<std::size_t>(row) * dim + col]; }
};

Unitary gate_unitary(const Gate& gate);

} // namespace ionbench
