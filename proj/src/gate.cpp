#include "ionbench/gate.hpp"

#include <cmath>

#include "ionbench/error.hpp"

namespace ionbench {

namespace {

constexpr cdouble kI{0.0, 1.0};

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string("gate parameter not finite: ") + what);
    }
}

Gate make_1q(GateKind kind, int qubit, double p0 = 0.0, double p1 = 0.0) {
    if (qubit < 0) {
        throw ValidationError("negative qubit index");
    }
    check_finite(p0, to_string(kind).data());
    check_finite(p1, to_string(kind).data());
    return Gate{kind, {qubit, qubit}, {p0, p1}};
}

Gate make_2q(GateKind kind, int a, int b, double p0 = 0.0) {
    if (a < 0 || b < 0) {
        throw ValidationError("negative qubit index");
    }
    if (a == b) {
        throw ValidationError("two-qubit gate targets must be distinct");
    }
    check_finite(p0, to_string(kind).data());
    return Gate{kind, {a, b}, {p0, 0.0}};
}

} // namespace

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::R: return "R";
    case GateKind::RZ: return "RZ";
    case GateKind::XX: return "XX";
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    }
    throw ValidationError("unknown gate kind");
}

GateKind gate_kind_from_string(std::string_view name) {
    if (name == "R") return GateKind::R;
    if (name == "RZ") return GateKind::RZ;
    if (name == "XX") return GateKind::XX;
    if (name == "H") return GateKind::H;
    if (name == "X") return GateKind::X;
    if (name == "Y") return GateKind::Y;
    if (name == "Z") return GateKind::Z;
    if (name == "CNOT") return GateKind::CNOT;
    if (name == "CZ") return GateKind::CZ;
    throw ValidationError("unknown gate kind: " + std::string(name));
}

bool is_native_kind(GateKind kind) {
    return kind == GateKind::R || kind == GateKind::RZ || kind == GateKind::XX;
}

int target_count(GateKind kind) {
    switch (kind) {
    case GateKind::XX:
    case GateKind::CNOT:
    case GateKind::CZ:
        return 2;
    default:
        return 1;
    }
}

int param_count(GateKind kind) {
    switch (kind) {
    case GateKind::R: return 2;
    case GateKind::RZ:
    case GateKind::XX: return 1;
    default: return 0;
    }
}

Gate Gate::r(int qubit, double theta, double phi) { return make_1q(GateKind::R, qubit, theta, phi); }
Gate Gate::rz(int qubit, double theta) { return make_1q(GateKind::RZ, qubit, theta); }
Gate Gate::xx(int a, int b, double chi) { return make_2q(GateKind::XX, a, b, chi); }
Gate Gate::h(int qubit) { return make_1q(GateKind::H, qubit); }
Gate Gate::x(int qubit) { return make_1q(GateKind::X, qubit); }
Gate Gate::y(int qubit) { return make_1q(GateKind::Y, qubit); }
Gate Gate::z(int qubit) { return make_1q(GateKind::Z, qubit); }
Gate Gate::cnot(int control, int target) { return make_2q(GateKind::CNOT, control, target); }
Gate Gate::cz(int a, int b) { return make_2q(GateKind::CZ, a, b); }

Gate Gate::make(GateKind kind, std::array<int, 2> targets, std::array<double, 2> params) {
    if (target_count(kind) == 1) {
        return make_1q(kind, targets[0], params[0], params[1]);
    }
    return make_2q(kind, targets[0], targets[1], params[0]);
}

namespace {

Unitary unitary_1q(cdouble a, cdouble b, cdouble c, cdouble d) {
    Unitary u;
    u.dim = 2;
    u.elems[0] = a;
    u.elems[1] = b;
    u.elems[2] = c;
    u.elems[3] = d;
    return u;
}

} // namespace

Unitary gate_unitary(const Gate& gate) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (gate.kind) {
    case GateKind::R: {
        // exp(-i theta/2 (cos phi X + sin phi Y))
        const double c = std::cos(gate.theta() / 2.0);
        const double s = std::sin(gate.theta() / 2.0);
        const cdouble off01 = -kI * s * std::exp(-kI * gate.phi());
        const cdouble off10 = -kI * s * std::exp(kI * gate.phi());
        return unitary_1q(c, off01, off10, c);
    }
    case GateKind::RZ:
        return unitary_1q(std::exp(-kI * (gate.theta() / 2.0)), 0.0, 0.0,
                          std::exp(kI * (gate.theta() / 2.0)));
    case GateKind::XX: {
        // cos(chi) I - i sin(chi) X(x)X: couples 00<->11 and 01<->10.
        Unitary u;
        u.dim = 4;
        const cdouble c = std::cos(gate.chi());
        const cdouble s = -kI * std::sin(gate.chi());
        u.at(0, 0) = c; u.at(0, 3) = s;
        u.at(1, 1) = c; u.at(1, 2) = s;
        u.at(2, 2) = c; u.at(2, 1) = s;
        u.at(3, 3) = c; u.at(3, 0) = s;
        return u;
    }
    case GateKind::H:
        return unitary_1q(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2);
    case GateKind::X:
        return unitary_1q(0.0, 1.0, 1.0, 0.0);
    case GateKind::Y:
        return unitary_1q(0.0, -kI, kI, 0.0);
    case GateKind::Z:
        return unitary_1q(1.0, 0.0, 0.0, -1.0);
    case GateKind::CNOT: {
        Unitary u;
        u.dim = 4;
        u.at(0, 0) = 1.0;
        u.at(1, 1) = 1.0;
        u.at(2, 3) = 1.0;
        u.at(3, 2) = 1.0;
        return u;
    }
    case GateKind::CZ: {
        Unitary u;
        u.dim = 4;
        u.at(0, 0) = 1.0;
        u.at(1, 1) = 1.0;
        u.at(2, 2) = 1.0;
        u.at(3, 3) = -1.0;
        return u;
    }
    }
    throw ValidationError("unknown gate kind");
}

} // namespace ionbench
