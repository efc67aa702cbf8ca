#pragma once

// Independent dense-matrix reference for the tests. Everything here is built
// from first principles with Eigen (matrix exponentials, explicit tensor
// embedding) and never calls the library's simulator or unitary builder, so
// it can serve as an oracle for both.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "ionbench/circuit.hpp"

namespace refsim {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using cdouble = std::complex<double>;

inline Matrix2cd pauli_x() {
    Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix2cd pauli_y() {
    Matrix2cd m;
    m << 0, cdouble(0, -1), cdouble(0, 1), 0;
    return m;
}

inline Matrix2cd pauli_z() {
    Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix2cd hadamard() {
    Matrix2cd m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

/// R(theta, phi) via the matrix exponential, not the closed form.
inline Matrix2cd rotation(double theta, double phi) {
    const Matrix2cd axis = std::cos(phi) * pauli_x() + std::sin(phi) * pauli_y();
    const Matrix2cd gen = cdouble(0, -0.5 * theta) * axis;
    return gen.exp();
}

inline Matrix2cd rotation_z(double theta) {
    const Matrix2cd gen = cdouble(0, -0.5 * theta) * pauli_z();
    return gen.exp();
}

inline Matrix4cd xx_interaction(double chi) {
    const Matrix4cd gen =
        cdouble(0, -chi) * Eigen::kroneckerProduct(pauli_x(), pauli_x()).eval();
    return gen.exp();
}

inline Matrix4cd cnot() {
    Matrix4cd m = Matrix4cd::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

inline Matrix4cd cz() {
    Matrix4cd m = Matrix4cd::Identity();
    m(3, 3) = -1;
    return m;
}

inline MatrixXcd gate_matrix(const ionbench::Gate& g) {
    using ionbench::GateKind;
    switch (g.kind) {
    case GateKind::R: return rotation(g.theta(), g.phi());
    case GateKind::RZ: return rotation_z(g.theta());
    case GateKind::XX: return xx_interaction(g.chi());
    case GateKind::H: return hadamard();
    case GateKind::X: return pauli_x();
    case GateKind::Y: return pauli_y();
    case GateKind::Z: return pauli_z();
    case GateKind::CNOT: return cnot();
    case GateKind::CZ: return cz();
    }
    return MatrixXcd::Identity(2, 2);
}

/// Embeds a 1- or 2-qubit operator into the full register (qubit 0 = most
/// significant bit) entry by entry.
inline MatrixXcd embed(const MatrixXcd& u, const std::vector<int>& targets, int num_qubits) {
    const long dim = 1L << num_qubits;
    MatrixXcd full = MatrixXcd::Zero(dim, dim);
    const int k = static_cast<int>(targets.size());
    for (long col = 0; col < dim; ++col) {
        long sub_in = 0;
        for (int t = 0; t < k; ++t) {
            sub_in = (sub_in << 1) | ((col >> (num_qubits - 1 - targets[static_cast<std::size_t>(t)])) & 1L);
        }
        for (long sub_out = 0; sub_out < (1L << k); ++sub_out) {
            const cdouble amp = u(sub_out, sub_in);
            if (amp == cdouble{}) {
                continue;
            }
            long row = col;
            for (int t = 0; t < k; ++t) {
                const long mask = 1L << (num_qubits - 1 - targets[static_cast<std::size_t>(t)]);
                if ((sub_out >> (k - 1 - t)) & 1L) {
                    row |= mask;
                } else {
                    row &= ~mask;
                }
            }
            full(row, col) += amp;
        }
    }
    return full;
}

inline MatrixXcd circuit_matrix(const ionbench::Circuit& circuit) {
    const long dim = 1L << circuit.num_qubits;
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    for (const auto& g : circuit.gates) {
        std::vector<int> targets(g.targets.begin(), g.targets.begin() + g.num_targets());
        u = embed(gate_matrix(g), targets, circuit.num_qubits) * u;
    }
    return u;
}

inline bool equal_up_to_phase(const MatrixXcd& a, const MatrixXcd& b, double tol) {
    long r = 0, c = 0;
    a.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(a(r, c)) < tol) {
        return false;
    }
    const cdouble phase = b(r, c) / a(r, c);
    if (std::abs(std::abs(phase) - 1.0) > tol) {
        return false;
    }
    return ((a * phase) - b).cwiseAbs().maxCoeff() < tol;
}

/// Uniform non-identity two-qubit Pauli channel on a density matrix.
inline Matrix4cd pauli_channel_2q(const Matrix4cd& rho, double rate) {
    const Matrix2cd singles[4] = {Matrix2cd::Identity(), pauli_x(), pauli_y(), pauli_z()};
    Matrix4cd out = (1.0 - rate) * rho;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if (a == 0 && b == 0) {
                continue;
            }
            const Matrix4cd p = Eigen::kroneckerProduct(singles[a], singles[b]).eval();
            out += (rate / 15.0) * p * rho * p.adjoint();
        }
    }
    return out;
}

/// Random standard-gate circuit for the compiler equivalence property.
inline ionbench::Circuit random_standard_circuit(std::mt19937_64& rng, int num_qubits,
                                                 int num_gates) {
    using ionbench::Gate;
    ionbench::Circuit c(num_qubits);
    std::uniform_int_distribution<int> kind_pick(0, 8);
    std::uniform_int_distribution<int> qubit_pick(0, num_qubits - 1);
    std::uniform_real_distribution<double> angle(-3.1, 3.1);
    for (int i = 0; i < num_gates; ++i) {
        const int q = qubit_pick(rng);
        int q2 = qubit_pick(rng);
        while (num_qubits > 1 && q2 == q) {
            q2 = qubit_pick(rng);
        }
        switch (kind_pick(rng)) {
        case 0: c.append(Gate::r(q, angle(rng), angle(rng))); break;
        case 1: c.append(Gate::rz(q, angle(rng))); break;
        case 2: c.append(Gate::h(q)); break;
        case 3: c.append(Gate::x(q)); break;
        case 4: c.append(Gate::y(q)); break;
        case 5: c.append(Gate::z(q)); break;
        case 6:
            if (num_qubits > 1) {
                c.append(Gate::xx(q, q2, angle(rng)));
            } else {
                c.append(Gate::h(q));
            }
            break;
        case 7:
            if (num_qubits > 1) {
                c.append(Gate::cnot(q, q2));
            } else {
                c.append(Gate::x(q));
            }
            break;
        default:
            if (num_qubits > 1) {
                c.append(Gate::cz(q, q2));
            } else {
                c.append(Gate::z(q));
            }
            break;
        }
    }
    return c;
}

} // namespace refsim
