// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fkpde/circuit.hpp"
#include "fkpde/kernels.hpp"
#include "oracles.hpp"

using namespace fkpde;
namespace k = fkpde::kernels;

namespace {

double diff(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

// 14 qubits puts every kernel above the threading threshold.
TEST(Kernels, ThreadedMatchesSerial) {
    const int n = 14;
    const CVec start = oracle::random_state(1 << n, 3);
    const k::Mat2 u = rotation_matrix(GateKind::Ry, 0.7);
    for (int q = 0; q < n; q += 3) {
        CVec a = start, b = start;
        k::omp::apply_1q(a.data(), n, q, u);
        k::serial::apply_1q(b.data(), n, q, u);
        EXPECT_LT(diff(a, b), 1e-15);
        k::omp::apply_diag(a.data(), n, q, cplx(0.3, 0.1), cplx(-1.0, 0.2));
        k::serial::apply_diag(b.data(), n, q, cplx(0.3, 0.1), cplx(-1.0, 0.2));
        EXPECT_LT(diff(a, b), 1e-15);
        k::omp::apply_cnot(a.data(), n, q, (q + 5) % n);
        k::serial::apply_cnot(b.data(), n, q, (q + 5) % n);
        EXPECT_LT(diff(a, b), 0.0 + 1e-300);
        k::omp::apply_controlled_1q(a.data(), n, 0b101u << 1, 0b100u << 1, 0, u);
        k::serial::apply_controlled_1q(b.data(), n, 0b101u << 1, 0b100u << 1, 0, u);
        EXPECT_LT(diff(a, b), 1e-15);
        for (k::Pauli p : {k::Pauli::X, k::Pauli::Y, k::Pauli::Z})
            EXPECT_LT(std::abs(k::omp::pauli_inner(a.data(), start.data(), n, q, p) -
                               k::serial::pauli_inner(a.data(), start.data(), n, q, p)),
                      1e-12);
    }
}

TEST(Kernels, SingleQubitGateMatchesKron) {
    const int n = 4;
    const CVec psi = oracle::random_state(1 << n, 9);
    for (int q = 0; q < n; ++q) {
        CVec a = psi;
        k::serial::apply_1q(a.data(), n, q, rotation_matrix(GateKind::Rx, 1.1));
        const CVec ref = oracle::gate_on(oracle::rotation(GateKind::Rx, 1.1), q, n) * psi;
        EXPECT_LT(diff(a, ref), 1e-14);
    }
}

TEST(Kernels, CnotMatchesPermutation) {
    const int n = 4;
    const CVec psi = oracle::random_state(1 << n, 11);
    for (int c = 0; c < n; ++c)
        for (int t = 0; t < n; ++t) {
            if (c == t) continue;
            CVec a = psi;
            k::omp::apply_cnot(a.data(), n, c, t);
            EXPECT_LT(diff(a, oracle::cnot_on(c, t, n) * psi), 1e-15);
        }
}

TEST(Kernels, PauliInnerMatchesDense) {
    const int n = 3;
    const CVec a = oracle::random_state(8, 1), b = oracle::random_state(8, 2);
    oracle::CMat z(2, 2);
    z << 1, 0, 0, -1;
    for (int q = 0; q < n; ++q)
        EXPECT_LT(std::abs(k::serial::pauli_inner(a.data(), b.data(), n, q, k::Pauli::Z) -
                           a.dot(oracle::gate_on(z, q, n) * b)),
                  1e-14);
}
