// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fkpde/kernels.hpp"
#include "fkpde/lattice.hpp"

namespace fkpde {

enum class GateKind { Rx, Ry, Rz, H, X, CNOT };

struct Gate {
    GateKind kind = GateKind::H;
    int wire = 0;    // target (single-qubit gates) or control (CNOT)
    int target = -1; // CNOT target
    int slot = -1;   // parameter slot for rotations, -1 for fixed gates
    double angle = 0.0;  // used when slot < 0

    [[nodiscard]] bool parametric() const { return slot >= 0; }
};

kernels::Mat2 rotation_matrix(GateKind kind, double angle);
kernels::Mat2 fixed_matrix(GateKind kind);

enum class Ordering { sequential, reversed_space };

// Maps drawing wires to logical bits of the spacetime index. Logical bit b < n_t
// is time bit b; bit n_t + k is space bit k (bit 0 least significant). Wires are
// numbered top to bottom; both layouts start with the time register, least
// significant on top. sequential continues with space LSB..MSB, reversed_space
// with space MSB..LSB so the two most significant bits meet in the middle.
struct QubitOrdering {
    Ordering kind = Ordering::reversed_space;
    int n_x = 1;
    int n_t = 1;
    std::vector<int> wire_to_bit;
    std::vector<int> bit_to_wire;

    static QubitOrdering make(Ordering kind, int n_x, int n_t);
    [[nodiscard]] int n_qubits() const { return n_x + n_t; }
    // Re-index a logical statevector into wire order (wire w is bit w) and back.
    [[nodiscard]] CVec to_wire_order(const CVec& logical) const;
    [[nodiscard]] CVec to_logical_order(const CVec& wired) const;
};

enum class AnsatzFamily { brickwall, qmps, custom };

struct Block {
    int top = 0;
    int bottom = 1;
    std::vector<int> slots;
};

struct Ansatz {
    AnsatzFamily family = AnsatzFamily::brickwall;
    int n_qubits = 0;
    int layers = 0;
    int r = 1;
    int chi = 0;
    bool sparse = false;
    QubitOrdering ordering;
    std::vector<Gate> gates;
    std::vector<Block> blocks;
    int n_params = 0;

    // Appends an r-fold {CNOT, Rz Rx Rz on both wires} block; returns its index.
    int append_block(int top, int bottom, int reps);
};

Ansatz build_brickwall(int n_qubits, int layers, int r, const QubitOrdering& ordering);
Ansatz build_qmps(int n_qubits, int chi, int r, bool sparse, const QubitOrdering& ordering);

struct ResourceCount {
    int cnot_count = 0;
    int reported_depth = 0;
    int parameter_count = 0;
};

ResourceCount count_resources(const Ansatz& ansatz);
int cnot_depth(const Ansatz& ansatz);

/// Prepares U(params)|0> and returns it in logical (space-major) index order.
CVec apply_circuit(const Ansatz& ansatz, const std::vector<double>& params);

/// Adjoint pass: returns d/dtheta of a real cost given its Wirtinger derivative
/// g = dC/dpsi* at the logical state psi = apply_circuit(params).
std::vector<double> backpropagate(const Ansatz& ansatz, const std::vector<double>& params, const CVec& psi,
                                  const CVec& g);

}  // namespace fkpde
