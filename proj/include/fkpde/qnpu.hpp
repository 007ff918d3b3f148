// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fkpde/circuit.hpp"
#include "fkpde/fkham.hpp"

namespace fkpde {

// A multi-controlled single-qubit gate over the wires of a measurement circuit.
struct QGate {
    enum class Kind { X, H, Rx, Ry, Rz } kind = Kind::X;
    int target = 0;
    std::vector<int> controls;       // fire on |1>
    std::vector<int> anti_controls;  // fire on |0>
    double angle = 0.0;

    [[nodiscard]] int arity() const { return 1 + static_cast<int>(controls.size() + anti_controls.size()); }
};

// Either a fixed gate or a placeholder for U(params)|0> on a register,
// optionally controlled by the Hadamard-test ancilla.
struct QOp {
    enum class Kind { gate, prepare } kind = Kind::gate;
    QGate gate;
    int offset = 0;             // prepare: first wire of the register
    std::vector<int> controls;  // prepare: extra controls on every ansatz gate
};

enum class TermGroup { c0, c1, c2, c3 };

struct Projector {
    int wire = 0;
    int value = 0;
};

struct CompiledCircuit {
    std::string label;
    TermGroup group = TermGroup::c1;
    double coefficient = 0.0;  // final weight = coefficient * M^rescale_power
    int rescale_power = 0;
    int n_wires = 0;
    int ancilla = -1;  // Hadamard-test ancilla, -1: value is <Projectors>
    std::vector<Projector> postselect;
    std::string postselection_rule;
    std::vector<QOp> ops;
    std::vector<std::string> covers;  // operator products this circuit measures
};

struct CircuitFamily {
    PdeProblem problem;
    int order = 1;
    bool truncated = false;
    double constant = 0.0;  // weight-independent part of the cost (c3 offset)
    std::vector<CompiledCircuit> circuits;

    [[nodiscard]] std::size_t size() const { return circuits.size(); }
    [[nodiscard]] std::vector<std::string> inventory() const;
};

/// Increment |i> -> |i+1 mod 2^width> on `wires` (LSB first), with carries held
/// in `carries` (width-2 of them needed). Non-modular: append the extra most
/// significant wire to `wires` yourself. Every gate also takes `controls`.
std::vector<QGate> adder_gates(const std::vector<int>& wires, const std::vector<int>& carries,
                               const std::vector<int>& controls = {});
std::vector<QGate> inverse(std::vector<QGate> gates);

struct AdderCircuit {
    int width = 0;
    bool modular = true;
    int n_wires = 0;
    std::vector<int> register_wires;  // LSB first, including the extra wire when non-modular
    std::vector<int> carry_wires;
    std::vector<QGate> gates;
};

/// Standalone increment on a register of `width` qubits (wires 0..width-1),
/// then the extra wire (non-modular), then carries.
AdderCircuit adder_circuit(int width, bool modular);

struct MultGadget {
    int n_main = 0;
    std::vector<QOp> ops;  // main on wires [0, n), duplicate on [n, 2n)
};

/// Duplicate U(params)|0> on a second register and CX pairwise from main to
/// duplicate. After projecting the duplicate onto |0>, the main register has
/// been multiplied by diag(psi).
MultGadget mult_gadget(const Ansatz& ansatz);

/// Dense operator a gadget induces on the main register once the duplicate is
/// projected onto |0>, in the main register's logical index order.
CMat effective_operator(const MultGadget& gadget, const Ansatz& ansatz, const std::vector<double>& params);

/// Gate-level family for an order-1 propagator. truncated drops the dt^2 part of T^dag T.
CircuitFamily compile_family(const PdeProblem& problem, int order = 1, bool truncated = false);

struct CircuitValue {
    std::string label;
    double value = 0.0;
    double postselection_probability = 1.0;
    double weight = 0.0;
};

struct FamilyEvaluation {
    CostReport report;
    std::vector<CircuitValue> circuits;
    double overlap_term = 0.0;  // c0 |<psi0|slice_0>|^2, evaluated densely
};

FamilyEvaluation evaluate_family(const CircuitFamily& family, const Ansatz& ansatz, const std::vector<double>& params);

/// Expands the prepare placeholders into concrete gates.
std::vector<QGate> bind(const CompiledCircuit& circuit, const Ansatz& ansatz, const std::vector<double>& params);

/// Runs a flat gate list from |0...0> on n wires.
CVec simulate(const std::vector<QGate>& gates, int n_wires, const CVec* initial = nullptr);

struct CircuitResources {
    std::string label;
    int width = 0;
    int depth = 0;
    int two_qubit_count = 0;  // CNOT-equivalent estimate of the decomposed circuit
};

struct ResourceReport {
    std::vector<CircuitResources> circuits;
    int max_width = 0;
    int max_depth = 0;
    int total_two_qubit = 0;
};

CircuitResources gate_resources(const std::vector<QGate>& gates, int n_wires);
ResourceReport resource_report(const CircuitFamily& family, const Ansatz& ansatz);

/// OpenQASM 3 text; one file per circuit written to `directory`.
std::string to_qasm(const CompiledCircuit& circuit, const Ansatz& ansatz, const std::vector<double>& params);
std::vector<std::string> export_family(const CircuitFamily& family, const Ansatz& ansatz,
                                       const std::vector<double>& params, const std::string& directory);

}  // namespace fkpde
