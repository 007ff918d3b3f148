// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fkpde {

namespace k = kernels;

k::Mat2 rotation_matrix(GateKind kind, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    switch (kind) {
        case GateKind::Rx:
            return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
        case GateKind::Ry:
            return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
        case GateKind::Rz:
            return {cplx(c, -s), 0.0, 0.0, cplx(c, s)};
        default:
            break;
    }
    return fixed_matrix(kind);
}

k::Mat2 fixed_matrix(GateKind kind) {
    const double h = std::numbers::sqrt2 / 2.0;
    switch (kind) {
        case GateKind::H:
            return {h, h, h, -h};
        case GateKind::X:
            return {0.0, 1.0, 1.0, 0.0};
        default:
            break;
    }
    throw ValidationError("gate kind has no fixed single-qubit matrix");
}

QubitOrdering QubitOrdering::make(Ordering kind, int n_x, int n_t) {
    if (n_x < 0 || n_t < 0 || n_x + n_t < 1) throw ValidationError("ordering needs at least one qubit");
    QubitOrdering o;
    o.kind = kind;
    o.n_x = n_x;
    o.n_t = n_t;
    const int n = n_x + n_t;
    o.wire_to_bit.resize(static_cast<std::size_t>(n));
    o.bit_to_wire.resize(static_cast<std::size_t>(n));
    for (int w = 0; w < n_t; ++w) o.wire_to_bit[static_cast<std::size_t>(w)] = w;
    for (int k = 0; k < n_x; ++k) {
        const int space_bit = kind == Ordering::sequential ? k : n_x - 1 - k;
        o.wire_to_bit[static_cast<std::size_t>(n_t + k)] = n_t + space_bit;
    }
    for (int w = 0; w < n; ++w) o.bit_to_wire[static_cast<std::size_t>(o.wire_to_bit[static_cast<std::size_t>(w)])] = w;
    return o;
}

namespace {

std::size_t permute_index(std::size_t idx, const std::vector<int>& map) {
    std::size_t out = 0;
    for (std::size_t b = 0; b < map.size(); ++b)
        if (idx & (std::size_t{1} << b)) out |= std::size_t{1} << map[b];
    return out;
}

}  // namespace

CVec QubitOrdering::to_wire_order(const CVec& logical) const {
    CVec out(logical.size());
    for (Eigen::Index i = 0; i < logical.size(); ++i)
        out(static_cast<Eigen::Index>(permute_index(static_cast<std::size_t>(i), bit_to_wire))) = logical(i);
    return out;
}

CVec QubitOrdering::to_logical_order(const CVec& wired) const {
    CVec out(wired.size());
    for (Eigen::Index i = 0; i < wired.size(); ++i)
        out(static_cast<Eigen::Index>(permute_index(static_cast<std::size_t>(i), wire_to_bit))) = wired(i);
    return out;
}

int Ansatz::append_block(int top, int bottom, int reps) {
    Block block{top, bottom, {}};
    for (int rep = 0; rep < reps; ++rep) {
        gates.push_back({GateKind::CNOT, top, bottom});
        for (int w : {top, bottom}) {
            for (GateKind kind : {GateKind::Rz, GateKind::Rx, GateKind::Rz}) {
                block.slots.push_back(n_params);
                gates.push_back({kind, w, -1, n_params++});
            }
        }
    }
    blocks.push_back(std::move(block));
    return static_cast<int>(blocks.size()) - 1;
}

Ansatz build_brickwall(int n_qubits, int layers, int r, const QubitOrdering& ordering) {
    if (n_qubits < 2) throw ValidationError("brickwall needs n_qubits >= 2");
    if (layers < 1) throw ValidationError("brickwall needs layers >= 1");
    if (r != 1 && r != 2) throw ValidationError("brickwall block repetition r must be 1 or 2");
    if (ordering.n_qubits() != n_qubits) throw ValidationError("ordering width does not match n_qubits");
    Ansatz a;
    a.family = AnsatzFamily::brickwall;
    a.n_qubits = n_qubits;
    a.layers = layers;
    a.r = r;
    a.ordering = ordering;
    for (int layer = 0; layer < layers; ++layer) {
        for (int start : {0, 1})
            for (int top = start; top + 1 < n_qubits; top += 2) a.append_block(top, top + 1, r);
    }
    return a;
}

namespace {

void rotation_triple(Ansatz& a, int wire) {
    for (GateKind kind : {GateKind::Rz, GateKind::Rx, GateKind::Rz}) a.gates.push_back({kind, wire, -1, a.n_params++});
}

// Generic two-qubit unit: a leading Rz on the control unless the wire already
// ends in an Rz from an earlier unit, then r CNOT stages.
void two_qubit_unit(Ansatz& a, int top, int bottom, int r, std::vector<bool>& touched) {
    Block block{top, bottom, {}};
    const int first = a.n_params;
    if (!touched[static_cast<std::size_t>(top)]) a.gates.push_back({GateKind::Rz, top, -1, a.n_params++});
    a.gates.push_back({GateKind::CNOT, top, bottom});
    rotation_triple(a, top);
    rotation_triple(a, bottom);
    if (r == 3) {
        a.gates.push_back({GateKind::CNOT, top, bottom});
        a.gates.push_back({GateKind::Rz, top, -1, a.n_params++});
        a.gates.push_back({GateKind::Rx, bottom, -1, a.n_params++});
    }
    if (r >= 2) {
        a.gates.push_back({GateKind::CNOT, top, bottom});
        rotation_triple(a, top);
        rotation_triple(a, bottom);
    }
    for (int s = first; s < a.n_params; ++s) block.slots.push_back(s);
    a.blocks.push_back(std::move(block));
    touched[static_cast<std::size_t>(top)] = true;
    touched[static_cast<std::size_t>(bottom)] = true;
}

}  // namespace

Ansatz build_qmps(int n_qubits, int chi, int r, bool sparse, const QubitOrdering& ordering) {
    if (chi != 2 && chi != 4) throw ValidationError("qmps bond dimension chi must be 2 or 4");
    if (r < 1 || r > 3) throw ValidationError("qmps unit depth r must be 1, 2 or 3");
    if (n_qubits < (chi == 4 ? 3 : 2)) throw ValidationError("qmps needs more qubits for this chi");
    if (ordering.n_qubits() != n_qubits) throw ValidationError("ordering width does not match n_qubits");
    Ansatz a;
    a.family = AnsatzFamily::qmps;
    a.n_qubits = n_qubits;
    a.layers = 1;
    a.r = r;
    a.chi = chi;
    a.sparse = sparse;
    a.ordering = ordering;
    std::vector<bool> touched(static_cast<std::size_t>(n_qubits), false);
    if (chi == 2) {
        for (int q = 0; q + 1 < n_qubits; ++q) two_qubit_unit(a, q, q + 1, r, touched);
        return a;
    }
    // Three-qubit blocks on (q, q+1, q+2). The trailing (q+1, q+2) unit coincides
    // with the first unit of the next block and is only kept on the last block.
    const int units_inner = sparse ? 3 : 5;
    for (int q = 0; q + 2 < n_qubits; ++q) {
        const bool last = q + 3 == n_qubits;
        const int units = units_inner + (last ? 1 : 0);
        for (int u = 0; u < units; ++u) {
            const int top = (u % 2 == 0) ? q : q + 1;
            two_qubit_unit(a, top, top + 1, r, touched);
        }
    }
    return a;
}

int cnot_depth(const Ansatz& ansatz) {
    std::vector<int> level(static_cast<std::size_t>(ansatz.n_qubits), 0);
    int depth = 0;
    for (const Gate& g : ansatz.gates) {
        if (g.kind != GateKind::CNOT) continue;
        auto& lc = level[static_cast<std::size_t>(g.wire)];
        auto& lt = level[static_cast<std::size_t>(g.target)];
        const int l = std::max(lc, lt) + 1;
        lc = lt = l;
        depth = std::max(depth, l);
    }
    return depth;
}

ResourceCount count_resources(const Ansatz& ansatz) {
    ResourceCount rc;
    rc.cnot_count = static_cast<int>(
        std::count_if(ansatz.gates.begin(), ansatz.gates.end(), [](const Gate& g) { return g.kind == GateKind::CNOT; }));
    rc.parameter_count = ansatz.n_params;
    rc.reported_depth = ansatz.family == AnsatzFamily::qmps ? rc.cnot_count : cnot_depth(ansatz);
    return rc;
}

namespace {

void check_params(const Ansatz& ansatz, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != ansatz.n_params)
        throw ValidationError("expected " + std::to_string(ansatz.n_params) + " parameters, got " +
                              std::to_string(params.size()));
}

double gate_angle(const Gate& g, const std::vector<double>& params) {
    return g.parametric() ? params[static_cast<std::size_t>(g.slot)] : g.angle;
}

void apply_gate(cplx* psi, int n, const Gate& g, const std::vector<int>& bit, double angle, bool inverse) {
    const int q = bit[static_cast<std::size_t>(g.wire)];
    switch (g.kind) {
        case GateKind::CNOT:
            k::omp::apply_cnot(psi, n, q, bit[static_cast<std::size_t>(g.target)]);
            return;
        case GateKind::Rz: {
            const double h = 0.5 * (inverse ? -angle : angle);
            k::omp::apply_diag(psi, n, q, std::polar(1.0, -h), std::polar(1.0, h));
            return;
        }
        case GateKind::Rx:
        case GateKind::Ry:
            k::omp::apply_1q(psi, n, q, rotation_matrix(g.kind, inverse ? -angle : angle));
            return;
        case GateKind::H:
        case GateKind::X:
            k::omp::apply_1q(psi, n, q, fixed_matrix(g.kind));
            return;
    }
}

k::Pauli generator_of(GateKind kind) {
    switch (kind) {
        case GateKind::Rx:
            return k::Pauli::X;
        case GateKind::Ry:
            return k::Pauli::Y;
        default:
            return k::Pauli::Z;
    }
}

}  // namespace

CVec apply_circuit(const Ansatz& ansatz, const std::vector<double>& params) {
    check_params(ansatz, params);
    const int n = ansatz.n_qubits;
    CVec psi = CVec::Zero(Eigen::Index{1} << n);
    psi(0) = 1.0;
    const auto& bit = ansatz.ordering.wire_to_bit;
    for (const Gate& g : ansatz.gates) apply_gate(psi.data(), n, g, bit, gate_angle(g, params), false);
    return psi;
}

std::vector<double> backpropagate(const Ansatz& ansatz, const std::vector<double>& params, const CVec& psi,
                                  const CVec& g) {
    check_params(ansatz, params);
    const int n = ansatz.n_qubits;
    const auto& bit = ansatz.ordering.wire_to_bit;
    CVec phi = psi;
    CVec lambda = g;
    std::vector<double> grad(params.size(), 0.0);
    for (auto it = ansatz.gates.rbegin(); it != ansatz.gates.rend(); ++it) {
        const Gate& gate = *it;
        const double angle = gate_angle(gate, params);
        if (gate.parametric()) {
            // dU/dtheta = -i/2 P U, so dC/dtheta = 2 Re<lambda|(-i/2) P phi> = Im<lambda|P phi>.
            const cplx z = k::omp::pauli_inner(lambda.data(), phi.data(), n, bit[static_cast<std::size_t>(gate.wire)],
                                               generator_of(gate.kind));
            grad[static_cast<std::size_t>(gate.slot)] += z.imag();
        }
        apply_gate(phi.data(), n, gate, bit, angle, true);
        apply_gate(lambda.data(), n, gate, bit, angle, true);
    }
    return grad;
}

}  // namespace fkpde
