// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/qnpu.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace fkpde {

namespace k = kernels;

namespace {

k::Mat2 matrix_of(const QGate& g) {
    switch (g.kind) {
        case QGate::Kind::X: return fixed_matrix(GateKind::X);
        case QGate::Kind::H: return fixed_matrix(GateKind::H);
        case QGate::Kind::Rx: return rotation_matrix(GateKind::Rx, g.angle);
        case QGate::Kind::Ry: return rotation_matrix(GateKind::Ry, g.angle);
        case QGate::Kind::Rz: return rotation_matrix(GateKind::Rz, g.angle);
    }
    return fixed_matrix(GateKind::X);
}

QGate cx(int control, int target, std::vector<int> extra = {}) {
    QGate g;
    g.target = target;
    g.controls = std::move(extra);
    g.controls.push_back(control);
    return g;
}

QGate single(QGate::Kind kind, int wire) {
    QGate g;
    g.kind = kind;
    g.target = wire;
    return g;
}

std::vector<QGate> bind_ops(const std::vector<QOp>& ops, const Ansatz& ansatz, const std::vector<double>& params) {
    if (params.size() != static_cast<std::size_t>(ansatz.n_params))
        throw ValidationError("parameter count does not match the ansatz");
    std::vector<QGate> out;
    for (const QOp& op : ops) {
        if (op.kind == QOp::Kind::gate) {
            out.push_back(op.gate);
            continue;
        }
        for (const Gate& g : ansatz.gates) {
            QGate q;
            q.controls = op.controls;
            switch (g.kind) {
                case GateKind::CNOT:
                    q.kind = QGate::Kind::X;
                    q.target = op.offset + g.target;
                    q.controls.push_back(op.offset + g.wire);
                    break;
                case GateKind::H:
                case GateKind::X:
                    q.kind = g.kind == GateKind::H ? QGate::Kind::H : QGate::Kind::X;
                    q.target = op.offset + g.wire;
                    break;
                case GateKind::Rx:
                case GateKind::Ry:
                case GateKind::Rz:
                    q.kind = g.kind == GateKind::Rx ? QGate::Kind::Rx
                           : g.kind == GateKind::Ry ? QGate::Kind::Ry
                                                    : QGate::Kind::Rz;
                    q.target = op.offset + g.wire;
                    q.angle = g.parametric() ? params[static_cast<std::size_t>(g.slot)] : g.angle;
                    break;
            }
            out.push_back(std::move(q));
        }
    }
    return out;
}

// Wire bookkeeping for one measurement circuit. Main register sits on wires
// [0, n) in the ansatz layout; everything else is allocated on first use.
class Builder {
  public:
    Builder(const PdeProblem& problem, const QubitOrdering& ordering, std::string label)
        : ord_(ordering), n_(ordering.n_qubits()), next_(n_) {
        (void)problem;
        c_.label = std::move(label);
    }

    CompiledCircuit finish() {
        c_.n_wires = next_;
        return std::move(c_);
    }
    CompiledCircuit& circuit() { return c_; }

    std::vector<int> space_wires() const {
        std::vector<int> w;
        for (int b = 0; b < ord_.n_x; ++b) w.push_back(ord_.bit_to_wire[static_cast<std::size_t>(ord_.n_t + b)]);
        return w;
    }
    std::vector<int> time_wires() const {
        std::vector<int> w;
        for (int b = 0; b < ord_.n_t; ++b) w.push_back(ord_.bit_to_wire[static_cast<std::size_t>(b)]);
        return w;
    }

    int ancilla() {
        if (c_.ancilla < 0) c_.ancilla = next_++;
        return c_.ancilla;
    }
    int select() { return lazy(sel_); }
    int flag() { return lazy(flag_); }
    int dup() {
        if (dup_ < 0) {
            dup_ = next_;
            next_ += n_;
        }
        return dup_;
    }
    const std::vector<int>& carries(int width) {
        while (static_cast<int>(carries_.size()) < width - 2) carries_.push_back(next_++);
        return carries_;
    }

    void gate(QGate g) { c_.ops.push_back({QOp::Kind::gate, std::move(g), 0, {}}); }
    void gates(const std::vector<QGate>& gs) {
        for (const QGate& g : gs) gate(g);
    }
    void prepare(int offset, std::vector<int> controls = {}) {
        QOp op;
        op.kind = QOp::Kind::prepare;
        op.offset = offset;
        op.controls = std::move(controls);
        c_.ops.push_back(std::move(op));
    }

    // Pieces of a branch operator, each taking the controls of the branch.
    void shift_up(const std::vector<int>& ctl, const std::vector<int>& anti = {}) { shift(false, ctl, anti); }
    void shift_down(const std::vector<int>& ctl, const std::vector<int>& anti = {}) { shift(true, ctl, anti); }
    void time_down(const std::vector<int>& ctl) {
        std::vector<int> w = time_wires();
        w.push_back(lazy(ext_));
        const std::vector<int>& cr = carries(static_cast<int>(w.size()));
        gates(inverse(adder_gates(w, cr, ctl)));
    }
    void multiply(const std::vector<int>& ctl) {
        const int d = dup();
        prepare(d, ctl);
        for (int w = 0; w < n_; ++w) gate(cx(w, d + w, ctl));
    }
    void project_duplicate() {
        for (int w = 0; w < n_; ++w) c_.postselect.push_back({dup_ + w, 0});
    }
    // flag = 1 exactly when the time register equals `all_ones ? 2^n_t - 1 : 0`.
    void mark_time(bool all_ones) {
        QGate g;
        g.target = flag();
        if (all_ones)
            g.controls = time_wires();
        else
            g.anti_controls = time_wires();
        gate(std::move(g));
        c_.postselect.push_back({flag_, 0});
    }

  private:
    int lazy(int& slot) {
        if (slot < 0) slot = next_++;
        return slot;
    }
    void shift(bool down, const std::vector<int>& ctl, const std::vector<int>& anti) {
        const std::vector<int> w = space_wires();
        std::vector<QGate> g = adder_gates(w, carries(static_cast<int>(w.size())), ctl);
        for (QGate& q : g) q.anti_controls.insert(q.anti_controls.end(), anti.begin(), anti.end());
        if (down) g = inverse(std::move(g));
        gates(g);
    }

    QubitOrdering ord_;
    int n_;
    int next_;
    int sel_ = -1;
    int flag_ = -1;
    int ext_ = -1;
    int dup_ = -1;
    std::vector<int> carries_;
    CompiledCircuit c_;
};

enum class Piece { up, down, mult };

// Hadamard test of Re<psi| [Pbar] [S] V |psi>. V applies `pre`, then either
// `branch0` directly or the select pair (branch0 + branch1)/2 when lcu is set.
struct TermSpec {
    std::string label;
    std::vector<Piece> pre;
    std::vector<Piece> branch0;
    std::vector<Piece> branch1;
    bool lcu = false;
    bool time_shift = false;      // non-periodic decrement on the time register
    bool drop_time_zero = false;  // restrict to time register != 0
};

void apply_pieces(Builder& b, const std::vector<Piece>& ps, const std::vector<int>& ctl,
                  const std::vector<int>& anti = {}) {
    for (Piece p : ps) {
        switch (p) {
            case Piece::up: b.shift_up(ctl, anti); break;
            case Piece::down: b.shift_down(ctl, anti); break;
            case Piece::mult:
                if (!anti.empty()) throw std::logic_error("multiplication cannot sit inside a select branch");
                b.multiply(ctl);
                break;
        }
    }
}

CompiledCircuit hadamard_term(const PdeProblem& problem, const QubitOrdering& ord, const TermSpec& t) {
    Builder b(problem, ord, t.label);
    const int h = b.ancilla();
    b.gate(single(QGate::Kind::H, h));
    b.prepare(0);
    apply_pieces(b, t.pre, {h});
    if (t.lcu) {
        const int s = b.select();
        b.gate(single(QGate::Kind::H, s));
        apply_pieces(b, t.branch0, {h}, {s});
        apply_pieces(b, t.branch1, {h, s});
        b.gate(single(QGate::Kind::H, s));
        b.circuit().postselect.push_back({s, 0});
    } else {
        apply_pieces(b, t.branch0, {h});
    }
    if (t.time_shift) b.time_down({h});
    if (t.drop_time_zero) b.mark_time(false);
    b.gate(single(QGate::Kind::H, h));
    CompiledCircuit c = b.finish();
    c.postselection_rule = t.drop_time_zero ? "time register != 0" : "none";
    if (t.lcu) c.postselection_rule += "; select ancilla = 0";
    return c;
}

// <psi| Pbar A |c|^2 A^dag |psi> (shifted) or <psi| Pbar |c|^2 |psi>, read as a probability.
CompiledCircuit square_probability(const PdeProblem& problem, const QubitOrdering& ord, std::string label, bool shifted) {
    Builder b(problem, ord, std::move(label));
    b.prepare(0);
    if (shifted) b.shift_down({});
    b.multiply({});
    b.project_duplicate();
    b.mark_time(false);
    CompiledCircuit c = b.finish();
    c.postselection_rule = "duplicate register = 0; time register != 0";
    return c;
}

// Re<psi| Pbar A |c|^2 |psi>: the ancilla-0 branch applies A^dag before the gadget.
CompiledCircuit square_hadamard(const PdeProblem& problem, const QubitOrdering& ord, std::string label) {
    Builder b(problem, ord, std::move(label));
    const int h = b.ancilla();
    b.gate(single(QGate::Kind::H, h));
    b.prepare(0);
    b.shift_down({}, {h});
    b.multiply({});
    b.project_duplicate();
    b.mark_time(false);
    b.gate(single(QGate::Kind::H, h));
    CompiledCircuit c = b.finish();
    c.postselection_rule = "duplicate register = 0; time register != 0";
    return c;
}

CompiledCircuit identity_term(const PdeProblem& problem, const QubitOrdering& ord) {
    Builder b(problem, ord, "c1:identity");
    b.prepare(0);
    b.mark_time(true);
    CompiledCircuit c = b.finish();
    c.postselection_rule = "time register != N_t - 1";
    return c;
}

CompiledCircuit time_zero(const PdeProblem& problem, const QubitOrdering& ord) {
    Builder b(problem, ord, "c0:time_zero");
    b.prepare(0);
    for (int w : b.time_wires()) b.circuit().postselect.push_back({w, 0});
    CompiledCircuit c = b.finish();
    c.postselection_rule = "time register = 0";
    return c;
}

// Re(sum psi^2) / sqrt(N): both copies and the pairwise CX under control, then
// a Hadamard layer on the main register, read against |0...0>.
CompiledCircuit real_square(const PdeProblem& problem, const QubitOrdering& ord) {
    Builder b(problem, ord, "c3:real_square");
    const int h = b.ancilla();
    b.gate(single(QGate::Kind::H, h));
    b.prepare(0, {h});
    b.multiply({h});
    for (int w = 0; w < ord.n_qubits(); ++w) {
        QGate g = single(QGate::Kind::H, w);
        g.controls = {h};
        b.gate(std::move(g));
    }
    b.gate(single(QGate::Kind::H, h));
    CompiledCircuit c = b.finish();
    c.postselection_rule = "none";
    return c;
}

double circuit_value(const CVec& state, const CompiledCircuit& c, double& probability) {
    std::uint64_t mask = 0;
    std::uint64_t want = 0;
    for (const Projector& p : c.postselect) {
        mask |= std::uint64_t{1} << p.wire;
        if (p.value) want |= std::uint64_t{1} << p.wire;
    }
    const std::uint64_t hbit = c.ancilla >= 0 ? std::uint64_t{1} << c.ancilla : 0;
    double value = 0.0;
    double prob = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        if ((idx & mask) != want) continue;
        const double w = std::norm(state(i));
        prob += w;
        value += (idx & hbit) ? -w : w;
    }
    probability = prob;
    return value;
}

int cnot_equivalent(const QGate& g) {
    const int k = g.arity() - 1;
    if (k == 0) return 0;
    const bool rotation = g.kind != QGate::Kind::X;
    if (k == 1) return rotation ? 2 : 1;
    // Toffoli = 6 CNOTs; k controls via a ladder of 2k-3 Toffolis on borrowed ancillas.
    const int mcx = 6 * (2 * k - 3);
    return rotation ? 2 * mcx + 2 : mcx;
}

}  // namespace

std::vector<std::string> CircuitFamily::inventory() const {
    std::vector<std::string> out;
    for (const CompiledCircuit& c : circuits)
        for (const std::string& s : c.covers) out.push_back(c.label + " -> " + s);
    return out;
}

std::vector<QGate> adder_gates(const std::vector<int>& wires, const std::vector<int>& carries,
                               const std::vector<int>& controls) {
    const int w = static_cast<int>(wires.size());
    if (w < 1) throw ValidationError("adder width must be >= 1");
    if (static_cast<int>(carries.size()) < w - 2) throw ValidationError("adder needs width-2 carry wires");
    auto bit = [&](int i) { return wires[static_cast<std::size_t>(i)]; };
    // carry(k) holds b_0 & ... & b_{k-1}; carry(1) is b_0 itself.
    auto carry = [&](int kk) { return kk == 1 ? bit(0) : carries[static_cast<std::size_t>(kk - 2)]; };
    auto toffoli = [&](int kk) {
        QGate g;
        g.target = carry(kk);
        g.controls = {carry(kk - 1), bit(kk - 1)};
        return g;
    };
    std::vector<QGate> out;
    for (int kk = 2; kk < w; ++kk) out.push_back(toffoli(kk));
    for (int kk = w - 1; kk >= 1; --kk) {
        out.push_back(cx(carry(kk), bit(kk), controls));
        if (kk >= 2) out.push_back(toffoli(kk));
    }
    QGate x = single(QGate::Kind::X, bit(0));
    x.controls = controls;
    out.push_back(std::move(x));
    return out;
}

std::vector<QGate> inverse(std::vector<QGate> gates) {
    std::reverse(gates.begin(), gates.end());
    for (QGate& g : gates)
        if (g.kind == QGate::Kind::Rx || g.kind == QGate::Kind::Ry || g.kind == QGate::Kind::Rz) g.angle = -g.angle;
    return gates;
}

AdderCircuit adder_circuit(int width, bool modular) {
    if (width < 1) throw ValidationError("adder width must be >= 1");
    AdderCircuit a;
    a.width = width;
    a.modular = modular;
    const int reg = modular ? width : width + 1;
    for (int i = 0; i < reg; ++i) a.register_wires.push_back(i);
    for (int i = 0; i < std::max(0, reg - 2); ++i) a.carry_wires.push_back(reg + i);
    a.n_wires = reg + static_cast<int>(a.carry_wires.size());
    a.gates = adder_gates(a.register_wires, a.carry_wires);
    return a;
}

MultGadget mult_gadget(const Ansatz& ansatz) {
    MultGadget m;
    m.n_main = ansatz.n_qubits;
    QOp prep;
    prep.kind = QOp::Kind::prepare;
    prep.offset = m.n_main;
    m.ops.push_back(prep);
    for (int w = 0; w < m.n_main; ++w) m.ops.push_back({QOp::Kind::gate, cx(w, m.n_main + w), 0, {}});
    return m;
}

CMat effective_operator(const MultGadget& gadget, const Ansatz& ansatz, const std::vector<double>& params) {
    const int n = gadget.n_main;
    if (n != ansatz.n_qubits) throw ValidationError("gadget and ansatz widths differ");
    const std::vector<QGate> gates = bind_ops(gadget.ops, ansatz, params);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    const QubitOrdering& ord = ansatz.ordering;
    auto to_wire = [&](Eigen::Index logical) {
        Eigen::Index w = 0;
        for (int b = 0; b < n; ++b)
            if ((logical >> b) & 1) w |= Eigen::Index{1} << ord.bit_to_wire[static_cast<std::size_t>(b)];
        return w;
    };
    std::vector<Eigen::Index> wire_of(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) wire_of[static_cast<std::size_t>(i)] = to_wire(i);
    CMat out = CMat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        CVec init = CVec::Zero(dim * dim);
        init(wire_of[static_cast<std::size_t>(i)]) = 1.0;
        const CVec fin = simulate(gates, 2 * n, &init);
        for (Eigen::Index kk = 0; kk < dim; ++kk) out(kk, i) = fin(wire_of[static_cast<std::size_t>(kk)]);
    }
    return out;
}

CircuitFamily compile_family(const PdeProblem& problem_in, int order, bool truncated) {
    if (order != 1)
        throw ValidationError("gate-level families exist for a first-order propagator only; use the dense evaluator for order " +
                              std::to_string(order));
    problem_in.validate();
    if (problem_in.slice_rule != SliceRule::per_slice)
        throw ValidationError("gate-level families implement the per-slice pointwise product only");

    CircuitFamily fam;
    fam.problem = problem_in;
    fam.problem.taylor_order = 1;
    fam.problem.amplitude_map = AmplitudeMap::complex_amplitude;
    fam.order = 1;
    fam.truncated = truncated;
    const PdeProblem& p = fam.problem;
    const QubitOrdering ord = QubitOrdering::make(Ordering::reversed_space, p.grid.n_x, p.grid.n_t);

    const double dx = p.grid.dx();
    const double a = p.grid.dt * p.diffusion / (dx * dx);
    const double bp = p.grid.dt * p.nonlinearity / dx;
    const double alpha = 1.0 + 2.0 * a;
    const bool nonlinear = !p.linear();

    auto add = [&](CompiledCircuit c, TermGroup g, double coef, int power, std::vector<std::string> covers) {
        c.group = g;
        c.coefficient = coef;
        c.rescale_power = power;
        c.covers = std::move(covers);
        fam.circuits.push_back(std::move(c));
    };
    auto ht = [&](TermSpec t) { return hadamard_term(p, ord, t); };
    const Piece up = Piece::up;
    const Piece dn = Piece::down;
    const Piece mu = Piece::mult;

    // Cross term -2 Re <psi|S T|psi>, T = alpha I - a(A + A^dag) + b'M(c A^dag - c).
    add(ht({"c2:I", {}, {}, {}, false, true, false}), TermGroup::c2, -2.0 * alpha, 0, {"S"});
    add(ht({"c2:A+A^dag", {}, {up}, {dn}, true, true, false}), TermGroup::c2, 4.0 * a, 0, {"S A", "S A^dag"});
    if (nonlinear) {
        add(ht({"c2:cA^dag", {}, {dn, mu}, {}, false, true, false}), TermGroup::c2, -2.0 * bp, 1, {"S c A^dag"});
        add(ht({"c2:c", {}, {mu}, {}, false, true, false}), TermGroup::c2, 2.0 * bp, 1, {"S c"});
    }

    // <psi| Pbar T^dag T |psi>.
    const double w_id = truncated ? 1.0 + 4.0 * a : alpha * alpha + 2.0 * a * a;
    const double w_k = truncated ? -4.0 * a : -4.0 * alpha * a;
    const double w_n = truncated ? 2.0 * bp : 2.0 * alpha * bp;
    add(ht({"ttt:I", {}, {}, {}, false, false, true}), TermGroup::c1, w_id, 0, {"I"});
    add(ht({"ttt:A+A^dag", {}, {up}, {dn}, true, false, true}), TermGroup::c1, w_k, 0, {"A", "A^dag"});
    if (nonlinear) {
        add(ht({"ttt:cA^dag", {}, {dn, mu}, {}, false, false, true}), TermGroup::c1, w_n, 1, {"c A^dag"});
        add(ht({"ttt:c", {}, {mu}, {}, false, false, true}), TermGroup::c1, -w_n, 1, {"c"});
    }
    if (!truncated) {
        add(ht({"ttt:A^2+A^dag^2", {}, {up, up}, {dn, dn}, true, false, true}), TermGroup::c1, 2.0 * a * a, 0,
            {"A^2", "A^dag^2"});
        if (nonlinear) {
            add(ht({"ttt:AcA^dag", {}, {dn, mu, up}, {}, false, false, true}), TermGroup::c1, -2.0 * a * bp, 1,
                {"A c A^dag"});
            add(ht({"ttt:A^dag cA^dag", {}, {dn, mu, dn}, {}, false, false, true}), TermGroup::c1, -2.0 * a * bp, 1,
                {"A^dag c A^dag"});
            add(ht({"ttt:(A+A^dag)c", {mu}, {up}, {dn}, true, false, true}), TermGroup::c1, 4.0 * a * bp, 1,
                {"A c", "A^dag c"});
            add(square_probability(p, ord, "ttt:A|c|^2A^dag", true), TermGroup::c1, bp * bp, 2, {"A |c|^2 A^dag"});
            add(square_hadamard(p, ord, "ttt:A|c|^2"), TermGroup::c1, -2.0 * bp * bp, 2, {"A |c|^2", "|c|^2 A^dag"});
            add(square_probability(p, ord, "ttt:|c|^2", false), TermGroup::c1, bp * bp, 2, {"|c|^2"});
        }
    }

    add(identity_term(p, ord), TermGroup::c1, 1.0, 0, {"I (t != N_t - 1)"});
    const double sqrt_n = std::sqrt(static_cast<double>(p.grid.dimension()));
    add(real_square(p, ord), TermGroup::c3, -p.c3 * sqrt_n, 0, {"Re sum psi^2 / sqrt(N)"});
    fam.constant = p.c3;
    add(time_zero(p, ord), TermGroup::c0, p.c0, 0, {"|0><0|_t"});
    return fam;
}

std::vector<QGate> bind(const CompiledCircuit& circuit, const Ansatz& ansatz, const std::vector<double>& params) {
    return bind_ops(circuit.ops, ansatz, params);
}

CVec simulate(const std::vector<QGate>& gates, int n_wires, const CVec* initial) {
    if (n_wires < 1 || n_wires > 30) throw ValidationError("simulate: wire count out of range");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_wires);
    CVec psi;
    if (initial) {
        if (initial->size() != dim) throw ValidationError("simulate: initial state has the wrong length");
        psi = *initial;
    } else {
        psi = CVec::Zero(dim);
        psi(0) = 1.0;
    }
    for (const QGate& g : gates) {
        std::uint64_t mask = 0;
        std::uint64_t value = 0;
        for (int c : g.controls) {
            mask |= std::uint64_t{1} << c;
            value |= std::uint64_t{1} << c;
        }
        for (int c : g.anti_controls) mask |= std::uint64_t{1} << c;
        if (g.target < 0 || g.target >= n_wires || (mask >> g.target) & 1U)
            throw ValidationError("simulate: bad gate wiring");
        k::omp::apply_controlled_1q(psi.data(), n_wires, mask, value, g.target, matrix_of(g));
    }
    return psi;
}

FamilyEvaluation evaluate_family(const CircuitFamily& family, const Ansatz& ansatz, const std::vector<double>& params) {
    const PdeProblem& p = family.problem;
    if (ansatz.n_qubits != p.grid.n_qubits()) throw ValidationError("ansatz width does not match the family's grid");
    if (ansatz.ordering.kind != Ordering::reversed_space || ansatz.ordering.n_t != p.grid.n_t)
        throw ValidationError("family circuits assume the reversed_space layout of this grid");

    FamilyEvaluation ev;
    const std::size_t nc = family.circuits.size();
    ev.circuits.resize(nc);
    std::vector<std::exception_ptr> errors(nc);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nc); ++i) {
        try {
            const CompiledCircuit& c = family.circuits[static_cast<std::size_t>(i)];
            const CVec out = simulate(bind(c, ansatz, params), c.n_wires);
            CircuitValue& v = ev.circuits[static_cast<std::size_t>(i)];
            v.label = c.label;
            v.value = circuit_value(out, c, v.postselection_probability);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    double p0 = -1.0;
    for (std::size_t i = 0; i < nc; ++i)
        if (family.circuits[i].group == TermGroup::c0) p0 = ev.circuits[i].value;
    if (p0 < 0.0) throw ValidationError("family has no time-zero circuit");
    if (!(p0 > 0.0)) throw ValidationError("circuit c0:time_zero: postselection probability is 0");
    const SampledProfile init = sample_profile(p.profile, p.grid);
    const double m = init.norm / std::sqrt(p0);

    CostReport& r = ev.report;
    r.mode = "circuit_family";
    r.rescale = m;
    for (std::size_t i = 0; i < nc; ++i) {
        const CompiledCircuit& c = family.circuits[i];
        CircuitValue& v = ev.circuits[i];
        v.weight = c.coefficient * std::pow(m, c.rescale_power);
        const double x = v.weight * v.value;
        switch (c.group) {
            case TermGroup::c0: r.c0_term += x; break;
            case TermGroup::c1: r.c1 += x; break;
            case TermGroup::c2: r.c2 -= x; break;
            case TermGroup::c3: r.c3_term += x; break;
        }
    }
    r.c3_term += family.constant;

    const CVec psi = apply_circuit(ansatz, params);
    const auto nx = static_cast<Eigen::Index>(p.grid.space_points());
    cplx z0 = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i)
        z0 += init.values(i) / init.norm * psi(static_cast<Eigen::Index>(p.grid.index(static_cast<std::size_t>(i), 0)));
    ev.overlap_term = p.c0 * std::norm(z0);
    r.c0_term -= ev.overlap_term;
    r.total = r.c0_term + r.c1 - r.c2 + r.c3_term;
    return ev;
}

CircuitResources gate_resources(const std::vector<QGate>& gates, int n_wires) {
    CircuitResources res;
    res.width = n_wires;
    std::vector<int> level(static_cast<std::size_t>(n_wires), 0);
    for (const QGate& g : gates) {
        std::vector<int> wires = g.controls;
        wires.insert(wires.end(), g.anti_controls.begin(), g.anti_controls.end());
        wires.push_back(g.target);
        int top = 0;
        for (int w : wires) top = std::max(top, level[static_cast<std::size_t>(w)]);
        for (int w : wires) level[static_cast<std::size_t>(w)] = top + 1;
        res.two_qubit_count += cnot_equivalent(g);
    }
    res.depth = level.empty() ? 0 : *std::max_element(level.begin(), level.end());
    return res;
}

ResourceReport resource_report(const CircuitFamily& family, const Ansatz& ansatz) {
    ResourceReport rep;
    const std::vector<double> zeros(static_cast<std::size_t>(ansatz.n_params), 0.0);
    for (const CompiledCircuit& c : family.circuits) {
        CircuitResources r = gate_resources(bind(c, ansatz, zeros), c.n_wires);
        r.label = c.label;
        rep.max_width = std::max(rep.max_width, r.width);
        rep.max_depth = std::max(rep.max_depth, r.depth);
        rep.total_two_qubit += r.two_qubit_count;
        rep.circuits.push_back(std::move(r));
    }
    return rep;
}

}  // namespace fkpde
