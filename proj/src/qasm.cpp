// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fkpde/qnpu.hpp"

namespace fkpde {

namespace {

const char* gate_name(QGate::Kind k) {
    switch (k) {
        case QGate::Kind::X: return "x";
        case QGate::Kind::H: return "h";
        case QGate::Kind::Rx: return "rx";
        case QGate::Kind::Ry: return "ry";
        case QGate::Kind::Rz: return "rz";
    }
    return "x";
}

std::string group_name(TermGroup g) {
    switch (g) {
        case TermGroup::c0: return "C0";
        case TermGroup::c1: return "C1";
        case TermGroup::c2: return "C2";
        case TermGroup::c3: return "C3";
    }
    return "?";
}

std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

}  // namespace

std::string to_qasm(const CompiledCircuit& circuit, const Ansatz& ansatz, const std::vector<double>& params) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "// label: " << circuit.label << '\n';
    os << "// group: " << group_name(circuit.group) << '\n';
    os << "// coefficient: " << circuit.coefficient << " * M^" << circuit.rescale_power << '\n';
    os << "// postselection: " << circuit.postselection_rule << '\n';
    os << "// readout: " << (circuit.ancilla >= 0 ? "<Z> on q[" + std::to_string(circuit.ancilla) + "] times projectors"
                                                  : std::string("projector probability"))
       << '\n';
    os << "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n";
    os << "qubit[" << circuit.n_wires << "] q;\n";
    for (const QGate& g : bind(circuit, ansatz, params)) {
        if (!g.controls.empty()) os << "ctrl(" << g.controls.size() << ") @ ";
        if (!g.anti_controls.empty()) os << "negctrl(" << g.anti_controls.size() << ") @ ";
        os << gate_name(g.kind);
        if (g.kind != QGate::Kind::X && g.kind != QGate::Kind::H) os << '(' << g.angle << ')';
        os << ' ';
        for (int c : g.controls) os << "q[" << c << "], ";
        for (int c : g.anti_controls) os << "q[" << c << "], ";
        os << "q[" << g.target << "];\n";
    }
    std::vector<int> read;
    if (circuit.ancilla >= 0) read.push_back(circuit.ancilla);
    for (const Projector& p : circuit.postselect) read.push_back(p.wire);
    if (!read.empty()) {
        os << "bit[" << read.size() << "] c;\n";
        for (std::size_t i = 0; i < read.size(); ++i) os << "c[" << i << "] = measure q[" << read[i] << "];\n";
    }
    return os.str();
}

std::vector<std::string> export_family(const CircuitFamily& family, const Ansatz& ansatz,
                                       const std::vector<double>& params, const std::string& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < family.circuits.size(); ++i) {
        const CompiledCircuit& c = family.circuits[i];
        std::ostringstream name;
        name << std::setw(2) << std::setfill('0') << i << '_' << file_stem(c.label) << ".qasm";
        const std::string path = (std::filesystem::path(directory) / name.str()).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << to_qasm(c, ansatz, params);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace fkpde
