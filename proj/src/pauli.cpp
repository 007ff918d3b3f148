// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cstdint>

#include "fkpde/objective.hpp"

namespace fkpde {

namespace {

constexpr int kMaxPauliQubits = 6;

int qubits_of(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw ValidationError("matrix dimension must be a power of two");
    return n;
}

// String index -> (x mask, z mask); characters run from the most significant bit.
struct Masks {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int ys = 0;
};

Masks masks_of(std::uint64_t code, int n, std::string* label) {
    static constexpr char kNames[4] = {'I', 'X', 'Y', 'Z'};
    Masks m;
    if (label) label->assign(static_cast<std::size_t>(n), 'I');
    for (int c = 0; c < n; ++c) {
        const int sym = static_cast<int>((code >> (2 * (n - 1 - c))) & 3U);
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - c);
        if (sym == 1 || sym == 2) m.x |= bit;
        if (sym == 2 || sym == 3) m.z |= bit;
        if (sym == 2) ++m.ys;
        if (label) (*label)[static_cast<std::size_t>(c)] = kNames[sym];
    }
    return m;
}

cplx i_power(int k) {
    switch (k & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

Masks masks_of_label(const std::string& s) {
    Masks m;
    const int n = static_cast<int>(s.size());
    for (int c = 0; c < n; ++c) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - c);
        switch (s[static_cast<std::size_t>(c)]) {
            case 'X': m.x |= bit; break;
            case 'Y': m.x |= bit; m.z |= bit; ++m.ys; break;
            case 'Z': m.z |= bit; break;
            case 'I': break;
            default: throw ValidationError("unknown Pauli symbol in '" + s + "'");
        }
    }
    return m;
}

// <k|P|j> = i^{#Y} (-1)^{popcount(j & z)} delta(k, j ^ x), using Y = i X Z.
cplx element_phase(const Masks& m, std::uint64_t j) {
    const cplx sign = (std::popcount(j & m.z) & 1) ? -1.0 : 1.0;
    return i_power(m.ys) * sign;
}

}  // namespace

std::vector<PauliTerm> pauli_decompose(const CMat& matrix, double drop_below) {
    if (matrix.rows() != matrix.cols()) throw ValidationError("Pauli decomposition needs a square matrix");
    const int n = qubits_of(matrix.rows());
    if (n > kMaxPauliQubits)
        throw ValidationError("Pauli decomposition limited to " + std::to_string(kMaxPauliQubits) +
                              " qubits: the number of strings grows as 4^n");
    const std::uint64_t dim = std::uint64_t{1} << n;
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    std::vector<PauliTerm> out;
    for (std::uint64_t code = 0; code < count; ++code) {
        std::string label;
        const Masks m = masks_of(code, n, &label);
        cplx acc = 0.0;
        for (std::uint64_t j = 0; j < dim; ++j)
            acc += std::conj(element_phase(m, j)) *
                   matrix(static_cast<Eigen::Index>(j ^ m.x), static_cast<Eigen::Index>(j));
        acc /= static_cast<double>(dim);
        if (std::abs(acc) > drop_below || (drop_below == 0.0 && acc != cplx(0.0))) out.push_back({acc, label});
    }
    return out;
}

CMat pauli_reconstruct(const std::vector<PauliTerm>& terms, int n_qubits) {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    CMat out = CMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const PauliTerm& t : terms) {
        if (static_cast<int>(t.paulis.size()) != n_qubits) throw ValidationError("Pauli string width mismatch");
        const Masks m = masks_of_label(t.paulis);
        for (std::uint64_t j = 0; j < dim; ++j)
            out(static_cast<Eigen::Index>(j ^ m.x), static_cast<Eigen::Index>(j)) += t.coefficient * element_phase(m, j);
    }
    return out;
}

double expectation_via_paulis(const std::vector<PauliTerm>& terms, const CVec& state) {
    const std::uint64_t dim = static_cast<std::uint64_t>(state.size());
    cplx total = 0.0;
    for (const PauliTerm& t : terms) {
        const Masks m = masks_of_label(t.paulis);
        cplx e = 0.0;
        for (std::uint64_t j = 0; j < dim; ++j)
            e += std::conj(state(static_cast<Eigen::Index>(j ^ m.x))) * element_phase(m, j) *
                 state(static_cast<Eigen::Index>(j));
        total += t.coefficient * e;
    }
    return total.real();
}

}  // namespace fkpde
