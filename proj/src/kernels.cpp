// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/kernels.hpp"

#include <utility>

namespace fkpde::kernels {

namespace {

inline std::size_t insert_zero(std::size_t k, int q) {
    const std::size_t low = k & ((std::size_t{1} << q) - 1);
    return ((k >> q) << (q + 1)) | low;
}

inline cplx pauli_component(const cplx* b, std::size_t i, int q, Pauli p) {
    const std::size_t bit = std::size_t{1} << q;
    const bool one = (i & bit) != 0;
    switch (p) {
        case Pauli::X:
            return b[i ^ bit];
        case Pauli::Y:
            // Y|0> = i|1>, Y|1> = -i|0>
            return one ? cplx(0, 1) * b[i ^ bit] : cplx(0, -1) * b[i ^ bit];
        case Pauli::Z:
            break;
    }
    return one ? -b[i] : b[i];
}

}  // namespace

namespace omp {

void apply_1q(cplx* psi, int n, int q, const Mat2& u) {
    const auto pairs = static_cast<std::ptrdiff_t>(std::size_t{1} << (n - 1));
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(pairs) >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < pairs; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), q);
        const std::size_t i1 = i0 | bit;
        const cplx a = psi[i0];
        const cplx b = psi[i1];
        psi[i0] = u[0] * a + u[1] * b;
        psi[i1] = u[2] * a + u[3] * b;
    }
}

void apply_diag(cplx* psi, int n, int q, cplx d0, cplx d1) {
    const auto pairs = static_cast<std::ptrdiff_t>(std::size_t{1} << (n - 1));
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(pairs) >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < pairs; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), q);
        psi[i0] *= d0;
        psi[i0 | bit] *= d1;
    }
}

void apply_cnot(cplx* psi, int n, int control, int target) {
    const auto pairs = static_cast<std::ptrdiff_t>(std::size_t{1} << (n - 1));
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(pairs) >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < pairs; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), target);
        if (i0 & cbit) std::swap(psi[i0], psi[i0 | tbit]);
    }
}

void apply_controlled_1q(cplx* psi, int n, std::uint64_t mask, std::uint64_t value, int q, const Mat2& u) {
    const auto pairs = static_cast<std::ptrdiff_t>(std::size_t{1} << (n - 1));
    const std::size_t bit = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(pairs) >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < pairs; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), q);
        if ((i0 & mask) != value) continue;
        const std::size_t i1 = i0 | bit;
        const cplx a = psi[i0];
        const cplx b = psi[i1];
        psi[i0] = u[0] * a + u[1] * b;
        psi[i1] = u[2] * a + u[3] * b;
    }
}

cplx pauli_inner(const cplx* a, const cplx* b, int n, int q, Pauli p) {
    const auto dim = static_cast<std::ptrdiff_t>(std::size_t{1} << n);
    double re = 0.0;
    double im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (static_cast<std::size_t>(dim) >= 2 * kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < dim; ++i) {
        const cplx v = std::conj(a[i]) * pauli_component(b, static_cast<std::size_t>(i), q, p);
        re += v.real();
        im += v.imag();
    }
    return {re, im};
}

}  // namespace omp

namespace serial {

void apply_1q(cplx* psi, int n, int q, const Mat2& u) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cplx a = psi[i];
        const cplx b = psi[i | bit];
        psi[i] = u[0] * a + u[1] * b;
        psi[i | bit] = u[2] * a + u[3] * b;
    }
}

void apply_diag(cplx* psi, int n, int q, cplx d0, cplx d1) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) psi[i] *= (i & bit) ? d1 : d0;
}

void apply_cnot(cplx* psi, int n, int control, int target) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(psi[i], psi[i | tbit]);
}

void apply_controlled_1q(cplx* psi, int n, std::uint64_t mask, std::uint64_t value, int q, const Mat2& u) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & bit) || (i & mask) != value) continue;
        const cplx a = psi[i];
        const cplx b = psi[i | bit];
        psi[i] = u[0] * a + u[1] * b;
        psi[i | bit] = u[2] * a + u[3] * b;
    }
}

cplx pauli_inner(const cplx* a, const cplx* b, int n, int q, Pauli p) {
    const std::size_t dim = std::size_t{1} << n;
    cplx acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += std::conj(a[i]) * pauli_component(b, i, q, p);
    return acc;
}

}  // namespace serial

}  // namespace fkpde::kernels
