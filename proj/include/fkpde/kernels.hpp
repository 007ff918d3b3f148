// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Statevector kernels. Qubit q addresses bit q of the amplitude index.
// Two implementations share one signature set: `omp` (threaded, used by the
// simulator) and `serial` (straight loops, kept as the test reference).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace fkpde::kernels {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major {u00, u01, u10, u11}

enum class Pauli : std::uint8_t { X, Y, Z };

/// Below this many amplitude pairs the threaded kernels run single-threaded.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

namespace omp {
void apply_1q(cplx* psi, int n, int q, const Mat2& u);
void apply_diag(cplx* psi, int n, int q, cplx d0, cplx d1);
void apply_cnot(cplx* psi, int n, int control, int target);
// Applies u to qubit q on the subspace where (index & mask) == value.
void apply_controlled_1q(cplx* psi, int n, std::uint64_t mask, std::uint64_t value, int q, const Mat2& u);
// <a| P_q |b>
cplx pauli_inner(const cplx* a, const cplx* b, int n, int q, Pauli p);
}  // namespace omp

namespace serial {
void apply_1q(cplx* psi, int n, int q, const Mat2& u);
void apply_diag(cplx* psi, int n, int q, cplx d0, cplx d1);
void apply_cnot(cplx* psi, int n, int control, int target);
void apply_controlled_1q(cplx* psi, int n, std::uint64_t mask, std::uint64_t value, int q, const Mat2& u);
cplx pauli_inner(const cplx* a, const cplx* b, int n, int q, Pauli p);
}  // namespace serial

}  // namespace fkpde::kernels
