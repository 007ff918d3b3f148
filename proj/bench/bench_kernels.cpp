// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fkpde/circuit.hpp"
#include "fkpde/kernels.hpp"

namespace {

using fkpde::kernels::cplx;
using fkpde::kernels::Mat2;

std::vector<cplx> random_state(int n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    std::vector<cplx> v(std::size_t{1} << n);
    for (auto& a : v) a = {d(rng), d(rng)};
    return v;
}

const Mat2 kRot = fkpde::rotation_matrix(fkpde::GateKind::Rx, 0.3);

void BM_apply_1q_serial(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto psi = random_state(n);
    for (auto _ : st)
        for (int q = 0; q < n; ++q) fkpde::kernels::serial::apply_1q(psi.data(), n, q, kRot);
    st.SetItemsProcessed(st.iterations() * n * (std::int64_t{1} << n));
}

void BM_apply_1q_omp(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto psi = random_state(n);
    for (auto _ : st)
        for (int q = 0; q < n; ++q) fkpde::kernels::omp::apply_1q(psi.data(), n, q, kRot);
    st.SetItemsProcessed(st.iterations() * n * (std::int64_t{1} << n));
}

void BM_cnot_serial(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto psi = random_state(n);
    for (auto _ : st)
        for (int q = 0; q + 1 < n; ++q) fkpde::kernels::serial::apply_cnot(psi.data(), n, q, q + 1);
    st.SetItemsProcessed(st.iterations() * (n - 1) * (std::int64_t{1} << n));
}

void BM_cnot_omp(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto psi = random_state(n);
    for (auto _ : st)
        for (int q = 0; q + 1 < n; ++q) fkpde::kernels::omp::apply_cnot(psi.data(), n, q, q + 1);
    st.SetItemsProcessed(st.iterations() * (n - 1) * (std::int64_t{1} << n));
}

void BM_pauli_inner_serial(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto a = random_state(n);
    const auto b = random_state(n);
    for (auto _ : st) benchmark::DoNotOptimize(fkpde::kernels::serial::pauli_inner(a.data(), b.data(), n, 0, fkpde::kernels::Pauli::Y));
}

void BM_pauli_inner_omp(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto a = random_state(n);
    const auto b = random_state(n);
    for (auto _ : st) benchmark::DoNotOptimize(fkpde::kernels::omp::pauli_inner(a.data(), b.data(), n, 0, fkpde::kernels::Pauli::Y));
}

}  // namespace

BENCHMARK(BM_apply_1q_serial)->DenseRange(10, 20, 5);
BENCHMARK(BM_apply_1q_omp)->DenseRange(10, 20, 5);
BENCHMARK(BM_cnot_serial)->DenseRange(10, 20, 5);
BENCHMARK(BM_cnot_omp)->DenseRange(10, 20, 5);
BENCHMARK(BM_pauli_inner_serial)->DenseRange(10, 20, 5);
BENCHMARK(BM_pauli_inner_omp)->DenseRange(10, 20, 5);

BENCHMARK_MAIN();
