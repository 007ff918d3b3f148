// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/lattice.hpp"

#include <cmath>
#include <numbers>

namespace fkpde {

SpacetimeGrid build_grid(int n_x, int n_t, double domain_length, double dt) {
    if (n_x < 1 || n_x > 14) throw ValidationError("n_x must be in [1, 14], got " + std::to_string(n_x));
    if (n_t < 1 || n_t > 14) throw ValidationError("n_t must be in [1, 14], got " + std::to_string(n_t));
    if (!(domain_length > 0.0)) throw ValidationError("domain_length must be positive");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    return SpacetimeGrid{n_x, n_t, domain_length, dt};
}

double InitialProfile::evaluate(double x) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double xs = x + x_offset;
    switch (kind) {
        case ProfileKind::gaussian: {
            const double u = two_pi * xs - std::numbers::pi;
            return std::exp(-u * u);
        }
        case ProfileKind::shifted_sine:
            return shift + std::sin(two_pi * xs);
        case ProfileKind::custom:
            break;
    }
    throw ValidationError("custom profiles have no closed form; use samples");
}

InitialProfile gaussian_profile() {
    InitialProfile p;
    p.kind = ProfileKind::gaussian;
    p.shift = 0.0;
    return p;
}

InitialProfile shifted_sine_profile(double shift) {
    InitialProfile p;
    p.kind = ProfileKind::shifted_sine;
    p.shift = shift;
    return p;
}

SampledProfile sample_profile(const InitialProfile& profile, const SpacetimeGrid& grid) {
    const std::size_t n = grid.space_points();
    SampledProfile out;
    out.values.resize(static_cast<Eigen::Index>(n));
    if (profile.kind == ProfileKind::custom) {
        if (profile.samples.size() != n)
            throw ValidationError("custom profile needs " + std::to_string(n) + " samples, got " +
                                  std::to_string(profile.samples.size()));
        for (std::size_t i = 0; i < n; ++i) out.values(static_cast<Eigen::Index>(i)) = profile.samples[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) out.values(static_cast<Eigen::Index>(i)) = profile.evaluate(grid.x(i));
    }
    out.norm = out.values.norm();
    if (!(out.norm > 0.0) || !std::isfinite(out.norm))
        throw ValidationError("initial profile has zero or non-finite norm");
    return out;
}

namespace {

CMat cyclic_increment(std::size_t n) {
    CMat a = CMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>((i + 1) % n), static_cast<Eigen::Index>(i)) = 1.0;
    return a;
}

}  // namespace

DenseOperator discrete_operator(OperatorKind kind, int n_qubits, double dx) {
    if (n_qubits < 1) throw ValidationError("operator register needs at least one qubit");
    if (kind == OperatorKind::diag_multiplier)
        throw ValidationError("diag_multiplier needs a value vector; use diag_multiplier()");
    const std::size_t n = std::size_t{1} << n_qubits;
    const CMat a = cyclic_increment(n);
    const CMat id = CMat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    switch (kind) {
        case OperatorKind::shift_plus:
            return {a, "shift_plus"};
        case OperatorKind::shift_minus:
            return {a.adjoint(), "shift_minus"};
        case OperatorKind::laplacian:
            return {(a - 2.0 * id + a.adjoint()) / (dx * dx), "laplacian"};
        case OperatorKind::first_derivative:
            return {(a.adjoint() - id) / dx, "first_derivative"};
        case OperatorKind::diag_multiplier:
            break;
    }
    throw ValidationError("unknown operator kind");
}

DenseOperator discrete_operator(OperatorKind kind, const SpacetimeGrid& grid) {
    return discrete_operator(kind, grid.n_x, grid.dx());
}

DenseOperator diag_multiplier(const CVec& values, std::size_t expected_length) {
    if (static_cast<std::size_t>(values.size()) != expected_length)
        throw ValidationError("diag_multiplier expects " + std::to_string(expected_length) + " values, got " +
                              std::to_string(values.size()));
    return {values.asDiagonal().toDenseMatrix(), "diag_multiplier"};
}

}  // namespace fkpde
