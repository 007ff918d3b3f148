// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fkpde {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

/// Raised when an input violates a precondition; the message names the field.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct SpacetimeGrid {
    int n_x = 1;
    int n_t = 1;
    double domain_length = 1.0;
    double dt = 1.0;

    [[nodiscard]] std::size_t space_points() const { return std::size_t{1} << n_x; }
    [[nodiscard]] std::size_t time_points() const { return std::size_t{1} << n_t; }
    [[nodiscard]] std::size_t dimension() const { return std::size_t{1} << (n_x + n_t); }
    [[nodiscard]] int n_qubits() const { return n_x + n_t; }
    [[nodiscard]] double dx() const { return domain_length / static_cast<double>(space_points()); }
    [[nodiscard]] double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
    [[nodiscard]] double t(std::size_t j) const { return static_cast<double>(j) * dt; }
    // Flat spacetime index: space-major, time index least significant.
    [[nodiscard]] std::size_t index(std::size_t i_space, std::size_t j_time) const {
        return (i_space << n_t) | j_time;
    }
};

SpacetimeGrid build_grid(int n_x, int n_t, double domain_length, double dt);

enum class ProfileKind { gaussian, shifted_sine, custom };

struct InitialProfile {
    ProfileKind kind = ProfileKind::shifted_sine;
    double shift = 2.0;     // additive constant of the sine profile
    double x_offset = 0.0;  // samples are taken at x_i + x_offset
    std::vector<double> samples;  // used by ProfileKind::custom

    [[nodiscard]] double evaluate(double x) const;
};

InitialProfile gaussian_profile();
InitialProfile shifted_sine_profile(double shift);

struct SampledProfile {
    RVec values;
    double norm = 0.0;
    [[nodiscard]] CVec normalized() const { return values.cast<cplx>() / norm; }
};

SampledProfile sample_profile(const InitialProfile& profile, const SpacetimeGrid& grid);

enum class OperatorKind { shift_plus, shift_minus, laplacian, first_derivative, diag_multiplier };

struct DenseOperator {
    CMat matrix;
    std::string label;
};

// Register operators on 2^n_x points. first_derivative is the periodic forward
// difference (f_{i+1} - f_i)/dx, which in terms of the increment A is (A^dag - I)/dx.
DenseOperator discrete_operator(OperatorKind kind, const SpacetimeGrid& grid);
DenseOperator discrete_operator(OperatorKind kind, int n_qubits, double dx);
DenseOperator diag_multiplier(const CVec& values, std::size_t expected_length);

}  // namespace fkpde
