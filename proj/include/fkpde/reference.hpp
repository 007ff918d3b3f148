// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fkpde/fkham.hpp"

namespace fkpde {

struct ReferenceSolution {
    SpacetimeGrid grid;
    RMat values;  // 2^n_x x 2^n_t, columns are grid times
    CVec state;   // normalized spacetime vector in the flat index order
    double abs_tolerance = 1e-10;
    double rel_tolerance = 1e-10;
    std::size_t steps = 0;
};

struct ReferenceOptions {
    double abs_tolerance = 1e-10;
    double rel_tolerance = 1e-10;
    std::size_t max_steps_between_outputs = 200000;
};

/// Method-of-lines solution of df/dt = D Lap f - beta f * Dfwd f on the problem's
/// spatial stencils, sampled at t_j = j dt (adaptive Dormand-Prince 5(4)).
ReferenceSolution integrate_reference(const PdeProblem& problem, const ReferenceOptions& options = {});

/// 1 - |<a|b>| for normalized a, b.
double infidelity(const CVec& a, const CVec& b);
double infidelity(const CVec& state, const ReferenceSolution& reference);

struct FineGridReport {
    int refinement = 1;
    double discretization_error = 0.0;  // sup |coarse reference - fine reference on coarse points|
    double variational_error = 0.0;     // sup |variational solution - coarse reference|, if given
    bool has_variational = false;
    RVec discretization_by_time;
    RVec variational_by_time;
};

/// refinement must be a power of two. solution: optional variational profile matrix
/// on the coarse grid (empty to skip).
FineGridReport fine_grid_comparison(const PdeProblem& problem, int refinement, const RMat& solution = RMat(),
                                    const ReferenceOptions& options = {});

void write_matrix_csv(const std::string& path, const RMat& m, const SpacetimeGrid& grid);

}  // namespace fkpde
