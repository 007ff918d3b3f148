// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fkpde/optimize.hpp"

namespace fkpde {

enum class NewBlockInit {
    step,    // zeros, then a Hadamard-equivalent triple closing each new wire
    zero,    // all zeros: new wires stay in |0>
    random,  // uniform angles on the new blocks
};

struct Expansion {
    Ansatz fine;
    std::vector<double> params;
    std::vector<int> new_blocks;  // indices into fine.blocks
    // Parameter slots free at each unfreeze stage (cumulative).
    std::vector<std::vector<int>> stage_free;
};

/// Adds one finest-scale qubit to each register: a new top wire (time) and a
/// new bottom wire (space) around a reversed-space r=2 brickwall.
Expansion expand(const Ansatz& coarse, const std::vector<double>& coarse_params, NewBlockInit init = NewBlockInit::step,
                 std::uint64_t seed = 0);

/// Profile sampled half a fine spacing to the right, for the coarse solve.
InitialProfile shifted_profile_for_refinement(const InitialProfile& profile, const SpacetimeGrid& fine_grid);

/// The coarse problem matching a fine one: one qubit fewer per register, twice the step.
PdeProblem coarse_problem(const PdeProblem& fine, bool shift_profile = true);

struct StagedSettings {
    std::vector<int> stage_budgets;  // empty: a third of default_budget(fine width) each
    QuasiNewtonSettings quasi_newton;
    CostMode::Kind mode = CostMode::Kind::self_consistent;
};

OptimRun staged_optimize(const PdeProblem& fine_problem, const Expansion& expansion, const StagedSettings& settings = {});

}  // namespace fkpde
