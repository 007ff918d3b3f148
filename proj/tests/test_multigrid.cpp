// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "fkpde/multigrid.hpp"
#include "oracles.hpp"

using namespace fkpde;

namespace {

Ansatz coarse_ansatz(int n, int layers) {
    return build_brickwall(2 * n, layers, 2, QubitOrdering::make(Ordering::reversed_space, n, n));
}

}  // namespace

TEST(Multigrid, ExpansionAddsTwoBlocksPerLayer) {
    const Ansatz c = coarse_ansatz(2, 2);
    const Expansion e = expand(c, oracle::random_params(c.n_params, 1), NewBlockInit::zero);
    EXPECT_EQ(e.fine.n_qubits, 6);
    EXPECT_EQ(e.new_blocks.size(), 4u);
    EXPECT_EQ(e.fine.n_params, c.n_params + 4 * 12);
    EXPECT_EQ(e.params.size(), static_cast<std::size_t>(e.fine.n_params));
}

TEST(Multigrid, ZeroInitEmbedsCoarseState) {
    const Ansatz c = coarse_ansatz(2, 2);
    const std::vector<double> p = oracle::random_params(c.n_params, 2);
    const Expansion e = expand(c, p, NewBlockInit::zero);
    const CVec coarse = apply_circuit(c, p);
    const CVec fine = apply_circuit(e.fine, e.params);
    // new wires are the finest time bit and the finest space bit
    const SpacetimeGrid cg = build_grid(2, 2, 1.0, 0.1), fg = build_grid(3, 3, 1.0, 0.05);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            EXPECT_LT(std::abs(fine(static_cast<Eigen::Index>(fg.index(2 * i, 2 * j))) -
                               coarse(static_cast<Eigen::Index>(cg.index(i, j)))),
                      1e-12);
}

TEST(Multigrid, StepInitSpreadsEachCoarseCell) {
    const Ansatz c = coarse_ansatz(2, 1);
    const std::vector<double> p = oracle::random_params(c.n_params, 3);
    const Expansion e = expand(c, p, NewBlockInit::step);
    const CVec coarse = apply_circuit(c, p);
    const CVec fine = apply_circuit(e.fine, e.params);
    const SpacetimeGrid cg = build_grid(2, 2, 1.0, 0.1), fg = build_grid(3, 3, 1.0, 0.05);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            EXPECT_NEAR(std::abs(fine(static_cast<Eigen::Index>(fg.index(i, j)))),
                        0.5 * std::abs(coarse(static_cast<Eigen::Index>(cg.index(i / 2, j / 2)))), 1e-12);
}

TEST(Multigrid, StagesAreNestedAndEndWithEverything) {
    const Ansatz c = coarse_ansatz(3, 2);
    const Expansion e = expand(c, std::vector<double>(static_cast<std::size_t>(c.n_params), 0.1));
    ASSERT_EQ(e.stage_free.size(), 3u);
    for (std::size_t s = 1; s < e.stage_free.size(); ++s) {
        const std::set<int> prev(e.stage_free[s - 1].begin(), e.stage_free[s - 1].end());
        const std::set<int> cur(e.stage_free[s].begin(), e.stage_free[s].end());
        EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        EXPECT_GT(cur.size(), prev.size());
    }
    EXPECT_EQ(e.stage_free.back().size(), static_cast<std::size_t>(e.fine.n_params));
    const std::set<int> first(e.stage_free[0].begin(), e.stage_free[0].end());
    for (int b : e.new_blocks)
        for (int slot : e.fine.blocks[static_cast<std::size_t>(b)].slots) EXPECT_TRUE(first.count(slot));
}

TEST(Multigrid, RejectsUnsupportedAnsatz) {
    const Ansatz r1 = build_brickwall(4, 1, 1, QubitOrdering::make(Ordering::reversed_space, 2, 2));
    EXPECT_THROW(expand(r1, std::vector<double>(static_cast<std::size_t>(r1.n_params))), ValidationError);
    const Ansatz seq = build_brickwall(4, 1, 2, QubitOrdering::make(Ordering::sequential, 2, 2));
    EXPECT_THROW(expand(seq, std::vector<double>(static_cast<std::size_t>(seq.n_params))), ValidationError);
}

TEST(Multigrid, CoarseProblemHalvesResolution) {
    PdeProblem fine;
    fine.grid = build_grid(4, 4, 1.0, 1.0 / 320.0);
    fine.profile = shifted_sine_profile(1.0);
    const PdeProblem c = coarse_problem(fine);
    EXPECT_EQ(c.grid.n_x, 3);
    EXPECT_EQ(c.grid.n_t, 3);
    EXPECT_DOUBLE_EQ(c.grid.dt, 2.0 / 320.0);
    EXPECT_DOUBLE_EQ(c.profile.x_offset, 0.5 / 16.0);
    EXPECT_DOUBLE_EQ(coarse_problem(fine, false).profile.x_offset, 0.0);
}

TEST(Multigrid, StagedOptimizationOnlyMovesFreeSlots) {
    PdeProblem fine;
    fine.grid = build_grid(3, 3, 1.0, 0.00625);
    fine.profile = shifted_sine_profile(1.0);
    const Ansatz c = coarse_ansatz(2, 1);
    const Expansion e = expand(c, oracle::random_params(c.n_params, 4));
    StagedSettings s;
    s.stage_budgets = {20, 20, 20};
    const OptimRun run = staged_optimize(fine, e, s);
    ASSERT_EQ(run.stages.size(), 3u);
    const std::set<int> first(e.stage_free[0].begin(), e.stage_free[0].end());
    for (int k = 0; k < e.fine.n_params; ++k)
        if (!first.count(k))
            EXPECT_EQ(run.stages[0].params[static_cast<std::size_t>(k)], e.params[static_cast<std::size_t>(k)]);
    EXPECT_LE(run.final_cost.total, Objective(e.fine, fine).cost(e.params).total);
}
