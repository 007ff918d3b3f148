// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/multigrid.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

namespace fkpde {

Expansion expand(const Ansatz& coarse, const std::vector<double>& coarse_params, NewBlockInit init,
                 std::uint64_t seed) {
    if (coarse.ordering.kind != Ordering::reversed_space)
        throw ValidationError("multigrid expansion needs a reversed_space ansatz");
    if (coarse.family != AnsatzFamily::brickwall || coarse.r != 2)
        throw ValidationError("multigrid expansion needs an r=2 brickwall ansatz");
    if (coarse_params.size() != static_cast<std::size_t>(coarse.n_params))
        throw ValidationError("coarse parameter count mismatch");

    const int n = coarse.n_qubits;
    const int nf = n + 2;
    const int first_col = n / 2;
    const int second_col = (n - 1) / 2;
    const int per_layer = first_col + second_col;

    Expansion out;
    Ansatz& fine = out.fine;
    fine.family = AnsatzFamily::custom;
    fine.n_qubits = nf;
    fine.layers = coarse.layers;
    fine.r = 2;
    fine.ordering = QubitOrdering::make(Ordering::reversed_space, coarse.ordering.n_x + 1, coarse.ordering.n_t + 1);

    std::vector<double>& params = out.params;
    auto copy_block = [&](int cb) {
        const Block& b = coarse.blocks[static_cast<std::size_t>(cb)];
        const int fb = fine.append_block(b.top + 1, b.bottom + 1, 2);
        for (int slot : b.slots) params.push_back(coarse_params[static_cast<std::size_t>(slot)]);
        (void)fb;
    };
    auto new_block = [&](int top) {
        out.new_blocks.push_back(fine.append_block(top, top + 1, 2));
        params.resize(static_cast<std::size_t>(fine.n_params), 0.0);
    };
    for (int layer = 0; layer < coarse.layers; ++layer) {
        const int base = layer * per_layer;
        for (int k = 0; k < first_col; ++k) copy_block(base + k);
        new_block(0);
        for (int k = 0; k < second_col; ++k) copy_block(base + first_col + k);
        new_block(nf - 2);
    }
    if (static_cast<int>(coarse.blocks.size()) != coarse.layers * per_layer)
        throw ValidationError("coarse ansatz does not have the brickwall block layout");

    switch (init) {
        case NewBlockInit::zero: break;
        case NewBlockInit::step: {
            // Slots 6..8 are the closing triple on the top wire, 9..11 on the bottom.
            const Block& top_block = fine.blocks[static_cast<std::size_t>(out.new_blocks[out.new_blocks.size() - 2])];
            const Block& bottom_block = fine.blocks[static_cast<std::size_t>(out.new_blocks.back())];
            for (int k = 6; k < 9; ++k) params[static_cast<std::size_t>(top_block.slots[static_cast<std::size_t>(k)])] = std::numbers::pi / 2;
            for (int k = 9; k < 12; ++k) params[static_cast<std::size_t>(bottom_block.slots[static_cast<std::size_t>(k)])] = std::numbers::pi / 2;
            break;
        }
        case NewBlockInit::random: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
            for (int b : out.new_blocks)
                for (int slot : fine.blocks[static_cast<std::size_t>(b)].slots) params[static_cast<std::size_t>(slot)] = dist(rng);
            break;
        }
    }

    const std::set<int> fresh(out.new_blocks.begin(), out.new_blocks.end());
    auto free_slots = [&](int depth) {
        std::vector<int> slots;
        for (std::size_t b = 0; b < fine.blocks.size(); ++b) {
            const Block& blk = fine.blocks[b];
            bool include = fresh.count(static_cast<int>(b)) > 0;
            for (int d = 1; d <= depth && !include; ++d)
                for (int w : {blk.top, blk.bottom})
                    if (w == d || w == nf - 1 - d) include = true;
            if (depth >= nf) include = true;
            if (include) slots.insert(slots.end(), blk.slots.begin(), blk.slots.end());
        }
        std::sort(slots.begin(), slots.end());
        return slots;
    };
    out.stage_free = {free_slots(1), free_slots(2), free_slots(nf)};
    return out;
}

InitialProfile shifted_profile_for_refinement(const InitialProfile& profile, const SpacetimeGrid& fine_grid) {
    InitialProfile p = profile;
    p.x_offset += 0.5 * fine_grid.dx();
    return p;
}

PdeProblem coarse_problem(const PdeProblem& fine, bool shift_profile) {
    if (fine.grid.n_x < 2 || fine.grid.n_t < 2) throw ValidationError("fine grid too small to coarsen");
    if (fine.profile.kind == ProfileKind::custom) throw ValidationError("custom profiles cannot be coarsened");
    PdeProblem c = fine;
    c.grid = build_grid(fine.grid.n_x - 1, fine.grid.n_t - 1, fine.grid.domain_length, 2.0 * fine.grid.dt);
    if (shift_profile) c.profile = shifted_profile_for_refinement(fine.profile, fine.grid);
    return c;
}

OptimRun staged_optimize(const PdeProblem& fine_problem, const Expansion& expansion, const StagedSettings& settings) {
    std::vector<int> budgets = settings.stage_budgets;
    if (budgets.empty()) {
        const int each = std::max(1, default_budget(expansion.fine.n_qubits) / 3);
        budgets.assign(expansion.stage_free.size(), each);
    }
    if (budgets.size() != expansion.stage_free.size())
        throw ValidationError("staged optimization needs one budget per unfreeze stage");

    const CostMode mode = settings.mode == CostMode::Kind::relinearized ? CostMode::relinearized()
                                                                         : CostMode::self_consistent();
    const Objective obj(expansion.fine, fine_problem, mode);
    const ValueGradFn full = [&obj](const std::vector<double>& x, std::vector<double>& g) {
        return obj.cost_and_gradient(x, g).total;
    };

    OptimRun run;
    run.initial_params = expansion.params;
    std::vector<double> params = expansion.params;
    for (std::size_t s = 0; s < budgets.size(); ++s) {
        const std::vector<int>& free = expansion.stage_free[s];
        std::vector<double> sub(free.size());
        for (std::size_t k = 0; k < free.size(); ++k) sub[k] = params[static_cast<std::size_t>(free[k])];
        QuasiNewtonSettings q = settings.quasi_newton;
        q.max_iterations = budgets[s];
        StageResult res = quasi_newton(masked(full, params, free), std::move(sub), q);
        for (std::size_t k = 0; k < free.size(); ++k) params[static_cast<std::size_t>(free[k])] = res.params[k];
        res.params = params;
        res.label = "unfreeze" + std::to_string(s + 1) + ":" + std::to_string(free.size()) + "_params";
        run.stages.push_back(std::move(res));
    }
    run.final_params = params;
    run.final_cost = Objective(expansion.fine, fine_problem).cost(params);
    return run;
}

}  // namespace fkpde
