// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fkpde/objective.hpp"

namespace fkpde {

// Returns f(x) and writes the gradient into the second argument.
using ValueGradFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct AdamSettings {
    int steps = 2500;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct QuasiNewtonSettings {
    int max_iterations = 2500;
    int memory = 10;
    double tolerance_factor = 10.0;  // stop when |f_k - f_{k+1}| < factor * machine epsilon
    int max_line_search = 40;
};

enum class OptimizerKind { adam, quasi_newton };

struct StageResult {
    std::string label;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::vector<double> trace;  // cost after each accepted iteration, trace[0] = start
    std::vector<double> params;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool line_search_failed = false;
    bool aborted = false;  // non-finite cost
    std::string message;
};

StageResult adam(const ValueGradFn& fn, std::vector<double> params, const AdamSettings& settings);
StageResult quasi_newton(const ValueGradFn& fn, std::vector<double> params, const QuasiNewtonSettings& settings);

// Only the masked entries move; the rest stay bit-identical.
ValueGradFn masked(const ValueGradFn& fn, const std::vector<double>& full, const std::vector<int>& free_indices);

struct RampStage {
    double diffusion = 1.0;
    double nonlinearity = 0.0;
    OptimizerKind optimizer = OptimizerKind::quasi_newton;
    int max_iterations = 2500;
};

struct RampSchedule {
    std::vector<RampStage> stages;

    void validate() const;
    // D ramps 1/8, 1/4, 1/2, 1 of the target; first stage Adam.
    static RampSchedule diffusion_default(double target_diffusion = 1.0, int budget = 2500);
    // D fixed; beta ramps 0, 1/8, 1/4, 1/2, 1 of the target; first stage Adam.
    static RampSchedule burgers_default(double diffusion = 0.05, double target_nonlinearity = 1.0, int budget = 2500);
    static RampSchedule single(const PdeProblem& problem, OptimizerKind kind, int budget);
};

/// Per-stage iteration budget for a given register width (6 -> 2500, 8 -> 5000, 10+ -> 10000).
int default_budget(int n_qubits);

struct ProtocolSettings {
    AdamSettings adam;
    QuasiNewtonSettings quasi_newton;
    CostMode::Kind mode = CostMode::Kind::self_consistent;
};

struct OptimRun {
    std::uint64_t seed = 0;
    std::vector<double> initial_params;
    std::vector<StageResult> stages;
    std::vector<double> final_params;
    CostReport final_cost;
    [[nodiscard]] int total_iterations() const;
};

struct ProtocolResult {
    std::vector<OptimRun> runs;
    std::size_t best = 0;
    [[nodiscard]] const OptimRun& best_run() const { return runs.at(best); }
};

std::vector<double> random_angles(std::size_t count, std::uint64_t seed);

OptimRun run_stages(const PdeProblem& problem_template, const RampSchedule& schedule, const Ansatz& ansatz,
                    std::vector<double> params, const ProtocolSettings& settings = {});
ProtocolResult run_protocol(const PdeProblem& problem_template, const RampSchedule& schedule, const Ansatz& ansatz,
                            int seeds, const ProtocolSettings& settings = {}, std::uint64_t first_seed = 0);

struct GradientVarianceRow {
    int n_qubits = 0;
    int layers = 0;
    std::string stage;  // "random_init" or "after_ramp"
    int parameters = 0;
    double statistic = 0.0;  // std over seeds of |grad|, divided by sqrt(P)
    double mean_norm = 0.0;
};

struct GradientVarianceSettings {
    std::vector<int> qubit_sizes{6, 8, 10};
    std::vector<int> layers{4};
    int seeds = 20;
    bool include_after_ramp = true;
    // Time step at 6 qubits; halved for every added qubit pair.
    double dt_for_6 = 0.00625;
    ProtocolSettings protocol;
    std::optional<int> ramp_budget;  // overrides default_budget when set
};

std::vector<GradientVarianceRow> gradient_variance_study(const PdeProblem& problem_template,
                                                         const GradientVarianceSettings& settings);
double gradient_norm_statistic(const std::vector<double>& norms, std::size_t n_params);

void write_traces_csv(const std::string& path, const std::vector<OptimRun>& runs);

}  // namespace fkpde
