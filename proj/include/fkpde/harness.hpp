// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkpde/optimize.hpp"

namespace fkpde {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind {
    solve,
    depth_sweep,
    scaling,
    multigrid,
    spectral,
    qnpu_verify,
    gradient_variance,
    sample,
    fine_grid,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct AnsatzConfig {
    AnsatzFamily family = AnsatzFamily::brickwall;
    int layers = 3;
    int r = 1;
    int chi = 4;
    bool sparse = true;
    Ordering ordering = Ordering::reversed_space;
};

struct ProtocolConfig {
    std::string schedule = "ramp";  // ramp | single
    OptimizerKind optimizer = OptimizerKind::quasi_newton;  // for single
    int seeds = 20;
    std::uint64_t first_seed = 0;
    int budget = 0;  // per stage; 0 picks the width default
    CostMode::Kind mode = CostMode::Kind::self_consistent;
};

struct SamplerConfig {
    long long shots = 25000;
    std::uint64_t seed = 0;
    std::string source = "solve";  // solve | history
};

struct ScalingPoint {
    int n = 4;  // qubits per register
    double dt = 1.0 / 320.0;
    int layers = 4;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ExperimentKind kind = ExperimentKind::solve;
    PdeProblem problem;
    AnsatzConfig ansatz;
    ProtocolConfig protocol;
    std::string output_dir = "artifacts";
    SamplerConfig sampler;
    bool gap_normalized = false;

    std::vector<int> sweep_layers{1, 2, 3, 4, 5};
    std::vector<Ordering> sweep_orderings{Ordering::sequential, Ordering::reversed_space};
    std::vector<ScalingPoint> scaling;
    std::vector<double> stability_dts{0.05, 0.1, 0.2};
    std::vector<int> gap_n_t{2, 3, 4, 5};
    bool excited_ite = false;
    GradientVarianceSettings gradient_variance;
    int multigrid_random_inits = 5;
    bool multigrid_direct = true;
    int qnpu_vectors = 20;
    bool qnpu_export = true;
    std::vector<int> refinements{4, 8, 16};
};

/// Throws ValidationError naming the offending field.
void validate(const ExperimentConfig& config);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

Ansatz make_ansatz(const AnsatzConfig& config, int n_x, int n_t);
RampSchedule make_schedule(const ExperimentConfig& config);
ProtocolSettings make_protocol_settings(const ProtocolConfig& config);

struct RunResult {
    std::string directory;
    std::string summary;  // JSON text, also written to summary.json
    bool ok = true;
    std::string error;
};

/// Runs one experiment into `directory` (config.output_dir when empty).
RunResult run(const ExperimentConfig& config, const std::string& directory = "");

struct ShotSample {
    std::vector<std::uint64_t> counts;  // per flat spacetime index
    long long shots = 0;
    std::uint64_t seed = 0;
    RMat profile;  // M sqrt(count / shots), columns are time slices
    double rescale = 0.0;
    bool rescale_from_state = false;  // no shot hit time 0, M came from |psi|^2
};

/// Multinomial draw from |psi|^2; the profile uses the sampled time-zero weight for M.
/// A state with no weight at time 0 gives an infinite M.
ShotSample shot_sample(const CVec& state, const SpacetimeGrid& grid, double initial_norm, long long shots,
                       std::uint64_t seed);

std::vector<std::string> figure_names();
/// Pre-baked configurations for one figure's data. seeds < 0 keeps the defaults.
std::vector<ExperimentConfig> figure_configs(const std::string& name, int seeds = -1);
std::vector<RunResult> figure_suite(const std::string& name, const std::string& directory, int seeds = -1);

}  // namespace fkpde
