// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "fkpde/harness.hpp"
#include "json.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> seeds;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-c,--config", c.config, "JSON experiment config");
    app->add_option("-o,--out", c.out, "artifact directory (default: outputs.directory)");
    app->add_option("--seed", c.seed, "first seed (overrides protocol.first_seed and sampler.seed)");
    app->add_option("--seeds", c.seeds, "number of seeds (overrides protocol.seeds)");
}

fkpde::ExperimentConfig make_config(const Common& c, fkpde::ExperimentKind fallback,
                                    std::initializer_list<fkpde::ExperimentKind> accepted) {
    fkpde::ExperimentConfig cfg;
    if (!c.config.empty()) {
        cfg = fkpde::load_config(c.config);
        bool ok = false;
        for (auto k : accepted) ok = ok || cfg.kind == k;
        if (!ok) cfg.kind = fallback;
    } else {
        cfg.problem.grid = fkpde::build_grid(3, 3, 1.0, 0.00625);
        cfg.problem.profile = fkpde::shifted_sine_profile(2.0);
        cfg.kind = fallback;
    }
    if (c.seed) {
        cfg.protocol.first_seed = *c.seed;
        cfg.sampler.seed = *c.seed;
    }
    if (c.seeds) cfg.protocol.seeds = *c.seeds;
    fkpde::validate(cfg);
    return cfg;
}

int finish(const fkpde::RunResult& r) {
    std::cout << r.summary << '\n';
    if (!r.ok) {
        std::cerr << nlohmann::json{{"status", "error"}, {"error", r.error}, {"directory", r.directory}}.dump() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using fkpde::ExperimentKind;
    CLI::App app{"Spacetime-Hamiltonian variational PDE solver"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("-j,--threads", threads, "OpenMP threads (0 = runtime default)");

    Common solve_c, sweep_c, mg_c, spec_c, qnpu_c, sample_c;
    CLI::App* solve = app.add_subcommand("solve", "optimize one problem (best of several seeds)");
    add_common(solve, solve_c);
    CLI::App* sweep = app.add_subcommand("sweep", "depth sweep, scaling runs or gradient-variance study");
    add_common(sweep, sweep_c);
    CLI::App* mg = app.add_subcommand("multigrid", "coarse solve, expansion and staged fine optimization");
    add_common(mg, mg_c);
    CLI::App* spectral = app.add_subcommand("spectral", "stability table and gap scan by imaginary time evolution");
    add_common(spectral, spec_c);
    CLI::App* qnpu = app.add_subcommand("qnpu", "gate-level measurement circuits");
    qnpu->require_subcommand(1);
    CLI::App* verify = qnpu->add_subcommand("verify", "compare the circuit family with the dense cost");
    add_common(verify, qnpu_c);
    CLI::App* sample = app.add_subcommand("sample", "shot-noise sampling of a solved or exact state");
    add_common(sample, sample_c);
    CLI::App* figures = app.add_subcommand("figures", "regenerate the data behind one figure");
    std::string fig_name;
    std::string fig_out = "artifacts";
    std::optional<int> fig_seeds;
    figures->add_option("name", fig_name, "figure name")->required();
    figures->add_option("-o,--out", fig_out, "artifact root");
    figures->add_option("--seeds", fig_seeds, "seeds per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (solve->parsed()) {
            auto cfg = make_config(solve_c, ExperimentKind::solve, {ExperimentKind::solve, ExperimentKind::fine_grid});
            return finish(fkpde::run(cfg, solve_c.out));
        }
        if (sweep->parsed()) {
            auto cfg = make_config(sweep_c, ExperimentKind::depth_sweep,
                                   {ExperimentKind::depth_sweep, ExperimentKind::scaling, ExperimentKind::gradient_variance});
            return finish(fkpde::run(cfg, sweep_c.out));
        }
        if (mg->parsed()) {
            auto cfg = make_config(mg_c, ExperimentKind::multigrid, {ExperimentKind::multigrid});
            return finish(fkpde::run(cfg, mg_c.out));
        }
        if (spectral->parsed()) {
            auto cfg = make_config(spec_c, ExperimentKind::spectral, {ExperimentKind::spectral});
            return finish(fkpde::run(cfg, spec_c.out));
        }
        if (verify->parsed()) {
            auto cfg = make_config(qnpu_c, ExperimentKind::qnpu_verify, {ExperimentKind::qnpu_verify});
            return finish(fkpde::run(cfg, qnpu_c.out));
        }
        if (sample->parsed()) {
            auto cfg = make_config(sample_c, ExperimentKind::sample, {ExperimentKind::sample});
            return finish(fkpde::run(cfg, sample_c.out));
        }
        if (figures->parsed()) {
            int status = 0;
            for (const auto& r : fkpde::figure_suite(fig_name, fig_out, fig_seeds.value_or(-1))) status |= finish(r);
            return status;
        }
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"status", "error"}, {"error", e.what()}}.dump() << '\n';
        return 2;
    }
    return 0;
}
