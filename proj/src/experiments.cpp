// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fkpde/harness.hpp"
#include "fkpde/multigrid.hpp"
#include "fkpde/qnpu.hpp"
#include "fkpde/reference.hpp"
#include "fkpde/spectral.hpp"
#include "json.hpp"

namespace fkpde {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text << '\n';
}

json cost_json(const CostReport& r) {
    return {{"total", r.total}, {"c0_term", r.c0_term}, {"c1", r.c1},          {"c2", r.c2},
            {"c3_term", r.c3_term}, {"rescale", r.rescale}, {"mode", r.mode}};
}

void write_state_csv(const fs::path& path, const CVec& psi, const SpacetimeGrid& g) {
    std::ofstream out = open_csv(path);
    out << "index,x,t,re,im\n";
    for (std::size_t i = 0; i < g.space_points(); ++i)
        for (std::size_t j = 0; j < g.time_points(); ++j) {
            const cplx a = psi(static_cast<Eigen::Index>(g.index(i, j)));
            out << g.index(i, j) << ',' << g.x(i) << ',' << g.t(j) << ',' << a.real() << ',' << a.imag() << '\n';
        }
}

struct Solved {
    ProtocolResult result;
    CVec state;
    RMat solution;
    ReferenceSolution reference;
    double infidelity = 0.0;
};

Solved solve_core(const ExperimentConfig& c, const fs::path& dir, const std::string& prefix) {
    const PdeProblem& p = c.problem;
    const Ansatz ansatz = make_ansatz(c.ansatz, p.grid.n_x, p.grid.n_t);
    Solved s;
    s.result = run_protocol(p, make_schedule(c), ansatz, c.protocol.seeds, make_protocol_settings(c.protocol),
                            c.protocol.first_seed);
    const OptimRun& best = s.result.best_run();
    s.state = apply_circuit(ansatz, best.final_params);
    s.solution = extract_solution(s.state, p);
    s.reference = integrate_reference(p);
    s.infidelity = infidelity(s.state, s.reference);
    write_traces_csv((dir / (prefix + "traces.csv")).string(), s.result.runs);
    write_matrix_csv((dir / (prefix + "solution.csv")).string(), s.solution, p.grid);
    write_matrix_csv((dir / (prefix + "reference.csv")).string(), s.reference.values, p.grid);
    write_state_csv(dir / (prefix + "state.csv"), s.state, p.grid);
    std::ofstream seeds = open_csv(dir / (prefix + "seeds.csv"));
    seeds << "seed,final_cost,iterations\n";
    for (const OptimRun& r : s.result.runs)
        seeds << r.seed << ',' << r.final_cost.total << ',' << r.total_iterations() << '\n';
    return s;
}

json solve_summary(const Solved& s, const ExperimentConfig& c) {
    const OptimRun& best = s.result.best_run();
    json j;
    j["cost"] = cost_json(best.final_cost);
    j["infidelity"] = s.infidelity;
    j["best_seed"] = best.seed;
    j["seeds"] = s.result.runs.size();
    j["iterations"] = best.total_iterations();
    if (c.gap_normalized && c.problem.grid.dimension() <= 4096) {
        const CMat h = assemble_hamiltonian(c.problem, Linearization::at_state(s.state)).h;
        const double e1 = dense_eigs(h, 2).values(1);
        j["e1"] = e1;
        j["cost_over_e1"] = best.final_cost.total / e1;
    }
    return j;
}

json run_solve(const ExperimentConfig& c, const fs::path& dir) { return solve_summary(solve_core(c, dir, ""), c); }

json run_depth_sweep(const ExperimentConfig& c, const fs::path& dir) {
    const PdeProblem& p = c.problem;
    std::ofstream out = open_csv(dir / "depth_sweep.csv");
    out << "layers,ordering,cnot_count,depth,parameters,seed,cost\n";
    json rows = json::array();
    for (Ordering o : c.sweep_orderings)
        for (int layers : c.sweep_layers) {
            AnsatzConfig a = c.ansatz;
            a.layers = layers;
            a.ordering = o;
            const Ansatz ansatz = make_ansatz(a, p.grid.n_x, p.grid.n_t);
            const ResourceCount rc = count_resources(ansatz);
            const ProtocolResult res = run_protocol(p, make_schedule(c), ansatz, c.protocol.seeds,
                                                    make_protocol_settings(c.protocol), c.protocol.first_seed);
            const std::string oname = o == Ordering::sequential ? "sequential" : "reversed_space";
            for (const OptimRun& r : res.runs)
                out << layers << ',' << oname << ',' << rc.cnot_count << ',' << rc.reported_depth << ','
                    << rc.parameter_count << ',' << r.seed << ',' << r.final_cost.total << '\n';
            rows.push_back({{"layers", layers}, {"ordering", oname}, {"depth", rc.reported_depth},
                            {"best_cost", res.best_run().final_cost.total}});
        }
    return {{"sweep", rows}};
}

json run_scaling(const ExperimentConfig& c, const fs::path& dir) {
    std::ofstream out = open_csv(dir / "scaling.csv");
    out << "n_x,n_t,dt,layers,seed,cost,infidelity\n";
    json rows = json::array();
    for (const ScalingPoint& pt : c.scaling) {
        ExperimentConfig sub = c;
        sub.problem.grid = build_grid(pt.n, pt.n, c.problem.grid.domain_length, pt.dt);
        sub.ansatz.layers = pt.layers;
        const std::string prefix = "n" + std::to_string(pt.n) + "_";
        const Solved s = solve_core(sub, dir, prefix);
        const Ansatz ansatz = make_ansatz(sub.ansatz, pt.n, pt.n);
        for (const OptimRun& r : s.result.runs) {
            const double inf = infidelity(apply_circuit(ansatz, r.final_params), s.reference);
            out << pt.n << ',' << pt.n << ',' << pt.dt << ',' << pt.layers << ',' << r.seed << ',' << r.final_cost.total
                << ',' << inf << '\n';
        }
        json j = solve_summary(s, sub);
        j["n"] = pt.n;
        j["dt"] = pt.dt;
        j["layers"] = pt.layers;
        rows.push_back(j);
    }
    return {{"points", rows}};
}

json run_multigrid(const ExperimentConfig& c, const fs::path& dir) {
    const PdeProblem& fine = c.problem;
    ExperimentConfig coarse_cfg = c;
    coarse_cfg.problem = coarse_problem(fine);
    coarse_cfg.protocol.budget = c.protocol.budget;
    const Ansatz coarse_ansatz = make_ansatz(c.ansatz, fine.grid.n_x - 1, fine.grid.n_t - 1);
    const ProtocolResult coarse = run_protocol(coarse_cfg.problem, make_schedule(coarse_cfg), coarse_ansatz,
                                               c.protocol.seeds, make_protocol_settings(c.protocol),
                                               c.protocol.first_seed);
    write_traces_csv((dir / "coarse_traces.csv").string(), coarse.runs);
    const std::vector<double>& cp = coarse.best_run().final_params;

    std::ofstream out = open_csv(dir / "multigrid.csv");
    out << "init,seed,initial_cost,final_cost\n";
    auto initial_cost = [&](const Expansion& e) { return Objective(e.fine, fine).cost(e.params).total; };

    const Expansion step = expand(coarse_ansatz, cp, NewBlockInit::step);
    const Expansion zero = expand(coarse_ansatz, cp, NewBlockInit::zero);
    const double step_cost = initial_cost(step);
    const double zero_cost = initial_cost(zero);
    std::vector<double> random_costs;
    for (int k = 0; k < c.multigrid_random_inits; ++k) {
        const auto seed = static_cast<std::uint64_t>(k) + c.protocol.first_seed;
        const double rc = initial_cost(expand(coarse_ansatz, cp, NewBlockInit::random, seed));
        random_costs.push_back(rc);
        out << "random," << seed << ',' << rc << ",\n";
    }
    std::vector<double> sorted = random_costs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

    StagedSettings st;
    st.mode = c.protocol.mode;
    const OptimRun staged = staged_optimize(fine, step, st);
    write_traces_csv((dir / "staged_traces.csv").string(), {staged});
    out << "step,0," << step_cost << ',' << staged.final_cost.total << '\n';
    out << "zero,0," << zero_cost << ",\n";

    json j;
    j["coarse_cost"] = coarse.best_run().final_cost.total;
    j["step_initial_cost"] = step_cost;
    j["zero_initial_cost"] = zero_cost;
    j["random_initial_median"] = median;
    j["staged_final_cost"] = staged.final_cost.total;
    j["staged_iterations"] = staged.total_iterations();
    if (c.multigrid_direct) {
        const Ansatz direct_ansatz = make_ansatz(c.ansatz, fine.grid.n_x, fine.grid.n_t);
        const ProtocolResult direct = run_protocol(fine, make_schedule(c), direct_ansatz, c.protocol.seeds,
                                                   make_protocol_settings(c.protocol), c.protocol.first_seed);
        write_traces_csv((dir / "direct_traces.csv").string(), direct.runs);
        j["direct_final_cost"] = direct.best_run().final_cost.total;
        j["direct_iterations"] = direct.best_run().total_iterations();
        j["staged_over_direct"] = staged.final_cost.total / direct.best_run().final_cost.total;
    }
    return j;
}

json run_spectral(const ExperimentConfig& c, const fs::path& dir) {
    const PdeProblem& base = c.problem;
    std::ofstream out = open_csv(dir / "stability.csv");
    out << "dt,ratio,criterion_stable,dt_max,history_state,ite_energy,ite_residual,ite_converged,overweighted,"
           "diverging,flagged,message\n";
    json rows = json::array();
    for (double dt : c.stability_dts) {
        PdeProblem p = base;
        p.grid.dt = dt;
        const StabilityReport sr = stability_check(p.diffusion, p.nonlinearity, dt, p.grid.dx());
        bool history = true;
        try {
            history_state(p);
        } catch (const InstabilityError&) {
            history = false;
        }
        const IteResult r = ite_ground(p);
        const bool flagged = !r.converged || r.overweighted || r.diverging;
        const double ratio = p.diffusion * dt / (p.grid.dx() * p.grid.dx());
        out << dt << ',' << ratio << ',' << sr.stable << ',' << sr.dt_max << ',' << history << ',' << r.energy << ','
            << r.residual << ',' << r.converged << ',' << r.overweighted << ',' << r.diverging << ',' << flagged << ",\""
            << r.message << "\"\n";
        rows.push_back({{"dt", dt}, {"stable", sr.stable}, {"dt_max", sr.dt_max}, {"ite_energy", r.energy},
                        {"converged", r.converged}, {"flagged", flagged}});
    }
    const std::vector<GapPoint> gaps = gap_scan(base, c.gap_n_t, IteConfig{}, c.excited_ite);
    write_gap_csv((dir / "gap.csv").string(), gaps);
    json gj = json::array();
    for (const GapPoint& g : gaps) gj.push_back({{"n_t", g.n_t}, {"e1", g.e1}, {"ground_converged", g.ground_converged}});

    PdeProblem lin = base;
    lin.nonlinearity = 0.0;
    const IteResult li = ite_ground(lin);
    const double dense_e0 = dense_eigs(assemble_hamiltonian(lin, Linearization::at_state(li.state)).h, 1).values(0);
    return {{"stability", rows},
            {"gap", gj},
            {"linear_ite_energy", li.energy},
            {"linear_dense_energy", dense_e0},
            {"linear_difference", std::abs(li.energy - dense_e0)}};
}

json run_qnpu(const ExperimentConfig& c, const fs::path& dir) {
    const PdeProblem& p = c.problem;
    const CircuitFamily fam = compile_family(p, 1, false);
    const CircuitFamily trunc = compile_family(p, 1, true);
    const Ansatz ansatz = make_ansatz(c.ansatz, p.grid.n_x, p.grid.n_t);
    const EnergyEvaluator dense(fam.problem);
    std::ofstream out = open_csv(dir / "qnpu_vs_dense.csv");
    out << "vector,family_cost,dense_cost,difference\n";
    double worst = 0.0;
    std::vector<double> first;
    for (int v = 0; v < c.qnpu_vectors; ++v) {
        const std::vector<double> th =
            random_angles(static_cast<std::size_t>(ansatz.n_params), c.protocol.first_seed + static_cast<std::uint64_t>(v));
        if (v == 0) first = th;
        const double fc = evaluate_family(fam, ansatz, th).report.total;
        const CVec psi = apply_circuit(ansatz, th);
        const double dc = dense.evaluate(psi, Linearization::at_state(psi)).total;
        worst = std::max(worst, std::abs(fc - dc));
        out << v << ',' << fc << ',' << dc << ',' << fc - dc << '\n';
    }
    const ResourceReport rr = resource_report(fam, ansatz);
    std::ofstream res = open_csv(dir / "qnpu_resources.csv");
    res << "label,width,depth,two_qubit_count,coefficient,rescale_power,postselection\n";
    for (std::size_t i = 0; i < rr.circuits.size(); ++i)
        res << rr.circuits[i].label << ',' << rr.circuits[i].width << ',' << rr.circuits[i].depth << ','
            << rr.circuits[i].two_qubit_count << ',' << fam.circuits[i].coefficient << ','
            << fam.circuits[i].rescale_power << ",\"" << fam.circuits[i].postselection_rule << "\"\n";
    if (c.qnpu_export) export_family(fam, ansatz, first, (dir / "qasm").string());
    return {{"family_size", fam.size()},
            {"truncated_size", trunc.size()},
            {"max_abs_difference", worst},
            {"vectors", c.qnpu_vectors},
            {"max_width", rr.max_width},
            {"max_depth", rr.max_depth}};
}

json run_gradient_variance(const ExperimentConfig& c, const fs::path& dir) {
    GradientVarianceSettings gv = c.gradient_variance;
    gv.protocol = make_protocol_settings(c.protocol);
    const std::vector<GradientVarianceRow> rows = gradient_variance_study(c.problem, gv);
    std::ofstream out = open_csv(dir / "gradient_variance.csv");
    out << "n_qubits,layers,stage,parameters,statistic,mean_norm\n";
    json j = json::array();
    for (const GradientVarianceRow& r : rows) {
        out << r.n_qubits << ',' << r.layers << ',' << r.stage << ',' << r.parameters << ',' << r.statistic << ','
            << r.mean_norm << '\n';
        j.push_back({{"n_qubits", r.n_qubits}, {"stage", r.stage}, {"statistic", r.statistic}});
    }
    return {{"rows", j}};
}

json run_sample(const ExperimentConfig& c, const fs::path& dir) {
    const PdeProblem& p = c.problem;
    json j;
    CVec state;
    if (c.sampler.source == "history") {
        state = history_state(p).state;
    } else {
        const Solved s = solve_core(c, dir, "");
        j = solve_summary(s, c);
        state = s.state;
    }
    const SampledProfile init = sample_profile(p.profile, p.grid);
    const ShotSample ss = shot_sample(state, p.grid, init.norm, c.sampler.shots, c.sampler.seed);
    std::ofstream out = open_csv(dir / "counts.csv");
    out << "index,x,t,count\n";
    for (std::size_t i = 0; i < p.grid.space_points(); ++i)
        for (std::size_t t = 0; t < p.grid.time_points(); ++t)
            out << p.grid.index(i, t) << ',' << p.grid.x(i) << ',' << p.grid.t(t) << ','
                << ss.counts[p.grid.index(i, t)] << '\n';
    write_matrix_csv((dir / "sampled_profile.csv").string(), ss.profile, p.grid);
    const RMat exact = extract_solution(state, p).cwiseAbs();
    j["shots"] = ss.shots;
    j["sampler_seed"] = ss.seed;
    j["sampled_rescale"] = ss.rescale;
    j["rescale_from_state"] = ss.rescale_from_state;
    j["sup_error_vs_state"] = (ss.profile - exact).cwiseAbs().maxCoeff();
    return j;
}

json run_fine_grid(const ExperimentConfig& c, const fs::path& dir) {
    const Solved s = solve_core(c, dir, "");
    json j = solve_summary(s, c);
    std::ofstream out = open_csv(dir / "fine_grid.csv");
    out << "refinement,discretization_error,variational_error\n";
    std::ofstream by_t = open_csv(dir / "fine_grid_by_time.csv");
    by_t << "refinement,t,discretization_error,variational_error\n";
    json rows = json::array();
    for (int r : c.refinements) {
        const FineGridReport rep = fine_grid_comparison(c.problem, r, s.solution);
        out << r << ',' << rep.discretization_error << ',' << rep.variational_error << '\n';
        for (Eigen::Index t = 0; t < rep.discretization_by_time.size(); ++t)
            by_t << r << ',' << c.problem.grid.t(static_cast<std::size_t>(t)) << ',' << rep.discretization_by_time(t)
                 << ',' << rep.variational_by_time(t) << '\n';
        rows.push_back({{"refinement", r},
                        {"discretization_error", rep.discretization_error},
                        {"variational_error", rep.variational_error}});
    }
    j["fine_grid"] = rows;
    return j;
}

}  // namespace

RunResult run(const ExperimentConfig& config, const std::string& directory) {
    validate(config);
    RunResult rr;
    rr.directory = directory.empty() ? config.output_dir : directory;
    const fs::path dir(rr.directory);
    fs::create_directories(dir);
    write_text(dir / "config.json", config_to_json(config));

    json summary;
    summary["kind"] = to_string(config.kind);
    summary["schema_version"] = kSchemaVersion;
    try {
        json body;
        switch (config.kind) {
            case ExperimentKind::solve: body = run_solve(config, dir); break;
            case ExperimentKind::depth_sweep: body = run_depth_sweep(config, dir); break;
            case ExperimentKind::scaling: body = run_scaling(config, dir); break;
            case ExperimentKind::multigrid: body = run_multigrid(config, dir); break;
            case ExperimentKind::spectral: body = run_spectral(config, dir); break;
            case ExperimentKind::qnpu_verify: body = run_qnpu(config, dir); break;
            case ExperimentKind::gradient_variance: body = run_gradient_variance(config, dir); break;
            case ExperimentKind::sample: body = run_sample(config, dir); break;
            case ExperimentKind::fine_grid: body = run_fine_grid(config, dir); break;
        }
        summary["result"] = body;
        summary["status"] = "ok";
    } catch (const std::exception& e) {
        rr.ok = false;
        rr.error = e.what();
        summary["status"] = "error";
        summary["error"] = e.what();
    }
    rr.summary = summary.dump(2);
    write_text(dir / "summary.json", rr.summary);
    return rr;
}

std::vector<std::string> figure_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig13"}; }

std::vector<ExperimentConfig> figure_configs(const std::string& name, int seeds) {
    auto diffusion = [](int n, double dt, double shift, int layers) {
        ExperimentConfig c;
        c.problem.grid = build_grid(n, n, 1.0, dt);
        c.problem.diffusion = 1.0;
        c.problem.profile = shifted_sine_profile(shift);
        c.ansatz.layers = layers;
        return c;
    };
    auto burgers = []() {
        ExperimentConfig c;
        c.problem.grid = build_grid(3, 3, 1.0, 0.05);
        c.problem.diffusion = 0.05;
        c.problem.nonlinearity = 1.0;
        c.problem.profile = gaussian_profile();
        c.ansatz.layers = 4;
        return c;
    };
    std::vector<ExperimentConfig> out;
    if (name == "fig3") {
        ExperimentConfig d = diffusion(3, 0.00625, 2.0, 3);
        d.kind = ExperimentKind::sample;
        d.output_dir = "diffusion";
        ExperimentConfig b = burgers();
        b.kind = ExperimentKind::sample;
        b.output_dir = "burgers";
        out = {d, b};
    } else if (name == "fig4") {
        ExperimentConfig d = diffusion(3, 0.00625, 1.0, 3);
        d.kind = ExperimentKind::depth_sweep;
        d.output_dir = "depth_sweep";
        out = {d};
    } else if (name == "fig5" || name == "fig6") {
        ExperimentConfig d = diffusion(3, 0.00625, 1.0, 4);
        d.kind = ExperimentKind::scaling;
        d.scaling = name == "fig5" ? std::vector<ScalingPoint>{{4, 1.0 / 320.0, 4}}
                                   : std::vector<ScalingPoint>{{5, 1.0 / 640.0, 6}};
        d.output_dir = "scaling";
        out = {d};
    } else if (name == "fig7") {
        ExperimentConfig d = diffusion(4, 1.0 / 320.0, 1.0, 2);
        d.kind = ExperimentKind::multigrid;
        d.ansatz.r = 2;
        d.output_dir = "multigrid";
        out = {d};
    } else if (name == "fig9") {
        ExperimentConfig b = burgers();
        b.kind = ExperimentKind::spectral;
        b.output_dir = "spectral";
        out = {b};
    } else if (name == "fig10") {
        ExperimentConfig d = diffusion(3, 0.00625, 1.0, 4);
        d.kind = ExperimentKind::gradient_variance;
        d.output_dir = "gradient_variance";
        out = {d};
    } else if (name == "fig13") {
        ExperimentConfig d = diffusion(3, 0.00625, 2.0, 3);
        d.kind = ExperimentKind::fine_grid;
        d.output_dir = "diffusion";
        ExperimentConfig b = burgers();
        b.kind = ExperimentKind::fine_grid;
        b.output_dir = "burgers";
        out = {d, b};
    } else {
        throw ValidationError("unknown figure '" + name + "'");
    }
    if (seeds > 0)
        for (ExperimentConfig& c : out) {
            c.protocol.seeds = seeds;
            c.gradient_variance.seeds = std::max(2, seeds);
        }
    return out;
}

std::vector<RunResult> figure_suite(const std::string& name, const std::string& directory, int seeds) {
    std::vector<RunResult> out;
    for (const ExperimentConfig& c : figure_configs(name, seeds))
        out.push_back(run(c, (fs::path(directory) / name / c.output_dir).string()));
    return out;
}

}  // namespace fkpde
