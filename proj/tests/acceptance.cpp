// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Heavy criteria run through the
// harness and read back summary.json, the same path the CLI takes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fkpde/harness.hpp"
#include "fkpde/multigrid.hpp"
#include "fkpde/objective.hpp"
#include "fkpde/qnpu.hpp"
#include "fkpde/reference.hpp"
#include "fkpde/spectral.hpp"

using namespace fkpde;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

json run_config(const ExperimentConfig& c, const fs::path& dir) {
    const RunResult r = run(c, dir.string());
    if (!r.ok) throw std::runtime_error(r.error);
    return json::parse(r.summary)["result"];
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

PdeProblem random_instance(std::mt19937_64& rng, int n, bool burgers) {
    const std::vector<double> u = uniform(rng, 4, 0.0, 1.0);
    PdeProblem p;
    if (burgers) {
        p.grid = build_grid(n, n, 1.0, 0.02 + 0.03 * u[0]);
        p.diffusion = 0.03 + 0.05 * u[1];
        p.nonlinearity = 0.5 + u[2];
        p.profile = gaussian_profile();
    } else {
        p.grid = build_grid(n, n, 1.0, 0.002 + 0.008 * u[0]);
        p.diffusion = 0.2 + 0.8 * u[1];
        p.profile = shifted_sine_profile(1.0 + 2.0 * u[2]);
    }
    p.taylor_order = u[3] < 0.5 ? 1 : 2;
    return p;
}

// 1. Exact history state has zero energy and is annihilated.
Outcome history_annihilation() {
    std::mt19937_64 rng(2026);
    double worst_e = 0.0, worst_r = 0.0;
    int count = 0;
    for (int n : {2, 3})
        for (bool burgers : {false, true})
            for (int k = 0; k < 5; ++k) {
                const PdeProblem p = random_instance(rng, n, burgers);
                const HistoryState hs = history_state(p);
                const CMat h = assemble_hamiltonian(p, Linearization::at_state(hs.state)).h;
                worst_e = std::max(worst_e, std::abs(hs.state.dot(h * hs.state).real()));
                worst_r = std::max(worst_r, (h * hs.state).norm());
                ++count;
            }
    return {worst_e <= 1e-10 && worst_r <= 1e-9, std::to_string(count) + " instances, max |<H>| " + fmt(worst_e) +
                                                     ", max |H psi| " + fmt(worst_r)};
}

Outcome solve_check(const ExperimentConfig& base, const fs::path& dir, double cost_max, double infid_max) {
    ExperimentConfig c = base;
    c.kind = ExperimentKind::solve;
    c.protocol.seeds = 20;
    const json r = run_config(c, dir);
    const double cost = r["cost"]["total"];
    const double inf = r["infidelity"];
    return {cost <= cost_max && inf <= infid_max,
            "best of " + std::to_string(r["seeds"].get<int>()) + " seeds: cost " + fmt(cost) + " (<= " + fmt(cost_max) +
                "), infidelity " + fmt(inf) + " (<= " + fmt(infid_max) + ")"};
}

// 2. and 3.
Outcome diffusion_reproduction(const fs::path& root) {
    return solve_check(figure_configs("fig3").at(0), root / "c2_diffusion", 1e-10, 1e-5);
}

Outcome burgers_reproduction(const fs::path& root) {
    return solve_check(figure_configs("fig3").at(1), root / "c3_burgers", 1e-3, 1e-3);
}

// 4. Scaling runs with the width-default iteration budgets.
Outcome scaling(const fs::path& root, int seeds_44, int seeds_55) {
    bool pass = true;
    std::string detail;
    struct Target {
        const char* fig;
        int seeds;
        double cost;
        double infid;
    };
    for (const Target& t : {Target{"fig5", seeds_44, 1e-7, 1e-6}, Target{"fig6", seeds_55, 1e-5, 1e-6}}) {
        ExperimentConfig c = figure_configs(t.fig).at(0);
        c.protocol.seeds = t.seeds;
        const json pt = run_config(c, root / ("c4_" + std::string(t.fig)))["points"][0];
        const double cost = pt["cost"]["total"];
        const double inf = pt["infidelity"];
        pass = pass && cost <= t.cost && inf <= t.infid;
        detail += (detail.empty() ? "" : "; ") + std::to_string(pt["n"].get<int>()) + "+" +
                  std::to_string(pt["n"].get<int>()) + " best of " + std::to_string(t.seeds) + ": cost " + fmt(cost) +
                  " (<= " + fmt(t.cost) + "), infidelity " + fmt(inf) + " (<= " + fmt(t.infid) + ")";
    }
    return {pass, detail};
}

// 5. Gate-count pins.
Outcome gate_counts() {
    const QubitOrdering o = QubitOrdering::make(Ordering::reversed_space, 3, 3);
    std::vector<int> qmps;
    for (int r = 1; r <= 3; ++r) qmps.push_back(count_resources(build_qmps(6, 4, r, true, o)).cnot_count);
    bool depth_ok = true;
    for (int layers = 1; layers <= 6; ++layers) {
        const ResourceCount rc = count_resources(build_brickwall(6, layers, 1, o));
        depth_ok = depth_ok && rc.reported_depth * 5 == rc.cnot_count * 2;
    }
    PdeProblem p;
    p.grid = build_grid(3, 3, 1.0, 0.05);
    p.diffusion = 0.05;
    p.nonlinearity = 1.0;
    p.profile = gaussian_profile();
    const std::size_t full = compile_family(p, 1).size();
    const std::size_t cut = compile_family(p, 1, true).size();
    const bool pass = qmps == std::vector<int>{13, 26, 39} && depth_ok && full == 18 && cut == 11;
    return {pass, "qMPS CNOTs " + std::to_string(qmps[0]) + "/" + std::to_string(qmps[1]) + "/" +
                      std::to_string(qmps[2]) + ", brickwall depth = CNOTs/2.5: " + (depth_ok ? "yes" : "no") +
                      ", families " + std::to_string(full) + "/" + std::to_string(cut)};
}

// 6. Circuit family against the dense first-order cost, and the adder permutation.
Outcome qnpu_equivalence() {
    double worst = 0.0;
    int vectors = 0;
    for (int n : {2, 3})
        for (bool burgers : {false, true}) {
            PdeProblem p;
            p.grid = build_grid(n, n, 1.0, burgers ? 0.05 : 0.00625);
            p.diffusion = burgers ? 0.05 : 1.0;
            p.nonlinearity = burgers ? 1.0 : 0.0;
            p.profile = burgers ? gaussian_profile() : shifted_sine_profile(2.0);
            p.taylor_order = 1;
            p.amplitude_map = AmplitudeMap::complex_amplitude;
            const Ansatz a = build_brickwall(2 * n, 3, 1, QubitOrdering::make(Ordering::reversed_space, n, n));
            const CircuitFamily fam = compile_family(p);
            const Objective dense(a, p);
            for (std::uint64_t s = 0; s < 20; ++s) {
                const std::vector<double> th = random_angles(static_cast<std::size_t>(a.n_params), 4000 + s);
                worst = std::max(worst, std::abs(evaluate_family(fam, a, th).report.total - dense.cost(th).total));
                ++vectors;
            }
        }
    bool adder_ok = true;
    for (int w = 1; w <= 6; ++w) {
        const AdderCircuit ad = adder_circuit(w, true);
        const std::size_t dim = std::size_t{1} << w;
        for (std::size_t i = 0; i < dim; ++i) {
            CVec in = CVec::Zero(Eigen::Index{1} << ad.n_wires);
            in(static_cast<Eigen::Index>(i)) = 1.0;
            CVec want = CVec::Zero(in.size());
            want(static_cast<Eigen::Index>((i + 1) % dim)) = 1.0;
            adder_ok = adder_ok && (simulate(ad.gates, ad.n_wires, &in) - want).cwiseAbs().maxCoeff() == 0.0;
        }
    }
    return {worst <= 1e-10 && adder_ok, std::to_string(vectors) + " vectors, max |family - dense| " + fmt(worst) +
                                            ", adder = cyclic permutation (w=1..6): " + (adder_ok ? "yes" : "no")};
}

// 7. Analytic gradients against central differences.
Outcome gradients() {
    double worst = 0.0;
    int points = 0;
    const QubitOrdering o = QubitOrdering::make(Ordering::reversed_space, 3, 3);
    const Ansatz a = build_brickwall(6, 3, 1, o);
    std::vector<std::pair<PdeProblem, CostMode>> classes;
    PdeProblem diff;
    diff.grid = build_grid(3, 3, 1.0, 0.00625);
    diff.profile = shifted_sine_profile(2.0);
    PdeProblem burg;
    burg.grid = build_grid(3, 3, 1.0, 0.05);
    burg.diffusion = 0.05;
    burg.nonlinearity = 1.0;
    burg.profile = gaussian_profile();
    PdeProblem burg_c3 = burg;
    burg_c3.c3 = 1.0;
    std::mt19937_64 rng(7);
    CMat frozen(8, 8);
    for (Eigen::Index j = 0; j < 8; ++j)
        for (Eigen::Index i = 0; i < 8; ++i) frozen(i, j) = uniform(rng, 1, 0.0, 1.0)[0];
    classes.emplace_back(diff, CostMode::self_consistent());
    classes.emplace_back(burg, CostMode::self_consistent());
    classes.emplace_back(burg, CostMode::frozen(frozen));
    classes.emplace_back(burg_c3, CostMode::self_consistent());
    classes.emplace_back(burg_c3, CostMode::frozen(frozen));
    std::uint64_t seed = 100;
    for (const auto& [problem, mode] : classes) {
        const Objective obj(a, problem, mode);
        for (int k = 0; k < 20; ++k) {
            const std::vector<double> th = random_angles(obj.size(), seed++);
            std::vector<double> g;
            obj.cost_and_gradient(th, g);
            const std::vector<double> fd = finite_difference_gradient(obj, th);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                num += (g[i] - fd[i]) * (g[i] - fd[i]);
                den += fd[i] * fd[i];
            }
            worst = std::max(worst, std::sqrt(num / den));
            ++points;
        }
    }
    return {worst < 1e-5, std::to_string(points) + " points over " + std::to_string(classes.size()) +
                              " problem/mode classes, max relative error " + fmt(worst)};
}

// 8. Stability bound, ITE flags, gap shape, linear ITE vs diagonalization.
Outcome spectral() {
    bool pass = true;
    std::string detail;
    const StabilityReport sr = stability_check(0.05, 1.0, 0.1, 0.125);
    pass = pass && sr.dt_max == 0.15625;
    detail += "dt_max " + std::to_string(sr.dt_max);

    const ExperimentConfig base = figure_configs("fig9").at(0);
    for (double dt : {0.05, 0.1, 0.2}) {
        PdeProblem p = base.problem;
        p.grid.dt = dt;
        const IteResult r = ite_ground(p);
        const bool flagged = !r.converged || r.overweighted || r.diverging;
        const bool ok = dt < 0.15 ? (!flagged && r.energy <= 1e-12) : flagged;
        pass = pass && ok;
        std::ostringstream s;
        s << "; dt " << dt << ": E0 " << fmt(r.energy) << (flagged ? " flagged" : " clean") << (ok ? "" : " [unexpected]");
        detail += s.str();
    }

    PdeProblem gp = base.problem;
    gp.grid.dt = 0.05;
    const std::vector<GapPoint> gaps = gap_scan(gp, {2, 3, 4, 5});
    bool gap_ok = true;
    detail += "; E1";
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        gap_ok = gap_ok && gaps[k].e1 > 0.0 && (k == 0 || gaps[k].e1 <= gaps[k - 1].e1);
        detail += " " + fmt(gaps[k].e1);
    }
    pass = pass && gap_ok;

    PdeProblem lin = base.problem;
    lin.nonlinearity = 0.0;
    double worst = 0.0;
    for (int n_t : {2, 3}) {
        lin.grid = build_grid(3, n_t, 1.0, 0.05);
        const IteResult r = ite_ground(lin);
        const double e0 = dense_eigs(assemble_hamiltonian(lin, Linearization::at_state(r.state)).h, 1).values(0);
        worst = std::max(worst, std::abs(r.energy - e0));
    }
    pass = pass && worst <= 1e-8;
    detail += "; linear ITE vs dense " + fmt(worst);
    return {pass, detail};
}

// 9. Multigrid initialization ordering and staged vs direct.
Outcome multigrid(const fs::path& root, int seeds) {
    ExperimentConfig c = figure_configs("fig7").at(0);
    c.protocol.seeds = seeds;
    const json r = run_config(c, root / "c9_multigrid");
    const double step = r["step_initial_cost"], zero = r["zero_initial_cost"], median = r["random_initial_median"];
    const double staged = r["staged_final_cost"], direct = r["direct_final_cost"];
    const int staged_it = r["staged_iterations"], direct_it = r["direct_iterations"];
    const bool order_ok = step < zero && step < median;
    const bool comparable = staged <= 10.0 * direct;
    return {order_ok && comparable, "initial cost step " + fmt(step) + " / zero " + fmt(zero) + " / random median " +
                                        fmt(median) + "; staged " + fmt(staged) + " in " + std::to_string(staged_it) +
                                        " it vs direct " + fmt(direct) + " in " + std::to_string(direct_it) + " it"};
}

// 10. Pauli decomposition of the 2+2 linearized Hamiltonian.
Outcome pauli() {
    PdeProblem p;
    p.grid = build_grid(2, 2, 1.0, 0.05);
    p.diffusion = 0.05;
    p.nonlinearity = 1.0;
    p.profile = gaussian_profile();
    const CVec lin_state = history_state(p).state;
    const CMat h = assemble_hamiltonian(p, Linearization::at_state(lin_state)).h;
    const std::vector<PauliTerm> terms = pauli_decompose(h);
    const double recon = (pauli_reconstruct(terms, 4) - h).cwiseAbs().maxCoeff();
    std::mt19937_64 rng(10);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        CVec psi(16);
        for (Eigen::Index i = 0; i < 16; ++i) psi(i) = cplx(nd(rng), nd(rng));
        psi.normalize();
        worst = std::max(worst, std::abs(expectation_via_paulis(terms, psi) - psi.dot(h * psi).real()));
    }
    return {recon <= 1e-12 && worst <= 1e-10, std::to_string(terms.size()) + " strings, reconstruction " + fmt(recon) +
                                                  ", 100 expectations max error " + fmt(worst)};
}

// 11. Gradient-norm spread across register sizes.
Outcome gradient_variance(const fs::path& root, int ramp_budget) {
    ExperimentConfig c = figure_configs("fig10").at(0);
    c.gradient_variance.seeds = 20;
    if (ramp_budget > 0) c.gradient_variance.ramp_budget = ramp_budget;
    const json result = run_config(c, root / "c11_gradient_variance");
    std::vector<GradientVarianceRow> rows;
    for (const json& r : result["rows"]) {
        GradientVarianceRow row;
        row.n_qubits = r["n_qubits"];
        row.stage = r["stage"];
        row.statistic = r["statistic"];
        rows.push_back(row);
    }
    bool pass = true;
    std::string detail;
    for (const std::string stage : {"random_init", "after_ramp"}) {
        std::vector<GradientVarianceRow> s;
        for (const auto& r : rows)
            if (r.stage == stage) s.push_back(r);
        std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.n_qubits < b.n_qubits; });
        pass = pass && s.size() == 3;
        detail += (detail.empty() ? "" : "; ") + stage + ":";
        for (std::size_t k = 0; k < s.size(); ++k) {
            detail += " " + std::to_string(s[k].n_qubits) + "q " + fmt(s[k].statistic);
            if (k > 0) {
                const double ratio = s[k].statistic / s[k - 1].statistic;
                pass = pass && ratio >= 0.1;
                detail += " (ratio " + fmt(ratio) + ")";
            }
        }
    }
    if (ramp_budget > 0) detail += "; ramp budget " + std::to_string(ramp_budget) + " per stage";
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string out_dir = "acceptance_artifacts";
    std::string only;
    int seeds_44 = 20, seeds_55 = 5, multigrid_seeds = 20, ramp_budget = 0;
    app.add_option("-o,--output", out_dir, "artifact directory");
    app.add_option("--only", only, "comma-separated criterion numbers");
    app.add_option("--seeds-44", seeds_44, "seeds for the 4+4 scaling run");
    app.add_option("--seeds-55", seeds_55, "seeds for the 5+5 scaling run");
    app.add_option("--multigrid-seeds", multigrid_seeds, "seeds for the coarse and direct multigrid solves");
    app.add_option("--ramp-budget", ramp_budget, "per-stage budget of the gradient-variance ramp (0: width default)");
    CLI11_PARSE(app, argc, argv);

    std::set<int> selected;
    {
        std::stringstream s(only);
        std::string tok;
        while (std::getline(s, tok, ','))
            if (!tok.empty()) selected.insert(std::stoi(tok));
    }
    const fs::path root(out_dir);
    fs::create_directories(root);

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, history_annihilation},
        {2, [&] { return diffusion_reproduction(root); }},
        {3, [&] { return burgers_reproduction(root); }},
        {4, [&] { return scaling(root, seeds_44, seeds_55); }},
        {5, gate_counts},
        {6, qnpu_equivalence},
        {7, gradients},
        {8, spectral},
        {9, [&] { return multigrid(root, multigrid_seeds); }},
        {10, pauli},
        {11, [&] { return gradient_variance(root, ramp_budget); }},
    };

    int failures = 0;
    for (const auto& [id, check] : criteria) {
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ["
                  << static_cast<int>(secs) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
