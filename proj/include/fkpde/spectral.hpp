// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkpde/fkham.hpp"

namespace fkpde {

struct EigenPairs {
    RVec values;   // ascending
    CMat vectors;  // columns
};

/// k lowest eigenpairs of a Hermitian matrix (rejects asymmetry above 1e-10).
EigenPairs dense_eigs(const CMat& h, int k);

struct StabilityReport {
    bool stable = true;
    double margin = 0.5;   // 1/2 - D dt / dx^2
    double dt_max = 0.0;   // dx^2 / (2 D), +inf for D = 0
};

StabilityReport stability_check(double diffusion, double nonlinearity, double dt, double dx);

struct IteConfig {
    enum class Integrator {
        euler,        // phi - t H phi with t = tau / |H|
        exponential,  // exp(-t H) phi with t = tau / (E1 - E0) of the frozen H
    } integrator = Integrator::exponential;
    // Fixed tau when > 0. Otherwise tau adapts: x1.5 after an accepted step,
    // x0.5 after a rejected one, starting from tau_scale (euler) or gap_steps.
    double tau = 0.0;
    double tau_scale = 0.1;
    double gap_steps = 2.0;
    int max_steps = 4000;
    double energy_target = 1e-12;
    double residual_target = 1e-8;
    double shift_factor = 2.0;  // excited-state shift c = shift_factor * E1'
    int divergence_window = 50;
    double overweight_factor = 2.0;
    std::uint64_t seed = 0;
};

struct IteResult {
    double energy = 0.0;
    CVec state;
    std::vector<double> trace;
    int steps = 0;
    double residual = 0.0;  // |H(psi) psi - E psi|
    bool converged = false;
    bool diverging = false;    // energy rose over the divergence window
    bool overweighted = false; // last slice norm > overweight_factor * first slice norm
    std::string message;
};

IteResult ite_ground(const PdeProblem& problem, const IteConfig& config = {});
IteResult ite_excited(const PdeProblem& problem, const IteConfig& config = {});

/// H(psi) psi with the Hamiltonian relinearized at psi (no real-value penalty).
CVec apply_hamiltonian(const EnergyEvaluator& evaluator, const CVec& psi);

struct GapPoint {
    int n_t = 0;
    double e0 = 0.0;
    bool ground_converged = false;
    double e1 = 0.0;  // second eigenvalue of H frozen at the ground state
    bool e1_at_history_state = false;  // ground state taken from the implicit march, else from ITE
    // Self-consistent excited-state ITE, reported alongside.
    double ite_e1 = 0.0;
    double ite_residual = 0.0;
    bool ite_converged = false;
};

std::vector<GapPoint> gap_scan(const PdeProblem& problem_template, const std::vector<int>& n_t_values,
                               const IteConfig& config = {}, bool excited_ite = false);

void write_gap_csv(const std::string& path, const std::vector<GapPoint>& points);

}  // namespace fkpde
