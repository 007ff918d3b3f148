// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkpde/lattice.hpp"

namespace fkpde {

class InstabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Which slice's function values enter the propagator acting on slice j.
enum class SliceRule {
    per_slice,     // slice j's own values (pointwise product semantics)
    initial_slice  // time-0 values for every slice
};

// How amplitudes become function values for the nonlinear term.
enum class AmplitudeMap {
    real_part,         // M * Re(e^{-i alpha} psi), phase fixed against the initial state
    complex_amplitude  // M * psi, what a gate-level pointwise product computes
};

struct PdeProblem {
    SpacetimeGrid grid;
    double diffusion = 1.0;
    double nonlinearity = 0.0;
    int taylor_order = 2;
    InitialProfile profile;
    double c0 = 2.0;
    double c3 = 0.0;
    SliceRule slice_rule = SliceRule::per_slice;
    AmplitudeMap amplitude_map = AmplitudeMap::real_part;

    void validate() const;
    [[nodiscard]] bool linear() const { return nonlinearity == 0.0; }
};

enum class Direction { forward, backward };

DenseOperator linearized_generator(const PdeProblem& problem, const CVec& f_values);
DenseOperator propagator(const DenseOperator& generator, double dt, int order, Direction direction);

// Function values of every slice, columns = time slices (2^n_x x 2^n_t).
struct SliceValues {
    CMat values;
    double rescale = 1.0;  // M
    double phase = 0.0;    // alpha removed before taking real parts
};

struct Linearization {
    enum class Kind { state, frozen } kind = Kind::state;
    CVec state;         // Kind::state
    CMat frozen_values; // Kind::frozen, one column per slice

    static Linearization at_state(const CVec& psi);
    static Linearization frozen(const CMat& per_slice);
    static Linearization single_slice(const CVec& f_values, std::size_t n_slices);
};

struct HamiltonianBundle {
    CMat h;
    CMat c0_term;  // unweighted projector term
    CMat c1;
    CMat c2;
    std::vector<CMat> generators;   // L used on slice j
    std::vector<CMat> propagators;  // T(-dt) used on slice j
    CMat linearization_values;
    double rescale = 1.0;
};

HamiltonianBundle assemble_hamiltonian(const PdeProblem& problem, const Linearization& linearization);

struct HistoryState {
    CVec state;         // normalized
    RMat physical;      // unnormalized slice values phi_j, columns = slices
};

/// The state annihilated by the clock operator: phi_0 = f(., t0) and
/// T(-dt)[phi_{j+1}] phi_{j+1} = phi_j, then normalized.
HistoryState history_state(const PdeProblem& problem);

/// M = norm / sqrt(p0), p0 the probability of time index 0.
double rescale_constant(const CVec& state, const SpacetimeGrid& grid, double initial_norm);

SliceValues slice_values(const PdeProblem& problem, const CVec& state);
RMat extract_solution(const CVec& state, const PdeProblem& problem);

// ---- fast slice-wise evaluation -------------------------------------------

struct CostReport {
    double total = 0.0;
    double c0_term = 0.0;  // c0 * <C0>
    double c1 = 0.0;
    double c2 = 0.0;
    double c3_term = 0.0;  // c3 * (1 - Re sum psi^2)
    double rescale = 1.0;
    std::string mode;
};

/// Stencil-based evaluator of <H> and of dC/dpsi*, never forming 2^n matrices.
class EnergyEvaluator {
  public:
    explicit EnergyEvaluator(PdeProblem problem);

    [[nodiscard]] const PdeProblem& problem() const { return problem_; }
    [[nodiscard]] const CVec& initial_state() const { return psi0_; }
    [[nodiscard]] double initial_norm() const { return norm0_; }

    CostReport evaluate(const CVec& psi, const Linearization& lin) const;
    // Also fills g = dC/dpsi*; with a state linearization the dependence of the
    // nonlinear term on psi is included (self-consistent gradient).
    CostReport evaluate_with_gradient(const CVec& psi, const Linearization& lin, CVec& g) const;

    // Apply slice operators (exposed for the spectral and reference modules).
    CVec apply_generator(const CVec& u, const CVec& f) const;
    CVec apply_generator_adjoint(const CVec& v, const CVec& f) const;
    CVec apply_propagator(const CVec& u, const CVec& f) const;           // T(-dt) u
    CVec apply_propagator_adjoint(const CVec& v, const CVec& f) const;   // T(-dt)^dag v
    CVec laplacian(const CVec& u) const;
    CVec derivative(const CVec& u) const;
    CVec derivative_adjoint(const CVec& v) const;

  private:
    CostReport run(const CVec& psi, const Linearization& lin, CVec* g) const;

    PdeProblem problem_;
    CVec psi0_;
    double norm0_ = 1.0;
};

}  // namespace fkpde
