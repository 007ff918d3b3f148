// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fkpde/circuit.hpp"
#include "fkpde/fkham.hpp"

namespace fkpde {

struct CostMode {
    // relinearized: same value as self_consistent, but the gradient treats the
    // Hamiltonian rebuilt at the current state as constant.
    enum class Kind { self_consistent, frozen, relinearized } kind = Kind::self_consistent;
    CMat frozen_values;  // one column per time slice, physical values

    static CostMode self_consistent() { return {}; }
    static CostMode frozen(const CMat& values) { return {Kind::frozen, values}; }
    static CostMode relinearized() { return {Kind::relinearized, {}}; }
};

/// Cost <H> of the circuit state and its parameter gradient.
class Objective {
  public:
    Objective(Ansatz ansatz, PdeProblem problem, CostMode mode = CostMode::self_consistent());

    [[nodiscard]] const Ansatz& ansatz() const { return ansatz_; }
    [[nodiscard]] const PdeProblem& problem() const { return evaluator_.problem(); }
    [[nodiscard]] const EnergyEvaluator& evaluator() const { return evaluator_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(ansatz_.n_params); }

    CostReport cost(const std::vector<double>& params) const;
    CostReport cost_and_gradient(const std::vector<double>& params, std::vector<double>& grad) const;
    CostReport cost_of_state(const CVec& psi) const;

  private:
    Linearization linearization(const CVec& psi) const;

    Ansatz ansatz_;
    EnergyEvaluator evaluator_;
    CostMode mode_;
};

CostReport cost(const std::vector<double>& params, const Ansatz& ansatz, const PdeProblem& problem,
                const CostMode& mode = CostMode::self_consistent());
std::vector<double> gradient(const std::vector<double>& params, const Ansatz& ansatz, const PdeProblem& problem,
                             const CostMode& mode = CostMode::self_consistent());
/// Central differences of cost(); the reference the analytic gradient is checked against.
std::vector<double> finite_difference_gradient(const Objective& objective, const std::vector<double>& params,
                                               double step = 1e-5);

/// 1 - Re(sum_i psi_i^2).
double real_penalty(const CVec& state);

struct PauliTerm {
    cplx coefficient;
    std::string paulis;  // leftmost character acts on the most significant bit
};

std::vector<PauliTerm> pauli_decompose(const CMat& matrix, double drop_below = 0.0);
CMat pauli_reconstruct(const std::vector<PauliTerm>& terms, int n_qubits);
double expectation_via_paulis(const std::vector<PauliTerm>& terms, const CVec& state);

}  // namespace fkpde
