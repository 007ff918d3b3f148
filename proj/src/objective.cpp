// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/objective.hpp"

namespace fkpde {

Objective::Objective(Ansatz ansatz, PdeProblem problem, CostMode mode)
    : ansatz_(std::move(ansatz)), evaluator_(std::move(problem)), mode_(std::move(mode)) {
    if (ansatz_.n_qubits != evaluator_.problem().grid.n_qubits())
        throw ValidationError("ansatz width " + std::to_string(ansatz_.n_qubits) + " does not match grid qubits " +
                              std::to_string(evaluator_.problem().grid.n_qubits()));
    if (ansatz_.ordering.n_t != evaluator_.problem().grid.n_t)
        throw ValidationError("ansatz ordering time width does not match grid n_t");
}

Linearization Objective::linearization(const CVec& psi) const {
    switch (mode_.kind) {
        case CostMode::Kind::frozen: return Linearization::frozen(mode_.frozen_values);
        case CostMode::Kind::relinearized:
            if (!evaluator_.problem().linear())
                return Linearization::frozen(slice_values(evaluator_.problem(), psi).values);
            return Linearization::at_state(psi);
        case CostMode::Kind::self_consistent: break;
    }
    return Linearization::at_state(psi);
}

CostReport Objective::cost_of_state(const CVec& psi) const { return evaluator_.evaluate(psi, linearization(psi)); }

CostReport Objective::cost(const std::vector<double>& params) const {
    return cost_of_state(apply_circuit(ansatz_, params));
}

CostReport Objective::cost_and_gradient(const std::vector<double>& params, std::vector<double>& grad) const {
    const CVec psi = apply_circuit(ansatz_, params);
    CVec g;
    CostReport rep = evaluator_.evaluate_with_gradient(psi, linearization(psi), g);
    grad = backpropagate(ansatz_, params, psi, g);
    return rep;
}

CostReport cost(const std::vector<double>& params, const Ansatz& ansatz, const PdeProblem& problem,
                const CostMode& mode) {
    return Objective(ansatz, problem, mode).cost(params);
}

std::vector<double> gradient(const std::vector<double>& params, const Ansatz& ansatz, const PdeProblem& problem,
                             const CostMode& mode) {
    std::vector<double> g;
    Objective(ansatz, problem, mode).cost_and_gradient(params, g);
    return g;
}

std::vector<double> finite_difference_gradient(const Objective& objective, const std::vector<double>& params,
                                               double step) {
    std::vector<double> g(params.size());
    std::vector<double> probe = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        probe[k] = params[k] + step;
        const double up = objective.cost(probe).total;
        probe[k] = params[k] - step;
        const double down = objective.cost(probe).total;
        probe[k] = params[k];
        g[k] = (up - down) / (2.0 * step);
    }
    return g;
}

double real_penalty(const CVec& state) { return 1.0 - (state.array() * state.array()).sum().real(); }

}  // namespace fkpde
