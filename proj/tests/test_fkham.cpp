// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fkpde/fkham.hpp"
#include "oracles.hpp"

using namespace fkpde;

namespace {

PdeProblem make(int n_x, int n_t, double d, double beta, int order, double dt) {
    PdeProblem p;
    p.grid = build_grid(n_x, n_t, 1.0, dt);
    p.diffusion = d;
    p.nonlinearity = beta;
    p.taylor_order = order;
    p.profile = beta > 0 ? gaussian_profile() : shifted_sine_profile(2.0);
    return p;
}

CMat random_values(int rows, int cols, unsigned seed) {
    CMat m(rows, cols);
    for (int j = 0; j < cols; ++j) m.col(j) = 2.0 * oracle::random_state(rows, seed + static_cast<unsigned>(j));
    return m;
}

std::vector<CVec> columns(const CMat& m) {
    std::vector<CVec> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
    return out;
}

}  // namespace

TEST(Hamiltonian, MatchesLiteralKroneckerConstruction) {
    for (int order : {1, 2})
        for (double beta : {0.0, 0.7}) {
            PdeProblem p = make(2, 2, 0.3, beta, order, 0.02);
            const CMat f = random_values(4, 4, 31);
            const HamiltonianBundle b = assemble_hamiltonian(p, Linearization::frozen(f));
            const CVec psi0 = sample_profile(p.profile, p.grid).normalized();
            const CMat ref =
                oracle::clock_hamiltonian(2, 2, p.grid.dt, p.grid.dx(), p.diffusion, beta, order, columns(f), psi0, p.c0);
            EXPECT_LT((b.h - ref).norm(), 1e-10 * ref.norm()) << order << " " << beta;
        }
}

TEST(Hamiltonian, IsHermitian) {
    PdeProblem p = make(2, 3, 0.05, 1.0, 2, 0.05);
    const HamiltonianBundle b = assemble_hamiltonian(p, Linearization::at_state(oracle::random_state(32, 2)));
    EXPECT_LT((b.h - b.h.adjoint()).norm(), 1e-10);
}

TEST(Hamiltonian, GeneratorWithConstantValues) {
    PdeProblem p = make(3, 1, 0.0, 1.0, 1, 0.1);
    const CMat l = linearized_generator(p, CVec::Constant(8, 2.5)).matrix;
    EXPECT_LT((l + 2.5 * oracle::forward_difference(8, 0.125)).norm(), 1e-12);
}

TEST(Hamiltonian, BackwardPropagatorTaylorTerms) {
    PdeProblem p = make(2, 1, 0.4, 0.0, 2, 0.01);
    const DenseOperator l = linearized_generator(p, CVec::Zero(4));
    const CMat lm = oracle::laplacian(4, 0.25) * 0.4;
    const CMat id = CMat::Identity(4, 4);
    EXPECT_LT((propagator(l, 0.01, 1, Direction::backward).matrix - (id - 0.01 * lm)).norm(), 1e-12);
    EXPECT_LT((propagator(l, 0.01, 2, Direction::backward).matrix - (id - 0.01 * lm + 0.5e-4 * lm * lm)).norm(),
              1e-12);
    EXPECT_LT((propagator(l, 0.01, 2, Direction::forward).matrix - (id + 0.01 * lm + 0.5e-4 * lm * lm)).norm(),
              1e-12);
}

TEST(Hamiltonian, HistoryStateIsAnnihilated) {
    for (int n : {2, 3})
        for (double beta : {0.0, 1.0})
            for (int order : {1, 2}) {
                PdeProblem p = make(n, n, beta > 0 ? 0.05 : 1.0, beta, order, beta > 0 ? 0.05 : 0.00625);
                const HistoryState hs = history_state(p);
                EXPECT_NEAR(hs.state.norm(), 1.0, 1e-12);
                const HamiltonianBundle b = assemble_hamiltonian(p, Linearization::at_state(hs.state));
                const double energy = hs.state.dot(b.h * hs.state).real();
                EXPECT_LE(std::abs(energy), 1e-10);
                EXPECT_LE((b.h * hs.state).norm(), 1e-9);
                EnergyEvaluator ev(p);
                EXPECT_LE(std::abs(ev.evaluate(hs.state, Linearization::at_state(hs.state)).total), 1e-10);
            }
}

TEST(Hamiltonian, HistoryStateStartsFromProfile) {
    PdeProblem p = make(3, 2, 1.0, 0.0, 2, 0.00625);
    const HistoryState hs = history_state(p);
    const SampledProfile s = sample_profile(p.profile, p.grid);
    EXPECT_LT((hs.physical.col(0) - s.values).norm(), 1e-12);
    const RMat extracted = extract_solution(hs.state, p);
    EXPECT_LT((extracted - hs.physical).norm(), 1e-10);
}

TEST(Hamiltonian, BurgersWaveMovesRight) {
    PdeProblem p = make(3, 3, 0.05, 1.0, 2, 0.05);
    const RMat phys = history_state(p).physical;
    auto centre = [&](Eigen::Index j) {
        const RVec w = phys.col(j).array().square();
        double num = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) num += static_cast<double>(i) * w(i);
        return num / w.sum();
    };
    EXPECT_GT(centre(phys.cols() - 1), centre(0) + 0.3);
}

TEST(Hamiltonian, DiffusionDecaysMeanPreserved) {
    PdeProblem p = make(3, 3, 1.0, 0.0, 1, 0.00625);
    const RMat phys = history_state(p).physical;
    for (Eigen::Index j = 1; j < phys.cols(); ++j) {
        EXPECT_NEAR(phys.col(j).sum(), phys.col(0).sum(), 1e-10);
        const RVec prev = phys.col(j - 1).array() - phys.col(j - 1).mean();
        const RVec cur = phys.col(j).array() - phys.col(j).mean();
        EXPECT_LT(cur.norm(), prev.norm());
    }
}

TEST(Hamiltonian, EvaluatorMatchesDenseExpectation) {
    for (double beta : {0.0, 1.0})
        for (int order : {1, 2}) {
            PdeProblem p = make(3, 2, 0.05, beta, order, 0.05);
            p.c3 = 0.5;
            const EnergyEvaluator ev(p);
            for (unsigned s = 0; s < 4; ++s) {
                const CVec psi = oracle::random_state(32, 40 + s);
                const Linearization lin = Linearization::at_state(psi);
                const HamiltonianBundle b = assemble_hamiltonian(p, lin);
                // the real-value penalty is not a quadratic form, so it sits outside h
                const double dense = psi.dot(b.h * psi).real() + 0.5 * (1.0 - psi.array().square().sum().real());
                const CostReport r = ev.evaluate(psi, lin);
                EXPECT_NEAR(r.total, dense, 1e-10 * std::max(1.0, std::abs(dense)));
                EXPECT_NEAR(r.c1 - r.c2 + r.c0_term + r.c3_term, r.total, 1e-10 * std::max(1.0, std::abs(dense)));
            }
        }
}

TEST(Hamiltonian, RescaleConstant) {
    PdeProblem p = make(2, 2, 1.0, 0.0, 1, 0.01);
    CVec psi = CVec::Zero(16);
    psi(p.grid.index(0, 0)) = 0.5;
    psi(p.grid.index(1, 3)) = std::sqrt(0.75);
    EXPECT_NEAR(rescale_constant(psi, p.grid, 3.0), 3.0 / 0.5, 1e-12);
}

TEST(Hamiltonian, ValidationNamesProblem) {
    PdeProblem p = make(2, 2, 1.0, 0.0, 3, 0.01);
    EXPECT_THROW(p.validate(), ValidationError);
}
