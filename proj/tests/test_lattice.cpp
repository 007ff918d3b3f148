// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fkpde/lattice.hpp"
#include "oracles.hpp"

using namespace fkpde;

TEST(Lattice, ShiftWrapsTopToZero) {
    const CMat a = discrete_operator(OperatorKind::shift_plus, 2, 0.25).matrix;
    CVec e3 = CVec::Zero(4);
    e3(3) = 1.0;
    const CVec out = a * e3;
    EXPECT_EQ(out(0), cplx(1.0));
    EXPECT_NEAR(out.norm(), 1.0, 0.0);
}

TEST(Lattice, ShiftMatchesCyclicPermutationAndCycleLength) {
    for (int n = 1; n <= 4; ++n) {
        const CMat a = discrete_operator(OperatorKind::shift_plus, n, 1.0).matrix;
        EXPECT_NEAR((a - oracle::cyclic_shift(1 << n)).norm(), 0.0, 0.0);
        CMat p = CMat::Identity(1 << n, 1 << n);
        for (int k = 0; k < (1 << n); ++k) p = a * p;
        EXPECT_NEAR((p - CMat::Identity(1 << n, 1 << n)).norm(), 0.0, 1e-14);
        EXPECT_NEAR((a.adjoint() * a - CMat::Identity(1 << n, 1 << n)).norm(), 0.0, 1e-14);
    }
}

TEST(Lattice, LaplacianRowByHand) {
    const CMat lap = discrete_operator(OperatorKind::laplacian, 2, 0.25).matrix;
    const double expected[4] = {-32.0, 16.0, 0.0, 16.0};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(lap(0, j).real(), expected[j], 1e-12);
    EXPECT_NEAR((lap - lap.adjoint()).norm(), 0.0, 1e-12);
}

TEST(Lattice, OperatorsMatchLiteralStencils) {
    for (int n = 1; n <= 4; ++n) {
        const double dx = 1.0 / (1 << n);
        EXPECT_NEAR((discrete_operator(OperatorKind::laplacian, n, dx).matrix - oracle::laplacian(1 << n, dx)).norm(),
                    0.0, 1e-9);
        EXPECT_NEAR((discrete_operator(OperatorKind::first_derivative, n, dx).matrix -
                     oracle::forward_difference(1 << n, dx))
                        .norm(),
                    0.0, 1e-9);
    }
}

TEST(Lattice, DifferencesOfConstantVanish) {
    const CVec ones = CVec::Ones(8);
    for (OperatorKind k : {OperatorKind::laplacian, OperatorKind::first_derivative})
        EXPECT_NEAR((discrete_operator(k, 3, 0.125).matrix * ones).norm(), 0.0, 1e-12);
}

TEST(Lattice, DiagMultiplierChecksLength) {
    CVec v(4);
    v << 1.0, 2.0, 3.0, 4.0;
    EXPECT_NEAR((diag_multiplier(v, 4).matrix.diagonal() - v).norm(), 0.0, 0.0);
    EXPECT_THROW(diag_multiplier(v, 8), ValidationError);
}

TEST(Lattice, GridRejectsZeroQubits) {
    EXPECT_THROW(build_grid(0, 3, 1.0, 0.1), ValidationError);
    EXPECT_THROW(build_grid(3, 0, 1.0, 0.1), ValidationError);
    EXPECT_THROW(build_grid(3, 3, 1.0, 0.0), ValidationError);
}

TEST(Lattice, FlatIndexPutsTimeLowest) {
    const SpacetimeGrid g = build_grid(2, 3, 1.0, 0.1);
    EXPECT_EQ(g.index(1, 0), 8u);
    EXPECT_EQ(g.index(0, 5), 5u);
    EXPECT_EQ(g.index(3, 7), 31u);
}

TEST(Lattice, ProfilesSampleAtGridPoints) {
    const SpacetimeGrid g = build_grid(3, 1, 1.0, 0.1);
    const SampledProfile s = sample_profile(shifted_sine_profile(2.0), g);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(s.values(i), 2.0 + std::sin(2.0 * M_PI * i / 8.0), 1e-14);
    EXPECT_NEAR(s.norm, s.values.norm(), 1e-14);
    const SampledProfile gs = sample_profile(gaussian_profile(), g);
    EXPECT_NEAR(gs.values(4), 1.0, 1e-14);
    EXPECT_NEAR(gs.values(0), std::exp(-M_PI * M_PI), 1e-14);
}
