// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "fkpde/optimize.hpp"
#include "oracles.hpp"

using namespace fkpde;

namespace {

double quadratic(const std::vector<double>& x, std::vector<double>& g) {
    double f = 0.0;
    g.assign(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = static_cast<double>(i + 1);
        f += w * (x[i] - 1.0) * (x[i] - 1.0);
        g[i] = 2.0 * w * (x[i] - 1.0);
    }
    return f;
}

double rosenbrock(const std::vector<double>& x, std::vector<double>& g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g = {-2.0 * a - 400.0 * x[0] * b, 200.0 * b};
    return a * a + 100.0 * b * b;
}

}  // namespace

TEST(Optimize, QuasiNewtonSolvesQuadratic) {
    const StageResult r = quasi_newton(quadratic, {5.0, -3.0, 2.0, 0.0}, {});
    EXPECT_TRUE(r.converged);
    for (double x : r.params) EXPECT_NEAR(x, 1.0, 1e-6);
    EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations + 1));
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Optimize, QuasiNewtonSolvesRosenbrock) {
    QuasiNewtonSettings s;
    s.max_iterations = 500;
    const StageResult r = quasi_newton(rosenbrock, {-1.2, 1.0}, s);
    EXPECT_NEAR(r.params[0], 1.0, 1e-4);
    EXPECT_NEAR(r.params[1], 1.0, 1e-4);
}

TEST(Optimize, AdamDecreasesQuadratic) {
    AdamSettings s;
    s.steps = 3000;
    s.learning_rate = 0.05;
    const StageResult r = adam(quadratic, {3.0, -2.0}, s);
    EXPECT_EQ(r.iterations, 3000);
    EXPECT_LT(r.trace.back(), 1e-6);
    EXPECT_LT(r.trace.back(), r.trace.front());
}

TEST(Optimize, NonFiniteCostAborts) {
    const ValueGradFn bad = [](const std::vector<double>& x, std::vector<double>& g) {
        g.assign(x.size(), 1.0);
        return std::nan("");
    };
    EXPECT_TRUE(quasi_newton(bad, {0.0}, {}).aborted);
    EXPECT_TRUE(adam(bad, {0.0}, {}).aborted);
}

TEST(Optimize, MaskedLeavesFrozenEntriesUntouched) {
    const std::vector<double> full{5.0, 0.123456789, -3.0, 7.25};
    const std::vector<int> free{0, 2};
    const ValueGradFn sub = masked(quadratic, full, free);
    std::vector<double> g;
    const double f = sub({1.0, 1.0}, g);
    ASSERT_EQ(g.size(), 2u);
    std::vector<double> probe = full, gfull;
    probe[0] = 1.0;
    probe[2] = 1.0;
    EXPECT_EQ(f, quadratic(probe, gfull));
    EXPECT_EQ(g[0], gfull[0]);
    EXPECT_EQ(g[1], gfull[2]);
    const StageResult r = quasi_newton(sub, {5.0, -3.0}, {});
    EXPECT_NEAR(r.params[0], 1.0, 1e-6);
    EXPECT_NEAR(r.params[1], 1.0, 1e-6);
}

TEST(Optimize, DiffusionScheduleRampsDiffusion) {
    const RampSchedule s = RampSchedule::diffusion_default(1.0, 100);
    ASSERT_EQ(s.stages.size(), 4u);
    const double d[4] = {0.125, 0.25, 0.5, 1.0};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(s.stages[i].diffusion, d[i]);
        EXPECT_EQ(s.stages[i].optimizer, i == 0 ? OptimizerKind::adam : OptimizerKind::quasi_newton);
        EXPECT_EQ(s.stages[i].max_iterations, 100);
    }
}

TEST(Optimize, BurgersScheduleRampsNonlinearity) {
    const RampSchedule s = RampSchedule::burgers_default();
    ASSERT_EQ(s.stages.size(), 5u);
    const double b[5] = {0.0, 0.125, 0.25, 0.5, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(s.stages[i].diffusion, 0.05);
        EXPECT_DOUBLE_EQ(s.stages[i].nonlinearity, b[i]);
    }
    EXPECT_EQ(s.stages[0].optimizer, OptimizerKind::adam);
}

TEST(Optimize, ScheduleValidation) {
    RampSchedule s;
    EXPECT_THROW(s.validate(), ValidationError);
    s.stages.push_back({1.0, 0.0, OptimizerKind::adam, 0});
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Optimize, DefaultBudgets) {
    EXPECT_EQ(default_budget(6), 2500);
    EXPECT_EQ(default_budget(8), 5000);
    EXPECT_EQ(default_budget(10), 10000);
}

TEST(Optimize, RandomAnglesSeeded) {
    const std::vector<double> a = random_angles(50, 9), b = random_angles(50, 9), c = random_angles(50, 10);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (double x : a) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 2.0 * M_PI);
    }
}

TEST(Optimize, GradientStatistic) {
    // sample std of {1, 3} is sqrt(2)
    EXPECT_NEAR(gradient_norm_statistic({1.0, 3.0}, 4), std::sqrt(2.0) / 2.0, 1e-14);
}

TEST(Optimize, ProtocolOnSmallDiffusionIsDeterministic) {
    PdeProblem p;
    p.grid = build_grid(2, 2, 1.0, 0.00625);
    p.profile = shifted_sine_profile(2.0);
    const Ansatz a = build_brickwall(4, 2, 1, QubitOrdering::make(Ordering::reversed_space, 2, 2));
    const RampSchedule s = RampSchedule::diffusion_default(1.0, 200);
    const ProtocolResult r1 = run_protocol(p, s, a, 2, {}, 3);
    const ProtocolResult r2 = run_protocol(p, s, a, 2, {}, 3);
    ASSERT_EQ(r1.runs.size(), 2u);
    EXPECT_EQ(r1.runs[0].seed, 3u);
    EXPECT_EQ(r1.runs[1].final_params, r2.runs[1].final_params);
    const OptimRun& best = r1.best_run();
    for (const OptimRun& run : r1.runs) EXPECT_LE(best.final_cost.total, run.final_cost.total);
    EXPECT_LT(best.final_cost.total, best.stages.front().trace.front());
    EXPECT_EQ(best.stages.size(), 4u);
}
